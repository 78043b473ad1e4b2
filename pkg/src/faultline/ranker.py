"""Pairwise linear ranking: normalization, seeded SGD training, ranking.

Training follows the ranking-SVM objective: every (relevant, irrelevant)
pair within a query becomes a difference vector with label +1, and a
deterministic stochastic subgradient pass minimizes
0.5*||w||^2 + C * sum hinge(1 - w.d). Feature bounds come from the
training data only and are frozen into the model.
"""

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import FaultlineError, TrainingDataDegenerate
from .features import FEATURE_NAMES, FeatureVector
from .reports import Category

MODEL_FORMAT_VERSION = 1

# Table-style subset labels -> feature names.
SUBSET_LABELS = {"TS": "f3", "CL": "f1", "CG": "f2", "API": "f4",
                 "CF": "f5", "REC": "f6", "FREQ": "f7"}
DEFAULT_SUBSETS = {
    Category.PE: ("f1", "f2", "f3"),  # TS+CL+CG
    Category.ST: ("f1", "f2", "f3"),  # TS+CL+CG
    Category.NL: ("f1", "f3"),        # TS+CL
}
DEFAULT_C = 0.01
DEFAULT_EPOCHS = 50
DEFAULT_LR0 = 0.1
DEFAULT_SEED = 42


def parse_subset(spec: str) -> tuple:
    """"TS,CL,CG" or "ALL" -> canonical ordered feature-name tuple."""
    if spec.strip().upper() == "ALL":
        return FEATURE_NAMES
    names = []
    for label in spec.replace("+", ",").split(","):
        label = label.strip().upper()
        if label not in SUBSET_LABELS:
            raise FaultlineError(f"unknown feature label: {label!r}")
        names.append(SUBSET_LABELS[label])
    return tuple(sorted(set(names), key=FEATURE_NAMES.index))


@dataclass
class TrainingInstance:
    query_id: str
    file_id: str
    features: FeatureVector
    relevance: int  # 1 if the file is in the report's fixed set


def compute_bounds(instances) -> dict:
    """Per-feature (min, max) over the training instances."""
    matrix = np.array([inst.features.as_array() for inst in instances])
    return {name: (float(matrix[:, i].min()), float(matrix[:, i].max()))
            for i, name in enumerate(FEATURE_NAMES)}


def normalize_value(value: float, lo: float, hi: float) -> float:
    """Three-case normalization: clamp below to 0, above to 1, linear
    between; a degenerate (lo == hi) feature normalizes to 0."""
    if lo == hi:
        return 0.0
    if value < lo:
        return 0.0
    if value > hi:
        return 1.0
    return (value - lo) / (hi - lo)


def normalize(raw: FeatureVector, bounds: dict) -> FeatureVector:
    values = raw.as_array()
    out = [normalize_value(float(values[i]), *bounds[name])
           if name in bounds else float(values[i])
           for i, name in enumerate(FEATURE_NAMES)]
    return FeatureVector.from_array(out)


@dataclass
class CategoryModel:
    active_features: tuple
    weights: np.ndarray
    bounds: dict  # feature name -> (min, max)
    hyperparams: dict = field(default_factory=dict)
    fold: int | None = None

    def score(self, raw: FeatureVector) -> float:
        normed = normalize(raw, self.bounds).as_array()
        cols = [FEATURE_NAMES.index(n) for n in self.active_features]
        return float(np.dot(self.weights, normed[cols]))


def _pair_differences(instances, active_features, bounds):
    cols = [FEATURE_NAMES.index(n) for n in active_features]
    by_query: dict[str, list] = {}
    for inst in instances:
        normed = normalize(inst.features, bounds).as_array()[cols]
        by_query.setdefault(inst.query_id, []).append((inst.relevance, normed))
    diffs = []
    for query_id in sorted(by_query):
        rows = by_query[query_id]
        rel = [v for r, v in rows if r == 1]
        irr = [v for r, v in rows if r == 0]
        for rv in rel:
            for iv in irr:
                diffs.append(rv - iv)
    return np.array(diffs, dtype=np.float64)


def fit(instances, active_features, c: float = DEFAULT_C,
        epochs: int = DEFAULT_EPOCHS, seed: int = DEFAULT_SEED,
        lr0: float = DEFAULT_LR0, fold: int | None = None) -> CategoryModel:
    """Train one category's weights; bit-reproducible for a fixed seed."""
    if not instances:
        raise TrainingDataDegenerate("no training instances")
    bounds = compute_bounds(instances)
    diffs = _pair_differences(instances, active_features, bounds)
    if diffs.size == 0:
        raise TrainingDataDegenerate(
            "no (relevant, irrelevant) pair could be constructed")
    if not np.any(diffs):
        raise TrainingDataDegenerate("all feature difference vectors are zero")
    rng = np.random.default_rng(seed)
    n = diffs.shape[0]
    order = np.concatenate([rng.permutation(n) for _ in range(epochs)])
    weights = _kernels.sgd_hinge(diffs, float(c), float(lr0),
                                 order.astype(np.int64))
    return CategoryModel(
        active_features=tuple(active_features),
        weights=np.asarray(weights, dtype=np.float64),
        bounds=bounds,
        hyperparams={"C": c, "epochs": epochs, "seed": seed, "lr0": lr0},
        fold=fold,
    )


class RankingModel:
    """Per-category models plus (de)serialization to model.json."""

    def __init__(self, per_category: dict):
        self.per_category = dict(per_category)

    def category_model(self, category: Category) -> CategoryModel:
        key = Category(category)
        if key not in self.per_category:
            raise FaultlineError(f"no model trained for category {key.value}")
        return self.per_category[key]

    def score(self, raw: FeatureVector, category: Category) -> float:
        return self.category_model(category).score(raw)

    def save(self, path) -> None:
        doc = {"format_version": MODEL_FORMAT_VERSION, "per_category": {}}
        for cat in sorted(self.per_category, key=lambda c: c.value):
            m = self.per_category[cat]
            doc["per_category"][cat.value] = {
                "active_features": list(m.active_features),
                "weights": [float(w) for w in m.weights],
                "bounds": {n: {"min": m.bounds[n][0], "max": m.bounds[n][1]}
                           for n in FEATURE_NAMES if n in m.bounds},
                "hyperparams": m.hyperparams,
                "fold": m.fold,
            }
        Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RankingModel":
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FaultlineError(f"cannot load model {path}: {exc}") from exc
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise FaultlineError(f"unsupported model format in {path}")
        per_category = {}
        for cat_name, m in doc["per_category"].items():
            per_category[Category(cat_name)] = CategoryModel(
                active_features=tuple(m["active_features"]),
                weights=np.array(m["weights"], dtype=np.float64),
                bounds={n: (b["min"], b["max"]) for n, b in m["bounds"].items()},
                hyperparams=m.get("hyperparams", {}),
                fold=m.get("fold"),
            )
        return cls(per_category)


def rank(model: RankingModel, category: Category, candidates: dict) -> list:
    """Rank {file_id: raw FeatureVector} into [(file_id, score), ...].

    Descending score; ties break on higher raw f1, then lexicographic
    file id, so the output is a total order independent of input order.
    """
    cat_model = model.category_model(category)
    scored = [
        (fid, cat_model.score(fv), fv.f1_class_match)
        for fid, fv in candidates.items()
    ]
    scored.sort(key=lambda t: (-t[1], -t[2], t[0]))
    return [(fid, score) for fid, score, _ in scored]


@dataclass(frozen=True)
class FoldSpec:
    fold_id: int  # 1-based; fold j trains on subsets 1..j, tests on j+1
    train_ids: tuple
    test_ids: tuple


def chronological_folds(reports, k: int = 10) -> list:
    """Time-ordered folds: sort by created_at, cut into k contiguous
    subsets (earlier subsets absorb the remainder), train on the prefix."""
    ordered = sorted(reports, key=lambda r: (r.created_at, r.report_id))
    n = len(ordered)
    if n == 0:
        return []
    if n < k:
        warnings.warn(f"only {n} reports; reducing fold count from {k}",
                      RuntimeWarning, stacklevel=2)
        k = n
    base, rem = divmod(n, k)
    subsets = []
    start = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        subsets.append(tuple(r.report_id for r in ordered[start:start + size]))
        start += size
    folds = []
    train: list = []
    for j in range(k - 1):
        train.extend(subsets[j])
        folds.append(FoldSpec(fold_id=j + 1, train_ids=tuple(train),
                              test_ids=subsets[j + 1]))
    return folds
