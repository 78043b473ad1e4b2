"""Evaluation harness: Top@K / MRR / MAP, end-to-end runs, ablations.

Metrics follow the standard IR definitions; a relevant file missing from
a ranked list contributes nothing to the running sums but still divides
the per-report average precision. Because ranking always covers the full
candidate set, truncation never occurs in practice.
"""

from dataclasses import dataclass, field

from .errors import FaultlineError
from .features import FixHistory, extract_features_all
from .llm import LlmProvider
from .query import ShotMode, construct_query
from .ranker import (DEFAULT_SUBSETS, RankingModel, TrainingInstance, fit,
                     parse_subset, rank)
from .reports import BugReport, Category, classify

CATEGORY_ORDER = (Category.PE, Category.ST, Category.NL)
ABLATION_ROWS = ("TS", "TS+CL", "TS+CL+CG", "ALL")


@dataclass(frozen=True)
class EvalResult:
    top1: float
    top5: float
    top10: float
    mrr: float
    map: float
    n: int

    def as_dict(self) -> dict:
        return {"top1": self.top1, "top5": self.top5, "top10": self.top10,
                "mrr": self.mrr, "map": self.map, "n": self.n}


def _first_relevant_rank(ranked, relevant) -> int | None:
    for pos, fid in enumerate(ranked, 1):
        if fid in relevant:
            return pos
    return None


def top_k(ranked_lists, relevant_sets, k: int) -> float:
    """Fraction of reports with a relevant file in the first k positions."""
    n = len(ranked_lists)
    if n == 0:
        raise FaultlineError("top_k over zero reports")
    hits = sum(
        1 for ranked, relevant in zip(ranked_lists, relevant_sets)
        if any(fid in relevant for fid in ranked[:k])
    )
    return hits / n


def mrr(ranked_lists, relevant_sets) -> float:
    """Mean reciprocal rank of the first relevant file (0 when absent)."""
    n = len(ranked_lists)
    if n == 0:
        raise FaultlineError("mrr over zero reports")
    total = 0.0
    for ranked, relevant in zip(ranked_lists, relevant_sets):
        pos = _first_relevant_rank(ranked, relevant)
        if pos is not None:
            total += 1.0 / pos
    return total / n


def mean_average_precision(ranked_lists, relevant_sets) -> float:
    """MAP: mean over reports of (1/|K|) * sum of Prec@k at relevant hits."""
    n = len(ranked_lists)
    if n == 0:
        raise FaultlineError("map over zero reports")
    total = 0.0
    for ranked, relevant in zip(ranked_lists, relevant_sets):
        if not relevant:
            continue
        hits = 0
        prec_sum = 0.0
        for pos, fid in enumerate(ranked, 1):
            if fid in relevant:
                hits += 1
                prec_sum += hits / pos
        total += prec_sum / len(relevant)
    return total / n


def compute_result(ranked_lists, relevant_sets) -> EvalResult:
    return EvalResult(
        top1=top_k(ranked_lists, relevant_sets, 1),
        top5=top_k(ranked_lists, relevant_sets, 5),
        top10=top_k(ranked_lists, relevant_sets, 10),
        mrr=mrr(ranked_lists, relevant_sets),
        map=mean_average_precision(ranked_lists, relevant_sets),
        n=len(ranked_lists),
    )


@dataclass
class PreparedReport:
    report: BugReport
    category: Category
    query: object
    features: dict  # file_id -> FeatureVector
    relevant: frozenset


@dataclass
class EvalOutcome:
    per_category: dict
    overall: EvalResult | None
    excluded: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "overall": self.overall.as_dict() if self.overall else None,
            "per_category": {c.value: r.as_dict()
                             for c, r in self.per_category.items()},
            "excluded": list(self.excluded),
        }


def prepare_reports(reports, corpora: dict, provider: LlmProvider,
                    shot_mode: ShotMode = ShotMode.ONE_SHOT):
    """Classify, query and featurize each report against its corpus.

    Reports whose (project, version) corpus is missing are excluded and
    listed, mirroring the dataset-cleaning rationale.
    """
    histories = {}
    for key, bundle in corpora.items():
        in_corpus = [r for r in reports
                     if (r.project, r.version) == key and r.fixed_files]
        histories[key] = FixHistory(in_corpus)
    prepared, excluded = [], []
    for report in reports:
        key = (report.project, report.version)
        if key not in corpora:
            excluded.append(report.report_id)
            continue
        bundle = corpora[key]
        category = classify(report)
        query = construct_query(report, provider, bundle, shot_mode)
        features = extract_features_all(report, query, bundle, histories[key])
        prepared.append(PreparedReport(
            report=report,
            category=category,
            query=query,
            features=features,
            relevant=frozenset(report.fixed_files),
        ))
    return prepared, excluded


def evaluate_prepared(prepared, model: RankingModel):
    """Rank every prepared report and aggregate metrics per category + ALL.

    Returns ({Category: EvalResult}, overall EvalResult).
    """
    by_cat: dict[Category, list] = {c: [] for c in CATEGORY_ORDER}
    for p in prepared:
        ranked = [fid for fid, _ in rank(model, p.category, p.features)]
        by_cat[p.category].append((ranked, p.relevant))
    results = {}
    all_pairs = []
    for cat in CATEGORY_ORDER:
        pairs = by_cat[cat]
        all_pairs.extend(pairs)
        if pairs:
            results[cat] = compute_result([r for r, _ in pairs],
                                          [s for _, s in pairs])
    overall = (compute_result([r for r, _ in all_pairs],
                              [s for _, s in all_pairs])
               if all_pairs else None)
    return results, overall


def run_eval(reports, corpora, provider, model,
             shot_mode: ShotMode = ShotMode.ONE_SHOT) -> EvalOutcome:
    if not reports:
        raise FaultlineError("empty dataset")
    prepared, excluded = prepare_reports(reports, corpora, provider, shot_mode)
    if not prepared:
        raise FaultlineError("every report was excluded (no matching corpus)")
    per_category, overall = evaluate_prepared(prepared, model)
    return EvalOutcome(per_category=per_category, overall=overall,
                       excluded=excluded)


def train_from_prepared(prepared, subsets: dict | None = None,
                        subset_override: str | None = None,
                        **fit_kwargs) -> RankingModel:
    """Fit one model per category from prepared rows (relevance = fixed set)."""
    subsets = dict(subsets or DEFAULT_SUBSETS)
    if subset_override:
        chosen = parse_subset(subset_override)
        subsets = {c: chosen for c in CATEGORY_ORDER}
    instances: dict[Category, list] = {c: [] for c in CATEGORY_ORDER}
    for p in prepared:
        for fid, fv in p.features.items():
            instances[p.category].append(TrainingInstance(
                query_id=p.report.report_id,
                file_id=fid,
                features=fv,
                relevance=1 if fid in p.relevant else 0,
            ))
    per_category = {}
    for cat in CATEGORY_ORDER:
        if instances[cat]:
            per_category[cat] = fit(instances[cat], subsets[cat], **fit_kwargs)
    if not per_category:
        raise FaultlineError("no category had training data")
    return RankingModel(per_category)


def ablation(prepared, rows=ABLATION_ROWS, **fit_kwargs) -> dict:
    """Train + evaluate one model per feature-subset row.

    Returns {row_label: {Category: EvalResult}} over the same prepared
    reports, so rows differ only in the active feature set.
    """
    table = {}
    for label in rows:
        model = train_from_prepared(prepared, subset_override=label,
                                    **fit_kwargs)
        per_category, _ = evaluate_prepared(prepared, model)
        table[label] = per_category
    return table


# ---------------------------------------------------------------------------
# Table emitters (aligned text, byte-stable given identical inputs)
# ---------------------------------------------------------------------------

def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def _fmt_row(cells, widths) -> str:
    return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"


def format_comparison_table(outcome: EvalOutcome,
                            technique: str = "faultline") -> str:
    """Category x metric table shaped like the headline comparison."""
    header = ["Category", "Technique", "Top1", "Top5", "Top10", "MRR", "MAP"]
    rows = []
    for cat in CATEGORY_ORDER:
        res = outcome.per_category.get(cat)
        rows.append([cat.value, technique] + _metric_cells(res))
    rows.append(["ALL", technique] + _metric_cells(outcome.overall))
    widths = [max(len(header[i]), *(len(r[i]) for r in rows))
              for i in range(len(header))]
    sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    lines = [sep, _fmt_row(header, widths), sep]
    lines += [_fmt_row(r, widths) for r in rows]
    lines.append(sep)
    return "\n".join(lines) + "\n"


def _metric_cells(res: EvalResult | None) -> list:
    if res is None or res.n == 0:
        return ["-", "-", "-", "-", "-"]
    return [_pct(res.top1), _pct(res.top5), _pct(res.top10),
            f"{res.mrr:.4f}", f"{res.map:.4f}"]


def format_ablation_table(table: dict) -> str:
    """Feature-subset rows x (category MRR/MAP) columns."""
    header = ["Features"]
    for cat in CATEGORY_ORDER:
        header += [f"{cat.value} MRR", f"{cat.value} MAP"]
    rows = []
    for label in table:
        row = [label]
        for cat in CATEGORY_ORDER:
            res = table[label].get(cat)
            if res is None or res.n == 0:
                row += ["-", "-"]
            else:
                row += [f"{res.mrr:.4f}", f"{res.map:.4f}"]
        rows.append(row)
    widths = [max(len(header[i]), *(len(r[i]) for r in rows))
              for i in range(len(header))]
    sep = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    lines = [sep, _fmt_row(header, widths), sep]
    lines += [_fmt_row(r, widths) for r in rows]
    lines.append(sep)
    return "\n".join(lines) + "\n"
