"""The seven per-(report, file) ranking features.

f1 class-name match (length-weighted exact match on declared classes) and
f2 call-graph propagation of f1 are the novel pair; f3 text similarity,
f4 API similarity, f5 collaborative filtering, f6 fix recency and f7 fix
frequency follow the classic learning-to-rank feature set. All cosine
features share the corpus tokenizer and idf weights.
"""

import math
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .corpus import CallGraph, CorpusBundle, SourceFileRecord
from .query import Query
from .reports import BugReport, month_index
from .tokens import tokenize

FEATURE_NAMES = ("f1", "f2", "f3", "f4", "f5", "f6", "f7")


@dataclass(frozen=True)
class FeatureVector:
    f1_class_match: float = 0.0
    f2_call_graph: float = 0.0
    f3_text_sim: float = 0.0
    f4_api_sim: float = 0.0
    f5_collab: float = 0.0
    f6_recency: float = 0.0
    f7_frequency: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.f1_class_match, self.f2_call_graph,
                         self.f3_text_sim, self.f4_api_sim, self.f5_collab,
                         self.f6_recency, self.f7_frequency], dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        return cls(*(float(v) for v in values))


def sparse_cosine(ids_a, w_a, ids_b, w_b) -> float:
    """Cosine between two (ids, weights) sparse vectors; 0 if either is zero."""
    na = math.sqrt(float(np.dot(w_a, w_a))) if len(w_a) else 0.0
    nb = math.sqrt(float(np.dot(w_b, w_b))) if len(w_b) else 0.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    lookup = dict(zip(ids_a.tolist(), w_a.tolist()))
    dot = sum(lookup.get(int(i), 0.0) * float(v) for i, v in zip(ids_b, w_b))
    return dot / (na * nb)


def class_name_match_score(record: SourceFileRecord, query: Query) -> float:
    """Sum of character lengths of declared class names present in the query."""
    entities = set(query.entities)
    return float(sum(len(c) for c in record.class_names if c in entities))


def call_graph_score(file_id: str, graph: CallGraph, f1_of: dict) -> float:
    """Propagate f1 over the call graph: sum over callers plus callees.

    The file's own f1 is not included; a mutual neighbor counts on both
    sides, exactly as the two directed sums dictate.
    """
    total = sum(f1_of[g] for g in graph.callers(file_id))
    total += sum(f1_of[g] for g in graph.callees(file_id))
    return float(total)


def text_similarity(ids_a, w_a, ids_b, w_b) -> float:
    return sparse_cosine(ids_a, w_a, ids_b, w_b)


class FixHistory:
    """Per file: prior fixing reports, ordered by timestamp.

    Entries are (created_at, report_id, token counts of title+description);
    lookups are strictly-earlier-than, exclusive of the query report.
    """

    def __init__(self, reports):
        self._by_file: dict[str, list] = {}
        for rep in sorted(reports, key=lambda r: (r.created_at, r.report_id)):
            counts = tokenize(rep.text)
            for path in rep.fixed_files:
                self._by_file.setdefault(path, []).append(
                    (rep.created_at, rep.report_id, counts))

    def prior_fixes(self, file_id: str, before) -> list:
        entries = self._by_file.get(file_id, [])
        cut = bisect_left(entries, before, key=lambda e: e[0])
        return entries[:cut]


def api_similarity(report_ids, report_w, record: SourceFileRecord,
                   bundle: CorpusBundle) -> float:
    """Max cosine over the file's API text and each method's doc+signature."""
    best = 0.0
    for ids, w in _api_vectors(bundle, record.file_id):
        best = max(best, sparse_cosine(report_ids, report_w, ids, w))
    return best


def collaborative_filtering_score(report_ids, report_w, prior_entries,
                                  bundle: CorpusBundle) -> float:
    """Cosine against the concatenation of all prior fixing reports."""
    if not prior_entries:
        return 0.0
    concat: Counter = Counter()
    for _, _, counts in prior_entries:
        concat.update(counts)
    ids, w = bundle.index.vectorize(concat)
    return sparse_cosine(report_ids, report_w, ids, w)


def bug_fix_recency(report: BugReport, prior_entries) -> float:
    """1 / (months since last prior fix + 1); 0 with no history."""
    if not prior_entries:
        return 0.0
    last_ts = prior_entries[-1][0]
    delta = max(0, month_index(report.created_at) - month_index(last_ts))
    return 1.0 / (delta + 1)


def bug_fix_frequency(prior_entries) -> float:
    return float(len(prior_entries))


def _api_vectors(bundle: CorpusBundle, file_id: str):
    """(ids, weights) vectors for a file's API text and each method's text."""
    cache = getattr(bundle, "_api_vector_cache", None)
    if cache is None:
        cache = {}
        bundle._api_vector_cache = cache
    if file_id not in cache:
        record = bundle.records[file_id]
        vectors = []
        counts = tokenize(record.api_text)
        if counts:
            vectors.append(bundle.index.vectorize(counts))
        for _, text in record.method_api:
            mcounts = tokenize(text)
            if mcounts:
                vectors.append(bundle.index.vectorize(mcounts))
        cache[file_id] = vectors
    return cache[file_id]


def f1_map(query: Query, bundle: CorpusBundle) -> dict:
    return {fid: class_name_match_score(rec, query)
            for fid, rec in bundle.records.items()}


def extract_features(report: BugReport, query: Query,
                     record: SourceFileRecord, bundle: CorpusBundle,
                     history: FixHistory, f1_of: dict | None = None) -> FeatureVector:
    """All seven features for one (report, file) pair."""
    if f1_of is None:
        f1_of = f1_map(query, bundle)
    index = bundle.index
    r_ids, r_w = index.vectorize(tokenize(report.text))
    f_vec = index.file_vector(record.file_id)
    f_ids = np.array(sorted(f_vec), dtype=np.int64)
    f_w = np.array([f_vec[i] for i in sorted(f_vec)], dtype=np.float64)
    prior = history.prior_fixes(record.file_id, report.created_at)
    return FeatureVector(
        f1_class_match=f1_of[record.file_id],
        f2_call_graph=call_graph_score(record.file_id, bundle.graph, f1_of),
        f3_text_sim=text_similarity(r_ids, r_w, f_ids, f_w),
        f4_api_sim=api_similarity(r_ids, r_w, record, bundle),
        f5_collab=collaborative_filtering_score(r_ids, r_w, prior, bundle),
        f6_recency=bug_fix_recency(report, prior),
        f7_frequency=bug_fix_frequency(prior),
    )


def extract_features_all(report: BugReport, query: Query,
                         bundle: CorpusBundle,
                         history: FixHistory) -> dict:
    """Feature vectors for every corpus file; f3 runs the batch kernel."""
    index = bundle.index
    f1_of = f1_map(query, bundle)
    r_ids, r_w = index.vectorize(tokenize(report.text))
    q_dense = np.zeros(len(index.vocabulary), dtype=np.float64)
    q_dense[r_ids] = r_w
    q_norm = math.sqrt(float(np.dot(r_w, r_w))) if len(r_w) else 0.0
    sims = _kernels.cosine_batch(index.indptr, index.indices, index.data,
                                 index.row_norms, q_dense, q_norm)
    out = {}
    for row, fid in enumerate(index.file_ids):
        record = bundle.records[fid]
        prior = history.prior_fixes(fid, report.created_at)
        out[fid] = FeatureVector(
            f1_class_match=f1_of[fid],
            f2_call_graph=call_graph_score(fid, bundle.graph, f1_of),
            f3_text_sim=float(sims[row]),
            f4_api_sim=api_similarity(r_ids, r_w, record, bundle),
            f5_collab=collaborative_filtering_score(r_ids, r_w, prior, bundle),
            f6_recency=bug_fix_recency(report, prior),
            f7_frequency=bug_fix_frequency(prior),
        )
    return out
