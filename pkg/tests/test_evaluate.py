import random

import pytest

from faultline.errors import FaultlineError
from faultline.evaluate import (EvalOutcome, ablation, evaluate_prepared,
                                format_ablation_table,
                                format_comparison_table,
                                mean_average_precision, mrr, run_eval,
                                top_k, train_from_prepared)
from faultline.llm import MockProvider
from faultline.reports import Category

from conftest import FIXTURES
from reference_impl import reference_map, reference_mrr, reference_top_k
from sample_reports import make_report


def test_top_k_examples():
    assert top_k([["a", "b"]], [{"a"}], 1) == 1.0
    ranked = [[f"d{i}" for i in range(10)]]
    assert top_k(ranked, [{"d5"}], 5) == 0.0  # relevant at rank 6
    assert top_k(ranked, [{"d5"}], 10) == 1.0


def test_mrr_examples():
    assert mrr([["x", "hit", "y"]], [{"hit"}]) == 0.5
    two = [["hit", "x"], ["a", "b", "c", "hit"]]
    assert mrr(two, [{"hit"}, {"hit"}]) == pytest.approx(0.625, abs=1e-15)


def test_map_examples():
    # relevant at positions 1 and 3, |K| = 2 -> (1 + 2/3) / 2
    ranked = [["r1", "x", "r2", "y"]]
    assert mean_average_precision(ranked, [{"r1", "r2"}]) == \
        pytest.approx((1.0 + 2.0 / 3.0) / 2.0, abs=1e-15)
    assert mean_average_precision([["hit"]], [{"hit"}]) == 1.0


def test_missing_relevant_still_divides():
    # one of two relevant files absent from the list
    assert mean_average_precision([["r1", "x"]], [{"r1", "gone"}]) == 0.5


def test_metrics_error_on_empty():
    for fn in (lambda: top_k([], [], 1), lambda: mrr([], []),
               lambda: mean_average_precision([], [])):
        with pytest.raises(FaultlineError):
            fn()


def _random_cases(seed, trials, singleton=False):
    rng = random.Random(seed)
    ranked_lists, relevant_sets = [], []
    for _ in range(trials):
        n_docs = rng.randint(1, 30)
        docs = [f"d{i}" for i in range(n_docs)]
        ranked = rng.sample(docs, k=rng.randint(1, n_docs))
        k_rel = 1 if singleton else rng.randint(1, min(6, n_docs))
        relevant = set(rng.sample(docs, k=k_rel))
        ranked_lists.append(ranked)
        relevant_sets.append(relevant)
    return ranked_lists, relevant_sets


def test_metrics_match_oracle_on_random_fixtures():
    ranked_lists, relevant_sets = _random_cases(99, 200)
    assert mrr(ranked_lists, relevant_sets) == pytest.approx(
        reference_mrr(ranked_lists, relevant_sets), abs=1e-12)
    assert mean_average_precision(ranked_lists, relevant_sets) == pytest.approx(
        reference_map(ranked_lists, relevant_sets), abs=1e-12)
    for k in (1, 3, 5, 10):
        assert top_k(ranked_lists, relevant_sets, k) == pytest.approx(
            reference_top_k(ranked_lists, relevant_sets, k), abs=1e-12)


def test_singleton_map_equals_mrr_exactly():
    ranked_lists, relevant_sets = _random_cases(7, 120, singleton=True)
    assert mean_average_precision(ranked_lists, relevant_sets) == \
        mrr(ranked_lists, relevant_sets)


def test_appending_irrelevant_below_changes_nothing():
    ranked = [["a", "r", "b"], ["r", "c"]]
    relevant = [{"r"}, {"r"}]
    extended = [lst + ["zz1", "zz2"] for lst in ranked]
    assert mrr(ranked, relevant) == mrr(extended, relevant)
    assert mean_average_precision(ranked, relevant) == \
        mean_average_precision(extended, relevant)
    for k in (1, 2, 3, 5):
        assert top_k(ranked, relevant, k) == top_k(extended, relevant, k)


def test_permuting_below_last_relevant_changes_nothing():
    ranked = [["a", "r", "x", "y", "z"]]
    permuted = [["a", "r", "z", "x", "y"]]
    relevant = [{"r"}]
    assert mrr(ranked, relevant) == mrr(permuted, relevant)
    assert mean_average_precision(ranked, relevant) == \
        mean_average_precision(permuted, relevant)


def test_metrics_invariant_to_report_order():
    ranked_lists, relevant_sets = _random_cases(13, 40)
    paired = list(zip(ranked_lists, relevant_sets))
    random.Random(5).shuffle(paired)
    shuffled_r = [r for r, _ in paired]
    shuffled_s = [s for _, s in paired]
    assert mrr(ranked_lists, relevant_sets) == pytest.approx(
        mrr(shuffled_r, shuffled_s), abs=1e-15)
    assert mean_average_precision(ranked_lists, relevant_sets) == pytest.approx(
        mean_average_precision(shuffled_r, shuffled_s), abs=1e-15)


def test_run_eval_mini_dataset(demo_reports, demo_bundle, demo_model):
    provider = MockProvider.from_fixture(FIXTURES / "mock_replies.json")
    outcome = run_eval(demo_reports, {("demo", "1.0"): demo_bundle},
                       provider, demo_model)
    assert outcome.overall.n == 12
    for cat in (Category.PE, Category.ST, Category.NL):
        assert outcome.per_category[cat].n == 4
    assert outcome.excluded == []
    res = outcome.overall
    assert 0 <= res.top1 <= res.top5 <= res.top10 <= 1


def test_run_eval_is_deterministic(demo_reports, demo_bundle, demo_model):
    provider = MockProvider.from_fixture(FIXTURES / "mock_replies.json")
    corpora = {("demo", "1.0"): demo_bundle}
    a = run_eval(demo_reports, corpora, provider, demo_model).as_dict()
    b = run_eval(demo_reports, corpora, provider, demo_model).as_dict()
    assert a == b


def test_run_eval_excludes_unknown_corpus(demo_reports, demo_bundle, demo_model):
    provider = MockProvider.from_fixture(FIXTURES / "mock_replies.json")
    stray = make_report("STRAY-1", "Some title", "Some body",
                        project="elsewhere")
    outcome = run_eval(demo_reports + [stray],
                       {("demo", "1.0"): demo_bundle}, provider, demo_model)
    assert outcome.excluded == ["STRAY-1"]
    assert outcome.overall.n == 12


def test_run_eval_empty_dataset_errors(demo_bundle, demo_model):
    provider = MockProvider()
    with pytest.raises(FaultlineError):
        run_eval([], {("demo", "1.0"): demo_bundle}, provider, demo_model)


def test_ablation_rows_and_composition(demo_prepared):
    table = ablation(demo_prepared)
    assert list(table) == ["TS", "TS+CL", "TS+CL+CG", "ALL"]
    solo = train_from_prepared(demo_prepared, subset_override="TS")
    per_cat, _ = evaluate_prepared(demo_prepared, solo)
    for cat, res in per_cat.items():
        assert table["TS"][cat] == res


def test_ablation_class_match_helps_when_names_align(demo_prepared):
    table = ablation(demo_prepared)
    for cat in (Category.PE, Category.ST, Category.NL):
        assert table["TS+CL"][cat].mrr >= table["TS"][cat].mrr


def test_comparison_table_layout(demo_prepared, demo_model):
    per_cat, overall = evaluate_prepared(demo_prepared, demo_model)
    text = format_comparison_table(
        EvalOutcome(per_category=per_cat, overall=overall))
    lines = text.splitlines()
    assert "| Category | Technique |" in lines[1]
    labels = [ln.split("|")[1].strip() for ln in lines[3:7]]
    assert labels == ["PE", "ST", "NL", "ALL"]
    for column in ("Top1", "Top5", "Top10", "MRR", "MAP"):
        assert column in lines[1]


def test_ablation_table_layout(demo_prepared):
    text = format_ablation_table(ablation(demo_prepared))
    lines = text.splitlines()
    labels = [ln.split("|")[1].strip() for ln in lines[3:7]]
    assert labels == ["TS", "TS+CL", "TS+CL+CG", "ALL"]
    for cat in ("PE", "ST", "NL"):
        assert f"{cat} MRR" in lines[1] and f"{cat} MAP" in lines[1]


def test_tables_byte_stable(demo_prepared, demo_model):
    per_cat, overall = evaluate_prepared(demo_prepared, demo_model)
    outcome = EvalOutcome(per_category=per_cat, overall=overall)
    assert format_comparison_table(outcome).encode() == \
        format_comparison_table(outcome).encode()
    assert format_ablation_table(ablation(demo_prepared)).encode() == \
        format_ablation_table(ablation(demo_prepared)).encode()
