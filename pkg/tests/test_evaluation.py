import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from llrecall.corpus import Corpus, LessonRecord, QueryArtifact
from llrecall.evaluation import (
    CombinationSpec,
    EvalConfig,
    build_combinations,
    relative_improvement,
    round_percent,
    run_experiment,
    run_grid,
    select_subspace_toppers,
    top_k_accuracy,
)
from llrecall.fusion import borda_fuse
from llrecall.grid import BuildOptions, enumerate_grid, grid_order
from llrecall.ranking import RankedList
from llrecall.report import report_rows


def _runs(hit_flags):
    """One ranked list per query; the relevant lesson sits at rank 1 when flagged, else rank 30."""
    results, judgments = {}, {}
    for i, hit in enumerate(hit_flags):
        docs = {f"x{j:02d}": 1.0 - j / 100 for j in range(40)}
        rel = "x00" if hit else "x29"
        results[f"q{i}"] = RankedList.from_scores(docs)
        judgments[f"q{i}"] = {rel}
    return results, judgments


def test_top_k_all_and_none():
    assert top_k_accuracy(*_runs([True] * 5), k=20) == 1.0
    assert top_k_accuracy(*_runs([False] * 5), k=20) == 0.0


def test_top_k_38_of_54():
    value = top_k_accuracy(*_runs([True] * 38 + [False] * 16), k=20)
    assert value == 38 / 54
    assert value == pytest.approx(0.70370, abs=5e-6)


def test_top_k_empty_relevance_set_counts_in_denominator():
    results, judgments = _runs([True, True])
    judgments["q1"] = set()
    assert top_k_accuracy(results, judgments, k=20) == 0.5


def test_top_k_errors():
    with pytest.raises(ValueError):
        top_k_accuracy({}, {}, k=20)
    results, _ = _runs([True])
    with pytest.raises(KeyError):
        top_k_accuracy(results, {}, k=20)


@given(st.lists(st.booleans(), min_size=1, max_size=20), st.integers(1, 45))
def test_top_k_monotone_in_k(flags, k):
    results, judgments = _runs(flags)
    assert top_k_accuracy(results, judgments, k) <= top_k_accuracy(results, judgments, k + 1)
    assert top_k_accuracy(results, judgments, 40) == 1.0


def test_relative_improvement_table_values():
    assert round_percent(relative_improvement(0.7407, 0.7037)) == 5
    assert round_percent(relative_improvement(30 / 54, 25 / 54)) == 20
    assert round_percent(relative_improvement(27 / 54, 25 / 54)) == 8
    assert relative_improvement(0.5, 0.5) == 0
    with pytest.raises(ZeroDivisionError):
        relative_improvement(0.3, 0.0)


@given(st.floats(0.01, 1), st.floats(0.01, 1))
def test_relative_improvement_sign(hybrid, best):
    ri = relative_improvement(hybrid, best)
    assert (ri > 0) == (hybrid > best) and (ri < 0) == (hybrid < best)
    assert relative_improvement(best, best) == 0


def test_round_percent_halves_away_from_zero():
    assert [round_percent(x) for x in (2.5, -2.5, 0.49, -0.5, 3.2)] == [3, -3, 0, -1, 3]


def test_toppers_all_tied_pick_canonical_first():
    individual = {c.id: 0.5 for c in enumerate_grid()}
    toppers = select_subspace_toppers(individual)
    assert len(toppers) == 12
    assert toppers[0] == "vsm:none:tfidf:cosine:-"
    assert toppers[4] == "lsi:none:tfidf:cosine:32"
    assert toppers[8] == "lda:none:-:condprob:32"
    assert Counter(t.split(":")[0] for t in toppers) == {"vsm": 4, "lsi": 4, "lda": 4}


def _brute_force_toppers(individual):
    order = grid_order()
    best = {}
    for cid in sorted(individual, key=order.__getitem__):
        model, prep = cid.split(":")[:2]
        key = (model, prep)
        if key not in best or individual[cid] > individual[best[key]]:
            best[key] = cid
    return best


@pytest.mark.parametrize("seed", range(25))
def test_toppers_match_exhaustive_scan(seed):
    rng = random.Random(seed)
    individual = {c.id: rng.choice([0.1, 0.2, 0.3, rng.random()]) for c in enumerate_grid()}
    expected = _brute_force_toppers(individual)
    assert sorted(select_subspace_toppers(individual)) == sorted(expected.values())


def test_toppers_with_strict_maxima():
    individual = {c.id: 0.1 for c in enumerate_grid()}
    chosen = ["vsm:stem:boolean:overlap:-", "lsi:stop:sublinear:cosine:256", "lda:stemstop:-:condprob:64"]
    for cid in chosen:
        individual[cid] = 0.9
    toppers = select_subspace_toppers(individual)
    assert set(chosen) <= set(toppers)


def _some_toppers():
    return select_subspace_toppers({c.id: 0.5 for c in enumerate_grid()})


def test_combination_structure():
    toppers = _some_toppers()
    combos = build_combinations(toppers)
    assert len(combos) == 22
    assert [c.comb_id for c in combos] == list(range(1, 23))
    assert Counter(len(c.members) for c in combos) == {2: 18, 4: 3, 12: 1}
    for c in combos:
        assert set(c.members) <= set(toppers)
        assert len(set(c.members)) == len(c.members)
    # vsm pairs, vsm quad, lsi pairs, lsi quad, lda pairs, lda quad, all twelve
    families = [{m.split(":")[0] for m in c.members} for c in combos]
    assert families[:7] == [{"vsm"}] * 7
    assert families[7:14] == [{"lsi"}] * 7
    assert families[14:21] == [{"lda"}] * 7
    assert families[21] == {"vsm", "lsi", "lda"}


def test_combinations_independent_of_input_order():
    toppers = _some_toppers()
    shuffled = list(toppers)
    random.Random(4).shuffle(shuffled)
    assert build_combinations(shuffled) == build_combinations(toppers)


def test_malformed_topper_sets():
    toppers = _some_toppers()
    with pytest.raises(ValueError):
        build_combinations(toppers[:11])
    with pytest.raises(ValueError):
        build_combinations(toppers[:11] + ["vsm:stem:tfidf:overlap:-"])  # 5 vsm, 3 lda
    with pytest.raises(ValueError):
        CombinationSpec(1, ("a", "b", "c"))


def test_eval_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(k=0)


@pytest.fixture(scope="module")
def small_report(small_synthetic):
    return run_experiment(small_synthetic, EvalConfig(k=5, master_seed=2), BuildOptions(lda_train_sweeps=30, lda_infer_sweeps=10))


def test_experiment_report_invariants(small_report, small_synthetic):
    report = small_report
    assert len(report.individuals) == 88 and len(report.rows) == 22
    assert report.n_queries == len(small_synthetic.artifacts)
    for row in report.rows:
        for frac in (row.top_individual, row.score_addition, row.borda):
            assert 0 <= frac <= 1
        assert row.top_individual == max(report.individual(m) for m in row.members)
        for hybrid, ri in ((row.score_addition, row.ri_score_addition), (row.borda, row.ri_borda)):
            assert (ri > 0) == (hybrid > row.top_individual)
            assert (ri < 0) == (hybrid < row.top_individual)


def test_experiment_rows_match_component_oracles(small_report, small_synthetic):
    """Recompute one pair combination directly from per-config runs."""
    row = small_report.rows[0]
    opts = BuildOptions(master_seed=2, lda_train_sweeps=30, lda_infer_sweeps=10)
    runs = run_grid(small_synthetic, opts, config_ids=row.members)
    hits = 0
    for a in small_synthetic.artifacts:
        fused = borda_fuse([runs[m][a.id] for m in row.members])
        hits += any(d in small_synthetic.judgments[a.id] for d in fused.top(5))
    assert row.borda == hits / len(small_synthetic.artifacts)


def test_agreeing_members_give_zero_ri():
    # every lesson is relevant to every query, so any non-empty list is a hit for every
    # classifier and every hybrid alike
    words = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet", "kilo", "lima"]
    lessons = [LessonRecord(f"L{i}", "P", context=f"{words[2 * i]} {words[2 * i + 1]}") for i in range(6)]
    artifacts = [QueryArtifact(f"A{i}", "issue", title=lessons[i].context) for i in range(6)]
    everything = {lesson.id for lesson in lessons}
    corpus = Corpus(lessons, artifacts, {a.id: everything for a in artifacts})
    report = run_experiment(corpus, EvalConfig(k=20), BuildOptions(lda_train_sweeps=20, lda_infer_sweeps=5))
    assert all(p == 1.0 for _, p in report.individuals)
    assert all(r["ri_score_addition"] == 0 and r["ri_borda"] == 0 for r in report_rows(report))


def test_experiment_is_deterministic(small_report, small_synthetic):
    again = run_experiment(small_synthetic, EvalConfig(k=5, master_seed=2), BuildOptions(lda_train_sweeps=30, lda_infer_sweeps=10))
    assert report_rows(again) == report_rows(small_report)
    assert again.individuals == small_report.individuals


def test_parallel_run_matches_serial(small_report, small_synthetic):
    parallel = run_experiment(
        small_synthetic, EvalConfig(k=5, master_seed=2), BuildOptions(lda_train_sweeps=30, lda_infer_sweeps=10), jobs=2
    )
    assert report_rows(parallel) == report_rows(small_report)
    assert parallel.individuals == small_report.individuals
