import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from oracles import R_NFOLD_015_3, R_PAIR_028, R_PRODUCT_08, WILSON_99
from rcsets.errors import DomainError, InsufficientSurvivors
from rcsets.galton_watson import survival_recurrence
from rcsets.intersection import nfold_symbol_law, threshold
from rcsets.measures import BernoulliPair, OffspringLaw, SurvivalPair, gw_offspring, survival_from_bernoulli
from rcsets.montecarlo import (
    CSV_COLUMNS,
    EstimateRecord,
    converse_distribution_test,
    estimate_nfold_emptiness,
    estimate_pair_emptiness,
    estimate_survival,
    modes_agree,
    pruned_frequency_experiment,
    records_to_csv,
    wilson_interval,
)

LAW_08 = gw_offspring(SurvivalPair(0.8, 0.8))
FULL = OffspringLaw(0, 0, 1, 0)


@pytest.fixture(scope="module")
def schema():
    text = resources.files("rcsets").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


@pytest.mark.parametrize("key", sorted(WILSON_99))
def test_wilson_interval(key):
    assert wilson_interval(*key) == pytest.approx(WILSON_99[key], abs=1e-12)


def test_record_verdict_and_tolerance():
    rec = EstimateRecord.from_counts("x", 50, 100, 1, exact=0.5)
    assert rec.ci_low <= rec.value <= rec.ci_high
    assert rec.tolerance == pytest.approx(rec.half_width + 0.005)
    assert rec.passed
    far = EstimateRecord.from_counts("x", 50, 100, 1, exact=0.7)
    assert far.verdict == "fail"
    fixed = EstimateRecord.from_counts("x", 50, 100, 1, exact=0.52, tolerance=0.01)
    assert fixed.verdict == "fail"


def test_full_law_survives_always():
    rec = estimate_survival(FULL, 10, 500, seed=1)
    assert rec.value == 1.0 and rec.exact == 1.0 and rec.passed


def test_survival_estimate_product_law():
    rec = estimate_survival(LAW_08, 25, 10**5, seed=7)
    assert abs(rec.exact - R_PRODUCT_08[25]) < 1e-12
    assert abs(rec.exact - 0.9375) < 2e-3
    assert abs(rec.value - rec.exact) < 0.01
    assert rec.limit == pytest.approx(0.9375)


def test_survival_estimate_nfold_law():
    rec = estimate_survival(nfold_symbol_law(0.15, 3), 25, 10**5, seed=8)
    assert rec.exact == pytest.approx(R_NFOLD_015_3[25], abs=1e-12)
    assert abs(rec.value - rec.exact) < 0.01


def test_pair_with_full_tree_never_empty():
    rec = estimate_pair_emptiness(BernoulliPair(0, 0), BernoulliPair(0.3, 0.2), 10, 300, seed=3)
    assert rec.value == 0.0
    assert rec.exact == pytest.approx(0.0, abs=1e-15)


def test_pair_emptiness_near_threshold():
    a = BernoulliPair(0.28, 0.28)
    rec = estimate_pair_emptiness(a, a, 12, 10**4, seed=12)
    assert rec.exact == pytest.approx(1 - R_PAIR_028[12], abs=1e-12)
    assert abs(rec.value - rec.exact) < 0.02


def test_pair_emptiness_requires_possible_intersection():
    a = BernoulliPair(0.3, 0.3)
    with pytest.raises(DomainError):
        estimate_pair_emptiness(a, a, 5, 10, seed=0)


@pytest.mark.parametrize("mode", ["tree", "process"])
def test_single_set_never_empty(mode):
    rec = estimate_nfold_emptiness(0.3, 1, 10, 500, seed=2, mode=mode)
    assert rec.value == 0.0


def test_nfold_process_mode():
    rec = estimate_nfold_emptiness(0.15, 3, 60, 10**5, seed=42, mode="process")
    assert abs(R_NFOLD_015_3[60] - 0.665452) < 1e-3
    assert rec.exact == pytest.approx(1 - R_NFOLD_015_3[60], abs=1e-12)
    assert abs(rec.value - rec.exact) < 0.01


def test_nfold_threshold_guard():
    with pytest.raises(DomainError):
        estimate_nfold_emptiness(0.21, 3, 10, 10, seed=0)
    rec = estimate_nfold_emptiness(0.21, 3, 10, 200, seed=0, mode="process", check_threshold=False)
    assert rec.limit == 1.0


def test_auto_mode_choice():
    assert "tree" in estimate_nfold_emptiness(0.1, 2, 6, 50, seed=0).name
    assert "process" in estimate_nfold_emptiness(0.1, 2, 20, 50, seed=0).name


@pytest.mark.parametrize("p,n", [(0.1, 2), (0.25, 2), (0.15, 3), (0.12, 4), (0.05, 6)])
def test_tree_and_process_modes_agree(p, n):
    tree = estimate_nfold_emptiness(p, n, 8, 3000, seed=100, mode="tree")
    proc = estimate_nfold_emptiness(p, n, 8, 3000, seed=100, mode="process")
    assert tree.exact == proc.exact
    assert modes_agree(tree, proc)


def test_reproducible_and_thread_independent():
    a = estimate_survival(LAW_08, 20, 9000, seed=5)
    b = estimate_survival(LAW_08, 20, 9000, seed=5, threads=4)
    c = estimate_survival(LAW_08, 20, 9000, seed=6)
    assert a == b
    assert a.successes != c.successes or a.master_seed != c.master_seed
    t1 = estimate_nfold_emptiness(0.15, 3, 8, 2500, seed=9, mode="tree")
    t2 = estimate_nfold_emptiness(0.15, 3, 8, 2500, seed=9, mode="tree", threads=3)
    assert t1 == t2


def test_pruned_frequencies_full_law():
    rep = pruned_frequency_experiment(FULL, 6, 3, 50, seed=1)
    assert [r.value for r in rep.records] == [1.0, 0.0, 0.0]
    assert rep.passed


def test_pruned_frequencies_recover_bernoulli_pair():
    law = gw_offspring(survival_from_bernoulli(BernoulliPair(0.1, 0.3)))
    rep = pruned_frequency_experiment(law, 30, 10, 20000, seed=4)
    got = [r.value for r in rep.records]
    assert got == pytest.approx([0.6, 0.1, 0.3], abs=0.01)
    assert rep.details["survivors"] + rep.details["extinct"] == 20000


def test_pruned_frequencies_intersection_law():
    rep = pruned_frequency_experiment(nfold_symbol_law(0.2, 2), 30, 10, 30000, seed=5)
    assert [r.value for r in rep.records] == pytest.approx([0.28, 0.36, 0.36], abs=0.01)
    assert rep.passed


def test_pruned_frequency_horizon_check():
    with pytest.raises(DomainError):
        pruned_frequency_experiment(nfold_symbol_law(0.28, 2), 12, 10, 100, seed=0)


def test_pruned_report_reproducible():
    a = pruned_frequency_experiment(LAW_08, 25, 6, 3000, seed=2)
    b = pruned_frequency_experiment(LAW_08, 25, 6, 3000, seed=2, threads=2)
    assert a.to_dict(include_runtime=False) == b.to_dict(include_runtime=False)


def test_converse_small_run():
    rep = converse_distribution_test(0.2, 2, 30, 8, 8000, seed=3)
    assert rep.details["survivors"] > 1000
    assert rep.passed


def test_converse_power_small_run():
    rep = converse_distribution_test(0.2, 2, 50, 8, 8000, seed=3, intersect_p=0.23)
    assert not rep.passed


def test_converse_too_few_survivors():
    with pytest.raises(InsufficientSurvivors):
        converse_distribution_test(0.2, 2, 30, 8, 500, seed=3)


def test_converse_domain():
    with pytest.raises(DomainError):
        converse_distribution_test(threshold(2), 2, 30, 8, 500, seed=3)
    with pytest.raises(DomainError):
        # horizon too short for the declared bias bound
        converse_distribution_test(0.18, 3, 30, 8, 500, seed=3)


def test_json_matches_schema(schema):
    rec = estimate_survival(LAW_08, 10, 200, seed=1)
    jsonschema.validate(json.loads(json.dumps(rec.to_dict())), schema)
    rep = pruned_frequency_experiment(LAW_08, 25, 5, 300, seed=1)
    jsonschema.validate(json.loads(rep.to_json()), schema)


def test_csv_layout():
    recs = [estimate_survival(LAW_08, 10, 200, seed=s) for s in (1, 2)]
    rows = list(csv.DictReader(io.StringIO(records_to_csv(recs))))
    assert len(rows) == 2
    assert tuple(rows[0]) == CSV_COLUMNS
    assert float(rows[1]["exact"]) == pytest.approx(survival_recurrence(LAW_08, 10).last)
