import math
import subprocess

import pytest

import csglab


@pytest.fixture
def clean_instance():
    return csglab.generate_instance(n=8, k=2, template_size=3, seed=7)


def test_generate_shape(clean_instance):
    inst = clean_instance
    assert inst["n"] == 8
    assert len(inst["templates"]) == 2
    assert all(len(t) == 3 for t in inst["templates"])
    assert all(2.0 <= w <= 3.0 for w in inst["weights"])
    assert inst["sigma"] == 0.0
    assert inst["margin"]["satisfied_min"]


def test_solvers_agree_on_clean_instance(clean_instance):
    expected = sum(clean_instance["weights"])
    values = {
        solver: csglab.solve_instance(clean_instance, solver)["value"]
        for solver in ("dp", "bnb", "greedy", "l1")
    }
    for solver, value in values.items():
        assert value == pytest.approx(expected, abs=1e-9), solver


def test_solution_blocks_cover_each_agent_once(clean_instance):
    result = csglab.solve_instance(clean_instance, "dp")
    seen = sorted(a for block in result["structure"] for a in block)
    assert seen == list(range(8))
    assert csglab.structure_value(clean_instance, result["structure"]) == pytest.approx(
        result["value"], abs=1e-9
    )


def test_trace_is_monotone_and_counts_queries(clean_instance):
    result = csglab.solve_instance(clean_instance, "dp")
    records = result["trace"]["records"]
    assert records, "dp must emit trace records"
    incumbents = [r["incumbent"] for r in records]
    assert incumbents == sorted(incumbents)
    assert result["oracle_queries"] == 2**8 - 1


def test_coalition_value_matches_weights(clean_instance):
    t0 = clean_instance["templates"][0]
    assert csglab.coalition_value(clean_instance, t0) == pytest.approx(
        clean_instance["weights"][0], abs=1e-12
    )
    assert csglab.coalition_value(clean_instance, []) == 0.0


def test_race_separates_on_halves_instance():
    inst = csglab.generate_instance(
        n=12, placement="disjoint-halves", sigma=0.1, seed=3, require_margin=True
    )
    report = csglab.race(inst)
    assert report["verdict"] == "separated"
    assert {s["solver"] for s in report["solvers"]} == {"dp", "bnb", "greedy"}
    greedy = next(s for s in report["solvers"] if s["solver"] == "greedy")
    assert greedy["q2_crossing"] is not None
    assert report["thresholds"]["q2"] <= report["opt"] + 1e-12


def test_tail_check_bounds_hold():
    report = csglab.tail_check(sigma=1.0, n=8, replicates=20000, seed=5)
    assert report["all_satisfied"]
    assert len(report["entries"]) == 7
    ceiling = 2.0 * math.sqrt(math.log(16.0))
    assert report["entries"][-1]["t"] == pytest.approx(ceiling)


def test_guard_violation_is_a_python_exception():
    wide = csglab.generate_instance(n=17, k=2, template_size=3, seed=1)
    with pytest.raises(csglab.GuardViolation):
        csglab.solve_instance(wide, "dp")


def test_invalid_arguments_raise_value_error():
    inst = csglab.generate_instance(n=6, seed=2)
    with pytest.raises(ValueError):
        csglab.solve_instance(inst, "nonesuch")
    with pytest.raises(ValueError):
        csglab.structure_value(inst, [[0, 1], [1, 2, 3, 4, 5]])


def test_bundled_cli_runs():
    out = subprocess.run(
        [csglab.cli_path(), "--help"], capture_output=True, text=True, check=True
    )
    assert "gen" in out.stdout and "race" in out.stdout
