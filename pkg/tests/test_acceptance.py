"""End-to-end acceptance gate.

Each test runs one criterion at full size and prints its pass/fail line
(visible with ``pytest -s``). The two ensemble-trend criteria share one
20-seed benchmark run, built once per session.
"""

import pytest

from aoisched import checks


def _finish(result):
    print(result.line())
    assert result.passed, result.detail
    return result


@pytest.fixture(scope="module")
def benchmark_rows():
    """One 20-seed ensemble at S=20, T=100 min, unit slots, battery 25,
    solved by greedy and by the labeling solver at capacities 1 and 10."""
    return checks.benchmark_ensemble(seeds=20, num_sns=20, horizon_slots=100,
                                     capacities=(1, 10))


def test_criterion_1_oracle_equivalence():
    """Unbounded-capacity labeling equals the exhaustive optimum exactly on
    50 random instances (S <= 3, N <= 12), within a minute."""
    _finish(checks.check_oracle_equivalence(count=50))


def test_criterion_2_dominance_soundness_at_bs():
    """Every label discarded by domination at a BS cell is confirmed safe by
    exhaustive suffix enumeration on 20 instances (S <= 3, N <= 10)."""
    _finish(checks.check_bs_dominance_soundness(count=20))


def test_criterion_3_symmetric_policy_reproduction():
    """Oldest-first equals the exhaustive minimum over all visit sequences on
    100 random symmetric instances (S <= 4, M <= 6, random monotone costs)."""
    _finish(checks.check_symmetric_policy(count=100))


def test_criterion_4_trip_gap_sign():
    """Serving the oldest SN never costs more, over 1000 random draws, and the
    window-cost difference matches its reduced two-integral form."""
    _finish(checks.check_trip_gap_sign(count=1000))


def test_criterion_5_reduction_equivalence():
    """Across all 11 simple graphs on 4 nodes, the gadget admits a zero-cost
    schedule exactly when a Hamiltonian path exists."""
    _finish(checks.check_reduction_equivalence())


def test_criterion_6_labeling_beats_greedy(benchmark_rows):
    """On the shared ensemble the unit-capacity labeling solver improves on
    greedy by at least 5% in mean normalized cost."""
    _finish(checks.check_solver_comparison(benchmark_rows))


def test_criterion_7_capacity_trend(benchmark_rows):
    """Capacity 10 never averages worse than capacity 1 and costs strictly
    more time."""
    _finish(checks.check_capacity_trend(benchmark_rows))


def test_criterion_8_replay_consistency(benchmark_rows):
    """Every solver's claimed cost equals its schedule's replayed cost to
    1e-9, across solvers and the benchmark ensemble."""
    devs = [max(r["replay_dev"] for r in benchmark_rows)]
    _finish(checks.check_replay_consistency(devs))


def test_criterion_9_label_store_invariants():
    """Instrumented runs never exceed the cell capacity and never retain a
    dominated pair."""
    _finish(checks.check_capacity_invariant())
