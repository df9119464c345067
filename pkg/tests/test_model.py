import json
import math
import random

import pytest

from aoisched import (
    Charge,
    ExponentialCost,
    Fly,
    LinearCost,
    PiecewiseLinearCost,
    QuadraticCost,
    RechargeSpec,
    Schedule,
    StepCost,
    cost_fn_from_dict,
    instance_from_dict,
    instance_to_dict,
    quantize,
    validate,
)
from conftest import make_instance


# ---------------------------------------------------------------------------
# quantize
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("minutes,slots", [(4.2, 5), (8.0, 8), (0.5, 1)])
def test_quantize_rounds_up(minutes, slots):
    out = quantize([[0.0, minutes], [minutes, 0.0]], 1.0)
    assert out[0][1] == slots
    assert out[0][0] == 0


def test_quantize_rejects_bad_input():
    with pytest.raises(ValueError):
        quantize([[0.0]], 0.0)
    with pytest.raises(ValueError):
        quantize([[-1.0]], 1.0)


def test_quantize_monotone_and_halving():
    rng = random.Random(5)
    for _ in range(300):
        a = rng.uniform(0.0, 30.0)
        b = a + rng.uniform(0.0, 10.0)
        tau = rng.uniform(0.2, 3.0)
        qa = quantize([[a]], tau)[0][0]
        qb = quantize([[b]], tau)[0][0]
        assert qa <= qb
        half = quantize([[a]], tau / 2)[0][0]
        assert half <= 2 * qa


# ---------------------------------------------------------------------------
# cost functions
# ---------------------------------------------------------------------------


ALL_FNS = [
    LinearCost(1.5),
    QuadraticCost(0.05),
    ExponentialCost(0.5, 0.04),
    StepCost(10.0, 1.0, 30.0),
    PiecewiseLinearCost(((0.0, 0.0), (5.0, 2.0), (20.0, 40.0))),
]


@pytest.mark.parametrize("fn", ALL_FNS, ids=lambda f: f.kind)
def test_cost_fn_monotone_nonnegative_on_grid(fn):
    xs = [0.25 * k for k in range(0, 400)]
    values = [fn(x) for x in xs]
    assert all(v >= 0 for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("fn", ALL_FNS, ids=lambda f: f.kind)
def test_cost_fn_json_round_trip(fn):
    clone = cost_fn_from_dict(json.loads(json.dumps(fn.to_dict())))
    for x in (0.0, 1.0, 7.5, 42.0):
        assert clone(x) == fn(x)


def test_cost_fn_constructors_reject_non_monotone():
    with pytest.raises(ValueError):
        LinearCost(-1.0)
    with pytest.raises(ValueError):
        QuadraticCost(-0.1)
    with pytest.raises(ValueError):
        ExponentialCost(1.0, -0.5)
    with pytest.raises(ValueError):
        StepCost(5.0, 3.0, 1.0)
    with pytest.raises(ValueError):
        PiecewiseLinearCost(((0.0, 5.0), (1.0, 2.0)))
    with pytest.raises(ValueError):
        PiecewiseLinearCost(((1.0, 0.0), (1.0, 2.0)))


def test_integrals_match_quadrature():
    from scipy.integrate import quad

    for fn in ALL_FNS:
        for lo, hi in [(0.0, 4.0), (2.5, 17.0), (9.0, 9.0)]:
            expected = quad(fn, lo, hi, points=[10.0, 5.0, 20.0] if hi > lo else None,
                            limit=200)[0] if hi > lo else 0.0
            assert fn.integrate(lo, hi) == pytest.approx(expected, rel=1e-7, abs=1e-10)


def test_exponential_integral_value():
    fn = ExponentialCost(2.0, 0.5)
    # closed form: alpha * ((e^(b*hi) - e^(b*lo)) / b - (hi - lo))
    expected = 2.0 * ((math.exp(0.5 * 3) - math.exp(0.5 * 1)) / 0.5 - 2.0)
    assert fn.integrate(1.0, 3.0) == pytest.approx(expected, rel=1e-8)


def test_piecewise_linear_extends_last_slope():
    fn = PiecewiseLinearCost(((0.0, 0.0), (10.0, 5.0)))
    assert fn(20.0) == pytest.approx(10.0)
    single = PiecewiseLinearCost(((0.0, 3.0),))
    assert single(100.0) == 3.0


# ---------------------------------------------------------------------------
# recharge
# ---------------------------------------------------------------------------


def test_recharge_caps_and_rejects_short_stay():
    spec = RechargeSpec(rate_per_slot=0.5, min_slots=2)
    assert spec.after(24.0, 10, 25.0) == 25.0
    assert spec.after(10.0, 2, 25.0) == 11.0
    with pytest.raises(ValueError):
        spec.after(10.0, 1, 25.0)
    with pytest.raises(ValueError):
        RechargeSpec(rate_per_slot=0.5, min_slots=0)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_well_formed_ok():
    inst = make_instance(num_sns=3, horizon=10)
    assert validate(inst) == []


def test_validate_flags_infeasible_round_trip():
    inst = make_instance(num_sns=1, horizon=4, battery=1.0)  # trip needs 2.0
    problems = validate(inst)
    assert any("no feasible trip" in p for p in problems)


def test_validate_allows_asymmetric_travel():
    inst = make_instance(
        num_sns=2, horizon=12,
        travel=[[0, 1, 2], [2, 0, 3], [1, 4, 0]],
        energy=[[0, 1, 2], [2, 0, 3], [1, 4, 0]],
    )
    assert validate(inst) == []


def test_validate_flags_bad_matrices():
    inst = make_instance(num_sns=1, horizon=4, travel=[[0, 0], [1, 0]])
    assert any("must be >= 1" in p for p in validate(inst))
    inst = make_instance(num_sns=1, horizon=4, travel=[[2, 1], [1, 0]])
    assert any("must be 0" in p for p in validate(inst))


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def test_schedule_check_catches_structural_problems(unit_instance):
    ok = Schedule((Fly(0, 1, 0), Fly(1, 0, 1)))
    assert ok.check(unit_instance) == []
    assert ok.end_slot(unit_instance) == 2

    gap = Schedule((Fly(0, 1, 0), Fly(1, 0, 2)))
    assert gap.check(unit_instance)

    stranded = Schedule((Fly(0, 1, 0),))
    assert any("must end at the BS" in p for p in stranded.check(unit_instance))

    away = Schedule((Fly(0, 1, 0), Charge(1, 1), Fly(1, 0, 2)))
    assert any("away from the BS" in p for p in away.check(unit_instance))

    long = Schedule((Charge(9, 0),))
    assert any("beyond the horizon" in p for p in long.check(unit_instance))


def test_schedule_json_round_trip():
    sched = Schedule((Fly(0, 2, 0), Fly(2, 0, 3), Charge(2, 6)))
    clone = Schedule.from_dict(json.loads(json.dumps(sched.to_dict())))
    assert clone == sched


def test_instance_json_round_trip():
    inst = make_instance(num_sns=2, horizon=9,
                         cost_fns=(LinearCost(2.0), StepCost(4.0, 0.0, 10.0)))
    clone = instance_from_dict(json.loads(json.dumps(instance_to_dict(inst))))
    assert clone.travel_slots == inst.travel_slots
    assert clone.travel_energy == inst.travel_energy
    assert clone.cost_fns == inst.cost_fns
    assert clone.recharge == inst.recharge
    assert validate(clone) == []
