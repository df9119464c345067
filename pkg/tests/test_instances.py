import math

import pytest

from aoisched import (
    GeneratorError,
    StepCost,
    has_hamiltonian_path,
    parse_edge_list,
    random_instance,
    reduction_instance,
    validate,
)
from aoisched.checks import four_node_graph_classes


def test_random_instance_deterministic_per_seed():
    a = random_instance(9, 4, 30)
    b = random_instance(9, 4, 30)
    assert a.travel_slots == b.travel_slots
    assert a.travel_energy == b.travel_energy
    assert a.coords == b.coords
    assert [fn.to_dict() for fn in a.cost_fns] == [fn.to_dict() for fn in b.cost_fns]
    assert random_instance(10, 4, 30).coords != a.coords


def test_random_instance_geometry_bounds():
    for seed in range(25):
        inst = random_instance(seed, 5, 40)
        assert validate(inst) == []
        assert inst.coords[0] == (0.0, 0.0)
        for i in range(6):
            for j in range(6):
                if i != j:
                    # disk diameter at 1200 m/min is 8.34 min -> at most 9 slots
                    assert 1 <= inst.travel_slots[i][j] <= 9
                    assert inst.travel_energy[i][j] >= 0.5
        assert inst.battery_capacity == 25.0
        assert inst.recharge.rate_per_slot == pytest.approx(0.5)
        for fn in inst.cost_fns:
            assert fn.kind in ("linear", "quadratic", "exponential")


def test_random_instance_respects_min_distance():
    inst = random_instance(3, 8, 50)
    pts = inst.coords
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            assert math.dist(p, q) >= 600.0 - 1e-9


def test_random_instance_rejection_cap():
    with pytest.raises(GeneratorError):
        random_instance(0, 200, 50, radius_m=100.0, max_place_tries=500)


def test_reduction_instance_layout():
    inst = reduction_instance(4, [(1, 2), (3, 4)])
    assert inst.num_sns == 4
    assert inst.horizon_slots == 4 * 4 + 14
    t = inst.travel_slots
    assert t[1][2] == t[2][1] == 4
    assert t[3][4] == 4
    assert t[1][3] == t[2][4] == 16
    assert all(t[0][k] == t[k][0] == 8 for k in range(1, 5))
    # battery sums every pairwise energy, so no simple tour can run dry
    expected = sum(inst.travel_energy[i][j] for i in range(5) for j in range(i + 1, 5))
    assert inst.battery_capacity == expected
    for fn in inst.cost_fns:
        assert isinstance(fn, StepCost)
        assert fn.threshold == 4 * 4 + 13
        assert fn.low == 0.0 and fn.high == 100.0
    assert validate(inst) == []


def test_reduction_instance_rejects_bad_input():
    with pytest.raises(ValueError):
        reduction_instance(1, [])
    with pytest.raises(ValueError):
        reduction_instance(3, [(1, 4)])
    with pytest.raises(ValueError):
        reduction_instance(3, [(2, 2)])


def test_parse_edge_list(tmp_path):
    path = tmp_path / "graph.txt"
    path.write_text("1 2\n# comment\n\n2 3  # trailing\n")
    assert parse_edge_list(path) == [(1, 2), (2, 3)]
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    with pytest.raises(ValueError):
        parse_edge_list(bad)


@pytest.mark.parametrize(
    "n,edges,expected",
    [
        (4, [(1, 2), (2, 3), (3, 4)], True),     # path
        (4, [(1, 2), (1, 3), (1, 4)], False),    # star
        (4, [(1, 2), (2, 3), (1, 3)], False),    # triangle + isolated node
        (4, [(1, 2), (2, 3), (3, 4), (4, 1)], True),  # cycle
        (3, [], False),
        (1, [], True),
        (2, [(1, 2)], True),
    ],
)
def test_hamiltonian_path_enumerator(n, edges, expected):
    assert has_hamiltonian_path(n, edges) == expected


def test_eleven_graph_classes_on_four_nodes():
    classes = four_node_graph_classes()
    assert len(classes) == 11
    with_path = sum(1 for edges in classes if has_hamiltonian_path(4, edges))
    assert with_path == 5  # path, cycle, paw, diamond, complete
