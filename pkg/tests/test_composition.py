import itertools
from fractions import Fraction

import pytest

from cclab.bits import BOTTOM
from cclab.composition import (
    CompositionSpec,
    MatrixTree,
    compose_distance_r,
    composition_params,
    dist1_params,
    dist1_protocol,
    make_g,
    matrix_from_function,
    xor_matrix,
)
from cclab.engine import DomainError, run_protocol

DELTA = Fraction(1, 8)


def test_matrix_tree_walks_to_the_entry():
    M = matrix_from_function(5, lambda a, b: (a + b) % 3)
    tree = MatrixTree(M)
    for a, b in itertools.product(range(5), repeat=2):
        state = tree.start()
        for t in range(tree.depth):
            z = a if tree.owner(t) == "A" else b
            state = tree.step(state, t, tree.message(t, z))
        assert tree.leaf(state) == M[a][b]


def test_matrix_tree_validation():
    with pytest.raises(ValueError):
        MatrixTree(((0, 1), (0, 0)))
    with pytest.raises(ValueError):
        MatrixTree(((0, 1),))


def test_g_registry():
    assert make_g("hd-count", target=2)([1, 1]) == 1
    assert make_g("exists-one")([0, 0]) == 0
    assert make_g("max-sum-threshold", threshold=1)([1, 1]) == 0
    assert make_g("multiset")([3, 1]) == (1, 3)
    with pytest.raises(KeyError):
        make_g("nope")
    with pytest.raises(ValueError):
        make_g("hd-count")


def test_spec_truth_and_bottom():
    spec = CompositionSpec([xor_matrix()], 1, DELTA, make_g("exists-one"), n=4)
    assert spec.truth((0, 0, 0, 0), (0, 1, 0, 0)) == 1
    assert spec.truth((0, 0, 0, 0), (0, 0, 0, 0)) == 0
    assert spec.truth((0, 0, 0, 0), (1, 1, 0, 0)) is BOTTOM
    with pytest.raises(ValueError):
        CompositionSpec([xor_matrix()], 1, 2, make_g("exists-one"))
    with pytest.raises(ValueError):
        CompositionSpec([xor_matrix()] * 2, 1, DELTA, make_g("exists-one"), n=3)


def test_params_depend_only_on_r_delta_depth_labels():
    assert composition_params(2, DELTA, 2, 2) == composition_params(2, DELTA, 2, 2)
    p = dist1_params(DELTA, 4, 3)
    assert p["bits_sent"] == 2 * (p["enc1_size"] + 4 * p["enc2_size"] + p["enc3_size"])


def test_dist1_recovers_the_differing_value():
    M = matrix_from_function(4, lambda a, b: int(a == b) + 2 * int((a ^ b) == 3))
    spec = CompositionSpec([M], 1, DELTA, make_g("multiset"), n=5)
    p = dist1_protocol(spec)
    errors = 0
    runs = 0
    for j in range(5):
        for b in range(1, 4):
            x = (0,) * 5
            y = tuple(b if i == j else 0 for i in range(5))
            out, cost = run_protocol(p, x, y, seed=10 * j + b)
            errors += out != M[0][b]
            runs += 1
            assert cost.bits_sent == p.params["bits_sent"]
    assert errors <= 2


def test_compose_distance_r_matches_truth_mostly():
    M = matrix_from_function(4, lambda a, b: int(a % 2 != b % 2))
    spec = CompositionSpec([M], 2, DELTA, make_g("multiset"), n=6)
    p = compose_distance_r(spec)
    x = (0, 1, 2, 3, 0, 1)
    errors = 0
    cases = 0
    for y in itertools.product(range(4), repeat=2):
        yy = (y[0], y[1]) + x[2:]
        for z in ((3,), (0,)):
            yy2 = yy[:5] + z
            out, cost = run_protocol(p, x, yy2, seed=cases)
            errors += out != spec.truth(x, yy2)
            cases += 1
            assert cost.bits_sent == p.params["bits_sent"]
    assert errors / cases <= float(DELTA)


def test_compose_shape_checks():
    spec = CompositionSpec([xor_matrix()], 1, DELTA, make_g("exists-one"), n=3)
    p = compose_distance_r(spec)
    with pytest.raises(DomainError):
        run_protocol(p, (0, 0), (0, 0), 0)
    with pytest.raises(DomainError):
        run_protocol(p, (0, 0, 5), (0, 0, 0), 0)


def test_r_zero_is_equality_of_everything():
    spec = CompositionSpec([xor_matrix()], 0, DELTA, make_g("constant", value=7), n=4)
    p = compose_distance_r(spec)
    assert run_protocol(p, (0, 1, 0, 1), (0, 1, 0, 1), 1)[0] == 7
    assert run_protocol(p, (0, 1, 0, 1), (1, 1, 0, 1), 1)[0] is BOTTOM
