import numpy as np
import pytest

from cclab.bits import EQ, HD, BitString, GapHD
from cclab.engine import (
    ExplicitString,
    Leaf,
    OracleError,
    OracleNode,
    OracleTree,
    Padded,
    RandomTape,
    RowBits,
    RowCodewords,
    RowIndicator,
    Session,
    SymmetricProtocol,
    conjunction_tree,
    estimate_error,
    evaluate_batch,
    oracle_answer,
    pad_to_target,
    run_oracle_protocol,
    run_protocol,
    trace_oracle_protocol,
    wilson_interval,
)


def test_tape_is_deterministic():
    a, b = RandomTape(7), RandomTape(7)
    assert [a.getrandbits(50) for _ in range(5)] == [b.getrandbits(50) for _ in range(5)]
    assert RandomTape(8).getrandbits(64) != RandomTape(7).getrandbits(64)


def test_randbelow_range():
    t = RandomTape(1)
    vals = [t.randbelow(5) for _ in range(500)]
    assert set(vals) == set(range(5))


def test_random_functions_are_consistent_and_scoped():
    t = RandomTape(3)
    f = t.random_function("a", 1000)
    assert f(1, 2) == f(1, 2)
    assert 0 <= f(9) < 1000
    g = RandomTape(3).random_function("a", 1000)
    assert [f(i) for i in range(20)] == [g(i) for i in range(20)]
    h = RandomTape(3).random_function("b", 1000)
    assert [f(i) for i in range(20)] != [h(i) for i in range(20)]


def test_session_costs_and_transcript():
    s = Session(1)
    s.send("A", 3)
    s.exchange(2)
    s.query(HD(2), 1)
    s.output(0)
    assert s.cost.bits_sent == 7
    assert s.cost.total_queries == 1
    assert s.transcript().splitlines() == ["SEND A 3", "SEND A 2", "SEND B 2", "QUERY HD2 1", "OUTPUT 0"]
    with pytest.raises(ValueError):
        s.send("A", -1)


def test_run_protocol_and_estimate_error():
    def runner(session, x, y, scope):
        session.exchange(1)
        return int(x == y)

    p = SymmetricProtocol("eq-exact", runner)
    out, cost = run_protocol(p, 1, 1, seed=0)
    assert out == 1 and cost.bits_sent == 2
    rate, (lo, hi) = estimate_error(p, [(1, 1), (1, 2)], lambda x, y: int(x == y), 10, seed=0)
    assert rate == 0 and lo == 0 and hi > 0
    with pytest.raises(ValueError):
        estimate_error(p, [], lambda x, y: 0, 1, 0)


def test_wilson_interval_brackets_the_rate():
    lo, hi = wilson_interval(10, 100)
    assert lo < 0.1 < hi


def test_virtual_string_distances_match_materialization():
    X = np.array([3, 0, 7], dtype=np.uint64)
    Y = np.array([1, 0, 6], dtype=np.uint64)
    for a, b in [(RowBits(X, 3), RowBits(Y, 3)), (RowIndicator(X, 8), RowIndicator(Y, 8))]:
        assert a.distance(b) == (a.materialize().value ^ b.materialize().value).bit_count()
    W = np.array([[5], [9]], dtype=np.uint64)
    V = np.array([[4], [9]], dtype=np.uint64)
    a, b = RowCodewords(W, 4), RowCodewords(V, 4)
    assert a.distance(b) == (a.materialize().value ^ b.materialize().value).bit_count() == 1


def test_padding_hits_target():
    a, b = ExplicitString(BitString(4, 0b0011)), ExplicitString(BitString(4, 0b0101))
    pa, pb = pad_to_target(a, b, 2, 5)
    assert pa.distance(pb) == 5
    pa, pb = pad_to_target(a, b, 3, 5)
    assert pa.distance(pb) != 5
    assert isinstance(pa, Padded) and pa.length == a.length + 2
    with pytest.raises(ValueError):
        pad_to_target(a, b, 6, 5)


def test_oracle_answers():
    a, b = ExplicitString(BitString(8, 0)), ExplicitString(BitString(8, 0b11))
    assert oracle_answer(EQ(), a, a) == 1
    assert oracle_answer(HD(2), a, b) == 1
    assert oracle_answer(GapHD("1/4"), a, b) == 1
    c = ExplicitString(BitString(8, 0b1111))
    with pytest.raises(OracleError):
        oracle_answer(GapHD("1/4"), a, c, strict=True)
    with pytest.raises(OracleError):
        oracle_answer(EQ(), a, ExplicitString(BitString(3, 0)))


def test_conjunction_tree_batch_matches_scalar():
    def parity(X):
        return RowBits(np.bitwise_count(np.asarray(X, dtype=np.uint64)) & np.uint64(1), 1)

    tree = conjunction_tree([
        ("eq", EQ(), lambda X: RowBits(X, 4), lambda Y: RowBits(Y, 4)),
        ("parity", EQ(), parity, parity),
    ], "demo")
    X = np.array([[1, 2], [3, 3], [0, 0]], dtype=np.uint64)
    Y = np.array([[1, 2], [3, 0], [0, 0]], dtype=np.uint64)
    labels, counts = evaluate_batch(tree, X, Y)
    assert labels.tolist() == [1, 0, 1]
    assert counts.tolist() == [2, 2, 2]
    for i in range(3):
        assert run_oracle_protocol(tree, X[i], Y[i]) == (labels[i], 2)
    _, path = trace_oracle_protocol(tree, X[1], Y[1])
    assert [step for step, _, _ in path] == ["eq", "parity"]


def test_declared_cost_is_enforced():
    node = OracleNode(EQ(), lambda x: ExplicitString(x), lambda y: ExplicitString(y), (Leaf(0), Leaf(1)))
    deep = OracleNode(EQ(), lambda x: ExplicitString(x), lambda y: ExplicitString(y), (node, node))
    tree = OracleTree(deep, 1)
    x = BitString(2, 1)
    with pytest.raises(AssertionError):
        run_oracle_protocol(tree, x, x)
