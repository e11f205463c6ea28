import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cclab.bits import BOTTOM, HD, HDKK, BitString, truth
from cclab.composition import make_g
from cclab.engine import DomainError, evaluate_batch, run_oracle_protocol, run_protocol, run_session
from cclab.reductions import (
    INCONSISTENT,
    CodeFdBlocks,
    InconsistentSums,
    TandemDecoder,
    TandemProtocol,
    composed_truth,
    constant_one_way,
    embed_into_gaphd,
    embedding_params,
    equality_one_way,
    f_d_distance,
    f_d_encode,
    gap_hd_protocol,
    gap_sample_size,
    neighbourhood,
    newton_collisions,
    newton_recover,
    pad_hdk_to_hdkk,
    partition_tandem,
    protocol4_tree,
    tandem_to_code,
)


def test_gap_hd_protocol():
    p = gap_hd_protocol("1/4", "1/8")
    assert p.params["sample_size"] == gap_sample_size("1/4", "1/8") == 23  # ceil(8 ln 16)
    close = (BitString(64, 0), BitString(64, (1 << 8) - 1))
    far = (BitString(64, 0), BitString(64, (1 << 56) - 1))
    assert sum(run_protocol(p, *close, s)[0] for s in range(100)) >= 88
    assert sum(run_protocol(p, *far, s)[0] for s in range(100)) <= 12
    _, session = run_session(p, BitString(8, 0), BitString(8, 0b1111), 0)
    assert session.notes["gap-input"] == 1


def test_one_way_equality_is_one_sided():
    p = equality_one_way(2)
    x = BitString(6, 13)
    assert all(p.run(r, x, x) == 1 for r in range(50))
    assert p.w == 4
    assert bin(p.accept_set(3, x)).count("1") == 1
    assert constant_one_way(1).run(0, x, x) == 1


def test_embedding_params():
    prm = embedding_params(2, 4)
    assert prm == {"w": 4, "t": 432, "L": 3456, "gamma": Fraction(1, 2) - Fraction(1, 48)}


def test_small_embedding_separates_all_pairs():
    emb = embed_into_gaphd(equality_one_way(2), 2, seed=3)
    tree = emb.oracle_tree()
    for xv, yv in itertools.product(range(4), repeat=2):
        x, y = BitString(2, xv), BitString(2, yv)
        assert run_oracle_protocol(tree, x, y, strict=True) == (int(xv == yv), 1)
    assert emb.report["accept_max"] <= emb.gamma * emb.L


def test_embedding_fails_for_error_one_half():
    with pytest.raises(RuntimeError):
        embed_into_gaphd(equality_one_way(1), 2, max_attempts=3)


def test_embedding_guards():
    with pytest.raises(DomainError):
        embed_into_gaphd(equality_one_way(1), 9)
    p = equality_one_way(1)
    p.truth = None
    with pytest.raises(ValueError):
        embed_into_gaphd(p, 2)


def test_tandem_protocol_basics():
    t = TandemProtocol(3, ((0, 0, 1),), (5, 6))
    assert t(0, 1) == 6 and t(0, 2) == 5
    assert t.matrix() == [[6, 6, 5], [6, 6, 5], [5, 5, 6]]
    with pytest.raises(ValueError):
        TandemProtocol(3, ((0, 1),), (0, 1))
    with pytest.raises(ValueError):
        TandemProtocol(3, ((0, 1, 2),), (0,))


@pytest.mark.parametrize("seed", range(5))
def test_tandem_compiles_to_code(seed):
    t = partition_tandem(6, 2, seed=seed)
    code, D = tandem_to_code(t)
    words = code.tandem_words
    assert {w.bit_count() for w in words} == {D.k} == {3}
    for x, y in itertools.product(range(6), repeat=2):
        assert D((words[x] ^ words[y]).bit_count()) == t(x, y)


def test_tandem_oracle_tree_matches_matrix():
    t = partition_tandem(5, 3, seed=1)
    tree = t.oracle_tree()
    for x, y in itertools.product(range(5), repeat=2):
        assert run_oracle_protocol(tree, np.array(x), np.array(y))[0] == t(x, y)


def test_decoder_rejects_bad_distances():
    D = TandemDecoder(2, (0, 1, 2, 3))
    assert D.answers(0) == (1, 1) and D.answers(6) == (0, 0)
    with pytest.raises(ValueError):
        D(3)
    with pytest.raises(ValueError):
        D(8)


@given(st.sets(st.integers(0, 5)), st.sets(st.integers(0, 5)), st.integers(1, 3))
def test_f_d_distance_formula(a, b, d):
    ea, eb = f_d_encode(a, d, 6), f_d_encode(b, d, 6)
    assert len(ea ^ eb) == f_d_distance(a, b, d)


def test_f_d_guards():
    with pytest.raises(DomainError):
        f_d_encode({0}, 5, 4)
    with pytest.raises(ValueError):
        f_d_encode({7}, 1, 4)


def test_code_fd_blocks_distance_matches_materialization():
    a = CodeFdBlocks([0b0111, 0b0011], 2, 4)
    b = CodeFdBlocks([0b1110, 0b0011], 2, 4)
    assert int(a.distance(b)) == (a.materialize().value ^ b.materialize().value).bit_count() == 10


def test_newton_recovery():
    r, k = 3, 4
    for combo in itertools.combinations_with_replacement(range(0, 9, 2), 3):
        sums = [sum((k - a // 2) ** d for a in combo) for d in range(1, r + 1)]
        assert newton_recover(sums, r, k, 3) == combo
    assert newton_collisions(3, 4, 3) == []
    with pytest.raises(InconsistentSums):
        newton_recover([99, 0, 0], r, k, 1)
    with pytest.raises(ValueError):
        newton_recover([1, 1, 1], r, k, 4)


def test_newton_needs_enough_power_sums():
    assert newton_collisions(3, 4, 1)


def test_protocol4_small_exhaustive():
    N, n, r = 4, 3, 2
    bases = [partition_tandem(N, 2, seed=s) for s in range(n)]
    g = make_g("multiset")
    p4 = protocol4_tree(bases, r, g)
    assert p4.K == 2 * r * p4.k ** r
    X, Y = zip(*itertools.product(itertools.product(range(N), repeat=n), repeat=2))
    labels, counts = evaluate_batch(p4.tree, np.array(X), np.array(Y))
    for x, y, out in zip(X, Y, labels):
        assert out == composed_truth(bases, r, g, x, y)
    assert counts.max() <= p4.tree.cost


def test_protocol4_validation():
    a = partition_tandem(4, 2)
    b = partition_tandem(5, 2)
    with pytest.raises(ValueError):
        protocol4_tree([a, b], 1, make_g("multiset"))
    with pytest.raises(ValueError):
        protocol4_tree([], 1, make_g("multiset"))
    p4 = protocol4_tree([a, a], 1, make_g("multiset"))
    with pytest.raises(DomainError):
        run_oracle_protocol(p4.tree, np.array([0, 9]), np.array([0, 0]))
    assert repr(INCONSISTENT) == "INCONSISTENT"


def test_composed_truth_and_neighbourhood():
    bases = [partition_tandem(3, 1, seed=s) for s in range(3)]
    g = make_g("multiset")
    assert composed_truth(bases, 1, g, (0, 0, 0), (1, 1, 0)) is BOTTOM
    nb = neighbourhood((0, 0, 0), 3, 1)
    assert len(nb) == 1 + 3 * 2 and (0, 0, 0) in nb


@pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (5, 3)])
def test_padding_reduction(n, k):
    for xv, yv in itertools.product(range(1 << n), repeat=2):
        x, y = BitString(n, xv), BitString(n, yv)
        assert truth(HD(k), x, y) == truth(HDKK(k), pad_hdk_to_hdkk(x, n), pad_hdk_to_hdkk(y, n))


def test_padding_guards():
    with pytest.raises(DomainError):
        pad_hdk_to_hdkk(BitString(3, 0), 4)
    with pytest.raises(DomainError):
        pad_hdk_to_hdkk(BitString(1, 0), 1)
