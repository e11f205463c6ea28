import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cclab.gf2m import GF2m, _clmul, _pmulmod, decode_power_sums, field, irreducible_poly, is_irreducible, odd_power_sums
from cclab.sidon import PowerSumSidon, TableSidon, build_sidon, sidon_for, verify_sidon


def test_known_irreducibles():
    assert is_irreducible(0b111)
    assert not is_irreducible(0b101)
    assert irreducible_poly(8) == 0b100011011 or is_irreducible(irreducible_poly(8))
    for m in (1, 5, 13, 33):
        assert is_irreducible(irreducible_poly(m))


@pytest.mark.parametrize("m", [3, 8, 21, 37])
def test_field_axioms(m):
    F = field(m)
    rnd = random.Random(m)
    for _ in range(200):
        a, b, c = (rnd.randrange(1, F.order) for _ in range(3))
        assert F.mul(a, b) == F.mul(b, a)
        assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
        assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
        assert F.mul(a, F.inv(a)) == 1
    assert F.pow(3, F.order - 1) == 1


def test_table_and_reduction_paths_agree():
    small, big = GF2m(13), GF2m(13)
    big._exp = big._log = None
    rnd = random.Random(0)
    for _ in range(500):
        a, b = rnd.randrange(1 << 13), rnd.randrange(1 << 13)
        assert small.mul(a, b) == big.mul(a, b) == _pmulmod(a, b, small.poly)


@given(st.integers(0, 1 << 80), st.integers(0, 1 << 80))
def test_carry_less_product(a, b):
    want = 0
    for i in range(b.bit_length()):
        if b >> i & 1:
            want ^= a << i
    assert _clmul(a, b) == want


@pytest.mark.parametrize("m", [7, 23])
def test_power_sum_decoding_recovers_small_sets(m):
    F = field(m)
    rnd = random.Random(m)
    for size in range(0, 5):
        for _ in range(20):
            elems = rnd.sample(range(1, F.order), size)
            got = decode_power_sums(F, odd_power_sums(F, elems, 4))
            assert sorted(got) == sorted(elems)


def test_decoding_rejects_too_many_elements():
    F = field(11)
    rnd = random.Random(5)
    misses = 0
    for _ in range(50):
        elems = rnd.sample(range(1, F.order), 6)
        got = decode_power_sums(F, odd_power_sums(F, elems, 3))
        misses += got is None or sorted(got) != sorted(elems)
    assert misses == 50


def test_table_sidon_verified_exhaustively():
    enc = build_sidon(4, 2, seed=1)
    assert isinstance(enc, TableSidon) and enc.size == 17
    assert verify_sidon(enc, 2, include_empty=True) is None
    assert enc.decode(enc.xor([3, 9])) == {3, 9}
    assert enc.decode(0) == frozenset()


def test_verify_finds_collisions():
    identity = lambda u: u  # noqa: E731
    assert verify_sidon(identity, 1, ell=3) is None
    assert verify_sidon(identity, 2, ell=3) is not None


@given(st.sets(st.integers(0, (1 << 12) - 1), max_size=4))
def test_power_sum_sidon_round_trip(items):
    enc = PowerSumSidon(12, 4)
    assert enc.decode(enc.encode_many(items)) == frozenset(items)


def test_power_sum_sidon_small_domain_is_sidon():
    assert verify_sidon(PowerSumSidon(4, 2), 2, include_empty=True) is None


def test_sidon_for_picks_a_realization():
    assert isinstance(sidon_for(3, 2), TableSidon)
    assert isinstance(sidon_for(20, 3), PowerSumSidon)
    with pytest.raises(ValueError):
        PowerSumSidon(4, 0)
    with pytest.raises(ValueError):
        PowerSumSidon(4, 1).encode(16)
