"""k-Sidon encodings: maps whose XORs over small sets determine the set.

Two realizations share one interface (``encode``, ``decode``, ``size``):

* :class:`TableSidon` is a random table of width 2*k*ell + 1, verified
  exhaustively for small domains and decoded through a lookup dictionary.
* :class:`PowerSumSidon` sends the odd power sums of ``u | 2^ell`` in
  GF(2^m); by the BCH bound any two sets of size <= k have distinct sums,
  and the set is decoded algebraically.  Used when tables are too large.
"""

from __future__ import annotations

import itertools
import math

from .bits import CapacityError
from .engine import RandomTape
from .gf2m import decode_power_sums, field, odd_power_sums

TABLE_DOMAIN_LIMIT = 64
VERIFY_GUARD = 2_000_000


class SidonEncoding:
    ell: int
    k: int
    size: int

    def encode(self, u):
        raise NotImplementedError

    def __call__(self, u):
        return self.encode(u)

    def xor(self, items):
        acc = 0
        for u in items:
            acc ^= self.encode(u)
        return acc

    def decode(self, value):
        """The unique set of size <= k with this XOR, or None."""
        raise NotImplementedError


class TableSidon(SidonEncoding):
    def __init__(self, ell, k, size, table):
        self.ell, self.k, self.size = ell, k, size
        self.table = tuple(table)
        if len(self.table) != 1 << ell:
            raise ValueError("table must cover the whole domain")
        self._index = None

    def encode(self, u):
        return self.table[u]

    def decode(self, value):
        if self._index is None:
            index = {}
            for U in _subsets(1 << self.ell, self.k, include_empty=True):
                index.setdefault(self.xor(U), frozenset(U))
            self._index = index
        return self._index.get(value)


class PowerSumSidon(SidonEncoding):
    def __init__(self, ell, k):
        if ell < 1 or k < 1:
            raise ValueError("ell and k must be positive")
        self.ell, self.k = ell, k
        m = ell + 1
        if m % 2 == 0:
            m += 1
        self.m = m
        self.field = field(m)
        self.size = k * m
        self._mask = (1 << m) - 1

    def encode(self, u):
        if not 0 <= u < 1 << self.ell:
            raise ValueError(f"{u} outside the {self.ell}-bit domain")
        return self._pack(odd_power_sums(self.field, [u | 1 << self.ell], self.k))

    def encode_many(self, items):
        return self._pack(odd_power_sums(self.field, [u | 1 << self.ell for u in items], self.k))

    def _pack(self, sums):
        out = 0
        for j, s in enumerate(sums):
            out |= s << (j * self.m)
        return out

    def decode(self, value):
        sums = [(value >> (j * self.m)) & self._mask for j in range(self.k)]
        roots = decode_power_sums(self.field, sums)
        if roots is None:
            return None
        lo, hi = 1 << self.ell, 1 << (self.ell + 1)
        if any(not lo <= a < hi for a in roots):
            return None
        return frozenset(a ^ lo for a in roots)


def sidon_for(ell, k, seed=0):
    """Encoding used inside protocols: a verified table when small, else power sums."""
    if (1 << ell) <= TABLE_DOMAIN_LIMIT and math.comb(1 << ell, k) <= 50_000:
        return build_sidon(ell, k, seed)
    return PowerSumSidon(ell, k)


def build_sidon(ell, k, seed, max_attempts=64):
    """Random table of width 2*k*ell + 1, verified exhaustively when 2^ell <= 64."""
    if ell < 1 or k < 1:
        raise ValueError("ell and k must be positive")
    size = 2 * k * ell + 1
    tape = RandomTape(seed)
    for _ in range(max_attempts):
        table = [tape.getrandbits(size) for _ in range(1 << ell)]
        enc = TableSidon(ell, k, size, table)
        if (1 << ell) > TABLE_DOMAIN_LIMIT:
            return enc
        if verify_sidon(enc, k, include_empty=True) is None:
            return enc
    raise RuntimeError(f"no valid {k}-Sidon table found in {max_attempts} attempts")


def _subsets(domain_size, k, include_empty):
    start = 0 if include_empty else 1
    for size in range(start, min(k, domain_size) + 1):
        yield from itertools.combinations(range(domain_size), size)


def verify_sidon(enc, k, ell=None, include_empty=False):
    """Exhaustive Sidon check; returns None on success or a counterexample (U, V).

    By default sets of size 1..k are compared, so the injective identity map
    is 1-Sidon; ``include_empty`` also requires no nonempty set to XOR to 0.
    """
    if ell is None:
        ell = enc.ell
    domain = 1 << ell
    total = sum(math.comb(domain, s) for s in range(0 if include_empty else 1, min(k, domain) + 1))
    if total > VERIFY_GUARD:
        raise CapacityError(f"{total} subsets exceed the verification guard")
    encode = enc.encode if isinstance(enc, SidonEncoding) else enc
    seen = {}
    for U in _subsets(domain, k, include_empty):
        acc = 0
        for u in U:
            acc ^= encode(u)
        if acc in seen:
            return (frozenset(seen[acc]), frozenset(U))
        seen[acc] = U
    return None
