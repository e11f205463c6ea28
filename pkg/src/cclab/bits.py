"""Bit strings, blocked strings, distance signatures and ground truth.

Bit ``i`` of a :class:`BitString` is stored at ``value >> i`` (little-endian
within the integer); the text form lists bit 0 first, so ``"1000"`` has
value 1.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

SLICE_GUARD = 28


class CapacityError(ValueError):
    """Raised when an enumeration would exceed a configured guard."""


class Special(enum.Enum):
    BOTTOM = "⊥"
    GAP = "*"

    def __str__(self):
        return self.value


BOTTOM = Special.BOTTOM
GAP = Special.GAP


@dataclass(frozen=True)
class BitString:
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("BitString length must be positive")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, text):
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {text!r}")
        value = 0
        for i, ch in enumerate(text):
            if ch == "1":
                value |= 1 << i
        return cls(len(text), value)

    @classmethod
    def from_bits(cls, bits):
        bits = list(bits)
        return cls(len(bits), sum(int(b) << i for i, b in enumerate(bits)))

    @classmethod
    def from_positions(cls, length, positions):
        value = 0
        for p in positions:
            value |= 1 << p
        return cls(length, value)

    def __str__(self):
        return "".join("1" if self.value >> i & 1 else "0" for i in range(self.length))

    def __repr__(self):
        return f"BitString({str(self)!r})"

    def __len__(self):
        return self.length

    def __getitem__(self, i):
        if not -self.length <= i < self.length:
            raise IndexError(i)
        return self.value >> (i % self.length) & 1

    def __xor__(self, other):
        _check_lengths(self, other)
        return BitString(self.length, self.value ^ other.value)

    @property
    def bits(self):
        return tuple(self[i] for i in range(self.length))

    @property
    def weight(self):
        return self.value.bit_count()

    def positions(self):
        """Indices of the 1 bits, as a frozenset."""
        return frozenset(i for i in range(self.length) if self.value >> i & 1)

    def concat(self, other):
        return BitString(self.length + other.length, self.value | other.value << self.length)


def _check_lengths(x, y):
    if x.length != y.length:
        raise ValueError(f"length mismatch: {x.length} vs {y.length}")


@dataclass(frozen=True)
class BlockedString:
    """``d`` blocks of ``n`` bits each; the text form joins blocks with ``|``."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise ValueError("BlockedString needs at least one block")
        if len({b.length for b in blocks}) != 1:
            raise ValueError("all blocks must have the same length")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_str(cls, text):
        return cls(tuple(BitString.from_str(part) for part in text.split("|")))

    @classmethod
    def from_rows(cls, rows, block_length):
        return cls(tuple(BitString(block_length, int(r)) for r in rows))

    def __str__(self):
        return "|".join(str(b) for b in self.blocks)

    def __repr__(self):
        return f"BlockedString({str(self)!r})"

    @property
    def block_count(self):
        return len(self.blocks)

    @property
    def block_length(self):
        return self.blocks[0].length

    @property
    def rows(self):
        return tuple(b.value for b in self.blocks)

    def flatten(self):
        out = self.blocks[0]
        for b in self.blocks[1:]:
            out = out.concat(b)
        return out

    def as_array(self):
        if self.block_length > 64:
            raise CapacityError("row arrays hold at most 64 bits per block")
        return np.array(self.rows, dtype=np.uint64)

    def select(self, indices):
        return BlockedString(tuple(self.blocks[i] for i in indices))


@dataclass(frozen=True, eq=False)
class DistanceSignature:
    """Multiset of nonzero per-block distances."""

    values: tuple = ()

    def __post_init__(self):
        values = tuple(sorted(int(v) for v in self.values))
        if any(v <= 0 for v in values):
            raise ValueError("signatures contain only positive distances")
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if isinstance(other, DistanceSignature):
            return self.values == other.values
        try:
            return self.values == tuple(sorted(other))
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        return "{" + ",".join(map(str, self.values)) + "}"

    def counts(self):
        return Counter(self.values)


@dataclass(frozen=True)
class SetFamily:
    n: int
    sets: tuple
    allow_duplicates: bool = False

    def __post_init__(self):
        sets = tuple(frozenset(s) for s in self.sets)
        for s in sets:
            if any(not 0 <= e < self.n for e in s):
                raise ValueError(f"set {sorted(s)} leaves the ground set [0, {self.n})")
        if not self.allow_duplicates and len(set(sets)) != len(sets):
            raise ValueError("duplicate sets in family (pass allow_duplicates=True)")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def hamming_distance(x, y):
    _check_lengths(x, y)
    return (x.value ^ y.value).bit_count()


def weight(x):
    return x.value.bit_count()


def slice_enumerate(n, w):
    """Yield the C(n, w) strings of length ``n`` and weight ``w`` in lexicographic order of their 1-positions."""
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} outside [0, {n}]")
    if n > SLICE_GUARD:
        raise CapacityError(f"slice enumeration capped at n <= {SLICE_GUARD}, got {n}")
    for combo in itertools.combinations(range(n), w):
        yield BitString.from_positions(n, combo)


def slice_count(n, w):
    return math.comb(n, w)


def distance_signature(x, y):
    if x.block_count != y.block_count or x.block_length != y.block_length:
        raise ValueError("blocked strings have different shapes")
    return DistanceSignature(
        tuple(d for d in (hamming_distance(a, b) for a, b in zip(x.blocks, y.blocks)) if d)
    )


# Problem kinds.  The same records double as oracle kinds in the engine.

@dataclass(frozen=True)
class EQ:
    def __str__(self):
        return "EQ"


@dataclass(frozen=True)
class HD:
    k: int

    def __str__(self):
        return f"HD{self.k}"


@dataclass(frozen=True)
class HDKK:
    """Exactly two unequal blocks, each at distance ``k``."""

    k: int

    def __str__(self):
        return f"HD{self.k},{self.k}"


HD44 = HDKK(4)


@dataclass(frozen=True)
class GapHD:
    gamma: Fraction

    def __post_init__(self):
        gamma = Fraction(self.gamma)
        if not 0 < gamma < Fraction(1, 2):
            raise ValueError("gamma must lie in (0, 1/2)")
        object.__setattr__(self, "gamma", gamma)

    def __str__(self):
        return f"GapHD{self.gamma}"

    def classify(self, dist, length):
        if dist <= self.gamma * length:
            return 1
        if dist >= (1 - self.gamma) * length:
            return 0
        return GAP


def _flat(x):
    return x.flatten() if isinstance(x, BlockedString) else x


def truth(problem, x, y):
    """Exact value of ``problem`` on ``(x, y)``: 0, 1 or :data:`GAP`."""
    if isinstance(problem, EQ):
        return int(_flat(x) == _flat(y))
    if isinstance(problem, HD):
        return int(hamming_distance(_flat(x), _flat(y)) == problem.k)
    if isinstance(problem, HDKK):
        if not isinstance(x, BlockedString) or not isinstance(y, BlockedString):
            raise TypeError("HD_{k,k} needs blocked inputs")
        sig = distance_signature(x, y)
        return int(sig == (problem.k, problem.k))
    if isinstance(problem, GapHD):
        fx, fy = _flat(x), _flat(y)
        return problem.classify(hamming_distance(fx, fy), fx.length)
    raise TypeError(f"unknown problem kind {problem!r}")


def popcount(a):
    """Elementwise popcount for unsigned numpy integer arrays."""
    return np.bitwise_count(np.asarray(a))


def hdkk_truth_array(X, Y, k):
    """Vectorised HD_{k,k} over row arrays of shape (..., rows)."""
    d = popcount(np.bitwise_xor(X, Y))
    unequal = (d != 0).sum(axis=-1)
    return ((unequal == 2) & np.all((d == 0) | (d == k), axis=-1)).astype(np.int64)
