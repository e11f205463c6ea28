"""The named Hamming-distance protocols.

Randomized: Equality, counting unequal blocks, k-Hamming distance and the
boosted {4,4} protocol.  Deterministic oracle trees: the {2,2} protocol and
the conditional {4,4} protocol parameterised by a non-affine code.
"""

from __future__ import annotations

import enum
import math
from functools import lru_cache
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .bits import BOTTOM, EQ, HD, BitString, BlockedString, popcount
from .engine import (
    DomainError,
    RowBits,
    RowCodewords,
    RowIndicator,
    SymmetricProtocol,
    conjunction_tree,
)
from .sidon import PowerSumSidon


class Count(enum.Enum):
    MORE_THAN_R = ">r"

    def __str__(self):
        return self.value


MORE_THAN_R = Count.MORE_THAN_R


def symbols(x):
    """Coordinates of an input as a tuple of ints (bits, rows, or symbols)."""
    if isinstance(x, BitString):
        return x.bits
    if isinstance(x, BlockedString):
        return x.rows
    return tuple(int(v) for v in x)


def _flat(x):
    return x.flatten() if isinstance(x, BlockedString) else x


@dataclass(frozen=True)
class HdProtocolParams:
    name: str
    k: int = 0
    r: int = 0
    delta: Fraction = Fraction(1, 8)
    boost_rounds: int = 1
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta))
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.boost_rounds < 1:
            raise ValueError("boost_rounds must be >= 1")

    def to_dict(self):
        d = asdict(self)
        d["delta"] = str(self.delta)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**{**d, "delta": Fraction(str(d.get("delta", "1/8")))})


# Equality ---------------------------------------------------------------

def equality_protocol(b):
    """Each party sends ``b`` random inner-product bits of its input."""
    if b < 1:
        raise ValueError("b must be >= 1")

    def runner(session, x, y, scope):
        fx, fy = _flat(x), _flat(y)
        if fx.length != fy.length:
            raise DomainError("equality inputs must have equal length")
        ha = hb = 0
        for t in range(b):
            mask = session.tape.getrandbits(fx.length)
            ha |= ((fx.value & mask).bit_count() & 1) << t
            hb |= ((fy.value & mask).bit_count() & 1) << t
        session.send("A", b)
        session.send("B", b)
        return int(ha == hb)

    return SymmetricProtocol("equality", runner, {"b": b, "bits_sent": 2 * b}, oblivious=True, depth_bound=2 * b)


# Counting unequal blocks -------------------------------------------------

def count_params(r, delta):
    delta = Fraction(delta)
    tag_bits = math.ceil(math.log2(2 / delta))
    out = {"r": r, "delta": delta, "tag_bits": tag_bits}
    if r == 0:
        out["element_bits"] = 0
        out["sketch_size"] = 0
    else:
        pairs = math.comb(2 * r + 2, 2)
        ell = math.ceil(math.log2(2 * pairs / delta))
        out["element_bits"] = ell
        out["sketch_size"] = PowerSumSidon(ell, 2 * r).size
    out["bits_sent"] = 2 * (out["sketch_size"] + tag_bits)
    return out


def count_unequal_blocks(r, delta):
    """Number of unequal coordinates if at most ``r``, else MORE_THAN_R.

    Each coordinate j contributes a random element e_j(z); the parties
    exchange a capacity-2r power-sum sketch of their elements plus a short
    XOR tag of an independent random function of them.  Equal coordinates
    cancel; the decoded difference set has two elements per unequal one.
    """
    params = count_params(r, delta)
    sketch = PowerSumSidon(params["element_bits"], 2 * r) if r else None
    ell = params["element_bits"]
    c = params["tag_bits"]

    def runner(session, x, y, scope):
        xs, ys = symbols(x), symbols(y)
        if len(xs) != len(ys):
            raise DomainError("inputs must have the same number of blocks")
        tag = session.function(scope, "tag", 1 << c)
        if r == 0:
            elem = session.function(scope, "elem", 1 << 60)
            ta = tb = 0
            for j, (a, b) in enumerate(zip(xs, ys)):
                ta ^= tag(elem(j, a))
                tb ^= tag(elem(j, b))
            session.exchange(c)
            return 0 if ta == tb else MORE_THAN_R
        elem = session.function(scope, "elem", 1 << ell)
        ea = [elem(j, a) for j, a in enumerate(xs)]
        eb = [elem(j, b) for j, b in enumerate(ys)]
        ta = tb = 0
        for e in ea:
            ta ^= tag(e)
        for e in eb:
            tb ^= tag(e)
        session.exchange(sketch.size + c)
        got = sketch.decode(sketch.encode_many(ea) ^ sketch.encode_many(eb))
        if got is None or len(got) % 2:
            return MORE_THAN_R
        check = 0
        for e in got:
            check ^= tag(e)
        if check != ta ^ tb:
            return MORE_THAN_R
        return len(got) // 2

    return SymmetricProtocol(f"count-r{r}", runner, params, oblivious=True, depth_bound=params["bits_sent"])


# k-Hamming distance -----------------------------------------------------

@lru_cache(maxsize=256)
def hd_k_protocol(k, delta, n):
    """Distance-k composition of n copies of the XOR matrix with g = [sum == k]."""
    from .composition import CompositionSpec, compose_distance_r, make_g, xor_matrix

    if k < 0:
        raise ValueError("k must be >= 0")
    spec = CompositionSpec([xor_matrix()], k, delta, make_g("hd-count", target=k), n=n)
    inner = compose_distance_r(spec)

    def runner(session, x, y, scope):
        fx, fy = _flat(x), _flat(y)
        if fx.length != n or fy.length != n:
            raise DomainError(f"hd_k protocol built for n={n}, got {fx.length} and {fy.length}")
        out = inner.run(session, fx, fy, scope)
        return 0 if out is BOTTOM else out

    params = dict(inner.params, k=k, n=n)
    return SymmetricProtocol(f"hd{k}", runner, params, oblivious=True, depth_bound=params["bits_sent"])


# {4,4}: randomized ------------------------------------------------------

def hd44_params(delta):
    delta = Fraction(delta)
    rounds = math.ceil(math.log2(3 / delta))
    return {"delta": delta, "boost_rounds": rounds, "count_delta": delta / 3, "sub_delta": delta / (6 * rounds)}


def hd44_protocol(delta, hd_oracle=None):
    """Two unequal rows, then random row partitions each checked with two HD_4 runs.

    ``hd_oracle(xa, ya) -> 0/1`` replaces the randomized HD_4 subprotocol
    (used to test soundness with exact answers).
    """
    params = hd44_params(delta)
    counter = count_unequal_blocks(2, params["count_delta"])
    rounds = params["boost_rounds"]

    def runner(session, x, y, scope):
        if not isinstance(x, BlockedString) or not isinstance(y, BlockedString):
            raise DomainError("hd44 needs blocked inputs")
        if x.block_count != y.block_count or x.block_length != y.block_length:
            raise DomainError("hd44 inputs must have the same shape")
        if counter.run(session, x, y, scope + "/count") != 2:
            return 0
        side = session.function(scope, "side", 2)
        for t in range(rounds):
            part_a = [i for i in range(x.block_count) if side(t, i) == 0]
            part_b = [i for i in range(x.block_count) if side(t, i) == 1]
            diff = [i for i in range(x.block_count) if x.blocks[i] != y.blocks[i]]
            session.note("rounds")
            if len({side(t, i) for i in diff}) == 2:
                session.note("split")
            if not part_a or not part_b:
                continue
            ok = True
            for name, part in (("A", part_a), ("B", part_b)):
                xa, ya = x.select(part).flatten(), y.select(part).flatten()
                if hd_oracle is not None:
                    res = hd_oracle(xa, ya)
                    session.query(HD(4), res)
                else:
                    sub = hd_k_protocol(4, params["sub_delta"], xa.length)
                    res = sub.run(session, xa, ya, f"{scope}/round{t}/{name}")
                if res != 1:
                    ok = False
                    break
            if ok:
                return 1
        return 0

    return SymmetricProtocol("hd44", runner, params, oblivious=False)


# Oracle trees -------------------------------------------------------------

def _rows_of(expected_rows, row_bits):
    def prepare(x):
        if isinstance(x, BlockedString):
            if x.block_count != expected_rows or x.block_length != row_bits:
                raise DomainError(
                    f"expected {expected_rows} rows of {row_bits} bits, got "
                    f"{x.block_count} x {x.block_length}"
                )
            return x.as_array()
        arr = np.asarray(x, dtype=np.uint64)
        if arr.shape[-1] != expected_rows:
            raise DomainError(f"expected {expected_rows} rows, got shape {arr.shape}")
        return arr

    return prepare


def _parity(rows):
    return popcount(rows) & np.uint64(1)


def hd22_oracle_tree(n, row_bits=None):
    """Exactly two unequal rows, total distance 4, every row distance even."""
    row_bits = n if row_bits is None else row_bits
    alphabet = 1 << row_bits
    queries = [
        ("two-unequal-rows", HD(4), lambda X: RowIndicator(X, alphabet), lambda Y: RowIndicator(Y, alphabet)),
        ("total-distance-4", HD(4), lambda X: RowBits(X, row_bits), lambda Y: RowBits(Y, row_bits)),
        ("parity-equal", EQ(), lambda X: RowBits(_parity(X), 1), lambda Y: RowBits(_parity(Y), 1)),
    ]
    return conjunction_tree(queries, "hd22", prepare=_rows_of(n, row_bits))


def _codeword_table(code, row_bits):
    m = code.m
    limbs = max(1, (m + 63) // 64)
    table = np.zeros((1 << row_bits, limbs), dtype=np.uint64)
    for x, word in code.items():
        for i in range(limbs):
            table[x.value, i] = (word >> (64 * i)) & ((1 << 64) - 1)
    return table


def hd44_conditional_tree(code, rows):
    """Oracle tree for {4,4} given a code on the row domain with f(4) != (f(2)+f(6))/2.

    ``code`` is a Code or TwoPlayerCode; it is re-verified here on {2,4,6}.
    """
    from .fcodes import Code, TwoPlayerCode, code_f_values

    if isinstance(code, Code):
        e1 = e2 = code
    elif isinstance(code, TwoPlayerCode):
        e1, e2 = code.first, code.second
    else:
        raise TypeError("expected a Code or TwoPlayerCode")
    f = code_f_values(code, (0, 2, 4, 6))
    if f is None:
        raise ValueError("code is not an f-code on {0, 2, 4, 6} over its domain")
    if 2 * f[4] == f[2] + f[6]:
        raise ValueError(f"code is affine on {{2,4,6}} (f = {f}); it cannot separate {{4,4}} from {{2,6}}")
    row_bits = e1.n
    alphabet = 1 << row_bits
    t1, t2 = _codeword_table(e1, row_bits), _codeword_table(e2, row_bits)
    target = 2 * f[4] + (rows - 2) * f[0]
    m = e1.m
    domain = {x.value for x in e1.domain}
    base_prepare = _rows_of(rows, row_bits)

    def prepare(x):
        arr = base_prepare(x)
        if arr.ndim == 1 and any(int(v) not in domain for v in arr):
            raise DomainError("row outside the code domain")
        return arr

    queries = [
        ("two-unequal-rows", HD(4), lambda X: RowIndicator(X, alphabet), lambda Y: RowIndicator(Y, alphabet)),
        ("total-distance-8", HD(8), lambda X: RowBits(X, row_bits), lambda Y: RowBits(Y, row_bits)),
        ("parity-equal", EQ(), lambda X: RowBits(_parity(X), 1), lambda Y: RowBits(_parity(Y), 1)),
        ("code-distance", HD(target), lambda X: RowCodewords(t1[X.astype(np.int64)], m),
         lambda Y: RowCodewords(t2[Y.astype(np.int64)], m)),
    ]
    tree = conjunction_tree(queries, "hd44-conditional", prepare=prepare)
    tree.f_values = f
    return tree
