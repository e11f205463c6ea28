"""Reductions: Gap Hamming distance, tandem Equality protocols, padding.

* :func:`gap_hd_protocol` samples coordinates and thresholds the sampled distance.
* :func:`embed_into_gaphd` turns a one-way protocol into a single GapHD query.
* :func:`tandem_to_code` compiles a tandem Equality protocol into a
  constant-weight code whose pairwise distance encodes every query answer.
* :func:`protocol4_tree` solves a distance-r composition of tandem problems
  with Hamming-distance oracle queries, recovering the per-coordinate
  distances from power sums.
* :func:`pad_hdk_to_hdkk` is the padding map from HD_k' to HD_{k',k'}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bits import BOTTOM, EQ, GAP, HD, BitString, BlockedString, GapHD, popcount
from .engine import (
    DomainError,
    ExplicitString,
    Leaf,
    OracleNode,
    OracleTree,
    RandomTape,
    RowBits,
    RowIndicator,
    SymmetricProtocol,
    VirtualString,
    _check_materialize,
    _concat_bits,
    pad_to_target,
)
from .fcodes import explicit_code


class InconsistentSums(ValueError):
    """No multiset, or more than one, matches the given power sums."""


class Inconsistent:
    def __repr__(self):
        return "INCONSISTENT"


INCONSISTENT = Inconsistent()


# Gap Hamming distance -------------------------------------------------------

def gap_sample_size(gamma, delta):
    gamma, delta = Fraction(gamma), Fraction(delta)
    return math.ceil(2 / (1 - 2 * gamma) ** 2 * math.log(2 / delta))


def gap_hd_protocol(gamma, delta):
    """Alice sends x on |S| shared random coordinates; accept iff at most half differ."""
    gamma, delta = Fraction(gamma), Fraction(delta)
    kind = GapHD(gamma)
    size = gap_sample_size(gamma, delta)

    def runner(session, x, y, scope):
        if x.length != y.length:
            raise DomainError("inputs must have equal length")
        if kind.classify((x.value ^ y.value).bit_count(), x.length) is GAP:
            session.note("gap-input")
        coords = [session.tape.randbelow(x.length) for _ in range(size)]
        session.send("A", size)
        diff = sum((x.value ^ y.value) >> i & 1 for i in coords)
        return int(2 * diff <= size)

    params = {"gamma": gamma, "delta": delta, "sample_size": size, "bits_sent": size}
    return SymmetricProtocol("gap-hd", runner, params, oblivious=True, depth_bound=size)


@dataclass
class OneWayProtocol:
    """Alice sends ``message(r, x)`` in [2^c]; Bob outputs ``output(msg, y, r)``."""

    c: int
    message: object
    output: object
    truth: object = None
    name: str = "one-way"

    @property
    def w(self):
        return 1 << self.c

    def accept_set(self, r, y):
        """Messages on which Bob outputs 1, as a w-bit mask."""
        return sum(1 << m for m in range(self.w) if self.output(m, y, r))

    def run(self, r, x, y):
        msg = self.message(r, x)
        if not 0 <= msg < self.w:
            raise ValueError(f"message {msg} does not fit in {self.c} bits")
        return int(self.output(msg, y, r))


def _parities(r, x, c):
    tape = RandomTape(r)
    out = 0
    for j in range(c):
        out |= ((x.value & tape.getrandbits(x.length)).bit_count() & 1) << j
    return out


def equality_one_way(c=2):
    """c random inner-product parities; one-sided error 2^-c on unequal inputs."""
    return OneWayProtocol(
        c,
        lambda r, x: _parities(r, x, c),
        lambda msg, y, r: int(msg == _parities(r, y, c)),
        truth=lambda x, y: int(x == y),
        name=f"equality-c{c}",
    )


def constant_one_way(value=1, c=1):
    return OneWayProtocol(c, lambda r, x: 0, lambda msg, y, r: value, truth=lambda x, y: value, name="constant")


@dataclass
class GapEmbedding:
    protocol: OneWayProtocol
    n: int
    seeds: tuple
    t: int
    w: int
    gamma: Fraction
    attempts: int = 0
    report: dict = field(default_factory=dict)

    @property
    def L(self):
        return 2 * self.t * self.w

    def phi_block(self, r, x):
        return 1 << self.protocol.message(r, x)

    def psi_block(self, r, y):
        s = self.protocol.accept_set(r, y)
        return s | (((1 << self.w) - 1) ^ s) << self.w

    def phi(self, x):
        parts = [(2 * self.w, self.phi_block(r, x)) for r in self.seeds]
        return _concat_bits(parts)

    def psi(self, y):
        return _concat_bits((2 * self.w, self.psi_block(r, y)) for r in self.seeds)

    def oracle_tree(self):
        """The single-query protocol: one GapHD query on (Phi(x), Psi(y))."""
        kind = GapHD(self.gamma)
        node = OracleNode(kind, lambda x: ExplicitString(self.phi(x)), lambda y: ExplicitString(self.psi(y)),
                          (Leaf(0), Leaf(1)), "gap-query")
        return OracleTree(node, 1, "gap-embedding")


def embedding_params(c, n, eps=Fraction(1, 6)):
    w = 1 << c
    t = math.ceil(3 / Fraction(eps) ** 2 * n)
    return {"w": w, "t": t, "L": 2 * t * w, "gamma": Fraction(1, 2) - Fraction(1, 12 * w)}


def embed_into_gaphd(p, n, max_attempts=100, seed=0, truth=None):
    """Sample seed tuples until every pair in {0,1}^n lands on the right side of the gap."""
    if n > 8:
        raise DomainError("exhaustive embedding verification is limited to n <= 8")
    truth = truth or p.truth
    if truth is None:
        raise ValueError("need the problem's truth function")
    prm = embedding_params(p.c, n)
    t, w, gamma, L = prm["t"], prm["w"], prm["gamma"], prm["L"]
    domain = [BitString(n, v) for v in range(1 << n)]
    want = {(x.value, y.value): truth(x, y) for x in domain for y in domain}
    tape = RandomTape(seed)
    for attempt in range(1, max_attempts + 1):
        seeds = tuple(tape.getrandbits(64) for _ in range(t))
        emb = GapEmbedding(p, n, seeds, t, w, gamma, attempt)
        phis = {x.value: emb.phi(x).value for x in domain}
        psis = {y.value: emb.psi(y).value for y in domain}
        side = {1: [], 0: []}
        ok = True
        for (xv, yv), value in want.items():
            dist = (phis[xv] ^ psis[yv]).bit_count()
            side[value].append(dist)
            if value == 1 and dist > gamma * L or value == 0 and dist < (1 - gamma) * L:
                ok = False
                break
        if ok:
            emb.report = {
                "t": t, "w": w, "gamma": str(gamma), "L": L, "attempts": attempt,
                "accept_min": min(side[1], default=None), "accept_max": max(side[1], default=None),
                "reject_min": min(side[0], default=None), "reject_max": max(side[0], default=None),
            }
            return emb
    raise RuntimeError(f"no valid seed tuple in {max_attempts} attempts; protocol error may exceed 1/3")


# Tandem Equality protocols --------------------------------------------------

@dataclass(frozen=True)
class TandemProtocol:
    """Queries Q_i = [a_i(x) = a_i(y)]; output rho[Q_1 + 2 Q_2 + ...]."""

    N: int
    queries: tuple
    rho: tuple

    def __post_init__(self):
        q = len(self.queries)
        if q < 1:
            raise ValueError("need at least one query")
        if any(len(a) != self.N for a in self.queries):
            raise ValueError("query functions must be total on [N]")
        if any(v < 0 for a in self.queries for v in a):
            raise ValueError("query values must be natural numbers")
        if len(self.rho) != 1 << q:
            raise ValueError("rho needs 2^q entries")

    @property
    def q(self):
        return len(self.queries)

    def answers(self, x, y):
        return tuple(int(a[x] == a[y]) for a in self.queries)

    def index(self, answers):
        return sum(v << i for i, v in enumerate(answers))

    def __call__(self, x, y):
        return self.rho[self.index(self.answers(x, y))]

    def matrix(self):
        return [[self(x, y) for y in range(self.N)] for x in range(self.N)]

    def oracle_tree(self):
        """Equality-oracle tree; both parties use the same query function at every node."""
        width = max(1, max(max(a) for a in self.queries).bit_length())
        tables = [np.asarray(a, dtype=np.uint64) for a in self.queries]

        def build(i, idx):
            if i == self.q:
                return Leaf(self.rho[idx])
            table = tables[i]
            query = lambda X, table=table: RowBits(table[np.asarray(X, dtype=np.int64)][..., None], width)  # noqa: E731
            return OracleNode(EQ(), query, query, (build(i + 1, idx), build(i + 1, idx | 1 << i)), f"query-{i + 1}")

        return OracleTree(build(0, 0), self.q, "tandem")


def partition_tandem(N, q, seed=0, colors=3, rho=None):
    """Random colourings c_1..c_q of [N]; P = rho(answers).  Tandem by construction."""
    tape = RandomTape(seed)
    queries = tuple(tuple(tape.randbelow(colors) for _ in range(N)) for _ in range(q))
    rho = tuple(range(1 << q)) if rho is None else tuple(rho)
    return TandemProtocol(N, queries, rho)


@dataclass(frozen=True)
class TandemDecoder:
    """D(t): bit i of the distance t is set iff query i answered 0."""

    q: int
    rho: tuple

    @property
    def k(self):
        return (1 << self.q) - 1

    def answers(self, t):
        if t % 2 or not 0 <= t <= 2 * self.k:
            raise ValueError(f"{t} is not a valid code distance")
        return tuple(1 - (t >> i & 1) for i in range(1, self.q + 1))

    def __call__(self, t):
        return self.rho[sum(v << i for i, v in enumerate(self.answers(t)))]


def _tandem_words(t):
    """Codeword ints for E(0..N-1): one-hot of a_i(x) with every coordinate repeated 2^(i-1) times."""
    N = t.N
    words = []
    for x in range(N):
        word, offset = 0, 0
        for i, a in enumerate(t.queries):
            if max(a) >= N:
                raise ValueError("query values must lie in [N]")
            rep = 1 << i
            word |= ((1 << rep) - 1) << (offset + a[x] * rep)
            offset += N * rep
        words.append(word)
    return words, offset


def tandem_to_code(t, N=None):
    """(E, D) with |E(x)| = 2^q - 1 and t(x, y) = D(dist(E(x), E(y)))."""
    if N is not None and N != t.N:
        raise ValueError("N must match the protocol")
    words, m = _tandem_words(t)
    nb = max(1, (t.N - 1).bit_length())
    code = explicit_code(nb, m, [(BitString(nb, x), w) for x, w in enumerate(words)], name="tandem")
    code.tandem_words = words
    return code, TandemDecoder(t.q, t.rho)


# F_d encodings and power-sum recovery -----------------------------------------

FD_GUARD_D = 4
FD_GUARD_N = 12


def _as_set(x):
    if isinstance(x, BitString):
        return frozenset(x.positions())
    return frozenset(x)


def f_d_encode(x, d, n):
    """F_d(x) = x^d as an explicit set of d-tuples over [n]."""
    if d > FD_GUARD_D or n > FD_GUARD_N:
        raise DomainError(f"F_d materialization is limited to d <= {FD_GUARD_D}, n <= {FD_GUARD_N}")
    s = _as_set(x)
    if any(not 0 <= i < n for i in s):
        raise ValueError("set element outside [n]")
    return frozenset(itertools.product(sorted(s), repeat=d))


def f_d_distance(x, y, d):
    """|F_d(x) xor F_d(y)| = |x|^d + |y|^d - 2|x & y|^d (= 2k^d - 2(k - dist/2)^d on weight k)."""
    a, b = _as_set(x), _as_set(y)
    return len(a) ** d + len(b) ** d - 2 * len(a & b) ** d


@lru_cache(maxsize=None)
def _power_sum_index(r, k, count):
    index = {}
    values = range(0, 2 * k + 1, 2)
    for combo in itertools.combinations_with_replacement(values, count):
        key = tuple(sum((k - a // 2) ** d for a in combo) for d in range(1, r + 1))
        index.setdefault(key, []).append(combo)
    return index


def newton_recover(power_sums, r, k, count):
    """The unique multiset {a_i} of ``count`` even values in [0, 2k] with
    sum_i (k - a_i/2)^d = power_sums[d-1] for d = 1..r."""
    if count > r:
        raise ValueError("count must be <= r")
    sums = tuple(int(s) for s in power_sums)
    if len(sums) != r:
        raise ValueError(f"need {r} power sums")
    found = _power_sum_index(r, k, count).get(sums, [])
    if len(found) != 1:
        raise InconsistentSums(f"{len(found)} multisets match power sums {sums}")
    return found[0]


def newton_collisions(max_size, k, r):
    """Pairs of distinct multisets with equal (size, power sums); empty means injective."""
    out = []
    for count in range(max_size + 1):
        for key, combos in _power_sum_index(r, k, count).items():
            if len(combos) > 1:
                out.append((count, key, combos))
    return out


# Protocol 4 --------------------------------------------------------------------

class CodeFdBlocks(VirtualString):
    """Concatenation over coordinates of F_d(E(x_i)), with E given by codeword ints below 2^64."""

    def __init__(self, words, d, m):
        self.words = np.asarray(words, dtype=np.uint64)
        self.d = d
        self.m = m
        self.length = self.words.shape[-1] * m**d

    def _key(self):
        return (type(self), self.length, self.d, self.m)

    def _distance(self, other):
        d = self.d
        a = popcount(self.words).astype(np.int64)
        b = popcount(other.words).astype(np.int64)
        c = popcount(self.words & other.words).astype(np.int64)
        return (a**d + b**d - 2 * c**d).sum(axis=-1)

    def materialize(self):
        _check_materialize(self.length)
        parts = []
        for w in self.words.tolist():
            pos = [i for i in range(self.m) if w >> i & 1]
            value = 0
            for tup in itertools.product(pos, repeat=self.d):
                value |= 1 << sum(i * self.m**p for p, i in enumerate(tup))
            parts.append((self.m**self.d, value))
        return _concat_bits(parts)


@dataclass
class Protocol4:
    tree: OracleTree
    K: int
    k: int
    r: int
    decoder: TandemDecoder


def protocol4_tree(bases, r, g):
    """Deterministic HD_K-oracle protocol (K = 2 r k^r) for g[P_1 ... P_n] at distance r.

    Every query is one HD_K call on padded strings: first the count of unequal
    coordinates (linear search over 0..r), then for each d in [r] the value
    T_d (linear search over even candidates), then power-sum recovery.
    """
    bases = list(bases)
    if not bases:
        raise ValueError("need at least one base problem")
    q, rho, N = bases[0].q, bases[0].rho, bases[0].N
    if any(b.q != q or b.rho != rho or b.N != N for b in bases):
        raise ValueError("bases must share q, rho and N so that k and D are shared")
    compiled = [_tandem_words(b) for b in bases]
    m = compiled[0][1]
    if m > 64:
        raise DomainError("tandem codewords above 64 bits are not supported")
    tables = np.array([w for w, _ in compiled], dtype=np.uint64)  # (n, N)
    decoder = TandemDecoder(q, rho)
    k = decoder.k
    K = 2 * r * k**r
    n = len(bases)
    cols = np.arange(n)
    kind = HD(K)

    def words(X):
        return tables[cols, np.asarray(X, dtype=np.int64)]

    def prepare(x):
        arr = np.asarray(x, dtype=np.int64)
        if arr.shape[-1] != n or arr.min(initial=0) < 0 or arr.max(initial=0) >= N:
            raise DomainError(f"inputs must be {n} symbols in [{N}]")
        return arr

    def count_node(j):
        a = lambda X: pad_to_target(RowIndicator(X, N), RowIndicator(X, N), 2 * j, K)[0]  # noqa: E731
        b = lambda Y: pad_to_target(RowIndicator(Y, N), RowIndicator(Y, N), 2 * j, K)[1]  # noqa: E731

        def child(ans):
            if ans:
                return Leaf(g(())) if j == 0 else sum_node(j, 1, 0, ())
            return count_node(j + 1) if j < r else Leaf(BOTTOM)

        return OracleNode(kind, a, b, child, f"count={j}")

    def sum_node(cnt, d, t, known):
        a = lambda X: pad_to_target(CodeFdBlocks(words(X), d, m), CodeFdBlocks(words(X), d, m), t, K)[0]  # noqa: E731
        b = lambda Y: pad_to_target(CodeFdBlocks(words(Y), d, m), CodeFdBlocks(words(Y), d, m), t, K)[1]  # noqa: E731

        def child(ans):
            if ans:
                sums = known + (t,)
                if d < r:
                    return sum_node(cnt, d + 1, 0, sums)
                return finish(cnt, sums)
            if t + 2 <= 2 * cnt * k**d:
                return sum_node(cnt, d, t + 2, known)
            return Leaf(INCONSISTENT)

        return OracleNode(kind, a, b, child, f"T{d}={t}")

    def finish(cnt, T):
        power = [(cnt * 2 * k**d - T[d - 1]) // 2 for d in range(1, r + 1)]
        try:
            a = newton_recover(power, r, k, cnt)
        except InconsistentSums:
            return Leaf(INCONSISTENT)
        return Leaf(g([decoder(v) for v in a]))

    cost = (r + 1) + sum(r * k**d + 1 for d in range(1, r + 1))
    tree = OracleTree(count_node(0), cost, "protocol4", prepare)
    return Protocol4(tree, K, k, r, decoder)


def composed_truth(bases, r, g, x, y):
    """Brute force: BOTTOM if more than r coordinates differ, else g of the base answers there."""
    delta = [i for i, (a, b) in enumerate(zip(x, y)) if a != b]
    if len(delta) > r:
        return BOTTOM
    return g([bases[i](x[i], y[i]) for i in delta])


def neighbourhood(x, N, radius):
    """All y in [N]^n within Hamming distance ``radius`` of x."""
    x = tuple(x)
    out = []
    for size in range(radius + 1):
        for pos in itertools.combinations(range(len(x)), size):
            choices = [[v for v in range(N) if v != x[p]] for p in pos]
            for vals in itertools.product(*choices):
                y = list(x)
                for p, v in zip(pos, vals):
                    y[p] = v
                out.append(tuple(y))
    return out


# Padding ------------------------------------------------------------------------

def pad_hdk_to_hdkk(x, n):
    """p(x) = (x, x, 0, ..., 0): n rows of n bits."""
    if x.length != n:
        raise DomainError(f"expected {n} bits, got {x.length}")
    if n < 2:
        raise DomainError("padding needs at least two rows")
    zero = BitString(n, 0)
    return BlockedString([x, x] + [zero] * (n - 2))
