"""Two-party protocol harness: public-coin tapes, sessions, oracle trees.

Randomized protocols run inside a :class:`Session`.  Both parties read one
shared :class:`RandomTape`; every message is charged to the session's
:class:`CostReport` and appended to a line-oriented transcript.

Deterministic oracle protocols are :class:`OracleTree` objects whose inner
nodes hold one query builder per party.  Builders return
:class:`VirtualString` objects, so the engine can answer Hamming-distance
queries exactly on strings that are never materialised.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .bits import EQ, GAP, HD, BitString, CapacityError, GapHD, hamming_distance, popcount

MASK64 = (1 << 64) - 1
MATERIALIZE_GUARD = 1 << 16


class DomainError(ValueError):
    """Inputs outside a protocol's declared domain."""


class OracleError(ValueError):
    """Unsupported oracle kind or a strict-mode gap input."""


class RandomTape:
    """Public random tape derived from a 64-bit seed.

    Sequential draws advance ``position`` (one 512-bit block per step).
    Random functions are keyed by label and argument, so both parties get
    identical values for identical arguments regardless of call order.
    """

    def __init__(self, seed):
        self.seed = int(seed) & MASK64
        self.position = 0
        self.bits_drawn = 0
        self._key = self.seed.to_bytes(8, "little")

    def _block(self):
        h = hashlib.blake2b(self.position.to_bytes(8, "little"), key=self._key, person=b"tape")
        self.position += 1
        return int.from_bytes(h.digest(), "little")

    def getrandbits(self, k):
        if k <= 0:
            return 0
        out, got = 0, 0
        while got < k:
            out |= self._block() << got
            got += 512
        self.bits_drawn += k
        return out & ((1 << k) - 1)

    def randbelow(self, bound):
        """Uniform integer in [0, bound); ranges are rounded up to a power of two and rejected."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        k = (bound - 1).bit_length()
        while True:
            v = self.getrandbits(k)
            if v < bound:
                return v

    def random_function(self, label, size):
        return RandomFunction(self, label, size)


class RandomFunction:
    """Uniform function from argument tuples to ``range(size)``."""

    __slots__ = ("tape", "label", "size", "_bits", "_prefix", "_cache")

    def __init__(self, tape, label, size):
        if size < 1:
            raise ValueError("size must be positive")
        self.tape = tape
        self.label = label
        self.size = int(size)
        self._bits = (self.size - 1).bit_length()
        self._prefix = label.encode() + b"\x00"
        self._cache = {}

    def __call__(self, *args):
        try:
            return self._cache[args]
        except KeyError:
            pass
        if self.size == 1:
            value = 0
        else:
            data = self._prefix + repr(args).encode()
            counter = 0
            mask = (1 << self._bits) - 1
            while True:
                h = hashlib.blake2b(data + counter.to_bytes(4, "little"), key=self.tape._key)
                word = int.from_bytes(h.digest(), "little")
                value = None
                for _ in range(512 // max(self._bits, 1)):
                    v = word & mask
                    word >>= self._bits
                    if v < self.size:
                        value = v
                        break
                if value is not None:
                    break
                counter += 1
        self.tape.bits_drawn += self._bits
        self._cache[args] = value
        return value


@dataclass
class CostReport:
    bits_sent: int = 0
    oracle_queries: Counter = field(default_factory=Counter)
    random_bits_drawn: int = 0

    @property
    def total_queries(self):
        return sum(self.oracle_queries.values())

    def as_dict(self):
        return {
            "bits_sent": self.bits_sent,
            "oracle_queries": dict(sorted(self.oracle_queries.items())),
            "random_bits_drawn": self.random_bits_drawn,
        }


class Session:
    """One protocol execution: shared tape, cost counters and transcript."""

    def __init__(self, seed, instrument=False):
        self.tape = RandomTape(seed)
        self.cost = CostReport()
        self.events = []
        self.instrument = instrument
        self.notes = Counter()

    def function(self, scope, name, size):
        return self.tape.random_function(f"{scope}/{name}", size)

    def send(self, party, nbits):
        if nbits < 0:
            raise ValueError("negative message length")
        self.cost.bits_sent += nbits
        self.events.append(("SEND", party, nbits))

    def exchange(self, nbits):
        """Both parties send ``nbits`` simultaneously."""
        self.send("A", nbits)
        self.send("B", nbits)

    def query(self, kind, answer):
        self.cost.oracle_queries[str(kind)] += 1
        self.events.append(("QUERY", str(kind), answer))

    def output(self, value):
        self.events.append(("OUTPUT", value))
        self.cost.random_bits_drawn = self.tape.bits_drawn

    def note(self, key, amount=1):
        """Instrumentation counter (e.g. collisions observed); never affects outputs."""
        self.notes[key] += amount

    def check(self, condition, message):
        if self.instrument and not condition:
            raise AssertionError(message)

    def transcript(self):
        lines = []
        for ev in self.events:
            if ev[0] == "SEND":
                lines.append(f"SEND {ev[1]} {ev[2]}")
            elif ev[0] == "QUERY":
                lines.append(f"QUERY {ev[1]} {ev[2]}")
            else:
                lines.append(f"OUTPUT {ev[1]}")
        return "\n".join(lines) + "\n"


@dataclass
class SymmetricProtocol:
    """A runnable randomized protocol.

    ``runner(session, x, y, scope)`` returns the output; it may call other
    protocols' runners on the same session with a nested scope.
    """

    name: str
    runner: Callable
    params: dict = field(default_factory=dict)
    oblivious: bool = False
    depth_bound: int | None = None
    validate: Callable | None = None

    def run(self, session, x, y, scope=""):
        return self.runner(session, x, y, scope or self.name)


def run_session(p, x, y, seed, instrument=False):
    if p.validate is not None:
        p.validate(x, y)
    session = Session(seed, instrument=instrument)
    out = p.run(session, x, y)
    session.output(out)
    return out, session


def run_protocol(p, x, y, seed, instrument=False):
    """Run ``p`` on ``(x, y)`` with public seed ``seed``; returns ``(output, CostReport)``."""
    out, session = run_session(p, x, y, seed, instrument=instrument)
    return out, session.cost


# Virtual strings --------------------------------------------------------

class VirtualString:
    """A string known only through its length and exact pairwise distances.

    Subclasses broadcast over leading array axes, which lets an oracle tree
    be evaluated on a whole batch of input pairs at once.
    """

    length: int

    def _key(self):
        return (type(self), self.length)

    def distance(self, other):
        if self._key() != other._key():
            raise OracleError(f"incompatible virtual strings: {self._key()} vs {other._key()}")
        return self._distance(other)

    def _distance(self, other):
        raise NotImplementedError

    def materialize(self):
        raise CapacityError(f"{type(self).__name__} cannot be materialized")


class ExplicitString(VirtualString):
    def __init__(self, bits):
        self.bits = bits
        self.length = bits.length

    def _distance(self, other):
        return hamming_distance(self.bits, other.bits)

    def materialize(self):
        return self.bits


def _concat_bits(parts):
    value, length = 0, 0
    for width, v in parts:
        value |= int(v) << length
        length += width
    return BitString(length, value)


def _check_materialize(length):
    if length > MATERIALIZE_GUARD:
        raise CapacityError(f"refusing to materialize {length} bits")


class RowBits(VirtualString):
    """Plain concatenation of rows, each ``row_bits`` wide."""

    def __init__(self, rows, row_bits):
        self.rows = np.asarray(rows, dtype=np.uint64)
        self.row_bits = row_bits
        self.length = self.rows.shape[-1] * row_bits

    def _distance(self, other):
        return popcount(self.rows ^ other.rows).sum(axis=-1)

    def materialize(self):
        _check_materialize(self.length)
        return _concat_bits((self.row_bits, r) for r in self.rows.tolist())


class RowIndicator(VirtualString):
    """Concatenated one-hot encodings of row symbols over an alphabet of ``alphabet_size``."""

    def __init__(self, rows, alphabet_size):
        self.rows = np.asarray(rows, dtype=np.uint64)
        self.alphabet_size = alphabet_size
        self.length = self.rows.shape[-1] * alphabet_size

    def _distance(self, other):
        return 2 * (self.rows != other.rows).sum(axis=-1)

    def materialize(self):
        _check_materialize(self.length)
        return _concat_bits((self.alphabet_size, 1 << int(r)) for r in self.rows.tolist())


class RowCodewords(VirtualString):
    """Concatenated codewords; ``words`` has shape (..., rows, W) of uint64 limbs."""

    def __init__(self, words, codeword_length):
        self.words = np.asarray(words, dtype=np.uint64)
        self.codeword_length = codeword_length
        self.length = self.words.shape[-2] * codeword_length

    def _distance(self, other):
        return popcount(self.words ^ other.words).sum(axis=(-2, -1))

    def materialize(self):
        _check_materialize(self.length)
        parts = []
        for row in self.words.tolist():
            value = sum(int(w) << (64 * i) for i, w in enumerate(row))
            parts.append((self.codeword_length, value))
        return _concat_bits(parts)


class FdBlocks(VirtualString):
    """Concatenation of F_d(S_i) over blocks, where S_i ⊆ [m] and F_d(S) = S^d ⊆ [m]^d."""

    def __init__(self, sets, d, m):
        self.sets = tuple(frozenset(s) for s in sets)
        self.d = d
        self.m = m
        self.length = len(self.sets) * m**d

    def _key(self):
        return (type(self), self.length, self.d, self.m)

    def _distance(self, other):
        d = self.d
        return sum(len(a) ** d + len(b) ** d - 2 * len(a & b) ** d for a, b in zip(self.sets, other.sets))

    def materialize(self):
        import itertools

        _check_materialize(self.length)
        parts = []
        for s in self.sets:
            value = 0
            for tup in itertools.product(sorted(s), repeat=self.d):
                value |= 1 << sum(i * self.m**p for p, i in enumerate(tup))
            parts.append((self.m**self.d, value))
        return _concat_bits(parts)


class Padded(VirtualString):
    """``base`` followed by ``ones`` 1s and ``pad - ones`` 0s."""

    def __init__(self, base, pad, ones):
        if not 0 <= ones <= pad:
            raise ValueError("padding ones must fit in the pad")
        self.base = base
        self.pad = pad
        self.ones = ones
        self.length = base.length + pad

    def _key(self):
        return (type(self), self.length, self.pad, self.base._key())

    def _distance(self, other):
        return self.base.distance(other.base) + abs(self.ones - other.ones)

    def materialize(self):
        base = self.base.materialize()
        return _concat_bits([(base.length, base.value), (self.pad, (1 << self.ones) - 1)])


def pad_to_target(a, b, target, K):
    """Pad ``a`` and ``b`` so that their distance equals ``K`` iff it was ``target``."""
    if not 0 <= target <= K:
        raise ValueError("target must lie in [0, K]")
    extra = K - target
    return Padded(a, extra, extra), Padded(b, extra, 0)


# Oracles ----------------------------------------------------------------

def oracle_answer(kind, a, b, strict=False):
    """Exact oracle answer on two virtual strings (elementwise on batches)."""
    if a.length != b.length:
        raise OracleError("oracle inputs must have equal length")
    dist = a.distance(b)
    if isinstance(kind, EQ):
        return _as_answer(dist == 0)
    if isinstance(kind, HD):
        return _as_answer(dist == kind.k)
    if isinstance(kind, GapHD):
        gamma = Fraction(kind.gamma)
        if np.ndim(dist) == 0:
            value = kind.classify(int(dist), a.length)
            if value is GAP:
                if strict:
                    raise OracleError(f"gap input to {kind}: dist={int(dist)}, length={a.length}")
                return 1
            return value
        dist = np.asarray(dist)
        low = dist * gamma.denominator <= gamma.numerator * a.length
        high = dist * gamma.denominator >= (gamma.denominator - gamma.numerator) * a.length
        if strict and np.any(~low & ~high):
            raise OracleError(f"gap input to {kind}")
        return np.where(high & ~low, 0, 1)
    raise OracleError(f"unsupported oracle kind {kind!r}")


def _as_answer(mask):
    if np.ndim(mask) == 0:
        return int(bool(mask))
    return np.asarray(mask, dtype=np.int64)


@dataclass
class Leaf:
    label: object


@dataclass
class OracleNode:
    """Inner node: query ``kind`` on (alice(x), bob(y)); ``children[answer]`` or ``children(answer)``."""

    kind: object
    alice: Callable
    bob: Callable
    children: object
    step: str = ""

    def child(self, answer):
        if callable(self.children):
            return self.children(answer)
        return self.children[answer]


@dataclass
class OracleTree:
    root: object
    cost: int
    name: str = "oracle-tree"
    prepare: Callable | None = None

    def _prep(self, x):
        return self.prepare(x) if self.prepare is not None else x


def trace_oracle_protocol(tree, x, y, strict=False):
    """Walk the tree on ``(x, y)``; returns (label, [(step, kind, answer), ...])."""
    x, y = tree._prep(x), tree._prep(y)
    node = tree.root
    path = []
    while isinstance(node, OracleNode):
        answer = oracle_answer(node.kind, node.alice(x), node.bob(y), strict=strict)
        path.append((node.step, str(node.kind), answer))
        node = node.child(answer)
        if len(path) > tree.cost:
            raise AssertionError(f"{tree.name}: path exceeds declared cost {tree.cost}")
    return node.label, path


def run_oracle_protocol(tree, x, y, strict=False):
    label, path = trace_oracle_protocol(tree, x, y, strict=strict)
    return label, len(path)


def evaluate_batch(tree, X, Y, strict=False):
    """Evaluate ``tree`` on stacked inputs (leading axis = case); builders must broadcast.

    Returns ``(labels, query_counts)`` as numpy arrays.
    """
    X, Y = tree._prep(X), tree._prep(Y)
    n = len(X)
    labels = np.empty(n, dtype=object)
    counts = np.zeros(n, dtype=np.int64)

    def walk(node, idx, depth):
        if idx.size == 0:
            return
        if not isinstance(node, OracleNode):
            if isinstance(node.label, tuple):
                for i in idx.tolist():
                    labels[i] = node.label
            else:
                labels[idx] = node.label
            return
        if depth >= tree.cost:
            raise AssertionError(f"{tree.name}: path exceeds declared cost {tree.cost}")
        ans = np.asarray(oracle_answer(node.kind, node.alice(X[idx]), node.bob(Y[idx]), strict=strict))
        counts[idx] += 1
        for value in (0, 1):
            walk(node.child(value), idx[ans == value], depth + 1)

    walk(tree.root, np.arange(n), 0)
    return labels, counts


def conjunction_tree(queries, name, prepare=None):
    """Complete tree asking every query in order; label 1 iff all answers are 1.

    ``queries`` is a list of (step, kind, alice, bob).
    """

    def build(i, ok):
        if i == len(queries):
            return Leaf(int(ok))
        step, kind, alice, bob = queries[i]
        return OracleNode(kind, alice, bob, (build(i + 1, False), build(i + 1, ok)), step)

    return OracleTree(build(0, True), len(queries), name, prepare)


# Error estimation -------------------------------------------------------

def wilson_interval(errors, trials, alpha=0.05):
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(errors, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


def estimate_error(p, case_source, truth_fn, trials, seed, agree=None):
    """Fraction of (case, fresh tape) runs whose output disagrees with ``truth_fn``.

    ``case_source`` is a non-empty sequence of ``(x, y)`` pairs (cycled) or a
    callable ``trial_index -> (x, y)``.  Trial ``i`` uses tape seed ``seed ^ i``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if callable(case_source):
        get = case_source
    else:
        cases = list(case_source)
        if not cases:
            raise ValueError("empty case source")
        get = lambda i: cases[i % len(cases)]  # noqa: E731
    agree = agree or (lambda out, want: out == want)
    errors = 0
    for i in range(trials):
        x, y = get(i)
        out, _ = run_protocol(p, x, y, seed ^ i)
        if not agree(out, truth_fn(x, y)):
            errors += 1
    return errors / trials, wilson_interval(errors, trials)
