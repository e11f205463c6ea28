"""Distance-r compositions g[P_1 * ... * P_n].

Each base problem is a symmetric N x N matrix whose deterministic
communication tree is synthesised from the matrix: Alice announces her row
index, then Bob his column index.  Trees are padded with no-op nodes
(owner A, message 0) to a common depth so all simulations run in lock-step.

The composed protocol first bounds the number of unequal coordinates, then
recovers the labels of the unequal coordinates from one Sidon exchange, and
finally runs the single-difference protocol once per label class.  It always
runs exactly ``r`` single-difference simulations (dummies pad the missing
classes), so its cost depends only on (r, delta, depth, |Lambda|).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .bits import BOTTOM, BitString, BlockedString
from .engine import DomainError, SymmetricProtocol
from .protocols import MORE_THAN_R, count_unequal_blocks, symbols
from .sidon import PowerSumSidon, build_sidon

ENC2_SEED = 0x5EED2


def _bits_for(size):
    """Width of a fixed-width code for ``size`` values (at least one bit)."""
    return max(1, (size - 1).bit_length())


# Permutation-invariant outputs ------------------------------------------

@dataclass(frozen=True)
class PermInvariantG:
    name: str
    params: tuple = ()
    labels: tuple = (0, 1)

    def __call__(self, values):
        values = list(values)
        p = dict(self.params)
        if self.name == "hd-count":
            return int(sum(values) == p["target"])
        if self.name == "exists-one":
            return int(any(v == 1 for v in values))
        if self.name == "max-sum-threshold":
            return int(sum(values) <= p["threshold"])
        if self.name == "constant":
            return p.get("value", 1)
        if self.name == "multiset":
            return tuple(sorted(values))
        raise KeyError(self.name)


G_REGISTRY = {
    "hd-count": ("target",),
    "exists-one": (),
    "max-sum-threshold": ("threshold",),
    "constant": ("value",),
    "multiset": (),
}


def make_g(name, **params):
    if name not in G_REGISTRY:
        raise KeyError(f"unknown g {name!r}; choose from {sorted(G_REGISTRY)}")
    missing = [k for k in G_REGISTRY[name] if k not in params and name != "constant"]
    if missing:
        raise ValueError(f"g {name!r} needs parameters {missing}")
    return PermInvariantG(name, tuple(sorted(params.items())))


# Base problems and their trees -----------------------------------------

class MatrixTree:
    """Deterministic tree for a symmetric matrix: row bits from A, then column bits from B."""

    def __init__(self, matrix):
        matrix = tuple(tuple(int(v) for v in row) for row in matrix)
        N = len(matrix)
        if N == 0 or any(len(row) != N for row in matrix):
            raise ValueError("base matrices must be square and nonempty")
        for a in range(N):
            for b in range(a):
                if matrix[a][b] != matrix[b][a]:
                    raise ValueError(f"matrix not symmetric at ({a},{b})")
        self.matrix = matrix
        self.N = N
        self.index_bits = (N - 1).bit_length()
        self.depth = 2 * self.index_bits
        self.labels = tuple(sorted({v for row in matrix for v in row}))

    def owner(self, t):
        return "B" if self.index_bits <= t < self.depth else "A"

    def message(self, t, z):
        if t < self.index_bits:
            return z >> t & 1
        if t < self.depth:
            return z >> (t - self.index_bits) & 1
        return 0

    @staticmethod
    def start():
        return (0, 0)

    def step(self, state, t, bit):
        row, col = state
        if t < self.index_bits:
            return (row | bit << t, col)
        if t < self.depth:
            return (row, col | bit << (t - self.index_bits))
        return state

    def leaf(self, state):
        row, col = state
        if row >= self.N or col >= self.N:
            return self.labels[0]
        return self.matrix[row][col]


@dataclass
class CompositionSpec:
    """Base matrices (one per coordinate, or one shared), r, delta and g."""

    matrices: list
    r: int
    delta: Fraction
    g: PermInvariantG
    n: int | None = None
    trees: list = field(init=False)

    def __post_init__(self):
        self.delta = Fraction(self.delta)
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        cache = {}
        trees = []
        for P in self.matrices:
            key = tuple(map(tuple, P))
            if key not in cache:
                cache[key] = MatrixTree(key)
            trees.append(cache[key])
        if not trees:
            raise ValueError("at least one base matrix is required")
        self.trees = trees
        if self.n is None:
            self.n = len(trees)
        if len(trees) not in (1, self.n):
            raise ValueError("give one base matrix per coordinate or one shared matrix")

    def tree(self, j):
        return self.trees[j] if len(self.trees) > 1 else self.trees[0]

    @property
    def depth(self):
        return max(t.depth for t in self.trees)

    @property
    def labels(self):
        out = set()
        for t in self.trees:
            out.update(t.labels)
        return tuple(sorted(out))

    def truth(self, x, y):
        xs, ys = symbols(x), symbols(y)
        delta = [j for j in range(self.n) if xs[j] != ys[j]]
        if len(delta) > self.r:
            return BOTTOM
        return self.g([self.tree(j).matrix[xs[j]][ys[j]] for j in delta])


# Parameters -------------------------------------------------------------

def _odd_field_degree(ell):
    m = ell + 1
    return m if m % 2 else m + 1


def dist1_params(delta, depth, n_labels):
    """All ceilings of the single-difference protocol, in one place."""
    delta = Fraction(delta)
    hash_range = math.ceil(10 / delta)
    hash_bits = _bits_for(hash_range)
    role_bits = 10 + math.ceil(math.log2(1 / delta))
    label_bits = _bits_for(n_labels)
    enc1_ell = hash_bits + role_bits
    enc3_ell = hash_bits + label_bits
    enc1_size = 2 * _odd_field_degree(enc1_ell)
    enc2_size = 2 * 2 * 3 + 1
    enc3_size = 2 * _odd_field_degree(enc3_ell)
    bits = 2 * (enc1_size + depth * enc2_size + enc3_size)
    return {
        "delta": delta,
        "hash_range": hash_range,
        "hash_bits": hash_bits,
        "role_bits": role_bits,
        "label_bits": label_bits,
        "enc1_ell": enc1_ell,
        "enc3_ell": enc3_ell,
        "enc1_size": enc1_size,
        "enc2_size": enc2_size,
        "enc3_size": enc3_size,
        "depth": depth,
        "bits_sent": bits,
    }


def composition_params(r, delta, depth, n_labels):
    delta = Fraction(delta)
    out = {"r": r, "delta": delta, "count_delta": delta / 10}
    if r == 0:
        return out
    out["label_range"] = math.ceil(5 * r * r / delta)
    out["symbol_range"] = math.ceil(10 * r / delta)
    out["label_bits"] = _bits_for(out["label_range"])
    out["symbol_bits"] = _bits_for(out["symbol_range"])
    out["sidon_ell"] = out["label_bits"] + out["symbol_bits"]
    out["sidon_capacity"] = 2 * r
    out["dist1"] = dist1_params(delta / (10 * r), depth, n_labels)
    return out


# Single-difference protocol ---------------------------------------------

_ENC2 = None


def _enc2():
    global _ENC2
    if _ENC2 is None:
        _ENC2 = build_sidon(3, 2, ENC2_SEED)
    return _ENC2


def _pack3(role, has_msg, msg):
    return role | has_msg << 1 | msg << 2


def run_dist1(session, scope, trees, xs, ys, coords, params, labels):
    """Single-difference protocol on ``coords``; returns a label (labels[0] on abort).

    ``trees[j]`` is the tree for coordinate j.  The message pattern is fixed
    by ``params``; aborted runs keep sending padding so cost stays oblivious.
    """
    p = params
    depth = p["depth"]
    enc1 = PowerSumSidon(p["enc1_ell"], 2)
    enc3 = PowerSumSidon(p["enc3_ell"], 2)
    enc2 = _enc2()
    hb = p["hash_bits"]
    hash_fn = session.function(scope, "hash", p["hash_range"])
    role_fn = session.function(scope, "role", 1 << p["role_bits"])
    default = labels[0]
    label_index = {v: i for i, v in enumerate(labels)}

    # step 1-2: recover the unordered hash/role pair
    def element(j, z):
        return hash_fn(j, z) | role_fn(j, z) << hb

    session.exchange(p["enc1_size"])
    aborted = False
    if coords:
        sum_a = enc1.encode_many([element(j, xs[j]) for j in coords])
        sum_b = enc1.encode_many([element(j, ys[j]) for j in coords])
        pair = enc1.decode(sum_a ^ sum_b)
    else:
        pair = None
    if pair is None or len(pair) != 2:
        aborted = True
    else:
        u, v = sorted(pair)
        ru, rv = u >> hb, v >> hb
        hu, hv = u & ((1 << hb) - 1), v & ((1 << hb) - 1)
        if ru == rv or hu == hv:
            session.note("role_or_hash_collision")
            aborted = True
        else:
            first = ((ru ^ rv) & -(ru ^ rv)).bit_length() - 1
            if ru >> first & 1:
                u, v, hu, hv = v, u, hv, hu
            h_a, h_b = hu, hv  # h_a simulates player A

    if not aborted:
        sim_a = {}
        sim_b = {}
        for j in coords:
            hx, hy = hash_fn(j, xs[j]), hash_fn(j, ys[j])
            if hx in (h_a, h_b):
                sim_a[j] = "A" if hx == h_a else "B"
            if hy in (h_a, h_b):
                sim_b[j] = "A" if hy == h_a else "B"
        S = sorted(sim_a)
        if S != sorted(sim_b):
            session.check(False, "hash sets differ between the parties")
            aborted = True
        state = {j: trees[j].start() for j in S}

    # step 4: lock-step simulation
    for t in range(depth):
        session.exchange(p["enc2_size"])
        if aborted:
            continue
        acc_a = acc_b = 0
        a_vals = {}
        for j in S:
            tree = trees[j]
            owner = tree.owner(t)
            ra, rb = sim_a[j], sim_b[j]
            a_j = _pack3(ra == "B", ra == owner, tree.message(t, xs[j]) if ra == owner else 0)
            b_j = _pack3(rb == "B", rb == owner, tree.message(t, ys[j]) if rb == owner else 0)
            if session.instrument and xs[j] == ys[j]:
                session.check(a_j == b_j, f"lock-step mismatch at coordinate {j}, round {t}")
            acc_a ^= enc2.encode(a_j)
            acc_b ^= enc2.encode(b_j)
            a_vals[j] = a_j
        got = enc2.decode(acc_a ^ acc_b)
        if got is None or len(got) != 2 or len({g & 1 for g in got}) != 2:
            aborted = True
            continue
        msgs = {}
        for g in got:
            msgs["B" if g & 1 else "A"] = (g >> 2) & 1
        for j in S:
            owner = trees[j].owner(t)
            state[j] = trees[j].step(state[j], t, msgs[owner])

    # step 5: recover the leaf value of the differing coordinate
    session.exchange(p["enc3_size"])
    if aborted:
        return default
    leaves = {j: label_index[trees[j].leaf(state[j])] for j in S}
    sum_a = enc3.encode_many([hash_fn(j, xs[j]) | leaves[j] << hb for j in S])
    sum_b = enc3.encode_many([hash_fn(j, ys[j]) | leaves[j] << hb for j in S])
    got = enc3.decode(sum_a ^ sum_b)
    if got is None or len(got) != 2:
        return default
    values = {g >> hb for g in got}
    if len(values) != 1:
        return default
    idx = values.pop()
    return labels[idx] if idx < len(labels) else default


def _pad_trees(spec_trees, n):
    return [spec_trees(j) for j in range(n)]


def dist1_protocol(spec, delta=None):
    """Protocol for the composition under the promise of exactly one unequal coordinate."""
    delta = Fraction(spec.delta if delta is None else delta)
    params = dist1_params(delta, spec.depth, len(spec.labels))
    labels = spec.labels

    def runner(session, x, y, scope):
        xs, ys = symbols(x), symbols(y)
        _check_shape(spec, xs, ys)
        trees = _pad_trees(spec.tree, spec.n)
        return run_dist1(session, scope, trees, xs, ys, list(range(spec.n)), params, labels)

    return SymmetricProtocol("dist1", runner, params, oblivious=True, depth_bound=params["bits_sent"])


def _check_shape(spec, xs, ys):
    if len(xs) != spec.n or len(ys) != spec.n:
        raise DomainError(f"expected {spec.n} coordinates, got {len(xs)} and {len(ys)}")
    for j in (0, spec.n - 1):
        N = spec.tree(j).N
        if not (0 <= xs[j] < N and 0 <= ys[j] < N):
            raise DomainError(f"coordinate {j} outside [0, {N})")


# Distance-r composition -------------------------------------------------

def compose_distance_r(spec):
    r, delta = spec.r, spec.delta
    labels = spec.labels
    params = composition_params(r, delta, spec.depth, len(labels))
    counter = count_unequal_blocks(r, params["count_delta"])
    params["count"] = counter.params
    if r:
        sidon = PowerSumSidon(params["sidon_ell"], params["sidon_capacity"])
        params["sidon_size"] = sidon.size
    d1 = params.get("dist1")
    params["bits_sent"] = counter.params["bits_sent"] + (
        2 * params["sidon_size"] + r * d1["bits_sent"] if r else 0
    )

    def runner(session, x, y, scope):
        xs, ys = symbols(x), symbols(y)
        _check_shape(spec, xs, ys)
        count = counter.run(session, xs, ys, scope + "/count")
        if r == 0:
            return BOTTOM if count is MORE_THAN_R else spec.g([])
        n = spec.n
        label_fn = session.function(scope, "label", params["label_range"])
        sym_fn = session.function(scope, "symbol", params["symbol_range"])
        lb = params["label_bits"]

        session.exchange(sidon.size)
        H = []
        if count is not MORE_THAN_R and count > 0:
            els_a = [label_fn(j) | sym_fn(j, xs[j]) << lb for j in range(n)]
            els_b = [label_fn(j) | sym_fn(j, ys[j]) << lb for j in range(n)]
            got = sidon.decode(sidon.encode_many(els_a) ^ sidon.encode_many(els_b))
            if got is None:
                count = MORE_THAN_R
            else:
                per_label = Counter(e & ((1 << lb) - 1) for e in got)
                H = sorted(per_label)
                if len(H) != count or any(c != 2 for c in per_label.values()):
                    session.note("label_inconsistency")
                    count = MORE_THAN_R
        values = []
        trees = None
        for t in range(r):
            sub = f"{scope}/class{t}"
            if count is MORE_THAN_R or t >= len(H):
                _pad_dist1(session, d1)
                continue
            if trees is None:
                trees = _pad_trees(spec.tree, n)
            coords = [j for j in range(n) if label_fn(j) == H[t]]
            values.append(run_dist1(session, sub, trees, xs, ys, coords, d1, labels))
        if count is MORE_THAN_R:
            return BOTTOM
        return spec.g(values)

    return SymmetricProtocol(
        f"compose-r{r}", runner, params, oblivious=True, depth_bound=params["bits_sent"],
    )


def _pad_dist1(session, p):
    session.exchange(p["enc1_size"])
    for _ in range(p["depth"]):
        session.exchange(p["enc2_size"])
    session.exchange(p["enc3_size"])


def xor_matrix():
    return ((0, 1), (1, 0))


def matrix_from_function(N, fn):
    return tuple(tuple(int(fn(a, b)) for b in range(N)) for a in range(N))


__all__ = [
    "BitString",
    "BlockedString",
    "CompositionSpec",
    "G_REGISTRY",
    "MatrixTree",
    "PermInvariantG",
    "compose_distance_r",
    "composition_params",
    "dist1_params",
    "dist1_protocol",
    "make_g",
    "matrix_from_function",
    "run_dist1",
    "xor_matrix",
]
