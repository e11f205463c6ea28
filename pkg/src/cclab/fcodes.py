"""f-codes: constructors, verification, sparsification, Delta decomposition,
sunflower utilities and a small exhaustive search.

A code maps a domain of BitStrings (the cube, a Hamming slice, or the
weight-k strings) to codewords of a common length ``m``.  Codewords are
ints used as bitsets: bit j set means coordinate j is 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bits import SLICE_GUARD, BitString, CapacityError, SetFamily, popcount, slice_enumerate

DOMAIN_GUARD = 10_000
INDICATOR_GUARD = 16
SEARCH_M_GUARD = 16


class NotSunflower:
    def __repr__(self):
        return "NOT_SUNFLOWER"


NOT_SUNFLOWER = NotSunflower()


# Partial functions ----------------------------------------------------------

class PartialF:
    """A finite partial function on nonnegative integers."""

    def __init__(self, values):
        self.values = {int(d): int(v) for d, v in dict(values).items()}
        if any(d < 0 or v < 0 for d, v in self.values.items()):
            raise ValueError("partial functions map naturals to naturals")

    @property
    def domain(self):
        return frozenset(self.values)

    def __call__(self, d):
        if d not in self.values:
            raise KeyError(f"{d} is outside dom(f) = {sorted(self.values)}")
        return self.values[d]

    def __contains__(self, d):
        return d in self.values

    def __eq__(self, other):
        return isinstance(other, PartialF) and self.values == other.values

    def __repr__(self):
        return f"PartialF({self})"

    def __str__(self):
        return ",".join(f"{d}:{v}" for d, v in sorted(self.values.items()))

    @classmethod
    def parse(cls, text):
        values = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            d, _, v = part.partition(":")
            if not _:
                raise ValueError(f"bad PartialF item {part!r}; expected d:value")
            values[int(d)] = int(v)
        return cls(values)

    def restrict(self, ds):
        return PartialF({d: v for d, v in self.values.items() if d in set(ds)})

    def is_affine(self, a=2, b=4, c=6):
        return 2 * self(b) == self(a) + self(c)


# Domains ----------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """``kind`` is 'cube' (length bits) or 'weight' (length bits of fixed weight)."""

    kind: str
    length: int
    weight: int | None = None

    @classmethod
    def make(cls, kind, n, k=None):
        if kind == "cube":
            return cls("cube", n)
        if kind == "slice":
            return cls("weight", 2 * n, n)
        if kind in ("weight-k", "weight"):
            if k is None:
                raise ValueError("weight-k domains need k")
            return cls("weight", n, k)
        raise ValueError(f"unknown domain kind {kind!r}")

    @property
    def size(self):
        if self.kind == "cube":
            return 1 << self.length
        return math.comb(self.length, self.weight)

    def elements(self):
        if self.size > DOMAIN_GUARD:
            raise CapacityError(f"domain of {self.size} strings exceeds the guard {DOMAIN_GUARD}")
        if self.kind == "cube":
            return [BitString(self.length, v) for v in range(1 << self.length)]
        if self.length > SLICE_GUARD:
            raise CapacityError("slice length over guard")
        return sorted(slice_enumerate(self.length, self.weight), key=lambda b: (b.weight, str(b)))

    def distances(self):
        """Distances realised by some pair of domain elements."""
        if self.kind == "cube":
            return list(range(self.length + 1))
        w = self.weight
        return [2 * t for t in range(min(w, self.length - w) + 1)]

    def contains(self, x):
        if x.length != self.length:
            return False
        return self.kind == "cube" or x.weight == self.weight

    def rank(self, x):
        """Bijection from the domain onto range(size)."""
        if self.kind == "cube":
            return x.value
        out, i = 0, 0
        for p in range(self.length):
            if x.value >> p & 1:
                i += 1
                out += math.comb(p, i)
        return out


# Codes ----------------------------------------------------------------------

class Code:
    """Encoding E on a domain, with codewords of length ``m``.

    Either ``words`` (aligned with ``elements``) or an ``encoder`` is given;
    encoders are evaluated lazily so huge domains can be sampled.
    """

    def __init__(self, domain, m, encoder=None, elements=None, words=None, name="code", f=None):
        self.dom = domain
        self.n = domain.length
        self.m = m
        self.name = name
        self.f = f
        self._encoder = encoder
        self._elements = list(elements) if elements is not None else None
        self._cache = {}
        if words is not None:
            if self._elements is None:
                raise ValueError("explicit words need explicit elements")
            if len(words) != len(self._elements):
                raise ValueError("one codeword per domain element")
            for x, w in zip(self._elements, words):
                if w >> m:
                    raise ValueError(f"codeword for {x} exceeds length {m}")
                self._cache[x.value] = int(w)
            if len({x.value for x in self._elements}) != len(self._elements):
                raise ValueError("duplicate domain elements")

    @property
    def domain(self):
        if self._elements is None:
            self._elements = self.dom.elements()
        return self._elements

    def encode(self, x):
        if x.value in self._cache:
            return self._cache[x.value]
        if self._encoder is None or not self.dom.contains(x):
            raise KeyError(f"{x} is outside the code domain")
        w = self._encoder(x)
        self._cache[x.value] = w
        return w

    def __call__(self, x):
        return self.encode(x)

    def codeword(self, x):
        return BitString(self.m, self.encode(x)) if self.m else None

    def items(self):
        return [(x, self.encode(x)) for x in self.domain]

    @cached_property
    def limbs(self):
        return _limbs([self.encode(x) for x in self.domain], self.m)

    def weights(self):
        return {self.encode(x).bit_count() for x in self.domain}

    def __repr__(self):
        return f"Code({self.name}, n={self.n}, m={self.m}, |domain|={self.dom.size})"


@dataclass
class TwoPlayerCode:
    first: Code
    second: Code
    f: PartialF | None = None

    def __post_init__(self):
        if self.first.dom != self.second.dom or self.first.m != self.second.m:
            raise ValueError("two-player codes need a common domain and length")

    @property
    def dom(self):
        return self.first.dom

    @property
    def n(self):
        return self.first.n

    @property
    def m(self):
        return self.first.m

    @property
    def domain(self):
        return self.first.domain


def _limbs(values, m):
    W = max(1, (m + 63) // 64)
    out = np.zeros((len(values), W), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(values):
        for w in range(W):
            out[i, w] = (v >> (64 * w)) & mask
    return out


def _pair_distances(A, B):
    """All pairwise Hamming distances between limb arrays A (p, W) and B (q, W)."""
    out = np.zeros((A.shape[0], B.shape[0]), dtype=np.int64)
    for w in range(A.shape[1]):
        out += popcount(A[:, None, w] ^ B[None, :, w]).astype(np.int64)
    return out


def _domain_limbs(code):
    return _limbs([x.value for x in code.domain], code.n)


# Verification -----------------------------------------------------------

def verify_fcode(code, f, limit=None):
    """Exhaustive f-code check; returns the list of violations (x, y, dist, expected, got).

    Single-player codes are checked on unordered pairs x != y (and x = y when
    0 is in dom f); two-player codes on all ordered pairs, including x = y.
    """
    if code.dom.size > DOMAIN_GUARD:
        raise CapacityError(f"domain of {code.dom.size} strings exceeds the guard {DOMAIN_GUARD}")
    if not isinstance(f, PartialF):
        f = PartialF(f)
    first, second = (code.first, code.second) if isinstance(code, TwoPlayerCode) else (code, code)
    two = isinstance(code, TwoPlayerCode)
    elements = first.domain
    din = _pair_distances(_domain_limbs(first), _domain_limbs(first))
    dout = _pair_distances(first.limbs, second.limbs)
    expected = np.full(din.shape, -1, dtype=np.int64)
    for d, v in f.values.items():
        expected[din == d] = v
    bad = (expected >= 0) & (expected != dout)
    if not two:
        bad = np.triu(bad)
    out = []
    for i, j in zip(*np.nonzero(bad)):
        out.append((elements[i], elements[j], int(din[i, j]), int(expected[i, j]), int(dout[i, j])))
        if limit is not None and len(out) >= limit:
            break
    return out


def code_f_values(code, ds):
    """The distance-transfer values of ``code`` on ``ds`` if well defined, else None."""
    first, second = (code.first, code.second) if isinstance(code, TwoPlayerCode) else (code, code)
    din = _pair_distances(_domain_limbs(first), _domain_limbs(first))
    dout = _pair_distances(first.limbs, second.limbs)
    out = {}
    for d in ds:
        vals = np.unique(dout[din == d])
        if len(vals) != 1:
            return None
        out[d] = int(vals[0])
    return out


def induced_function(code):
    """Total transfer function on the realised distances, or None if not uniform."""
    return code_f_values(code, code.dom.distances())


def triangle_violations(code, f2=None):
    """Pairs breaking dist(E(x),E(y)) <= f(2)/2 * dist(x,y) (two-player: + 2 f(0))."""
    two = isinstance(code, TwoPlayerCode)
    first = code.first if two else code
    vals = code_f_values(code, (0, 2)) if f2 is None else None
    if f2 is None:
        if vals is None:
            raise ValueError("code is not an f-code on {0, 2}")
        f2, f0 = vals[2], vals[0]
    else:
        f0 = 0
    din = _pair_distances(_domain_limbs(first), _domain_limbs(first))
    mats = [_pair_distances(first.limbs, first.limbs)]
    if two:
        mats += [_pair_distances(first.limbs, code.second.limbs), _pair_distances(code.second.limbs, code.second.limbs)]
    bound = (2 * f0 if two else 0) * 2 + f2 * din  # doubled to stay in integers
    out = []
    for M in mats:
        for i, j in zip(*np.nonzero(2 * M > bound)):
            out.append((first.domain[i], first.domain[j], int(din[i, j]), int(M[i, j])))
    return out


# Constructors ------------------------------------------------------------

def _indicator_width(domain):
    if domain.kind == "cube" and domain.length > INDICATOR_GUARD:
        raise CapacityError(f"indicator code guarded to n <= {INDICATOR_GUARD}")
    if domain.size > (1 << INDICATOR_GUARD):
        raise CapacityError("indicator domain too large")
    return domain.size


def _repeat(x, alpha):
    out = 0
    for t in range(alpha):
        out |= x.value << (t * x.length)
    return out


def merged_partition(elements, min_sep):
    """Greedy partition: each string joins the first part whose members are all at distance > min_sep."""
    parts = []
    index = {}
    for x in sorted(elements, key=lambda b: str(b)):
        for p, members in enumerate(parts):
            if all((x.value ^ y.value).bit_count() > min_sep for y in members):
                members.append(x)
                index[x.value] = p
                break
        else:
            index[x.value] = len(parts)
            parts.append([x])
    return parts, index


def declared_f(kind, domain, alpha=1, beta=1, min_sep=6):
    ds = domain.distances()
    if kind == "repetition":
        return PartialF({d: alpha * d for d in ds})
    if kind == "indicator":
        return PartialF({d: 0 if d == 0 else 2 for d in ds})
    if kind == "merged_indicator":
        return PartialF({d: 0 if d == 0 else 2 for d in ds if d <= min_sep})
    if kind == "parity":
        return PartialF({d: d % 2 for d in ds})
    if kind == "product_slice":
        w = domain.weight
        return PartialF({d: 2 * w * d - d * d // 2 for d in ds})
    if kind == "affine":
        return PartialF({d: 0 if d == 0 else alpha * d + 2 * beta for d in ds})
    raise ValueError(f"unknown code kind {kind!r}")


def make_code(kind, n, *, alpha=2, beta=1, min_sep=6, domain=None, k=None, verify=True):
    """Build one of the example codes and (by default) verify its declared f exhaustively.

    Default domains: the slice C(2n, n) for product_slice and affine, the cube
    {0,1}^n otherwise.  ``domain='weight-k'`` uses weight-k strings of length n.
    """
    if domain is None:
        domain = "slice" if kind in ("product_slice", "affine") else "cube"
    dom = domain if isinstance(domain, Domain) else Domain.make(domain, n, k)
    L = dom.length
    if kind == "repetition":
        m, enc = alpha * L, lambda x: _repeat(x, alpha)
    elif kind == "indicator":
        m = _indicator_width(dom)
        enc = lambda x: 1 << dom.rank(x)  # noqa: E731
    elif kind == "merged_indicator":
        parts, index = merged_partition(dom.elements(), min_sep)
        m = len(parts)
        enc = lambda x: 1 << index[x.value]  # noqa: E731
    elif kind == "parity":
        m, enc = 1, lambda x: x.weight & 1
    elif kind == "product_slice":
        if dom.kind != "weight":
            raise ValueError("product codes live on fixed-weight domains")
        m = L * L

        def enc(x):
            pos = sorted(x.positions())
            return sum(1 << (i * L + j) for i in pos for j in pos)
    elif kind == "affine":
        width = _indicator_width(dom)
        m = alpha * L + beta * width

        def enc(x):
            out = _repeat(x, alpha)
            r = dom.rank(x)
            for b in range(beta):
                out |= 1 << (alpha * L + b * width + r)
            return out
    else:
        raise ValueError(f"unknown code kind {kind!r}")
    f = declared_f(kind, dom, alpha, beta, min_sep)
    code = Code(dom, m, enc, name=kind, f=f)
    if verify:
        bad = verify_fcode(code, f, limit=5)
        if bad:
            raise ValueError(f"{kind} code fails its declared f: {bad}")
    return code


def explicit_code(n, m, pairs, name="explicit"):
    """Code from explicit (BitString, codeword int) pairs on an arbitrary domain subset."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("empty domain")
    elements = [x for x, _ in pairs]
    weights = {x.weight for x in elements}
    if len(weights) == 1 and len(elements) == math.comb(n, next(iter(weights))):
        dom = Domain("weight", n, next(iter(weights)))
    elif len(elements) == 1 << n:
        dom = Domain("cube", n)
    else:
        dom = Domain("subset", n)
    return Code(dom, m, elements=elements, words=[w for _, w in pairs], name=name)


# Sparsification ------------------------------------------------------------

@dataclass
class SparsifyResult:
    code: Code
    weight: int
    bound: int


def sparsify(source, k):
    """Restrict a slice code to weight-k strings and shift so one codeword is 0.

    Source domain is C([2N], N).  F'(x) = F(x + tail) with tail the last N-k
    coordinates; E(x) = F'(x) xor F'([k]) on weight-k subsets of [N] minus [k],
    relabelled to [n] with n = N - k.  All outputs must share a weight
    r <= f(2) * k.
    """
    dom = source.dom
    if dom.kind != "weight" or dom.length != 2 * dom.weight:
        raise ValueError("sparsify needs a code on the slice C(2N, N)")
    N = dom.weight
    n = N - k
    if n < k:
        raise ValueError(f"need N - k >= k, got N={N}, k={k}")
    tail = sum(1 << p for p in range(N + k, 2 * N))
    vals = code_f_values(source, (2,)) if source.dom.size <= DOMAIN_GUARD else None
    f2 = source.f(2) if source.f is not None and 2 in source.f else (vals or {}).get(2)
    if f2 is None:
        raise ValueError("source code has no f(2)")

    def lift(x):
        return BitString(2 * N, x | tail)

    base = source.encode(lift((1 << k) - 1))

    def enc(x):
        return source.encode(lift(x.value << k)) ^ base

    out_dom = Domain("weight", n, k)
    code = Code(out_dom, source.m, enc, name=f"sparse({source.name},k={k})")
    weights = code.weights()
    if len(weights) != 1:
        raise ValueError(f"sparsified code is not constant weight: {sorted(weights)}; source is not an extended f-code")
    r = weights.pop()
    if r > f2 * k:
        raise ValueError(f"weight {r} exceeds f(2)*k = {f2 * k}; source is not an extended f-code")
    return SparsifyResult(code, r, f2 * k)


# Delta decomposition -----------------------------------------------------

@dataclass
class DeltaDecomposition:
    n: int
    k: int
    E: dict  # subset mask -> coordinate bitset E_l(y)
    Delta: dict  # subset mask -> coordinate bitset

    def by_level(self, table):
        out = {}
        for y, v in table.items():
            out.setdefault(y.bit_count(), []).append(v.bit_count())
        return out

    def delta_sizes(self):
        """Level -> sorted set of |Delta(y)|; a singleton means delta_l is well defined."""
        return {lvl: sorted(set(v)) for lvl, v in sorted(self.by_level(self.Delta).items())}

    def gamma_sizes(self):
        return {lvl: sorted(set(v)) for lvl, v in sorted(self.by_level(self.E).items())}

    def deltas(self):
        out = {}
        for lvl, sizes in self.delta_sizes().items():
            out[lvl] = sizes[0] if len(sizes) == 1 else None
        return out

    def disjointness_violations(self):
        owner = {}
        bad = []
        for y in sorted(self.Delta):
            v = self.Delta[y]
            while v:
                low = v & -v
                c = low.bit_length() - 1
                if c in owner:
                    bad.append((owner[c], y, c))
                else:
                    owner[c] = y
                v ^= low
        return bad

    def union_violations(self):
        """Weight-k x where E(x) != Delta(x) + Delta(empty) + union of Delta({i}) as a disjoint union."""
        bad = []
        for x, word in self.E.items():
            if x.bit_count() != self.k:
                continue
            parts = [self.Delta[x], self.Delta[0]] + [self.Delta[1 << i] for i in range(self.n) if x >> i & 1]
            total = 0
            size = 0
            for p in parts:
                total |= p
                size += p.bit_count()
            if total != word or size != word.bit_count():
                bad.append(x)
        return bad

    def monotonicity_violations(self):
        bad = []
        for y, v in self.E.items():
            for i in range(self.n):
                if not y >> i & 1 and (y | 1 << i) in self.E:
                    if v & ~self.E[y | 1 << i]:
                        bad.append((y, y | 1 << i))
        return bad

    def component(self, y):
        return self.E[y]


def delta_decompose(code, k):
    """E_l(y) as the intersection of E over weight-k supersets, and its new layer Delta_E(y)."""
    dom = code.dom
    if dom.kind != "weight" or dom.weight != k:
        raise ValueError("delta_decompose needs a code on weight-k strings")
    n = dom.length
    if n > 14 or k > 5:
        raise CapacityError("delta_decompose is guarded to n <= 14, k <= 5")
    E = {x.value: w for x, w in code.items()}
    level = dict(E)
    for ell in range(k - 1, -1, -1):
        nxt = {}
        for combo in itertools.combinations(range(n), ell):
            y = sum(1 << i for i in combo)
            acc = None
            for i in range(n):
                if not y >> i & 1:
                    v = level[y | 1 << i]
                    acc = v if acc is None else acc & v
            nxt[y] = acc if acc is not None else 0
        E.update(nxt)
        level = nxt
    Delta = {}
    for y, v in E.items():
        cover = 0
        for i in range(n):
            if y >> i & 1:
                cover |= E[y ^ (1 << i)]
        Delta[y] = v & ~cover
    return DeltaDecomposition(n, k, E, Delta)


# Sunflowers ---------------------------------------------------------------

def sunflower_check(family):
    """Common pairwise intersection of the family, or NOT_SUNFLOWER."""
    sets = [frozenset(s) for s in family]
    if not sets:
        return frozenset()
    if len(sets) == 1:
        return sets[0]
    kernel = sets[0] & sets[1]
    for a, b in itertools.combinations(sets, 2):
        if a & b != kernel:
            return NOT_SUNFLOWER
    return kernel


def _bitset_to_set(v):
    return frozenset(i for i in range(v.bit_length()) if v >> i & 1)


def _mask(s):
    return sum(1 << i for i in s)


@dataclass
class ImageSunflowerReport:
    family: list
    kernel: frozenset
    image_kernel: object
    expected_kernel: frozenset
    ok: bool


_DECOMP_CACHE = {}


def _decomposition(code):
    key = id(code)
    if key not in _DECOMP_CACHE:
        _DECOMP_CACHE[key] = (code, delta_decompose(code, code.dom.weight))
    return _DECOMP_CACHE[key][1]


def image_sunflower_check(code, family):
    """Map a sunflower of sets (size <= k) through E_l and compare the kernel with E_l'(kernel)."""
    sets = [frozenset(s) for s in family]
    kernel = sunflower_check(sets)
    if kernel is NOT_SUNFLOWER:
        raise ValueError("source family is not a sunflower")
    dec = _decomposition(code)
    images = [_bitset_to_set(dec.component(_mask(s))) for s in sets]
    image_kernel = sunflower_check(images)
    expected = _bitset_to_set(dec.component(_mask(kernel)))
    return ImageSunflowerReport(sets, kernel, image_kernel, expected, image_kernel == expected)


def random_sunflower(n, ell, kernel_size, petals, rng):
    if kernel_size > ell or kernel_size + petals * (ell - kernel_size) > n:
        raise ValueError("sunflower does not fit in the ground set")
    perm = [int(v) for v in rng.permutation(n)]
    kernel = perm[:kernel_size]
    rest = perm[kernel_size:]
    width = ell - kernel_size
    return [frozenset(kernel + rest[p * width:(p + 1) * width]) for p in range(petals)]


def equidistant_families(n, k, size):
    """All families of ``size`` k-subsets of [n] with one common pairwise distance."""
    sets = [frozenset(c) for c in itertools.combinations(range(n), k)]
    found = []
    for s in range(k):
        adj = [[j for j in range(len(sets)) if j != i and len(sets[i] & sets[j]) == s] for i in range(len(sets))]
        adj_sets = [set(a) for a in adj]

        def extend(clique, cands):
            if len(clique) == size:
                found.append(SetFamily(n, [sets[i] for i in clique]))
                return
            for idx, j in enumerate(cands):
                if len(clique) + len(cands) - idx < size:
                    return
                extend(clique + [j], [c for c in cands[idx + 1:] if c in adj_sets[j]])

        for i in range(len(sets)):
            extend([i], [j for j in adj[i] if j > i])
    return found


# Search ---------------------------------------------------------------------

@dataclass
class SearchResult:
    codes: list
    exhausted: bool
    nodes: int
    reason: str = ""
    log: list = field(default_factory=list)


def _distance_triples(elements):
    x0 = elements[0]
    out = set()
    for y, z in itertools.combinations(elements[1:], 2):
        out.add((
            (x0.value ^ y.value).bit_count(),
            (x0.value ^ z.value).bit_count(),
            (y.value ^ z.value).bit_count(),
        ))
    return out


def prefilter(f, domain, m):
    """Analytic reasons why no f-code can exist, or None."""
    ds = set(domain.distances())
    live = {d: v for d, v in f.values.items() if d in ds}
    if 0 in live and live[0] != 0:
        return "f(0) must be 0 for a single-player code"
    if any(v > m for v in live.values()):
        return f"some f(d) exceeds the codeword length m={m}"
    if domain.kind == "weight" and 2 in live:
        for d, v in live.items():
            if 2 * v > live[2] * d:
                return f"slice triangle bound: f({d})={v} > f(2)/2*{d}"
    elements = domain.elements()
    for a, b, c in _distance_triples(elements):
        if a in live and b in live and c in live:
            fa, fb, fc = live[a], live[b], live[c]
            if fa > fb + fc or fb > fa + fc or fc > fa + fb:
                return f"triangle inequality fails on distances ({a},{b},{c})"
            if (fa + fb + fc) % 2:
                return f"parity fails on distances ({a},{b},{c})"
    return None


def search_fcodes(n, m, f, domain_kind="cube", budget=1_000_000, k=None, max_solutions=100, symmetry=True):
    """Backtracking search for f-codes from the domain into {0,1}^m.

    ``exhausted`` is True when the whole search space was explored (so an
    empty result certifies non-existence at this (n, m)).  With ``symmetry``
    the first element maps to 0 and the second to a prefix of ones, which
    loses nothing up to translation and coordinate permutation.
    """
    if not isinstance(f, PartialF):
        f = PartialF(f)
    dom = domain_kind if isinstance(domain_kind, Domain) else Domain.make(domain_kind, n, k)
    if m > SEARCH_M_GUARD:
        raise CapacityError(f"search is guarded to m <= {SEARCH_M_GUARD}")
    if m == 0:
        live = [v for d, v in f.values.items() if d in set(dom.distances()) and d != 0]
        if any(live):
            return SearchResult([], True, 0, "m=0 with nonzero f")
    reason = prefilter(f, dom, m)
    if reason:
        return SearchResult([], True, 0, reason, [reason])
    elements = dom.elements()
    N = len(elements)
    words = np.arange(1 << m, dtype=np.uint64)
    weight_of = popcount(words).astype(np.int64)
    dist = [[(a.value ^ b.value).bit_count() for b in elements] for a in elements]
    codes = []
    nodes = 0
    state = {"truncated": False}
    assignment = [0] * N

    def assign(i, cands):
        nonlocal nodes
        if state["truncated"]:
            return
        if i == N:
            codes.append(explicit_code(dom.length, m, zip(elements, list(assignment)), name="found"))
            if len(codes) >= max_solutions:
                state["truncated"] = True
            return
        options = np.flatnonzero(cands[i])
        if symmetry and i == 0:
            options = options[options == 0]
        elif symmetry and i == 1:
            options = np.array([(1 << t) - 1 for t in range(m + 1) if cands[i][(1 << t) - 1]], dtype=np.int64)
        for c in options:
            nodes += 1
            if nodes > budget:
                state["truncated"] = True
                return
            c = int(c)
            assignment[i] = c
            nxt = list(cands)
            ok = True
            for j in range(i + 1, N):
                d = dist[i][j]
                if d in f:
                    nxt[j] = cands[j] & (weight_of[words ^ np.uint64(c)] == f(d))
                    if not nxt[j].any():
                        ok = False
                        break
            if ok:
                assign(i + 1, nxt)
            if state["truncated"]:
                return

    assign(0, [np.ones(1 << m, dtype=bool)] * N)
    for code in codes:
        if verify_fcode(code, f, limit=1):
            raise AssertionError("search produced an invalid code")
    exhausted = not state["truncated"]
    reason = "complete" if exhausted else ("budget exceeded" if nodes > budget else "solution limit reached")
    return SearchResult(codes, exhausted, nodes, reason, [f"nodes={nodes}", reason])


def equivalent_codes(a, b):
    """True if b = pi(a) xor t for a coordinate permutation pi and translation t (m <= 8)."""
    if a.m != b.m or [x.value for x in a.domain] != [x.value for x in b.domain]:
        return False
    if a.m > 8:
        raise CapacityError("equivalence check enumerates m! permutations; m <= 8")
    wa = [a.encode(x) for x in a.domain]
    wb = [b.encode(x) for x in b.domain]
    for perm in itertools.permutations(range(a.m)):
        pw = [sum(1 << perm[i] for i in range(a.m) if w >> i & 1) for w in wa]
        t = pw[0] ^ wb[0]
        if all(p ^ t == q for p, q in zip(pw, wb)):
            return True
    return False


# Shipped fixtures -----------------------------------------------------------

def shipped_codes(n=10, k=3):
    """Codes on weight-k strings used by the sunflower checks."""
    return {
        "repetition": make_code("repetition", n, alpha=2, domain="weight-k", k=k),
        "indicator": make_code("indicator", n, domain="weight-k", k=k),
        "affine(2,1)": make_code("affine", n, alpha=2, beta=1, domain="weight-k", k=k),
        "product": make_code("product_slice", n, domain="weight-k", k=k),
    }
