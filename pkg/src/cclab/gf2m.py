"""Arithmetic in GF(2^m) and power-sum set decoding.

Elements are ints below 2^m.  Small fields (m <= TABLE_LIMIT) use log/exp
tables; larger fields use a carry-less multiply (bits spread one per byte,
then one native integer product) and reduce by the sparse modulus.
Polynomials over the field are coefficient lists, lowest degree first.
"""

from __future__ import annotations

from functools import lru_cache

TABLE_LIMIT = 20


# GF(2)[x] helpers on int-encoded polynomials ---------------------------

def _pdeg(a):
    return a.bit_length() - 1


def _pmod(a, b):
    db = _pdeg(b)
    while a and _pdeg(a) >= db:
        a ^= b << (_pdeg(a) - db)
    return a


def _pmulmod(a, b, f):
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> _pdeg(f) & 1:
            a ^= f
    return out


_SPREAD = bytes.maketrans(b"01", b"\x00\x01")
_PARITY = bytes(48 + (i & 1) for i in range(256))


def _clmul(a, b):
    """Carry-less product; each byte of the spread product counts < 256 terms."""
    if not a or not b:
        return 0
    if min(a.bit_length(), b.bit_length()) > 255:
        raise ValueError("operands too wide for the byte-spread product")
    A = int.from_bytes(format(a, "b").encode().translate(_SPREAD), "big")
    B = int.from_bytes(format(b, "b").encode().translate(_SPREAD), "big")
    P = A * B
    return int(P.to_bytes((P.bit_length() + 7) // 8, "big").translate(_PARITY), 2)


def _pgcd(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return a


def is_irreducible(f):
    """Ben-Or test for a polynomial over GF(2) given as an int."""
    m = _pdeg(f)
    if m < 1:
        return False
    x = 2
    power = x
    for _ in range(m // 2):
        power = _pmulmod(power, power, f)
        if _pgcd(f, power ^ x) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_poly(m):
    """Lowest-weight (then smallest) irreducible polynomial of degree ``m``."""
    if m < 1:
        raise ValueError("field degree must be >= 1")
    top = (1 << m) | 1
    for k in range(1, m):
        if is_irreducible(top | 1 << k):
            return top | 1 << k
    for a in range(1, m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                f = top | 1 << a | 1 << b | 1 << c
                if is_irreducible(f):
                    return f
    for f in range(top, 1 << (m + 1), 2):
        if is_irreducible(f):
            return f
    raise AssertionError("no irreducible polynomial found")


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class GF2m:
    def __init__(self, m):
        self.m = m
        self.order = 1 << m
        self.poly = irreducible_poly(m)
        self._mask = self.order - 1
        self._tail = [e for e in range(m) if self.poly >> e & 1]
        self._exp = self._log = None
        if m <= TABLE_LIMIT:
            self._build_tables()

    def _build_tables(self):
        q1 = self.order - 1
        factors = _prime_factors(q1) if q1 > 1 else []
        g = 2 if self.m > 1 else 1
        while any(self._slow_pow(g, q1 // p) == 1 for p in factors):
            g += 1
        exp = [0] * (2 * q1)
        log = [0] * self.order
        v = 1
        for i in range(q1):
            exp[i] = v
            log[v] = i
            v = _pmulmod(v, g, self.poly)
        exp[q1:] = exp[:q1]
        self._exp, self._log = exp, log

    def _slow_pow(self, a, e):
        out = 1
        while e:
            if e & 1:
                out = self._reduce(_clmul(out, a))
            a = self._reduce(_clmul(a, a))
            e >>= 1
        return out

    def mul(self, a, b):
        if not a or not b:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._reduce(_clmul(a, b))

    def _reduce(self, p):
        m, mask = self.m, self._mask
        while p >> m:
            h = p >> m
            p &= mask
            for e in self._tail:
                p ^= h << e
        return p

    def sq(self, a):
        return self.mul(a, a)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        if self._exp is not None:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        # extended Euclid over GF(2)[x]
        u, v, g1, g2 = a, self.poly, 1, 0
        while u != 1:
            j = _pdeg(u) - _pdeg(v)
            if j < 0:
                u, v, g1, g2 = v, u, g2, g1
                j = -j
            u ^= v << j
            g1 ^= g2 << j
        return _pmod(g1, self.poly)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e == 0:
            return 1
        if not a:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] * e) % (self.order - 1)]
        return self._slow_pow(a, e)

    def trace(self, a):
        t, acc = a, a
        for _ in range(self.m - 1):
            t = self.sq(t)
            acc ^= t
        return acc

    def half_trace(self, c):
        """For odd m: a solution y of y^2 + y = c when trace(c) = 0."""
        if self.m % 2 == 0:
            raise ValueError("half-trace needs odd m")
        t, acc = c, c
        for _ in range((self.m - 1) // 2):
            t = self.sq(self.sq(t))
            acc ^= t
        return acc

    # polynomials over the field ---------------------------------------

    def _trim(self, p):
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        return p

    def poly_divmod(self, a, b):
        a = list(a)
        b = self._trim(list(b))
        inv_lead = self.inv(b[-1])
        db = len(b) - 1
        q = [0] * max(len(a) - db, 1)
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i]
            if c:
                c = self.mul(c, inv_lead)
                q[i - db] = c
                for j in range(db + 1):
                    a[i - db + j] ^= self.mul(c, b[j])
        return self._trim(q), self._trim(a[:db] or [0])

    def poly_mulmod(self, a, b, mod):
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] ^= self.mul(ai, bj)
        return self.poly_divmod(out, mod)[1]

    def poly_gcd(self, a, b):
        a, b = self._trim(list(a)), self._trim(list(b))
        while b != [0]:
            a, b = b, self.poly_divmod(a, b)[1]
        inv_lead = self.inv(a[-1])
        return [self.mul(c, inv_lead) for c in a]

    def roots(self, p):
        """Distinct roots of ``p`` if it splits into distinct linear factors, else None."""
        p = self._trim(list(p))
        deg = len(p) - 1
        if deg == 0:
            return [] if p[0] else None
        if deg == 1:
            return [self.div(p[0], p[1])]
        if deg == 2 and self.m % 2 == 1:
            lead = self.inv(p[2])
            b, a = self.mul(p[0], lead), self.mul(p[1], lead)
            if a == 0:
                return None
            c = self.div(b, self.sq(a))
            if self.trace(c):
                return None
            y = self.half_trace(c)
            return [self.mul(a, y), self.mul(a, y ^ 1)]
        return self._split(p, 0)

    def _poly_sq_mod(self, a, mod):
        # Frobenius: (sum c_i x^i)^2 = sum c_i^2 x^(2i)
        out = [0] * (2 * len(a) - 1)
        for i, c in enumerate(a):
            out[2 * i] = self.sq(c)
        return self.poly_divmod(out, mod)[1]

    def _split(self, p, start):
        deg = len(p) - 1
        if deg <= 2:
            return self.roots(p)
        # x^(2^i) mod p, shared by every trace polynomial Tr(beta x) mod p
        frob = [[0, 1]]
        for _ in range(self.m - 1):
            frob.append(self._poly_sq_mod(frob[-1], p))
        for j in range(start, self.m):
            acc = [0] * deg
            b = 1 << j
            for xi in frob:
                for t, c in enumerate(xi):
                    if c:
                        acc[t] ^= self.mul(b, c)
                b = self.sq(b)
            acc = self._trim(acc)
            g = self.poly_gcd(p, acc)
            dg = len(g) - 1
            if 0 < dg < deg:
                h, rem = self.poly_divmod(p, g)
                if rem != [0]:
                    return None
                left = self._split(g, j + 1)
                right = self._split(h, j + 1)
                if left is None or right is None:
                    return None
                return left + right
        return None


@lru_cache(maxsize=None)
def field(m):
    return GF2m(m)


def berlekamp_massey(F, syndromes):
    """Shortest LFSR (connection polynomial, length) generating ``syndromes``."""
    C, B = [1], [1]
    L, shift, b = 0, 1, 1
    for n, s in enumerate(syndromes):
        d = s
        for i in range(1, L + 1):
            if i < len(C) and C[i]:
                d ^= F.mul(C[i], syndromes[n - i])
        if d == 0:
            shift += 1
            continue
        coef = F.div(d, b)
        T = list(C)
        need = len(B) + shift
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            if bi:
                C[i + shift] ^= F.mul(coef, bi)
        if 2 * L <= n:
            L, B, b, shift = n + 1 - L, T, d, 1
        else:
            shift += 1
    return C, L


def odd_power_sums(F, elements, k):
    """[sum a^1, sum a^3, ..., sum a^(2k-1)] over the given field elements."""
    sums = [0] * k
    for a in elements:
        a2 = F.sq(a)
        p = a
        for j in range(k):
            sums[j] ^= p
            p = F.mul(p, a2)
    return sums


def decode_power_sums(F, odd_sums):
    """Recover a set of nonzero elements of size <= len(odd_sums) from its odd power sums.

    Returns a list of elements, or None when no such set exists.
    """
    k = len(odd_sums)
    if not any(odd_sums):
        return []
    S = [0] * (2 * k + 1)
    for j in range(k):
        S[2 * j + 1] = odd_sums[j]
    for i in range(2, 2 * k + 1, 2):
        S[i] = F.sq(S[i // 2])
    C, L = berlekamp_massey(F, S[1:])
    C = F._trim(list(C))
    if L > k or len(C) - 1 != L:
        return None
    # reversed connection polynomial has the elements as roots
    roots = F.roots(list(reversed(C + [0] * (L + 1 - len(C)))))
    if roots is None or len(roots) != L or len(set(roots)) != L or 0 in roots:
        return None
    if odd_power_sums(F, roots, k) != list(odd_sums):
        return None
    return roots
