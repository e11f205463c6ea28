"""Case generators shared by the CLI and the acceptance checks."""

from __future__ import annotations

import itertools

import numpy as np

from .bits import BitString, BlockedString, popcount, slice_enumerate


def flip_random(x, d, rng):
    pos = rng.choice(x.length, size=d, replace=False)
    return BitString(x.length, x.value ^ sum(1 << int(p) for p in pos))


def random_bits(n, rng):
    return BitString(n, int(rng.integers(0, 1 << 62)) & ((1 << n) - 1) if n <= 62 else
                     int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1))


def distance_class_case(n, d, rng):
    x = random_bits(n, rng)
    return x, flip_random(x, d, rng)


def signature_case(signature, rows, row_bits, rng):
    """Random blocked pair whose distance signature is ``signature`` (a tuple of distances)."""
    x = [random_bits(row_bits, rng) for _ in range(rows)]
    y = list(x)
    where = rng.choice(rows, size=len(signature), replace=False)
    for i, d in zip(where, signature):
        y[int(i)] = flip_random(x[int(i)], d, rng)
    return BlockedString(x), BlockedString(y)


def blocked_delta_case(blocks, block_bits, delta, rng):
    """Random blocked pair with exactly ``delta`` unequal blocks."""
    sig = tuple(int(rng.integers(1, block_bits + 1)) for _ in range(delta))
    return signature_case(sig, blocks, block_bits, rng)


def two_row_batches(rows, row_bits, fill="all", group=1):
    """All (X, Y) with exactly two unequal rows, as uint64 arrays of shape (B, rows).

    ``fill='all'`` ranges the equal rows over every value; ``fill='zero'``
    fixes them to 0.  Yields one batch per (row pair, ``group`` equal-row fillings).
    """
    q = 1 << row_bits
    a, b = np.meshgrid(np.arange(q, dtype=np.uint64), np.arange(q, dtype=np.uint64), indexing="ij")
    mask = a != b
    a, b = a[mask], b[mask]
    ai, aj = (v.ravel() for v in np.meshgrid(a, a, indexing="ij"))
    bi, bj = (v.ravel() for v in np.meshgrid(b, b, indexing="ij"))
    size = ai.size
    for i, j in itertools.combinations(range(rows), 2):
        others = [t for t in range(rows) if t not in (i, j)]
        fills = list(itertools.product(range(q), repeat=len(others))) if fill == "all" else [(0,) * len(others)]
        for start in range(0, len(fills), group):
            chunk = fills[start:start + group]
            X = np.zeros((len(chunk), size, rows), dtype=np.uint64)
            for c, vals in enumerate(chunk):
                for t, v in zip(others, vals):
                    X[c, :, t] = v
            Y = X.copy()
            X[:, :, i], X[:, :, j] = ai, aj
            Y[:, :, i], Y[:, :, j] = bi, bj
            yield X.reshape(-1, rows), Y.reshape(-1, rows)


def slice_pairs_by_distance(n2, w):
    """Dict d -> (A, B) arrays of all ordered slice pairs at distance d."""
    elems = np.array([x.value for x in slice_enumerate(n2, w)], dtype=np.uint64)
    A, B = np.meshgrid(elems, elems, indexing="ij")
    A, B = A.ravel(), B.ravel()
    D = popcount(A ^ B).astype(np.int64)
    return elems, {int(d): (A[D == d], B[D == d]) for d in np.unique(D)}


def two_row_slice_batches(rows, n2, total, fill_value=None):
    """Every slice input with exactly two unequal rows and total distance ``total``.

    Equal rows take ``fill_value`` (default: the first slice element); no
    query of the oracle protocols depends on them beyond being equal.
    Yields (X, Y, (d_i, d_j)) batches.
    """
    elems, pairs = slice_pairs_by_distance(n2, n2 // 2)
    fill = elems[0] if fill_value is None else np.uint64(fill_value)
    for di in sorted(pairs):
        dj = total - di
        if di == 0 or dj <= 0 or dj not in pairs:
            continue
        Ai, Bi = pairs[di]
        Aj, Bj = pairs[dj]
        ii, jj = (v.ravel() for v in np.meshgrid(np.arange(Ai.size), np.arange(Aj.size), indexing="ij"))
        for i, j in itertools.combinations(range(rows), 2):
            X = np.full((ii.size, rows), fill, dtype=np.uint64)
            Y = X.copy()
            X[:, i], Y[:, i] = Ai[ii], Bi[ii]
            X[:, j], Y[:, j] = Aj[jj], Bj[jj]
            yield X, Y, (di, dj)


def signature_of_arrays(X, Y):
    """Sorted nonzero row distances per case, as a tuple of tuples."""
    D = popcount(np.asarray(X, dtype=np.uint64) ^ np.asarray(Y, dtype=np.uint64)).astype(np.int64)
    return [tuple(sorted(int(v) for v in row if v)) for row in D]
