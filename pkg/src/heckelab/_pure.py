"""Pure-Python (numpy-vectorized) implementation of the hot kernels.

Two entry points, mirrored exactly by the compiled backend:

* ``materialize_b``: enumerate all upper-triangular coset representatives
  with a fixed diagonal, pruned level-by-level against reachability sets;
* ``classify_products``: multiply two batches of representatives pairwise
  and tally the p-adic canonical form of each product.

``materialize_b`` vectorizes over candidate rows with int64 arithmetic and
switches to an exact scalar scan when values could overflow;
``classify_products`` switches its matrix products to Python integers in the
same situation (canonical-form reduction is always exact).
"""

from __future__ import annotations

import itertools
from math import factorial, prod

import numpy as np

from ._exact import encode_type, hnf_reduce, smith_type
from .errors import BudgetError

BACKEND = "pure"

_INF = np.int64(1 << 40)


def int64_safe(bound: int) -> bool:
    """True if intermediates bounded by ``bound`` stay clear of int64 limits."""
    return bound < 1 << 60


def det_bound(n: int, p: int, b) -> int:
    """Upper bound for any minor determinant met while scanning diagonal ``b``."""
    mb = max(b) if len(b) else 0
    return factorial(n) * p ** (n * mb)


def _vec_valuation(arr: np.ndarray, p: int) -> np.ndarray:
    """Elementwise p-adic valuation; zeros map to a large sentinel."""
    arr = np.abs(arr)
    out = np.where(arr == 0, _INF, np.int64(0))
    live = arr != 0
    work = arr.copy()
    while True:
        div = live & (work % p == 0)
        if not div.any():
            break
        work[div] //= p
        out[div] += 1
        live = div
    return out


def _vec_det(blocks: np.ndarray) -> np.ndarray:
    """Determinants of a stack of small integer matrices, exactly in int64."""
    t = blocks.shape[1]
    if t == 1:
        return blocks[:, 0, 0].copy()
    if t == 2:
        return blocks[:, 0, 0] * blocks[:, 1, 1] - blocks[:, 0, 1] * blocks[:, 1, 0]
    out = np.zeros(blocks.shape[0], dtype=np.int64)
    cols = list(range(t))
    sign = 1
    for c in range(t):
        rest = [x for x in cols if x != c]
        sub = blocks[:, 1:, :][:, :, rest]
        out += sign * blocks[:, 0, c] * _vec_det(sub)
        sign = -sign
    return out


def _vec_type_keys(blocks: np.ndarray, p: int) -> np.ndarray:
    """Encoded cokernel-type keys for a stack of nonsingular r-by-r blocks.

    Same convention as ``_exact.encode_type``: parts sorted weakly
    decreasing, packed 6 bits per part.
    """
    m, r = blocks.shape[0], blocks.shape[1]
    if m == 0:
        return np.zeros(0, dtype=np.int64)
    dvals = np.zeros((r + 1, m), dtype=np.int64)
    idx = range(r)
    for t in range(1, r + 1):
        best = np.full(m, _INF, dtype=np.int64)
        for rows in itertools.combinations(idx, t):
            sub_rows = blocks[:, rows, :]
            for cols in itertools.combinations(idx, t):
                det = _vec_det(sub_rows[:, :, cols])
                np.minimum(best, _vec_valuation(det, p), out=best)
        dvals[t] = best
    parts = dvals[1:] - dvals[:-1]  # (r, m)
    parts = np.sort(parts, axis=0)[::-1]  # weakly decreasing down axis 0
    keys = np.zeros(m, dtype=np.int64)
    for i in range(r):
        keys |= parts[i] << np.int64(6 * i)
    return keys


def materialize_b(n: int, p: int, b, reach, budget: int) -> np.ndarray:
    """All coset representatives with diagonal valuations ``b``.

    ``reach[r]`` (for block sizes ``r = 1..n``) is the collection of encoded
    type keys a lower-right block of size ``r`` may have in some completion
    of the target type; candidates outside it are dropped level by level,
    and ``reach[n]`` pins the target type itself.  Returns an ``(N, n*n)``
    int64 array of flattened matrices sorted lexicographically.  ``budget``
    bounds the total number of candidate rows examined.
    """
    if not int64_safe(det_bound(n, p, b)):
        return _materialize_b_exact(n, p, b, reach, budget)
    reach_arrays = [None] + [np.asarray(sorted(reach[r]), dtype=np.int64) for r in range(1, n + 1)]
    mats = np.zeros((1, n, n), dtype=np.int64)
    scanned = 0
    for j in range(n - 1, -1, -1):
        dims = [p ** b[k] for k in range(j + 1, n)]
        box = prod(dims)
        s = mats.shape[0]
        scanned += s * box
        if scanned > budget:
            raise BudgetError(
                "enumeration budget exceeded",
                scanned=int(scanned),
                budget=int(budget),
            )
        if s == 0:
            return np.zeros((0, n * n), dtype=np.int64)
        cand = np.repeat(mats, box, axis=0)
        code = np.tile(np.arange(box, dtype=np.int64), s)
        for off, k in enumerate(range(j + 1, n)):
            cand[:, j, k] = code % dims[off]
            code //= dims[off]
        cand[:, j, j] = p ** b[j]
        keys = _vec_type_keys(cand[:, j:, j:], p)
        mats = cand[np.isin(keys, reach_arrays[n - j])]
    flat = mats.reshape(-1, n * n)
    if flat.shape[0] > 1:
        flat = flat[np.lexsort(flat.T[::-1])]
    return flat


def _materialize_b_exact(n: int, p: int, b, reach, budget: int) -> np.ndarray:
    """Scalar big-integer twin of ``materialize_b`` for overflow regimes."""
    reach_sets = [None] + [frozenset(reach[r]) for r in range(1, n + 1)]
    states = [tuple(tuple(0 for _ in range(n)) for _ in range(n))]
    scanned = 0
    for j in range(n - 1, -1, -1):
        dims = [p ** b[k] for k in range(j + 1, n)]
        diag = p ** b[j]
        allowed = reach_sets[n - j]
        new_states = []
        for mat in states:
            for combo in itertools.product(*(range(d) for d in dims)):
                scanned += 1
                if scanned > budget:
                    raise BudgetError(
                        "enumeration budget exceeded",
                        scanned=int(scanned),
                        budget=int(budget),
                    )
                row = [0] * n
                row[j] = diag
                row[j + 1:] = combo
                cand = mat[:j] + (tuple(row),) + mat[j + 1:]
                block = [r[j:] for r in cand[j:]]
                key = encode_type(smith_type(block, p), n - j)
                if key in allowed:
                    new_states.append(cand)
        states = new_states
    rows = sorted(tuple(x for r in mat for x in r) for mat in states)
    out = np.empty((len(rows), n * n), dtype=object)
    for i, r in enumerate(rows):
        out[i] = r
    return out


def classify_products(xs, ys, n: int, p: int, prec: int) -> dict:
    """Tally canonical forms of all pairwise products.

    ``xs`` and ``ys`` are ``(A, n*n)`` / ``(B, n*n)`` integer arrays of
    flattened representatives.  Each product is reduced to its canonical
    upper-triangular form over Z_p (modulo ``prec``) and counted.  Returns
    ``{flattened canonical tuple: count}``.
    """
    a = np.asarray(xs).reshape(-1, n, n)
    ysm = np.asarray(ys).reshape(-1, n, n)
    # Keep products exact: fall back to Python-int (object) matmul when the
    # entry bound might overflow int64.
    max_entry = max(
        int(np.max(np.abs(a.astype(object)))) if a.size else 0,
        int(np.max(np.abs(ysm.astype(object)))) if ysm.size else 0,
    )
    if not int64_safe(n * max_entry * max_entry):
        a = a.astype(object)
        ysm = ysm.astype(object)
    out: dict = {}
    for x in a:
        prods = x @ ysm
        for mat in prods:
            key = _flat_key(hnf_reduce(mat.tolist(), p, prec))
            out[key] = out.get(key, 0) + 1
    return out


def _flat_key(rows) -> tuple:
    return tuple(int(x) for row in rows for x in row)
