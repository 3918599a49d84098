"""Exact integer arithmetic for lattice and coset combinatorics.

Everything here works on small matrices over the integers with arbitrary
precision, independent of the selected kernel backend.  The hot, bulk
enumeration loops live in the kernel modules; this module provides the exact
bookkeeping around them:

* p-adic valuations, bounded partitions, Gaussian binomial coefficients;
* Smith normal form types of nonsingular integer matrices (via gcds of
  minors, read off through p-adic valuations);
* the row-extension transition counts ``T(mu, b; nu)``: how many new top rows
  with diagonal valuation ``b`` extend an upper-triangular block of cokernel
  type ``mu`` to one of cokernel type ``nu``;
* per-diagonal coset counts derived from those transitions, plus the
  forward/backward tables used to prune explicit enumeration.

Conventions: matrices are upper triangular with diagonal entries ``p**b[j]``
and the entry in row ``i``, column ``j`` (``i < j``) reduced modulo
``p**b[j]``.  A "type" is the partition of elementary-divisor exponents of
the cokernel, sorted in weakly decreasing order with zero parts dropped.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import prod

__all__ = [
    "valuation",
    "strip_zeros",
    "partitions_bounded",
    "gaussian_binomial",
    "conjugate_partition",
    "closed_form_coset_count",
    "integer_det",
    "smith_type",
    "transitions",
    "diagonal_profiles",
    "level_tables",
    "count_by_diagonal",
    "total_count",
    "hnf_reduce",
    "encode_type",
]


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def strip_zeros(parts) -> tuple:
    """Sort parts weakly decreasing and drop zero entries."""
    return tuple(sorted((a for a in parts if a), reverse=True))


def partitions_bounded(total: int, max_parts: int, max_part: int):
    """Yield all partitions of ``total`` into at most ``max_parts`` parts,
    each part at most ``max_part``, as weakly decreasing tuples."""
    if total == 0:
        yield ()
        return
    if max_parts <= 0 or max_part <= 0:
        return

    def rec(remaining, parts_left, cap):
        if remaining == 0:
            yield ()
            return
        if parts_left == 0:
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, parts_left - 1, first):
                yield (first,) + rest

    yield from rec(total, max_parts, max_part)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Gaussian binomial coefficient [n choose k]_q (an integer for integer q)."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def conjugate_partition(parts) -> tuple:
    parts = strip_zeros(parts)
    if not parts:
        return ()
    return tuple(sum(1 for a in parts if a > i) for i in range(parts[0]))


def closed_form_coset_count(parts, n: int, p: int) -> int:
    """Number of sublattices of Z_p**n with cokernel type ``parts``.

    Product formula over the conjugate partition: with ``c`` the conjugate of
    ``parts`` padded by ``c[len(c)] = 0``, the count is
    ``prod_i p**(c[i+1] * (n - c[i])) * [n - c[i+1] choose c[i] - c[i+1]]_p``.
    Used as an independent cross-check against the transition-based count.
    """
    c = list(conjugate_partition(parts))
    if c and c[0] > n:
        return 0
    c = c + [0]
    out = 1
    for i in range(len(c) - 1):
        a, b = c[i], c[i + 1]
        out *= p ** (b * (n - a)) * gaussian_binomial(n - b, a - b, p)
    return out


def integer_det(mat) -> int:
    """Exact determinant of a small square integer matrix (Laplace expansion)."""
    k = len(mat)
    if k == 0:
        return 1
    if k == 1:
        return mat[0][0]
    if k == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    out = 0
    sign = 1
    for c in range(k):
        a = mat[0][c]
        if a:
            minor = [[row[j] for j in range(k) if j != c] for row in mat[1:]]
            out += sign * a * integer_det(minor)
        sign = -sign
    return out


def smith_type(mat, p: int) -> tuple:
    """Cokernel type of a nonsingular integer matrix at the prime ``p``.

    Computed from the p-adic valuations of the gcds of t-by-t minors: if
    ``d_t`` is the minimum valuation over all t-by-t minors, the elementary
    divisor exponents are the successive differences ``d_t - d_{t-1}``.
    Returns the exponents as a weakly decreasing tuple with zeros dropped.
    """
    k = len(mat)
    dvals = [0]
    idx = range(k)
    for t in range(1, k + 1):
        best = None
        for rows in itertools.combinations(idx, t):
            for cols in itertools.combinations(idx, t):
                d = integer_det([[mat[r][c] for c in cols] for r in rows])
                if d:
                    v = valuation(d, p)
                    if best is None or v < best:
                        best = v
                    if best == dvals[-1]:
                        break
            if best == dvals[-1]:
                break
        if best is None:
            raise ValueError("matrix is singular")
        dvals.append(best)
    exps = [dvals[t] - dvals[t - 1] for t in range(1, k + 1)]
    return strip_zeros(exps)


@lru_cache(maxsize=None)
def transitions(mu: tuple, b: int, p: int) -> dict:
    """Count row extensions by resulting cokernel type.

    ``mu`` is the cokernel type of an r-by-r upper-triangular block; a new
    top row with diagonal entry ``p**b`` and free entries ``q_i`` ranging
    over ``Z/p**mu_i`` (the cokernel in its elementary-divisor basis) is
    appended.  The resulting type depends only on the valuation pattern of
    the ``q_i``, so patterns are enumerated directly with multiplicity
    ``p**(mu_i - v) - p**(mu_i - v - 1)`` for a finite valuation ``v`` and
    ``1`` for ``q_i = 0``.  Returns ``{nu: count}``.
    """
    mu = strip_zeros(mu)
    out: dict = {}
    choices = [list(range(m)) + [None] for m in mu]
    for pattern in itertools.product(*choices):
        weight = 1
        for m, v in zip(mu, pattern):
            if v is not None:
                weight *= p ** (m - v) - p ** (m - v - 1)
        top = [p**b] + [0 if v is None else p**v for v in pattern]
        size = len(mu) + 1
        rel = [top]
        for i, m in enumerate(mu):
            row = [0] * size
            row[i + 1] = p**m
            rel.append(row)
        nu = smith_type(rel, p)
        out[nu] = out.get(nu, 0) + weight
    return out


def diagonal_profiles(parts, n: int):
    """All candidate diagonal-valuation vectors for cokernel type ``parts``.

    Yields every composition ``b`` of ``sum(parts)`` into ``n`` slots with
    each entry at most ``max(parts)`` (a sublattice of type ``parts``
    contains ``p**max(parts) * Z**n``, so no diagonal valuation can exceed
    ``max(parts)``), in lexicographic order.
    """
    total = sum(parts)
    cap = max(parts) if parts else 0

    def rec(remaining, slots):
        if slots == 1:
            if remaining <= cap:
                yield (remaining,)
            return
        for first in range(min(remaining, cap) + 1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    yield from rec(total, n)


@lru_cache(maxsize=None)
def level_tables(parts: tuple, b: tuple, p: int):
    """Forward/backward tables for bottom-up row placement with diagonal ``b``.

    Rows are placed from the bottom row ``n-1`` up to row ``0``; after
    placing row ``j`` the lower-right block has size ``r = n - j``.  Returns
    ``(F, W, cost, count)`` where

    * ``F[r]`` maps block types to the number of partial fillings reaching
      them ("forward" counts),
    * ``W[r]`` maps block types to the number of ways to complete them to the
      target type ``parts`` ("backward" counts; support of ``W[r]`` is the
      pruning set used during materialization),
    * ``cost`` is the exact number of candidate rows a pruned bottom-up scan
      examines, and
    * ``count`` is the number of complete fillings, i.e. the number of cosets
      with diagonal ``b`` and type ``parts``.
    """
    n = len(b)
    target = strip_zeros(parts)
    cap = max(parts) if parts else 0

    suffix = [0] * (n + 1)
    for r in range(1, n + 1):
        suffix[r] = suffix[r - 1] + b[n - r]

    # Backward: W[n] fixes the target; W[r] sums transitions into W[r+1].
    W: list = [None] * (n + 1)
    W[n] = {target: 1} if suffix[n] == sum(target) else {}
    for r in range(n - 1, -1, -1):
        row = b[n - r - 1]
        table = {}
        domain = [()] if suffix[r] == 0 else partitions_bounded(suffix[r], r, cap)
        for mu in domain:
            tot = 0
            for nu, cnt in transitions(mu, row, p).items():
                nxt = W[r + 1].get(nu)
                if nxt:
                    tot += cnt * nxt
            if tot:
                table[mu] = tot
        W[r] = table

    # Forward: F[0] is the empty block; F[r+1] pushes through transitions.
    F: list = [None] * (n + 1)
    F[0] = {(): 1}
    for r in range(n):
        row = b[n - r - 1]
        table: dict = {}
        for mu, cnt in F[r].items():
            for nu, t in transitions(mu, row, p).items():
                table[nu] = table.get(nu, 0) + cnt * t
        F[r + 1] = table

    # Cost of a pruned scan: survivors at size r times the entry box for the
    # next row.  Row j = n - r - 1 has free entries in columns k > j, each
    # ranging over p**b[k].
    cost = 0
    for r in range(n):
        j = n - r - 1
        box = prod(p ** b[k] for k in range(j + 1, n))
        survivors = sum(cnt for mu, cnt in F[r].items() if mu in W[r])
        cost += survivors * box

    count = F[n].get(target, 0)
    assert count == W[0].get((), 0)
    return F, W, cost, count


def count_by_diagonal(parts, n: int, p: int) -> dict:
    """Coset counts for type ``parts`` split by diagonal valuations.

    Returns ``{b: N_b}`` over diagonals with ``N_b > 0``; the values sum to
    the total coset count.
    """
    parts = strip_zeros(parts)
    out = {}
    for b in diagonal_profiles(parts, n):
        _, _, _, cnt = level_tables(parts, b, p)
        if cnt:
            out[b] = cnt
    return out


def total_count(parts, n: int, p: int) -> int:
    return sum(count_by_diagonal(parts, n, p).values())


def hnf_reduce(mat, p: int, prec: int):
    """Canonical upper-triangular form of a nonsingular integer matrix over Z_p.

    Works modulo ``prec`` (a power of ``p`` exceeding ``p**(det valuation)``
    with headroom).  Pivots are chosen as the minimum-valuation entry of each
    column among unused rows, normalized to ``p**v`` by a unit inverse; other
    rows are cleared, and finally each off-diagonal entry in column ``j`` is
    reduced modulo the diagonal ``p**b_j``.  Row order follows pivot
    positions, so the result is the unique representative described in the
    module docstring.  Exact integer arithmetic throughout.
    """
    n = len(mat)
    work = [[int(x) % prec for x in row] for row in mat]
    perm = [None] * n
    used = [False] * n
    for col in range(n):
        pivot, pv = None, None
        for r in range(n):
            if used[r] or work[r][col] % prec == 0:
                continue
            v = valuation(work[r][col] % prec, p)
            if pv is None or v < pv:
                pivot, pv = r, v
        if pivot is None:
            raise ValueError("matrix is singular modulo prec")
        used[pivot] = True
        perm[col] = pivot
        unit = work[pivot][col] // p**pv
        uinv = pow(unit % prec, -1, prec)
        work[pivot] = [(x * uinv) % prec for x in work[pivot]]
        for r in range(n):
            if r == pivot or work[r][col] % prec == 0:
                continue
            f = work[r][col] // p**pv
            work[r] = [(x - f * y) % prec for x, y in zip(work[r], work[pivot])]
    rows = [work[perm[c]] for c in range(n)]
    diag = [valuation(rows[j][j], p) for j in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows[i][j] %= p ** diag[j]
        for j in range(i):
            assert rows[i][j] % p ** diag[j] == 0 or rows[i][j] == 0
            rows[i][j] = 0
        rows[i][i] = p ** diag[i]
    return tuple(tuple(r) for r in rows)


def encode_type(parts, r: int) -> int:
    """Pack a type with at most ``r`` parts into an integer key.

    Parts are sorted weakly decreasing, padded with zeros to length ``r``,
    and packed 6 bits each (parts must be < 64).  The kernels compute the
    same keys for candidate blocks, so pruning sets can be numpy arrays.
    """
    parts = strip_zeros(parts)
    if parts and parts[0] >= 64:
        raise ValueError("type part too large to encode")
    key = 0
    for i, a in enumerate(parts):
        key |= a << (6 * i)
    return key


# Exact rational half-integers used for Satake weight bookkeeping.
def half(k: int) -> Fraction:
    return Fraction(k, 2)
