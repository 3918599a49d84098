"""Independent oracles used by the tests.

Deliberately separate implementations from the package:

* ``brute_count``: full scan of every upper-triangular Hermite form with
  the right determinant valuation, classifying each by direct minor-gcd
  valuations (no chain splitting, no pruning);
* ``product_formula_count``: the textbook product formula for the number
  of sublattices with a given cokernel type, written from scratch.

``oracle_count`` prefers the brute scan and falls back to the product
formula when the scan would be too large; the two are cross-checked on
their overlap by the test suite.
"""

from __future__ import annotations

import itertools

import numpy as np

BRUTE_CAP = 2_500_000


def _np_valuation(arr: np.ndarray, p: int) -> np.ndarray:
    arr = np.abs(arr.astype(np.int64))
    sentinel = np.int64(1 << 40)
    out = np.where(arr == 0, sentinel, 0).astype(np.int64)
    work = arr.copy()
    live = arr != 0
    while True:
        div = live & (work % p == 0)
        if not div.any():
            break
        work[div] //= p
        out[div] += 1
        live = div
    return out


def _type_tuple_2(b, x, p):
    """Cokernel types for [[p^b0, x], [0, p^b1]] over a vector of x."""
    d1 = np.minimum(np.minimum(b[0], b[1]), _np_valuation(x, p))
    d2 = b[0] + b[1]
    hi = d2 - d1
    return np.stack([np.maximum(hi, d1), np.minimum(hi, d1)], axis=1)


def _type_tuple_3(b, x01, x02, x12, p):
    """Cokernel types for [[a,x01,x02],[0,b,x12],[0,0,c]] elementwise."""
    a, bb, c = (np.int64(p) ** e for e in b)
    ones = np.ones_like(x01)
    d1 = np.minimum.reduce(
        [
            _np_valuation(x01, p),
            _np_valuation(x02, p),
            _np_valuation(x12, p),
            ones * b[0],
            ones * b[1],
            ones * b[2],
        ]
    )
    minors = [
        ones * (a * bb),
        a * x12,
        x01 * x12 - bb * x02,
        ones * (a * c),
        x01 * c,
        ones * (bb * c),
    ]
    d2 = np.minimum.reduce([_np_valuation(m, p) for m in minors])
    d3 = b[0] + b[1] + b[2]
    parts = np.stack([d3 - d2, d2 - d1, d1], axis=1)
    return -np.sort(-parts, axis=1)


def brute_cost(total: int, n: int, p: int) -> int:
    """Number of candidate matrices the brute scan would visit."""
    cost = 0
    for b in itertools.product(range(total + 1), repeat=n):
        if sum(b) != total:
            continue
        cost += p ** sum(j * b[j] for j in range(n))
    return cost


def brute_count(parts, n: int, p: int) -> int:
    """Count upper-triangular Hermite forms with cokernel type ``parts`` by
    scanning every candidate with the right determinant valuation."""
    lam = tuple(sorted((x for x in parts if x), reverse=True))
    total = sum(parts)
    target = np.array(lam + (0,) * (n - len(lam)), dtype=np.int64)
    count = 0
    for b in itertools.product(range(total + 1), repeat=n):
        if sum(b) != total:
            continue
        if n == 2:
            xs = np.arange(p ** b[1], dtype=np.int64)
            types = _type_tuple_2(b, xs, p)
        elif n == 3:
            g01 = np.arange(p ** b[1], dtype=np.int64)
            g2 = np.arange(p ** b[2], dtype=np.int64)
            x01, x02, x12 = (
                g.ravel()
                for g in np.meshgrid(g01, g2, g2, indexing="ij")
            )
            types = _type_tuple_3(b, x01, x02, x12, p)
        else:
            raise NotImplementedError("brute oracle covers n in {2, 3}")
        count += int(np.count_nonzero(np.all(types == target, axis=1)))
    return count


def q_binomial(n: int, k: int, q: int) -> int:
    """Gaussian binomial, computed through the q-factorial quotient."""
    if k < 0 or k > n:
        return 0

    def q_int(m):
        return (q**m - 1) // (q - 1)

    num = 1
    den = 1
    for i in range(1, k + 1):
        num *= q_int(n - k + i)
        den *= q_int(i)
    assert num % den == 0
    return num // den


def product_formula_count(parts, n: int, p: int) -> int:
    """Number of sublattices of Z_p^n with cokernel type ``parts``:
    prod over the conjugate type c of p^(c_{i+1}(n - c_i)) * [n - c_{i+1}
    choose c_i - c_{i+1}]_p."""
    lam = [x for x in parts if x > 0]
    if len(lam) > n:
        return 0
    if not lam:
        return 1
    conj = [sum(1 for a in lam if a > i) for i in range(lam[0])] + [0]
    out = 1
    for i in range(len(conj) - 1):
        ci, cnext = conj[i], conj[i + 1]
        out *= p ** (cnext * (n - ci)) * q_binomial(n - cnext, ci - cnext, p)
    return out


def oracle_count(parts, n: int, p: int) -> int:
    """Preferred oracle: brute scan when affordable, else product formula."""
    if n in (2, 3) and brute_cost(sum(parts), n, p) <= BRUTE_CAP:
        return brute_count(parts, n, p)
    return product_formula_count(parts, n, p)
