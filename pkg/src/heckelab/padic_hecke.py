"""Spherical Hecke algebra of PGL(n, Q_p): exact coset combinatorics.

Provides dominant cocharacters indexing double cosets, explicit left-coset
representatives in upper-triangular canonical form, degree counts, the
height truncation, and exact convolution of Hecke elements via pair
counting of representative products.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from . import kernel
from ._exact import (
    count_by_diagonal,
    encode_type,
    integer_det,
    level_tables,
    smith_type,
    strip_zeros,
    total_count,
    valuation,
)
from .errors import BudgetError, CheckFailure, ValidationError

__all__ = [
    "DEFAULT_BUDGET",
    "Cocharacter",
    "CosetRep",
    "HeckeElement",
    "height",
    "cocharacters_up_to_height",
    "degree",
    "coset_diagonal_counts",
    "enumeration_cost",
    "enumerate_cosets",
    "coset_matrix_array",
    "left_equivalent",
    "convolve",
    "convolve_basis",
]

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True, order=True)
class Cocharacter:
    """Dominant cocharacter of the diagonal torus, canonicalized for PGL.

    ``parts`` is weakly decreasing with last entry 0; two integer vectors
    differing by a constant shift index the same PGL double coset and share
    this canonical form.
    """

    n: int
    parts: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("rank must be at least 2", n=self.n)
        if len(self.parts) != self.n:
            raise ValidationError(
                "parts length must equal the rank", n=self.n, parts=list(self.parts)
            )
        if any(int(a) != a for a in self.parts):
            raise ValidationError("parts must be integers", parts=list(self.parts))
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValidationError(
                "parts must be weakly decreasing", parts=list(self.parts)
            )
        if self.parts[-1] != 0:
            raise ValidationError(
                "canonical parts must end in 0", parts=list(self.parts)
            )

    @classmethod
    def of(cls, parts, n: int | None = None) -> "Cocharacter":
        """Canonicalize an arbitrary integer vector: sort and shift to a_n = 0."""
        parts = tuple(int(a) for a in parts)
        if n is None:
            n = len(parts)
        elif n != len(parts):
            raise ValidationError("parts length must equal the rank", n=n)
        parts = tuple(sorted(parts, reverse=True))
        shift = parts[-1]
        return cls(n, tuple(a - shift for a in parts))

    @classmethod
    def minuscule(cls, n: int, t: int) -> "Cocharacter":
        """The cocharacter (1,…,1,0,…,0) with ``t`` ones."""
        if not 0 <= t <= n:
            raise ValidationError("minuscule index out of range", n=n, t=t)
        return cls.of((1,) * t + (0,) * (n - t))

    @property
    def height(self) -> int:
        """Min over central shifts c of max_i |a_i + c| (PGL-invariant)."""
        return min(
            max(abs(a + c) for a in self.parts)
            for c in range(-self.parts[0], 1)
        )

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __str__(self):
        return "(" + ",".join(str(a) for a in self.parts) + ")"


def height(omega: Cocharacter) -> int:
    return omega.height


def cocharacters_up_to_height(n: int, kappa: int) -> list:
    """All canonical cocharacters of rank ``n`` with height at most ``kappa``.

    Height ≤ kappa is equivalent to a_1 ≤ 2·kappa in canonical form; listed
    in lexicographic order.
    """
    out = []
    for parts in itertools.product(*(range(2 * kappa + 1) for _ in range(n - 1))):
        if all(a >= b for a, b in zip(parts, parts[1:])):
            om = Cocharacter(n, parts + (0,))
            if om.height <= kappa:
                out.append(om)
    return sorted(out)


@dataclass(frozen=True)
class CosetRep:
    """A left-coset representative: upper-triangular, diagonal p^{b_j},
    entry (i,j) for i < j reduced modulo p^{b_j}."""

    matrix: tuple
    prime: int
    diag_valuations: tuple

    @classmethod
    def from_matrix(cls, rows, p: int) -> "CosetRep":
        mat = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(mat)
        for i, row in enumerate(mat):
            if len(row) != n:
                raise ValidationError("matrix must be square")
            if any(row[j] != 0 for j in range(i)):
                raise ValidationError("matrix must be upper triangular")
            if row[i] <= 0:
                raise ValidationError("diagonal entries must be positive")
        diag = tuple(valuation(mat[i][i], p) for i in range(n))
        for i in range(n):
            if mat[i][i] != p ** diag[i]:
                raise ValidationError("diagonal entries must be powers of p")
            for j in range(i + 1, n):
                if not 0 <= mat[i][j] < p ** diag[j]:
                    raise ValidationError(
                        "entry (i,j) must be reduced modulo p^{b_j}", i=i, j=j
                    )
        return cls(mat, p, diag)

    @property
    def n(self) -> int:
        return len(self.matrix)

    def cocharacter(self) -> Cocharacter:
        t = smith_type(self.matrix, self.prime)
        return Cocharacter.of(tuple(t) + (0,) * (self.n - len(t)))

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)


class HeckeElement:
    """Exact rational linear combination of basis double-coset functions."""

    __slots__ = ("n", "prime", "terms")

    def __init__(self, n: int, prime: int, terms=None):
        self.n = int(n)
        self.prime = int(prime)
        clean: dict = {}
        for key, coeff in (terms or {}).items():
            om = key if isinstance(key, Cocharacter) else Cocharacter.of(key)
            if om.n != self.n:
                raise ValidationError(
                    "all cocharacters must share the element's rank", n=self.n
                )
            c = Fraction(coeff)
            if c:
                clean[om] = clean.get(om, Fraction(0)) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def unit(cls, n: int, p: int) -> "HeckeElement":
        return cls(n, p, {Cocharacter.of((0,) * n): 1})

    @classmethod
    def basis(cls, omega, p: int) -> "HeckeElement":
        om = omega if isinstance(omega, Cocharacter) else Cocharacter.of(omega)
        return cls(om.n, p, {om: 1})

    def support(self) -> list:
        return sorted(self.terms)

    def __add__(self, other):
        self._check_compatible(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return HeckeElement(self.n, self.prime, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        c = Fraction(scalar)
        return HeckeElement(
            self.n, self.prime, {k: c * v for k, v in self.terms.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, HeckeElement)
            and self.n == other.n
            and self.prime == other.prime
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "HeckeElement(0)"
        bits = " + ".join(f"{v}*tau{om}" for om, v in sorted(self.terms.items()))
        return f"HeckeElement[{bits}; p={self.prime}]"

    def _check_compatible(self, other):
        if not isinstance(other, HeckeElement):
            raise ValidationError("expected a HeckeElement")
        if self.n != other.n or self.prime != other.prime:
            raise ValidationError(
                "rank and prime must match",
                left=(self.n, self.prime),
                right=(other.n, other.prime),
            )


@lru_cache(maxsize=None)
def _diag_counts(n: int, p: int, parts: tuple) -> dict:
    return count_by_diagonal(parts, n, p)


def coset_diagonal_counts(omega: Cocharacter, p: int) -> dict:
    """Left-coset counts split by diagonal valuation vector: {b: N_b}."""
    return dict(_diag_counts(omega.n, p, omega.parts))


def degree(omega: Cocharacter, p: int) -> int:
    """Number of left cosets in the double coset indexed by ``omega``."""
    return sum(_diag_counts(omega.n, p, omega.parts).values())


def enumeration_cost(omega: Cocharacter, p: int) -> int:
    """Exact number of candidate rows a pruned enumeration will examine."""
    n = omega.n
    cost = 0
    for b in _diag_counts(n, p, omega.parts):
        _, _, c, _ = level_tables(omega.parts, b, p)
        cost += c
    return cost


def _reach_sets(parts: tuple, b: tuple, p: int) -> tuple:
    """Encoded type keys reachable-to-target per block size (index r=1..n)."""
    n = len(b)
    _, W, _, _ = level_tables(parts, b, p)
    reach = [None]
    for r in range(1, n + 1):
        reach.append(frozenset(encode_type(mu, r) for mu in W[r]))
    return tuple(reach)


_MATRIX_CACHE: dict = {}


def coset_matrix_array(
    omega: Cocharacter, p: int, budget: int | None = None, threads: int = 1
) -> np.ndarray:
    """All representatives of ``omega`` as one (degree, n*n) integer array.

    Rows are ordered lexicographically by (diagonal valuations, entries);
    work is partitioned by diagonal vector, so ``threads`` only adds
    parallelism and never changes the output.
    """
    # The budget is a contract on predicted work, so it is enforced before
    # the cache: a call must succeed or fail the same way either side of a
    # warm cache.
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    cost = enumeration_cost(omega, p)
    if cost > budget:
        raise BudgetError(
            "predicted enumeration work exceeds the budget",
            omega=list(omega.parts),
            prime=p,
            predicted_candidates=int(cost),
            budget=int(budget),
        )
    key = (omega.n, p, omega.parts)
    cached = _MATRIX_CACHE.get(key)
    if cached is not None:
        return cached
    n = omega.n
    counts = _diag_counts(n, p, omega.parts)
    diags = sorted(counts)

    def one(b):
        reach = _reach_sets(omega.parts, b, p)
        arr = kernel.materialize_b(n, p, b, reach, budget)
        if arr.shape[0] != counts[b]:
            raise CheckFailure(
                "enumeration disagrees with transition counts",
                omega=list(omega.parts),
                prime=p,
                diag=list(b),
                enumerated=int(arr.shape[0]),
                predicted=int(counts[b]),
            )
        return arr

    if threads > 1 and len(diags) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(one, diags))
    else:
        blocks = [one(b) for b in diags]
    if blocks:
        dtype = object if any(bl.dtype == object for bl in blocks) else np.int64
        out = np.concatenate([bl.astype(dtype) for bl in blocks], axis=0)
    else:
        out = np.zeros((0, n * n), dtype=np.int64)
    _MATRIX_CACHE[key] = out
    return out


def enumerate_cosets(
    omega: Cocharacter, p: int, budget: int | None = None, threads: int = 1
) -> list:
    """Complete, duplicate-free list of left-coset representatives."""
    n = omega.n
    arr = coset_matrix_array(omega, p, budget=budget, threads=threads)
    out = []
    for row in arr:
        mat = tuple(
            tuple(int(row[i * n + j]) for j in range(n)) for i in range(n)
        )
        diag = tuple(valuation(mat[i][i], p) for i in range(n))
        out.append(CosetRep(mat, p, diag))
    return out


def left_equivalent(x: CosetRep, y: CosetRep) -> bool:
    """Exact test whether x and y represent the same coset.

    Representatives are canonical under integral row operations, i.e. under
    GL_n(Z_p) acting on the left; x and y coincide as cosets iff
    y·x^{-1} lies in GL_n(Z_p).  Checked via the adjugate (y·adj(x) must be
    divisible by det(x) at p, and the determinant valuations must match) so
    only exact integer arithmetic is involved.
    """
    if x.prime != y.prime or x.n != y.n:
        raise ValidationError("representatives must share prime and rank")
    p, n = x.prime, x.n
    dx = integer_det([list(r) for r in x.matrix])
    dy = integer_det([list(r) for r in y.matrix])
    if valuation(dx, p) != valuation(dy, p):
        return False
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [x.matrix[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            adj[i][j] = (-1) ** (i + j) * integer_det(minor)
    vd = valuation(dx, p)
    for i in range(n):
        for j in range(n):
            entry = sum(y.matrix[i][k] * adj[k][j] for k in range(n))
            if entry != 0 and valuation(entry, p) < vd:
                return False
    return True


@lru_cache(maxsize=None)
def convolve_basis(n: int, p: int, lam: tuple, mu: tuple, budget: int) -> tuple:
    """Structure constants of tau_lam * tau_mu as ((cocharacter parts, c), …).

    Products of all representative pairs are reduced to canonical form and
    tallied; the tally must be constant on each coset and cover each double
    coset completely, which is verified before the constants are returned.
    """
    om_l = Cocharacter(n, lam)
    om_m = Cocharacter(n, mu)
    xs = coset_matrix_array(om_l, p, budget=budget)
    ys = coset_matrix_array(om_m, p, budget=budget)
    total = xs.shape[0] * ys.shape[0]
    if total > budget:
        raise BudgetError(
            "convolution pair count exceeds the budget",
            pairs=int(total),
            budget=int(budget),
        )
    prec = p ** (sum(lam) + sum(mu) + 4)
    tally = kernel.classify_products(xs, ys, n, p, prec)
    if sum(tally.values()) != total:
        raise CheckFailure("product tally lost mass", expected=total)
    groups: dict = {}
    for flat, cnt in tally.items():
        mat = [list(flat[i * n : (i + 1) * n]) for i in range(n)]
        t = smith_type(mat, p)
        groups.setdefault(t, []).append(cnt)
    out = []
    for t, cnts in sorted(groups.items()):
        if len(set(cnts)) != 1:
            raise CheckFailure(
                "product tally is not constant on a double coset",
                type=list(t),
                counts=sorted(set(cnts)),
            )
        if len(cnts) != total_count(t, n, p):
            raise CheckFailure(
                "product tally does not cover a double coset",
                type=list(t),
                seen=len(cnts),
                expected=total_count(t, n, p),
            )
        padded = tuple(t) + (0,) * (n - len(t))
        out.append((Cocharacter.of(padded).parts, cnts[0]))
    return tuple(out)


def convolve(
    f: HeckeElement, g: HeckeElement, budget: int | None = None, threads: int = 1
) -> HeckeElement:
    """Convolution product in the Hecke algebra, exact in rationals."""
    f._check_compatible(g)
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    n, p = f.n, f.prime
    acc: dict = {}
    for om_l, cl in f.terms.items():
        for om_m, cm in g.terms.items():
            coeff = cl * cm
            for parts, c in convolve_basis(n, p, om_l.parts, om_m.parts, budget):
                om = Cocharacter(n, parts)
                acc[om] = acc.get(om, Fraction(0)) + coeff * c
    return HeckeElement(n, p, acc)
