"""Satake transform and Satake parameters.

The transform sends a Hecke element to a symmetric Laurent polynomial in
u_1..u_n subject to u_1⋯u_n = 1, with coefficients kept exact in the ring
Q(√p) (stored as pairs a + b·√p of rationals).  Parameters are extracted
from Hecke eigenvalues through the degree-n polynomial whose x^{n-t}
coefficient is (−1)^t p^{−(n−t)t/2} λ_t, with constant term (−1)^n.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ExtractionError, ValidationError
from .padic_hecke import Cocharacter, HeckeElement, coset_diagonal_counts

__all__ = [
    "SymLaurent",
    "SatakeParameter",
    "rho_vector",
    "satake_transform",
    "eigenvalue_from_parameter",
    "satake_params_from_eigenvalues",
    "extraction_residual",
    "is_tempered",
    "trivial_parameter",
]

_TWO_PI = 2.0 * math.pi


def rho_vector(n: int) -> tuple:
    """Half-sum-of-positive-roots exponent vector ((n−1)/2, …, −(n−1)/2)."""
    return tuple(Fraction(n + 1 - 2 * i, 2) for i in range(1, n + 1))


def _normalize_exponent(exps) -> tuple:
    exps = tuple(int(e) for e in exps)
    m = min(exps)
    return tuple(e - m for e in exps)


def _coeff(value) -> tuple:
    """Coerce a scalar or (a, b) pair to (Fraction, Fraction) = a + b√p."""
    if isinstance(value, tuple):
        a, b = value
        return (Fraction(a), Fraction(b))
    return (Fraction(value), Fraction(0))


class SymLaurent:
    """Symmetric Laurent polynomial in u_1..u_n modulo u_1⋯u_n = 1.

    ``coeffs`` maps exponent vectors (normalized so the minimum entry is 0,
    which fixes the representative modulo the product-1 relation) to pairs
    (a, b) of rationals meaning a + b·√p.  ``p`` may be None when no √p part
    is ever involved; it is inferred on mixed arithmetic.
    """

    __slots__ = ("n", "p", "coeffs")

    def __init__(self, n: int, coeffs=None, p: int | None = None):
        self.n = int(n)
        self.p = p
        clean: dict = {}
        for exps, val in (coeffs or {}).items():
            if len(exps) != self.n:
                raise ValidationError("exponent vector length must equal rank")
            key = _normalize_exponent(exps)
            a, b = _coeff(val)
            if key in clean:
                a0, b0 = clean[key]
                a, b = a0 + a, b0 + b
            clean[key] = (a, b)
        self.coeffs = {k: v for k, v in clean.items() if v != (0, 0)}
        if self.p is None and any(b for _, b in self.coeffs.values()):
            raise ValidationError("√p coefficients require an explicit prime")

    # ----- constructors -----

    @classmethod
    def constant(cls, n: int, value, p: int | None = None) -> "SymLaurent":
        return cls(n, {(0,) * n: value}, p=p)

    @classmethod
    def monomial_orbit(cls, n: int, exps, value=1, p: int | None = None) -> "SymLaurent":
        """Sum of u^e over the distinct permutations of ``exps``, each with
        the given coefficient."""
        if len(exps) != n:
            raise ValidationError("exponent vector length must equal rank")
        out: dict = {}
        for perm in set(itertools.permutations(tuple(int(e) for e in exps))):
            out[perm] = value
        return cls(n, out, p=p)

    @classmethod
    def elementary(cls, n: int, t: int, p: int | None = None) -> "SymLaurent":
        """Elementary symmetric polynomial e_t(u)."""
        if not 0 <= t <= n:
            raise ValidationError("elementary index out of range")
        return cls.monomial_orbit(n, (1,) * t + (0,) * (n - t), 1, p=p)

    # ----- ring structure -----

    def _merge_prime(self, other) -> int | None:
        if self.p is None:
            return other.p
        if other.p is None or other.p == self.p:
            return self.p
        raise ValidationError("mixed coefficient primes", left=self.p, right=other.p)

    def __add__(self, other):
        if not isinstance(other, SymLaurent):
            other = SymLaurent.constant(self.n, other, p=None)
        if self.n != other.n:
            raise ValidationError("rank mismatch")
        p = self._merge_prime(other)
        out = dict(self.coeffs)
        for k, (a, b) in other.coeffs.items():
            a0, b0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (a0 + a, b0 + b)
        return SymLaurent(self.n, out, p=p)

    __radd__ = __add__

    def __neg__(self):
        return SymLaurent(
            self.n, {k: (-a, -b) for k, (a, b) in self.coeffs.items()}, p=self.p
        )

    def __sub__(self, other):
        if not isinstance(other, SymLaurent):
            other = SymLaurent.constant(self.n, other, p=None)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SymLaurent):
            a, b = _coeff(other)
            out = {}
            for k, (a0, b0) in self.coeffs.items():
                if self.p is None:
                    out[k] = (a0 * a, b0 * a + a0 * b)
                    if b and b0:
                        raise ValidationError("√p product requires a prime")
                else:
                    out[k] = (a0 * a + b0 * b * self.p, a0 * b + b0 * a)
            return SymLaurent(self.n, out, p=self.p)
        if self.n != other.n:
            raise ValidationError("rank mismatch")
        p = self._merge_prime(other)
        out: dict = {}
        for e1, (a1, b1) in self.coeffs.items():
            for e2, (a2, b2) in other.coeffs.items():
                key = _normalize_exponent(tuple(x + y for x, y in zip(e1, e2)))
                if b1 and b2 and p is None:
                    raise ValidationError("√p product requires a prime")
                a = a1 * a2 + (b1 * b2 * p if p is not None else 0)
                b = a1 * b2 + b1 * a2
                a0, b0 = out.get(key, (Fraction(0), Fraction(0)))
                out[key] = (a0 + a, b0 + b)
        return SymLaurent(self.n, out, p=p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValidationError("negative powers are not supported")
        out = SymLaurent.constant(self.n, 1, p=self.p)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SymLaurent):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __repr__(self):
        if not self.coeffs:
            return "SymLaurent(0)"
        bits = []
        for k in sorted(self.coeffs):
            a, b = self.coeffs[k]
            bits.append(f"({a}+{b}√p)u^{k}")
        return "SymLaurent[" + " + ".join(bits) + f"; n={self.n}, p={self.p}]"

    # ----- structure helpers -----

    def bar(self) -> "SymLaurent":
        """Complex conjugate on the unit torus: u ↦ u^{-1} (exponent negation)."""
        return SymLaurent(
            self.n,
            {tuple(-e for e in k): v for k, v in self.coeffs.items()},
            p=self.p,
        )

    def abs_square(self) -> "SymLaurent":
        """|f|² as a function on the unit torus, again a SymLaurent."""
        return self * self.bar()

    def orbit_coeffs(self) -> dict:
        """Per-monomial coefficient of each exponent orbit (keyed by the
        sorted-descending representative); the coordinates in the
        monomial-symmetric basis."""
        out: dict = {}
        for k, v in self.coeffs.items():
            okey = tuple(sorted(k, reverse=True))
            if okey in out and out[okey] != v:
                raise ValidationError(
                    "polynomial is not symmetric", orbit=list(okey)
                )
            out[okey] = v
        return out

    def validate_symmetric(self) -> bool:
        """True iff the coefficient of every exponent orbit is constant."""
        for k, v in self.coeffs.items():
            for perm in itertools.permutations(k):
                if self.coeffs.get(_normalize_exponent(perm)) != v:
                    return False
        return True

    # ----- evaluation -----

    def _sqrt_p(self) -> float:
        if self.p is None:
            return 1.0
        return math.sqrt(self.p)

    def evaluate(self, values) -> complex:
        """Evaluate at u = values (length n, expected product 1)."""
        values = tuple(complex(v) for v in values)
        if len(values) != self.n:
            raise ValidationError("value vector length must equal rank")
        sp = self._sqrt_p()
        out = 0j
        for k, (a, b) in self.coeffs.items():
            mono = 1.0 + 0j
            for v, e in zip(values, k):
                mono *= v**e
            out += (float(a) + float(b) * sp) * mono
        return out

    def evaluate_many(self, values: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; ``values`` has shape (..., n)."""
        values = np.asarray(values, dtype=complex)
        if values.shape[-1] != self.n:
            raise ValidationError("value array must have trailing dimension n")
        sp = self._sqrt_p()
        out = np.zeros(values.shape[:-1], dtype=complex)
        for k, (a, b) in self.coeffs.items():
            mono = np.ones(values.shape[:-1], dtype=complex)
            for i, e in enumerate(k):
                if e:
                    mono = mono * values[..., i] ** e
            out += (float(a) + float(b) * sp) * mono
        return out


@lru_cache(maxsize=None)
def _satake_basis(n: int, p: int, parts: tuple) -> SymLaurent:
    """Transform of the basis element tau_parts.

    Each coset representative with diagonal valuations b contributes the
    monomial u^b weighted by p^{⟨ρ, b⟩}; the pairing ⟨ρ, b⟩ is a
    half-integer, so weights stay exact in Q(√p).  The orientation of the
    ρ-weight matches the row-reduced representative convention used by the
    enumeration (checked against the classical rank-one images).
    """
    rho = rho_vector(n)
    coeffs: dict = {}
    for b, cnt in coset_diagonal_counts(Cocharacter(n, parts), p).items():
        h = sum(r * x for r, x in zip(rho, b))
        if h.denominator == 1:
            w = (cnt * Fraction(p) ** int(h), Fraction(0))
        else:
            w = (Fraction(0), cnt * Fraction(p) ** int(h - Fraction(1, 2)))
        key = _normalize_exponent(b)
        a0, b0 = coeffs.get(key, (Fraction(0), Fraction(0)))
        coeffs[key] = (a0 + w[0], b0 + w[1])
    return SymLaurent(n, coeffs, p=p)


def satake_transform(f: HeckeElement) -> SymLaurent:
    """Satake transform; evaluation at a parameter u equals Tr π_u(f)."""
    out = SymLaurent.constant(f.n, 0, p=f.prime)
    for om, c in f.terms.items():
        out = out + _satake_basis(f.n, f.prime, om.parts) * c
    return out


@dataclass(frozen=True)
class SatakeParameter:
    """Unordered n-tuple of nonzero complex numbers with product 1.

    Stored in the canonical order (argument in [0, 2π), then log-modulus);
    ``residual`` carries the root-finder residual when the parameter came
    from an extraction and does not participate in equality.
    """

    n: int
    values: tuple
    residual: float | None = field(default=None, compare=False)

    @staticmethod
    def _key(v: complex):
        return (cmath.phase(v) % _TWO_PI, math.log(abs(v)))

    @classmethod
    def from_values(cls, values, tol: float = 1e-10, residual=None) -> "SatakeParameter":
        values = tuple(complex(v) for v in values)
        if any(v == 0 for v in values):
            raise ValidationError("parameter values must be nonzero")
        prod = 1.0 + 0j
        for v in values:
            prod *= v
        if abs(prod - 1.0) > tol:
            raise ValidationError(
                "parameter product must be 1",
                product=[prod.real, prod.imag],
                tolerance=tol,
            )
        ordered = tuple(sorted(values, key=cls._key))
        return cls(len(ordered), ordered, residual)

    @classmethod
    def from_angles(cls, angles) -> "SatakeParameter":
        angles = [float(a) for a in angles]
        shift = -sum(angles) / len(angles)
        return cls.from_values([cmath.exp(1j * (a + shift)) for a in angles])

    def is_tempered(self, tol: float = 1e-8) -> bool:
        return all(abs(abs(v) - 1.0) <= tol for v in self.values)


def is_tempered(u: SatakeParameter, tol: float = 1e-8) -> bool:
    """True iff every |u_i| is within tol of 1."""
    return u.is_tempered(tol)


def eigenvalue_from_parameter(u: SatakeParameter, t: int, p: int) -> complex:
    """Hecke eigenvalue λ_t = p^{(n−t)t/2} e_t(u) on the minuscule basis."""
    n = u.n
    if not 1 <= t <= n:
        raise ValidationError("eigenvalue index out of range", t=t, n=n)
    e_t = 0j
    for combo in itertools.combinations(u.values, t):
        term = 1.0 + 0j
        for v in combo:
            term *= v
        e_t += term
    return math.sqrt(p) ** ((n - t) * t) * e_t


def _extraction_coeffs(lams, p: int) -> list:
    n = len(lams) + 1
    coeffs = [1.0 + 0j]
    for t in range(1, n):
        c = (-1) ** t * math.sqrt(p) ** (-(n - t) * t) * complex(lams[t - 1])
        coeffs.append(c)
    coeffs.append(complex((-1) ** n))
    return coeffs


def _poly_eval(coeffs, x: complex) -> complex:
    out = 0j
    for c in coeffs:
        out = out * x + c
    return out


def satake_params_from_eigenvalues(lams, p: int) -> SatakeParameter:
    """Roots of the eigenvalue polynomial as a canonical SatakeParameter.

    Builds the monic degree-n polynomial with x^{n-t} coefficient
    (−1)^t p^{−(n−t)t/2} λ_t and constant term (−1)^n, and extracts its
    roots as companion-matrix eigenvalues.  The maximum |P(root)| residual
    is stored on the result; non-convergence raises ExtractionError.
    """
    lams = [complex(x) for x in lams]
    n = len(lams) + 1
    coeffs = _extraction_coeffs(lams, p)
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = [-coeffs[n - i] for i in range(n)]
    try:
        roots = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:  # iteration cap inside LAPACK
        raise ExtractionError(
            "companion-matrix eigenvalue iteration failed to converge",
            lambdas=[[x.real, x.imag] for x in lams],
        ) from exc
    residual = max(abs(_poly_eval(coeffs, complex(r))) for r in roots)
    scale = max(1.0, max(abs(c) for c in coeffs))
    if residual > 1e-6 * scale:
        raise ExtractionError(
            "root residual too large",
            residual=residual,
            tolerance=1e-6 * scale,
        )
    return SatakeParameter.from_values(roots, tol=1e-10, residual=residual)


def extraction_residual(u: SatakeParameter, lams, p: int) -> float:
    """Max |P(u_i)| of the extraction polynomial at the parameter values."""
    coeffs = _extraction_coeffs([complex(x) for x in lams], p)
    return max(abs(_poly_eval(coeffs, v)) for v in u.values)


def trivial_parameter(n: int, p: int) -> SatakeParameter:
    """The non-tempered parameter {p^{(n−1)/2 − t} : t = 0..n−1}."""
    vals = [math.sqrt(p) ** (n - 1 - 2 * t) for t in range(n)]
    return SatakeParameter.from_values(vals)
