"""Eigenvalue-counting main terms, remainder exponents, and proof constants.

Everything here is plain arithmetic on dimension data: the unit-sphere
volume ϖ_m, the leading Weyl-law coefficients (plain and K-type-isotypic),
the remainder exponents, and the chain of proof-visible constants
c3 = N(N+1), c5 = c3 + (d−1)/2, c6 = d + N − 1 + N(N+1)/2 together with
their common upper bound d + N(N+1).  Exponent arithmetic is exact
(fractions) whenever the inputs are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import ValidationError

__all__ = [
    "GroupDims",
    "MainTermParams",
    "ConstantBudget",
    "sphere_volume",
    "main_term",
    "remainder_exponent",
    "constant_budget",
    "count_prediction",
    "is_nonvacuous",
]


@dataclass(frozen=True)
class GroupDims:
    """Dimension data: G = PGL(n, R), K its maximal compact, N the ambient
    special-linear embedding dimension (defaults to the adjoint one)."""

    n: int
    d: int
    dimK: int
    N: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("rank must be at least 2")
        if self.d != self.n**2 - 1 or self.dimK != self.n * (self.n - 1) // 2:
            raise ValidationError(
                "dimensions must satisfy d = n²−1 and dimK = n(n−1)/2",
                n=self.n,
            )
        if self.d < 3 or self.d - self.dimK < 2:
            raise ValidationError("degenerate dimension data", n=self.n)
        if self.N < self.d - self.dimK + 1:
            raise ValidationError(
                "embedding dimension too small: N ≥ d − dimK + 1 required",
                N=self.N,
                minimum=self.d - self.dimK + 1,
            )

    @classmethod
    def for_pgl(cls, n: int, N: int | None = None) -> "GroupDims":
        d = n**2 - 1
        if N is None:
            N = d  # adjoint embedding into SL(n²−1)
        return cls(n, d, n * (n - 1) // 2, N)


@dataclass(frozen=True)
class MainTermParams:
    """Numeric inputs of the main terms (volumes and multiplicities are
    global arithmetic data supplied by the user, not computed here)."""

    vol: float
    d_sigma: int = 1
    delta_alpha: int = 1
    n_Z_alpha: int = 1

    def __post_init__(self):
        if self.vol <= 0:
            raise ValidationError("volume must be positive")
        if self.d_sigma < 1:
            raise ValidationError("K-type dimension must be ≥ 1")
        if self.delta_alpha not in (0, 1):
            raise ValidationError("delta_alpha must be 0 or 1")
        if self.n_Z_alpha < 0:
            raise ValidationError("n_Z_alpha must be nonnegative")


def sphere_volume(m: int) -> float:
    """Volume ϖ_m = π^{m/2} / Γ(1 + m/2) of the unit m-sphere (m-ball)."""
    if m < 0:
        raise ValidationError("dimension must be nonnegative")
    return math.pi ** (m / 2) / math.gamma(1 + m / 2)


def _check_kind(kind: str):
    if kind not in ("nonequivariant", "equivariant"):
        raise ValidationError(
            "kind must be 'nonequivariant' or 'equivariant'", kind=kind
        )


def leading_exponent(kind: str, dims: GroupDims) -> int:
    _check_kind(kind)
    return dims.d if kind == "nonequivariant" else dims.d - dims.dimK


def main_term(kind: str, dims: GroupDims, params: MainTermParams, mu: float) -> float:
    """Leading term of the eigenvalue count up to spectral parameter mu.

    Nonequivariant: δ_α · vol · ϖ_d / (2π)^d · μ^d.
    Equivariant:    n_Z · d_σ · vol · ϖ_{d−dimK} / (2π)^{d−dimK} · μ^{d−dimK}.
    """
    _check_kind(kind)
    if mu <= 0:
        raise ValidationError("mu must be positive")
    if kind == "nonequivariant":
        m = dims.d
        front = params.delta_alpha * params.vol
    else:
        m = dims.d - dims.dimK
        front = params.n_Z_alpha * params.d_sigma * params.vol
    return front * sphere_volume(m) / (2 * math.pi) ** m * mu**m


def remainder_exponent(kind: str, dims: GroupDims, eps=0):
    """Exponent of μ in the remainder bound.

    Nonequivariant: d − 1 (an int).  Equivariant:
    d − dimK − (d − dimK − 1)/(d − dimK + 1) + ε, exact (a Fraction) when
    ε is exact, float otherwise.
    """
    _check_kind(kind)
    if kind == "nonequivariant":
        return dims.d - 1
    m = dims.d - dims.dimK
    base = m - Fraction(m - 1, m + 1)
    if isinstance(eps, Rational):
        return base + Fraction(eps)
    return float(base) + float(eps)


@dataclass(frozen=True)
class ConstantBudget:
    """Proof-visible constants and their bound for the prime-power factor.

    ``c_bound`` = d + N(N+1) dominates c5 and c6; ``equivariant_bound``
    is the corresponding bound N² + 2N in the isotypic refinement; and
    ``specialized_exponent`` = n⁴ is the crude exponent obtained by
    specializing to the adjoint embedding.
    """

    c3: int
    c5: Fraction
    c6: int
    c_bound: int
    equivariant_bound: int
    specialized_exponent: int

    def as_dict(self) -> dict:
        c5 = self.c5
        return {
            "c3": self.c3,
            "c5": float(c5) if c5.denominator != 1 else int(c5),
            "c6": self.c6,
            "c_bound": self.c_bound,
            "equivariant_bound": self.equivariant_bound,
            "specialized_exponent": self.specialized_exponent,
        }


def constant_budget(dims: GroupDims) -> ConstantBudget:
    """c3 = N(N+1), c5 = c3 + (d−1)/2, c6 = d + N − 1 + N(N+1)/2, all
    checked against the bound c_bound = d + N(N+1)."""
    N, d = dims.N, dims.d
    c3 = N * (N + 1)
    c5 = c3 + Fraction(d - 1, 2)
    c6 = d + N - 1 + N * (N + 1) // 2
    c_bound = d + N * (N + 1)
    if not (c5 < c_bound and c6 < c_bound):
        raise ValidationError(
            "constant budget inconsistent", c5=float(c5), c6=c6, bound=c_bound
        )
    return ConstantBudget(
        c3=c3,
        c5=c5,
        c6=c6,
        c_bound=c_bound,
        equivariant_bound=N * N + 2 * N,
        specialized_exponent=dims.n**4,
    )


def count_prediction(
    dims: GroupDims, params: MainTermParams, mu: float, kind: str = "nonequivariant"
) -> float:
    """Predicted eigenvalue count below mu: the main term with δ_α = 1."""
    forced = MainTermParams(
        vol=params.vol,
        d_sigma=params.d_sigma,
        delta_alpha=1,
        n_Z_alpha=params.n_Z_alpha,
    )
    return main_term(kind, dims, forced, mu)


def is_nonvacuous(kind: str, dims: GroupDims, eps=0) -> bool:
    """True iff the remainder exponent is strictly below the leading one."""
    rem = remainder_exponent(kind, dims, eps)
    lead = leading_exponent(kind, dims)
    if isinstance(rem, Rational):
        return Fraction(rem) < lead
    return float(rem) < float(lead)
