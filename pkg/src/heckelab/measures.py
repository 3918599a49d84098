"""Plancherel and Sato-Tate measures on the compact torus mod the Weyl group.

Densities are expressed in the chart (θ_1, …, θ_{n−1}) with
θ_n = −(θ_1 + … + θ_{n−1}); integration uses the tensor trapezoidal rule
over the full torus (spectrally accurate for these smooth periodic
densities), with the symmetric-group overcount absorbed into the
normalization constant.  Sampling is by deterministic seeded rejection.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rng import stream
from .errors import CheckFailure, EnvelopeError, ValidationError
from .satake import SatakeParameter, SymLaurent

__all__ = [
    "TorusPoint",
    "MeasureSpec",
    "EmpiricalMeasure",
    "density",
    "normalize",
    "pair",
    "sample",
    "sample_angles",
    "sup_envelope",
    "default_characters",
    "default_test_functions",
    "weak_convergence_report",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TorusPoint:
    """Point of the compact torus: angles in [0, 2π), sum ≡ 0 (mod 2π),
    stored sorted ascending as the symmetric-group-canonical representative."""

    n: int
    angles: tuple

    def __post_init__(self):
        if len(self.angles) != self.n:
            raise ValidationError("angle count must equal rank")
        wrapped = math.fmod(sum(self.angles), _TWO_PI)
        if min(abs(wrapped), _TWO_PI - abs(wrapped)) > 1e-12:
            raise ValidationError(
                "angles must sum to 0 modulo 2π", angle_sum=sum(self.angles)
            )

    @classmethod
    def from_angles(cls, angles) -> "TorusPoint":
        angles = [float(a) % _TWO_PI for a in angles]
        total = math.fmod(sum(angles), _TWO_PI)
        correction = -total / len(angles)
        fixed = sorted((a + correction) % _TWO_PI for a in angles)
        # Wrap-induced drift is below 1e-12 by construction; re-balance once.
        resid = math.fmod(sum(fixed), _TWO_PI)
        if min(abs(resid), _TWO_PI - abs(resid)) > 1e-12:
            shift = (_TWO_PI - resid) / len(fixed) if resid > math.pi else -resid / len(fixed)
            fixed = sorted((a + shift) % _TWO_PI for a in fixed)
        return cls(len(fixed), tuple(fixed))

    @classmethod
    def from_free(cls, free) -> "TorusPoint":
        """Complete chart coordinates (θ_1..θ_{n−1}) with θ_n = −Σ."""
        free = [float(a) for a in free]
        last = (-sum(free)) % _TWO_PI
        return cls.from_angles(free + [last])

    def to_parameter(self) -> SatakeParameter:
        return SatakeParameter.from_values(
            [complex(math.cos(a), math.sin(a)) for a in self.angles]
        )


@dataclass(frozen=True)
class MeasureSpec:
    """Which measure, at which rank (and prime, for Plancherel).

    ``normalization`` is the constant c making the grid mean of c·density
    equal 1, i.e. the measure has total mass 1; filled by ``normalize``.
    ``normalization_error`` reports the Monte-Carlo standard error when the
    constant was estimated by sampling (rank ≥ 4).
    """

    kind: str
    n: int
    p: Optional[int] = None
    normalization: Optional[float] = None
    normalization_error: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("plancherel", "sato_tate"):
            raise ValidationError("kind must be 'plancherel' or 'sato_tate'")
        if self.kind == "plancherel" and (self.p is None or self.p < 2):
            raise ValidationError("plancherel measure requires a prime p ≥ 2")
        if self.n < 2:
            raise ValidationError("rank must be at least 2")

    @classmethod
    def plancherel(cls, n: int, p: int) -> "MeasureSpec":
        return cls("plancherel", n, p)

    @classmethod
    def sato_tate(cls, n: int) -> "MeasureSpec":
        return cls("sato_tate", n)


def _full_angles(free: np.ndarray) -> np.ndarray:
    """Append θ_n = −Σ to chart arrays of shape (..., n−1)."""
    last = -np.sum(free, axis=-1, keepdims=True)
    return np.concatenate([free, last], axis=-1)


def raw_density_arrays(spec: MeasureSpec, free: np.ndarray) -> np.ndarray:
    """Unnormalized density on chart arrays of shape (..., n−1)."""
    free = np.asarray(free, dtype=float)
    theta = _full_angles(free)
    u = np.exp(1j * theta)
    out = np.ones(free.shape[:-1], dtype=float)
    n = spec.n
    for k in range(n):
        for j in range(k + 1, n):
            num = np.abs(u[..., k] - u[..., j]) ** 2
            if spec.kind == "plancherel":
                den = np.abs(u[..., k] / spec.p - u[..., j]) ** 2
                out *= num / den
            else:
                out *= num
    return out


def density(spec: MeasureSpec, x: TorusPoint, raw: bool = False) -> float:
    """Density at a torus point w.r.t. dθ_1…dθ_{n−1} (normalized unless raw)."""
    if x.n != spec.n:
        raise ValidationError("rank mismatch")
    val = float(raw_density_arrays(spec, np.array(x.angles[:-1])))
    if raw:
        return val
    if spec.normalization is None:
        raise ValidationError("spec is not normalized; call normalize first")
    return spec.normalization * val


def _grid_free(n: int, grid: int) -> np.ndarray:
    """Tensor grid of chart points, shape (grid^(n-1), n-1)."""
    axis = _TWO_PI * np.arange(grid) / grid
    mesh = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
    return np.stack(mesh, axis=-1).reshape(-1, n - 1)


def _grid_mean(spec: MeasureSpec, grid: int, func=None) -> complex:
    """Mean of func(angles)·raw_density over the tensor grid (trapezoid)."""
    free = _grid_free(spec.n, grid)
    dens = raw_density_arrays(spec, free)
    if func is None:
        return float(np.mean(dens))
    vals = func(_full_angles(free))
    return complex(np.mean(vals * dens))


def normalize(
    spec: MeasureSpec,
    grid: int = 256,
    mc_samples: int = 200_000,
    seed: int = 0,
    tolerance: float = 1e-8,
) -> MeasureSpec:
    """Fill the normalization constant so the measure has total mass 1.

    Rank ≤ 3 uses the tensor trapezoidal grid and verifies two refinements
    agree to ``tolerance`` (relative); rank ≥ 4 estimates by Monte Carlo
    and records the standard error.
    """
    if spec.n <= 3:
        coarse = _grid_mean(spec, grid)
        fine = _grid_mean(spec, grid * 3 // 2)
        if abs(coarse - fine) > tolerance * abs(fine):
            raise CheckFailure(
                "quadrature refinements disagree",
                coarse=coarse,
                fine=fine,
                tolerance=tolerance,
            )
        return dataclasses.replace(
            spec, normalization=1.0 / fine, normalization_error=None
        )
    rng = stream(seed, "measure-normalize", spec.kind, spec.n, spec.p or 0)
    free = rng.uniform(0.0, _TWO_PI, size=(mc_samples, spec.n - 1))
    dens = raw_density_arrays(spec, free)
    mean = float(np.mean(dens))
    err = float(np.std(dens, ddof=1) / math.sqrt(mc_samples))
    return dataclasses.replace(
        spec, normalization=1.0 / mean, normalization_error=err / mean**2
    )


def pair(spec: MeasureSpec, f: SymLaurent, grid: int = 256) -> float:
    """∫ f dμ by tensor-grid quadrature against the normalized density."""
    if spec.normalization is None:
        raise ValidationError("spec is not normalized; call normalize first")
    if f.n != spec.n:
        raise ValidationError("rank mismatch")
    if spec.n > 3:
        raise ValidationError("grid pairing supports rank ≤ 3; use sampling")

    def func(theta):
        return f.evaluate_many(np.exp(1j * theta))

    val = _grid_mean(spec, grid, func) * spec.normalization
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise CheckFailure("pairing has a non-negligible imaginary part", value=[val.real, val.imag])
    return float(val.real)


def sup_envelope(spec: MeasureSpec, grid: int = 256, margin: float = 1.1) -> float:
    """Rejection envelope: sup of the normalized density over a grid, padded."""
    if spec.normalization is None:
        raise ValidationError("spec is not normalized; call normalize first")
    free = _grid_free(spec.n, grid) if spec.n <= 3 else None
    if free is None:
        rng = stream(0, "measure-envelope", spec.kind, spec.n, spec.p or 0)
        free = rng.uniform(0.0, _TWO_PI, size=(200_000, spec.n - 1))
    dens = raw_density_arrays(spec, free) * spec.normalization
    return float(np.max(dens)) * margin


def sample_angles(
    spec: MeasureSpec,
    count: int,
    seed: int,
    return_stats: bool = False,
    max_attempts: int = 10_000,
):
    """Rejection sampling; returns full angle arrays of shape (count, n).

    Proposals are uniform on the chart torus; candidate batches are keyed by
    (seed, attempt), and within each attempt the still-unfilled slots take
    candidates in index order, so results do not depend on scheduling.  An
    envelope violation triggers one re-computation of the envelope on a
    finer grid; a second violation aborts.
    """
    if spec.normalization is None:
        raise ValidationError("spec is not normalized; call normalize first")
    count = int(count)
    out = np.zeros((count, spec.n), dtype=float)
    if count == 0:
        stats = {"proposals": 0, "acceptance_rate": None, "envelope": None, "envelope_rebuilt": False}
        return (out, stats) if return_stats else out
    envelope = sup_envelope(spec)
    rebuilt = False
    remaining = np.arange(count)
    proposals = 0
    attempt = 0
    while remaining.size:
        if attempt >= max_attempts:
            raise EnvelopeError(
                "rejection sampling failed to fill all slots",
                attempts=attempt,
                unfilled=int(remaining.size),
            )
        rng = stream(seed, "measure-sample", spec.kind, spec.n, spec.p or 0, attempt)
        free = rng.uniform(0.0, _TWO_PI, size=(remaining.size, spec.n - 1))
        accept_u = rng.uniform(0.0, 1.0, size=remaining.size)
        dens = raw_density_arrays(spec, free) * spec.normalization
        proposals += remaining.size
        if np.any(dens > envelope):
            if rebuilt:
                raise EnvelopeError(
                    "density exceeds the rebuilt rejection envelope",
                    envelope=envelope,
                    observed=float(np.max(dens)),
                )
            envelope = sup_envelope(spec, grid=512, margin=1.2)
            rebuilt = True
            continue
        acc = accept_u * envelope <= dens
        filled = remaining[acc]
        out[filled] = _full_angles(free[acc]) % _TWO_PI
        remaining = remaining[~acc]
        attempt += 1
    stats = {
        "proposals": int(proposals),
        "acceptance_rate": count / proposals if proposals else None,
        "envelope": envelope,
        "envelope_rebuilt": rebuilt,
    }
    return (out, stats) if return_stats else out


def sample(spec: MeasureSpec, count: int, seed: int, return_stats: bool = False):
    """Rejection sampling returning canonical TorusPoints."""
    angles, stats = sample_angles(spec, count, seed, return_stats=True)
    points = [TorusPoint.from_angles(row) for row in angles]
    return (points, stats) if return_stats else points


class EmpiricalMeasure:
    """Uniform-weight empirical measure on parameter atoms.

    Atoms may be TorusPoints or SatakeParameters (possibly non-tempered;
    those are flagged).  Pairing averages a SymLaurent over the atoms.
    """

    def __init__(self, n: int, atoms):
        self.n = int(n)
        values = []
        self.nontempered = 0
        for a in atoms:
            if isinstance(a, TorusPoint):
                values.append(np.exp(1j * np.array(a.angles)))
            elif isinstance(a, SatakeParameter):
                if not a.is_tempered(1e-8):
                    self.nontempered += 1
                values.append(np.array(a.values, dtype=complex))
            else:
                raise ValidationError("atoms must be TorusPoint or SatakeParameter")
            if len(values[-1]) != self.n:
                raise ValidationError("atom rank mismatch")
        self.values = (
            np.stack(values) if values else np.zeros((0, self.n), dtype=complex)
        )

    def __len__(self):
        return self.values.shape[0]

    def pair(self, f: SymLaurent) -> float:
        if len(self) == 0:
            raise ValidationError("empirical measure has no atoms")
        vals = f.evaluate_many(self.values)
        return float(np.mean(vals.real))


def default_characters(n: int) -> list:
    """Irreducible characters used for orthogonality checks (as SymLaurents)."""
    if n == 2:
        # χ_k(u) = u^k + u^{k-2} + … + u^{-k} on the product-1 torus.
        chis = []
        for k in (1, 2, 3):
            coeffs = {}
            for j in range(k + 1):
                coeffs[(k - j, j)] = coeffs.get((k - j, j), 0) + 1
            chis.append(("chi_%d" % k, SymLaurent(2, coeffs)))
        return chis
    if n == 3:
        e1 = SymLaurent.elementary(3, 1)
        e2 = SymLaurent.elementary(3, 2)
        adjoint = e1 * e2 - 1
        sym2 = e1 * e1 - e2
        return [
            ("standard", e1),
            ("dual", e2),
            ("adjoint", adjoint),
            ("sym2", sym2),
        ]
    raise ValidationError("default characters defined for rank 2 and 3 only")


def default_test_functions(n: int) -> list:
    """Real, even test functions with nonzero Plancherel-vs-Sato-Tate gap."""
    if n == 2:
        chars = dict(default_characters(2))
        c1, c2 = chars["chi_1"], chars["chi_2"]
        return [
            ("chi1_sq", c1 * c1),
            ("chi2_sq", c2 * c2),
            ("chi1chi2_sq", (c1 * c2) * (c1 * c2)),
        ]
    if n == 3:
        e1 = SymLaurent.elementary(3, 1)
        e2 = SymLaurent.elementary(3, 2)
        h = e1 * e2  # |e_1|² on the torus
        adj = h - 1
        return [("abs_e1_sq", h), ("adjoint_sq", adj * adj), ("abs_e1_4", h * h)]
    raise ValidationError("default test functions defined for rank 2 and 3 only")


def weak_convergence_report(
    n: int, primes, testset=None, grid: int = 256
) -> dict:
    """Plancherel → Sato-Tate convergence table.

    For each prime and test function, reports both pairings and their
    absolute discrepancy; ``summary`` holds, per test function, the fitted
    constant C = max_p p·discrepancy (the empirical C/p envelope), and per
    prime the maximum discrepancy over the test set.
    """
    primes = list(primes)
    if primes != sorted(primes) or len(set(primes)) != len(primes):
        raise ValidationError("primes must be strictly increasing")
    if testset is None:
        testset = default_test_functions(n)
    st = normalize(MeasureSpec.sato_tate(n), grid=grid)
    st_vals = {name: pair(st, f, grid=grid) for name, f in testset}
    rows = []
    max_disc = {}
    fitted = {name: 0.0 for name, _ in testset}
    for p in primes:
        pl = normalize(MeasureSpec.plancherel(n, p), grid=grid)
        worst = 0.0
        for name, f in testset:
            v = pair(pl, f, grid=grid)
            disc = abs(v - st_vals[name])
            rows.append(
                {
                    "prime": p,
                    "name": name,
                    "plancherel": v,
                    "sato_tate": st_vals[name],
                    "discrepancy": disc,
                }
            )
            worst = max(worst, disc)
            fitted[name] = max(fitted[name], p * disc)
        max_disc[p] = worst
    return {"rows": rows, "max_discrepancy": max_disc, "fitted_C": fitted}
