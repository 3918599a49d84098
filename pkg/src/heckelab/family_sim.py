"""Synthetic spectral families and equidistribution experiments.

A synthetic family places spectral parameters μ_j deterministically at the
quantiles of the Weyl-law counting function (so counting matches the
prediction to ±1 by construction) and draws per-prime Satake parameters
independently from the Plancherel measure with seeded, index-keyed
randomness.  The same pipeline ingests real eigenvalue tables from CSV.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import measures
from .errors import ValidationError
from .satake import SatakeParameter, SymLaurent, satake_params_from_eigenvalues
from .weyl_law import GroupDims, MainTermParams, count_prediction, leading_exponent

__all__ = [
    "SyntheticForm",
    "Family",
    "generate_family",
    "empirical_pairing",
    "multi_prime_pairing",
    "counting_function",
    "sato_tate_run",
    "validate_sequence",
    "ingest_dataset",
]


@dataclass(frozen=True)
class SyntheticForm:
    """One counted unit of a family: spectral parameter, K-type label, and
    per-prime Satake parameters."""

    mu_j: float
    ktype: str
    params: dict


class Family:
    """Multiset of spectral data at a list of primes.

    Parameter values are stored as dense complex arrays (forms × rank) per
    prime for fast pairing; ``forms`` materializes SyntheticForm views on
    demand.  ``quarantine`` lists (row_number, reason) pairs for ingested
    rows that failed extraction checks.
    """

    def __init__(
        self,
        n: int,
        mu: float,
        sigma: Optional[str],
        provenance: str,
        mu_values: np.ndarray,
        param_values: dict,
        nontempered: Optional[dict] = None,
        quarantine: Optional[list] = None,
    ):
        self.n = int(n)
        self.mu = float(mu)
        self.sigma = sigma
        self.provenance = provenance
        self.mu_values = np.asarray(mu_values, dtype=float)
        self.param_values = {int(p): np.asarray(v, dtype=complex) for p, v in param_values.items()}
        self.nontempered = {int(p): np.asarray(v, dtype=bool) for p, v in (nontempered or {}).items()}
        self.quarantine = list(quarantine or [])
        size = self.mu_values.shape[0]
        for p, v in self.param_values.items():
            if v.shape != (size, self.n):
                raise ValidationError("parameter array shape mismatch", prime=p)

    def __len__(self):
        return self.mu_values.shape[0]

    @property
    def primes(self) -> list:
        return sorted(self.param_values)

    @property
    def ktype(self) -> str:
        return self.sigma if self.sigma is not None else "trivial"

    def forms(self) -> list:
        out = []
        for j in range(len(self)):
            params = {
                p: SatakeParameter.from_values(self.param_values[p][j], tol=1e-6)
                for p in self.primes
            }
            out.append(SyntheticForm(float(self.mu_values[j]), self.ktype, params))
        return out

    def values_at(self, p: int) -> np.ndarray:
        if p not in self.param_values:
            raise ValidationError("prime not present in family", prime=p)
        return self.param_values[p]


def generate_family(
    n: int,
    mu: float,
    primes,
    dims: GroupDims,
    params: MainTermParams,
    seed: int,
    sigma: Optional[str] = None,
    grid: int = 256,
) -> Family:
    """Synthetic family consistent with the Weyl-law count.

    μ_j sit at midpoint quantiles of t ↦ t^e (e the leading exponent, which
    is the K-type-isotypic one when ``sigma`` is given), so the counting
    function matches ``count_prediction`` within ±1 everywhere; per-prime
    parameters are i.i.d. Plancherel draws, keyed by (seed, prime).
    """
    primes = sorted(set(int(p) for p in primes))
    kind = "equivariant" if sigma is not None else "nonequivariant"
    count = round(count_prediction(dims, params, mu, kind)) if mu > 0 else 0
    exponent = leading_exponent(kind, dims)
    if count <= 0:
        return Family(
            n, mu, sigma, f"synthetic:seed={seed}", np.zeros(0), {p: np.zeros((0, n)) for p in primes}
        )
    quantiles = (np.arange(count) + 0.5) / count
    mu_values = mu * quantiles ** (1.0 / exponent)
    param_values = {}
    for p in primes:
        spec = measures.normalize(measures.MeasureSpec.plancherel(n, p), grid=grid)
        angles = measures.sample_angles(spec, count, seed=seed)
        param_values[p] = np.exp(1j * angles)
    return Family(n, mu, sigma, f"synthetic:seed={seed}", mu_values, param_values)


def counting_function(fam: Family, t: float) -> int:
    """#{j : μ_j ≤ t}."""
    return int(np.count_nonzero(fam.mu_values <= t))


def empirical_pairing(fam: Family, p: int, f: SymLaurent) -> dict:
    """Mean and standard error of f over the family's parameters at p."""
    values = fam.values_at(p)
    if values.shape[0] == 0:
        raise ValidationError("family is empty")
    evals = f.evaluate_many(values).real
    mean = float(np.mean(evals))
    stderr = (
        float(np.std(evals, ddof=1) / math.sqrt(len(evals))) if len(evals) > 1 else 0.0
    )
    return {"mean": mean, "stderr": stderr, "count": int(len(evals))}


def multi_prime_pairing(fam: Family, S, f_list) -> dict:
    """Mean over forms of the product over p ∈ S of per-prime evaluations."""
    S = list(S)
    if len(S) != len(set(S)):
        raise ValidationError("primes must be distinct")
    if len(S) != len(f_list):
        raise ValidationError("one test function per prime is required")
    if len(fam) == 0:
        raise ValidationError("family is empty")
    prod = np.ones(len(fam), dtype=complex)
    for p, f in zip(S, f_list):
        prod = prod * f.evaluate_many(fam.values_at(p))
    vals = prod.real
    mean = float(np.mean(vals))
    stderr = (
        float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    )
    return {"mean": mean, "stderr": stderr, "count": int(len(vals))}


def validate_sequence(sequence, l_max: int = 2) -> list:
    """Warnings for a (p_k, μ_k) sequence meant to drive the p → ∞ limit.

    Primes must be strictly increasing (error); the ratios p_k^l / μ_k for
    l ≤ l_max should be nonincreasing on the tested range (warning only —
    the limit statement needs p_k^l/μ_k → 0 for every fixed l).
    """
    ps = [p for p, _ in sequence]
    if ps != sorted(ps) or len(set(ps)) != len(ps):
        raise ValidationError("primes must be strictly increasing", primes=ps)
    warnings = []
    for l in range(1, l_max + 1):
        ratios = [p**l / m for p, m in sequence]
        if any(a < b - 1e-12 for a, b in zip(ratios, ratios[1:])):
            warnings.append(
                f"ratio p^{l}/mu increases along the sequence; "
                "the superpolynomial growth condition looks violated"
            )
    return warnings


def sato_tate_run(
    n: int,
    sequence,
    testset,
    dims: GroupDims,
    params: MainTermParams,
    seed: int,
    max_forms: int = 20_000,
    grid: int = 256,
) -> dict:
    """Empirical Plancherel(p_k) versus Sato-Tate discrepancies along a
    sequence (p_k, μ_k) with μ_k → ∞.

    Families at each k are capped at ``max_forms`` draws (predicted counts
    grow like μ^d and are astronomically large; the cap only affects the
    Monte-Carlo error, which is reported).  The verdict requires the final
    row to be within 4·stderr + 10/p_k of zero for every test function.
    """
    warnings = validate_sequence(sequence)
    st = measures.normalize(measures.MeasureSpec.sato_tate(n), grid=grid)
    st_vals = {name: measures.pair(st, f, grid=grid) for name, f in testset}
    rows = []
    for k, (p, mu_k) in enumerate(sequence):
        predicted = count_prediction(dims, params, mu_k)
        forms = int(min(round(predicted), max_forms))
        if forms <= 0:
            raise ValidationError("sequence entry yields an empty family", k=k)
        spec = measures.normalize(measures.MeasureSpec.plancherel(n, p), grid=grid)
        angles = measures.sample_angles(spec, forms, seed=seed + k)
        values = np.exp(1j * angles)
        entries = []
        for name, f in testset:
            evals = f.evaluate_many(values).real
            mean = float(np.mean(evals))
            stderr = float(np.std(evals, ddof=1) / math.sqrt(forms))
            entries.append(
                {
                    "name": name,
                    "mean": mean,
                    "sato_tate": st_vals[name],
                    "discrepancy": abs(mean - st_vals[name]),
                    "stderr": stderr,
                    "tolerance": 4 * stderr + 10.0 / p,
                }
            )
        rows.append(
            {
                "k": k,
                "p": int(p),
                "mu": float(mu_k),
                "count_predicted": predicted,
                "forms_used": forms,
                "entries": entries,
            }
        )
    final = rows[-1]["entries"]
    verdict = all(e["discrepancy"] <= e["tolerance"] for e in final)
    return {"rows": rows, "warnings": warnings, "verdict": verdict}


_LAMBDA_COL = re.compile(r"^lambda_(\d+)_(\d+)$")


def ingest_dataset(path, schema: Optional[dict] = None, strict_tempered: bool = False) -> Family:
    """Load a family from CSV: column ``mu`` plus ``lambda_<p>_<t>`` columns.

    Eigenvalues are converted to Satake parameters; rows whose extraction
    fails the product or residual checks are quarantined with their row
    numbers, as are non-tempered rows when ``strict_tempered`` is set.
    """
    schema = schema or {}
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("dataset has no header", path=str(path))
        header = [h.strip() for h in header]
        if not header or header[0] != "mu":
            raise ValidationError(
                "first column must be 'mu'", path=str(path), header=header
            )
        columns: dict = {}
        for idx, name in enumerate(header[1:], start=1):
            m = _LAMBDA_COL.match(name)
            if not m:
                raise ValidationError(
                    "unrecognized column", column=name, expected="lambda_<p>_<t>"
                )
            p, t = int(m.group(1)), int(m.group(2))
            columns.setdefault(p, {})[t] = idx
        if not columns:
            raise ValidationError("no eigenvalue columns found", header=header)
        t_sets = {p: tuple(sorted(ts)) for p, ts in columns.items()}
        t_common = set(t_sets.values())
        if len(t_common) != 1:
            raise ValidationError(
                "inconsistent eigenvalue indices across primes",
                indices={p: list(v) for p, v in t_sets.items()},
            )
        ts = t_common.pop()
        n = max(ts) + 1
        if ts != tuple(range(1, n)):
            raise ValidationError(
                "eigenvalue indices must be 1..n-1", indices=list(ts)
            )
        if "n" in schema and schema["n"] != n:
            raise ValidationError(
                "rank mismatch between schema and columns",
                schema_n=schema["n"],
                column_n=n,
            )
        primes = sorted(columns)

        mu_values = []
        param_rows = {p: [] for p in primes}
        nontempered_rows = {p: [] for p in primes}
        quarantine = []
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                mu_j = float(row[0])
                lams = {
                    p: [float(row[columns[p][t]]) for t in range(1, n)]
                    for p in primes
                }
            except (ValueError, IndexError) as exc:
                raise ValidationError(
                    "malformed data row", row=row_number, reason=str(exc)
                )
            try:
                extracted = {
                    p: satake_params_from_eigenvalues(lams[p], p) for p in primes
                }
            except Exception as exc:
                quarantine.append((row_number, f"extraction failed: {exc}"))
                continue
            flags = {p: not extracted[p].is_tempered(1e-8) for p in primes}
            if strict_tempered and any(flags.values()):
                quarantine.append((row_number, "non-tempered in strict mode"))
                continue
            mu_values.append(mu_j)
            for p in primes:
                param_rows[p].append(extracted[p].values)
                nontempered_rows[p].append(flags[p])

    size = len(mu_values)
    param_values = {
        p: np.array(param_rows[p], dtype=complex).reshape(size, n) for p in primes
    }
    nontempered = {p: np.array(nontempered_rows[p], dtype=bool) for p in primes}
    mu_cut = max(mu_values) if mu_values else 0.0
    return Family(
        n,
        mu_cut,
        schema.get("sigma"),
        f"ingested:{path}",
        np.array(mu_values, dtype=float),
        param_values,
        nontempered=nontempered,
        quarantine=quarantine,
    )
