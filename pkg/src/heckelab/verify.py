"""Built-in acceptance suite: nine deterministic checks over the whole
pipeline, each reporting pass/fail with its tolerance and a small numeric
detail payload.

The report is free of wall-clock data and execution parameters so that
runs with the same configuration are byte-identical regardless of thread
count or machine speed.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction

import numpy as np

from . import _rng, family_sim, kernel, lowlying, measures
from . import weyl_law as wl
from ._exact import closed_form_coset_count, gaussian_binomial
from .config import ExperimentConfig
from .padic_hecke import Cocharacter, HeckeElement, cocharacters_up_to_height, convolve, degree
from .satake import (
    SatakeParameter,
    eigenvalue_from_parameter,
    satake_params_from_eigenvalues,
    satake_transform,
    trivial_parameter,
)

__all__ = ["run_all", "CHECKS"]


def _result(name, passed, tolerance, detail):
    return {"name": name, "passed": bool(passed), "tolerance": tolerance, "detail": detail}


def check_coset_degrees(config, threads):
    """Chain-split counting equals the closed-form product formula for every
    shape of height <= 2, and Gaussian binomials for minuscule shapes."""
    failures = []
    shapes = 0
    for n in (2, 3):
        for p in (2, 3, 5):
            for omega in cocharacters_up_to_height(n, 2):
                shapes += 1
                got = degree(omega, p)
                want = closed_form_coset_count(omega.parts, n, p)
                if got != want:
                    failures.append({"n": n, "p": p, "omega": list(omega.parts), "got": got, "want": want})
            for t in range(1, n):
                omega = Cocharacter.minuscule(n, t)
                if degree(omega, p) != gaussian_binomial(n, t, p):
                    failures.append({"n": n, "p": p, "minuscule": t})
    return _result(
        "coset-degrees",
        not failures,
        "exact",
        {"shapes_checked": shapes, "failures": failures},
    )


def check_satake_homomorphism(config, threads):
    """Sat(f*g) = Sat(f)Sat(g) exactly in Z[sqrt(p)] for all height <= 1 pairs."""
    failures = []
    pairs = 0
    for n in (2, 3):
        for p in (2, 3):
            basis = cocharacters_up_to_height(n, 1)
            for lam, mu in itertools.combinations_with_replacement(basis, 2):
                pairs += 1
                f = HeckeElement(n, p, {lam: 1})
                g = HeckeElement(n, p, {mu: 1})
                left = satake_transform(convolve(f, g, threads=threads))
                right = satake_transform(f) * satake_transform(g)
                if left != right:
                    failures.append(
                        {"n": n, "p": p, "lam": list(lam.parts), "mu": list(mu.parts)}
                    )
    return _result(
        "satake-homomorphism",
        not failures,
        "exact",
        {"pairs_checked": pairs, "failures": failures},
    )


def check_plancherel_trace(config, threads):
    """Plancherel pairing of Sat(tau_omega) is [omega = 0] within 1e-6."""
    tol = 1e-6
    worst = 0.0
    cases = 0
    for n in (2, 3):
        for p in (2, 3, 5):
            spec = measures.normalize(
                measures.MeasureSpec.plancherel(n, p), grid=256
            )
            for omega in cocharacters_up_to_height(n, 2):
                cases += 1
                value = measures.pair(
                    spec, satake_transform(HeckeElement(n, p, {omega: 1})), grid=256
                )
                target = 1.0 if omega.total == 0 else 0.0
                worst = max(worst, abs(value - target))
    return _result(
        "plancherel-trace",
        worst <= tol,
        tol,
        {"cases": cases, "worst_error": worst},
    )


def _multiset_distance(a, b):
    n = len(a)
    best = math.inf
    for perm in itertools.permutations(range(n)):
        best = min(best, max(abs(a[i] - b[perm[i]]) for i in range(n)))
    return best


def check_extraction_roundtrip(config, threads):
    """1000 random tempered parameters per (n, p): eigenvalues -> roots
    recovers the multiset within 1e-8; trivial parameter within 1e-9."""
    tol = 1e-8
    worst = 0.0
    worst_trivial = 0.0
    nontempered_flagged = True
    for n in (2, 3):
        for p in (2, 3, 5):
            gen = _rng.stream(config.seed, "verify-extraction", n, p)
            free = gen.uniform(-math.pi, math.pi, size=(1000, n - 1))
            for row in free:
                param = SatakeParameter.from_angles(list(row) + [-float(np.sum(row))])
                lams = [eigenvalue_from_parameter(param, t, p) for t in range(1, n)]
                back = satake_params_from_eigenvalues(lams, p)
                worst = max(worst, _multiset_distance(param.values, back.values))
            triv = trivial_parameter(n, p)
            target = sorted(p ** ((n - 1) / 2 - t) for t in range(n))
            got = sorted(abs(v) for v in triv.values)
            worst_trivial = max(
                worst_trivial, max(abs(a - b) for a, b in zip(got, target))
            )
            lams = [eigenvalue_from_parameter(triv, t, p).real for t in range(1, n)]
            back = satake_params_from_eigenvalues(lams, p)
            if back.is_tempered(1e-8):
                nontempered_flagged = False
    passed = worst <= tol and worst_trivial <= 1e-9 and nontempered_flagged
    return _result(
        "extraction-roundtrip",
        passed,
        tol,
        {
            "worst_roundtrip_error": worst,
            "worst_trivial_error": worst_trivial,
            "nontempered_flagged": nontempered_flagged,
        },
    )


def check_sato_tate_limit(config, threads):
    """Plancherel -> Sato-Tate: discrepancies strictly decreasing and <= 10/p
    at p in {5,11,23,47,97}; a seeded sequence run ends within tolerance."""
    primes = [5, 11, 23, 47, 97]
    report = measures.weak_convergence_report(2, primes, grid=256)
    discs = [report["max_discrepancy"][p] for p in primes]
    decreasing = all(a > b for a, b in zip(discs, discs[1:]))
    bounded = all(d <= 10.0 / p for d, p in zip(discs, primes))
    dims = wl.GroupDims.for_pgl(2)
    params = wl.MainTermParams(vol=1.0, d_sigma=1, delta_alpha=1, n_Z_alpha=1)
    run = family_sim.sato_tate_run(
        2,
        [(p, float(p) ** 3) for p in primes],
        measures.default_test_functions(2),
        dims,
        params,
        seed=config.seed,
    )
    passed = decreasing and bounded and run["verdict"]
    return _result(
        "sato-tate-limit",
        passed,
        "10/p and 4*stderr + 10/p",
        {
            "max_discrepancy": {str(p): d for p, d in zip(primes, discs)},
            "strictly_decreasing": decreasing,
            "bounded_by_10_over_p": bounded,
            "sequence_verdict": run["verdict"],
        },
    )


def check_synthetic_family(config, threads):
    """100000-form synthetic family at p = 3: the Plancherel mean of the
    height-1 Satake transform is 0 within 4*stderr, and the counting
    function matches the prediction within 1 at 20 checkpoints."""
    dims = wl.GroupDims.for_pgl(2)
    params = wl.MainTermParams(vol=1.0, d_sigma=1, delta_alpha=1, n_Z_alpha=1)
    target = 100_000
    mu = (target / (wl.sphere_volume(dims.d) / (2 * math.pi) ** dims.d)) ** (1.0 / dims.d)
    fam = family_sim.generate_family(2, mu, [3], dims, params, seed=config.seed)
    f = satake_transform(HeckeElement(2, 3, {Cocharacter.of((1, 0)): 1}))
    pairing = family_sim.empirical_pairing(fam, 3, f)
    mean_ok = abs(pairing["mean"]) <= 4 * pairing["stderr"]
    worst_count = 0.0
    for t in np.linspace(mu / 20, mu, 20):
        emp = family_sim.counting_function(fam, float(t))
        pred = wl.count_prediction(dims, params, float(t))
        worst_count = max(worst_count, abs(emp - pred))
    passed = len(fam) == target and mean_ok and worst_count <= 1.0
    return _result(
        "synthetic-family",
        passed,
        "4*stderr and count +-1",
        {
            "family_size": len(fam),
            "pairing_mean": pairing["mean"],
            "pairing_stderr": pairing["stderr"],
            "worst_count_deviation": worst_count,
        },
    )


def check_lowlying_identities(config, threads):
    """pair_density against the closed forms for beta in {0.1,0.3,0.5,0.9}
    and the pointwise averaging identity for the O-type density."""
    S = lowlying.SymmetryType
    worst_u = 0.0
    worst_ortho = 0.0
    for beta in (0.1, 0.3, 0.5, 0.9):
        phi = lowlying.PWTestFunction(beta)
        worst_u = max(
            worst_u,
            abs(lowlying.pair_density(S.U, phi) - lowlying.closed_form_pairing(S.U, phi)),
        )
        for s in (S.SO_EVEN, S.SO_ODD, S.O):
            worst_ortho = max(
                worst_ortho,
                abs(
                    lowlying.pair_density(s, phi)
                    - lowlying.closed_form_pairing(s, phi)
                ),
            )
    xs = np.linspace(-25.0, 25.0, 10001)
    gap = np.max(
        np.abs(
            2 * lowlying.density_value(S.O, xs)
            - lowlying.density_value(S.SO_EVEN, xs)
            - lowlying.density_value(S.SO_ODD, xs)
        )
    )
    atom_gap = abs(
        2 * lowlying.atom_weight(S.O)
        - lowlying.atom_weight(S.SO_EVEN)
        - lowlying.atom_weight(S.SO_ODD)
    )
    passed = worst_u <= 1e-8 and worst_ortho <= 1e-6 and gap <= 1e-14 and atom_gap == 0
    return _result(
        "lowlying-identities",
        passed,
        {"unitary": 1e-8, "orthogonal": 1e-6, "averaging": 1e-14},
        {
            "worst_unitary_error": worst_u,
            "worst_orthogonal_error": worst_ortho,
            "averaging_gap": float(gap),
        },
    )


def check_weyl_bookkeeping(config, threads):
    """Exact equivariant remainder exponent 5/3 at n = 2, constant-budget
    assertions for n in 2..6, and exact main-term homogeneity."""
    exact_exponent = wl.remainder_exponent(
        "equivariant", wl.GroupDims.for_pgl(2), 0
    ) == Fraction(5, 3)
    budgets_ok = True
    for n in range(2, 7):
        dims = wl.GroupDims.for_pgl(n)
        budget = wl.constant_budget(dims)
        if not (budget.c5 < budget.c_bound and budget.c6 < budget.c_bound):
            budgets_ok = False
        if not (
            wl.is_nonvacuous("nonequivariant", dims)
            and wl.is_nonvacuous("equivariant", dims)
        ):
            budgets_ok = False
    dims = wl.GroupDims.for_pgl(2)
    params = wl.MainTermParams(vol=1.0, d_sigma=1, delta_alpha=1, n_Z_alpha=1)
    homogeneous = True
    for kind in ("nonequivariant", "equivariant"):
        e = wl.leading_exponent(kind, dims)
        for scale in (2.0, 4.0):
            lhs = wl.main_term(kind, dims, params, scale * 3.0)
            rhs = scale**e * wl.main_term(kind, dims, params, 3.0)
            if lhs != rhs:
                homogeneous = False
    passed = exact_exponent and budgets_ok and homogeneous
    return _result(
        "weyl-bookkeeping",
        passed,
        "exact",
        {
            "equivariant_exponent_5_3": exact_exponent,
            "budgets_nonvacuous_2_to_6": budgets_ok,
            "homogeneity_exact": homogeneous,
        },
    )


def check_determinism(config, threads):
    """Identical results from thread counts 1 and 2 on a representative
    slice: coset matrices, a convolution, and a seeded sampling run."""
    from .padic_hecke import coset_matrix_array

    omega = Cocharacter.of((2, 1, 0))
    a1 = coset_matrix_array(omega, 3, threads=1)
    a2 = coset_matrix_array(omega, 3, threads=2)
    cosets_equal = bool(np.array_equal(a1, a2))
    f = HeckeElement(2, 5, {Cocharacter.of((2, 0)): 1})
    g = HeckeElement(2, 5, {Cocharacter.of((1, 0)): 1})
    conv_equal = convolve(f, g, threads=1) == convolve(f, g, threads=2)
    spec = measures.normalize(measures.MeasureSpec.sato_tate(2), grid=128)
    s1 = measures.sample_angles(spec, 5000, seed=config.seed)
    s2 = measures.sample_angles(spec, 5000, seed=config.seed)
    samples_equal = bool(np.array_equal(s1, s2))
    payloads = []
    for arr in (a1, a2):
        payloads.append(
            json.dumps(
                {"entries": [str(int(x)) for x in np.asarray(arr).ravel()[:200]]},
                sort_keys=True,
            )
        )
    passed = cosets_equal and conv_equal and samples_equal and payloads[0] == payloads[1]
    return _result(
        "determinism",
        passed,
        "byte-identical",
        {
            "coset_arrays_equal": cosets_equal,
            "convolution_equal": bool(conv_equal),
            "seeded_samples_equal": samples_equal,
        },
    )


CHECKS = [
    check_coset_degrees,
    check_satake_homomorphism,
    check_plancherel_trace,
    check_extraction_roundtrip,
    check_sato_tate_limit,
    check_synthetic_family,
    check_lowlying_identities,
    check_weyl_bookkeeping,
    check_determinism,
]


def run_all(config: ExperimentConfig, threads: int = 1) -> dict:
    """Run every acceptance check; the report contains no timing or
    execution parameters so identical configs give identical bytes."""
    checks = [check(config, threads) for check in CHECKS]
    return {
        "backend": kernel.backend_name(),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
