"""End-to-end acceptance gate.

One test per acceptance property, in a fixed order; ``pytest -v`` therefore
prints one pass/fail line for each.  Tolerances and runtime limits are
asserted inside the tests themselves.
"""

import itertools
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from heckelab import _rng, family_sim, lowlying, measures
from heckelab import weyl_law as wl
from heckelab.lowlying import PWTestFunction, SymmetryType
from heckelab.measures import MeasureSpec
from heckelab.padic_hecke import (
    Cocharacter,
    HeckeElement,
    cocharacters_up_to_height,
    convolve,
    coset_matrix_array,
    degree,
)
from heckelab.satake import (
    SatakeParameter,
    eigenvalue_from_parameter,
    satake_params_from_eigenvalues,
    satake_transform,
    trivial_parameter,
)

SEED = 20260823


def multiset_distance(left, right):
    left = list(left)
    right = list(right)
    d1 = max(min(abs(a - b) for b in right) for a in left)
    d2 = max(min(abs(a - b) for b in left) for a in right)
    return max(d1, d2)


def test_acceptance_01_coset_degrees_match_sublattice_oracle():
    t0 = time.perf_counter()
    for n in (2, 3):
        for p in (2, 3, 5):
            for om in cocharacters_up_to_height(n, 2):
                want = oracles.oracle_count(om.parts, n, p)
                assert degree(om, p) == want, (n, p, om.parts)
                arr = coset_matrix_array(om, p)
                assert arr.shape[0] == want, (n, p, om.parts)
    for n in (2, 3):
        for t in range(n + 1):
            for p in (2, 3, 5):
                om = Cocharacter.minuscule(n, t)
                assert degree(om, p) == oracles.q_binomial(n, t, p)
    assert time.perf_counter() - t0 < 60.0


def test_acceptance_02_satake_homomorphism_exact():
    t0 = time.perf_counter()
    for n in (2, 3):
        for p in (2, 3):
            basis = cocharacters_up_to_height(n, 1)
            for lam, mu in itertools.combinations_with_replacement(basis, 2):
                f = HeckeElement.basis(lam.parts, p)
                g = HeckeElement.basis(mu.parts, p)
                assert satake_transform(convolve(f, g)) == satake_transform(
                    f
                ) * satake_transform(g), (n, p, lam.parts, mu.parts)
    assert time.perf_counter() - t0 < 120.0


def test_acceptance_03_plancherel_trace_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (2, 3):
        for p in (2, 3, 5):
            pl = measures.normalize(MeasureSpec.plancherel(n, p), grid=256)
            for om in cocharacters_up_to_height(n, 2):
                image = satake_transform(HeckeElement.basis(om.parts, p))
                val = measures.pair(pl, image, grid=256)
                want = 1.0 if all(a == 0 for a in om.parts) else 0.0
                worst = max(worst, abs(val - want))
    assert worst <= 1e-6, worst
    assert time.perf_counter() - t0 < 60.0


def test_acceptance_04_extraction_round_trip():
    for n in (2, 3):
        for p in (2, 3, 5):
            gen = _rng.stream(SEED, "acceptance-extraction", n, p)
            angles = gen.uniform(-math.pi, math.pi, size=(1000, n))
            for row in angles:
                param = SatakeParameter.from_angles(list(row))
                lams = [eigenvalue_from_parameter(param, t, p) for t in range(1, n)]
                back = satake_params_from_eigenvalues(lams, p)
                assert multiset_distance(param.values, back.values) < 1e-8
            triv = trivial_parameter(n, p)
            want = [p ** ((n - 1) / 2 - t) for t in range(n)]
            assert multiset_distance(triv.values, want) < 1e-9
            assert not triv.is_tempered()


def test_acceptance_05_sato_tate_limit():
    report = measures.weak_convergence_report(2, [5, 11, 23, 47, 97])
    gaps = report["max_discrepancy"]
    seq = [gaps[p] for p in (5, 11, 23, 47, 97)]
    assert all(a > b for a, b in zip(seq, seq[1:])), seq
    assert all(gaps[p] <= 10.0 / p for p in gaps), gaps

    run = family_sim.sato_tate_run(
        2,
        [(p, float(p) ** 3) for p in (5, 11, 23, 47, 97)],
        measures.default_test_functions(2),
        wl.GroupDims.for_pgl(2),
        wl.MainTermParams(vol=1.0),
        seed=SEED,
    )
    assert run["verdict"] is True
    final = run["rows"][-1]["entries"]
    assert all(e["discrepancy"] <= e["tolerance"] for e in final)


def test_acceptance_06_synthetic_family_density_and_counting():
    target = 100_000
    dims = wl.GroupDims.for_pgl(2)
    params = wl.MainTermParams(vol=1.0)
    density_const = wl.sphere_volume(dims.d) / (2 * math.pi) ** dims.d
    mu = (target / density_const) ** (1.0 / dims.d)
    fam = family_sim.generate_family(2, mu, [3], dims, params, seed=SEED)
    assert len(fam) == target
    image = satake_transform(HeckeElement.basis((1, 0), 3))
    stat = family_sim.empirical_pairing(fam, 3, image)
    assert abs(stat["mean"]) <= 4 * stat["stderr"], stat
    for t in np.linspace(mu / 20, mu, 20):
        pred = wl.count_prediction(dims, params, float(t))
        assert abs(family_sim.counting_function(fam, float(t)) - pred) <= 1.0


def test_acceptance_07_low_lying_density_identities():
    for beta in (0.1, 0.3, 0.5, 0.9):
        phi = PWTestFunction(beta)
        u = lowlying.pair_density(SymmetryType.U, phi)
        assert abs(u - phi.phi_hat(0.0)) <= 1e-8
        ortho_target = float(phi.phi_hat(0.0)) + float(phi.phi(0.0)) / 2.0
        for s in (SymmetryType.SO_EVEN, SymmetryType.SO_ODD, SymmetryType.O):
            got = lowlying.pair_density(s, phi)
            assert abs(got - ortho_target) <= 1e-6, (s, beta, got)
    xs = np.linspace(-6.0, 6.0, 10001)
    avg = (
        lowlying.density_value(SymmetryType.SO_EVEN, xs)
        + lowlying.density_value(SymmetryType.SO_ODD, xs)
    ) / 2.0
    gap = float(np.max(np.abs(lowlying.density_value(SymmetryType.O, xs) - avg)))
    assert gap <= 1e-14, gap


def test_acceptance_08_weyl_bookkeeping():
    dims2 = wl.GroupDims.for_pgl(2)
    exp = wl.remainder_exponent("equivariant", dims2, 0)
    assert exp == Fraction(5, 3)
    assert isinstance(exp, Fraction)
    for n in range(2, 7):
        budget = wl.constant_budget(wl.GroupDims.for_pgl(n))
        assert budget.c5 < budget.c_bound
        assert budget.c6 < budget.c_bound
    params = wl.MainTermParams(vol=1.0)
    for n in (2, 3):
        dims = wl.GroupDims.for_pgl(n)
        for kind in ("nonequivariant", "equivariant"):
            m = wl.leading_exponent(kind, dims)
            base = wl.main_term(kind, dims, params, 1.0)
            assert wl.main_term(kind, dims, params, 2.0) == base * 2.0**m
            assert wl.main_term(kind, dims, params, 4.0) == base * 4.0**m


def test_acceptance_09_verify_all_reports_byte_identical(tmp_path):
    env = dict(os.environ)
    env.pop("HECKELAB_SEED", None)
    outputs = {}
    for threads in (1, 3):
        out = tmp_path / f"report_t{threads}.json"
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "heckelab.cli",
                "verify-all",
                "--seed",
                "424242",
                "--threads",
                str(threads),
                "--out",
                str(out),
            ],
            capture_output=True,
            env=env,
        )
        assert proc.returncode == 0, proc.stderr.decode()
        outputs[threads] = (out.read_bytes(), proc.stdout)
    assert outputs[1][0] == outputs[3][0]
    assert outputs[1][1] == outputs[3][1]
