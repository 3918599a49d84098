"""Plancherel and Sato-Tate measures: normalization, pairing, sampling."""

import math

import numpy as np
import pytest

from heckelab import measures
from heckelab.errors import ValidationError
from heckelab.measures import EmpiricalMeasure, MeasureSpec, TorusPoint
from heckelab.satake import SymLaurent


class TestTorusPoint:
    def test_sum_zero_enforced(self):
        with pytest.raises(ValidationError):
            TorusPoint(2, (0.3, 0.3))
        TorusPoint(2, (0.3, 2 * math.pi - 0.3))

    def test_from_angles_canonicalizes(self):
        a = TorusPoint.from_angles([1.0, -1.0])
        b = TorusPoint.from_angles([-1.0, 1.0])
        assert a == b
        assert abs(math.fmod(sum(a.angles), 2 * math.pi)) < 1e-10

    def test_from_free_completes_last_angle(self):
        x = TorusPoint.from_free([0.7, 1.9])
        assert x.n == 3
        s = math.fmod(sum(x.angles), 2 * math.pi)
        assert min(abs(s), 2 * math.pi - abs(s)) < 1e-10

    def test_to_parameter_is_tempered(self):
        assert TorusPoint.from_angles([0.4, -0.4]).to_parameter().is_tempered()


class TestMeasureSpec:
    def test_plancherel_requires_prime(self):
        with pytest.raises(ValidationError):
            MeasureSpec("plancherel", 2)
        with pytest.raises(ValidationError):
            MeasureSpec("bogus", 2)

    def test_rank_lower_bound(self):
        with pytest.raises(ValidationError):
            MeasureSpec.sato_tate(1)


class TestNormalization:
    def test_rank2_plancherel_constant_golden(self):
        spec = measures.normalize(MeasureSpec.plancherel(2, 5))
        assert abs(spec.normalization - 0.6) < 1e-9

    def test_normalized_measure_has_mass_one(self):
        for spec in (MeasureSpec.plancherel(3, 2), MeasureSpec.sato_tate(2)):
            norm = measures.normalize(spec)
            one = SymLaurent.constant(spec.n, 1)
            assert abs(measures.pair(norm, one) - 1.0) < 1e-10

    def test_rank4_monte_carlo_reports_error(self):
        spec = measures.normalize(MeasureSpec.sato_tate(4), mc_samples=20_000)
        assert spec.normalization_error is not None
        assert spec.normalization_error > 0

    def test_pair_requires_normalization(self):
        with pytest.raises(ValidationError):
            measures.pair(MeasureSpec.sato_tate(2), SymLaurent.constant(2, 1))


class TestPairings:
    def test_character_orthogonality_rank2(self):
        st = measures.normalize(MeasureSpec.sato_tate(2))
        chars = measures.default_characters(2)
        for i, (_, ci) in enumerate(chars):
            for j, (_, cj) in enumerate(chars):
                got = measures.pair(st, ci * cj.bar())
                assert abs(got - (1.0 if i == j else 0.0)) < 1e-10

    def test_character_orthogonality_rank3(self):
        st = measures.normalize(MeasureSpec.sato_tate(3))
        chars = measures.default_characters(3)
        for i, (_, ci) in enumerate(chars):
            for j, (_, cj) in enumerate(chars):
                got = measures.pair(st, ci * cj.bar())
                assert abs(got - (1.0 if i == j else 0.0)) < 1e-9

    def test_plancherel_chi1_squared_golden(self):
        # ⟨χ_1²⟩ against the rank-2 p-Plancherel measure is exactly 1 + 1/p.
        chars = dict(measures.default_characters(2))
        for p in (2, 5, 13):
            pl = measures.normalize(MeasureSpec.plancherel(2, p))
            got = measures.pair(pl, chars["chi_1"] * chars["chi_1"])
            assert abs(got - (1.0 + 1.0 / p)) < 1e-9


class TestSampling:
    def test_determinism_and_seed_sensitivity(self):
        spec = measures.normalize(MeasureSpec.plancherel(2, 3))
        a = measures.sample_angles(spec, 500, seed=42)
        b = measures.sample_angles(spec, 500, seed=42)
        c = measures.sample_angles(spec, 500, seed=43)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_stats_reported(self):
        spec = measures.normalize(MeasureSpec.sato_tate(2))
        arr, stats = measures.sample_angles(spec, 200, seed=7, return_stats=True)
        assert arr.shape == (200, 2)
        assert 0 < stats["acceptance_rate"] <= 1
        assert stats["proposals"] >= 200

    def test_sampler_moments_match_quadrature(self):
        spec = measures.normalize(MeasureSpec.plancherel(2, 5))
        chars = dict(measures.default_characters(2))
        f = chars["chi_1"] * chars["chi_1"]
        arr = measures.sample_angles(spec, 40_000, seed=5)
        vals = f.evaluate_many(np.exp(1j * arr)).real
        mean = float(np.mean(vals))
        stderr = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
        assert abs(mean - measures.pair(spec, f)) < 5 * stderr

    def test_sample_returns_torus_points(self):
        spec = measures.normalize(MeasureSpec.sato_tate(2))
        pts = measures.sample(spec, 10, seed=1)
        assert len(pts) == 10
        assert all(isinstance(x, TorusPoint) for x in pts)


class TestEmpiricalMeasure:
    def test_pair_and_len(self):
        spec = measures.normalize(MeasureSpec.sato_tate(2))
        pts = measures.sample(spec, 5_000, seed=3)
        emp = EmpiricalMeasure(2, pts)
        assert len(emp) == 5_000
        chars = dict(measures.default_characters(2))
        # ⟨χ_1²⟩_ST = 1; Monte Carlo with N=5000 stays well within 0.1.
        assert abs(emp.pair(chars["chi_1"] * chars["chi_1"]) - 1.0) < 0.1

    def test_flags_nontempered_atoms(self):
        from heckelab.satake import SatakeParameter

        emp = EmpiricalMeasure(2, [SatakeParameter.from_values([2.0, 0.5])])
        assert emp.nontempered == 1

    def test_empty_rejected_on_pair(self):
        emp = EmpiricalMeasure(2, [])
        with pytest.raises(ValidationError):
            emp.pair(SymLaurent.constant(2, 1))


class TestWeakConvergence:
    def test_discrepancy_decays_like_one_over_p(self):
        report = measures.weak_convergence_report(2, [5, 11, 23, 47, 97])
        gaps = report["max_discrepancy"]
        seq = [gaps[p] for p in (5, 11, 23, 47, 97)]
        assert all(a > b for a, b in zip(seq, seq[1:]))
        for p, g in gaps.items():
            assert g <= 10.0 / p

    def test_rejects_unsorted_primes(self):
        with pytest.raises(ValidationError):
            measures.weak_convergence_report(2, [11, 5])
