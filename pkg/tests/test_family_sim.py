"""Synthetic families: generation, counting, pairings, ingestion."""

import math

import numpy as np
import pytest

from heckelab import family_sim as fs
from heckelab import measures
from heckelab import weyl_law as wl
from heckelab.errors import ValidationError
from heckelab.satake import SatakeParameter, eigenvalue_from_parameter

DIMS2 = wl.GroupDims.for_pgl(2)
PARAMS = wl.MainTermParams(vol=1.0)


def small_family(mu=20.0, primes=(3, 5), seed=99, sigma=None):
    return fs.generate_family(2, mu, primes, DIMS2, PARAMS, seed, sigma=sigma)


class TestGeneration:
    def test_size_matches_prediction(self):
        fam = small_family()
        want = round(wl.count_prediction(DIMS2, PARAMS, 20.0))
        assert len(fam) == want
        assert fam.primes == [3, 5]
        assert fam.ktype == "trivial"

    def test_counting_function_tracks_prediction(self):
        fam = small_family(mu=30.0)
        for t in np.linspace(3.0, 30.0, 12):
            pred = wl.count_prediction(DIMS2, PARAMS, float(t))
            assert abs(fs.counting_function(fam, float(t)) - pred) <= 1.0

    def test_equivariant_exponent(self):
        fam = small_family(mu=40.0, sigma="det")
        want = round(wl.count_prediction(DIMS2, PARAMS, 40.0, "equivariant"))
        assert len(fam) == want
        assert fam.ktype == "det"
        # counting still matches the (equivariant) prediction within one
        for t in (10.0, 20.0, 30.0, 40.0):
            pred = wl.count_prediction(DIMS2, PARAMS, t, "equivariant")
            assert abs(fs.counting_function(fam, t) - pred) <= 1.0

    def test_seed_determinism(self):
        a = small_family(seed=7)
        b = small_family(seed=7)
        c = small_family(seed=8)
        assert np.array_equal(a.values_at(3), b.values_at(3))
        assert not np.array_equal(a.values_at(3), c.values_at(3))

    def test_empty_family_at_tiny_mu(self):
        fam = small_family(mu=0.5)
        assert len(fam) == 0
        with pytest.raises(ValidationError):
            fs.empirical_pairing(fam, 3, measures.default_characters(2)[0][1])

    def test_forms_materialize_tempered_parameters(self):
        fam = small_family(mu=10.0)
        forms = fam.forms()
        assert len(forms) == len(fam)
        assert all(f.params[3].is_tempered(1e-6) for f in forms)
        mus = [f.mu_j for f in forms]
        assert mus == sorted(mus)


class TestPairings:
    def test_single_prime_pairing_matches_quadrature(self):
        fam = small_family(mu=60.0)  # ~3647 forms
        chars = dict(measures.default_characters(2))
        f = chars["chi_1"] * chars["chi_1"]
        for p in (3, 5):
            spec = measures.normalize(measures.MeasureSpec.plancherel(2, p))
            want = measures.pair(spec, f)
            got = fs.empirical_pairing(fam, p, f)
            assert abs(got["mean"] - want) <= 4 * got["stderr"] + 1e-12

    def test_multi_prime_pairing_factorizes(self):
        fam = small_family(mu=60.0)
        chars = dict(measures.default_characters(2))
        f = chars["chi_1"] * chars["chi_1"]
        joint = fs.multi_prime_pairing(fam, [3, 5], [f, f])
        sep = 1.0
        for p in (3, 5):
            spec = measures.normalize(measures.MeasureSpec.plancherel(2, p))
            sep *= measures.pair(spec, f)
        assert abs(joint["mean"] - sep) <= 5 * joint["stderr"]

    def test_multi_prime_validation(self):
        fam = small_family(mu=10.0)
        chi = measures.default_characters(2)[0][1]
        with pytest.raises(ValidationError):
            fs.multi_prime_pairing(fam, [3, 3], [chi, chi])
        with pytest.raises(ValidationError):
            fs.multi_prime_pairing(fam, [3, 5], [chi])


class TestSequences:
    def test_strictly_increasing_primes_required(self):
        with pytest.raises(ValidationError):
            fs.validate_sequence([(5, 10.0), (3, 20.0)])

    def test_growth_warning(self):
        assert fs.validate_sequence([(2, 100.0), (3, 100.0)])  # ratio grows
        assert fs.validate_sequence([(2, 100.0), (3, 1000.0)]) == []

    def test_sato_tate_run_converges(self):
        report = fs.sato_tate_run(
            2,
            [(5, 25.0), (11, 40.0)],
            measures.default_test_functions(2),
            DIMS2,
            PARAMS,
            seed=123,
            max_forms=4000,
        )
        assert report["verdict"] is True
        assert len(report["rows"]) == 2
        final = report["rows"][-1]["entries"]
        assert all(e["discrepancy"] <= e["tolerance"] for e in final)


class TestIngestion:
    def write_csv(self, path, rows, header="mu,lambda_3_1"):
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(str(x) for x in row) + "\n")

    def make_rows(self, count=50, seed=0):
        rng = np.random.default_rng(seed)
        rows = []
        for j in range(count):
            theta = float(rng.uniform(0.05, math.pi - 0.05))
            param = SatakeParameter.from_angles([theta, -theta])
            lam = eigenvalue_from_parameter(param, 1, 3).real
            rows.append((10.0 + j, lam, param))
        return rows

    def test_round_trip(self, tmp_path):
        rows = self.make_rows()
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(mu, lam) for mu, lam, _ in rows])
        fam = fs.ingest_dataset(path)
        assert len(fam) == len(rows)
        assert fam.provenance.startswith("ingested:")
        for j, (_, _, param) in enumerate(rows):
            got = fam.values_at(3)[j]
            diff = max(min(abs(v - w) for w in got) for v in param.values)
            assert diff < 1e-8

    def test_lenient_keeps_nontempered_and_flags(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0), (11.0, 4.0)])  # λ=4 non-tempered at p=3
        fam = fs.ingest_dataset(path)
        assert len(fam) == 2
        assert list(fam.nontempered[3]) == [False, True]
        assert fam.quarantine == []

    def test_strict_mode_quarantines_nontempered(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0), (11.0, 4.0)])
        fam = fs.ingest_dataset(path, strict_tempered=True)
        assert len(fam) == 1
        assert len(fam.quarantine) == 1
        assert fam.quarantine[0][0] == 3  # csv row number (1-based, after header)

    def test_malformed_row_reports_row_number(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0), (11.0, "oops")])
        with pytest.raises(ValidationError) as info:
            fs.ingest_dataset(path)
        assert info.value.payload.get("row") == 3

    def test_nan_eigenvalue_is_quarantined(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0), (11.0, float("nan"))])
        fam = fs.ingest_dataset(path)
        assert len(fam) == 1
        assert len(fam.quarantine) == 1

    def test_inconsistent_prime_columns_rejected(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0, 2.0)], header="mu,lambda_3_1,lambda_5_2")
        with pytest.raises(ValidationError):
            fs.ingest_dataset(path)

    def test_unknown_column_rejected(self, tmp_path):
        path = tmp_path / "fam.csv"
        self.write_csv(path, [(10.0, 1.0)], header="mu,eigen_3_1")
        with pytest.raises(ValidationError):
            fs.ingest_dataset(path)
