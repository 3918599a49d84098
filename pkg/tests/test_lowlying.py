"""One-level density functionals for the classical symmetry types."""

import json
import math
import warnings

import numpy as np
import pytest

from heckelab import lowlying as ll
from heckelab.errors import ValidationError
from heckelab.lowlying import PWTestFunction, SymmetryType, ZeroDataset

ALL_TYPES = list(SymmetryType)


class TestSymmetryType:
    def test_from_label_aliases(self):
        assert SymmetryType.from_label("SO_even") is SymmetryType.SO_EVEN
        assert SymmetryType.from_label("so-odd") is SymmetryType.SO_ODD
        assert SymmetryType.from_label("u") is SymmetryType.U
        assert SymmetryType.from_label("O") is SymmetryType.O
        with pytest.raises(ValidationError):
            SymmetryType.from_label("Sp")


class TestDensity:
    def test_limit_value_at_zero(self):
        assert ll.density_value(SymmetryType.SO_EVEN, 0.0) == pytest.approx(2.0)
        assert ll.density_value(SymmetryType.SO_ODD, 0.0) == pytest.approx(0.0)
        assert ll.density_value(SymmetryType.O, 0.0) == pytest.approx(1.0)
        assert ll.density_value(SymmetryType.U, 0.0) == 1.0

    def test_orthogonal_average_identity_pointwise(self):
        xs = np.linspace(-6, 6, 10001)
        avg = (
            ll.density_value(SymmetryType.SO_EVEN, xs)
            + ll.density_value(SymmetryType.SO_ODD, xs)
        ) / 2.0
        gap = np.max(np.abs(ll.density_value(SymmetryType.O, xs) - avg))
        assert gap == 0.0

    def test_atoms(self):
        assert ll.atom_weight(SymmetryType.U) == 0.0
        assert ll.atom_weight(SymmetryType.SO_EVEN) == 0.0
        assert ll.atom_weight(SymmetryType.SO_ODD) == 1.0
        assert ll.atom_weight(SymmetryType.O) == 0.5


class TestTestFunction:
    def test_positive_with_unit_peak(self):
        phi = PWTestFunction(0.5)
        xs = np.linspace(-30, 30, 1001)
        assert np.all(phi.phi(xs) >= 0)
        assert phi.phi(0.0) == pytest.approx(1.0)

    def test_fourier_side_support_and_mass(self):
        phi = PWTestFunction(0.4)
        assert phi.phi_hat(0.0) == pytest.approx(2.5)
        assert phi.phi_hat(0.41) == 0.0
        assert phi.phi_hat(-0.41) == 0.0
        # ∫Φ = Φ̂(0) (check by direct quadrature of the slowly decaying tail)
        xs = np.linspace(-2000, 2000, 4_000_001)
        integral = np.trapezoid(phi.phi(xs), xs)
        assert abs(integral - phi.phi_hat(0.0)) < 1e-3

    def test_beta_must_be_positive(self):
        with pytest.raises(ValidationError):
            PWTestFunction(0.0)


class TestPairings:
    @pytest.mark.parametrize("beta", [0.1, 0.3, 0.5, 0.9])
    @pytest.mark.parametrize("s", ALL_TYPES, ids=[s.value for s in ALL_TYPES])
    def test_quadrature_matches_closed_form(self, s, beta):
        phi = PWTestFunction(beta)
        got = ll.pair_density(s, phi)
        want = ll.closed_form_pairing(s, phi)
        tol = 1e-8 if s is SymmetryType.U else 1e-6
        assert abs(got - want) < tol

    def test_golden_value(self):
        got = ll.pair_density(SymmetryType.SO_ODD, PWTestFunction(0.5))
        assert abs(got - 2.5) < 1e-8

    def test_orthogonal_types_indistinguishable_below_one(self):
        phi = PWTestFunction(0.7)
        vals = {
            s: ll.closed_form_pairing(s, phi)
            for s in (SymmetryType.SO_EVEN, SymmetryType.SO_ODD, SymmetryType.O)
        }
        assert len({round(v, 12) for v in vals.values()}) == 1
        assert ll.closed_form_pairing(SymmetryType.U, phi) != vals[SymmetryType.O]

    def test_o_type_is_average_of_orthogonal_pairings(self):
        phi = PWTestFunction(0.3)
        even = ll.pair_density(SymmetryType.SO_EVEN, phi)
        odd = ll.pair_density(SymmetryType.SO_ODD, phi)
        assert ll.pair_density(SymmetryType.O, phi) == (even + odd) / 2.0

    def test_beta_above_one_warns_but_computes(self):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            val = ll.pair_density(SymmetryType.U, PWTestFunction(1.5))
        assert any("beta" in str(w.message).lower() for w in caught)
        assert math.isfinite(val)
        with pytest.raises(ValidationError):
            ll.closed_form_pairing(SymmetryType.U, PWTestFunction(1.5))


class TestEmpirical:
    def test_empirical_sum_scaling(self):
        z = ZeroDataset((1.0, 2.0), 2.0, math.e)  # log C = 2
        phi = PWTestFunction(0.5)
        want = (phi.phi(1.0 / math.pi) + phi.phi(2.0 / math.pi)) / 4.0
        assert ll.empirical_one_level(z, phi, 4) == pytest.approx(float(want))

    def test_uniform_model_approximates_unitary_density(self):
        # Zeros spaced like a unit-density point process on the rescaled axis
        # reproduce ∫Φ·W(U) = Φ̂(0) as the window grows.
        phi = PWTestFunction(0.5)
        z = ZeroDataset(tuple(), 2.0, 100.0)
        logc = z.log_conductor
        spacing = 2.0 * math.pi / logc
        gammas = [spacing * (k + 0.5) for k in range(2000)]
        gammas = [-g for g in reversed(gammas)] + gammas
        z = ZeroDataset(tuple(gammas), 2.0, 100.0)
        got = ll.empirical_one_level(z, phi, 1)
        assert abs(got - phi.phi_hat(0.0)) < 0.05

    def test_empty_dataset_gives_zero(self):
        z = ZeroDataset(tuple(), 1.0, 10.0)
        assert ll.empirical_one_level(z, PWTestFunction(0.5), 3) == 0.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            ZeroDataset((float("inf"),), 1.0, 10.0)
        with pytest.raises(ValidationError):
            ZeroDataset(tuple(), -1.0, 10.0)
        with pytest.raises(ValidationError):
            ZeroDataset(tuple(), 1.0, 0.5)
        with pytest.raises(ValidationError):
            ll.empirical_one_level(
                ZeroDataset(tuple(), 1.0, 10.0), PWTestFunction(0.5), 0
            )


class TestSymmetryDictionary:
    def test_rank_two_table(self):
        assert ll.sigma_to_symmetry(2, "trivial") is SymmetryType.SO_EVEN
        assert ll.sigma_to_symmetry(2, "det") is SymmetryType.SO_ODD
        assert ll.sigma_to_symmetry(2, "dim2") is SymmetryType.O
        with pytest.raises(ValidationError):
            ll.sigma_to_symmetry(2, "spin7")

    def test_higher_rank_is_unitary(self):
        assert ll.sigma_to_symmetry(3, "anything") is SymmetryType.U
        assert ll.sigma_to_symmetry(5, "trivial") is SymmetryType.U


class TestZeroLoading:
    def test_round_trip_with_default_sidecar(self, tmp_path):
        csv_path = tmp_path / "zeros.csv"
        csv_path.write_text("gamma\n0.5\n1.25\n-0.75\n")
        (tmp_path / "zeros.json").write_text(
            json.dumps({"mu": 50.0, "conductor_exponent": 2.0, "family_size": 7})
        )
        z, size = ll.load_zero_dataset(csv_path)
        assert z.gammas == (0.5, 1.25, -0.75)
        assert size == 7
        assert z.log_conductor == pytest.approx(2.0 * math.log(50.0))

    def test_missing_sidecar_key(self, tmp_path):
        csv_path = tmp_path / "zeros.csv"
        csv_path.write_text("0.5\n")
        (tmp_path / "zeros.json").write_text(json.dumps({"mu": 50.0}))
        with pytest.raises(ValidationError):
            ll.load_zero_dataset(csv_path)

    def test_malformed_ordinate_reports_line(self, tmp_path):
        csv_path = tmp_path / "zeros.csv"
        csv_path.write_text("0.5\nbogus\n")
        (tmp_path / "zeros.json").write_text(
            json.dumps({"mu": 50.0, "conductor_exponent": 2.0, "family_size": 1})
        )
        with pytest.raises(ValidationError) as info:
            ll.load_zero_dataset(csv_path)
        assert info.value.payload.get("line") == 2
