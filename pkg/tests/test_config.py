"""Configuration resolution: defaults, TOML files, overrides, environment."""

import pytest

from heckelab.config import DEFAULTS, ExperimentConfig, load_config
from heckelab.errors import ValidationError


class TestDefaults:
    def test_defaults_resolve(self):
        cfg = load_config()
        assert cfg.n == 2
        assert cfg.primes == (2, 3, 5)
        assert cfg.seed == 12345
        assert cfg.quadrature["grid"] == 256
        assert cfg.strict_tempered is False

    def test_as_dict_round_trips(self):
        cfg = load_config()
        again = ExperimentConfig.from_dict(cfg.as_dict())
        assert again == cfg


class TestValidation:
    def test_rank_bound(self):
        with pytest.raises(ValidationError):
            load_config(overrides={"n": 1})

    def test_primes_must_be_prime_and_distinct(self):
        with pytest.raises(ValidationError):
            load_config(overrides={"primes": [4]})
        with pytest.raises(ValidationError):
            load_config(overrides={"primes": [3, 3]})

    def test_bad_prime_clash(self):
        with pytest.raises(ValidationError):
            load_config(overrides={"primes": [2, 3], "bad_primes": [3]})

    def test_primes_sorted_canonically(self):
        cfg = load_config(overrides={"primes": [7, 2]})
        assert cfg.primes == (2, 7)

    def test_scalar_bounds(self):
        with pytest.raises(ValidationError):
            load_config(overrides={"mu": 0.0})
        with pytest.raises(ValidationError):
            load_config(overrides={"kappa": -1})
        with pytest.raises(ValidationError):
            load_config(overrides={"seed": 2**64})
        with pytest.raises(ValidationError):
            load_config(overrides={"grid": 4})
        with pytest.raises(ValidationError):
            load_config(overrides={"tolerance": 0.0})

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict({"wibble": 1})
        with pytest.raises(ValidationError):
            ExperimentConfig.from_dict({"modes": {"turbo": True}})


class TestFileAndOverrides:
    def test_toml_file_and_override_precedence(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text(
            "n = 3\nprimes = [7]\nmu = 50.0\n\n[quadrature]\ngrid = 128\n"
        )
        cfg = load_config(path)
        assert (cfg.n, cfg.primes, cfg.mu) == (3, (7,), 50.0)
        assert cfg.quadrature["grid"] == 128
        over = load_config(path, overrides={"mu": 75.0, "grid": 64})
        assert over.mu == 75.0
        assert over.quadrature["grid"] == 64
        assert over.n == 3  # non-overridden file values survive

    def test_mode_overrides_route_to_modes(self):
        cfg = load_config(overrides={"strict_tempered": True, "raw_density": True})
        assert cfg.strict_tempered is True
        assert cfg.raw_density is True

    def test_none_overrides_ignored(self):
        cfg = load_config(overrides={"mu": None})
        assert cfg.mu == DEFAULTS["mu"]

    def test_missing_file(self):
        with pytest.raises(ValidationError):
            load_config("/nonexistent/conf.toml")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("n = = 3\n")
        with pytest.raises(ValidationError):
            load_config(path)


class TestEnvironmentSeed:
    def test_env_seed_wins(self, monkeypatch):
        monkeypatch.setenv("HECKELAB_SEED", "777")
        cfg = load_config(overrides={"seed": 5})
        assert cfg.seed == 777

    def test_env_seed_must_be_integer(self, monkeypatch):
        monkeypatch.setenv("HECKELAB_SEED", "lots")
        with pytest.raises(ValidationError):
            load_config()
