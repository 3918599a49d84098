"""Experiment configuration: defaults, TOML files, flag overrides.

Precedence: built-in defaults < config file < explicit overrides (CLI
flags) < the HECKELAB_SEED environment variable (seed only).  The resolved
configuration is embedded verbatim in every artifact so a run can be
reproduced from the artifact alone.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .errors import ValidationError

__all__ = ["ExperimentConfig", "load_config", "DEFAULTS"]

DEFAULTS = {
    "n": 2,
    "primes": [2, 3, 5],
    "kappa": 1,
    "mu": 100.0,
    "seed": 12345,
    "bad_primes": [],
    "vol_inputs": {"vol_M": 1.0, "vol_MK": 1.0, "d_sigma": 1, "n_Z": 1},
    "quadrature": {"grid": 256, "tolerance": 1e-6},
    "modes": {"strict_tempered": False, "raw_density": False},
}


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    primes: tuple
    kappa: int
    mu: float
    seed: int
    bad_primes: tuple
    vol_inputs: dict
    quadrature: dict
    strict_tempered: bool
    raw_density: bool

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("rank n must be at least 2", n=self.n)
        primes = tuple(int(p) for p in self.primes)
        if len(set(primes)) != len(primes):
            raise ValidationError("primes must be distinct", primes=list(primes))
        for p in primes:
            if not _is_prime(p):
                raise ValidationError("not a prime", value=p)
        bad = tuple(sorted(int(p) for p in self.bad_primes))
        clash = sorted(set(primes) & set(bad))
        if clash:
            raise ValidationError(
                "primes must avoid the configured bad-prime set", clash=clash
            )
        object.__setattr__(self, "primes", tuple(sorted(primes)))
        object.__setattr__(self, "bad_primes", bad)
        if self.kappa < 0:
            raise ValidationError("kappa must be nonnegative", kappa=self.kappa)
        if not self.mu > 0:
            raise ValidationError("mu must be positive", mu=self.mu)
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 bits", seed=self.seed)
        vol = dict(DEFAULTS["vol_inputs"], **self.vol_inputs)
        if vol["vol_M"] <= 0 or vol["vol_MK"] <= 0:
            raise ValidationError("volumes must be positive", vol_inputs=vol)
        if int(vol["d_sigma"]) < 1 or int(vol["n_Z"]) < 0:
            raise ValidationError("invalid multiplicity inputs", vol_inputs=vol)
        object.__setattr__(self, "vol_inputs", vol)
        quad = dict(DEFAULTS["quadrature"], **self.quadrature)
        if int(quad["grid"]) < 8:
            raise ValidationError("quadrature grid too small", grid=quad["grid"])
        if not quad["tolerance"] > 0:
            raise ValidationError(
                "tolerances must be positive", tolerance=quad["tolerance"]
            )
        object.__setattr__(self, "quadrature", quad)

    def as_dict(self) -> dict:
        """Plain-type canonical form embedded in artifacts."""
        return {
            "n": int(self.n),
            "primes": [int(p) for p in self.primes],
            "kappa": int(self.kappa),
            "mu": float(self.mu),
            "seed": int(self.seed),
            "bad_primes": [int(p) for p in self.bad_primes],
            "vol_inputs": {
                "vol_M": float(self.vol_inputs["vol_M"]),
                "vol_MK": float(self.vol_inputs["vol_MK"]),
                "d_sigma": int(self.vol_inputs["d_sigma"]),
                "n_Z": int(self.vol_inputs["n_Z"]),
            },
            "quadrature": {
                "grid": int(self.quadrature["grid"]),
                "tolerance": float(self.quadrature["tolerance"]),
            },
            "modes": {
                "strict_tempered": bool(self.strict_tempered),
                "raw_density": bool(self.raw_density),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        merged = {k: v for k, v in DEFAULTS.items()}
        for key, value in data.items():
            if key not in DEFAULTS and key != "modes":
                raise ValidationError("unknown configuration key", key=key)
            if isinstance(DEFAULTS.get(key), dict):
                merged[key] = dict(DEFAULTS[key], **value)
            else:
                merged[key] = value
        modes = merged.pop("modes")
        unknown_modes = set(modes) - set(DEFAULTS["modes"])
        if unknown_modes:
            raise ValidationError("unknown mode flags", flags=sorted(unknown_modes))
        return cls(
            n=int(merged["n"]),
            primes=tuple(merged["primes"]),
            kappa=int(merged["kappa"]),
            mu=float(merged["mu"]),
            seed=int(merged["seed"]),
            bad_primes=tuple(merged["bad_primes"]),
            vol_inputs=dict(merged["vol_inputs"]),
            quadrature=dict(merged["quadrature"]),
            strict_tempered=bool(modes.get("strict_tempered", False)),
            raw_density=bool(modes.get("raw_density", False)),
        )


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Resolve the configuration from defaults, an optional TOML file, CLI
    overrides, and the seed environment variable."""
    data: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as handle:
                data = tomllib.load(handle)
        except FileNotFoundError:
            raise ValidationError("config file not found", path=str(path))
        except tomllib.TOMLDecodeError as exc:
            raise ValidationError(
                "config file is not valid TOML", path=str(path), reason=str(exc)
            )
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in ("strict_tempered", "raw_density"):
            data.setdefault("modes", {})
            data["modes"][key] = value
        elif key in ("vol_M", "vol_MK", "d_sigma", "n_Z"):
            data.setdefault("vol_inputs", {})
            data["vol_inputs"][key] = value
        elif key in ("grid", "tolerance"):
            data.setdefault("quadrature", {})
            data["quadrature"][key] = value
        else:
            data[key] = value
    env_seed = os.environ.get("HECKELAB_SEED")
    if env_seed is not None:
        try:
            data["seed"] = int(env_seed)
        except ValueError:
            raise ValidationError(
                "HECKELAB_SEED must be an integer", value=env_seed
            )
    return ExperimentConfig.from_dict(data)
