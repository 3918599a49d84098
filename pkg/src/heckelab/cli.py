"""Command-line front end.

Every run resolves a configuration (defaults < TOML file < flags <
HECKELAB_SEED), executes one subcommand, and emits a JSON artifact that
embeds the resolved configuration and seed, so any artifact can be
reproduced from its own contents.  Bulk data (coset matrices, samples,
plot curves) goes to CSV side files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, family_sim, kernel, lowlying, measures, verify
from . import weyl_law as wl
from .config import load_config
from .errors import HeckelabError, ValidationError
from .padic_hecke import (
    Cocharacter,
    HeckeElement,
    coset_diagonal_counts,
    coset_matrix_array,
    degree,
    enumeration_cost,
)
from .satake import satake_params_from_eigenvalues, satake_transform

__all__ = ["main"]


def _parse_int_list(text: str, label: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValidationError(f"could not parse {label} as comma-separated integers", value=text)


def _parse_float_list(text: str, label: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValidationError(f"could not parse {label} as comma-separated numbers", value=text)


def _resolve_config(args):
    overrides = {}
    for key in ("n", "seed", "mu", "grid"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "p", None) is not None:
        overrides["primes"] = [args.p]
    if getattr(args, "primes", None) is not None:
        overrides["primes"] = _parse_int_list(args.primes, "primes")
    if getattr(args, "strict_tempered", False):
        overrides["strict_tempered"] = True
    if getattr(args, "raw_density", False):
        overrides["raw_density"] = True
    return load_config(getattr(args, "config", None), overrides)


def _emit(args, payload, conf) -> None:
    payload = dict(payload)
    payload["config"] = conf.as_dict()
    payload["seed"] = int(conf.seed)
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if header:
            writer.writerow(header)
        writer.writerows(rows)


def _cmd_cosets(args, conf) -> dict:
    p = conf.primes[0] if args.p is None else args.p
    parts = _parse_int_list(args.omega, "omega")
    omega = Cocharacter.of(tuple(parts), n=conf.n)
    payload = {
        "command": "cosets",
        "n": conf.n,
        "p": int(p),
        "omega": list(omega.parts),
        "height": omega.height,
        "degree": degree(omega, p),
        "diagonal_counts": {
            ",".join(map(str, b)): c for b, c in sorted(coset_diagonal_counts(omega, p).items())
        },
        "enumeration_cost": enumeration_cost(omega, p),
    }
    if args.materialize or args.csv:
        arr = coset_matrix_array(omega, p, budget=args.budget, threads=args.threads)
        rows = [[str(int(x)) for x in row] for row in np.asarray(arr).reshape(arr.shape[0], -1)]
        if args.csv:
            n = conf.n
            header = [f"m_{i}_{j}" for i in range(n) for j in range(n)]
            _write_csv(args.csv, header, rows)
            payload["matrices_csv"] = str(args.csv)
        else:
            payload["matrices"] = rows
    return payload


def _cmd_satake(args, conf) -> dict:
    p = conf.primes[0] if args.p is None else args.p
    if (args.omega is None) == (args.lambdas is None):
        raise ValidationError("provide exactly one of --omega (transform) or --lambdas (extraction)")
    if args.omega is not None:
        omega = Cocharacter.of(tuple(_parse_int_list(args.omega, "omega")), n=conf.n)
        image = satake_transform(HeckeElement(conf.n, p, {omega: 1}))
        orbit = {
            ",".join(map(str, exps)): [str(a), str(b)]
            for exps, (a, b) in sorted(image.orbit_coeffs().items())
        }
        return {
            "command": "satake",
            "mode": "transform",
            "n": conf.n,
            "p": int(p),
            "omega": list(omega.parts),
            "orbit_coefficients": orbit,
            "coefficient_format": "a + b*sqrt(p)",
        }
    lams = _parse_float_list(args.lambdas, "lambdas")
    if len(lams) != conf.n - 1:
        raise ValidationError(
            "need n-1 Hecke eigenvalues", n=conf.n, received=len(lams)
        )
    param = satake_params_from_eigenvalues(lams, p)
    return {
        "command": "satake",
        "mode": "extraction",
        "n": conf.n,
        "p": int(p),
        "eigenvalues": lams,
        "roots": [[v.real, v.imag] for v in param.values],
        "moduli": [abs(v) for v in param.values],
        "tempered": param.is_tempered(1e-8),
        "residual": param.residual,
    }


def _measure_spec(args, conf, p):
    kind = args.kind
    if kind == "plancherel":
        return measures.MeasureSpec.plancherel(conf.n, p)
    if kind == "sato_tate":
        return measures.MeasureSpec.sato_tate(conf.n)
    raise ValidationError("unknown measure kind", kind=kind)


def _cmd_measure(args, conf) -> dict:
    p = conf.primes[0] if args.p is None else args.p
    grid = int(conf.quadrature["grid"])
    spec = _measure_spec(args, conf, p)
    if not conf.raw_density:
        spec = measures.normalize(spec, grid=grid)
    payload = {
        "command": "measure",
        "kind": args.kind,
        "n": conf.n,
        "p": int(p) if args.kind == "plancherel" else None,
        "grid": grid,
        "normalization": spec.normalization,
        "normalization_error": spec.normalization_error,
    }
    if args.pair_defaults:
        if conf.raw_density:
            raise ValidationError("pairing requires a normalized measure")
        payload["pairings"] = {
            name: measures.pair(spec, f, grid=grid)
            for name, f in measures.default_test_functions(conf.n)
        }
    if args.samples:
        if conf.raw_density:
            raise ValidationError("sampling requires a normalized measure")
        angles, stats = measures.sample_angles(
            spec, args.samples, seed=conf.seed, return_stats=True
        )
        out = args.samples_csv or "measure_samples.csv"
        _write_csv(
            out,
            [f"theta_{k+1}" for k in range(conf.n - 1)],
            [[repr(float(x)) for x in row] for row in np.atleast_2d(angles)],
        )
        payload["samples_csv"] = str(out)
        payload["acceptance_rate"] = stats["acceptance_rate"]
    if args.plot_data:
        if conf.n > 3:
            raise ValidationError("plot-data supports ranks 2 and 3 only", n=conf.n)
        c = spec.normalization if spec.normalization is not None else 1.0
        xs = np.linspace(0.0, 2 * np.pi, 512, endpoint=False)
        if conf.n == 2:
            free = xs[:, None]
        else:
            free = np.stack([xs, np.zeros_like(xs)], axis=1)
        dens = c * measures.raw_density_arrays(spec, free)
        _write_csv(
            args.plot_data,
            ["theta_1", "density"],
            [[repr(float(x)), repr(float(y))] for x, y in zip(xs, dens)],
        )
        payload["plot_data_csv"] = str(args.plot_data)
    return payload


def _cmd_family(args, conf) -> dict:
    if args.ingest:
        fam = family_sim.ingest_dataset(
            args.ingest, strict_tempered=conf.strict_tempered
        )
        payload = {
            "command": "family",
            "mode": "ingest",
            "path": str(args.ingest),
            "size": len(fam),
            "n": fam.n,
            "primes": fam.primes,
            "quarantine": [[row, reason] for row, reason in fam.quarantine],
            "nontempered_counts": {
                str(p): int(fam.nontempered[p].sum()) for p in fam.primes
            },
        }
        if len(fam):
            payload["pairings"] = {
                str(p): {
                    name: family_sim.empirical_pairing(fam, p, f)
                    for name, f in measures.default_characters(fam.n)
                }
                for p in fam.primes
            }
        return payload
    dims = wl.GroupDims.for_pgl(conf.n)
    params = wl.MainTermParams(
        vol=conf.vol_inputs["vol_M"] if args.sigma is None else conf.vol_inputs["vol_MK"],
        d_sigma=conf.vol_inputs["d_sigma"],
        delta_alpha=1,
        n_Z_alpha=conf.vol_inputs["n_Z"],
    )
    fam = family_sim.generate_family(
        conf.n, conf.mu, conf.primes, dims, params, seed=conf.seed, sigma=args.sigma
    )
    payload = {
        "command": "family",
        "mode": "synthetic",
        "mu": conf.mu,
        "sigma": args.sigma,
        "size": len(fam),
        "primes": fam.primes,
        "empty": len(fam) == 0,
    }
    if len(fam):
        payload["pairings"] = {
            str(p): {
                name: family_sim.empirical_pairing(fam, p, f)
                for name, f in measures.default_characters(conf.n)
            }
            for p in fam.primes
        }
        kind = "equivariant" if args.sigma is not None else "nonequivariant"
        checkpoints = []
        for t in np.linspace(conf.mu / 10, conf.mu, 10):
            checkpoints.append(
                {
                    "t": float(t),
                    "empirical": family_sim.counting_function(fam, float(t)),
                    "predicted": wl.count_prediction(dims, params, float(t), kind),
                }
            )
        payload["counting"] = checkpoints
    return payload


def _cmd_lowlying(args, conf) -> dict:
    symmetry = lowlying.SymmetryType.from_label(args.symmetry)
    phi = lowlying.PWTestFunction(args.beta)
    pairing = lowlying.pair_density(symmetry, phi)
    payload = {
        "command": "lowlying",
        "symmetry": symmetry.value,
        "beta": args.beta,
        "pair_density": pairing,
        "atom_weight": lowlying.atom_weight(symmetry),
        "verified_regime": args.beta < 1,
    }
    if args.beta < 1:
        closed = lowlying.closed_form_pairing(symmetry, phi)
        payload["closed_form"] = closed
        payload["difference"] = abs(pairing - closed)
    if args.zeros:
        dataset, family_size = lowlying.load_zero_dataset(args.zeros, args.sidecar)
        payload["empirical_one_level"] = lowlying.empirical_one_level(
            dataset, phi, family_size
        )
        payload["zero_count"] = len(dataset.gammas)
        payload["family_size"] = family_size
    if args.plot_data:
        xs = np.linspace(-5.0, 5.0, 1001)
        ys = lowlying.density_value(symmetry, xs)
        _write_csv(
            args.plot_data,
            ["x", "density_smooth"],
            [[repr(float(x)), repr(float(y))] for x, y in zip(xs, ys)],
        )
        payload["plot_data_csv"] = str(args.plot_data)
    return payload


def _cmd_weyl(args, conf) -> dict:
    dims = wl.GroupDims.for_pgl(conf.n, args.big_n)
    params = wl.MainTermParams(
        vol=conf.vol_inputs["vol_M"],
        d_sigma=conf.vol_inputs["d_sigma"],
        delta_alpha=1,
        n_Z_alpha=conf.vol_inputs["n_Z"],
    )
    budget = wl.constant_budget(dims)
    payload = {
        "command": "weyl",
        "n": conf.n,
        "dims": {"d": dims.d, "dimK": dims.dimK, "N": dims.N},
        "constant_budget": {k: str(v) for k, v in budget.as_dict().items()},
        "nonvacuous": {
            kind: wl.is_nonvacuous(kind, dims)
            for kind in ("nonequivariant", "equivariant")
        },
        "remainder_exponents": {
            kind: str(wl.remainder_exponent(kind, dims, 0))
            for kind in ("nonequivariant", "equivariant")
        },
        "main_terms": {
            kind: wl.main_term(kind, dims, params, conf.mu)
            for kind in ("nonequivariant", "equivariant")
        },
        "count_prediction": wl.count_prediction(dims, params, conf.mu),
        "mu": conf.mu,
    }
    return payload


def _cmd_verify_all(args, conf) -> tuple:
    report = verify.run_all(conf, threads=args.threads)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']} (tolerance: {check['tolerance']})")
    print("all checks passed" if report["all_passed"] else "SOME CHECKS FAILED")
    return report, 0 if report["all_passed"] else 2


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--seed", type=int, help="override the experiment seed")
    common.add_argument("--threads", type=int, default=1, help="worker thread count")
    common.add_argument("--out", help="write the JSON artifact to this path")
    common.add_argument("--n", type=int, help="rank n of PGL(n)")

    parser = argparse.ArgumentParser(
        prog="heckelab",
        description="Spherical Hecke algebra toolkit: cosets, Satake transform, "
        "Plancherel/Sato-Tate measures, synthetic families, low-lying densities.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("cosets", parents=[common], help="enumerate basis cosets")
    sp.add_argument("--p", type=int, help="prime")
    sp.add_argument("--omega", required=True, help="cocharacter, e.g. 2,1,0")
    sp.add_argument("--budget", type=int, default=None, help="enumeration work budget")
    sp.add_argument("--materialize", action="store_true", help="include matrices in the artifact")
    sp.add_argument("--csv", help="write matrices to this CSV file")
    sp.set_defaults(func=_cmd_cosets)

    sp = sub.add_parser("satake", parents=[common], help="Satake transform / extraction")
    sp.add_argument("--p", type=int, help="prime")
    sp.add_argument("--omega", help="basis cocharacter to transform")
    sp.add_argument("--lambdas", help="comma-separated Hecke eigenvalues to invert")
    sp.set_defaults(func=_cmd_satake)

    sp = sub.add_parser("measure", parents=[common], help="Plancherel / Sato-Tate measures")
    sp.add_argument("--p", type=int, help="prime")
    sp.add_argument("--kind", choices=["plancherel", "sato_tate"], default="plancherel")
    sp.add_argument("--grid", type=int, help="quadrature grid per angle")
    sp.add_argument("--samples", type=int, help="draw this many samples to CSV")
    sp.add_argument("--samples-csv", help="sample output path")
    sp.add_argument("--pair-defaults", action="store_true", help="pair the default test functions")
    sp.add_argument("--plot-data", help="write a density slice as x,y CSV")
    sp.add_argument("--raw-density", action="store_true", help="skip normalization")
    sp.set_defaults(func=_cmd_measure)

    sp = sub.add_parser("family", parents=[common], help="synthetic families / dataset ingestion")
    sp.add_argument("--mu", type=float, help="spectral cutoff")
    sp.add_argument("--primes", help="comma-separated primes")
    sp.add_argument("--sigma", help="K-type label for an isotypic family")
    sp.add_argument("--ingest", help="CSV dataset to ingest instead of simulating")
    sp.add_argument("--strict-tempered", action="store_true", help="quarantine non-tempered rows")
    sp.set_defaults(func=_cmd_family)

    sp = sub.add_parser("lowlying", parents=[common], help="one-level density functionals")
    sp.add_argument("--symmetry", required=True, help="U, SO_even, SO_odd, or O")
    sp.add_argument("--beta", type=float, required=True, help="Fourier support radius")
    sp.add_argument("--zeros", help="CSV of zero ordinates")
    sp.add_argument("--sidecar", help="JSON sidecar for the zero dataset")
    sp.add_argument("--plot-data", help="write the density curve as x,y CSV")
    sp.set_defaults(func=_cmd_lowlying)

    sp = sub.add_parser("weyl", parents=[common], help="Weyl-law bookkeeping")
    sp.add_argument("--mu", type=float, help="spectral cutoff")
    sp.add_argument("--big-n", type=int, default=None, help="embedding dimension bound N")
    sp.set_defaults(func=_cmd_weyl)

    sp = sub.add_parser("verify-all", parents=[common], help="run the acceptance suite")
    sp.set_defaults(func=_cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        conf = _resolve_config(args)
        result = args.func(args, conf)
        if isinstance(result, tuple):
            payload, code = result
        else:
            payload, code = result, 0
        _emit(args, payload, conf)
        return code
    except HeckelabError as exc:
        sys.stderr.write(json.dumps(exc.as_json(), sort_keys=True) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
