"""Command-line front end: build lattices, verify them, compare closures.

Commands: build, verify, kinetic, subsystem, moments, report.
Exit codes: 0 pass, 1 verification failure, 2 usage/config error,
3 math-domain error.  All artifacts are JSON; ``report`` can re-emit
residual-versus-epsilon sweeps as CSV.  MCF_THREADS caps sample parallelism.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys

import numpy as np

from .errors import DomainError, LatticeBuildError
from .jets import Jet
from .lattice import (
    CoefficientLattice,
    SeedSpec,
    build_lattice,
    exponential_seed,
    max_kappa_index,
)
from .symtensor import SymTensor
from .verification import run_kinetic_suite, run_subsystem_suite, run_verification

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


class ConfigError(ValueError):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON from {path}: {exc}") from exc


def _dump_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def seed_from_config(cfg: dict) -> tuple[SeedSpec, int, int]:
    """Parse a build config into (seed, N, K); raises ConfigError on misuse."""
    try:
        N = int(cfg["N"])
        K = int(cfg["K"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("config needs integer fields N and K") from exc
    lambda0 = float(cfg.get("lambda0", 0.0))
    jet_len = int(cfg.get("jet_len", 16))
    if jet_len < K + 2:
        raise ConfigError(f"jet_len {jet_len} too small: need >= K+2 = {K + 2}")
    scfg = cfg.get("seed", {"kind": "exp", "amplitude": 1.0})
    kind = scfg.get("kind", "exp")
    c_constants = tuple(float(x) for x in cfg.get("c_constants", scfg.get("c_constants", ())))
    kappas_cfg = cfg.get("kappas", scfg.get("kappas", "auto"))

    if kind == "exp":
        amplitude = float(scfg.get("amplitude", 1.0))
        seed = exponential_seed(amplitude, lambda0, jet_len, N, K, c_constants=c_constants)
        if kappas_cfg != "auto":
            seed = SeedSpec(seed.h00, tuple(float(x) for x in kappas_cfg), c_constants)
    elif kind == "poly":
        coeffs = np.asarray(scfg.get("coeffs", [1.0]), dtype=float)
        if coeffs.size < jet_len:
            coeffs = np.concatenate([coeffs, np.zeros(jet_len - coeffs.size)])
        if kappas_cfg == "auto":
            kappas = (0.0,) * max_kappa_index(N, K)
        else:
            kappas = tuple(float(x) for x in kappas_cfg)
        seed = SeedSpec(Jet(lambda0, coeffs[:jet_len]), kappas, c_constants)
    else:
        raise ConfigError(f"unknown seed kind {kind!r} (expected 'exp' or 'poly')")
    return seed, N, K


def _seed_hash(seed: SeedSpec) -> str:
    blob = json.dumps(seed.to_json_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def cmd_build(args) -> int:
    cfg = _load_json(args.config)
    seed, N, K = seed_from_config(cfg)
    lat = build_lattice(seed, N, K)
    _dump_json(lat.to_json_dict(), args.out)
    print(
        f"built lattice N={N} K={K} coefficients={lat.n_coefficients()} "
        f"seed={_seed_hash(seed)}"
    )
    return EXIT_PASS


def cmd_verify(args) -> int:
    lat = CoefficientLattice.from_json_dict(_load_json(args.lattice))
    report = run_verification(
        lat,
        samples=args.samples,
        eps_sweep=tuple(args.eps_sweep),
        tol=args.tol,
        rng_seed=args.rng_seed,
    )
    _dump_json(report, args.report)
    _print_checks(report)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def cmd_kinetic(args) -> int:
    if args.kernel != "exp":
        raise ConfigError("only the exponential kernel family is supported here")
    report = run_kinetic_suite(
        amplitude=args.amplitude,
        N=args.n,
        K=args.k,
        lambda0=args.lambda0,
        jet_len=args.jet_len,
        samples=args.samples,
        tol=args.tol,
        rng_seed=args.rng_seed,
        with_quadrature_sweep=not args.no_quadrature_sweep,
    )
    _dump_json(report, args.report)
    _print_checks(report)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def cmd_subsystem(args) -> int:
    report = run_subsystem_suite(
        N=args.n,
        K=args.k,
        lambda0=args.lambda0,
        jet_len=args.jet_len,
        samples=args.samples,
        tol=args.tol,
        rng_seed=args.rng_seed,
    )
    _dump_json(report, args.report)
    _print_checks(report)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def cmd_moments(args) -> int:
    from .closure import eval_moments
    from .symtensor import contract, iso_basis

    lat = CoefficientLattice.from_json_dict(_load_json(args.lattice))
    state = SymTensor.from_json_dict(_load_json(args.state))
    m = eval_moments(lat, state)
    _dump_json(m.to_json_dict(), args.out)
    full_trace = float(contract(m, iso_basis(0, m.rank), m.rank).values[0])
    print(f"moments rank={m.rank} t-contraction={full_trace!r}")
    return EXIT_PASS


def cmd_report(args) -> int:
    report = _load_json(args.report)
    rows = [("check", "eps", "residual")]
    for name, entry in sorted(report.get("checks", {}).items()):
        sweep = entry.get("sweep")
        if sweep:
            for eps, res in sorted(sweep.items(), key=lambda kv: float(kv[0])):
                rows.append((name, eps, repr(float(res))))
        elif "residual" in entry:
            rows.append((name, "", repr(float(entry["residual"]))))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(out).writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_PASS


def _print_checks(report: dict) -> None:
    for name, entry in sorted(report["checks"].items()):
        status = "PASS" if entry["pass"] else "FAIL"
        if not entry.get("gated", True):
            status = "INFO"
        if "slope" in entry:
            detail = f"slope={entry['slope']:.3f} (min {entry['min_slope']:.3f})"
        else:
            detail = f"residual={entry['residual']:.3e} (tol {entry['tol']:.1e})"
        print(f"{status:4s} {name:40s} {detail}")
    print(f"{'PASS' if report['pass'] else 'FAIL'} overall")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momentclosure", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a lattice from a JSON config")
    b.add_argument("config")
    b.add_argument("--out", default=None, help="lattice JSON path (default stdout)")
    b.set_defaults(fn=cmd_build)

    def common(sp, with_lattice=False):
        if with_lattice:
            sp.add_argument("lattice")
        sp.add_argument("--samples", type=int, default=20)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--rng-seed", type=int, default=0)
        sp.add_argument("--report", default=None, help="report JSON path (default stdout)")

    v = sub.add_parser("verify", help="run the identity suite on a lattice file")
    common(v, with_lattice=True)
    v.add_argument("--eps-sweep", type=float, nargs="+", default=[1e-1, 1e-2, 1e-3])
    v.set_defaults(fn=cmd_verify)

    k = sub.add_parser("kinetic", help="kernel route vs series route")
    common(k)
    k.add_argument("--kernel", default="exp")
    k.add_argument("--amplitude", type=float, default=1.0)
    k.add_argument("--n", type=int, default=3)
    k.add_argument("--k", type=int, default=2)
    k.add_argument("--lambda0", type=float, default=0.0)
    k.add_argument("--jet-len", type=int, default=12)
    k.add_argument("--no-quadrature-sweep", action="store_true")
    k.set_defaults(fn=cmd_kinetic)

    s = sub.add_parser("subsystem", help="N vs N-1 embedding checks")
    common(s)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--lambda0", type=float, default=0.0)
    s.add_argument("--jet-len", type=int, default=12)
    s.set_defaults(fn=cmd_subsystem)

    m = sub.add_parser("moments", help="evaluate closing moments at a state file")
    m.add_argument("--lattice", required=True)
    m.add_argument("--state", required=True)
    m.add_argument("--out", default=None)
    m.set_defaults(fn=cmd_moments)

    r = sub.add_parser("report", help="re-emit a report's sweeps as CSV")
    r.add_argument("report")
    r.add_argument("--out", default=None)
    r.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LatticeBuildError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
