"""Verification suites behind the CLI: residual checks with pass/fail gates.

Each suite returns a deterministic report dict: per-check entries carry the
measured residual (or slope), the gate, and a pass flag; entries marked
``"gated": False`` are informational only.
"""

from __future__ import annotations

import numpy as np

from . import multiindex as mi
from ._parallel import sample_map
from .closure import (
    decompose_state,
    equilibrium_multiplier,
    eval_hprime,
    hessian_h0,
    random_deviation,
    residual_condition13,
    symmetry_residual,
)
from .lattice import CoefficientLattice, check_recurrences, exponential_seed, build_lattice
from .symtensor import SymTensor
from .subsystem import compare_subsystem, lift_vanishing_check, multipliers_3d_to_4d, multipliers_4d_to_3d


def fit_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(np.asarray(xs)), np.log(np.asarray(ys)), 1)[0])


def sample_state(lat: CoefficientLattice, rng: np.random.Generator, dev_scale: float = 0.1):
    lam = lat.lambda0 + rng.uniform(-0.2, 0.2)
    lam_ll = rng.uniform(2.0, 4.0)
    dev = random_deviation(lat.N, rng, dev_scale)
    return equilibrium_multiplier(lat.N, lam, lam_ll) + dev


def _entry(value: float, tol: float, gated: bool = True) -> dict:
    return {"residual": float(value), "tol": float(tol), "pass": bool(value < tol), "gated": gated}


def _slope_entry(slope: float, min_slope: float, sweep: dict, max_slope: float | None = None) -> dict:
    ok = slope >= min_slope and (max_slope is None or slope <= max_slope)
    out = {"slope": float(slope), "min_slope": float(min_slope), "pass": bool(ok),
           "gated": True, "sweep": {f"{k:.6g}": float(v) for k, v in sweep.items()}}
    if max_slope is not None:
        out["max_slope"] = float(max_slope)
    return out


def hessian_fd_error(lat: CoefficientLattice, l: SymTensor, delta: float,
                     pairs: list[tuple[int, int]]) -> float:
    """Max |central-difference - exact| over selected Hessian entries."""
    N = lat.N
    H = hessian_h0(lat, l)

    def hp0(vals: np.ndarray) -> float:
        return eval_hprime(lat, SymTensor(N, vals))[0]

    worst = 0.0
    x = l.values
    for i, j in pairs:
        ei = np.zeros_like(x)
        ej = np.zeros_like(x)
        ei[i] = 1.0
        ej[j] = 1.0
        if i == j:
            fd = (hp0(x + delta * ei) - 2.0 * hp0(x) + hp0(x - delta * ei)) / delta**2
        else:
            fd = (
                hp0(x + delta * (ei + ej))
                - hp0(x + delta * (ei - ej))
                - hp0(x - delta * (ei - ej))
                + hp0(x - delta * (ei + ej))
            ) / (4.0 * delta**2)
        worst = max(worst, abs(fd - H[i, j]))
    return worst


def run_verification(
    lat: CoefficientLattice,
    samples: int = 20,
    eps_sweep: tuple[float, ...] = (1e-1, 1e-2, 1e-3),
    tol: float = 1e-10,
    rng_seed: int = 0,
) -> dict:
    """Full identity suite for one lattice."""
    rng = np.random.default_rng(rng_seed)
    checks: dict[str, dict] = {}

    for name, res in sorted(check_recurrences(lat).items()):
        checks[f"recurrences.{name}"] = _entry(res, tol)

    if samples > 0:
        states = [sample_state(lat, rng) for _ in range(samples)]
        sym_res = sample_map(lambda l: symmetry_residual(lat, l), states)
        checks["moment_symmetry"] = _entry(max(sym_res), tol)

        eq_states = [
            equilibrium_multiplier(lat.N, lat.lambda0 + rng.uniform(-0.2, 0.2), rng.uniform(2.0, 4.0))
            for _ in range(min(samples, 5))
        ]
        eq_res = [float(np.max(np.abs(residual_condition13(lat, l)))) for l in eq_states]
        checks["condition13_equilibrium"] = _entry(max(eq_res), tol)

        u = random_deviation(lat.N, rng, 1.0)
        u = u * (1.0 / max(u.max_abs(), 1e-300))
        base = equilibrium_multiplier(lat.N, lat.lambda0, 3.0)
        sweep = {}
        for eps in eps_sweep:
            r = residual_condition13(lat, base + eps * u)
            sweep[eps] = float(np.max(np.abs(r)))
        slope = fit_slope(list(sweep), list(sweep.values()))
        checks["condition13_slope"] = _slope_entry(slope, lat.K - 0.4, sweep)

        if lat.K >= 2:
            Hm = hessian_h0(lat, base)
            checks["hessian_symmetry"] = _entry(float(np.max(np.abs(Hm - Hm.T))), tol)
            eigs = np.linalg.eigvalsh(Hm)
            checks["hessian_min_eig"] = {
                "residual": float(eigs.min()), "tol": 0.0, "pass": True, "gated": False,
            }
            # probe entries where the Hessian is informative; structural
            # zeros sit at roundoff for every step size and defeat the fit
            order = np.argsort(np.abs(Hm), axis=None)[::-1]
            pairs, seen = [], set()
            for flat in order:
                i, j = sorted(divmod(int(flat), Hm.shape[0]))
                if (i, j) not in seen:
                    seen.add((i, j))
                    pairs.append((i, j))
                if len(pairs) >= 10:
                    break
            fd_sweep = {}
            for delta in (0.16, 0.08, 0.04):
                fd_sweep[delta] = hessian_fd_error(lat, base, delta, pairs)
            checks["hessian_fd_order"] = _slope_entry(
                fit_slope(list(fd_sweep), list(fd_sweep.values())), 1.8, fd_sweep
            )

    passed = all(c["pass"] for c in checks.values() if c.get("gated", True))
    return {
        "suite": "verify",
        "lattice": {"N": lat.N, "K": lat.K, "lambda0": lat.lambda0},
        "rng_seed": rng_seed,
        "samples": samples,
        "tol": tol,
        "checks": checks,
        "pass": passed,
    }


def run_kinetic_suite(
    amplitude: float = 1.0,
    N: int = 3,
    K: int = 2,
    lambda0: float = 0.0,
    jet_len: int = 12,
    samples: int = 20,
    tol: float = 1e-10,
    rng_seed: int = 0,
    eps_sweep: tuple[float, ...] = (0.01, 0.005, 0.0025),
    with_quadrature_sweep: bool = True,
) -> dict:
    """Exponential-kernel route versus the generating-function route."""
    from .kinetic import (
        ExponentialKernel,
        eval_hprime_kinetic,
        exponential_Cs,
        g_value_quadrature,
        kinetic_lattice,
        ladder_from_kernel,
        smax_row,
    )

    rng = np.random.default_rng(rng_seed)
    kernel = ExponentialKernel(amplitude)
    checks: dict[str, dict] = {}

    worst = 0.0
    for s in range(13):
        q = g_value_quadrature(kernel, s, lambda0)
        exact = amplitude * exponential_Cs(s) * np.exp(-lambda0)
        worst = max(worst, abs(q - exact) / abs(exact))
    checks["gamma_closed_form"] = _entry(worst, 1e-8)

    q0 = g_value_quadrature(kernel, 0, lambda0)
    q2 = g_value_quadrature(kernel, 2, lambda0)
    checks["ladder_ratio_c2_c0"] = _entry(abs(q2 / q0 - 1.5), tol)

    S = smax_row(N, K + 1)
    ladder = ladder_from_kernel(kernel, 2 * S, lambda0, jet_len)
    checks["ladder_recurrence"] = _entry(ladder.residual(), tol)

    kin = kinetic_lattice(kernel, N, K, lambda0, jet_len, ladder=ladder)
    for name, res in sorted(check_recurrences(kin).items()):
        checks[f"kinetic_recurrences.{name}"] = _entry(res, tol)
    checks["constants_zero"] = _entry(max((abs(c) for c in kin.c), default=0.0), tol)

    mac = build_lattice(
        exponential_seed(amplitude * exponential_Cs(0), lambda0, jet_len, N, K), N, K
    )
    worst = 0.0
    for _ in range(samples):
        l = sample_state(mac, rng)
        a = eval_hprime(kin, l)
        b = eval_hprime(mac, l)
        worst = max(worst, float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b)))))
    checks["hprime_kinetic_vs_series"] = _entry(worst, tol)

    if with_quadrature_sweep:
        u = random_deviation(N, rng, 1.0)
        u = u * (1.0 / max(u.max_abs(), 1e-300))
        base = equilibrium_multiplier(N, lambda0, 3.0)
        sweep = {}
        for eps in eps_sweep:
            l = base + eps * u
            dev = np.max(np.abs(eval_hprime(mac, l) - eval_hprime_kinetic(kernel, l)))
            sweep[eps] = float(dev)
        slope = fit_slope(list(sweep), list(sweep.values()))
        checks["series_vs_quadrature_order"] = _slope_entry(slope, K + 1 - 0.4, sweep, K + 1 + 0.4)

    passed = all(c["pass"] for c in checks.values() if c.get("gated", True))
    return {
        "suite": "kinetic",
        "kernel": {"kind": "exp", "amplitude": amplitude},
        "lattice": {"N": N, "K": K, "lambda0": lambda0, "jet_len": jet_len},
        "rng_seed": rng_seed,
        "samples": samples,
        "tol": tol,
        "checks": checks,
        "pass": passed,
    }


def run_subsystem_suite(
    N: int = 4,
    K: int = 2,
    lambda0: float = 0.0,
    jet_len: int = 12,
    samples: int = 20,
    tol: float = 1e-10,
    rng_seed: int = 0,
    amplitude: float = 1.0,
) -> dict:
    """Subsystem embedding checks for the pair (N, N-1)."""
    rng = np.random.default_rng(rng_seed)
    checks: dict[str, dict] = {}

    c_top = (0.7, -0.3, 0.2)[: (K + 1) // 2] if N % 2 == 1 else ()
    lat_N = build_lattice(
        exponential_seed(amplitude, lambda0, jet_len, N, K, c_constants=c_top), N, K
    )

    worst = 0.0
    for _ in range(samples):
        l = SymTensor(N, rng.standard_normal(mi.num_multiindices(N)))
        back = multipliers_3d_to_4d(multipliers_4d_to_3d(l))
        worst = max(worst, (back - l).max_abs() / max(1.0, l.max_abs()))
    checks["spatial_roundtrip"] = _entry(worst, 1e-13)

    if N - 1 >= 3:
        lat_sub = build_lattice(exponential_seed(amplitude, lambda0, jet_len, N - 1, K), N - 1, K)
        rep = compare_subsystem(lat_N, lat_sub, samples, rng)
        checks["hprime_subsystem_vs_direct"] = _entry(rep["hprime_residual"], tol)
        checks["supplementary_vanishes"] = _entry(rep["supplementary_term_abs"], 1e-14)
    else:
        if N % 2 == 1:
            checks["supplementary_vanishes"] = _entry(
                lift_vanishing_check(lat_N, samples, rng), 1e-14
            )

    passed = all(c["pass"] for c in checks.values() if c.get("gated", True))
    return {
        "suite": "subsystem",
        "lattice": {"N": N, "K": K, "lambda0": lambda0, "jet_len": jet_len},
        "rng_seed": rng_seed,
        "samples": samples,
        "tol": tol,
        "checks": checks,
        "pass": passed,
    }
