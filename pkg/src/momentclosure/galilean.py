"""Frame-invariance verification and the non-convective closure recipe.

The commutative-diagram check applies one closure function in two frames:
directly at a multiplier L, and at the transformed multiplier l(v) with the
results boosted back.  For the exact closure both paths agree identically;
the order-K truncation leaves a discrepancy controlled by the deviation the
boost itself induces (it grows like |v|^(K+1) out of equilibrium states).
"""

from __future__ import annotations

import numpy as np

from .boosts import boost_moments, boost_multipliers, lift_velocity
from .closure import decompose_state, eval_hprime, eval_moments, hessian_h0, moments_rest_slice
from .errors import DomainError, NewtonError
from .lattice import CoefficientLattice
from .symtensor import SymTensor
from . import multiindex as mi


def verify_diagram(lat: CoefficientLattice, L: SymTensor, v) -> dict:
    """Residuals of both legs of the invariance diagram at (L, v).

    Returns per-check relative residuals along with the shift the boost
    induces on lam_ll (which should vanish: the boost never touches the
    spatial trace).
    """
    v4 = lift_velocity(v)
    l = boost_multipliers(L, v)
    dec_L = decompose_state(L)
    dec_l = decompose_state(l)
    if dec_l.lam_ll <= 0.0 or dec_L.lam_ll <= 0.0:
        raise DomainError("boost check needs positive lam_ll on both sides")

    hp_direct = eval_hprime(lat, L)
    hp_frame = eval_hprime(lat, l)
    hp_two_leg = hp_frame[0] * v4 + hp_frame
    scale_h = max(1.0, np.max(np.abs(hp_direct)))

    m_direct = eval_moments(lat, L)
    m_two_leg = boost_moments(eval_moments(lat, l), v)
    scale_m = max(1.0, m_direct.max_abs())

    return {
        "potential_residual": float(np.max(np.abs(hp_direct - hp_two_leg)) / scale_h),
        "moments_residual": float((m_direct - m_two_leg).max_abs() / scale_m),
        "lam_ll_shift": abs(dec_l.lam_ll - dec_L.lam_ll),
    }


def invert_moment_map(
    lat: CoefficientLattice,
    target: SymTensor,
    max_iter: int = 50,
    tol: float = 1e-12,
) -> SymTensor:
    """Solve m^{...0}(l) = target by damped Newton iteration.

    The Jacobian is the multiplicity-weighted second-derivative matrix of the
    potential; the initial guess matches the equilibrium scalars to the
    target's mass and spatial-trace components.
    """
    N = lat.N
    if lat.K < 2:
        raise ValueError("moment-map inversion needs truncation order K >= 2")
    from .closure import equilibrium_multiplier, g_eval

    F = target.get((N, 0, 0, 0))
    F_ll = sum(
        target.get(tuple(N - 2 if ax == 0 else (2 if ax == i else 0) for ax in range(4)))
        for i in (1, 2, 3)
    )

    lam, ll = lat.lambda0, 1.0
    for _ in range(100):  # 2-D equilibrium match: F = g(1,0), F_ll = 3 g(1,1)
        r1 = g_eval(lat, 1, 0, lam, ll) - F
        r2 = 3.0 * g_eval(lat, 1, 1, lam, ll) - F_ll
        if max(abs(r1), abs(r2)) <= tol * max(1.0, abs(F), abs(F_ll)):
            break
        j11 = ll ** (-1.5) * lat.G_jet(1, 0).derivative()(lam)
        j12 = -1.5 / ll * g_eval(lat, 1, 0, lam, ll)
        j21 = 3.0 * ll ** (-2.5) * lat.G_jet(1, 1).derivative()(lam)
        j22 = -2.5 / ll * 3.0 * g_eval(lat, 1, 1, lam, ll)
        det = j11 * j22 - j12 * j21
        if det == 0.0:
            raise NewtonError("singular equilibrium match")
        dlam = -(j22 * r1 - j12 * r2) / det
        dll = -(-j21 * r1 + j11 * r2) / det
        step = 1.0
        while ll + step * dll <= 0.0:
            step *= 0.5
        lam += step * dlam
        ll += step * dll
    else:
        raise NewtonError("equilibrium pre-match did not converge")

    l = equilibrium_multiplier(N, lam, ll)
    mult = np.array([mi.multiplicity(m) for m in mi.multiindices(N)], dtype=float)
    scale = max(1.0, target.max_abs())
    rho = moments_rest_slice(lat, l).values - target.values
    for _ in range(max_iter):
        if np.max(np.abs(rho)) <= tol * scale:
            return l
        J = hessian_h0(lat, l) / mult[:, None]
        delta = np.linalg.solve(J, -rho)
        step = 1.0
        norm0 = np.max(np.abs(rho))
        while step > 1e-6:
            cand = SymTensor(N, l.values + step * delta)
            try:
                rho_new = moments_rest_slice(lat, cand).values - target.values
            except DomainError:
                step *= 0.5
                continue
            if np.max(np.abs(rho_new)) < norm0:
                l, rho = cand, rho_new
                break
            step *= 0.5
        else:
            raise NewtonError("Newton step stalled inverting the moment map")
    if np.max(np.abs(rho)) <= tol * scale:
        return l
    raise NewtonError("moment-map inversion did not converge within iteration budget")


def nonconvective_closure(lat: CoefficientLattice, Fmoments: SymTensor) -> SymTensor:
    """Close the hierarchy from the convective moment data (rank N).

    Extracts the mass velocity v_i = F_i/F, undoes the boost to reach the
    non-convective variables, inverts the potential's derivative to recover
    the multiplier, and boosts the full closing tensor back.
    """
    N = lat.N
    if Fmoments.rank != N:
        raise ValueError(f"expected a rank-{N} moment tensor")
    F = Fmoments.get((N, 0, 0, 0))
    if F <= 0.0:
        raise DomainError("mass density must be positive")
    v = np.array(
        [Fmoments.get(mi.add(mi.unit(i), ((N - 1), 0, 0, 0))) for i in (1, 2, 3)]
    ) / F
    m0 = boost_moments(Fmoments, -v)
    l = invert_moment_map(lat, m0)
    return boost_moments(eval_moments(lat, l), v)
