"""Kinetic-theory route to the closure: kernel integrals and their lattice.

A single-variable kernel F generates the potential as a velocity-space
integral; after the radial variable change eta = sqrt(ll) c the angular part
collapses and everything reduces to the scalar integrals

    G_s(lam) = 4 pi / (s+1) * int_0^inf F(lam + eta^2/3) eta^(s+2) deta.

Jets of G_s about lam0 are built by differentiating under the integral
(analytic kernel derivatives), never by finite-differencing quadrature
results; successive jets are tied by the exact ladder
G_s' = -(3/2)(s-1) G_{s-2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, pi

import numpy as np
from scipy.integrate import quad

from . import multiindex as mi
from .errors import DomainError, QuadratureError
from .jets import Jet, max_coeff_residual
from .lattice import (
    CoefficientLattice,
    SeedSpec,
    max_kappa_index,
    num_c_constants,
    smax_row,
)
from .symtensor import SymTensor


class ExponentialKernel:
    """F(x) = a exp(-x); every derivative is available in closed form."""

    def __init__(self, amplitude: float = 1.0):
        self.amplitude = float(amplitude)

    def __call__(self, x):
        return self.amplitude * np.exp(-np.asarray(x, dtype=float))

    def derivative(self, order: int):
        if order == 0:
            return self
        sign = -1.0 if order % 2 else 1.0
        a = self.amplitude

        def f(x):
            return sign * a * np.exp(-np.asarray(x, dtype=float))

        return f


class TableKernel:
    """Kernel given by samples (x, F(x)); linear interpolation, zero outside.

    Supports direct integration only; jet construction needs kernel
    derivatives, which samples cannot provide.
    """

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-D x, F(x) sample arrays")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("kernel samples must have strictly increasing x")
        self.xs, self.ys = xs, ys

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.ys, left=0.0, right=0.0)

    def derivative(self, order: int):
        if order == 0:
            return self
        raise DomainError("table kernels provide no derivatives; use an analytic kernel")


def _radial_cutoff(f, power: int, lam0: float, rel: float = 1e-16) -> float:
    """Smallest eta beyond which |F(lam0+eta^2/3)| eta^power is negligible."""
    hi = 1.0
    for _ in range(60):
        grid = np.linspace(0.0, hi, 2048)
        g = np.abs(np.asarray(f(lam0 + grid**2 / 3.0))) * grid**power
        peak = g.max()
        if peak == 0.0:
            return 0.0
        if g[-1] <= rel * peak and g[-min(8, g.size)] <= rel * peak:
            return hi
        hi *= 2.0
    raise QuadratureError("kernel integrand does not decay; integral diverges")


def _kernel_quad(f, power: int, lam0: float) -> float:
    """Adaptive quadrature of F(lam0 + eta^2/3) eta^power over [0, inf)."""
    hi = _radial_cutoff(f, power, lam0)
    if hi == 0.0:
        return 0.0
    val, err = quad(lambda e: f(lam0 + e * e / 3.0) * e**power, 0.0, hi,
                    epsabs=1e-12, epsrel=1e-12, limit=400)
    if err > 1e-7 * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature error estimate {err:.2e} too large")
    return val


def g_value_quadrature(kernel, s: int, lam0: float) -> float:
    """G_s(lam0) by direct quadrature."""
    return 4.0 * pi / (s + 1) * _kernel_quad(kernel, s + 2, lam0)


def exponential_Cs(s: int) -> float:
    """Closed form G_s = C_s exp(-lam) for the unit exponential kernel:
    C_s = pi 3^((s+3)/2) Gamma((s+1)/2)."""
    from math import gamma

    return pi * 3.0 ** ((s + 3) / 2.0) * gamma((s + 1) / 2.0)


@dataclass(frozen=True)
class GLadder:
    """Jets of the scalar kernel integrals G_s, s = 0..smax."""

    smax: int
    jets: tuple[Jet, ...]
    lambda0: float

    def residual(self) -> float:
        """Worst scaled coefficient mismatch of G_s' = -(3/2)(s-1) G_{s-2}."""
        worst = 0.0
        for s in range(2, self.smax + 1):
            worst = max(
                worst,
                max_coeff_residual(
                    self.jets[s].derivative(), self.jets[s - 2].scale(-1.5 * (s - 1))
                ),
            )
        return worst


def ladder_from_kernel(kernel, smax: int, lambda0: float, D: int) -> GLadder:
    """Build jets of G_s with D + s//2 coefficients each.

    Coefficient j comes from the integral of the j-th kernel derivative; the
    extra length at high s is what the lattice rows need so that every
    derivative row keeps at least D - K - 1 coefficients.
    """
    jets = []
    for s in range(smax + 1):
        n = D + s // 2
        coeffs = np.empty(n)
        for j in range(n):
            coeffs[j] = (
                4.0 * pi / (s + 1) * _kernel_quad(kernel.derivative(j), s + 2, lambda0)
            ) / factorial(j)
        jets.append(Jet(lambda0, coeffs))
    return GLadder(smax=smax, jets=tuple(jets), lambda0=lambda0)


def kinetic_lattice(
    kernel, N: int, K: int, lambda0: float, D: int, ladder: GLadder | None = None
) -> CoefficientLattice:
    """Coefficient lattice induced by a kernel: G[r][2s] = (d/dlam)^r G_{2s}.

    The supplementary constant family is identically zero here regardless of
    the parity of N.
    """
    if N < 3:
        raise DomainError("closure requires N >= 3")
    S = smax_row(N, K + 1)
    if ladder is None or ladder.smax < 2 * S:
        ladder = ladder_from_kernel(kernel, 2 * S, lambda0, D)
    H: list[list[Jet]] = []
    for r in range(K + 2):
        row = []
        for s in range(smax_row(N, r) + 1):
            scale = (-2.0 / 3.0) ** r * (2**s * factorial(s)) / factorial(2 * s)
            row.append(ladder.jets[2 * s].nth_derivative(r).scale(scale))
        H.append(row)
    kappas = []
    for p in range(1, max_kappa_index(N, K) + 1):
        scale = (2**p * factorial(p)) / factorial(2 * p)
        kappas.append(scale * ladder.jets[2 * p].coeffs[0])
    c = (0.0,) * num_c_constants(K) if N % 2 == 1 else ()
    seed = SeedSpec(h00=H[0][0], kappas=tuple(kappas), c_constants=c)
    return CoefficientLattice(N, K, H, c, seed)


# -- direct velocity-space integration ----------------------------------------


@dataclass(frozen=True)
class QuadratureParams:
    n_radial: int = 160
    n_theta: int = 24
    n_phi: int = 48
    guard: float = 1e-9


def _spherical_nodes(params: QuadratureParams, radius: float):
    xr, wr = np.polynomial.legendre.leggauss(params.n_radial)
    rho = 0.5 * radius * (xr + 1.0)
    w_rho = 0.5 * radius * wr
    u, wu = np.polynomial.legendre.leggauss(params.n_theta)  # u = cos(theta)
    phi = 2.0 * pi * np.arange(params.n_phi) / params.n_phi
    w_phi = 2.0 * pi / params.n_phi
    sin_t = np.sqrt(1.0 - u**2)
    # directions: shape (3, n_theta*n_phi)
    d = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.outer(u, np.ones_like(phi)).ravel(),
        ]
    )
    w_ang = (np.outer(wu, np.ones_like(phi)) * w_phi).ravel()
    return rho, w_rho, d, w_ang


def _phase_arrays(l: SymTensor, rho: np.ndarray, d: np.ndarray):
    """Split l : c^N into the equilibrium radial part and the deviation part,
    both evaluated on the product grid (n_radial, n_angular)."""
    from .closure import decompose_state

    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    equil = dec.lam + dec.lam_ll * rho**2 / 3.0
    devpart = np.zeros((rho.size, d.shape[1]))
    N = l.rank
    for m, v in zip(mi.multiindices(N), dec.dev.values):
        if v == 0.0:
            continue
        deg = m[1] + m[2] + m[3]
        ang = d[0] ** m[1] * d[1] ** m[2] * d[2] ** m[3]
        devpart += (mi.multiplicity(m) * v) * np.outer(rho**deg, ang)
    return dec, equil, devpart


def _integration_setup(kernel, l: SymTensor, params: QuadratureParams):
    from .closure import decompose_state

    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    # cutoff computed in the scaled radial variable eta = sqrt(ll) |c|; the
    # power bound covers the highest monomial degree any caller integrates
    radius = _radial_cutoff(kernel, l.rank + 4, dec.lam) / np.sqrt(dec.lam_ll)
    if radius == 0.0:
        radius = 1.0
    rho, w_rho, d, w_ang = _spherical_nodes(params, radius)
    _, equil, devpart = _phase_arrays(l, rho, d)
    weights = np.outer(w_rho * rho**2, w_ang)
    return dec, rho, d, equil, devpart, weights


def _check_converged(kernel_values: np.ndarray, rho: np.ndarray, guard: float) -> None:
    """Divergence estimate: the boundary shell must contribute negligibly.

    The defining integral only exists asymptotically once a deviation is
    present; the truncated domain is trustworthy iff the integrand has
    decayed at the cutoff radius in every direction.
    """
    radial = np.abs(kernel_values) * rho[:, None] ** 2
    peak = radial.max()
    if peak > 0.0 and radial[-1].max() > guard * peak:
        raise QuadratureError(
            "integrand has not decayed at the cutoff radius; deviation too large"
        )


def eval_hprime_kinetic(kernel, l: SymTensor, params: QuadratureParams | None = None) -> np.ndarray:
    """Direct integration of the kernel potential; oracle for the series."""
    params = params or QuadratureParams()
    _, rho, d, equil, devpart, weights = _integration_setup(kernel, l, params)
    fk = kernel(equil[:, None] + devpart)
    _check_converged(fk, rho, params.guard)
    f = fk * weights
    out = np.empty(4)
    out[0] = f.sum()
    for i in range(3):
        out[i + 1] = (f * np.outer(rho, d[i])).sum()
    return out


def eval_moments_kinetic(kernel, l: SymTensor, params: QuadratureParams | None = None) -> SymTensor:
    """Closing moments from the kernel derivative; rank N+1 tensor."""
    params = params or QuadratureParams()
    _, rho, d, equil, devpart, weights = _integration_setup(kernel, l, params)
    fpk = kernel.derivative(1)(equil[:, None] + devpart)
    _check_converged(fpk, rho, params.guard)
    fp = fpk * weights
    N = l.rank
    out = SymTensor(N + 1)
    for i, m in enumerate(mi.multiindices(N + 1)):
        deg = m[1] + m[2] + m[3]
        ang = d[0] ** m[1] * d[1] ** m[2] * d[2] ** m[3]
        out.values[i] = (fp * np.outer(rho**deg, ang)).sum()
    return out


def entropy_density_kinetic(kernel, l: SymTensor, params: QuadratureParams | None = None) -> float:
    """h^0 = int (x F'(x) - F(x)) over velocity space, x = l : c^N."""
    params = params or QuadratureParams()
    _, rho, d, equil, devpart, weights = _integration_setup(kernel, l, params)
    x = equil[:, None] + devpart
    fk = kernel(x)
    _check_converged(fk, rho, params.guard)
    return float(((x * kernel.derivative(1)(x) - fk) * weights).sum())
