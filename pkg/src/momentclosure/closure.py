"""Evaluation of the closure: potential, closing moments, residuals, Hessian.

Everything is driven by the expansion tensors

    A_k(lam, ll) = sum_s C(Nk+1, 2s) g(k, 2s; lam, ll) * iso_basis(s, Nk+1-2s)
                   [+ c_k * iso_basis((Nk+1)/2, 0)   for odd N, odd k]

contracted against powers of the equilibrium deviation of the multiplier
tensor.  Contractions are performed pairwise (rank drops by N each step)
rather than materializing outer powers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from . import multiindex as mi
from .errors import DomainError
from .lattice import CoefficientLattice
from .symtensor import SymTensor, contract, iso_basis, pair_contract_matrix, t_vector


@dataclass(frozen=True)
class StateDecomposition:
    """Multiplier split into equilibrium scalars and a trace-free deviation."""

    lam: float
    lam_ll: float
    dev: SymTensor

    def recompose(self) -> SymTensor:
        N = self.dev.rank
        return (
            self.dev
            + self.lam * iso_basis(0, N)
            + (self.lam_ll / 3.0) * iso_basis(1, N - 2)
        )


def equilibrium_multiplier(N: int, lam: float, lam_ll: float) -> SymTensor:
    """The equilibrium multiplier tensor lam * t^N + (ll/3) sym(h t^(N-2))."""
    return lam * iso_basis(0, N) + (lam_ll / 3.0) * iso_basis(1, N - 2)


def decompose_state(l: SymTensor) -> StateDecomposition:
    """Extract (lam, lam_ll, deviation); the deviation has vanishing t- and
    h-traces by construction, so the split is idempotent."""
    N = l.rank
    if N < 2:
        raise ValueError("decomposition needs rank >= 2")
    lam = l.get((N, 0, 0, 0))
    lam_ll = comb(N, 2) * sum(
        l.get(tuple(N - 2 if ax == 0 else (2 if ax == i else 0) for ax in range(4)))
        for i in (1, 2, 3)
    )
    dev = l - lam * iso_basis(0, N) - (lam_ll / 3.0) * iso_basis(1, N - 2)
    return StateDecomposition(lam=lam, lam_ll=lam_ll, dev=dev)


def random_deviation(N: int, rng: np.random.Generator, scale: float = 1.0) -> SymTensor:
    """Random trace-free deviation tensor with components of size ~scale."""
    raw = SymTensor(N, rng.standard_normal(mi.num_multiindices(N)) * scale)
    return decompose_state(raw).dev


def g_eval(lat: CoefficientLattice, k: int, s: int, lam: float, lam_ll: float) -> float:
    """Scalar coefficient g_{k,2s} = ll^(-(2s+3)/2) G_{k,2s}(lam)."""
    if lam_ll <= 0.0:
        raise DomainError("lam_ll must be positive (half-integer powers in the closure)")
    return lam_ll ** (-(2 * s + 3) / 2.0) * lat.G_jet(k, s)(lam)


def assemble_A(
    lat: CoefficientLattice, k: int, lam: float, lam_ll: float, channel: str = "value"
) -> SymTensor:
    """Expansion tensor A_k at (lam, ll); rank N k + 1.

    ``channel`` selects the value or one of its scalar derivatives:
    "value", "dlam" (d/dlam), or "dll" (d/dll).  The supplementary constant
    enters the value channel only (it is (lam, ll)-independent).
    """
    if lam_ll <= 0.0:
        raise DomainError("lam_ll must be positive (half-integer powers in the closure)")
    N = lat.N
    R = N * k + 1
    values = np.zeros(mi.num_multiindices(R))
    for s in range(R // 2 + 1):
        power = lam_ll ** (-(2 * s + 3) / 2.0)
        if channel == "value":
            coeff = power * lat.G_jet(k, s)(lam)
        elif channel == "dlam":
            coeff = power * lat.G_jet(k, s).derivative()(lam)
        elif channel == "dll":
            coeff = -(2 * s + 3) / (2.0 * lam_ll) * power * lat.G_jet(k, s)(lam)
        else:
            raise ValueError(f"unknown channel {channel!r}")
        values += comb(R, 2 * s) * coeff * iso_basis(s, R - 2 * s).values
    if channel == "value" and lat.N % 2 == 1 and k % 2 == 1:
        c = lat.c_at_order(k)
        if c != 0.0:
            values += c * iso_basis(R // 2, 0).values
    return SymTensor(R, values)


def _contract_down(A: SymTensor, dev: SymTensor, times: int) -> SymTensor:
    out = A
    for _ in range(times):
        out = contract(out, dev, dev.rank)
    return out


def hprime_terms(lat: CoefficientLattice, l: SymTensor) -> list[np.ndarray]:
    """Order-by-order contributions to the potential, k = 0..K (4-vectors)."""
    N = lat.N
    if l.rank != N:
        raise ValueError(f"multiplier rank {l.rank} != N = {N}")
    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    dev_zero = dec.dev.max_abs() == 0.0
    terms = []
    for k in range(lat.K + 1):
        if k > 0 and dev_zero:
            terms.append(np.zeros(4))
            continue
        A = assemble_A(lat, k, dec.lam, dec.lam_ll)
        terms.append(_contract_down(A, dec.dev, k).values / factorial(k))
    return terms


def eval_hprime(lat: CoefficientLattice, l: SymTensor) -> np.ndarray:
    """Four-potential h'(l) as a 4-vector, truncated at order K."""
    return np.sum(hprime_terms(lat, l), axis=0)


def eval_moments(lat: CoefficientLattice, l: SymTensor) -> SymTensor:
    """Closing moment tensor m (rank N+1): the expansion-series derivative of
    the potential, taking deviation components as independent up to symmetry."""
    N = lat.N
    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    out = SymTensor(N + 1)
    for k in range(1, lat.K + 1):
        A = assemble_A(lat, k, dec.lam, dec.lam_ll)
        out = out + (1.0 / factorial(k - 1)) * _contract_down(A, dec.dev, k - 1)
    return out


def moments_rest_slice(lat: CoefficientLattice, l: SymTensor) -> SymTensor:
    """The rank-N slice m^{...0} = dh'^0/dl, the non-convective variables."""
    return contract(eval_moments(lat, l), t_vector(), 1)


def symmetry_residual(lat: CoefficientLattice, l: SymTensor) -> float:
    """Consistency of the series derivative with the true chain rule.

    The closing moments are well defined (and the rank-(N+1) tensor is
    genuinely symmetric) iff the two scalar ladders relating neighboring
    expansion tensors hold:

        <A_{q+1}, t^N>            = d/dlam A_q
        <A_{q+1}, sym(h t^(N-2))> = 3 d/dll  A_q

    contracted against q deviation powers.  Returns the worst scaled
    mismatch over q = 0..K (the row K+1 tensors make the top order checkable).
    """
    N = lat.N
    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    t_N = iso_basis(0, N)
    h_sym = iso_basis(1, N - 2)
    worst = 0.0
    for q in range(lat.K + 1):
        dlam = _contract_down(assemble_A(lat, q, dec.lam, dec.lam_ll, "dlam"), dec.dev, q)
        dll = _contract_down(assemble_A(lat, q, dec.lam, dec.lam_ll, "dll"), dec.dev, q)
        U = _contract_down(assemble_A(lat, q + 1, dec.lam, dec.lam_ll), dec.dev, q)
        lam_side = contract(U, t_N, N)
        ll_side = contract(U, h_sym, N)
        for lhs, rhs in ((lam_side, dlam), (ll_side, 3.0 * dll)):
            scale = max(1.0, lhs.max_abs(), rhs.max_abs())
            worst = max(worst, (lhs - rhs).max_abs() / scale)
    return worst


def supplementary_term(lat: CoefficientLattice, l: SymTensor) -> np.ndarray:
    """Contribution of the constant family to the potential (odd N only)."""
    N = lat.N
    if N % 2 == 0:
        return np.zeros(4)
    dec = decompose_state(l)
    out = np.zeros(4)
    for k in range(1, lat.K + 1, 2):
        c = lat.c_at_order(k)
        if c == 0.0:
            continue
        basis = iso_basis((N * k + 1) // 2, 0)
        out += (c / factorial(k)) * _contract_down(basis, dec.dev, k).values
    return out


def entropy_density(lat: CoefficientLattice, l: SymTensor) -> float:
    """Entropy density h^0 = -h'^0 + l : m^{...0}."""
    hp0 = eval_hprime(lat, l)[0]
    m0 = moments_rest_slice(lat, l)
    return -hp0 + contract(l, m0, l.rank).values[0]


def residual_condition13(lat: CoefficientLattice, l: SymTensor) -> np.ndarray:
    """Residual block of the velocity-derivative (frame-invariance) condition.

    Returns the 4x3 matrix  R[alpha, j] = h'^mu t_mu delta[alpha,j]
    + N m^{A alpha} t-contracted once and paired with l on the j slot.
    Exact closures satisfy R = 0; the order-K truncation leaves
    O(|deviation|^K).
    """
    N = lat.N
    hp0 = eval_hprime(lat, l)[0]
    P = contract(eval_moments(lat, l), t_vector(), 1)
    M = pair_contract_matrix(P, l)
    R = N * M
    R[1, 1] += hp0
    R[2, 2] += hp0
    R[3, 3] += hp0
    return R[:, 1:4]


def hessian_h0(lat: CoefficientLattice, l: SymTensor) -> np.ndarray:
    """Hessian of h'^0 with respect to the independent multiplier components.

    Entry (m, m') is weighted by both multiset multiplicities, i.e. it is the
    second derivative of h'^0 along the canonical component coordinates.
    """
    N = lat.N
    if lat.K < 2:
        raise ValueError("Hessian needs truncation order K >= 2")
    dec = decompose_state(l)
    if dec.lam_ll <= 0.0:
        raise DomainError("state has non-positive lam_ll")
    T = SymTensor(2 * N + 1)
    for k in range(2, lat.K + 1):
        A = assemble_A(lat, k, dec.lam, dec.lam_ll)
        T = T + (1.0 / factorial(k - 2)) * _contract_down(A, dec.dev, k - 2)
    idx = mi.multiindices(N)
    mult = np.array([mi.multiplicity(m) for m in idx], dtype=float)
    pos = mi.position_map(2 * N + 1)
    n = len(idx)
    H = np.empty((n, n))
    e0 = (1, 0, 0, 0)
    for i, a in enumerate(idx):
        base = mi.add(a, e0)
        for j in range(i, n):
            v = T.values[pos[mi.add(base, idx[j])]]
            H[i, j] = v
            H[j, i] = v
    return H * np.outer(mult, mult)
