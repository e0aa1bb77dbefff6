"""Spatial multiplier conversions and the order-(N-1) subsystem embedding.

Zeroing the top spatial multiplier of the order-N model and lifting the rest
reproduces the direct order-(N-1) closure built from the same generating
function and integration constants, with the supplementary constant family
dropped: every lift slot carries a time vector, which any pure-projector
basis annihilates.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .closure import decompose_state, eval_hprime, random_deviation, supplementary_term
from .errors import LatticeBuildError
from .lattice import CoefficientLattice
from .symtensor import SymTensor, contract, iso_basis, outer_sym, t_vector
from . import multiindex as mi


def multipliers_4d_to_3d(l: SymTensor) -> list[SymTensor]:
    """Spatial multiplier family: rank-r spatial tensors, r = 0..N.

    lam_r = C(N,r) * (l with N-r slots t-contracted, the rest h-projected);
    entries with any time index vanish by the projection.
    """
    N = l.rank
    out = []
    for r in range(N + 1):
        w = contract(l, iso_basis(0, N - r), N - r) if r < N else l.copy()
        vals = w.values.copy()
        for i, m in enumerate(mi.multiindices(r)):
            if m[0] > 0:
                vals[i] = 0.0
        out.append(SymTensor(r, comb(N, r) * vals))
    return out


def multipliers_3d_to_4d(lams: list[SymTensor]) -> SymTensor:
    """Inverse conversion: l = sum_s sym(lam_s (x) t^(N-s))."""
    N = len(lams) - 1
    out = SymTensor(N)
    for s, lam_s in enumerate(lams):
        if lam_s.rank != s:
            raise ValueError("spatial multiplier list must have ranks 0..N")
        term = outer_sym(lam_s, iso_basis(0, N - s)) if s < N else lam_s
        out = out + term
    return out


def lift_multipliers(l_sub: SymTensor) -> SymTensor:
    """Embed an order-(N-1) multiplier: symmetrized outer product with t."""
    return outer_sym(l_sub, t_vector())


def compare_subsystem(
    lat_N: CoefficientLattice,
    lat_Nm1: CoefficientLattice,
    samples: int,
    rng: np.random.Generator,
    dev_scale: float = 0.1,
) -> dict:
    """Direct order-(N-1) closure versus the lifted order-N closure.

    Both lattices must share the generating jet and integration constants
    (the comparison is exact, not truncation-limited); the subsystem side
    must carry no supplementary constants.  Also evaluates the supplementary
    term of the order-N lattice at every lifted state, which vanishes
    identically.
    """
    N = lat_N.N
    if lat_Nm1.N != N - 1 or lat_Nm1.K != lat_N.K:
        raise LatticeBuildError("subsystem comparison needs orders N, N-1 at equal K")
    if any(c != 0.0 for c in lat_Nm1.c):
        raise LatticeBuildError("subsystem lattice must have zero supplementary constants")
    n_shared = min(len(lat_N.seed.h00), len(lat_Nm1.seed.h00))
    if lat_N.lambda0 != lat_Nm1.lambda0 or not np.array_equal(
        lat_N.seed.h00.coeffs[:n_shared], lat_Nm1.seed.h00.coeffs[:n_shared]
    ):
        raise LatticeBuildError("subsystem comparison needs matching seeds")
    nk = min(len(lat_N.seed.kappas), len(lat_Nm1.seed.kappas))
    if lat_N.seed.kappas[:nk] != lat_Nm1.seed.kappas[:nk]:
        raise LatticeBuildError("subsystem comparison needs matching integration constants")

    worst_h = 0.0
    worst_supp = 0.0
    for _ in range(samples):
        lam = lat_N.lambda0 + rng.uniform(-0.2, 0.2)
        lam_ll = rng.uniform(2.0, 4.0)
        dev = random_deviation(N - 1, rng, dev_scale)
        l_sub = (
            lam * iso_basis(0, N - 1) + (lam_ll / 3.0) * iso_basis(1, N - 3) + dev
        )
        lifted = lift_multipliers(l_sub)
        hp_direct = eval_hprime(lat_Nm1, l_sub)
        hp_lifted = eval_hprime(lat_N, lifted)
        scale = max(1.0, np.max(np.abs(hp_direct)))
        worst_h = max(worst_h, float(np.max(np.abs(hp_direct - hp_lifted)) / scale))
        worst_supp = max(worst_supp, float(np.max(np.abs(supplementary_term(lat_N, lifted)))))
    return {
        "hprime_residual": worst_h,
        "supplementary_term_abs": worst_supp,
        "samples": samples,
    }


def lift_vanishing_check(
    lat_N: CoefficientLattice, samples: int, rng: np.random.Generator, dev_scale: float = 0.5
) -> float:
    """Max |supplementary term| over lifted states (any N-1 >= 2)."""
    N = lat_N.N
    worst = 0.0
    for _ in range(samples):
        lam = lat_N.lambda0 + rng.uniform(-0.2, 0.2)
        lam_ll = rng.uniform(2.0, 4.0)
        dev = random_deviation(N - 1, rng, dev_scale)
        l_sub = lam * iso_basis(0, N - 1) + (lam_ll / 3.0) * iso_basis(1, N - 3) + dev
        lifted = lift_multipliers(l_sub)
        worst = max(worst, float(np.max(np.abs(supplementary_term(lat_N, lifted)))))
    return worst
