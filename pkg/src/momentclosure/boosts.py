"""Frame transformations of moments and multipliers under a constant velocity.

Both transforms act on fully symmetric tensors of any rank R:

* moments:      M = sum_i C(R,i) v^(x)i (sym-outer) (m t-contracted i times)
* multipliers:  l = sum_i C(R,i) t^(x)i (sym-outer) (L v-contracted i times)

The velocity is spatial; its 4-component lift always has v^0 = 0.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .symtensor import SymTensor, contract, iso_basis, outer_sym, power_tensor, t_vector


def lift_velocity(v) -> np.ndarray:
    """3-velocity -> 4-vector with vanishing time component."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError("boost velocity must have 3 spatial components")
    return np.concatenate([[0.0], v])


def boost_moments(m: SymTensor, v) -> SymTensor:
    """Transform a moment tensor from the moving frame to the rest frame."""
    v4 = lift_velocity(v)
    R = m.rank
    tv = t_vector()
    out = SymTensor(R)
    reduced = m
    for i in range(R + 1):
        if i > 0:
            reduced = contract(reduced, tv, 1)
        term = outer_sym(power_tensor(v4, i), reduced) if i > 0 else reduced
        out = out + comb(R, i) * term
    return out


def boost_multipliers(L: SymTensor, v) -> SymTensor:
    """Transform a multiplier tensor; t-slots enrich while v contracts."""
    v4 = lift_velocity(v)
    R = L.rank
    vt = SymTensor.from_vector4(v4)
    out = SymTensor(R)
    reduced = L
    for i in range(R + 1):
        if i > 0:
            reduced = contract(reduced, vt, 1)
        term = outer_sym(iso_basis(0, i), reduced) if i > 0 else reduced
        out = out + comb(R, i) * term
    return out
