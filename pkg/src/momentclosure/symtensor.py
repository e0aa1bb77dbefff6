"""Fully symmetric 4-index tensors in canonical (multiset) storage.

A rank-r symmetric tensor over indices {0,1,2,3} stores one value per index
multiset; the value equals the mathematical component at any ordered tuple
realizing that multiset (no multiplicity pre-weighting).  Multiplicities are
applied inside contractions.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import multiindex as mi
from ._kernels import coo_accumulate


class SymTensor:
    """Symmetric tensor of a fixed rank, canonical component storage."""

    __slots__ = ("rank", "values")

    def __init__(self, rank: int, values: np.ndarray | None = None):
        if rank < 0:
            raise ValueError("rank must be >= 0")
        n = mi.num_multiindices(rank)
        if values is None:
            values = np.zeros(n)
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != (n,):
                raise ValueError(f"expected {n} components for rank {rank}")
        self.rank = rank
        self.values = values

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_components(cls, rank: int, comps: dict) -> "SymTensor":
        """Build from a {multi-index: value} mapping; omitted entries are 0."""
        t = cls(rank)
        pos = mi.position_map(rank)
        for m, v in comps.items():
            t.values[pos[tuple(m)]] = v
        return t

    @classmethod
    def scalar(cls, value: float) -> "SymTensor":
        return cls(0, np.array([float(value)]))

    @classmethod
    def from_vector4(cls, vec) -> "SymTensor":
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (4,):
            raise ValueError("need 4 components")
        # rank-1 enumeration order is (1000),(0100),(0010),(0001)
        return cls(1, vec.copy())

    # -- element access ------------------------------------------------------

    def get(self, m) -> float:
        return float(self.values[mi.position_map(self.rank)[tuple(m)]])

    def component(self, *alphas) -> float:
        """Component at an explicit index tuple, e.g. t.component(1,1,0)."""
        if len(alphas) != self.rank:
            raise ValueError("index tuple length must equal rank")
        return self.get(mi.from_tuple(alphas))

    # -- algebra -------------------------------------------------------------

    def copy(self) -> "SymTensor":
        return SymTensor(self.rank, self.values.copy())

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check_rank(other)
        return SymTensor(self.rank, self.values + other.values)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check_rank(other)
        return SymTensor(self.rank, self.values - other.values)

    def __mul__(self, c: float) -> "SymTensor":
        return SymTensor(self.rank, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor":
        return SymTensor(self.rank, -self.values)

    def _check_rank(self, other: "SymTensor") -> None:
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def allclose(self, other: "SymTensor", rtol=1e-12, atol=1e-13) -> bool:
        return self.rank == other.rank and np.allclose(
            self.values, other.values, rtol=rtol, atol=atol
        )

    # -- dense view (debugging / oracles) -------------------------------------

    def to_dense(self) -> np.ndarray:
        """Expand to a dense (4,)*rank array."""
        out = np.zeros((4,) * self.rank)
        if self.rank == 0:
            return np.array(self.values[0])
        for m, v in zip(mi.multiindices(self.rank), self.values):
            idx = []
            for axis, cnt in enumerate(m):
                idx.extend([axis] * cnt)
            import itertools

            for perm in set(itertools.permutations(idx)):
                out[perm] = v
        return out

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        comps = [
            {"idx": list(m), "val": float(v)}
            for m, v in zip(mi.multiindices(self.rank), self.values)
            if v != 0.0
        ]
        return {"rank": self.rank, "components": comps}

    @classmethod
    def from_json_dict(cls, d: dict) -> "SymTensor":
        t = cls(int(d["rank"]))
        pos = mi.position_map(t.rank)
        for item in d.get("components", []):
            t.values[pos[tuple(item["idx"])]] = float(item["val"])
        return t

    def __repr__(self) -> str:
        return f"SymTensor(rank={self.rank}, nnz={int(np.count_nonzero(self.values))})"


def multiset_multiplicity(m) -> int:
    """Number of ordered index tuples sharing a multiset: r!/(n0! n1! n2! n3!)."""
    return mi.multiplicity(tuple(m))


def t_vector() -> SymTensor:
    """The time direction t = (1,0,0,0)."""
    return SymTensor.from_vector4([1.0, 0.0, 0.0, 0.0])


def h_tensor() -> SymTensor:
    """The spatial projector h = diag(0,1,1,1)."""
    return SymTensor.from_components(2, {(0, 2, 0, 0): 1.0, (0, 0, 2, 0): 1.0, (0, 0, 0, 2): 1.0})


def power_tensor(vec4, rank: int) -> SymTensor:
    """Symmetrized outer power v^(x)rank of a 4-vector (already symmetric)."""
    vec4 = np.asarray(vec4, dtype=float)
    t = SymTensor(rank)
    for i, m in enumerate(mi.multiindices(rank)):
        val = 1.0
        for axis in range(4):
            if m[axis]:
                val *= vec4[axis] ** m[axis]
        t.values[i] = val
    return t


def _double_factorial(n: int) -> int:
    # (n-1)!! for even n, via n!/(2^(n/2) (n/2)!)
    return factorial(n) // (2 ** (n // 2) * factorial(n // 2))


@lru_cache(maxsize=None)
def _iso_basis_values(s: int, m: int) -> tuple[float, ...]:
    rank = 2 * s + m
    weight = factorial(s) * 2**s * factorial(m) / factorial(rank)
    vals = []
    for mu in mi.multiindices(rank):
        n0, n1, n2, n3 = mu
        if n0 != m or n1 % 2 or n2 % 2 or n3 % 2:
            vals.append(0.0)
            continue
        pairings = _double_factorial(n1) * _double_factorial(n2) * _double_factorial(n3)
        vals.append(pairings * weight)
    return tuple(vals)


def iso_basis(s: int, m: int) -> SymTensor:
    """Symmetrized product of s spatial projectors h and m time vectors t.

    Component values are computed by closed pairing counts: at a multiset with
    counts (n0,n1,n2,n3) the value is nonzero only when n0 == m and every
    spatial count is even, in which case it equals
    ``(n1-1)!!(n2-1)!!(n3-1)!! * s! 2^s m! / (2s+m)!`` -- the fraction of slot
    permutations whose h-pairs land on equal spatial indices.  Symmetrization
    convention is the average over all slot permutations.
    """
    if s < 0 or m < 0:
        raise ValueError("s and m must be >= 0")
    return SymTensor(2 * s + m, np.array(_iso_basis_values(s, m)))


# -- contraction --------------------------------------------------------------

_PLANS: dict[tuple[int, int, int], tuple] = {}


def _contraction_plan(rank_a: int, rank_b: int, k: int):
    """COO plan for contracting the last k slots of two symmetric tensors.

    Result components (rank pa+pb with pa=rank_a-k, pb=rank_b-k) are
    re-symmetrized over the surviving slots:

        out[mu] = (pa! pb! / (pa+pb)!) * sum over splits mu = ma+mb of
                  prod_i C(mu_i, ma_i) * sum over contraction multisets mc of
                  mult(mc) * a[ma+mc] * b[mb+mc]
    """
    key = (rank_a, rank_b, k)
    plan = _PLANS.get(key)
    if plan is not None:
        return plan
    pa, pb = rank_a - k, rank_b - k
    p = pa + pb
    sym_factor = factorial(pa) * factorial(pb) / factorial(p)
    pos_a = mi.position_map(rank_a)
    pos_b = mi.position_map(rank_b)
    contr = [(mc, mi.multiplicity(mc)) for mc in mi.multiindices(k)]
    ia, ib, io, w = [], [], [], []
    for i_out, mu in enumerate(mi.multiindices(p)):
        for ma, mb, ways in mi.splits(mu, pa):
            base = sym_factor * ways
            for mc, mult in contr:
                ia.append(pos_a[mi.add(ma, mc)])
                ib.append(pos_b[mi.add(mb, mc)])
                io.append(i_out)
                w.append(base * mult)
    plan = (
        np.asarray(io, dtype=np.int64),
        np.asarray(ia, dtype=np.int64),
        np.asarray(ib, dtype=np.int64),
        np.asarray(w, dtype=float),
        mi.num_multiindices(p),
    )
    _PLANS[key] = plan
    return plan


def contract(a: SymTensor, b: SymTensor, k: int) -> SymTensor:
    """Contract the last k slots of ``a`` with the last k slots of ``b``.

    Index raising/lowering is trivial (identity metric).  The result has rank
    ``a.rank + b.rank - 2k`` and is re-symmetrized over the surviving slots.
    """
    if k < 0 or k > min(a.rank, b.rank):
        raise ValueError(f"cannot contract {k} slots of ranks {a.rank}, {b.rank}")
    io, ia, ib, w, n_out = _contraction_plan(a.rank, b.rank, k)
    out = np.zeros(n_out)
    coo_accumulate(out, io, ia, ib, w, a.values, b.values)
    return SymTensor(a.rank + b.rank - 2 * k, out)


def outer_sym(a: SymTensor, b: SymTensor) -> SymTensor:
    """Symmetrized outer product (contraction with k = 0)."""
    return contract(a, b, 0)


def pair_contract_matrix(a: SymTensor, b: SymTensor) -> np.ndarray:
    """M[alpha, beta] = a^{alpha A} b^{A beta} over all shared slots A.

    Both tensors must have equal rank r; A runs over rank r-1 multisets.  The
    two free slots are *not* symmetrized with each other, so M need not be
    symmetric.
    """
    if a.rank != b.rank or a.rank < 1:
        raise ValueError("need two tensors of equal rank >= 1")
    r = a.rank
    pos = mi.position_map(r)
    out = np.zeros((4, 4))
    for mA in mi.multiindices(r - 1):
        mult = mi.multiplicity(mA)
        pa = [pos[mi.add(mA, mi.unit(ax))] for ax in range(4)]
        va = a.values[pa]
        vb = b.values[pa]
        out += mult * np.outer(va, vb)
    return out
