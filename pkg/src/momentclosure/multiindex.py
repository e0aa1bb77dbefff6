"""Multi-index bookkeeping for symmetric tensors over the index set {0,1,2,3}.

A multi-index is a tuple ``(n0, n1, n2, n3)`` counting how many tensor slots
carry each index value; its rank is ``n0+n1+n2+n3``.  All canonical storage,
enumeration and multiplicity logic lives here.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

MultiIndex = tuple[int, int, int, int]


def rank_of(m: MultiIndex) -> int:
    return m[0] + m[1] + m[2] + m[3]


def multiplicity(m: MultiIndex) -> int:
    """Number of ordered index tuples sharing the multiset ``m``.

    Equals rank!/(n0! n1! n2! n3!).
    """
    r = rank_of(m)
    return factorial(r) // (
        factorial(m[0]) * factorial(m[1]) * factorial(m[2]) * factorial(m[3])
    )


def num_multiindices(rank: int) -> int:
    """Count of distinct multi-indices of a given rank: C(rank+3, 3)."""
    return comb(rank + 3, 3)


@lru_cache(maxsize=None)
def multiindices(rank: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of ``rank``, in a fixed lexicographic order."""
    out = []
    for n0 in range(rank, -1, -1):
        for n1 in range(rank - n0, -1, -1):
            for n2 in range(rank - n0 - n1, -1, -1):
                out.append((n0, n1, n2, rank - n0 - n1 - n2))
    return tuple(out)


@lru_cache(maxsize=None)
def position_map(rank: int) -> dict[MultiIndex, int]:
    """Map multi-index -> position in the canonical enumeration."""
    return {m: i for i, m in enumerate(multiindices(rank))}


def position(m: MultiIndex) -> int:
    return position_map(rank_of(m))[m]


def add(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def sub(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def contains(a: MultiIndex, b: MultiIndex) -> bool:
    """True if ``b`` is a sub-multiset of ``a``."""
    return all(a[i] >= b[i] for i in range(4))


def unit(axis: int) -> MultiIndex:
    m = [0, 0, 0, 0]
    m[axis] = 1
    return tuple(m)  # type: ignore[return-value]


def from_tuple(alphas) -> MultiIndex:
    """Multi-index of an explicit tuple of index values, e.g. (1,1,0) -> (1,2,0,0)."""
    m = [0, 0, 0, 0]
    for a in alphas:
        m[a] += 1
    return tuple(m)  # type: ignore[return-value]


@lru_cache(maxsize=None)
def splits(m: MultiIndex, rank_a: int) -> tuple[tuple[MultiIndex, MultiIndex, int], ...]:
    """All ways to split ``m`` into (ma, mb) with rank(ma) == rank_a.

    Returns triples (ma, mb, ways) where ``ways = prod_i C(m_i, ma_i)`` counts
    the slot choices realizing the split.
    """
    out = []
    for ma in multiindices(rank_a):
        if contains(m, ma):
            ways = 1
            for i in range(4):
                ways *= comb(m[i], ma[i])
            out.append((ma, sub(m, ma), ways))
    return tuple(out)
