"""Construction of the closure coefficient lattice and its identity checks.

The lattice holds the two-parameter family of single-variable jets H[r][s]
(0 <= r <= K+1, 0 <= s <= floor((N r + 1)/2)) from which every scalar
expansion coefficient follows:

    G[r][s]          = (-3/2)^r (2s)!/(2^s s!) * H[r][s]
    g(r, s; lam, ll) = ll^(-(2s+3)/2) * G[r][s](lam)

Rows are generated from a single free function H[0][0] by exact jet
derivatives (r >= s), and by antiderivatives carrying one integration
constant per step (r < s).  A second, finite family of pure constants exists
only at odd N; it never enters the H table and is stored separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import LatticeBuildError
from .jets import Jet, jet_exp_neg, max_coeff_residual


def smax_row(N: int, r: int) -> int:
    return (N * r + 1) // 2


def max_kappa_index(N: int, K: int) -> int:
    """Largest antiderivative depth p = s - r reachable in the table."""
    return max(0, smax_row(N, K + 1) - (K + 1))


def num_c_constants(K: int) -> int:
    """Constants c_k exist at odd expansion orders k <= K."""
    return (K + 1) // 2


@dataclass(frozen=True)
class SeedSpec:
    """Free data generating a lattice: one jet, integration constants, and
    (for odd N) the supplementary constant family."""

    h00: Jet
    kappas: tuple[float, ...] = ()
    c_constants: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))
        object.__setattr__(self, "c_constants", tuple(float(c) for c in self.c_constants))

    @property
    def lambda0(self) -> float:
        return self.h00.base

    @property
    def jet_len(self) -> int:
        return len(self.h00)

    def to_json_dict(self) -> dict:
        return {
            "h00": [float(c) for c in self.h00.coeffs],
            "kappas": list(self.kappas),
            "c_constants": list(self.c_constants),
            "lambda0": self.lambda0,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "SeedSpec":
        return cls(
            h00=Jet(float(d["lambda0"]), np.asarray(d["h00"], dtype=float)),
            kappas=tuple(d.get("kappas", ())),
            c_constants=tuple(d.get("c_constants", ())),
        )


def exponential_seed(
    amplitude: float, lambda0: float, jet_len: int, N: int, K: int,
    c_constants: tuple[float, ...] = (),
) -> SeedSpec:
    """Seed whose entire H table stays proportional to exp(-lam).

    Choosing kappa_p = amplitude (3/2)^p exp(-lambda0) keeps every
    antiderivative in the exponential family; this is the seed matched by an
    exponential kinetic kernel of the same amplitude (up to the kernel's
    overall Gaussian-moment normalization).
    """
    h00 = jet_exp_neg(amplitude, lambda0, jet_len)
    pmax = max_kappa_index(N, K)
    kappas = tuple(amplitude * 1.5**p * np.exp(-lambda0) for p in range(1, pmax + 1))
    return SeedSpec(h00=h00, kappas=kappas, c_constants=c_constants)


class CoefficientLattice:
    """Immutable coefficient dataset of one closure at fixed (N, K)."""

    def __init__(self, N: int, K: int, H: list[list[Jet]], c: tuple[float, ...], seed: SeedSpec):
        self.N = N
        self.K = K
        self.H = tuple(tuple(row) for row in H)
        self.c = tuple(float(x) for x in c)
        self.seed = seed
        self.lambda0 = seed.lambda0
        self._g_cache: dict[tuple[int, int], Jet] = {}

    def smax(self, r: int) -> int:
        return smax_row(self.N, r)

    def H_jet(self, r: int, s: int) -> Jet:
        return self.H[r][s]

    def G_jet(self, r: int, s: int) -> Jet:
        """G[r][2s] as a jet in lam."""
        key = (r, s)
        jet = self._g_cache.get(key)
        if jet is None:
            scale = (-1.5) ** r * factorial(2 * s) / (2**s * factorial(s))
            jet = self.H[r][s].scale(scale)
            self._g_cache[key] = jet
        return jet

    def c_at_order(self, k: int) -> float:
        """Supplementary constant c_{k} (zero unless N and k are odd)."""
        if self.N % 2 == 0 or k % 2 == 0:
            return 0.0
        i = (k - 1) // 2
        return self.c[i] if i < len(self.c) else 0.0

    def n_coefficients(self) -> int:
        return sum(len(j) for row in self.H for j in row)

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "K": self.K,
            "lambda0": self.lambda0,
            "H": [[[float(x) for x in jet.coeffs] for jet in row] for row in self.H],
            "c": list(self.c),
            "seed": self.seed.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoefficientLattice":
        seed = SeedSpec.from_json_dict(d["seed"])
        lam0 = float(d["lambda0"])
        H = [[Jet(lam0, np.asarray(c, dtype=float)) for c in row] for row in d["H"]]
        return cls(int(d["N"]), int(d["K"]), H, tuple(d.get("c", ())), seed)


def build_lattice(seed: SeedSpec, N: int, K: int) -> CoefficientLattice:
    """Fill the H table from the seed.

    Row entries with r >= s are scaled derivatives of H[0][0]; entries with
    r < s copy the antiderivative chain H[0][p], where each step multiplies
    the antiderivative by -3/2 and kappa_p fixes the new value at the base
    point.  Supplementary constants are accepted only at odd N.
    """
    if N < 3:
        raise LatticeBuildError("closure requires N >= 3")
    if K < 0:
        raise LatticeBuildError("truncation order K must be >= 0")
    D = seed.jet_len
    if D < K + 2:
        raise LatticeBuildError(f"jet length {D} insufficient: need >= K+2 = {K + 2}")
    pmax = max_kappa_index(N, K)
    if len(seed.kappas) < pmax:
        raise LatticeBuildError(
            f"need {pmax} integration constants for (N={N}, K={K}), got {len(seed.kappas)}"
        )
    if N % 2 == 0 and any(c != 0.0 for c in seed.c_constants):
        raise LatticeBuildError("supplementary constants only for odd N")

    # antiderivative chain H[0][p], p = 0..pmax
    h0p = [seed.h00]
    for p in range(1, pmax + 1):
        prev = h0p[-1]
        coeffs = np.concatenate(
            [[seed.kappas[p - 1]], -1.5 * prev.coeffs / np.arange(1.0, len(prev) + 1)]
        )
        h0p.append(Jet(prev.base, coeffs))

    H: list[list[Jet]] = []
    for r in range(K + 2):
        row = []
        for s in range(smax_row(N, r) + 1):
            if r >= s:
                row.append(seed.h00.nth_derivative(r - s).scale((-2.0 / 3.0) ** (r - s)))
            else:
                row.append(h0p[s - r])
        H.append(row)

    if N % 2 == 1:
        nc = num_c_constants(K)
        c = tuple(seed.c_constants[:nc]) + (0.0,) * max(0, nc - len(seed.c_constants))
    else:
        c = ()
    return CoefficientLattice(N, K, H, c, seed)


def check_recurrences(lat: CoefficientLattice) -> dict[str, float]:
    """Verify every scalar identity of the closure, coefficient-wise.

    Returns a map identity-name -> max scaled coefficient residual; each
    coefficient pair is compared relative to max(1, |lhs|, |rhs|).
    """
    N, K = lat.N, lat.K
    res: dict[str, float] = {}

    def record(name: str, value: float) -> None:
        res[name] = max(res.get(name, 0.0), value)

    for name in ("23.1", "23.2", "32a", "43", "44", "46.1", "46.2", "ic", "definition"):
        res[name] = 0.0

    for r in range(K + 1):
        for s in range(lat.smax(r) + 1):
            # d/dlam ladder: G[r+1][s] = G[r][s]'
            d = max_coeff_residual(lat.G_jet(r + 1, s), lat.G_jet(r, s).derivative())
            record("43", d)
            record("23.1", d)
            # ll-ladder: G[r+1][s+1] = -(3/2)(2s+1) G[r][s]
            d = max_coeff_residual(
                lat.G_jet(r + 1, s + 1), lat.G_jet(r, s).scale(-1.5 * (2 * s + 1))
            )
            record("44", d)
            record("23.2", d)
            # H-table form of the same two ladders
            record("46.1", max_coeff_residual(lat.H_jet(r + 1, s + 1), lat.H_jet(r, s)))
            record(
                "46.2",
                max_coeff_residual(lat.H_jet(r, s).derivative(), lat.H_jet(r + 1, s).scale(-1.5)),
            )
        for s in range((N * r) // 2 + 1):
            # scalar closure condition: G[r][s] + 2/(3(2s+1)) G[r+1][s+1] = 0
            record(
                "32a",
                max_coeff_residual(
                    lat.G_jet(r, s), lat.G_jet(r + 1, s + 1).scale(-2.0 / (3.0 * (2 * s + 1)))
                ),
            )

    if N % 2 == 1:
        for r in range(1, K + 1, 2):  # N r odd
            s_low = (N * r + 1) // 2
            record(
                "ic",
                max_coeff_residual(
                    lat.G_jet(r + 1, s_low + 1).derivative(),
                    lat.G_jet(r + 1, s_low).scale(-1.5 * (N * r + 2)),
                ),
            )
            record(
                "definition",
                max_coeff_residual(
                    lat.G_jet(r, s_low),
                    lat.G_jet(r + 1, s_low + 1).scale(-2.0 / (3.0 * (N * r + 2))),
                ),
            )
    return res
