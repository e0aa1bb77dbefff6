"""Truncated Taylor series (jets) of single-variable functions.

A jet holds coefficients c_0..c_{D-1} of f about a base point, so that
f(x) ~ sum_j c_j (x - base)^j.  Derivatives and antiderivatives are exact
coefficient shifts, which is what makes the closure recurrences exact in this
representation.  Evaluation away from the base uses Horner summation; no
radius-of-convergence control is attempted, callers keep |x - base| small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Jet:
    base: float
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.atleast_1d(np.asarray(self.coeffs, dtype=float)))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("jet needs a 1-D, non-empty coefficient array")

    def __len__(self) -> int:
        return self.coeffs.size

    def derivative(self) -> "Jet":
        if len(self) == 1:
            return Jet(self.base, np.zeros(1))
        j = np.arange(1, len(self))
        return Jet(self.base, self.coeffs[1:] * j)

    def nth_derivative(self, n: int) -> "Jet":
        out = self
        for _ in range(n):
            out = out.derivative()
        return out

    def antiderivative(self, constant: float = 0.0) -> "Jet":
        j = np.arange(1, len(self) + 1)
        return Jet(self.base, np.concatenate([[constant], self.coeffs / j]))

    def __call__(self, x: float) -> float:
        dx = x - self.base
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * dx + c
        return acc

    def scale(self, a: float) -> "Jet":
        return Jet(self.base, self.coeffs * a)

    def __add__(self, other: "Jet") -> "Jet":
        self._check(other)
        n = max(len(self), len(other))
        c = np.zeros(n)
        c[: len(self)] += self.coeffs
        c[: len(other)] += other.coeffs
        return Jet(self.base, c)

    def __sub__(self, other: "Jet") -> "Jet":
        return self + other.scale(-1.0)

    def truncate(self, n: int) -> "Jet":
        return Jet(self.base, self.coeffs[:n].copy()) if n < len(self) else self

    def _check(self, other: "Jet") -> None:
        if other.base != self.base:
            raise ValueError("jets expanded about different base points")


def jet_constant(value: float, base: float, length: int = 1) -> Jet:
    c = np.zeros(length)
    c[0] = value
    return Jet(base, c)


def jet_exp_neg(amplitude: float, base: float, length: int) -> Jet:
    """Jet of amplitude * exp(-x) about ``base``."""
    j = np.arange(length)
    signs = np.where(j % 2 == 0, 1.0, -1.0)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1.0, length)]))
    return Jet(base, amplitude * np.exp(-base) * signs / fact)


def max_coeff_residual(a: Jet, b: Jet) -> float:
    """Max scaled coefficient difference on the shared coefficient range.

    Each coefficient pair is compared as |a_j - b_j| / max(1, |a_j|, |b_j|),
    so identities between large-magnitude jets are judged at machine
    precision rather than at their raw scale.
    """
    n = min(len(a), len(b))
    ca, cb = a.coeffs[:n], b.coeffs[:n]
    denom = np.maximum(1.0, np.maximum(np.abs(ca), np.abs(cb)))
    return float(np.max(np.abs(ca - cb) / denom)) if n else 0.0
