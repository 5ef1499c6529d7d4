"""Softening Bouc-Wen element: evolution law, branch structure, force, energy.

The element couples a restoring-force model to a dimensionless hysteretic
deformation r(t) driven by the deformation rate.  With the leading
coefficient of the evolution law fixed at one, the shape of the loops is
controlled by (beta, gamma, n) alone and r is trapped inside
[-r_max, r_max] with r_max = (beta + gamma)**(-1/n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

BRANCH_I = 1
BRANCH_II = 2


@dataclass(frozen=True)
class BoucWenParams:
    """Shape parameters of one hysteretic element.

    The admissible softening class requires -beta <= gamma <= beta and
    n > 1.  d_y is the yield deformation that scales the hysteretic
    deformation rate.  The leading coefficient a of the evolution law is
    fixed at 1.0; it is redundant against (beta, gamma) and keeping it
    free would only re-introduce the classical overparameterization.
    """

    beta: float
    gamma: float
    n: float
    d_y: float
    a: float = 1.0

    def __post_init__(self):
        vals = (self.beta, self.gamma, self.n, self.d_y, self.a)
        if not all(math.isfinite(float(v)) for v in vals):
            raise DomainError("Bouc-Wen parameters must be finite")
        if self.a != 1.0:
            raise DomainError("leading coefficient of the evolution law is fixed at 1")
        if self.beta < 0:
            raise DomainError(f"beta must be non-negative, got {self.beta}")
        if not -self.beta <= self.gamma <= self.beta:
            raise DomainError(
                f"gamma must satisfy -beta <= gamma <= beta, got beta={self.beta}, gamma={self.gamma}"
            )
        if not self.n > 1:
            raise DomainError(f"n must exceed 1, got {self.n}")
        if not self.d_y > 0:
            raise DomainError(f"d_y must be positive, got {self.d_y}")


@dataclass(frozen=True)
class OscillatorParams:
    """Single-mass oscillator with an elastic share alpha and a hysteretic share."""

    m: float
    c: float
    k: float
    alpha: float
    bw: BoucWenParams

    def __post_init__(self):
        if not (self.m > 0 and self.k > 0 and self.c >= 0):
            raise DomainError("oscillator requires m > 0, k > 0, c >= 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def yield_force(self):
        return self.k * self.bw.d_y


def r_max(bw: BoucWenParams) -> float:
    """Saturation level of the hysteretic deformation, (beta+gamma)**(-1/n)."""
    s = bw.beta + bw.gamma
    if s <= 0:
        raise DomainError(f"r_max requires beta + gamma > 0, got {s}")
    return s ** (-1.0 / bw.n)


def r_dot(bw: BoucWenParams, y_dot, r):
    """Hysteretic deformation rate for deformation rate y_dot at state r.

    Accepts scalars or broadcastable arrays.  The |r|**(n-1)*r factor is
    forced to exactly zero at r == 0 so no spurious NaN can appear there.
    """
    y_dot = np.asarray(y_dot, dtype=float)
    r = np.asarray(r, dtype=float)
    if not (np.all(np.isfinite(y_dot)) and np.all(np.isfinite(r))):
        raise DomainError("r_dot requires finite y_dot and r")
    abs_r = np.abs(r)
    odd_pow = np.where(r == 0.0, 0.0, abs_r ** (bw.n - 1.0) * r)
    out = (y_dot - bw.beta * np.abs(y_dot) * odd_pow - bw.gamma * y_dot * abs_r**bw.n) / bw.d_y
    return out if out.ndim else float(out)


def branch_of(y_dot, r) -> int:
    """Loading branch for the signs of (y_dot, r).

    Branch I is the stiffness-degrading quadrant pair (both signs equal),
    branch II the recovering pair.  Either argument at zero resolves to
    branch I so the decomposition covers the whole state plane.
    """
    if y_dot == 0.0 or r == 0.0:
        return BRANCH_I
    return BRANCH_I if (y_dot > 0.0) == (r > 0.0) else BRANCH_II


def r_prime_d(bw: BoucWenParams, r, branch: int):
    """Scaled slope d_y * dr/dy on the given branch.

    Branch I yields 1 - (beta+gamma)|r|**n, which runs from 1 at the
    origin to 0 at saturation and is negative outside [-r_max, r_max].
    Branch II yields 1 + (beta-gamma)|r|**n.
    """
    r = np.asarray(r, dtype=float)
    abs_rn = np.abs(r) ** bw.n
    if branch == BRANCH_I:
        out = 1.0 - (bw.beta + bw.gamma) * abs_rn
    elif branch == BRANCH_II:
        out = 1.0 + (bw.beta - bw.gamma) * abs_rn
    else:
        raise DomainError(f"branch must be {BRANCH_I} or {BRANCH_II}, got {branch}")
    return out if out.ndim else float(out)


def hysteretic_force(osc: OscillatorParams, r):
    """Restoring force carried by the hysteretic share, (1-alpha) d_y k r."""
    return (1.0 - osc.alpha) * osc.bw.d_y * osc.k * np.asarray(r, dtype=float)


def hysteretic_energy(t, r, y_dot, d_y, k):
    """Cumulative dissipated energy d_y k * integral of r * y_dot dt.

    Trapezoidal quadrature on the sampled product; the returned series
    starts at exactly zero.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    y_dot = np.asarray(y_dot, dtype=float)
    if t.size == 0:
        raise DomainError("hysteretic_energy requires a non-empty history")
    if not (t.shape == r.shape == y_dot.shape):
        raise DomainError("t, r and y_dot must share one shape")
    power = d_y * k * r * y_dot
    out = np.empty_like(power)
    out[0] = 0.0
    np.cumsum(0.5 * (power[1:] + power[:-1]) * np.diff(t), out=out[1:])
    return out
