"""Insensitivity analysis of the hysteretic shape parameters.

A perturbed shape set (beta_bar, gamma_bar, n_bar) changes the scaled
loop slope d_y dr/dy only weakly when the perturbations trade off against
each other.  This module carries the first-order deviation functions of
the two loading branches, the six scalar deviation metrics built from
them, the fixed-metric inversions used to draw iso-deviation families,
the d_y rescaling that leaves the force response exactly invariant, and
grid sweeps over perturbation space.

Perturbations are expressed in the reduced coordinates

    delta_n = (n_bar - n) / n
    delta_1 = ((beta_bar + gamma_bar) - (beta + gamma)) / (beta + gamma)
    delta_2 = ((beta_bar - gamma_bar) - (beta - gamma)) / (beta - gamma)

which diagonalize the branch deviations: branch I responds to
(delta_n, delta_1) only and branch II to (delta_n, delta_2) only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, FeasibilityError
from .hysteresis import BoucWenParams, r_max

# Sign conventions used throughout: epsilon_1 is the branch I perturbed
# slope minus the base slope (to first order in the perturbations),
# epsilon_2 the same for branch II.  Both vanish identically at zero
# perturbation and are even in r.

VIOLATION_BETA_POSITIVE = "beta_bar > 0"
VIOLATION_GAMMA_BOUNDS = "-beta_bar <= gamma_bar <= beta_bar"
VIOLATION_N_MIN = "n_bar > 1"


class CurveType(Enum):
    """Whether a deviation curve attains its extreme inside (0, r_max).

    TYPE1 curves have an interior stationary point, so the largest
    deviation magnitude can occur before saturation.  TYPE2 curves are
    monotone in |r| up to r_max and peak at the saturation level.
    """

    TYPE1 = "type1"
    TYPE2 = "type2"


@dataclass(frozen=True)
class ParamPerturbation:
    """Reduced perturbation coordinates (delta_n, delta_1, delta_2).

    delta_n is the relative change of the exponent.  Both 1 + delta_1 and
    1 + delta_2 must stay positive or the perturbed set leaves the
    admissible class outright.
    """

    delta_n: float
    delta_1: float
    delta_2: float

    def __post_init__(self):
        vals = (self.delta_n, self.delta_1, self.delta_2)
        if not all(math.isfinite(float(v)) for v in vals):
            raise DomainError("perturbation coordinates must be finite")
        if not 1.0 + self.delta_1 > 0.0:
            raise DomainError(f"1 + delta_1 must be positive, got delta_1 = {self.delta_1}")
        if not 1.0 + self.delta_2 > 0.0:
            raise DomainError(f"1 + delta_2 must be positive, got delta_2 = {self.delta_2}")


@dataclass(frozen=True)
class DeviationMetrics:
    """Six scalar summaries of the two branch deviation curves.

    eps_1 and eps_2 are the deviations at saturation, normalized by the
    branch I average slope n/(n+1).  eps_star_1 and eps_star_2 are the
    interior stationary values under the same normalization; they are NaN
    when no interior stationary point exists (delta_n = 0 with a
    non-trivial slope offset).  area_eps_1 and area_eps_2 are the areas
    under |epsilon(r)| on (0, r_max), normalized by the area under the
    branch I base slope.  kappa = (beta+gamma)/(beta-gamma) links the two
    branches when delta_1 = delta_2.
    """

    eps_1: float
    eps_star_1: float
    area_eps_1: float
    eps_2: float
    eps_star_2: float
    area_eps_2: float
    kappa: float
    curve_type_1: CurveType
    curve_type_2: CurveType


def _require_two_sided(base: BoucWenParams):
    if base.beta + base.gamma <= 0:
        raise DomainError("analysis requires beta + gamma > 0")
    if base.beta - base.gamma <= 0:
        raise DomainError("analysis requires beta - gamma > 0 (branch II would be degenerate)")


def perturbation_from_absolute(base: BoucWenParams, beta_bar, gamma_bar, n_bar) -> ParamPerturbation:
    """Reduced coordinates of an absolute alternate shape set."""
    _require_two_sided(base)
    return ParamPerturbation(
        delta_n=(n_bar - base.n) / base.n,
        delta_1=((beta_bar + gamma_bar) - (base.beta + base.gamma)) / (base.beta + base.gamma),
        delta_2=((beta_bar - gamma_bar) - (base.beta - base.gamma)) / (base.beta - base.gamma),
    )


def feasibility_violations(base: BoucWenParams, p: ParamPerturbation) -> tuple[str, ...]:
    """Admissibility violations of the alternate set induced by p.

    Empty when the alternate (beta_bar, gamma_bar, n_bar) is itself a
    valid softening element.  The gamma bound is checked strictly because
    the reduced coordinates are undefined on the degenerate edges.
    """
    _require_two_sided(base)
    sum_bar = (1.0 + p.delta_1) * (base.beta + base.gamma)
    dif_bar = (1.0 + p.delta_2) * (base.beta - base.gamma)
    beta_bar = 0.5 * (sum_bar + dif_bar)
    n_bar = base.n * (1.0 + p.delta_n)
    out = []
    if not beta_bar > 0.0:
        out.append(VIOLATION_BETA_POSITIVE)
    if not (sum_bar > 0.0 and dif_bar > 0.0):
        out.append(VIOLATION_GAMMA_BOUNDS)
    if not n_bar > 1.0:
        out.append(VIOLATION_N_MIN)
    return tuple(out)


def alternate_params(base: BoucWenParams, p: ParamPerturbation) -> BoucWenParams:
    """Alternate shape set (beta_bar, gamma_bar, n_bar) induced by p.

    Raises FeasibilityError listing the violated invariants when the
    alternate leaves the admissible class.
    """
    violations = feasibility_violations(base, p)
    if violations:
        raise FeasibilityError(
            f"alternate set violates: {', '.join(violations)}", violations=violations
        )
    sum_bar = (1.0 + p.delta_1) * (base.beta + base.gamma)
    dif_bar = (1.0 + p.delta_2) * (base.beta - base.gamma)
    return BoucWenParams(
        beta=0.5 * (sum_bar + dif_bar),
        gamma=0.5 * (sum_bar - dif_bar),
        n=base.n * (1.0 + p.delta_n),
        d_y=base.d_y,
    )


def _log_terms(base: BoucWenParams, p: ParamPerturbation, which: int):
    """(dn_abs, offset) with offset = log(1 + delta) of the requested branch."""
    dn_abs = p.delta_n * base.n
    offset = math.log1p(p.delta_1 if which == 1 else p.delta_2)
    return dn_abs, offset


def epsilon_1(base: BoucWenParams, p: ParamPerturbation, r):
    """First-order branch I slope deviation at hysteretic deformation r.

    Even in r and exactly zero at r = 0 by the saturating limit of
    |r|**n log|r|.
    """
    _require_two_sided(base)
    dn_abs, offset = _log_terms(base, p, 1)
    r = np.asarray(r, dtype=float)
    abs_r = np.abs(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = -(base.beta + base.gamma) * abs_r**base.n * (dn_abs * np.log(abs_r) + offset)
    out = np.where(abs_r == 0.0, 0.0, val)
    return out if out.ndim else float(out)


def epsilon_2(base: BoucWenParams, p: ParamPerturbation, r):
    """First-order branch II slope deviation at hysteretic deformation r."""
    _require_two_sided(base)
    dn_abs, offset = _log_terms(base, p, 2)
    r = np.asarray(r, dtype=float)
    abs_r = np.abs(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (base.beta - base.gamma) * abs_r**base.n * (dn_abs * np.log(abs_r) + offset)
    out = np.where(abs_r == 0.0, 0.0, val)
    return out if out.ndim else float(out)


def exact_deviation_1(base: BoucWenParams, alt: BoucWenParams, r):
    """Exact branch I slope difference between alt and base (no expansion)."""
    abs_r = np.abs(np.asarray(r, dtype=float))
    return (base.beta + base.gamma) * abs_r**base.n - (alt.beta + alt.gamma) * abs_r**alt.n


def exact_deviation_2(base: BoucWenParams, alt: BoucWenParams, r):
    """Exact branch II slope difference between alt and base."""
    abs_r = np.abs(np.asarray(r, dtype=float))
    return (alt.beta - alt.gamma) * abs_r**alt.n - (base.beta - base.gamma) * abs_r**base.n


def stationary_point(base: BoucWenParams, p: ParamPerturbation, branch: int = 1) -> float:
    """Interior stationary point of the branch deviation curve.

    Exists only when delta_n != 0; otherwise the curve is monotone in |r|
    and a DomainError is raised rather than returning a sentinel.
    """
    _require_two_sided(base)
    if branch not in (1, 2):
        raise DomainError(f"branch must be 1 or 2, got {branch}")
    if p.delta_n == 0.0:
        raise DomainError("no interior stationary point when delta_n = 0")
    dn_abs, offset = _log_terms(base, p, branch)
    try:
        return math.exp(-(1.0 / base.n + offset / dn_abs))
    except OverflowError:
        # the point exists but sits beyond the double range; callers compare
        # it against r_max, and inf keeps that comparison honest
        return math.inf


def average_slope(base: BoucWenParams) -> float:
    """Branch I slope averaged over the saturation band, n/(n+1)."""
    return base.n / (base.n + 1.0)


def slope_area(base: BoucWenParams) -> float:
    """Area under the branch I base slope on (0, r_max)."""
    return base.n / ((base.beta + base.gamma) ** (1.0 / base.n) * (base.n + 1.0))


def kappa(base: BoucWenParams) -> float:
    """Branch linkage ratio (beta+gamma)/(beta-gamma)."""
    _require_two_sided(base)
    return (base.beta + base.gamma) / (base.beta - base.gamma)


def _zero_crossing(base, dn_abs, offset):
    """Interior zero of dn_abs*log(r) + offset on (0, r_max), or None."""
    if dn_abs == 0.0:
        return None
    log_rc = -offset / dn_abs
    log_rmax = -math.log(base.beta + base.gamma) / base.n
    if log_rc < log_rmax:
        return math.exp(log_rc)
    return None


def _area_metric(base: BoucWenParams, dn_abs, offset, lead) -> float:
    """Normalized area under |lead * |r|**n * (dn_abs log|r| + offset)|."""
    rm = r_max(base)

    def integrand(r):
        if r == 0.0:
            return 0.0
        return abs(lead) * r**base.n * abs(dn_abs * math.log(r) + offset)

    rc = _zero_crossing(base, dn_abs, offset)
    pts = [rc] if rc is not None else None
    total, _ = quad(integrand, 0.0, rm, points=pts, limit=200, epsabs=1e-13, epsrel=1e-11)
    return total / slope_area(base)


def _stationary_value(base, dn_abs, offset, lead_signed, ravg):
    """Normalized deviation value at the interior stationary point.

    Computed in log space so extreme offset/dn ratios saturate to 0 or
    inf instead of tripping intermediate overflow.
    """
    log_mag = (
        math.log(abs(dn_abs) / base.n)
        + math.log(abs(lead_signed))
        - math.log(ravg)
        - 1.0
        - base.n * offset / dn_abs
    )
    sign = math.copysign(1.0, dn_abs) * math.copysign(1.0, lead_signed)
    try:
        return sign * math.exp(log_mag)
    except OverflowError:
        return sign * math.inf


def metrics(base: BoucWenParams, p: ParamPerturbation) -> DeviationMetrics:
    """All six deviation metrics of the perturbation p about base.

    The stationary-value metrics are taken from the closed forms and are
    NaN when delta_n = 0 leaves the curve without an interior stationary
    point (unless the curve is identically zero, which pins them to 0).
    Curve types report whether the stationary point falls inside
    (0, r_max); delta_n = 0 forces TYPE2.
    """
    _require_two_sided(base)
    ravg = average_slope(base)
    rm = r_max(base)
    kap = kappa(base)
    dn_abs = p.delta_n * base.n
    off_1 = math.log1p(p.delta_1)
    off_2 = math.log1p(p.delta_2)
    log_sum = math.log(base.beta + base.gamma)

    eps_1 = (p.delta_n * log_sum - off_1) / ravg
    eps_2 = (off_2 - p.delta_n * log_sum) / (kap * ravg)

    if dn_abs == 0.0:
        eps_star_1 = 0.0 if off_1 == 0.0 else math.nan
        eps_star_2 = 0.0 if off_2 == 0.0 else math.nan
        type_1 = type_2 = CurveType.TYPE2
    else:
        eps_star_1 = _stationary_value(base, dn_abs, off_1, base.beta + base.gamma, ravg)
        eps_star_2 = _stationary_value(base, dn_abs, off_2, -(base.beta - base.gamma), ravg)
        log_rmax = math.log(rm)
        type_1 = (
            CurveType.TYPE1
            if -(1.0 / base.n + off_1 / dn_abs) < log_rmax
            else CurveType.TYPE2
        )
        type_2 = (
            CurveType.TYPE1
            if -(1.0 / base.n + off_2 / dn_abs) < log_rmax
            else CurveType.TYPE2
        )

    area_1 = _area_metric(base, dn_abs, off_1, base.beta + base.gamma)
    area_2 = _area_metric(base, dn_abs, off_2, base.beta - base.gamma)

    return DeviationMetrics(
        eps_1=eps_1,
        eps_star_1=eps_star_1,
        area_eps_1=area_1,
        eps_2=eps_2,
        eps_star_2=eps_star_2,
        area_eps_2=area_2,
        kappa=kap,
        curve_type_1=type_1,
        curve_type_2=type_2,
    )


def delta_1_for_eps_1(base: BoucWenParams, eps_1: float, delta_n: float) -> float:
    """delta_1 that realizes a prescribed saturation deviation eps_1.

    Inverts the saturation metric at fixed delta_n, tracing one member of
    the iso-eps_1 family.
    """
    _require_two_sided(base)
    n = base.n
    log_sum = math.log(base.beta + base.gamma)
    return math.expm1(delta_n * log_sum - n * eps_1 / (n + 1.0))


def delta_2_for_eps_2(base: BoucWenParams, eps_2: float, delta_n: float) -> float:
    """delta_2 that realizes a prescribed saturation deviation eps_2."""
    _require_two_sided(base)
    n = base.n
    log_sum = math.log(base.beta + base.gamma)
    return math.expm1(delta_n * log_sum + n * kappa(base) * eps_2 / (n + 1.0))


def eps_star_1_at_fixed_eps_1(eps_1: float, delta_n: float, n: float) -> float:
    """Stationary metric along an iso-eps_1 family.

    Depends only on (eps_1, delta_n, n); the loop scale beta + gamma
    drops out entirely, which is what makes iso-deviation families
    portable across oscillators of very different hysteretic intensity.
    """
    if delta_n == 0.0:
        raise DomainError("stationary metric undefined at delta_n = 0")
    return (delta_n * (n + 1.0) / n) * math.exp(n * eps_1 / (delta_n * (n + 1.0)) - 1.0)


def eps_star_2_at_fixed_eps_2(eps_2: float, delta_n: float, n: float, kap: float) -> float:
    """Stationary metric along an iso-eps_2 family (kappa enters here)."""
    if delta_n == 0.0:
        raise DomainError("stationary metric undefined at delta_n = 0")
    return (
        -(n + 1.0)
        * delta_n
        / (n * kap)
        * math.exp(-(1.0 + n * kap * eps_2 / ((n + 1.0) * delta_n)))
    )


def equivalent_params(target_d_y: float, source: BoucWenParams) -> BoucWenParams:
    """Shape set at a different yield deformation with identical forces.

    Scaling beta and gamma by (target_d_y / source_d_y)**n compensates a
    change of d_y exactly, so the two parameterizations produce the same
    restoring force history under any excitation.  The redundancy means a
    d_y convention must be fixed before shape parameters can be compared.
    """
    if not target_d_y > 0:
        raise DomainError(f"target d_y must be positive, got {target_d_y}")
    scale = (target_d_y / source.d_y) ** source.n
    return BoucWenParams(
        beta=source.beta * scale, gamma=source.gamma * scale, n=source.n, d_y=target_d_y
    )


def rmax_residual(base: BoucWenParams, alt: BoucWenParams) -> float:
    """Absolute difference between the saturation levels of alt and base.

    Zero exactly when the alternate preserves r_max, which happens if and
    only if its saturation deviation eps_1 vanishes.
    """
    return abs(r_max(alt) - r_max(base))


# ---------------------------------------------------------------------------
# Perturbation-plane sweeps


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis.

    Half-open axes (lo, hi] step from lo + step so a zero-perturbation
    endpoint can be excluded by construction; closed axes are plain
    uniform grids including both ends.
    """

    lo: float
    hi: float
    num: int
    closed: bool = False

    def __post_init__(self):
        if not self.num >= 1:
            raise DomainError(f"axis needs num >= 1, got {self.num}")
        if not self.hi > self.lo:
            raise DomainError(f"axis needs hi > lo, got [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        if self.closed:
            if self.num == 1:
                return np.array([self.lo])
            return np.linspace(self.lo, self.hi, self.num)
        step = (self.hi - self.lo) / self.num
        return self.lo + step * np.arange(1, self.num + 1)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sweep of (delta_n, delta_1) with delta_2 slaved to delta_1.

    delta_2_factor sets delta_2 = factor * delta_1 cell by cell, covering
    both the independent branch II sweeps (factor 1 reads the delta_2
    columns directly) and the proportional families used in response
    error maps.
    """

    delta_n_axis: AxisSpec
    delta_1_axis: AxisSpec
    delta_2_factor: float = 1.0


@dataclass
class ContourGrid:
    """Dense sweep result over the perturbation plane.

    2-D arrays are indexed [i_n, i_1] following the axis ordering in the
    spec of the sweep; infeasible cells hold NaN metrics and a violation
    string so feasibility boundaries can be traced.
    """

    delta_n: np.ndarray
    delta_1: np.ndarray
    delta_2_factor: float
    eps_1: np.ndarray = field(repr=False)
    eps_star_1: np.ndarray = field(repr=False)
    area_eps_1: np.ndarray = field(repr=False)
    eps_2: np.ndarray = field(repr=False)
    eps_star_2: np.ndarray = field(repr=False)
    area_eps_2: np.ndarray = field(repr=False)
    feasible: np.ndarray = field(repr=False)
    curve_type_1: np.ndarray = field(repr=False)
    curve_type_2: np.ndarray = field(repr=False)
    violation: np.ndarray = field(repr=False)

    @property
    def delta_2(self) -> np.ndarray:
        return self.delta_2_factor * self.delta_1

    def cells(self):
        """Row-major iteration (delta_n outer) matching the CSV layout."""
        for i, dn in enumerate(self.delta_n):
            for j, d1 in enumerate(self.delta_1):
                yield i, j, float(dn), float(d1), float(self.delta_2[j])

    def select(self, **bounds):
        """Boolean mask of feasible cells meeting |metric| <= bound.

        Keyword names follow the metric fields, e.g.
        select(eps_1=0.1, area_eps_1=0.05).  Intended as plumbing for
        region queries over sweep results.
        """
        mask = self.feasible.copy()
        for name, bound in bounds.items():
            arr = getattr(self, name)
            with np.errstate(invalid="ignore"):
                mask &= np.abs(arr) <= bound
        return mask


def sweep(base: BoucWenParams, grid: GridSpec) -> ContourGrid:
    """Evaluate the six metrics on every cell of the perturbation grid.

    Cells whose alternate set leaves the admissible class are flagged
    infeasible and carry no metric values.  Cells whose perturbation
    coordinates are degenerate (1 + delta <= 0) are likewise infeasible
    with the gamma-bound violation recorded.
    """
    dn_vals = grid.delta_n_axis.values()
    d1_vals = grid.delta_1_axis.values()
    shape = (dn_vals.size, d1_vals.size)
    out = ContourGrid(
        delta_n=dn_vals,
        delta_1=d1_vals,
        delta_2_factor=grid.delta_2_factor,
        eps_1=np.full(shape, np.nan),
        eps_star_1=np.full(shape, np.nan),
        area_eps_1=np.full(shape, np.nan),
        eps_2=np.full(shape, np.nan),
        eps_star_2=np.full(shape, np.nan),
        area_eps_2=np.full(shape, np.nan),
        feasible=np.zeros(shape, dtype=bool),
        curve_type_1=np.full(shape, "", dtype=object),
        curve_type_2=np.full(shape, "", dtype=object),
        violation=np.full(shape, "", dtype=object),
    )
    for i, dn in enumerate(dn_vals):
        for j, d1 in enumerate(d1_vals):
            d2 = grid.delta_2_factor * d1
            if 1.0 + d1 <= 0.0 or 1.0 + d2 <= 0.0:
                out.violation[i, j] = VIOLATION_GAMMA_BOUNDS
                continue
            p = ParamPerturbation(delta_n=float(dn), delta_1=float(d1), delta_2=float(d2))
            violations = feasibility_violations(base, p)
            if violations:
                out.violation[i, j] = "; ".join(violations)
                continue
            m = metrics(base, p)
            out.feasible[i, j] = True
            out.eps_1[i, j] = m.eps_1
            out.eps_star_1[i, j] = m.eps_star_1
            out.area_eps_1[i, j] = m.area_eps_1
            out.eps_2[i, j] = m.eps_2
            out.eps_star_2[i, j] = m.eps_star_2
            out.area_eps_2[i, j] = m.area_eps_2
            out.curve_type_1[i, j] = m.curve_type_1.value
            out.curve_type_2[i, j] = m.curve_type_2.value
    return out
