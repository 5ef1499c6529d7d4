"""Time-history simulation of hysteretic oscillators and shear chains.

One fixed-step RK4 core integrates a chain of N lumped masses whose
stories carry an elastic share alpha of the stiffness plus a softening
hysteretic share.  The core broadcasts over a leading batch axis so a
family of systems (a period sweep, a cloud of filter sigma points) can be
advanced in lockstep; a single oscillator is the N = 1 chain.

Also here: normalized response error, Park-Ang damage indexing, and
inelastic displacement-ratio spectra.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from . import deviation
from .errors import DomainError, NumericalError
from .groundmotion import GroundMotion
from .hysteresis import BoucWenParams, OscillatorParams, hysteretic_energy


@dataclass(frozen=True)
class ChainSystem:
    """Shear chain of lumped masses with per-story hysteretic elements.

    Element j connects mass j to mass j-1 (mass 1 to the base) and
    carries stiffness k[j], dashpot c[j] and shape set bw[j].  The
    construction works for any N >= 1; N = 1 is a single oscillator.
    """

    m: tuple
    k: tuple
    c: tuple
    bw: tuple
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(float(v) for v in self.m))
        object.__setattr__(self, "k", tuple(float(v) for v in self.k))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "bw", tuple(self.bw))
        n = len(self.m)
        if n < 1 or not (len(self.k) == len(self.c) == len(self.bw) == n):
            raise DomainError("m, k, c and bw must have one common length >= 1")
        if not all(isinstance(b, BoucWenParams) for b in self.bw):
            raise DomainError("bw must hold BoucWenParams")
        if not all(v > 0 for v in self.m) or not all(v > 0 for v in self.k):
            raise DomainError("masses and stiffnesses must be positive")
        if not all(v >= 0 for v in self.c):
            raise DomainError("damping coefficients must be non-negative")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    @classmethod
    def from_oscillator(cls, osc: OscillatorParams) -> "ChainSystem":
        return cls(m=(osc.m,), k=(osc.k,), c=(osc.c,), bw=(osc.bw,), alpha=osc.alpha)

    @property
    def n_stories(self) -> int:
        return len(self.m)

    def mass_matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.m, dtype=float))

    def _chain_matrix(self, coeff) -> np.ndarray:
        coeff = np.asarray(coeff, dtype=float)
        n = coeff.size
        out = np.zeros((n, n))
        for j in range(n):
            out[j, j] += coeff[j]
            if j + 1 < n:
                out[j, j] += coeff[j + 1]
                out[j, j + 1] -= coeff[j + 1]
                out[j + 1, j] -= coeff[j + 1]
        return out

    def damping_matrix(self) -> np.ndarray:
        return self._chain_matrix(self.c)

    def elastic_stiffness_matrix(self) -> np.ndarray:
        return self._chain_matrix(self.k)

    def hysteretic_coupling_matrix(self) -> np.ndarray:
        """Upper-bidiagonal map from element deformations r to story forces."""
        n = self.n_stories
        dk = np.array([b.d_y for b in self.bw]) * np.asarray(self.k, dtype=float)
        out = np.zeros((n, n))
        for j in range(n):
            out[j, j] = dk[j]
            if j + 1 < n:
                out[j, j + 1] = -dk[j + 1]
        return out


def _coeffs(system: ChainSystem) -> SimpleNamespace:
    return SimpleNamespace(
        m=np.asarray(system.m, dtype=float),
        k=np.asarray(system.k, dtype=float),
        c=np.asarray(system.c, dtype=float),
        beta=np.array([b.beta for b in system.bw]),
        gamma=np.array([b.gamma for b in system.bw]),
        n=np.array([b.n for b in system.bw]),
        d=np.array([b.d_y for b in system.bw]),
        alpha=float(system.alpha),
    )


def _story_diff(x):
    """Per-story relative quantity: x_j minus x_{j-1}, ground at zero."""
    out = x.copy()
    out[..., 1:] -= x[..., :-1]
    return out


def _rates(y, v, r, ub, cf):
    """State derivatives of the chain under base acceleration ub.

    All arguments broadcast over a leading batch axis; parameter arrays
    in cf may themselves carry that axis (per-batch parameters).
    """
    vd = _story_diff(v)
    yd = _story_diff(y)
    abs_r = np.abs(r)
    odd = np.where(r == 0.0, 0.0, abs_r ** (cf.n - 1.0) * r)
    rdot = (vd - cf.beta * np.abs(vd) * odd - cf.gamma * vd * abs_r**cf.n) / cf.d
    shear = cf.alpha * cf.k * yd + (1.0 - cf.alpha) * cf.d * cf.k * r + cf.c * vd
    net = shear.copy()
    net[..., :-1] -= shear[..., 1:]
    acc = -ub - net / cf.m
    return v, acc, rdot


def _abs_acc(y, v, r, cf):
    """Absolute accelerations; independent of the base excitation."""
    vd = _story_diff(v)
    yd = _story_diff(y)
    shear = cf.alpha * cf.k * yd + (1.0 - cf.alpha) * cf.d * cf.k * r + cf.c * vd
    net = shear.copy()
    net[..., :-1] -= shear[..., 1:]
    return -net / cf.m


def _rk4_step(y, v, r, u0, uh, u1, dt, cf):
    k1y, k1v, k1r = _rates(y, v, r, u0, cf)
    k2y, k2v, k2r = _rates(y + 0.5 * dt * k1y, v + 0.5 * dt * k1v, r + 0.5 * dt * k1r, uh, cf)
    k3y, k3v, k3r = _rates(y + 0.5 * dt * k2y, v + 0.5 * dt * k2v, r + 0.5 * dt * k2r, uh, cf)
    k4y, k4v, k4r = _rates(y + dt * k3y, v + dt * k3v, r + dt * k3r, u1, cf)
    sixth = dt / 6.0
    return (
        y + sixth * (k1y + 2.0 * (k2y + k3y) + k4y),
        v + sixth * (k1v + 2.0 * (k2v + k3v) + k4v),
        r + sixth * (k1r + 2.0 * (k2r + k3r) + k4r),
    )


def _excitation_samples(excitation, dt, duration):
    """Base acceleration at the step grid and at the half-step grid.

    Sampled records are linearly interpolated at the half steps (and at
    any grid refinement below the record rate); callables are evaluated
    exactly at the stage times.
    """
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    if callable(excitation):
        if duration is None:
            raise DomainError("a callable excitation needs an explicit duration")
        steps = int(round(duration / dt))
        if steps < 1:
            raise DomainError("duration must cover at least one step")
        t = np.arange(steps + 1) * dt
        u = np.asarray(excitation(t), dtype=float)
        if u.shape != t.shape:
            u = np.array([float(excitation(float(ti))) for ti in t])
        uh = np.asarray(excitation(t[:-1] + 0.5 * dt), dtype=float)
        if uh.shape != (steps,):
            uh = np.array([float(excitation(float(ti))) for ti in t[:-1] + 0.5 * dt])
        return t, u, uh
    if not isinstance(excitation, GroundMotion):
        raise DomainError("excitation must be a GroundMotion or a callable of time")
    record_duration = excitation.duration
    if duration is None:
        duration = record_duration
    elif duration > record_duration + 1e-12:
        raise DomainError(
            f"requested duration {duration} s exceeds the record ({record_duration} s)"
        )
    steps = int(round(duration / dt))
    if steps < 1:
        raise DomainError("duration must cover at least one step")
    t = np.arange(steps + 1) * dt
    tm = excitation.t
    u = np.interp(t, tm, excitation.accel)
    uh = np.interp(t[:-1] + 0.5 * dt, tm, excitation.accel)
    return t, u, uh


@dataclass
class ResponseHistory:
    """Sampled response of a chain (columns are stories, one for N = 1).

    y and y_dot are relative to the base; y_abs_acc is the absolute
    acceleration; r, f_r and e_h are the per-element hysteretic
    deformation, restoring force and cumulative dissipated energy.
    """

    t: np.ndarray
    y: np.ndarray
    y_dot: np.ndarray
    y_abs_acc: np.ndarray
    r: np.ndarray
    f_r: np.ndarray
    e_h: np.ndarray
    excitation: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.y.shape[1]

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def drift(self) -> np.ndarray:
        return _story_diff(self.y)

    def drift_rate(self) -> np.ndarray:
        return _story_diff(self.y_dot)

    def peak_drift(self) -> np.ndarray:
        return np.max(np.abs(self.drift()), axis=0)

    def total_energy(self) -> np.ndarray:
        return self.e_h[-1].copy()

    def dissipated_work(self) -> np.ndarray:
        """Work done by each hysteretic restoring force over the run.

        Equals (1 - alpha) times the reference energy series e_h; this is
        the energy measure the damage index is calibrated against.
        """
        power = self.f_r * self.drift_rate()
        return np.trapezoid(power, self.t, axis=0)


def simulate_chain(system: ChainSystem, excitation, dt: float = 1e-3, duration=None) -> ResponseHistory:
    """Integrate the chain from rest under a base acceleration history.

    Fixed-step RK4; raises NumericalError with the blow-up time if the
    state leaves the finite range.
    """
    cf = _coeffs(system)
    t, u, uh = _excitation_samples(excitation, dt, duration)
    steps = t.size - 1
    n = system.n_stories
    ys = np.zeros((steps + 1, n))
    vs = np.zeros((steps + 1, n))
    rs = np.zeros((steps + 1, n))
    y = np.zeros(n)
    v = np.zeros(n)
    r = np.zeros(n)
    for i in range(steps):
        y, v, r = _rk4_step(y, v, r, u[i], uh[i], u[i + 1], dt, cf)
        if not (np.isfinite(y).all() and np.isfinite(v).all() and np.isfinite(r).all()):
            raise NumericalError("chain integration diverged", t=float(t[i + 1]))
        ys[i + 1] = y
        vs[i + 1] = v
        rs[i + 1] = r
    f_r = (1.0 - cf.alpha) * cf.d * cf.k * rs
    vdrift = _story_diff(vs)
    e_h = np.empty_like(rs)
    for j in range(n):
        e_h[:, j] = hysteretic_energy(t, rs[:, j], vdrift[:, j], cf.d[j], cf.k[j])
    y_abs = _abs_acc(ys, vs, rs, cf)
    return ResponseHistory(
        t=t, y=ys, y_dot=vs, y_abs_acc=y_abs, r=rs, f_r=f_r, e_h=e_h, excitation=u
    )


def simulate_sdof(osc: OscillatorParams, excitation, dt: float = 1e-3, duration=None) -> ResponseHistory:
    """Integrate a single oscillator; the N = 1 chain, step for step."""
    return simulate_chain(ChainSystem.from_oscillator(osc), excitation, dt=dt, duration=duration)


def nrmse_percent(reference, test) -> float:
    """Normalized response error in percent.

    Root of the summed squared deviations, divided by the series length
    and by the range of the reference series.  Asymmetric: the reference
    fixes the normalization.
    """
    reference = np.asarray(reference, dtype=float).ravel()
    test = np.asarray(test, dtype=float).ravel()
    if reference.size == 0 or reference.size != test.size:
        raise DomainError("series must be non-empty and of equal length")
    span = float(np.max(reference) - np.min(reference))
    if span == 0.0:
        raise DomainError("reference series has zero range")
    return 100.0 * math.sqrt(float(np.sum((test - reference) ** 2))) / (reference.size * span)


# ---------------------------------------------------------------------------
# Damage indexing

DAMAGE_STATES = (("slight", 0.2), ("moderate", 0.5), ("severe", 1.0))


@dataclass(frozen=True)
class DamageConfig:
    """Ultimate deformation, strength share and cyclic weight for one element."""

    y_ult: float
    delta_e: float
    f_y: float

    def __post_init__(self):
        if not (self.y_ult > 0 and self.f_y > 0 and self.delta_e >= 0):
            raise DomainError("damage config requires y_ult > 0, f_y > 0, delta_e >= 0")

    @classmethod
    def from_oscillator(cls, osc: OscillatorParams, y_ult_factor: float = 6.0, delta_e: float = 0.1):
        return cls(y_ult=y_ult_factor * osc.bw.d_y, delta_e=delta_e, f_y=osc.k * osc.bw.d_y)

    @classmethod
    def from_chain(cls, system: ChainSystem, y_ult_factor: float = 6.0, delta_e: float = 0.1):
        return tuple(
            cls(y_ult=y_ult_factor * b.d_y, delta_e=delta_e, f_y=k * b.d_y)
            for k, b in zip(system.k, system.bw)
        )


def damage_state(di: float) -> str:
    """Band label for a damage index value."""
    if not math.isfinite(di) or di < 0:
        raise DomainError(f"damage index must be finite and non-negative, got {di}")
    for label, upper in DAMAGE_STATES:
        if di < upper:
            return label
    return "collapse"


def park_ang_index(history: ResponseHistory, damage):
    """Combined deformation and energy damage index per element.

    Peak story drift over ultimate deformation, plus the work of the
    hysteretic restoring force weighted by delta_e and normalized by the
    yield strength and ultimate deformation.  The energy term uses the
    actual restoring-force work (the post-yield share of the stiffness
    scales it), not the raw reference series e_h.  Returns (index,
    state) for a single element and (indices, states) arrays for a
    chain.
    """
    n = history.n_elements
    cfgs = (damage,) * n if isinstance(damage, DamageConfig) else tuple(damage)
    if len(cfgs) != n:
        raise DomainError(f"need one damage config per element, got {len(cfgs)} for {n}")
    peak = history.peak_drift()
    e_tot = history.dissipated_work()
    di = np.array(
        [
            peak[j] / cfgs[j].y_ult + cfgs[j].delta_e * e_tot[j] / (cfgs[j].f_y * cfgs[j].y_ult)
            for j in range(n)
        ]
    )
    states = [damage_state(v) for v in di]
    if n == 1:
        return float(di[0]), states[0]
    return di, states


# ---------------------------------------------------------------------------
# Inelastic displacement-ratio spectra


def _batch_peak_displacement(cf, u, uh, dt, steps, n_batch):
    """Largest |y| on the step grid for a batch of N = 1 systems."""
    y = np.zeros((n_batch, 1))
    v = np.zeros((n_batch, 1))
    r = np.zeros((n_batch, 1))
    peak = np.zeros((n_batch, 1))
    for i in range(steps):
        y, v, r = _rk4_step(y, v, r, u[i], uh[i], u[i + 1], dt, cf)
        np.maximum(peak, np.abs(y), out=peak)
        if i % 200 == 0 and not np.isfinite(y).all():
            raise NumericalError("spectrum integration diverged", t=(i + 1) * dt)
    if not np.isfinite(peak).all():
        raise NumericalError("spectrum integration diverged")
    return peak[:, 0]


def cr_spectrum(
    motion: GroundMotion,
    periods,
    strength_reduction: float,
    damping_ratio: float,
    beta: float,
    gamma: float,
    n: float,
    alpha: float,
    dt: float = 1e-3,
) -> np.ndarray:
    """Inelastic over elastic peak displacement, period by period.

    Each period defines a unit-mass oscillator k = (2*pi/T)**2 with
    c = 2*zeta*sqrt(k).  The elastic run (alpha = 1) fixes the yield
    deformation d_y = peak_elastic / strength_reduction, then the
    hysteretic run with the supplied elastic share alpha produces the
    ratio.  alpha is a required input; there is no canonical default.
    """
    periods = np.asarray(periods, dtype=float)
    if periods.ndim != 1 or periods.size == 0 or not np.all(periods > 0):
        raise DomainError("periods must be a non-empty 1-D array of positive values")
    if not strength_reduction > 0:
        raise DomainError(f"strength_reduction must be positive, got {strength_reduction}")
    if not 0 <= damping_ratio < 1:
        raise DomainError(f"damping_ratio must lie in [0, 1), got {damping_ratio}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    BoucWenParams(beta=beta, gamma=gamma, n=n, d_y=1.0)

    t, u, uh = _excitation_samples(motion, dt, None)
    steps = t.size - 1
    nb = periods.size
    k = (2.0 * math.pi / periods)[:, None] ** 2
    ones = np.ones((nb, 1))

    cf_el = SimpleNamespace(
        m=1.0, k=k, c=2.0 * damping_ratio * np.sqrt(k),
        beta=beta * ones, gamma=gamma * ones, n=n * ones, d=ones, alpha=1.0,
    )
    peak_el = _batch_peak_displacement(cf_el, u, uh, dt, steps, nb)
    if np.any(peak_el == 0.0):
        raise DomainError("record produced zero elastic response at some period")

    d_y = (peak_el / strength_reduction)[:, None]
    cf_in = SimpleNamespace(
        m=1.0, k=k, c=cf_el.c,
        beta=cf_el.beta, gamma=cf_el.gamma, n=cf_el.n, d=d_y, alpha=float(alpha),
    )
    peak_in = _batch_peak_displacement(cf_in, u, uh, dt, steps, nb)
    return peak_in / peak_el


# ---------------------------------------------------------------------------
# Response-error sweeps over the perturbation plane


@dataclass
class NrmseSweep:
    """Per-cell normalized response errors of alternate shape sets."""

    delta_n: np.ndarray
    delta_1: np.ndarray
    delta_2_factor: float
    nrmse_f_r: np.ndarray = field(repr=False)
    nrmse_y: np.ndarray = field(repr=False)
    nrmse_y_abs: np.ndarray = field(repr=False)
    feasible: np.ndarray = field(repr=False)
    violation: np.ndarray = field(repr=False)

    @property
    def delta_2(self) -> np.ndarray:
        return self.delta_2_factor * self.delta_1


def _nrmse_cell(osc, pert, excitation, dt, duration, truth):
    alt = deviation.alternate_params(osc.bw, pert)
    alt_osc = OscillatorParams(m=osc.m, c=osc.c, k=osc.k, alpha=osc.alpha, bw=alt)
    hist = simulate_sdof(alt_osc, excitation, dt=dt, duration=duration)
    return (
        nrmse_percent(truth.f_r[:, 0], hist.f_r[:, 0]),
        nrmse_percent(truth.y[:, 0], hist.y[:, 0]),
        nrmse_percent(truth.y_abs_acc[:, 0], hist.y_abs_acc[:, 0]),
    )


def _nrmse_row(args):
    osc, dn, d1_vals, factor, excitation, dt, duration, truth = args
    out = []
    for d1 in d1_vals:
        d2 = factor * d1
        if 1.0 + d1 <= 0.0 or 1.0 + d2 <= 0.0:
            out.append((None, deviation.VIOLATION_GAMMA_BOUNDS))
            continue
        pert = deviation.ParamPerturbation(delta_n=float(dn), delta_1=float(d1), delta_2=float(d2))
        violations = deviation.feasibility_violations(osc.bw, pert)
        if violations:
            out.append((None, "; ".join(violations)))
            continue
        out.append((_nrmse_cell(osc, pert, excitation, dt, duration, truth), ""))
    return out


def nrmse_sweep(
    osc: OscillatorParams,
    grid: deviation.GridSpec,
    excitation,
    dt: float = 1e-3,
    duration=None,
    jobs: int = 1,
) -> NrmseSweep:
    """Simulate every feasible alternate set on the grid and score it.

    The truth run uses the unperturbed oscillator; each feasible cell is
    re-simulated with its alternate shape set under the same excitation.
    jobs > 1 fans rows out to worker processes; results are ordered by
    cell index either way.
    """
    dn_vals = grid.delta_n_axis.values()
    d1_vals = grid.delta_1_axis.values()
    truth = simulate_sdof(osc, excitation, dt=dt, duration=duration)
    shape = (dn_vals.size, d1_vals.size)
    out = NrmseSweep(
        delta_n=dn_vals,
        delta_1=d1_vals,
        delta_2_factor=grid.delta_2_factor,
        nrmse_f_r=np.full(shape, np.nan),
        nrmse_y=np.full(shape, np.nan),
        nrmse_y_abs=np.full(shape, np.nan),
        feasible=np.zeros(shape, dtype=bool),
        violation=np.full(shape, "", dtype=object),
    )
    tasks = [
        (osc, float(dn), d1_vals, grid.delta_2_factor, excitation, dt, duration, truth)
        for dn in dn_vals
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_nrmse_row, tasks))
    else:
        rows = [_nrmse_row(task) for task in tasks]
    for i, row in enumerate(rows):
        for j, (cell, violation) in enumerate(row):
            if cell is None:
                out.violation[i, j] = violation
                continue
            out.feasible[i, j] = True
            out.nrmse_f_r[i, j], out.nrmse_y[i, j], out.nrmse_y_abs[i, j] = cell
    return out


# ---------------------------------------------------------------------------
# Benchmark fixtures used across tests and scripts


def reference_sdof() -> OscillatorParams:
    """Single-mass benchmark oscillator with a softening element."""
    return OscillatorParams(
        m=1.0, c=0.5, k=100.0, alpha=0.1,
        bw=BoucWenParams(beta=2.0, gamma=1.0, n=2.0, d_y=0.0365),
    )


def benchmark_chain() -> ChainSystem:
    """Four-story shear-building benchmark with per-story yielding elements."""
    d_y = 0.06
    beta = (2.5, 3.0, 4.0, 5.0)
    gamma = (1.0, 1.5, 2.0, 3.0)
    return ChainSystem(
        m=(1.0, 1.0, 1.0, 1.0),
        k=(240.0, 200.0, 160.0, 90.0),
        c=(1.5, 1.5, 1.5, 1.5),
        bw=tuple(
            BoucWenParams(beta=b, gamma=g, n=2.0, d_y=d_y) for b, g in zip(beta, gamma)
        ),
        alpha=0.1,
    )
