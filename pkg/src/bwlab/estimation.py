"""Joint state and parameter identification with a constrained UKF.

The chain state is augmented with the per-story stiffnesses, dashpots
and hysteretic shape parameters (constant-in-time random walks).  Two
constraint mechanisms keep the filter inside the admissible class: sigma
points are projected onto the feasible set before propagation, and the
posterior Gaussian is moment-matched against each violated inequality
(one-sided truncation along the constraint normal).

Measurements are noisy absolute floor accelerations, which the model
produces without reference to the base excitation; the excitation enters
the propagation only, and can itself carry measurement noise.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from types import SimpleNamespace

import numpy as np
from scipy.special import erfcx

from .errors import DomainError, NumericalError
from .groundmotion import GroundMotion, SpectrumParams, SynthesisConfig, synthesize
from .hysteresis import BoucWenParams, hysteretic_energy
from .simulate import ChainSystem, _abs_acc, _rk4_step, nrmse_percent, simulate_chain

PARAM_BLOCKS = ("k", "c", "beta", "gamma", "n")


def state_layout(n_stories: int) -> dict:
    """Slices of the augmented vector: y, v, r states then parameter blocks."""
    n = n_stories
    layout = {"y": slice(0, n), "v": slice(n, 2 * n), "r": slice(2 * n, 3 * n)}
    for i, name in enumerate(PARAM_BLOCKS):
        layout[name] = slice((3 + i) * n, (4 + i) * n)
    layout["theta"] = slice(3 * n, 8 * n)
    return layout


def theta_names(n_stories: int) -> list:
    return [f"{blk}{j + 1}" for blk in PARAM_BLOCKS for j in range(n_stories)]


def theta_of(system: ChainSystem) -> np.ndarray:
    """Stacked parameter vector (K, c, beta, gamma, n) of a chain."""
    return np.concatenate(
        [
            np.asarray(system.k, dtype=float),
            np.asarray(system.c, dtype=float),
            np.array([b.beta for b in system.bw]),
            np.array([b.gamma for b in system.bw]),
            np.array([b.n for b in system.bw]),
        ]
    )


@dataclass(frozen=True)
class FilterConfig:
    """Tuning of the constrained filter and of the synthetic measurements.

    Sigma-point scaling follows the scaled unscented transform; all three
    factors are exposed rather than hard-coded.  Parameter initialization
    scales the true values (the estimator must not start at the answer),
    with the initial spread given as a relative standard deviation.
    """

    alpha_sp: float = 1e-3
    kappa_sp: float = 0.0
    beta_sp: float = 2.0
    param_init_scale: float = 1.5
    param_init_rel_sd: float = 0.5
    state_init_var: float = 1e-6
    process_noise_state: float = 1e-8
    process_noise_param: float = 1e-10
    noise_rms_fraction: float = 0.10
    corrupt_input: bool = True
    input_noise_process: bool = True
    smooth_for_damage: bool = True
    substeps: int = 1
    divergence_nrmse: float = 50.0
    damage_y_ult_factor: float = 6.0
    damage_delta_e: float = 0.1

    def __post_init__(self):
        if not self.alpha_sp > 0:
            raise DomainError("alpha_sp must be positive")
        if not self.substeps >= 1:
            raise DomainError("substeps must be >= 1")
        if not 0 <= self.noise_rms_fraction:
            raise DomainError("noise_rms_fraction must be non-negative")


@dataclass(frozen=True)
class ConstraintSet:
    """Linear inequalities a @ x >= b kept by projection and truncation."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.shape[0] != b.size:
            raise DomainError("one bound per constraint row required")
        if np.any(np.all(a == 0.0, axis=1)):
            raise DomainError("constraint rows must be non-zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return self.b.size

    @classmethod
    def chain_inequalities(cls, n_stories: int) -> "ConstraintSet":
        """Admissibility of the estimated parameters, story by story.

        Stiffness and damping stay non-negative, the shape pair keeps
        beta +- gamma non-negative, and the exponent stays at or above
        one.  The normals are mutually orthogonal, so one sequential
        projection pass lands exactly on the feasible set.
        """
        layout = state_layout(n_stories)
        dim = 8 * n_stories
        rows = []
        bounds = []
        for j in range(n_stories):
            for block, bound in (("k", 0.0), ("c", 0.0), ("n", 1.0)):
                row = np.zeros(dim)
                row[layout[block].start + j] = 1.0
                rows.append(row)
                bounds.append(bound)
            for sign in (1.0, -1.0):
                row = np.zeros(dim)
                row[layout["beta"].start + j] = 1.0
                row[layout["gamma"].start + j] = sign
                rows.append(row)
                bounds.append(0.0)
        return cls(a=np.array(rows), b=np.array(bounds))

    def margins(self, x) -> np.ndarray:
        """a @ x - b for one vector or a batch of rows."""
        return np.asarray(x, dtype=float) @ self.a.T - self.b

    def satisfied(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(self.margins(x) >= -tol))

    def project(self, x) -> np.ndarray:
        """Euclidean projection onto every half-space, one pass per row."""
        out = np.array(x, dtype=float)
        batched = out.ndim == 2
        for i in range(self.size):
            a = self.a[i]
            norm_sq = float(a @ a)
            deficit = self.b[i] - out @ a
            if batched:
                mask = deficit > 0.0
                if np.any(mask):
                    out[mask] += np.outer(deficit[mask] / norm_sq, a)
            elif deficit > 0.0:
                out += (deficit / norm_sq) * a
        return out


def sigma_points(mean, cov, alpha_sp, kappa_sp, beta_sp):
    """Scaled sigma set and its mean/covariance weights."""
    mean = np.asarray(mean, dtype=float)
    dim = mean.size
    lam = alpha_sp**2 * (dim + kappa_sp) - dim
    scale = dim + lam
    root = _cholesky_psd(scale * np.asarray(cov, dtype=float))
    points = np.empty((2 * dim + 1, dim))
    points[0] = mean
    points[1 : dim + 1] = mean + root.T
    points[dim + 1 :] = mean - root.T
    wm = np.full(2 * dim + 1, 0.5 / scale)
    wc = wm.copy()
    wm[0] = lam / scale
    wc[0] = lam / scale + 1.0 - alpha_sp**2 + beta_sp
    return points, wm, wc


def _cholesky_psd(mat) -> np.ndarray:
    """Lower Cholesky factor with an escalating diagonal jitter fallback."""
    mat = 0.5 * (mat + mat.T)
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        pass
    base = float(np.mean(np.abs(np.diag(mat)))) or 1.0
    for exponent in (-12, -9, -6):
        jitter = base * 10.0**exponent
        try:
            return np.linalg.cholesky(mat + jitter * np.eye(mat.shape[0]))
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("covariance lost positive definiteness beyond jitter repair")


def _truncate_one(mean, cov, a, bound):
    """Moment-matched conditioning of N(mean, cov) on a @ x >= bound."""
    var_c = float(a @ cov @ a)
    if var_c <= 0.0:
        return mean, cov
    sd = math.sqrt(var_c)
    mu_c = float(a @ mean)
    z = (bound - mu_c) / sd
    lam = math.sqrt(2.0 / math.pi) / float(erfcx(z / math.sqrt(2.0)))
    mean_t = mu_c + sd * lam
    var_t = var_c * (1.0 + z * lam - lam * lam)
    gain = cov @ a / var_c
    mean = mean + gain * (mean_t - mu_c)
    cov = cov + np.outer(gain, gain) * (var_t - var_c)
    return mean, 0.5 * (cov + cov.T)


def truncate_to_constraints(mean, cov, constraints: ConstraintSet, max_passes: int = 3):
    """Sequential one-sided truncation against every violated inequality.

    Later truncations can nudge earlier directions back out, so a few
    passes are run; the mean is finally projected so the posterior
    satisfies every inequality exactly.
    """
    mean = np.array(mean, dtype=float)
    cov = np.array(cov, dtype=float)
    for _ in range(max_passes):
        margins = constraints.margins(mean)
        violated = np.flatnonzero(margins < 0.0)
        if violated.size == 0:
            break
        for i in violated:
            mean, cov = _truncate_one(mean, cov, constraints.a[i], constraints.b[i])
    if not constraints.satisfied(mean):
        mean = constraints.project(mean)
    return mean, cov


def add_measurement_noise(signal, rms_fraction: float, rng):
    """Additive white Gaussian noise scaled to the per-channel RMS.

    Returns the noisy signal and the per-channel standard deviations.
    A zero fraction returns the signal unchanged without consuming rng.
    """
    signal = np.asarray(signal, dtype=float)
    if not rms_fraction >= 0:
        raise DomainError("rms_fraction must be non-negative")
    sigma = rms_fraction * np.sqrt(np.mean(signal**2, axis=0))
    if rms_fraction == 0.0:
        return signal.copy(), sigma
    return signal + rng.standard_normal(signal.shape) * sigma, sigma


def unscented_transform(points, wm, wc, noise_cov=None):
    """Weighted mean and covariance of transformed sigma points."""
    mean = wm @ points
    dev = points - mean
    cov = dev.T @ (dev * wc[:, None])
    if noise_cov is not None:
        cov = cov + noise_cov
    return mean, 0.5 * (cov + cov.T), dev


def tukf_step(
    mean, cov, measurement, f, h, q_cov, r_cov, constraints, cfg: FilterConfig,
    smoother_slot: dict = None,
):
    """One predict/update cycle of the constrained unscented filter.

    f maps a sigma batch one time step forward, h maps it to measurement
    space.  Sigma points are projected onto the constraints before
    propagation; the posterior is truncated against violated constraints.
    A smoother_slot dict, when given, receives the predicted moments and
    the prior-to-predicted cross covariance for a later backward pass.
    """
    sp = (cfg.alpha_sp, cfg.kappa_sp, cfg.beta_sp)
    points, wm, wc = sigma_points(mean, cov, *sp)
    if constraints is not None:
        points = constraints.project(points)
    prop = f(points)
    mean_p, cov_p, dev_prop = unscented_transform(prop, wm, wc, q_cov)
    if smoother_slot is not None:
        dev_prior = points - wm @ points
        smoother_slot["mean_pred"] = mean_p
        smoother_slot["cov_pred"] = cov_p
        smoother_slot["cross"] = dev_prior.T @ (dev_prop * wc[:, None])

    points2, wm2, wc2 = sigma_points(mean_p, cov_p, *sp)
    z_points = h(points2)
    z_mean, z_cov, z_dev = unscented_transform(z_points, wm2, wc2, r_cov)
    x_dev = points2 - mean_p
    cross = x_dev.T @ (z_dev * wc2[:, None])
    gain = np.linalg.solve(z_cov, cross.T).T
    mean_post = mean_p + gain @ (np.asarray(measurement, dtype=float) - z_mean)
    cov_post = cov_p - gain @ z_cov @ gain.T
    cov_post = 0.5 * (cov_post + cov_post.T)
    if constraints is not None:
        mean_post, cov_post = truncate_to_constraints(mean_post, cov_post, constraints)
    return mean_post, cov_post


class _FilterModel:
    """Chain propagation and measurement maps over a sigma batch.

    Each sigma row carries its own parameter estimates; the masses, the
    elastic share and the yield deformations are treated as known.
    """

    def __init__(self, system: ChainSystem, dt: float, substeps: int):
        self.n = system.n_stories
        self.m = np.asarray(system.m, dtype=float)
        self.d = np.array([b.d_y for b in system.bw])
        self.alpha = float(system.alpha)
        self.dt = float(dt)
        self.substeps = int(substeps)
        self.layout = state_layout(self.n)

    def _coeffs(self, points):
        lay = self.layout
        return SimpleNamespace(
            m=self.m,
            k=points[:, lay["k"]],
            c=points[:, lay["c"]],
            beta=points[:, lay["beta"]],
            gamma=points[:, lay["gamma"]],
            n=points[:, lay["n"]],
            d=self.d,
            alpha=self.alpha,
        )

    def propagate(self, points, u0, u1):
        """One measurement interval of RK4 substeps; parameters ride along."""
        lay = self.layout
        out = np.array(points, dtype=float)
        y = out[:, lay["y"]]
        v = out[:, lay["v"]]
        r = out[:, lay["r"]]
        cf = self._coeffs(out)
        h = self.dt / self.substeps
        for i in range(self.substeps):
            f0 = i / self.substeps
            f1 = (i + 1) / self.substeps
            ua = u0 + (u1 - u0) * f0
            ub = u0 + (u1 - u0) * f1
            y, v, r = _rk4_step(y, v, r, ua, 0.5 * (ua + ub), ub, h, cf)
        out[:, lay["y"]] = y
        out[:, lay["v"]] = v
        out[:, lay["r"]] = r
        return out

    def measure(self, points):
        """Absolute accelerations implied by each sigma row's own parameters."""
        lay = self.layout
        return _abs_acc(
            points[:, lay["y"]], points[:, lay["v"]], points[:, lay["r"]], self._coeffs(points)
        )


@dataclass
class EstimationRun:
    """Outcome of one identification run."""

    t: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    cov_diag: np.ndarray = field(repr=False)
    theta_hat: np.ndarray
    theta_true: np.ndarray
    state_nrmse: dict
    di_est: np.ndarray
    di_true: np.ndarray
    diverged: bool
    meta: dict = field(default_factory=dict)
    mean_smooth: np.ndarray = field(default=None, repr=False)

    @property
    def normalized_theta(self) -> np.ndarray:
        return self.theta_hat / self.theta_true

    @property
    def max_state_nrmse(self) -> float:
        return float(max(np.max(v) for v in self.state_nrmse.values()))


def joint_estimate(
    system: ChainSystem,
    motion: GroundMotion,
    cfg: FilterConfig = FilterConfig(),
    seed: int = 0,
    sim_dt: float = 1e-3,
) -> EstimationRun:
    """Identify states and parameters of the chain from noisy accelerations.

    The truth run is integrated at sim_dt, measured at the record rate,
    and corrupted with synthetic noise (measurement channels always, the
    input channel when configured).  The filter starts from scaled-away
    parameter values and a resting state.
    """
    n = system.n_stories
    lay = state_layout(n)
    dim = 8 * n
    stride = int(round(motion.dt / sim_dt))
    if stride < 1 or abs(stride * sim_dt - motion.dt) > 1e-12:
        raise DomainError("the record rate must be an integer multiple of sim_dt")

    truth = simulate_chain(system, motion, dt=sim_dt)
    t_meas = truth.t[::stride]
    z_clean = truth.y_abs_acc[::stride]
    n_steps = t_meas.size - 1

    rng_z = np.random.default_rng([seed, 1])
    rng_u = np.random.default_rng([seed, 2])
    z_noisy, sigma_z = add_measurement_noise(z_clean, cfg.noise_rms_fraction, rng_z)
    if cfg.corrupt_input:
        u_used, sigma_u = add_measurement_noise(motion.accel, cfg.noise_rms_fraction, rng_u)
    else:
        u_used, sigma_u = motion.accel.copy(), 0.0

    theta_true = theta_of(system)
    theta_init = cfg.param_init_scale * theta_true
    mean = np.zeros(dim)
    mean[lay["theta"]] = theta_init
    cov = np.zeros((dim, dim))
    idx = np.arange(dim)
    cov[idx[: 3 * n], idx[: 3 * n]] = cfg.state_init_var
    cov[idx[3 * n :], idx[3 * n :]] = (cfg.param_init_rel_sd * theta_init) ** 2

    q_cov = np.zeros((dim, dim))
    q_cov[idx[: 3 * n], idx[: 3 * n]] = cfg.process_noise_state
    q_cov[idx[3 * n :], idx[3 * n :]] = cfg.process_noise_param
    if cfg.input_noise_process and sigma_u > 0.0:
        # The corrupted record forces every story alike, so the induced
        # per-step uncertainty is a common-mode rank-one term on y and v;
        # interstory quantities feel it only through the dynamics.
        b_u = np.zeros(dim)
        b_u[lay["y"]] = 0.5 * motion.dt**2
        b_u[lay["v"]] = motion.dt
        q_cov += float(np.atleast_1d(sigma_u)[0]) ** 2 * np.outer(b_u, b_u)
    r_cov = np.diag(np.atleast_1d(sigma_z) ** 2)

    model = _FilterModel(system, dt=motion.dt, substeps=cfg.substeps)
    constraints = ConstraintSet.chain_inequalities(n)

    means = np.empty((n_steps + 1, dim))
    cov_diag = np.empty((n_steps + 1, dim))
    means[0] = mean
    cov_diag[0] = np.diag(cov)
    preds = np.empty((n_steps + 1, dim)) if cfg.smooth_for_damage else None
    pred_covs = np.empty((n_steps + 1, dim, dim)) if cfg.smooth_for_damage else None
    crosses = np.empty((n_steps + 1, dim, dim)) if cfg.smooth_for_damage else None
    for k in range(1, n_steps + 1):
        u0, u1 = u_used[k - 1], u_used[k]
        slot = {} if cfg.smooth_for_damage else None
        mean, cov = tukf_step(
            mean, cov, z_noisy[k],
            lambda pts: model.propagate(pts, u0, u1),
            model.measure,
            q_cov, r_cov, constraints, cfg,
            smoother_slot=slot,
        )
        if not np.all(np.isfinite(mean)):
            raise NumericalError("filter mean lost finiteness", t=float(t_meas[k]))
        means[k] = mean
        cov_diag[k] = np.diag(cov)
        if cfg.smooth_for_damage:
            preds[k] = slot["mean_pred"]
            pred_covs[k] = slot["cov_pred"]
            crosses[k] = slot["cross"]

    mean_smooth = None
    if cfg.smooth_for_damage:
        mean_smooth = _rts_backward(means, preds, pred_covs, crosses)

    theta_hat = mean[lay["theta"]].copy()
    truth_grid = {"y": truth.y[::stride], "v": truth.y_dot[::stride], "r": truth.r[::stride]}
    filt_grid = {key: means[:, lay[key]] for key in ("y", "v", "r")}
    state_nrmse = {
        key: np.array(
            [nrmse_percent(truth_grid[key][:, j], filt_grid[key][:, j]) for j in range(n)]
        )
        for key in ("y", "v", "r")
    }
    diverged = bool(max(np.max(v) for v in state_nrmse.values()) > cfg.divergence_nrmse)

    di_true = _damage_indices(
        truth.t, truth.y, truth.y_dot, truth.r,
        np.asarray(system.k, dtype=float), model.d, system.alpha, cfg,
    )
    k_hat = theta_hat[:n]
    di_source = mean_smooth if mean_smooth is not None else means
    di_est = _damage_indices(
        t_meas, di_source[:, lay["y"]], di_source[:, lay["v"]], di_source[:, lay["r"]],
        k_hat, model.d, system.alpha, cfg,
    )

    return EstimationRun(
        t=t_meas,
        mean=means,
        cov_diag=cov_diag,
        theta_hat=theta_hat,
        theta_true=theta_true,
        state_nrmse=state_nrmse,
        di_est=di_est,
        di_true=di_true,
        diverged=diverged,
        meta={
            "seed": seed,
            "sigma_z": np.atleast_1d(sigma_z).tolist(),
            "sigma_u": float(np.atleast_1d(sigma_u)[0]) if cfg.corrupt_input else 0.0,
            "motion": dict(motion.meta),
            "n_steps": n_steps,
        },
        mean_smooth=mean_smooth,
    )


def _rts_backward(means, preds, pred_covs, crosses) -> np.ndarray:
    """Backward mean recursion over a stored unscented forward pass.

    Entry k of preds/pred_covs/crosses describes the transition into
    step k, so the gain at step k uses the k+1 entries.
    """
    out = np.array(means, dtype=float)
    for k in range(means.shape[0] - 2, -1, -1):
        gain = np.linalg.solve(pred_covs[k + 1].T, crosses[k + 1].T).T
        out[k] = means[k] + gain @ (out[k + 1] - preds[k + 1])
    return out


def _damage_indices(t, y, v, r, k_vec, d_vec, alpha, cfg: FilterConfig) -> np.ndarray:
    """Per-story damage indices from (possibly filtered) trajectories.

    The energy term is the work of the hysteretic restoring force, so
    the reference series from hysteretic_energy is scaled by the
    post-yield stiffness share (1 - alpha).
    """
    from .simulate import _story_diff

    drift = _story_diff(np.asarray(y, dtype=float))
    drift_rate = _story_diff(np.asarray(v, dtype=float))
    out = np.empty(drift.shape[1])
    for j in range(drift.shape[1]):
        e_ref = hysteretic_energy(t, np.asarray(r)[:, j], drift_rate[:, j], d_vec[j], k_vec[j])[-1]
        e_tot = (1.0 - alpha) * e_ref
        y_ult = cfg.damage_y_ult_factor * d_vec[j]
        f_y = k_vec[j] * d_vec[j]
        out[j] = np.max(np.abs(drift[:, j])) / y_ult + cfg.damage_delta_e * e_tot / (f_y * y_ult)
    return out


# ---------------------------------------------------------------------------
# Monte-Carlo campaigns


@dataclass
class RunRecord:
    """Compact per-run summary kept in a campaign."""

    seed: int
    theta_hat: np.ndarray
    theta_true: np.ndarray
    state_nrmse: dict
    di_est: np.ndarray
    di_true: np.ndarray
    diverged: bool
    fr_nrmse: np.ndarray
    motion_pga: float

    @property
    def normalized_theta(self) -> np.ndarray:
        return self.theta_hat / self.theta_true

    @property
    def max_state_nrmse(self) -> float:
        return float(max(np.max(v) for v in self.state_nrmse.values()))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "theta_hat": self.theta_hat.tolist(),
            "theta_true": self.theta_true.tolist(),
            "normalized_theta": self.normalized_theta.tolist(),
            "state_nrmse": {k: v.tolist() for k, v in self.state_nrmse.items()},
            "di_est": self.di_est.tolist(),
            "di_true": self.di_true.tolist(),
            "diverged": self.diverged,
            "fr_nrmse": None if self.fr_nrmse is None else self.fr_nrmse.tolist(),
            "motion_pga": self.motion_pga,
        }


@dataclass
class Campaign:
    """Monte-Carlo identification campaign over independent motions."""

    records: list
    base_seed: int
    n_stories: int

    @property
    def n_runs(self) -> int:
        return len(self.records)

    @property
    def diverged(self) -> np.ndarray:
        return np.array([rec.diverged for rec in self.records])

    def normalized_params(self) -> np.ndarray:
        return np.vstack([rec.normalized_theta for rec in self.records])

    def state_nrmse_matrix(self) -> np.ndarray:
        """Rows are runs; columns are y, v, r blocks story by story."""
        return np.vstack(
            [
                np.concatenate([rec.state_nrmse[k] for k in ("y", "v", "r")])
                for rec in self.records
            ]
        )

    def di_ratio(self) -> np.ndarray:
        return np.vstack([rec.di_est / rec.di_true for rec in self.records])

    def fr_nrmse_matrix(self) -> np.ndarray:
        rows = []
        for rec in self.records:
            if rec.fr_nrmse is None:
                rows.append(np.full(self.n_stories, np.nan))
            else:
                rows.append(rec.fr_nrmse)
        return np.vstack(rows)

    def to_dict(self) -> dict:
        return {
            "base_seed": self.base_seed,
            "n_runs": self.n_runs,
            "n_stories": self.n_stories,
            "theta_names": theta_names(self.n_stories),
            "runs": [rec.to_dict() for rec in self.records],
        }


def forward_check(system: ChainSystem, theta_hat, motion: GroundMotion, sim_dt: float = 1e-3):
    """Force-history error of the estimated shape set under the same motion.

    The estimated (beta, gamma, n) blocks replace the true ones story by
    story while stiffness, damping and yield deformations stay at truth;
    the per-story normalized errors of the hysteretic force histories
    come back.  Returns None when the block is outside the admissible
    class (exponent at the constraint boundary, say).
    """
    n = system.n_stories
    lay = state_layout(n)
    theta_hat = np.asarray(theta_hat, dtype=float)
    off = 3 * n
    beta = theta_hat[lay["beta"].start - off : lay["beta"].stop - off]
    gamma = theta_hat[lay["gamma"].start - off : lay["gamma"].stop - off]
    n_exp = theta_hat[lay["n"].start - off : lay["n"].stop - off]
    try:
        bw = tuple(
            BoucWenParams(beta=float(beta[j]), gamma=float(gamma[j]), n=float(n_exp[j]),
                          d_y=system.bw[j].d_y)
            for j in range(n)
        )
    except DomainError:
        return None
    alt = ChainSystem(m=system.m, k=system.k, c=system.c, bw=bw, alpha=system.alpha)
    truth = simulate_chain(system, motion, dt=sim_dt)
    est = simulate_chain(alt, motion, dt=sim_dt)
    return np.array(
        [nrmse_percent(truth.f_r[:, j], est.f_r[:, j]) for j in range(n)]
    )


def _mc_worker(args):
    system, spectrum, synth_cfg, fcfg, run_seed, post_check, sim_dt = args
    motion = synthesize(spectrum, replace(synth_cfg, seed=run_seed))
    run = joint_estimate(system, motion, cfg=fcfg, seed=run_seed, sim_dt=sim_dt)
    fr = forward_check(system, run.theta_hat, motion, sim_dt=sim_dt) if post_check else None
    return RunRecord(
        seed=run_seed,
        theta_hat=run.theta_hat,
        theta_true=run.theta_true,
        state_nrmse=run.state_nrmse,
        di_est=run.di_est,
        di_true=run.di_true,
        diverged=run.diverged,
        fr_nrmse=fr,
        motion_pga=motion.pga,
    )


def monte_carlo(
    system: ChainSystem,
    spectrum: SpectrumParams,
    synth_cfg: SynthesisConfig,
    fcfg: FilterConfig = FilterConfig(),
    n_runs: int = 20,
    base_seed: int = 0,
    jobs: int = 1,
    post_check: bool = True,
    sim_dt: float = 1e-3,
) -> Campaign:
    """Independent identification runs on freshly drawn motions.

    Run k draws its motion and its noise from base_seed + k, so any run
    can be reproduced in isolation.  jobs > 1 distributes runs over
    processes; record order follows the run index either way.
    """
    if n_runs < 1:
        raise DomainError(f"n_runs must be >= 1, got {n_runs}")
    tasks = [
        (system, spectrum, synth_cfg, fcfg, base_seed + k, post_check, sim_dt)
        for k in range(n_runs)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_mc_worker, tasks))
    else:
        records = [_mc_worker(task) for task in tasks]
    return Campaign(records=records, base_seed=base_seed, n_stories=system.n_stories)
