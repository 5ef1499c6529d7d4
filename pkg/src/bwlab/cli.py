"""Command-line front door.

Subcommands cover single response runs, perturbation-plane sweeps,
synthetic motion generation, displacement-ratio spectra, one-shot
identification and Monte-Carlo identification campaigns.  Options live
in a JSON config file; a handful of flags override file values.  All
artifacts are written atomically and embed the configuration and seed
that produced them.

Exit codes: 0 on success, 2 for configuration or input errors, 3 for
numerical failures.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import fields

import numpy as np

from . import deviation, estimation, fileio, groundmotion, simulate
from .errors import ConfigError, DomainError, FeasibilityError, NumericalError, ParseError
from .hysteresis import BoucWenParams, OscillatorParams

_MISSING = object()


class ConfigView:
    """Dict wrapper that tracks consumed keys and rejects unknown ones."""

    def __init__(self, data, path="config"):
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must be a JSON object")
        self._data = data
        self._path = path
        self._used = set()

    def take(self, key, default=_MISSING, required=False):
        if key in self._data:
            self._used.add(key)
            return self._data[key]
        if required:
            raise ConfigError(f"{self._path}.{key} is required")
        return None if default is _MISSING else default

    def child(self, key, required=False):
        raw = self.take(key, required=required)
        if raw is None:
            return None
        return ConfigView(raw, path=f"{self._path}.{key}")

    def finish(self):
        unknown = sorted(set(self._data) - self._used)
        if unknown:
            raise ConfigError(f"unknown keys in {self._path}: {', '.join(unknown)}")


def _as_float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number, got {value!r}")
    return float(value)


def _as_int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path} must be an integer, got {value!r}")
    return int(value)


def _float_list(value, path):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path} must be a non-empty list of numbers")
    return [_as_float(v, f"{path}[{i}]") for i, v in enumerate(value)]


# ---------------------------------------------------------------------------
# Config builders


def _bw_from(view: ConfigView, d_y_default=None) -> BoucWenParams:
    d_y = view.take("d_y", default=d_y_default)
    if d_y is None:
        raise ConfigError(f"{view._path}.d_y is required")
    bw = BoucWenParams(
        beta=_as_float(view.take("beta", required=True), f"{view._path}.beta"),
        gamma=_as_float(view.take("gamma", required=True), f"{view._path}.gamma"),
        n=_as_float(view.take("n", required=True), f"{view._path}.n"),
        d_y=_as_float(d_y, f"{view._path}.d_y"),
    )
    view.finish()
    return bw


def _system_from(view: ConfigView) -> simulate.ChainSystem:
    kind = view.take("kind", default="sdof")
    preset = view.take("preset")
    if preset is not None:
        view.finish()
        if preset == "reference_sdof":
            return simulate.ChainSystem.from_oscillator(simulate.reference_sdof())
        if preset == "benchmark_chain":
            return simulate.benchmark_chain()
        raise ConfigError(f"unknown system preset {preset!r}")
    if kind == "sdof":
        osc = OscillatorParams(
            m=_as_float(view.take("m", required=True), "system.m"),
            c=_as_float(view.take("c", required=True), "system.c"),
            k=_as_float(view.take("k", required=True), "system.k"),
            alpha=_as_float(view.take("alpha", required=True), "system.alpha"),
            bw=_bw_from(view.child("bw", required=True)),
        )
        view.finish()
        return simulate.ChainSystem.from_oscillator(osc)
    if kind == "chain":
        m = _float_list(view.take("m", required=True), "system.m")
        k = _float_list(view.take("k", required=True), "system.k")
        c = _float_list(view.take("c", required=True), "system.c")
        beta = _float_list(view.take("beta", required=True), "system.beta")
        gamma = _float_list(view.take("gamma", required=True), "system.gamma")
        n = _float_list(view.take("n", required=True), "system.n")
        d_y = _float_list(view.take("d_y", required=True), "system.d_y")
        alpha = _as_float(view.take("alpha", required=True), "system.alpha")
        view.finish()
        sizes = {len(m), len(k), len(c), len(beta), len(gamma), len(n), len(d_y)}
        if len(sizes) != 1:
            raise ConfigError("chain parameter lists must share one length")
        bw = tuple(
            BoucWenParams(beta=beta[j], gamma=gamma[j], n=n[j], d_y=d_y[j])
            for j in range(len(m))
        )
        return simulate.ChainSystem(m=m, k=k, c=c, bw=bw, alpha=alpha)
    raise ConfigError(f"system.kind must be 'sdof' or 'chain', got {kind!r}")


class _SineExcitation:
    """Callable sine drive; a plain class so parallel sweeps can pickle it."""

    def __init__(self, amplitude: float, omega: float):
        self.amplitude = amplitude
        self.omega = omega

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float))


def _excitation_from(view: ConfigView, units: str):
    """Returns (excitation, duration_hint, descriptor)."""
    kind = view.take("kind", required=True)
    if kind == "file":
        path = view.take("path", required=True)
        file_units = view.take("units", default=units)
        view.finish()
        motion = groundmotion.load_accelerogram(path, units=file_units)
        return motion, None, {"kind": "file", "path": str(path), "units": file_units}
    if kind == "sine":
        amp = _as_float(view.take("amplitude", required=True), "excitation.amplitude")
        omega = _as_float(view.take("omega", required=True), "excitation.omega")
        duration = _as_float(view.take("duration", required=True), "excitation.duration")
        view.finish()
        return (
            _SineExcitation(amp, omega),
            duration,
            {"kind": "sine", "amplitude": amp, "omega": omega, "duration": duration},
        )
    raise ConfigError(f"excitation.kind must be 'file' or 'sine', got {kind!r}")


def _axis_from(view: ConfigView) -> deviation.AxisSpec:
    axis = deviation.AxisSpec(
        lo=_as_float(view.take("lo", required=True), f"{view._path}.lo"),
        hi=_as_float(view.take("hi", required=True), f"{view._path}.hi"),
        num=_as_int(view.take("num", required=True), f"{view._path}.num"),
        closed=bool(view.take("closed", default=False)),
    )
    view.finish()
    return axis


def _spectrum_from(view: ConfigView) -> groundmotion.SpectrumParams:
    preset = view.take("preset")
    if preset is not None:
        f_s = view.take("f_s", default=100.0)
        view.finish()
        if preset != "medium_soil":
            raise ConfigError(f"unknown spectrum preset {preset!r}")
        return groundmotion.SpectrumParams.medium_soil(f_s=_as_float(f_s, "spectrum.f_s"))
    params = groundmotion.SpectrumParams(
        s0=_as_float(view.take("s0", required=True), "spectrum.s0"),
        omega_g=_as_float(view.take("omega_g", default=10.0), "spectrum.omega_g"),
        zeta_g=_as_float(view.take("zeta_g", default=0.4), "spectrum.zeta_g"),
        omega_f=_as_float(view.take("omega_f", default=1.0), "spectrum.omega_f"),
        zeta_f=_as_float(view.take("zeta_f", default=0.6), "spectrum.zeta_f"),
        b=_as_float(view.take("b", default=0.2), "spectrum.b"),
    )
    view.finish()
    return params


def _synthesis_from(view: ConfigView, seed: int) -> groundmotion.SynthesisConfig:
    if view is None:
        return groundmotion.SynthesisConfig(seed=seed)
    cap_g = view.take("pga_cap_g", default=0.4)
    cfg = groundmotion.SynthesisConfig(
        f_s=_as_float(view.take("f_s", default=100.0), "synthesis.f_s"),
        duration=_as_float(view.take("duration", default=30.0), "synthesis.duration"),
        omega_cut=_as_float(view.take("omega_cut", default=40.0 * math.pi), "synthesis.omega_cut"),
        n_freq=_as_int(view.take("n_freq", default=2000), "synthesis.n_freq"),
        seed=seed,
        pga_cap=None if cap_g is None else _as_float(cap_g, "synthesis.pga_cap_g") * groundmotion.STANDARD_GRAVITY,
        max_retries=_as_int(view.take("max_retries", default=100), "synthesis.max_retries"),
    )
    view.finish()
    return cfg


def _filter_from(view: ConfigView) -> estimation.FilterConfig:
    if view is None:
        return estimation.FilterConfig()
    allowed = {f.name for f in fields(estimation.FilterConfig)}
    kwargs = {}
    for name in allowed:
        value = view.take(name)
        if value is not None:
            kwargs[name] = value
    view.finish()
    return estimation.FilterConfig(**kwargs)


# ---------------------------------------------------------------------------
# Shared plumbing


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    with open(args.config) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def _resolve_seed(args, view: ConfigView) -> int:
    seed = view.take("seed", default=0)
    if args.seed is not None:
        seed = args.seed
    return _as_int(seed, "seed")


def _out_path(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _provenance(args, seed) -> dict:
    return {
        "config_file": args.config,
        "config": _load_config(args),
        "cli_overrides": {
            k: v
            for k, v in (
                ("seed", args.seed),
                ("jobs", args.jobs),
                ("units", args.units),
                ("out_dir", args.out_dir),
            )
            if v is not None
        },
        "seed": seed,
    }


def _units(args) -> str:
    return args.units or "si"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    system = _system_from(view.child("system", required=True))
    excitation, dur_hint, exc_desc = _excitation_from(
        view.child("excitation", required=True), _units(args)
    )
    dt = _as_float(view.take("dt", default=1e-3), "dt")
    duration = view.take("duration")
    duration = dur_hint if duration is None else _as_float(duration, "duration")
    damage_view = view.child("damage")
    view.finish()

    hist = simulate.simulate_chain(system, excitation, dt=dt, duration=duration)
    n = hist.n_elements
    header = ["t", "excitation"]
    for name in ("y", "y_dot", "y_abs_acc", "r", "f_r", "e_h"):
        header += [f"{name}_{j + 1}" for j in range(n)]
    rows = (
        [hist.t[i], hist.excitation[i]]
        + [hist.y[i, j] for j in range(n)]
        + [hist.y_dot[i, j] for j in range(n)]
        + [hist.y_abs_acc[i, j] for j in range(n)]
        + [hist.r[i, j] for j in range(n)]
        + [hist.f_r[i, j] for j in range(n)]
        + [hist.e_h[i, j] for j in range(n)]
        for i in range(hist.t.size)
    )
    fileio.write_csv(_out_path(args, "response.csv"), header, rows)

    summary = {
        "command": "simulate",
        "excitation": exc_desc,
        "dt": dt,
        "duration": float(hist.t[-1]),
        "peak_displacement": np.max(np.abs(hist.y), axis=0).tolist(),
        "peak_drift": hist.peak_drift().tolist(),
        "peak_abs_acceleration": np.max(np.abs(hist.y_abs_acc), axis=0).tolist(),
        "total_energy": hist.total_energy().tolist(),
        "provenance": _provenance(args, seed),
    }
    if damage_view is not None:
        factor = _as_float(damage_view.take("y_ult_factor", default=6.0), "damage.y_ult_factor")
        delta_e = _as_float(damage_view.take("delta_e", default=0.1), "damage.delta_e")
        damage_view.finish()
        cfgs = simulate.DamageConfig.from_chain(system, y_ult_factor=factor, delta_e=delta_e)
        di, states = simulate.park_ang_index(hist, cfgs)
        di = [di] if n == 1 else list(di)
        states = [states] if isinstance(states, str) else list(states)
        summary["damage"] = {
            "index": di, "state": states, "y_ult_factor": factor, "delta_e": delta_e,
        }
    fileio.write_json(_out_path(args, "summary.json"), summary)
    print(f"wrote {_out_path(args, 'response.csv')} and summary.json")
    return 0


_METRIC_HEADER = [
    "delta_n", "delta_1", "delta_2",
    "eps1", "eps_star1", "area1", "eps2", "eps_star2", "area2",
    "feasible", "curve_type1", "curve_type2", "violation",
]


def _metric_rows(grid: deviation.ContourGrid):
    for i, j, dn, d1, d2 in grid.cells():
        if grid.feasible[i, j]:
            yield [
                dn, d1, d2,
                grid.eps_1[i, j], grid.eps_star_1[i, j], grid.area_eps_1[i, j],
                grid.eps_2[i, j], grid.eps_star_2[i, j], grid.area_eps_2[i, j],
                True, grid.curve_type_1[i, j], grid.curve_type_2[i, j], "",
            ]
        else:
            yield [dn, d1, d2, None, None, None, None, None, None, False, "", "",
                   grid.violation[i, j]]


def cmd_sweep(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    base = _bw_from(view.child("base", required=True), d_y_default=1.0)
    grid_view = view.child("grid", required=True)
    spec = deviation.GridSpec(
        delta_n_axis=_axis_from(grid_view.child("delta_n", required=True)),
        delta_1_axis=_axis_from(grid_view.child("delta_1", required=True)),
        delta_2_factor=_as_float(grid_view.take("delta_2_factor", default=1.0),
                                 "grid.delta_2_factor"),
    )
    grid_view.finish()
    motion_view = view.child("motion")
    osc_view = view.child("oscillator")
    dt = _as_float(view.take("dt", default=1e-3), "dt")
    duration = view.take("duration")
    view.finish()

    result = deviation.sweep(base, spec)
    fileio.write_csv(_out_path(args, "metrics.csv"), _METRIC_HEADER, _metric_rows(result))
    written = ["metrics.csv"]

    if motion_view is not None:
        if osc_view is None:
            raise ConfigError("a response sweep needs an 'oscillator' block")
        excitation, dur_hint, exc_desc = _excitation_from(motion_view, _units(args))
        osc = OscillatorParams(
            m=_as_float(osc_view.take("m", required=True), "oscillator.m"),
            c=_as_float(osc_view.take("c", required=True), "oscillator.c"),
            k=_as_float(osc_view.take("k", required=True), "oscillator.k"),
            alpha=_as_float(osc_view.take("alpha", required=True), "oscillator.alpha"),
            bw=base,
        )
        osc_view.finish()
        run_duration = dur_hint if duration is None else _as_float(duration, "duration")
        errors = simulate.nrmse_sweep(
            osc, spec, excitation, dt=dt, duration=run_duration, jobs=args.jobs or 1
        )
        rows = []
        for i, dn in enumerate(errors.delta_n):
            for j, d1 in enumerate(errors.delta_1):
                rows.append([
                    float(dn), float(d1), errors.delta_2_factor * float(d1),
                    errors.nrmse_f_r[i, j] if errors.feasible[i, j] else None,
                    errors.nrmse_y[i, j] if errors.feasible[i, j] else None,
                    errors.nrmse_y_abs[i, j] if errors.feasible[i, j] else None,
                    bool(errors.feasible[i, j]), errors.violation[i, j],
                ])
        fileio.write_csv(
            _out_path(args, "nrmse.csv"),
            ["delta_n", "delta_1", "delta_2", "nrmse_fr", "nrmse_y", "nrmse_yabs",
             "feasible", "violation"],
            rows,
        )
        written.append("nrmse.csv")

    fileio.write_json(
        _out_path(args, "summary.json"),
        {
            "command": "sweep",
            "base": {"beta": base.beta, "gamma": base.gamma, "n": base.n, "d_y": base.d_y},
            "cells": int(result.feasible.size),
            "feasible_cells": int(np.sum(result.feasible)),
            "artifacts": written,
            "provenance": _provenance(args, seed),
        },
    )
    print(f"wrote {', '.join(written)} to {args.out_dir}")
    return 0


def cmd_groundmotion(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    spectrum_view = view.child("spectrum")
    synth_view = view.child("synthesis")
    count = view.take("count", default=1)
    if args.count is not None:
        count = args.count
    count = _as_int(count, "count")
    view.finish()

    synth = _synthesis_from(synth_view, seed)
    spectrum = (
        _spectrum_from(spectrum_view)
        if spectrum_view is not None
        else groundmotion.SpectrumParams.medium_soil(f_s=synth.f_s)
    )
    motions = groundmotion.synthesize_many(spectrum, synth, count)
    names = []
    for i, motion in enumerate(motions):
        name = f"motion_{i:03d}.csv"
        groundmotion.write_accelerogram(_out_path(args, name), motion)
        names.append(name)
    fileio.write_json(
        _out_path(args, "metadata.json"),
        {
            "command": "groundmotion",
            "records": [
                {"file": name, **motion.meta} for name, motion in zip(names, motions)
            ],
            "provenance": _provenance(args, seed),
        },
    )
    print(f"wrote {count} motion(s) and metadata.json to {args.out_dir}")
    return 0


def cmd_cr(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    records = view.take("records", default=[])
    if args.record:
        records = list(records) + list(args.record)
    if not records:
        raise ConfigError("at least one record path is required (config 'records' or --record)")
    units = view.take("units", default=_units(args))
    periods_raw = view.take("periods", required=True)
    if isinstance(periods_raw, dict):
        axis = ConfigView(periods_raw, path="periods")
        periods = np.linspace(
            _as_float(axis.take("lo", required=True), "periods.lo"),
            _as_float(axis.take("hi", required=True), "periods.hi"),
            _as_int(axis.take("num", required=True), "periods.num"),
        )
        axis.finish()
    else:
        periods = np.array(_float_list(periods_raw, "periods"))
    strength = view.take("strength_reduction", default=2.0)
    if args.strength_reduction is not None:
        strength = args.strength_reduction
    strength = _as_float(strength, "strength_reduction")
    zeta = view.take("damping_ratio", default=0.02)
    if args.damping_ratio is not None:
        zeta = args.damping_ratio
    zeta = _as_float(zeta, "damping_ratio")
    alpha = view.take("alpha")
    if args.alpha is not None:
        alpha = args.alpha
    if alpha is None:
        raise ConfigError("cr requires an explicit 'alpha' (no default)")
    alpha = _as_float(alpha, "alpha")
    sets_raw = view.take("sets", required=True)
    dt = _as_float(view.take("dt", default=1e-3), "dt")
    view.finish()
    if not isinstance(sets_raw, list) or not sets_raw:
        raise ConfigError("'sets' must be a non-empty list of shape sets")
    shape_sets = []
    for i, entry in enumerate(sets_raw):
        sv = ConfigView(entry, path=f"sets[{i}]")
        label = sv.take("label", default=f"set{i}")
        beta = _as_float(sv.take("beta", required=True), f"sets[{i}].beta")
        gamma = _as_float(sv.take("gamma", required=True), f"sets[{i}].gamma")
        n = _as_float(sv.take("n", required=True), f"sets[{i}].n")
        sv.finish()
        shape_sets.append((str(label), beta, gamma, n))

    rows = []
    for record_path in records:
        motion = groundmotion.load_accelerogram(record_path, units=units)
        for label, beta, gamma, n in shape_sets:
            ratios = simulate.cr_spectrum(
                motion, periods, strength, zeta, beta, gamma, n, alpha, dt=dt
            )
            for T, ratio in zip(periods, ratios):
                rows.append([os.path.basename(str(record_path)), label, float(T), float(ratio)])
    fileio.write_csv(_out_path(args, "cr.csv"), ["record", "set", "period_s", "c_r"], rows)
    fileio.write_json(
        _out_path(args, "summary.json"),
        {
            "command": "cr",
            "records": [str(r) for r in records],
            "strength_reduction": strength,
            "damping_ratio": zeta,
            "alpha": alpha,
            "sets": [
                {"label": label, "beta": b, "gamma": g, "n": n}
                for label, b, g, n in shape_sets
            ],
            "provenance": _provenance(args, seed),
        },
    )
    print(f"wrote cr.csv ({len(rows)} rows) to {args.out_dir}")
    return 0


def _identification_inputs(args, view: ConfigView, seed: int):
    system = _system_from(view.child("system", required=True))
    motion_view = view.child("motion")
    if motion_view is not None:
        motion, _, _ = _excitation_from(motion_view, _units(args))
        if callable(motion):
            raise ConfigError("identification needs a sampled record, not a sine")
        spectrum = synth = None
    else:
        synth = _synthesis_from(view.child("synthesis"), seed)
        spectrum_view = view.child("spectrum")
        spectrum = (
            _spectrum_from(spectrum_view)
            if spectrum_view is not None
            else groundmotion.SpectrumParams.medium_soil(f_s=synth.f_s)
        )
        motion = None
    fcfg = _filter_from(view.child("filter"))
    sim_dt = _as_float(view.take("sim_dt", default=1e-3), "sim_dt")
    return system, motion, spectrum, synth, fcfg, sim_dt


def cmd_identify(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    system, motion, spectrum, synth, fcfg, sim_dt = _identification_inputs(args, view, seed)
    view.finish()
    if motion is None:
        motion = groundmotion.synthesize(spectrum, synth)
    run = estimation.joint_estimate(system, motion, cfg=fcfg, seed=seed, sim_dt=sim_dt)

    names = estimation.theta_names(system.n_stories)
    lay = estimation.state_layout(system.n_stories)
    state_names = (
        [f"y_{j + 1}" for j in range(system.n_stories)]
        + [f"v_{j + 1}" for j in range(system.n_stories)]
        + [f"r_{j + 1}" for j in range(system.n_stories)]
        + names
    )
    header = ["t"] + [f"mean_{s}" for s in state_names] + [f"var_{s}" for s in state_names]
    rows = (
        [run.t[i]] + list(run.mean[i]) + list(run.cov_diag[i]) for i in range(run.t.size)
    )
    fileio.write_csv(_out_path(args, "filtered_states.csv"), header, rows)
    fileio.write_json(
        _out_path(args, "estimate.json"),
        {
            "command": "identify",
            "theta_names": names,
            "theta_hat": run.theta_hat.tolist(),
            "theta_true": run.theta_true.tolist(),
            "normalized_theta": run.normalized_theta.tolist(),
            "state_nrmse": {k: v.tolist() for k, v in run.state_nrmse.items()},
            "di_est": run.di_est.tolist(),
            "di_true": run.di_true.tolist(),
            "diverged": run.diverged,
            "run_meta": run.meta,
            "provenance": _provenance(args, seed),
        },
    )
    print(f"wrote estimate.json and filtered_states.csv to {args.out_dir}")
    return 0


def cmd_montecarlo(args) -> int:
    view = ConfigView(_load_config(args))
    seed = _resolve_seed(args, view)
    system, motion, spectrum, synth, fcfg, sim_dt = _identification_inputs(args, view, seed)
    if motion is not None:
        raise ConfigError("montecarlo draws its own motions; remove the 'motion' block")
    runs = view.take("runs", default=20)
    if args.runs is not None:
        runs = args.runs
    runs = _as_int(runs, "runs")
    post_check = bool(view.take("post_check", default=True))
    view.finish()

    campaign = estimation.monte_carlo(
        system, spectrum, synth, fcfg=fcfg, n_runs=runs, base_seed=seed,
        jobs=args.jobs or 1, post_check=post_check, sim_dt=sim_dt,
    )
    names = estimation.theta_names(system.n_stories)
    n = system.n_stories
    run_ids = list(range(campaign.n_runs))
    seeds = [rec.seed for rec in campaign.records]
    diverged = [rec.diverged for rec in campaign.records]

    nrmse = campaign.state_nrmse_matrix()
    state_cols = (
        [f"y_{j + 1}" for j in range(n)]
        + [f"v_{j + 1}" for j in range(n)]
        + [f"r_{j + 1}" for j in range(n)]
    )
    fileio.write_csv(
        _out_path(args, "state_nrmse.csv"),
        ["run", "seed", "diverged"] + state_cols,
        ([run_ids[i], seeds[i], diverged[i]] + list(nrmse[i]) for i in range(campaign.n_runs)),
    )
    normalized = campaign.normalized_params()
    fileio.write_csv(
        _out_path(args, "normalized_params.csv"),
        ["run", "seed", "diverged"] + names,
        ([run_ids[i], seeds[i], diverged[i]] + list(normalized[i]) for i in range(campaign.n_runs)),
    )
    ratios = campaign.di_ratio()
    fileio.write_csv(
        _out_path(args, "damage_ratio.csv"),
        ["run", "seed", "diverged"] + [f"story_{j + 1}" for j in range(n)],
        ([run_ids[i], seeds[i], diverged[i]] + list(ratios[i]) for i in range(campaign.n_runs)),
    )
    written = ["campaign.json", "state_nrmse.csv", "normalized_params.csv", "damage_ratio.csv"]
    if post_check:
        fr = campaign.fr_nrmse_matrix()
        fileio.write_csv(
            _out_path(args, "fr_nrmse.csv"),
            ["run", "seed", "diverged"] + [f"story_{j + 1}" for j in range(n)],
            ([run_ids[i], seeds[i], diverged[i]] + list(fr[i]) for i in range(campaign.n_runs)),
        )
        written.append("fr_nrmse.csv")
    payload = campaign.to_dict()
    payload["command"] = "montecarlo"
    payload["provenance"] = _provenance(args, seed)
    fileio.write_json(_out_path(args, "campaign.json"), payload)
    print(f"wrote {', '.join(written)} to {args.out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--jobs", type=int, help="worker processes for parallel fan-out")
    common.add_argument("--out-dir", default=".", help="artifact directory (default: .)")
    common.add_argument("--units", choices=("si", "g"),
                        help="units of acceleration records (default: si)")

    parser = argparse.ArgumentParser(
        prog="bwlab",
        description="Hysteretic oscillator laboratory: simulation, deviation "
                    "analysis, synthetic motions and identification.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common],
                       help="integrate one system under one excitation")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common],
                       help="deviation metrics (and optional response errors) over a grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("groundmotion", parents=[common],
                       help="draw synthetic motions from the evolutionary spectrum")
    p.add_argument("--count", type=int, help="number of records to draw")
    p.set_defaults(func=cmd_groundmotion)

    p = sub.add_parser("cr", parents=[common],
                       help="inelastic displacement-ratio spectra for records and shape sets")
    p.add_argument("--record", action="append", help="accelerogram path (repeatable)")
    p.add_argument("--alpha", type=float, help="elastic stiffness share (required)")
    p.add_argument("--strength-reduction", type=float)
    p.add_argument("--damping-ratio", type=float)
    p.set_defaults(func=cmd_cr)

    p = sub.add_parser("identify", parents=[common],
                       help="one constrained-filter identification run")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("montecarlo", parents=[common],
                       help="independent identification runs over fresh motions")
    p.add_argument("--runs", type=int, help="number of identification runs")
    p.set_defaults(func=cmd_montecarlo)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, DomainError, FeasibilityError,
            FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
