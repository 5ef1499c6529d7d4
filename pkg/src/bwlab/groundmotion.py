"""Synthetic ground motions from an evolutionary power spectrum.

The stationary kernel is a soft-soil amplification spectrum multiplied by
a high-pass base-layer filter; a gamma-type envelope turns it into an
evolutionary spectrum.  Realizations come from the spectral
representation as a cosine series with independent uniform phases, with
an optional peak-acceleration cap enforced by reject-and-resample.

Also here: reading and writing sampled accelerograms.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, NumericalError, ParseError

STANDARD_GRAVITY = 9.80665


@dataclass(frozen=True)
class SpectrumParams:
    """Evolutionary spectrum parameters.

    s0 is the white-noise intensity feeding the soil filter; omega_g and
    zeta_g shape the amplification peak, omega_f and zeta_f the high-pass
    corner, and b sets the envelope time scale (the envelope peaks at
    t = 1/b).
    """

    s0: float
    omega_g: float = 10.0
    zeta_g: float = 0.4
    omega_f: float = 1.0
    zeta_f: float = 0.6
    b: float = 0.2

    def __post_init__(self):
        if not self.s0 >= 0:
            raise DomainError(f"s0 must be non-negative, got {self.s0}")
        if not (self.omega_g > 0 and self.omega_f > 0):
            raise DomainError("filter frequencies must be positive")
        if not (self.zeta_g > 0 and self.zeta_f > 0):
            raise DomainError("filter damping ratios must be positive")
        if not self.b > 0:
            raise DomainError(f"envelope rate b must be positive, got {self.b}")

    @classmethod
    def medium_soil(cls, f_s: float = 100.0) -> "SpectrumParams":
        """Default firm-soil parameter set with intensity tied to the sampling rate."""
        return cls(s0=1.0 / f_s)


def soil_amplification(p: SpectrumParams, omega):
    """Stationary soil filter spectrum (flat input intensity s0)."""
    ratio_sq = (np.asarray(omega, dtype=float) / p.omega_g) ** 2
    num = 1.0 + 4.0 * p.zeta_g**2 * ratio_sq
    den = (1.0 - ratio_sq) ** 2 + 4.0 * p.zeta_g**2 * ratio_sq
    return p.s0 * num / den


def highpass_correction(p: SpectrumParams, omega):
    """Base-layer high-pass filter; zero at omega = 0, unity well above the corner.

    Fourth-power numerator: the filter must pass the dominant band
    unattenuated, which also keeps the synthesized peak accelerations at
    the level the rejection cap is calibrated for.
    """
    ratio_sq = (np.asarray(omega, dtype=float) / p.omega_f) ** 2
    den = (1.0 - ratio_sq) ** 2 + 4.0 * p.zeta_f**2 * ratio_sq
    return ratio_sq**2 / den


def envelope_sq(p: SpectrumParams, t):
    """Squared amplitude envelope t * exp(-b t); maximal at t = 1/b."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0.0, t * np.exp(-p.b * t), 0.0)


def evolutionary_psd(p: SpectrumParams, omega, t):
    """Time-frequency spectral density; broadcasts omega against t."""
    return soil_amplification(p, omega) * highpass_correction(p, omega) * envelope_sq(p, t)


@dataclass(frozen=True)
class SynthesisConfig:
    """Discretization and acceptance policy for motion synthesis.

    Frequencies are the n_freq midpoints of a uniform partition of
    (0, omega_cut]; omega_cut must respect the Nyquist rate pi * f_s.
    A realization whose peak acceleration exceeds pga_cap is rejected and
    redrawn with the seed advanced by one, up to max_retries extra draws.
    """

    f_s: float = 100.0
    duration: float = 30.0
    omega_cut: float = 40.0 * math.pi
    n_freq: int = 2000
    seed: int = 0
    pga_cap: float = 0.4 * STANDARD_GRAVITY
    max_retries: int = 100

    def __post_init__(self):
        if not (self.f_s > 0 and self.duration > 0):
            raise DomainError("f_s and duration must be positive")
        if not 0 < self.omega_cut <= math.pi * self.f_s + 1e-12:
            raise DomainError(
                f"omega_cut must lie in (0, pi * f_s], got {self.omega_cut} at f_s = {self.f_s}"
            )
        if not self.n_freq >= 1:
            raise DomainError(f"n_freq must be >= 1, got {self.n_freq}")
        if self.pga_cap is not None and not self.pga_cap > 0:
            raise DomainError(f"pga_cap must be positive or None, got {self.pga_cap}")
        if not self.max_retries >= 0:
            raise DomainError("max_retries must be non-negative")


@dataclass
class GroundMotion:
    """Uniformly sampled base acceleration record."""

    dt: float
    accel: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.accel = np.asarray(self.accel, dtype=float)
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if self.accel.ndim != 1 or self.accel.size < 2:
            raise DomainError("accel must be a 1-D array with at least two samples")
        if not np.all(np.isfinite(self.accel)):
            raise DomainError("accel must be finite")

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.accel.size) * self.dt

    @property
    def duration(self) -> float:
        return (self.accel.size - 1) * self.dt

    @property
    def pga(self) -> float:
        return float(np.max(np.abs(self.accel)))


def synthesize(p: SpectrumParams, cfg: SynthesisConfig) -> GroundMotion:
    """Draw one motion from the evolutionary spectrum.

    Deterministic for a given (p, cfg): draw k uses seed cfg.seed + k.
    The accepted draw's seed, the number of attempts and the peak value
    land in the record's meta.
    """
    dt = 1.0 / cfg.f_s
    steps = int(round(cfg.duration * cfg.f_s))
    t = np.arange(steps + 1) * dt
    d_omega = cfg.omega_cut / cfg.n_freq
    omega = (np.arange(1, cfg.n_freq + 1) - 0.5) * d_omega
    stationary_amp = np.sqrt(
        2.0 * soil_amplification(p, omega) * highpass_correction(p, omega) * d_omega
    )
    envelope = np.sqrt(envelope_sq(p, t))
    phase_arg = t[:, None] * omega[None, :]

    attempts = cfg.max_retries + 1
    for k in range(attempts):
        rng = np.random.default_rng(cfg.seed + k)
        phi = rng.uniform(0.0, 2.0 * math.pi, cfg.n_freq)
        accel = envelope * (np.cos(phase_arg + phi) @ stationary_amp)
        pga = float(np.max(np.abs(accel)))
        if cfg.pga_cap is None or pga <= cfg.pga_cap:
            meta = {
                "seed": cfg.seed,
                "seed_used": cfg.seed + k,
                "attempts": k + 1,
                "pga": pga,
                "f_s": cfg.f_s,
                "duration": cfg.duration,
                "omega_cut": cfg.omega_cut,
                "n_freq": cfg.n_freq,
                "pga_cap": cfg.pga_cap,
                "spectrum": {
                    "s0": p.s0, "omega_g": p.omega_g, "zeta_g": p.zeta_g,
                    "omega_f": p.omega_f, "zeta_f": p.zeta_f, "b": p.b,
                },
            }
            return GroundMotion(dt=dt, accel=accel, meta=meta)
    raise NumericalError(
        f"no draw met the peak cap {cfg.pga_cap} m/s^2 within {attempts} attempts"
    )


def synthesize_many(p: SpectrumParams, cfg: SynthesisConfig, count: int) -> list:
    """count independent draws; draw i starts from seed cfg.seed + i * (max_retries + 1)."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    stride = cfg.max_retries + 1
    return [synthesize(p, replace(cfg, seed=cfg.seed + i * stride)) for i in range(count)]


# ---------------------------------------------------------------------------
# Accelerogram files

_HEADER = ("t_seconds", "accel")
_DT_JITTER = 1e-9


def load_accelerogram(path, units: str = "si") -> GroundMotion:
    """Read a two-column (time, acceleration) CSV record.

    The first row may be the header "t_seconds,accel"; a bare two-column
    numeric file is accepted as the fixed-step form.  Time must advance
    on a uniform grid (jitter below a nanosecond).  units "g" rescales
    the acceleration column by standard gravity.
    """
    if units not in ("si", "g"):
        raise DomainError(f"units must be 'si' or 'g', got {units!r}")
    times = []
    accels = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, found {len(row)}", line=line_no)
            first, second = (cell.strip() for cell in row)
            if not times and not _is_number(first):
                if (first.lower(), second.lower()) != _HEADER:
                    raise ParseError(
                        f"unrecognized header ({first!r}, {second!r}); expected {_HEADER}",
                        line=line_no,
                    )
                continue
            try:
                times.append(float(first))
                accels.append(float(second))
            except ValueError:
                raise ParseError(f"non-numeric value in ({first!r}, {second!r})", line=line_no)
    if len(times) < 2:
        raise ParseError(f"record in {path} holds fewer than two samples")
    t = np.array(times)
    a = np.array(accels)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a))):
        raise ParseError(f"record in {path} holds non-finite values")
    steps = np.diff(t)
    dt = float(steps[0])
    if dt <= 0 or np.any(np.abs(steps - dt) > _DT_JITTER):
        raise ParseError(f"record in {path} is not on a uniform time grid")
    if units == "g":
        a = a * STANDARD_GRAVITY
    return GroundMotion(dt=dt, accel=a, meta={"source": str(path), "units": units})


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_accelerogram(path, motion: GroundMotion) -> None:
    """Write the header form; floats keep their shortest round-trip digits."""
    from .fileio import atomic_write_text, format_value

    lines = [",".join(_HEADER)]
    t = motion.t
    for i in range(motion.accel.size):
        lines.append(f"{format_value(t[i])},{format_value(motion.accel[i])}")
    atomic_write_text(path, "\n".join(lines) + "\n")
