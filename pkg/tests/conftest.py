import os

import numpy as np
import pytest

from bwlab import groundmotion, simulate

# One line per acceptance criterion, echoed after the run so the verdicts
# survive output capture.
_CRITERION_LINES = []


@pytest.fixture(scope="session")
def criterion():
    def _record(num, ok, detail=""):
        line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERION_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERION_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_osc():
    return simulate.reference_sdof()


@pytest.fixture(scope="session")
def bench_chain():
    return simulate.benchmark_chain()


@pytest.fixture(scope="session")
def make_motion():
    """Synthetic motions cached by (seed, duration) across the session."""
    cache = {}

    def _make(seed=0, duration=30.0):
        key = (seed, float(duration))
        if key not in cache:
            p = groundmotion.SpectrumParams.medium_soil()
            cfg = groundmotion.SynthesisConfig(seed=seed, duration=duration)
            cache[key] = groundmotion.synthesize(p, cfg)
        return cache[key]

    return _make


def el_centro_path():
    env = os.environ.get("BWLAB_ELCENTRO")
    if env and os.path.exists(env):
        return env
    data_dir = os.path.join(os.path.dirname(__file__), "data")
    for name in ("elcentro.csv", "el_centro.csv", "elcentro_ns.csv"):
        p = os.path.join(data_dir, name)
        if os.path.exists(p):
            return p
    return None


@pytest.fixture(scope="session")
def el_centro():
    """User-supplied El Centro record; tests that need it skip when absent."""
    path = el_centro_path()
    if path is None:
        pytest.skip("no El Centro record (set BWLAB_ELCENTRO or add tests/data/elcentro.csv)")
    units = os.environ.get("BWLAB_ELCENTRO_UNITS", "g")
    return groundmotion.load_accelerogram(path, units=units)


@pytest.fixture()
def run_cli(capsys):
    from bwlab import cli

    def _run(*argv):
        code = cli.main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture()
def write_record(tmp_path):
    """Drop a short sampled record on disk and hand back its path."""

    def _write(accel, dt=0.01, name="record.csv"):
        path = tmp_path / name
        motion = groundmotion.GroundMotion(dt=dt, accel=np.asarray(accel, dtype=float))
        groundmotion.write_accelerogram(path, motion)
        return str(path)

    return _write
