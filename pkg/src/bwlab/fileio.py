"""Atomic artifact writing and round-trip-safe value formatting."""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def format_value(v) -> str:
    """CSV field text: floats get their shortest round-trip representation."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename.

    A failed write never leaves a partial artifact at the destination.
    """
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_csv(path, header, rows) -> None:
    """Atomic CSV with formatted fields; rows are iterables of values."""
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def write_json(path, obj) -> None:
    """Atomic JSON artifact with stable formatting."""
    atomic_write_text(path, json.dumps(obj, indent=2, default=_json_default) + "\n")
