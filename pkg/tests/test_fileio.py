"""Artifact writing: formatting, atomicity, round trips."""
import csv
import json
import os

import numpy as np
import pytest

from bwlab import fileio


@pytest.mark.parametrize(
    "value, text",
    [
        (None, ""),
        (True, "true"),
        (False, "false"),
        (np.bool_(True), "true"),
        (3, "3"),
        (np.int64(-7), "-7"),
        (0.1, "0.1"),
        (np.float64(1.5), "1.5"),
        ("abc", "abc"),
    ],
)
def test_format_value(value, text):
    assert fileio.format_value(value) == text


def test_float_formatting_round_trips():
    for v in (1 / 3, 1e-17, 2**0.5, -0.0, 5e300):
        assert float(fileio.format_value(v)) == v


def test_atomic_write_creates_file_and_no_leftovers(tmp_path):
    target = tmp_path / "out.txt"
    fileio.atomic_write_text(target, "hello\n")
    assert target.read_text() == "hello\n"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_failed_write_preserves_previous_artifact(tmp_path):
    target = tmp_path / "out.txt"
    fileio.atomic_write_text(target, "original\n")
    with pytest.raises(TypeError):
        fileio.atomic_write_text(target, None)  # not a string
    assert target.read_text() == "original\n"
    assert os.listdir(tmp_path) == ["out.txt"]  # temp file cleaned up


def test_csv_aborted_by_bad_row_leaves_target_alone(tmp_path):
    target = tmp_path / "rows.csv"
    fileio.write_csv(target, ["a"], [[1.0]])

    def rows():
        yield [2.0]
        raise RuntimeError("source died")

    with pytest.raises(RuntimeError):
        fileio.write_csv(target, ["a"], rows())
    assert target.read_text() == "a\n1.0\n"
    assert os.listdir(tmp_path) == ["rows.csv"]


def test_csv_round_trip_exact(tmp_path):
    target = tmp_path / "table.csv"
    header = ["t", "value", "flag", "note"]
    rows = [
        [0.0, 1 / 3, True, "x"],
        [np.float64(0.1), np.int32(4), False, None],
    ]
    fileio.write_csv(target, header, iter(rows))

    with open(target, newline="") as fh:
        parsed = list(csv.reader(fh))
    assert parsed[0] == header
    assert float(parsed[1][1]) == 1 / 3
    assert float(parsed[2][0]) == 0.1
    assert parsed[1][2] == "true"
    assert parsed[2][3] == ""
    assert target.read_text().endswith("\n")


def test_json_handles_numpy_payloads(tmp_path):
    target = tmp_path / "meta.json"
    payload = {
        "a": np.float64(0.25),
        "b": np.int64(3),
        "c": np.bool_(True),
        "d": np.arange(3.0),
        "nested": {"e": [np.float32(1.5)]},
    }
    fileio.write_json(target, payload)
    back = json.loads(target.read_text())
    assert back == {"a": 0.25, "b": 3, "c": True, "d": [0.0, 1.0, 2.0], "nested": {"e": [1.5]}}
    assert target.read_text().endswith("\n")


def test_json_rejects_foreign_objects(tmp_path):
    with pytest.raises(TypeError):
        fileio.write_json(tmp_path / "bad.json", {"s": {1, 2}})
    assert not (tmp_path / "bad.json").exists()
