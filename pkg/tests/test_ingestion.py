import json

import numpy as np
import pytest

from propimg.errors import (
    InvalidBounds,
    MalformedManifest,
    MissingColumn,
    NonMonotonicTime,
    TooFewRows,
)
from propimg.ingestion import parse_manifest, stream_windows, stream_windows_with_stats

LEGS = ("LF", "RF", "LH", "RH")


def minimal_manifest(tmp_path, rows, window=10, stride=1, bad_bounds=False, bad_column=False,
                     time_values=None):
    """One trunk signal + labels, with a generated CSV alongside."""
    n = len(rows["gyro_X"])
    csv_lines = ["t,gyro_X,gyro_Y,gyro_Z,contact_LF,contact_RF,contact_LH,contact_RH"]
    t = time_values if time_values is not None else [i * 0.01 for i in range(n)]
    for i in range(n):
        csv_lines.append(
            f"{t[i]},{rows['gyro_X'][i]},{rows['gyro_Y'][i]},{rows['gyro_Z'][i]},"
            f"{rows['labels'][i][0]},{rows['labels'][i][1]},{rows['labels'][i][2]},{rows['labels'][i][3]}"
        )
    (tmp_path / "run.csv").write_text("\n".join(csv_lines) + "\n")

    doc = {
        "csv": "run.csv",
        "time_column": "t",
        "sample_rate": 100.0,
        "window": window,
        "stride": stride,
        "labels": {leg: f"contact_{leg}" for leg in LEGS},
        "signals": [
            {
                "name": "trunk_angular_velocity",
                "scope": "trunk",
                "axes": ["X", "Y", "Z"],
                "channels": [
                    {
                        "slot": "trunk",
                        "axis": a,
                        "column": f"gyro_{a}" if not bad_column or a != "X" else "gyro_missing",
                        "bounds": [5.0, 5.0] if bad_bounds and a == "X" else [-3.0, 3.0],
                    }
                    for a in ("X", "Y", "Z")
                ],
            }
        ],
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc))
    return str(path)


def make_rows(n, nan_at=()):
    rng = np.random.default_rng(0)
    rows = {a: rng.normal(0, 1, n).round(6).tolist() for a in ("gyro_X", "gyro_Y", "gyro_Z")}
    for i in nan_at:
        rows["gyro_X"][i] = "nan"
    rows["labels"] = [(1, 0, 1, 0) for _ in range(n)]
    return rows


class TestParseManifest:
    def test_minimal_valid(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(30)))
        assert m.window_w == 10 and m.stride == 1
        assert m.signals[0].name == "trunk_angular_velocity"
        assert m.labels["LF"] == "contact_LF"

    def test_missing_column(self, tmp_path):
        path = minimal_manifest(tmp_path, make_rows(30), bad_column=True)
        with pytest.raises(MissingColumn, match="gyro_missing"):
            parse_manifest(path)

    def test_degenerate_bounds(self, tmp_path):
        path = minimal_manifest(tmp_path, make_rows(30), bad_bounds=True)
        with pytest.raises(InvalidBounds, match="gyro_X"):
            parse_manifest(path)

    def test_incomplete_leg_grid(self, tmp_path):
        doc = {
            "csv": "run.csv",
            "sample_rate": 100.0,
            "window": 10,
            "signals": [
                {
                    "name": "joint_position",
                    "scope": "leg",
                    "axes": ["HAA", "HFE", "KFE"],
                    "channels": [
                        {"slot": "LF", "axis": "HAA", "column": "c", "bounds": [0, 1]}
                    ],
                }
            ],
        }
        p = tmp_path / "m.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(MalformedManifest, match="slots x axes"):
            parse_manifest(str(p))

    def test_labels_must_cover_legs(self, tmp_path):
        path = minimal_manifest(tmp_path, make_rows(30))
        doc = json.loads(open(path).read())
        del doc["labels"]["RH"]
        open(path, "w").write(json.dumps(doc))
        with pytest.raises(MalformedManifest, match="labels"):
            parse_manifest(path)

    def test_names_offending_field(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({"csv": "run.csv"}))
        with pytest.raises(MalformedManifest, match="window"):
            parse_manifest(str(p))


class TestStreamWindows:
    def test_count_stride_1(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(100)))
        sets = list(stream_windows(m))
        assert len(sets) == 91

    def test_count_stride_5(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(100), stride=5))
        sets = list(stream_windows(m))
        # oracle: enumerate valid trailing indices directly
        expected = len([e for e in range(9, 100, 5)])
        assert len(sets) == expected == 19

    def test_label_bit_encoding(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(20)))
        ws = next(iter(stream_windows(m)))
        # labels (1,0,1,0) for LF,RF,LH,RH
        assert ws.contact_state == 0b1010 == 10

    def test_window_invariants(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(40)))
        for ws in stream_windows(m):
            for g in ws.groups:
                for w in g.windows:
                    assert len(w) == 10
                    assert np.all(np.isfinite(w.values))

    def test_nan_rows_skip_enclosing_windows(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(40, nan_at=(20,))))
        counter = {}
        sets = list(stream_windows_with_stats(m, counter))
        # windows with trailing index 20..29 cover row 20
        assert counter["skipped"] == 10
        assert counter["emitted"] == len(sets) == 31 - 10
        emitted = {ws.index for ws in sets}
        assert all(not (20 <= e <= 29) for e in emitted)

    def test_deterministic_order(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(60)))
        a = [ws.index for ws in stream_windows(m)]
        b = [ws.index for ws in stream_windows(m)]
        assert a == b == sorted(a)

    def test_too_few_rows(self, tmp_path):
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(5)))
        with pytest.raises(TooFewRows):
            list(stream_windows(m))

    def test_non_monotonic_time(self, tmp_path):
        t = [i * 0.01 for i in range(30)]
        t[7] = t[6]  # repeated timestamp
        m = parse_manifest(minimal_manifest(tmp_path, make_rows(30), time_values=t))
        with pytest.raises(NonMonotonicTime):
            list(stream_windows(m))
