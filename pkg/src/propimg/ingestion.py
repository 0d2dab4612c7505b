"""Manifest parsing and sliding-window streaming over CSV signal logs.

The manifest is a JSON document binding CSV columns to signal groups:

    {
      "csv": "run.csv" | ["a.csv", "b.csv"],
      "time_column": "t",                  # optional, checked monotonic
      "sample_rate": 100.0,
      "window": 10,
      "stride": 1,
      "labels": {"LF": "contact_LF", "RF": "...", "LH": "...", "RH": "..."},
      "signals": [
        {"name": "joint_position", "scope": "leg",
         "axes": ["HAA", "HFE", "KFE"],
         "channels": [{"slot": "LF", "axis": "HAA", "column": "q_LF_HAA",
                       "bounds": [-0.8, 0.8]}, ...]},
        {"name": "trunk_angular_velocity", "scope": "trunk",
         "axes": ["X", "Y", "Z"],
         "channels": [{"slot": "trunk", "axis": "X", "column": "gyro_X",
                       "bounds": [-3, 3]}, ...]}
      ]
    }

Leg-scope signals need the full 4 legs x 3 axes grid; trunk-scope signals
need exactly the 3 axes. "labels" is optional; when present the four
columns hold 0/1 contact flags per foot.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .core import LEG_JOINTS, LEGS, TRUNK_AXES, GlobalBounds, Window
from .errors import (
    DegenerateBounds,
    InvalidBounds,
    MalformedManifest,
    MissingColumn,
    NonFiniteInput,
    NonMonotonicTime,
    TooFewRows,
)

LABEL_BITS = {"LF": 3, "RF": 2, "LH": 1, "RH": 0}


@dataclass(frozen=True)
class ChannelBinding:
    slot: str          # leg id or "trunk"
    axis: str          # HAA/HFE/KFE or X/Y/Z
    column: str
    bounds: GlobalBounds


@dataclass(frozen=True)
class SignalSpec:
    name: str
    scope: str         # "leg" or "trunk"
    axes: tuple
    channels: tuple    # ChannelBinding, grouped later by slot

    def slot_channels(self, slot: str):
        """The slot's channels in axis order."""
        by_axis = {c.axis: c for c in self.channels if c.slot == slot}
        return [by_axis[a] for a in self.axes]

    @property
    def slots(self):
        return LEGS if self.scope == "leg" else ("trunk",)


@dataclass(frozen=True)
class Manifest:
    csv_paths: tuple
    sample_rate: float
    window_w: int
    stride: int
    signals: tuple
    labels: dict | None
    time_column: str | None
    metadata: dict = field(default_factory=dict)

    @property
    def referenced_columns(self):
        cols = [c.column for s in self.signals for c in s.channels]
        if self.labels:
            cols += [self.labels[leg] for leg in LEGS]
        if self.time_column:
            cols.append(self.time_column)
        return cols


@dataclass(frozen=True)
class WindowGroup:
    """One synchronized triplet of windows for a signal/slot pair."""

    signal_kind: str
    scope: str
    slot: str
    windows: tuple     # 3 Windows in axis order
    bounds: tuple      # 3 GlobalBounds in axis order


@dataclass(frozen=True)
class LabeledWindowSet:
    """All triplets for one timestep plus the 16-state contact label."""

    index: int                 # trailing row index of the window
    groups: tuple
    contact_state: int | None

    def __post_init__(self):
        if self.contact_state is not None and not 0 <= self.contact_state <= 15:
            raise MalformedManifest(f"contact_state out of range: {self.contact_state}")


def _req(obj: dict, key: str, where: str):
    if key not in obj:
        raise MalformedManifest(f"missing field {key!r} in {where}")
    return obj[key]


def _parse_bounds(raw, column: str) -> GlobalBounds:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise InvalidBounds(f"bounds for column {column!r} must be [min, max], got {raw!r}")
    lo, hi = raw
    try:
        return GlobalBounds(float(lo), float(hi))
    except (TypeError, ValueError) as exc:
        raise InvalidBounds(f"bounds for column {column!r} are not numbers: {raw!r}") from exc
    except (DegenerateBounds, NonFiniteInput) as exc:
        raise InvalidBounds(f"bounds for column {column!r}: {exc}") from exc


def _csv_header(path: str):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            return next(reader)
        except StopIteration:
            raise TooFewRows(f"{path} is empty") from None


def parse_manifest(path: str) -> Manifest:
    """Load and fully validate a manifest, including CSV column existence."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"manifest is not valid JSON: {exc}") from exc

    raw_csv = _req(doc, "csv", "manifest")
    csv_paths = [raw_csv] if isinstance(raw_csv, str) else list(raw_csv)
    if not csv_paths:
        raise MalformedManifest("field 'csv' lists no files")
    base = os.path.dirname(os.path.abspath(path))
    csv_paths = tuple(p if os.path.isabs(p) else os.path.join(base, p) for p in csv_paths)

    window_w = int(_req(doc, "window", "manifest"))
    if window_w < 4:
        raise MalformedManifest(f"field 'window' must be >= 4, got {window_w}")
    stride = int(doc.get("stride", 1))
    if stride < 1:
        raise MalformedManifest(f"field 'stride' must be >= 1, got {stride}")
    sample_rate = float(_req(doc, "sample_rate", "manifest"))

    signals = []
    for si, sig in enumerate(_req(doc, "signals", "manifest")):
        where = f"signals[{si}]"
        name = _req(sig, "name", where)
        scope = _req(sig, "scope", where)
        if scope not in ("leg", "trunk"):
            raise MalformedManifest(f"{where}.scope must be 'leg' or 'trunk', got {scope!r}")
        axes = tuple(_req(sig, "axes", where))
        allowed = (LEG_JOINTS, TRUNK_AXES) if scope == "leg" else (TRUNK_AXES,)
        if axes not in allowed:
            raise MalformedManifest(f"{where}.axes must be one of {allowed}, got {axes}")
        channels = []
        for ci, ch in enumerate(_req(sig, "channels", where)):
            cwhere = f"{where}.channels[{ci}]"
            column = _req(ch, "column", cwhere)
            channels.append(
                ChannelBinding(
                    slot=_req(ch, "slot", cwhere),
                    axis=_req(ch, "axis", cwhere),
                    column=column,
                    bounds=_parse_bounds(_req(ch, "bounds", cwhere), column),
                )
            )
        expected_slots = LEGS if scope == "leg" else ("trunk",)
        have = {(c.slot, c.axis) for c in channels}
        need = {(s, a) for s in expected_slots for a in axes}
        if have != need:
            raise MalformedManifest(
                f"{where} must bind exactly slots x axes {sorted(need)}, got {sorted(have)}"
            )
        signals.append(SignalSpec(name, scope, axes, tuple(channels)))
    if not signals:
        raise MalformedManifest("manifest binds no signals")
    names = [s.name for s in signals]
    if len(set(names)) != len(names):
        raise MalformedManifest(f"duplicate signal names: {names}")

    labels = doc.get("labels")
    if labels is not None:
        if set(labels) != set(LEGS):
            raise MalformedManifest(f"labels must map exactly {LEGS}, got {sorted(labels)}")
        labels = dict(labels)

    manifest = Manifest(
        csv_paths=csv_paths,
        sample_rate=sample_rate,
        window_w=window_w,
        stride=stride,
        signals=tuple(signals),
        labels=labels,
        time_column=doc.get("time_column"),
        metadata=dict(doc.get("metadata", {})),
    )

    for cp in manifest.csv_paths:
        header = _csv_header(cp)
        present = set(header)
        for col in manifest.referenced_columns:
            if col not in present:
                raise MissingColumn(f"column {col!r} not found in {cp}")
    return manifest


def load_columns(path: str, columns) -> dict:
    """Read the selected CSV columns as float64 arrays (empty cells -> NaN)."""
    header = _csv_header(path)
    pos = {name: header.index(name) for name in columns}
    data = {name: [] for name in columns}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            for name, i in pos.items():
                cell = row[i]
                try:
                    data[name].append(float(cell))
                except ValueError:
                    data[name].append(float("nan"))
    return {name: np.asarray(vals, dtype=np.float64) for name, vals in data.items()}


def stream_windows(manifest: Manifest):
    """Yield LabeledWindowSets in timestep order.

    Windows never span file boundaries. Rows containing NaN in any bound
    column poison every window covering them; those windows are skipped
    (use stream_windows_with_stats to count skips).
    """
    yield from _stream(manifest, counter=None)


def stream_windows_with_stats(manifest: Manifest, counter: dict):
    """Like stream_windows but records skip/emit counts into counter."""
    yield from _stream(manifest, counter=counter)


def _stream(manifest: Manifest, counter: dict | None):
    w = manifest.window_w
    stride = manifest.stride
    signal_columns = [c.column for s in manifest.signals for c in s.channels]
    label_columns = [manifest.labels[leg] for leg in LEGS] if manifest.labels else []

    row_offset = 0
    for path in manifest.csv_paths:
        wanted = list(dict.fromkeys(signal_columns + label_columns))
        if manifest.time_column:
            wanted.append(manifest.time_column)
        cols = load_columns(path, wanted)
        n_rows = len(next(iter(cols.values())))
        if n_rows < w:
            raise TooFewRows(f"{path} has {n_rows} rows, need at least {w}")

        if manifest.time_column:
            t = cols[manifest.time_column]
            if np.any(~np.isfinite(t)) or np.any(np.diff(t) <= 0):
                raise NonMonotonicTime(f"time column {manifest.time_column!r} in {path} is not strictly increasing")

        bad_row = np.zeros(n_rows, dtype=bool)
        for name in signal_columns:
            bad_row |= ~np.isfinite(cols[name])
        # prefix sums let each window test its NaN coverage in O(1)
        bad_cum = np.concatenate([[0], np.cumsum(bad_row)])

        for end in range(w - 1, n_rows, stride):
            start = end - w + 1
            if bad_cum[end + 1] - bad_cum[start] > 0:
                if counter is not None:
                    counter["skipped"] = counter.get("skipped", 0) + 1
                continue
            groups = []
            for sig in manifest.signals:
                for slot in sig.slots:
                    bindings = sig.slot_channels(slot)
                    groups.append(
                        WindowGroup(
                            signal_kind=sig.name,
                            scope=sig.scope,
                            slot=slot,
                            windows=tuple(Window(cols[b.column][start : end + 1]) for b in bindings),
                            bounds=tuple(b.bounds for b in bindings),
                        )
                    )
            contact = None
            if label_columns:
                contact = 0
                for leg in LEGS:
                    bit = int(cols[manifest.labels[leg]][end] > 0.5)
                    contact |= bit << LABEL_BITS[leg]
            if counter is not None:
                counter["emitted"] = counter.get("emitted", 0) + 1
            yield LabeledWindowSet(index=row_offset + end, groups=tuple(groups), contact_state=contact)
        row_offset += n_rows
