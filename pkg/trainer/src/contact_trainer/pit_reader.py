"""Standalone reader for PIT tensor files and their sidecar index JSON.

Implemented against the documented byte contract rather than any encoder
package, so it doubles as a cross-language check of the format:

    64-byte header, little-endian:
      0..3   magic "PIT1"
      4..5   version u16 (must be 1)
      6..13  record_count u64
      14..17 height u32
      18..21 width u32
      22..25 channels u32
      26     label_mode u8 (0 none, 1 contact16)
      27..42 layout_tag, 16 ASCII bytes zero-padded
      43..63 zero padding
    records: label u16 (0xFFFF = unlabeled), then H*W*C uint8 pixels
    (row-major, channel-last).
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BadPitFile

MAGIC = b"PIT1"
HEADER_SIZE = 64
UNLABELED = 0xFFFF
EXPECTED_LAYOUT_TAG = "SLSPGFCY-LFRFLHR"

# body quadrants in the layout tag's leg order
BODY_QUADRANTS = ("LF", "RF", "LH", "RH")


@dataclass(frozen=True)
class PitFile:
    path: str
    record_count: int
    height: int
    width: int
    channels: int
    label_mode: int
    layout_tag: str

    @property
    def record_size(self) -> int:
        return 2 + self.height * self.width * self.channels


def read_header(path: str) -> PitFile:
    with open(path, "rb") as fh:
        head = fh.read(HEADER_SIZE)
    if len(head) < HEADER_SIZE:
        raise BadPitFile(f"{path}: truncated header ({len(head)} bytes)")
    magic, version, count, h, w, c, label_mode, tag = struct.unpack("<4sHQIIIB16s", head[:43])
    if magic != MAGIC:
        raise BadPitFile(f"{path}: bad magic {magic!r}")
    if version != 1:
        raise BadPitFile(f"{path}: unsupported version {version}")
    return PitFile(path, count, h, w, c, label_mode, tag.rstrip(b"\x00").decode("ascii"))


def read_records(path: str):
    """Return (labels (n,) uint16, images (n, H, W, C) uint8)."""
    meta = read_header(path)
    size = meta.record_size
    expected = HEADER_SIZE + meta.record_count * size
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < expected:
        raise BadPitFile(f"{path}: ends at byte {len(data)}, expected {expected}")
    raw = np.frombuffer(data, dtype=np.uint8, offset=HEADER_SIZE, count=meta.record_count * size)
    raw = raw.reshape(meta.record_count, size)
    labels = raw[:, :2].copy().view(np.uint16).reshape(meta.record_count)
    images = raw[:, 2:].reshape(meta.record_count, meta.height, meta.width, meta.channels).copy()
    return meta, labels, images


def load_index(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("layout_tag", "window", "splits"):
        if key not in doc:
            raise BadPitFile(f"index {path} missing field {key!r}")
    return doc


def split_files(index_path: str, split: str):
    """File entries of one split, with paths resolved against the index."""
    doc = load_index(index_path)
    if split not in doc["splits"]:
        raise BadPitFile(f"index has no split {split!r}; available: {sorted(doc['splits'])}")
    base = os.path.dirname(os.path.abspath(index_path))
    entries = []
    for entry in doc["splits"][split]["files"]:
        entry = dict(entry)
        if not os.path.isabs(entry["path"]):
            entry["path"] = os.path.join(base, entry["path"])
        entries.append(entry)
    return entries
