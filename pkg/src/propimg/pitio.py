"""Bit-exact persistence: the PIT tensor container, PNG export, index JSON.

PIT layout (all integers little-endian):

    offset size  field
    0      4     magic "PIT1"
    4      2     version (u16) = 1
    6      8     record_count (u64)
    14     4     height (u32)
    18     4     width (u32)
    22     4     channels (u32)
    26     1     label_mode (u8): 0 = none, 1 = contact16
    27     16    layout_tag (ASCII, zero-padded)
    43     21    zero padding up to the 64-byte header

    then record_count records of: label (u16, 0xFFFF = unlabeled) followed
    by height*width*channels bytes, row-major, channel-last.

Files carry no timestamps: identical inputs write identical bytes.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .composer import LAYOUT_TAG, ProprioImage
from .errors import (
    BadMagic,
    IndexOutOfRange,
    IoFailure,
    ShapeMismatch,
    TruncatedFile,
    UnsupportedVersion,
)

MAGIC = b"PIT1"
HEADER_SIZE = 64
_HEAD_FMT = "<4sHQIIIB16s"  # + padding to 64
UNLABELED = 0xFFFF

LABEL_MODE_NONE = 0
LABEL_MODE_CONTACT16 = 1


@dataclass(frozen=True)
class PitHeader:
    record_count: int
    height: int
    width: int
    channels: int
    label_mode: int
    layout_tag: str = LAYOUT_TAG
    version: int = 1

    def __post_init__(self):
        if self.channels != 3:
            raise ShapeMismatch(f"PIT stores 3-channel images, got {self.channels}")
        if len(self.layout_tag.encode("ascii")) > 16:
            raise ShapeMismatch(f"layout tag longer than 16 bytes: {self.layout_tag!r}")

    @property
    def record_size(self) -> int:
        return 2 + self.height * self.width * self.channels


@dataclass(frozen=True, eq=False)
class PitRecord:
    label: int            # contact state 0..15, or UNLABELED
    image: np.ndarray     # (H, W, 3) uint8

    def __post_init__(self):
        if self.image.ndim != 3 or self.image.dtype != np.uint8:
            raise ShapeMismatch(f"record image must be uint8 HxWx3, got {self.image.dtype} {self.image.shape}")
        if not (0 <= self.label <= 0xFFFF):
            raise ShapeMismatch(f"label must fit u16, got {self.label}")


def record_from_pi(pi: ProprioImage, label: int | None) -> PitRecord:
    return PitRecord(UNLABELED if label is None else label, pi.pixels)


def _pack_header(header: PitHeader) -> bytes:
    head = struct.pack(
        _HEAD_FMT,
        MAGIC,
        header.version,
        header.record_count,
        header.height,
        header.width,
        header.channels,
        header.label_mode,
        header.layout_tag.encode("ascii"),
    )
    return head + b"\x00" * (HEADER_SIZE - len(head))


def write_pit(path: str, header: PitHeader, records) -> int:
    """Write header + records; returns the record count actually written."""
    records = list(records)
    shape = (header.height, header.width, header.channels)
    for i, rec in enumerate(records):
        if rec.image.shape != shape:
            raise ShapeMismatch(f"record {i} shape {rec.image.shape} != header {shape}")
    header = PitHeader(
        record_count=len(records),
        height=header.height,
        width=header.width,
        channels=header.channels,
        label_mode=header.label_mode,
        layout_tag=header.layout_tag,
        version=header.version,
    )
    try:
        with open(path, "wb") as fh:
            fh.write(_pack_header(header))
            for rec in records:
                fh.write(struct.pack("<H", rec.label))
                fh.write(rec.image.tobytes())
    except OSError as exc:
        raise IoFailure(f"writing {path}: {exc}") from exc
    return len(records)


def read_pit_header(path: str) -> PitHeader:
    try:
        with open(path, "rb") as fh:
            head = fh.read(HEADER_SIZE)
    except OSError as exc:
        raise IoFailure(f"reading {path}: {exc}") from exc
    return _parse_header(head, path)


def _parse_header(head: bytes, path: str) -> PitHeader:
    if len(head) < HEADER_SIZE:
        raise TruncatedFile(f"{path}: header truncated at byte {len(head)} of {HEADER_SIZE}")
    magic, version, count, height, width, channels, label_mode, tag = struct.unpack(
        _HEAD_FMT, head[: struct.calcsize(_HEAD_FMT)]
    )
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} != {MAGIC!r}")
    if version != 1:
        raise UnsupportedVersion(f"{path}: version {version} not supported")
    return PitHeader(
        record_count=count,
        height=height,
        width=width,
        channels=channels,
        label_mode=label_mode,
        layout_tag=tag.rstrip(b"\x00").decode("ascii"),
        version=version,
    )


def read_pit(path: str):
    """Read a whole PIT file; exact inverse of write_pit."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"reading {path}: {exc}") from exc
    header = _parse_header(data[:HEADER_SIZE], path)
    size = header.record_size
    expected = HEADER_SIZE + header.record_count * size
    if len(data) < expected:
        raise TruncatedFile(f"{path}: file ends at byte {len(data)}, expected {expected}")
    records = []
    shape = (header.height, header.width, header.channels)
    for i in range(header.record_count):
        off = HEADER_SIZE + i * size
        (label,) = struct.unpack_from("<H", data, off)
        img = np.frombuffer(data, dtype=np.uint8, count=size - 2, offset=off + 2).reshape(shape)
        records.append(PitRecord(label, img.copy()))
    return header, records


def read_pit_record(path: str, index: int) -> tuple:
    """Random access to one record without loading the whole file."""
    header = read_pit_header(path)
    if not 0 <= index < header.record_count:
        raise IndexOutOfRange(f"record {index} out of range [0, {header.record_count})")
    size = header.record_size
    off = HEADER_SIZE + index * size
    try:
        with open(path, "rb") as fh:
            fh.seek(off)
            blob = fh.read(size)
    except OSError as exc:
        raise IoFailure(f"reading {path}: {exc}") from exc
    if len(blob) < size:
        raise TruncatedFile(f"{path}: file ends at byte {off + len(blob)}, expected {off + size}")
    (label,) = struct.unpack_from("<H", blob, 0)
    img = np.frombuffer(blob, dtype=np.uint8, offset=2).reshape(
        (header.height, header.width, header.channels)
    )
    return header, PitRecord(label, img.copy())


def export_png(pi_or_pixels, path: str) -> None:
    """Write an 8-bit RGB PNG with byte-identical pixel values."""
    pixels = pi_or_pixels.pixels if isinstance(pi_or_pixels, ProprioImage) else pi_or_pixels
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise ShapeMismatch(f"PNG export needs uint8 HxWx3, got {pixels.dtype} {pixels.shape}")
    try:
        Image.fromarray(pixels, mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise IoFailure(f"writing {path}: {exc}") from exc


def read_png(path: str) -> np.ndarray:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except OSError as exc:
        raise IoFailure(f"reading {path}: {exc}") from exc


def write_index(path: str, window: int, stride: int, split: str, files, source: str) -> dict:
    """Create or update the sidecar index JSON listing PIT files per split."""
    doc = {"layout_tag": LAYOUT_TAG, "window": window, "stride": stride, "splits": {}}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        pass
    except json.JSONDecodeError as exc:
        raise IoFailure(f"index {path} exists but is not valid JSON: {exc}") from exc
    doc.setdefault("splits", {})
    doc["layout_tag"] = LAYOUT_TAG
    doc["window"] = window
    doc["stride"] = stride
    doc["splits"][split] = {"source_manifest": source, "files": files}
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    return doc
