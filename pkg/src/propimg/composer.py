"""Assemble sub-images into morphology-aware proprioceptive images.

Layout constants are part of the on-disk contract: the temporal tile is
[[slope, spikes], [gaf, cymatic]] and the body grid is [[LF, RF], [LH, RH]].
Every composition is a pure byte copy, so compose/split pairs are lossless
inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LEGS, EncoderConfig, compute_deviation, compute_local_range
from .encoders import (
    SubImage,
    encode_cymatic,
    encode_gaf_polar,
    encode_slope_dynamics,
    encode_spike_patterns,
    map_cymatic_params,
)
from .errors import MissingLeg, ShapeMismatch

# Quadrant order of the temporal tile, row-major; mirrored by the PIT layout tag.
TILE_LAYOUT = (("slope_dynamics", "spike_patterns"), ("gaf_polar", "cymatic"))
LAYOUT_TAG = "SLSPGFCY-LFRFLHRH"[:16]


@dataclass(frozen=True, eq=False)
class ProprioImage:
    """A composed 3-channel 8-bit image bound to a morphology scope.

    scope is "body", a leg id (LF/RF/LH/RH), or "trunk"; signal_kind names
    the proprioceptive quantity (joint_position, torque, ...).
    """

    pixels: np.ndarray
    scope: str
    signal_kind: str

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3:
            raise ShapeMismatch(f"proprio image must be HxWx3, got shape {p.shape}")
        if p.shape[0] != p.shape[1]:
            raise ShapeMismatch(f"proprio image must be square, got shape {p.shape}")
        if p.dtype != np.uint8:
            raise ShapeMismatch(f"proprio image must be uint8, got {p.dtype}")


def _require_square(pixels: np.ndarray, w: int, what: str) -> None:
    if pixels.shape != (w, w):
        raise ShapeMismatch(f"{what} must be {w}x{w}, got {pixels.shape}")


def compose_temporal_tile(
    slope: SubImage, spikes: SubImage, gaf: SubImage, cymatic: SubImage
) -> np.ndarray:
    """2x2 spatial tile of the four sub-images; no resampling, pure copy."""
    w = slope.pixels.shape[0]
    for img, name in ((spikes, "spikes"), (gaf, "gaf"), (cymatic, "cymatic")):
        _require_square(img.pixels, w, name)
    tile = np.empty((2 * w, 2 * w), dtype=np.uint8)
    tile[:w, :w] = slope.pixels
    tile[:w, w:] = spikes.pixels
    tile[w:, :w] = gaf.pixels
    tile[w:, w:] = cymatic.pixels
    return tile


def compose_leg_pi(per_joint_tiles, leg: str, signal_kind: str = "") -> ProprioImage:
    """Stack the three per-joint tiles channel-wise into one leg image."""
    tiles = list(per_joint_tiles)
    if len(tiles) != 3:
        raise ShapeMismatch(f"leg composition needs 3 tiles, got {len(tiles)}")
    shape = tiles[0].shape
    if any(t.shape != shape for t in tiles):
        raise ShapeMismatch("per-joint tiles differ in shape")
    return ProprioImage(np.stack(tiles, axis=-1), scope=leg, signal_kind=signal_kind)


def compose_trunk_pi(per_axis_tiles, name: str) -> ProprioImage:
    """Stack the X/Y/Z tiles channel-wise; trunk images stay un-gridded."""
    tiles = list(per_axis_tiles)
    if len(tiles) != 3:
        raise ShapeMismatch(f"trunk composition needs 3 tiles, got {len(tiles)}")
    shape = tiles[0].shape
    if any(t.shape != shape for t in tiles):
        raise ShapeMismatch("per-axis tiles differ in shape")
    return ProprioImage(np.stack(tiles, axis=-1), scope="trunk", signal_kind=name)


def compose_body_pi(legs: dict) -> ProprioImage:
    """Arrange the four leg images spatially as [[LF, RF], [LH, RH]]."""
    for leg in LEGS:
        if leg not in legs:
            raise MissingLeg(f"body composition is missing leg {leg}")
    lf = legs["LF"]
    h, w, _ = lf.pixels.shape
    if h != w:
        raise ShapeMismatch(f"leg image must be square, got {lf.pixels.shape}")
    for leg in LEGS:
        if legs[leg].pixels.shape != (h, w, 3):
            raise ShapeMismatch(f"leg {leg} shape {legs[leg].pixels.shape} != {(h, w, 3)}")
    body = np.empty((2 * h, 2 * w, 3), dtype=np.uint8)
    body[:h, :w] = legs["LF"].pixels
    body[:h, w:] = legs["RF"].pixels
    body[h:, :w] = legs["LH"].pixels
    body[h:, w:] = legs["RH"].pixels
    return ProprioImage(body, scope="body", signal_kind=lf.signal_kind)


def split_body_pi(body: ProprioImage) -> dict:
    """Inverse of compose_body_pi: recover the four per-leg images."""
    h4, w4, _ = body.pixels.shape
    if h4 % 2 or w4 % 2:
        raise ShapeMismatch(f"body image sides must be even, got {body.pixels.shape}")
    h, w = h4 // 2, w4 // 2
    quadrants = {
        "LF": body.pixels[:h, :w],
        "RF": body.pixels[:h, w:],
        "LH": body.pixels[h:, :w],
        "RH": body.pixels[h:, w:],
    }
    return {
        leg: ProprioImage(q.copy(), scope=leg, signal_kind=body.signal_kind)
        for leg, q in quadrants.items()
    }


def build_signal_group_pi(windows, bounds, cfg: EncoderConfig):
    """Encode one synchronized triplet into three temporal tiles.

    Slope, spike and GAF sub-images are per channel; the cymatic sub-image
    is built once from the triplet's 6-entry deviation descriptor
    (delta_min, delta_max per channel, in channel order) and replicated
    into all three tiles.
    """
    windows = list(windows)
    bounds = list(bounds)
    if len(windows) != 3 or len(bounds) != 3:
        raise ShapeMismatch("signal group needs exactly 3 windows and 3 bounds")

    descriptor = []
    for win, b in zip(windows, bounds):
        dev = compute_deviation(compute_local_range(win, cfg), b)
        descriptor.extend((dev.delta_min, dev.delta_max))
    w = len(windows[0])
    cymatic = encode_cymatic(map_cymatic_params(descriptor), w)

    tiles = []
    for win, b in zip(windows, bounds):
        slope, _ = encode_slope_dynamics(win, cfg)
        spikes, _ = encode_spike_patterns(win, cfg)
        gaf = encode_gaf_polar(win, b, cfg)
        tiles.append(compose_temporal_tile(slope, spikes, gaf, cymatic))
    return tiles
