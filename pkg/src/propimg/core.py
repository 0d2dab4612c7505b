"""Domain types and normalization shared by all encoders.

A signal channel is described by its datasheet-level global bounds; the
current operating behaviour is captured per sliding window as a local
percentile range, and the offset between the two is expressed as a pair
of dimensionless deviations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBounds, NonFiniteInput, WindowTooShort

# Stability guard used wherever a denominator could collapse to zero.
EPSILON = 1e-8

MIN_WINDOW = 4

LEGS = ("LF", "RF", "LH", "RH")
LEG_JOINTS = ("HAA", "HFE", "KFE")
TRUNK_AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class GlobalBounds:
    """Datasheet-level [min, max] limits of one signal channel."""

    min: float
    max: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise NonFiniteInput(f"global bounds must be finite, got [{self.min}, {self.max}]")
        if not self.max > self.min:
            raise DegenerateBounds(f"global bounds need max > min, got [{self.min}, {self.max}]")

    @property
    def midpoint(self) -> float:
        return (self.max + self.min) / 2.0


@dataclass(frozen=True, eq=False)
class Window:
    """One length-w slice of a scalar signal channel."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise WindowTooShort(f"window must be 1-D, got shape {arr.shape}")
        if arr.size < MIN_WINDOW:
            raise WindowTooShort(f"window needs at least {MIN_WINDOW} samples, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput("window contains NaN or Inf")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class LocalRange:
    """Percentile-based operating range of the current window."""

    min: float
    max: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise NonFiniteInput(f"local range must be finite, got [{self.min}, {self.max}]")
        if self.max < self.min:
            raise DegenerateBounds(f"local range needs max >= min, got [{self.min}, {self.max}]")


@dataclass(frozen=True)
class Deviation:
    """Normalized shift of a local range relative to its global bounds.

    Values are intentionally unclipped here so the raw shift magnitude
    survives for logging; the cymatic parameter mapping clips to [-1, 1].
    """

    delta_min: float
    delta_max: float

    def __post_init__(self):
        if not (np.isfinite(self.delta_min) and np.isfinite(self.delta_max)):
            raise NonFiniteInput("deviation must be finite")


@dataclass(frozen=True)
class Morphology:
    """Fixed quadruped layout: leg order, joint order, trunk axis order."""

    legs: tuple = LEGS
    joints_per_leg: tuple = LEG_JOINTS
    trunk_axes: tuple = TRUNK_AXES

    def __post_init__(self):
        if tuple(self.legs) != LEGS:
            raise ValueError(f"legs must be {LEGS} in order")
        if tuple(self.joints_per_leg) != LEG_JOINTS:
            raise ValueError(f"joints must be {LEG_JOINTS} in order")
        if tuple(self.trunk_axes) != TRUNK_AXES:
            raise ValueError(f"trunk axes must be {TRUNK_AXES} in order")


@dataclass(frozen=True)
class EncoderConfig:
    """Tunables shared by the sub-image encoders.

    spike_alpha scales the MAD gate of the spike encoder: smaller values
    admit subtler transitions, larger ones only strong spikes.
    """

    window_w: int = 10
    epsilon: float = EPSILON
    spike_alpha: float = 3.0
    percentile_lo: float = 0.10
    percentile_hi: float = 0.90
    range_margin: float = 0.05

    def __post_init__(self):
        if self.window_w < MIN_WINDOW:
            raise WindowTooShort(f"window_w must be >= {MIN_WINDOW}, got {self.window_w}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.spike_alpha > 0:
            raise ValueError("spike_alpha must be > 0")
        if not (0 <= self.percentile_lo < self.percentile_hi <= 1):
            raise ValueError("need 0 <= percentile_lo < percentile_hi <= 1")
        if self.range_margin < 0:
            raise ValueError("range_margin must be >= 0")


def normalize_global(window: Window, bounds: GlobalBounds) -> np.ndarray:
    """Map window values into [-1, 1] against the channel's global bounds.

    s -> ((s - max) + (s - min)) / (max - min), clipped afterwards because
    sensors may overshoot their datasheet limits and the GAF arccos needs
    the closed interval.
    """
    x = window.values
    span = bounds.max - bounds.min
    out = ((x - bounds.max) + (x - bounds.min)) / span
    return np.clip(out, -1.0, 1.0)


def _lerp_percentile(sorted_vals: np.ndarray, q: float) -> float:
    pos = q * (sorted_vals.size - 1)
    lo = int(pos)
    frac = pos - lo
    if frac == 0.0:
        return float(sorted_vals[lo])
    return float(sorted_vals[lo] + (sorted_vals[lo + 1] - sorted_vals[lo]) * frac)


def compute_local_range(window: Window, cfg: EncoderConfig) -> LocalRange:
    """Percentile operating range of the window, expanded by a noise margin.

    Uses linear-interpolation percentiles; the margin is a fraction of the
    percentile span added on each side.
    """
    s = np.sort(window.values)
    p_lo = _lerp_percentile(s, cfg.percentile_lo)
    p_hi = _lerp_percentile(s, cfg.percentile_hi)
    margin = cfg.range_margin * (p_hi - p_lo)
    return LocalRange(p_lo - margin, p_hi + margin)


def compute_deviation(local: LocalRange, bounds: GlobalBounds) -> Deviation:
    """How far a local range has drifted from the global midpoint.

    Each endpoint is normalized by its own half-span, so a local range
    equal to the global bounds always maps to (-1, +1).
    """
    mu = bounds.midpoint
    d_min = (local.min - mu) / abs(mu - bounds.min)
    d_max = (local.max - mu) / abs(mu - bounds.max)
    return Deviation(float(d_min), float(d_max))
