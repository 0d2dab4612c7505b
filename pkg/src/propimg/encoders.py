"""The four sub-image encoders.

Each encoder turns one window (or one 6-entry deviation descriptor) into a
w x w 8-bit image. All of them are pure functions: identical inputs give
bit-identical pixels, so callers may fan windows out to parallel workers
freely.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import EPSILON, EncoderConfig, GlobalBounds, Window, normalize_global
from .errors import NonFiniteInput, ShapeMismatch, WindowTooShort


class SubImageKind(enum.Enum):
    SLOPE_DYNAMICS = "slope_dynamics"
    SPIKE_PATTERNS = "spike_patterns"
    GAF_POLAR = "gaf_polar"
    CYMATIC = "cymatic"


@dataclass(frozen=True, eq=False)
class SubImage:
    """A w x w single-channel 8-bit image, addressed pixels[row][col]."""

    pixels: np.ndarray
    kind: SubImageKind

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ShapeMismatch(f"sub-image must be square 2-D, got shape {p.shape}")
        if p.dtype != np.uint8:
            raise ShapeMismatch(f"sub-image must be uint8, got {p.dtype}")


@dataclass(frozen=True)
class SlopeFeatures:
    slope_hat: float      # normalized trend, [-1, 1]
    jerk_hat: float       # normalized motion irregularity, [0, 1]
    peak_density: float   # scaled local-maxima ratio, [0, 1]
    ripple_freq: int      # 2..8
    center: tuple         # (c_x, c_y) blob center in pixels
    sigma_g: float        # Gaussian spread, w / 6.25


@dataclass(frozen=True)
class SpikeStats:
    median_x: float
    mad_x: float          # epsilon-floored
    threshold: float      # spike_alpha * mad_x
    median_delta: float
    mad_delta: float      # epsilon-floored
    gated_count: int      # gated entries over the full matrix


@dataclass(frozen=True)
class CymaticParams:
    k_r: float            # radial frequency, [1, 4]
    k_t: float            # angular frequency, [1, 4]
    phi_r: float          # radial phase, [0, 2*pi]
    phi_t: float          # angular phase, [0, 2*pi]
    alpha_mod: float      # secondary-field amplitude, [0, 1]
    blend: float          # primary/secondary mix, [0, 1]

    def __post_init__(self):
        if not (1.0 <= self.k_r <= 4.0 and 1.0 <= self.k_t <= 4.0):
            raise ValueError("frequencies must lie in [1, 4]")
        if not (0.0 <= self.phi_r <= 2 * math.pi and 0.0 <= self.phi_t <= 2 * math.pi):
            raise ValueError("phases must lie in [0, 2*pi]")
        if not (0.0 <= self.alpha_mod <= 1.0 and 0.0 <= self.blend <= 1.0):
            raise ValueError("alpha_mod and blend must lie in [0, 1]")


def _round_half_up_u8(values: np.ndarray) -> np.ndarray:
    # round-half-up tie break; inputs are already inside [0, 255]
    return np.floor(values + 0.5).astype(np.uint8)


def quantize_to_u8(field: np.ndarray, mode: str = "minmax") -> np.ndarray:
    """Quantize a real-valued field to 8-bit intensities.

    minmax: per-image min-max scaling, all zeros when the span degenerates.
    affine_pm1: fixed [-1, 1] -> [0, 255] map, values clipped first.
    """
    field = np.asarray(field, dtype=np.float64)
    if not np.all(np.isfinite(field)):
        raise NonFiniteInput("field contains NaN or Inf")
    if mode == "minmax":
        lo = field.min()
        span = field.max() - lo
        if span < EPSILON:
            return np.zeros(field.shape, dtype=np.uint8)
        return _round_half_up_u8((field - lo) / span * 255.0)
    if mode == "affine_pm1":
        v = np.clip(field, -1.0, 1.0)
        return _round_half_up_u8(255.0 * (v + 1.0) / 2.0)
    raise ValueError(f"unknown quantization mode {mode!r}")


@lru_cache(maxsize=32)
def _pixel_axes(w: int):
    cols = np.arange(w, dtype=np.float64)
    rows = cols[:, None]
    return rows, cols


@lru_cache(maxsize=32)
def _slope_fit_basis(w: int):
    idx = np.arange(w, dtype=np.float64)
    centered = idx - (w - 1) / 2.0
    return centered, float((centered * centered).sum())


@lru_cache(maxsize=32)
def _upper_triangle_mask(w: int):
    mask = np.triu(np.ones((w, w), dtype=bool), k=1)
    mask.flags.writeable = False
    return mask


def _sorted_median(sorted_vals: np.ndarray) -> float:
    # same value as np.median: mean of the two middle order statistics
    n = sorted_vals.size
    mid = n // 2
    if n % 2:
        return float(sorted_vals[mid])
    return float((sorted_vals[mid - 1] + sorted_vals[mid]) / 2.0)


def _median(values: np.ndarray) -> float:
    return _sorted_median(np.sort(values))


def encode_slope_dynamics(window: Window, cfg: EncoderConfig) -> tuple:
    """Gaussian blob with concentric ripples encoding trend, jerk and peaks.

    The blob's horizontal position tracks the normalized least-squares
    slope, the vertical position tracks normalized jerk, and the ripple
    frequency tracks the density of strict local maxima.
    """
    x = window.values
    w = x.size
    if w < 4:
        raise WindowTooShort(f"slope encoder needs w >= 4, got {w}")
    eps = cfg.epsilon

    ic, ss = _slope_fit_basis(w)
    xc = x - x.mean()
    beta = float((ic * xc).sum() / ss)
    sigma_x = math.sqrt(float((xc * xc).sum()) / w)
    slope_hat = min(1.0, max(-1.0, beta / (sigma_x + eps)))

    dx = x[1:] - x[:-1]
    ddx = dx[1:] - dx[:-1]
    jerk = float(np.abs(ddx).sum()) / ddx.size
    dc = dx - dx.mean()
    sigma_dx = math.sqrt(float((dc * dc).sum()) / dx.size)
    jerk_hat = min(1.0, max(0.0, jerk / (sigma_dx + eps)))

    n_peaks = int(((x[1:-1] > x[:-2]) & (x[1:-1] > x[2:])).sum())
    peak_density = float(np.clip(5.0 * n_peaks / w, 0.0, 1.0))
    ripple_freq = 2 + int(math.floor(6.0 * peak_density))

    c_x = int(math.floor((slope_hat + 1.0) / 2.0 * (w - 1)))
    c_y = int(math.floor((1.0 - jerk_hat) * (w - 1)))
    sigma_g = w / 6.25

    rows, cols = _pixel_axes(w)
    r = np.sqrt((cols - c_x) ** 2 + (rows - c_y) ** 2)
    gauss = np.exp(-(r * r) / (2.0 * sigma_g * sigma_g))
    ripple = 0.5 + 0.5 * np.cos(ripple_freq * r / sigma_g)
    pixels = quantize_to_u8(gauss * ripple, "minmax")

    features = SlopeFeatures(slope_hat, jerk_hat, peak_density, ripple_freq, (c_x, c_y), sigma_g)
    return SubImage(pixels, SubImageKind.SLOPE_DYNAMICS), features


def encode_spike_patterns(window: Window, cfg: EncoderConfig) -> tuple:
    """Robust-score image of pairwise differences gated by a MAD threshold.

    Pixels stay mid-gray (128) below the gate; gated entries map their
    robust Z score to dark (strong negative spike) through bright (strong
    positive spike), clipped at three MADs.
    """
    x = window.values
    w = x.size
    if w < 4:
        raise WindowTooShort(f"spike encoder needs w >= 4, got {w}")
    eps = cfg.epsilon

    delta = x[None, :] - x[:, None]  # delta[i, j] = x_j - x_i
    median_x = _median(x)
    mad_x = _median(np.abs(x - median_x)) + eps
    threshold = cfg.spike_alpha * mad_x
    abs_delta = np.abs(delta)
    gate = abs_delta > threshold

    upper = _upper_triangle_mask(w)
    upper_gated = delta[gate & upper]
    if upper_gated.size:
        median_delta = _median(upper_gated)
        mad_delta = max(_median(np.abs(upper_gated - median_delta)), eps)
    else:
        median_delta = 0.0
        mad_delta = eps

    pixels = np.full((w, w), 128, dtype=np.uint8)
    if upper_gated.size:
        z = np.clip((delta[gate] - median_delta) / mad_delta, -3.0, 3.0)
        pixels[gate] = _round_half_up_u8(128.0 + 127.0 * z / 3.0)

    stats = SpikeStats(median_x, mad_x, threshold, median_delta, mad_delta, int(gate.sum()))
    return SubImage(pixels, SubImageKind.SPIKE_PATTERNS), stats


def encode_gaf_polar(window: Window, bounds: GlobalBounds, cfg: EncoderConfig) -> SubImage:
    """Summation Gramian angular field with the trend written on the diagonal.

    Off-diagonal entries are cos(phi_i + phi_j) of the polar angles of the
    globally normalized window; the main diagonal carries the normalized
    signal itself, which disambiguates rising from falling trends.
    """
    x = window.values
    if x.size < 4:
        raise WindowTooShort(f"GAF encoder needs w >= 4, got {x.size}")
    s_g = normalize_global(window, bounds)
    phi = np.arccos(s_g)
    d = np.cos(phi[:, None] + phi[None, :])
    pixels = _round_half_up_u8(255.0 * (d + 1.0) / 2.0)
    diag = _round_half_up_u8(255.0 * (s_g + 1.0) / 2.0)
    np.fill_diagonal(pixels, diag)
    return SubImage(pixels, SubImageKind.GAF_POLAR)


def map_cymatic_params(descriptor) -> CymaticParams:
    """Affine map from a 6-entry deviation descriptor to wave parameters.

    Entries are clipped to [-1, 1] first; order is (k_r, k_t, phi_r, phi_t,
    alpha_mod, blend).
    """
    d = np.asarray(descriptor, dtype=np.float64)
    if d.shape != (6,):
        raise ShapeMismatch(f"descriptor must have 6 entries, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise NonFiniteInput("descriptor contains NaN or Inf")
    u = (np.clip(d, -1.0, 1.0) + 1.0) / 2.0
    return CymaticParams(
        k_r=float(1.0 + 3.0 * u[0]),
        k_t=float(1.0 + 3.0 * u[1]),
        phi_r=float(2.0 * math.pi * u[2]),
        phi_t=float(2.0 * math.pi * u[3]),
        alpha_mod=float(u[4]),
        blend=float(u[5]),
    )


@lru_cache(maxsize=32)
def _cymatic_grid(w: int):
    ax = np.linspace(-1.0, 1.0, w)
    x = ax[None, :]
    y = ax[:, None]
    sq = x * x + y * y
    radius = np.clip(np.sqrt(sq), 0.0, 1.0)
    theta = np.arctan2(y, x)
    outside = sq > 1.0
    return radius, theta, outside


def encode_cymatic(params: CymaticParams, size_w: int) -> SubImage:
    """Standing-wave interference field on the unit disk.

    Two wave components (ring/lobe pattern and a spiral) are blended by the
    descriptor-driven parameters; pixels strictly outside the unit disk are
    masked to 0 and the inside is min-max scaled (mid-gray when flat).
    """
    if size_w < 4:
        raise WindowTooShort(f"cymatic encoder needs w >= 4, got {size_w}")
    radius, theta, outside = _cymatic_grid(size_w)
    c1 = np.sin(params.k_r * radius + params.phi_r) * np.cos(params.k_t * theta + params.phi_t)
    c2 = np.sin(params.k_r * radius - params.k_t * theta)
    field = (1.0 - params.blend) * c1 + params.blend * params.alpha_mod * c2

    inside = ~outside
    vals = field[inside]
    lo = vals.min()
    span = vals.max() - lo
    pixels = np.zeros((size_w, size_w), dtype=np.uint8)
    if span < EPSILON:
        pixels[inside] = 128
    else:
        pixels[inside] = _round_half_up_u8((vals - lo) / span * 255.0)
    return SubImage(pixels, SubImageKind.CYMATIC)
