"""Synthetic quadruped gait logs with exact contact ground truth.

A kinematic phase model replaces a physics simulator: each leg runs a duty
cycle (stance while phase < duty_factor), joint and foot trajectories are
smooth periodic functions of that phase with stance/swing asymmetry, and
vertical GRF follows a floored bell during stance. Labels come straight
from the generative stance bit and never receive noise. Slippery mode adds
bounded stance jitter plus brief false-lift events where GRF collapses
while the label stays in contact, which is what breaks threshold-based
contact detection on slippery ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LEG_JOINTS, LEGS, TRUNK_AXES
from .errors import EmptyInput, InvalidSpec

GRAVITY = 9.81
ROBOT_MASS_KG = 60.0

PHASE_OFFSETS = {
    "trot": {"LF": 0.0, "RF": 0.5, "LH": 0.5, "RH": 0.0},
    "crawl": {"LF": 0.0, "RF": 0.25, "LH": 0.5, "RH": 0.75},
}

STEP_LENGTH = 0.24
STEP_HEIGHT = 0.08
HAA_CENTER = {"LF": 0.08, "RF": -0.08, "LH": 0.08, "RH": -0.08}
FOOT_Y_CENTER = {"LF": 0.15, "RF": -0.15, "LH": 0.15, "RH": -0.15}
HFE_CENTER, KFE_CENTER = 0.6, -1.2
HAA_AMP, HFE_AMP, KFE_AMP = 0.06, 0.22, 0.30
HFE_LIFT, KFE_LIFT = 0.12, -0.25
GRF_FLOOR = 0.05  # stance bell never drops below this fraction of peak

FALSE_LIFT_COVERAGE = 0.05        # ~5% of slippery stance samples
FALSE_LIFT_DURATION_S = (0.020, 0.040)
STANCE_JITTER = 0.15


@dataclass(frozen=True)
class GaitSpec:
    gait: str = "trot"
    duty_factor: float = 0.5
    period: float = 0.5
    sample_rate: float = 100.0
    duration: float = 60.0
    noise_sigma: float = 0.01       # per-channel std as a fraction of its range
    grf_noise_sigma: float = 0.05   # force estimates are noisier than encoders
    friction_mode: str = "stable"
    seed: int = 0

    def __post_init__(self):
        if self.gait not in PHASE_OFFSETS:
            raise InvalidSpec(f"gait must be one of {sorted(PHASE_OFFSETS)}, got {self.gait!r}")
        if not 0.0 < self.duty_factor < 1.0:
            raise InvalidSpec(f"duty_factor must be in (0, 1), got {self.duty_factor}")
        if self.sample_rate < 100.0:
            raise InvalidSpec(f"sample_rate must be >= 100 Hz, got {self.sample_rate}")
        if self.period <= 0 or self.duration <= 0:
            raise InvalidSpec("period and duration must be positive")
        if self.friction_mode not in ("stable", "slippery"):
            raise InvalidSpec(f"friction_mode must be stable|slippery, got {self.friction_mode!r}")
        if self.noise_sigma < 0 or self.grf_noise_sigma < 0:
            raise InvalidSpec("noise fractions must be >= 0")

    @property
    def n_rows(self) -> int:
        return int(round(self.duration * self.sample_rate))

    @property
    def grf_peak(self) -> float:
        return ROBOT_MASS_KG * GRAVITY / (2.6 * self.duty_factor)


def default_gait_spec(gait: str, **overrides) -> GaitSpec:
    """Spec with the gait's conventional duty factor filled in."""
    duty = {"trot": 0.5, "crawl": 0.75}[gait] if gait in ("trot", "crawl") else 0.5
    overrides.setdefault("duty_factor", duty)
    return GaitSpec(gait=gait, **overrides)


def column_order() -> list:
    cols = ["t"]
    for leg in LEGS:
        cols += [f"q_{leg}_{j}" for j in LEG_JOINTS]
    for leg in LEGS:
        cols += [f"dq_{leg}_{j}" for j in LEG_JOINTS]
    for leg in LEGS:
        cols += [f"foot_{leg}_{a}" for a in TRUNK_AXES]
    for leg in LEGS:
        cols += [f"dfoot_{leg}_{a}" for a in TRUNK_AXES]
    cols += [f"gyro_{a}" for a in TRUNK_AXES]
    cols += [f"acc_{a}" for a in TRUNK_AXES]
    cols += [f"grf_{leg}_Z" for leg in LEGS]
    cols += [f"contact_{leg}" for leg in LEGS]
    return cols


def channel_bounds(spec: GaitSpec) -> dict:
    """Datasheet-style global bounds per signal column, from the model's
    design amplitudes with headroom (never derived from generated data)."""
    p = spec.period
    duty = spec.duty_factor
    w2 = 2.0 * math.pi / p
    bounds = {}
    for leg in LEGS:
        haa_v = HAA_AMP * w2
        hfe_v = HFE_AMP * w2 + abs(HFE_LIFT) * math.pi / ((1 - duty) * p)
        kfe_v = KFE_AMP * w2 + abs(KFE_LIFT) * math.pi / ((1 - duty) * p)
        bounds[f"q_{leg}_HAA"] = _around(HAA_CENTER[leg], HAA_AMP)
        bounds[f"q_{leg}_HFE"] = _around(HFE_CENTER, HFE_AMP + abs(HFE_LIFT))
        bounds[f"q_{leg}_KFE"] = _around(KFE_CENTER, KFE_AMP + abs(KFE_LIFT))
        bounds[f"dq_{leg}_HAA"] = _around(0.0, haa_v)
        bounds[f"dq_{leg}_HFE"] = _around(0.0, hfe_v)
        bounds[f"dq_{leg}_KFE"] = _around(0.0, kfe_v)
        vx = STEP_LENGTH / ((1 - duty) * p)
        vz = STEP_HEIGHT * math.pi / ((1 - duty) * p)
        bounds[f"foot_{leg}_X"] = _around(0.0, 0.5 * STEP_LENGTH)
        bounds[f"foot_{leg}_Y"] = _around(FOOT_Y_CENTER[leg], 0.01)
        bounds[f"foot_{leg}_Z"] = _around(0.5 * STEP_HEIGHT, 0.7 * STEP_HEIGHT)
        bounds[f"dfoot_{leg}_X"] = _around(0.0, vx)
        bounds[f"dfoot_{leg}_Y"] = _around(0.0, 0.02 * math.pi / p)
        bounds[f"dfoot_{leg}_Z"] = _around(0.0, vz)
        bounds[f"grf_{leg}_Z"] = (-0.25 * spec.grf_peak, 1.5 * spec.grf_peak)
    for axis, amp in zip(TRUNK_AXES, (0.20, 0.12, 0.08)):
        bounds[f"gyro_{axis}"] = _around(0.0, amp)
    for axis, amp in zip(TRUNK_AXES, (0.5, 0.4, 1.2)):
        bounds[f"acc_{axis}"] = _around(0.0, amp)
    return bounds


def _around(center: float, amp: float, headroom: float = 1.5):
    return (center - headroom * amp, center + headroom * amp)


def generate_gait(spec: GaitSpec) -> dict:
    """Build the full column dict for one run; deterministic given the seed."""
    n = spec.n_rows
    rng = np.random.default_rng(spec.seed)
    t = np.arange(n, dtype=np.float64) / spec.sample_rate
    p_global = np.mod(t / spec.period, 1.0)
    duty = spec.duty_factor
    cols = {"t": t}

    swing_t = (1.0 - duty) * spec.period
    for leg in LEGS:
        phase = np.mod(p_global + PHASE_OFFSETS[spec.gait][leg], 1.0)
        stance = phase < duty
        s = np.where(stance, phase / duty, 0.0)                 # stance progress
        u = np.where(stance, 0.0, (phase - duty) / (1 - duty))  # swing progress
        lift = np.where(stance, 0.0, np.sin(np.pi * u))
        dlift = np.where(stance, 0.0, np.pi * np.cos(np.pi * u) / swing_t)
        two_pi = 2.0 * np.pi * phase

        cols[f"q_{leg}_HAA"] = HAA_CENTER[leg] + HAA_AMP * np.sin(two_pi)
        cols[f"q_{leg}_HFE"] = HFE_CENTER + HFE_AMP * np.cos(two_pi) + HFE_LIFT * lift
        cols[f"q_{leg}_KFE"] = KFE_CENTER + KFE_AMP * np.sin(two_pi) + KFE_LIFT * lift
        w2 = 2.0 * np.pi / spec.period
        cols[f"dq_{leg}_HAA"] = HAA_AMP * w2 * np.cos(two_pi)
        cols[f"dq_{leg}_HFE"] = -HFE_AMP * w2 * np.sin(two_pi) + HFE_LIFT * dlift
        cols[f"dq_{leg}_KFE"] = KFE_AMP * w2 * np.cos(two_pi) + KFE_LIFT * dlift

        cols[f"foot_{leg}_X"] = np.where(
            stance, STEP_LENGTH * (0.5 - s), STEP_LENGTH * (u - 0.5)
        )
        cols[f"foot_{leg}_Y"] = FOOT_Y_CENTER[leg] + 0.01 * np.sin(two_pi)
        cols[f"foot_{leg}_Z"] = STEP_HEIGHT * lift
        cols[f"dfoot_{leg}_X"] = np.where(
            stance, -STEP_LENGTH / (duty * spec.period), STEP_LENGTH / swing_t
        )
        cols[f"dfoot_{leg}_Y"] = 0.01 * w2 * np.cos(two_pi)
        cols[f"dfoot_{leg}_Z"] = STEP_HEIGHT * dlift

        bell = GRF_FLOOR + (1.0 - GRF_FLOOR) * np.sin(np.pi * s)
        cols[f"grf_{leg}_Z"] = np.where(stance, spec.grf_peak * bell, 0.0)
        cols[f"contact_{leg}"] = stance.astype(np.float64)

    two_pi_g = 2.0 * np.pi * p_global
    for axis, amp, ph in zip(TRUNK_AXES, (0.20, 0.12, 0.08), (0.0, 0.7, 1.9)):
        mult = 2.0 if axis == "Y" else 1.0
        cols[f"gyro_{axis}"] = amp * np.sin(mult * two_pi_g + ph)
    for axis, amp, ph in zip(TRUNK_AXES, (0.5, 0.4, 1.2), (0.3, 2.1, 1.1)):
        mult = 1.0 if axis == "Y" else 2.0
        cols[f"acc_{axis}"] = amp * np.sin(mult * two_pi_g + ph)

    if spec.friction_mode == "slippery":
        _apply_slip(spec, cols, rng)

    bounds = channel_bounds(spec)
    if spec.noise_sigma > 0 or spec.grf_noise_sigma > 0:
        for name in column_order():
            if name == "t" or name.startswith("contact_"):
                continue
            lo, hi = bounds[name]
            frac = spec.grf_noise_sigma if name.startswith("grf_") else spec.noise_sigma
            if frac > 0:
                cols[name] = cols[name] + rng.normal(0.0, frac * (hi - lo), n)
    return cols


def _apply_slip(spec: GaitSpec, cols: dict, rng: np.random.Generator) -> None:
    """Bounded stance jitter plus short false-lift events on each leg."""
    n = spec.n_rows
    mean_event = np.mean(FALSE_LIFT_DURATION_S) * spec.sample_rate
    p_start = FALSE_LIFT_COVERAGE / mean_event
    for leg in LEGS:
        stance = cols[f"contact_{leg}"] > 0.5
        jitter = rng.uniform(-1.0, 1.0, n)
        grf = cols[f"grf_{leg}_Z"]
        grf = np.where(stance, grf * (1.0 + STANCE_JITTER * jitter), grf)
        vel_jitter = rng.uniform(-1.0, 1.0, n)
        cols[f"dfoot_{leg}_X"] = np.where(
            stance,
            cols[f"dfoot_{leg}_X"] * (1.0 + STANCE_JITTER * vel_jitter),
            cols[f"dfoot_{leg}_X"],
        )
        starts = (rng.random(n) < p_start) & stance
        # measured force collapses to around zero (slightly negative readings
        # happen on real force estimates during slip), defeating any threshold
        lifted = rng.uniform(-0.02, 0.005, n) * spec.grf_peak
        for idx in np.flatnonzero(starts):
            dur_s = rng.uniform(*FALSE_LIFT_DURATION_S)
            end = min(n, idx + max(1, int(round(dur_s * spec.sample_rate))))
            span = slice(idx, end)
            keep = stance[span]
            grf[span] = np.where(keep, lifted[span], grf[span])
        cols[f"grf_{leg}_Z"] = grf


def write_gait_csv(path: str, cols: dict) -> int:
    """Write columns in canonical order with deterministic formatting."""
    order = column_order()
    n = len(cols["t"])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(order) + "\n")
        mats = [cols[c] for c in order]
        contact_idx = {i for i, c in enumerate(order) if c.startswith("contact_")}
        for r in range(n):
            fields = [
                ("%d" % int(m[r])) if i in contact_idx else ("%.9g" % m[r])
                for i, m in enumerate(mats)
            ]
            fh.write(",".join(fields) + "\n")
    return n


def build_manifest_doc(spec: GaitSpec, csv_name: str, window: int = 10, stride: int = 1) -> dict:
    """Manifest binding the generated CSV to the six training signal kinds."""
    bounds = channel_bounds(spec)

    def leg_signal(name, prefix, axes):
        return {
            "name": name,
            "scope": "leg",
            "axes": list(axes),
            "channels": [
                {
                    "slot": leg,
                    "axis": axis,
                    "column": f"{prefix}_{leg}_{axis}",
                    "bounds": list(bounds[f"{prefix}_{leg}_{axis}"]),
                }
                for leg in LEGS
                for axis in axes
            ],
        }

    def trunk_signal(name, prefix):
        return {
            "name": name,
            "scope": "trunk",
            "axes": list(TRUNK_AXES),
            "channels": [
                {
                    "slot": "trunk",
                    "axis": axis,
                    "column": f"{prefix}_{axis}",
                    "bounds": list(bounds[f"{prefix}_{axis}"]),
                }
                for axis in TRUNK_AXES
            ],
        }

    return {
        "csv": csv_name,
        "time_column": "t",
        "sample_rate": spec.sample_rate,
        "window": window,
        "stride": stride,
        "labels": {leg: f"contact_{leg}" for leg in LEGS},
        "signals": [
            leg_signal("joint_position", "q", LEG_JOINTS),
            leg_signal("joint_velocity", "dq", LEG_JOINTS),
            leg_signal("foot_position", "foot", TRUNK_AXES),
            leg_signal("foot_velocity", "dfoot", TRUNK_AXES),
            trunk_signal("trunk_angular_velocity", "gyro"),
            trunk_signal("trunk_linear_acceleration", "acc"),
        ],
        "metadata": {
            "generator": "synthetic_gait",
            "gait": spec.gait,
            "friction_mode": spec.friction_mode,
            "duty_factor": spec.duty_factor,
            "period": spec.period,
            "seed": spec.seed,
            "noise_sigma": spec.noise_sigma,
            "grf_noise_sigma": spec.grf_noise_sigma,
        },
    }


def sweep_grf_threshold(cols: dict, candidates=None):
    """Pick the single GRF-Z threshold that best matches the contact labels.

    Returns (best_threshold, {leg: accuracy at best}). Candidates default to
    an even grid from 0 to the observed GRF maximum.
    """
    grf = {leg: np.asarray(cols[f"grf_{leg}_Z"]) for leg in LEGS}
    labels = {leg: np.asarray(cols[f"contact_{leg}"]) > 0.5 for leg in LEGS}
    n = len(next(iter(grf.values())))
    if n == 0:
        raise EmptyInput("no rows to sweep")
    if candidates is None:
        top = max(float(g.max()) for g in grf.values())
        candidates = np.linspace(0.0, top, 101)
    candidates = np.asarray(candidates, dtype=np.float64)
    if candidates.size == 0:
        raise EmptyInput("no candidate thresholds")

    best_th, best_mean, best_legs = None, -1.0, None
    for th in candidates:
        accs = {leg: float(np.mean((grf[leg] > th) == labels[leg])) for leg in LEGS}
        mean_acc = sum(accs.values()) / len(accs)
        if mean_acc > best_mean:
            best_th, best_mean, best_legs = float(th), mean_acc, accs
    return best_th, best_legs
