import hashlib

import numpy as np
import pytest

from propimg.errors import EmptyInput, InvalidSpec
from propimg.synthgait import (
    GaitSpec,
    channel_bounds,
    column_order,
    default_gait_spec,
    generate_gait,
    sweep_grf_threshold,
    write_gait_csv,
)

LEGS = ("LF", "RF", "LH", "RH")


def contact_states(cols):
    return (
        (cols["contact_LF"].astype(int) << 3)
        | (cols["contact_RF"].astype(int) << 2)
        | (cols["contact_LH"].astype(int) << 1)
        | cols["contact_RH"].astype(int)
    )


def noiseless(gait="trot", **kw):
    kw.setdefault("duration", 6.0)
    kw.setdefault("sample_rate", 250.0)
    kw.setdefault("noise_sigma", 0.0)
    kw.setdefault("grf_noise_sigma", 0.0)
    kw.setdefault("seed", 11)
    return default_gait_spec(gait, **kw)


class TestSpecValidation:
    def test_rejects_bad_duty(self):
        with pytest.raises(InvalidSpec):
            GaitSpec(duty_factor=0.0)

    def test_rejects_low_rate(self):
        with pytest.raises(InvalidSpec):
            GaitSpec(sample_rate=50.0)

    def test_rejects_unknown_gait(self):
        with pytest.raises(InvalidSpec):
            GaitSpec(gait="pronk")


class TestGeneration:
    def test_row_count(self):
        spec = noiseless(duration=10.0, sample_rate=500.0)
        cols = generate_gait(spec)
        assert len(cols["t"]) == 5000

    def test_trot_diagonal_pairs_only(self):
        cols = generate_gait(noiseless("trot"))
        states = set(contact_states(cols).tolist())
        assert states == {0b1001, 0b0110}

    def test_crawl_three_feet_down(self):
        cols = generate_gait(noiseless("crawl"))
        states = contact_states(cols)
        assert set(states.tolist()) == {0b0111, 0b1011, 0b1101, 0b1110}

    def test_noiseless_grf_zero_in_swing(self):
        cols = generate_gait(noiseless())
        for leg in LEGS:
            swing = cols[f"contact_{leg}"] < 0.5
            stance = ~swing
            assert np.all(cols[f"grf_{leg}_Z"][swing] == 0.0)
            assert np.all(cols[f"grf_{leg}_Z"][stance] > 0.0)

    def test_deterministic_bytes(self, tmp_path):
        spec = default_gait_spec("trot", duration=3.0, seed=42, friction_mode="slippery")
        digests = []
        for name in ("a.csv", "b.csv"):
            p = tmp_path / name
            write_gait_csv(str(p), generate_gait(spec))
            digests.append(hashlib.sha256(p.read_bytes()).hexdigest())
        assert digests[0] == digests[1]

    def test_labels_never_noisy(self):
        spec = default_gait_spec("trot", duration=3.0, noise_sigma=0.2, seed=5)
        cols = generate_gait(spec)
        for leg in LEGS:
            assert set(np.unique(cols[f"contact_{leg}"]).tolist()) <= {0.0, 1.0}

    def test_all_columns_present(self):
        cols = generate_gait(noiseless(duration=2.0))
        assert set(column_order()) == set(cols)
        # 1 time + 12 q + 12 dq + 12 foot + 12 dfoot + 3 gyro + 3 acc + 4 grf + 4 contact
        assert len(column_order()) == 63

    def test_bounds_cover_noiseless_signals(self):
        spec = noiseless(duration=4.0)
        cols = generate_gait(spec)
        bounds = channel_bounds(spec)
        for name, (lo, hi) in bounds.items():
            vals = cols[name]
            assert lo < hi
            assert vals.min() >= lo - 1e-9, name
            assert vals.max() <= hi + 1e-9, name


class TestGrfSweep:
    def test_noiseless_perfect_separation(self):
        cols = generate_gait(noiseless())
        best, accs = sweep_grf_threshold(cols)
        assert all(accs[leg] == 1.0 for leg in LEGS)

    def test_inverted_labels_at_most_half(self):
        # period of 100 samples at duty 0.5 gives an exactly even
        # stance/swing split, making 50% the ceiling under inversion
        cols = generate_gait(noiseless(period=0.4, duration=4.0))
        for leg in LEGS:
            cols[f"contact_{leg}"] = 1.0 - cols[f"contact_{leg}"]
        _, accs = sweep_grf_threshold(cols)
        assert all(accs[leg] <= 0.5 for leg in LEGS)

    def test_slippery_strictly_below_stable_on_same_grid(self):
        stable = generate_gait(noiseless(seed=21))
        slippery = generate_gait(noiseless(seed=21, friction_mode="slippery"))
        top = max(
            max(stable[f"grf_{leg}_Z"].max() for leg in LEGS),
            max(slippery[f"grf_{leg}_Z"].max() for leg in LEGS),
        )
        grid = np.linspace(0.0, top, 101)
        _, acc_stable = sweep_grf_threshold(stable, grid)
        _, acc_slip = sweep_grf_threshold(slippery, grid)
        for leg in LEGS:
            assert acc_slip[leg] < acc_stable[leg]

    def test_empty_input(self):
        cols = {f"grf_{leg}_Z": np.array([]) for leg in LEGS}
        cols.update({f"contact_{leg}": np.array([]) for leg in LEGS})
        with pytest.raises(EmptyInput):
            sweep_grf_threshold(cols)
