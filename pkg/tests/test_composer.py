import numpy as np
import pytest

from propimg.composer import (
    LAYOUT_TAG,
    ProprioImage,
    build_signal_group_pi,
    compose_body_pi,
    compose_leg_pi,
    compose_temporal_tile,
    compose_trunk_pi,
    split_body_pi,
)
from propimg.core import EncoderConfig, GlobalBounds, Window
from propimg.encoders import SubImage, SubImageKind
from propimg.errors import MissingLeg, ShapeMismatch

CFG = EncoderConfig()


def const_sub(value, w, kind=SubImageKind.SLOPE_DYNAMICS):
    return SubImage(np.full((w, w), value, dtype=np.uint8), kind)


def rand_leg_pi(rng, w, leg, kind="joint_position"):
    return ProprioImage(rng.integers(0, 256, (2 * w, 2 * w, 3), dtype=np.uint8), leg, kind)


class TestTemporalTile:
    def test_quadrant_means(self):
        tile = compose_temporal_tile(
            const_sub(10, 4), const_sub(20, 4), const_sub(30, 4), const_sub(40, 4)
        )
        assert tile.shape == (8, 8)
        assert tile[:4, :4].mean() == 10
        assert tile[:4, 4:].mean() == 20
        assert tile[4:, :4].mean() == 30
        assert tile[4:, 4:].mean() == 40

    def test_w10_tile_shape(self):
        tile = compose_temporal_tile(*(const_sub(0, 10) for _ in range(4)))
        assert tile.shape == (20, 20)

    def test_crop_recovers_inputs(self):
        rng = np.random.default_rng(2)
        subs = [SubImage(rng.integers(0, 256, (6, 6), dtype=np.uint8), SubImageKind.CYMATIC) for _ in range(4)]
        tile = compose_temporal_tile(*subs)
        assert np.array_equal(tile[:6, :6], subs[0].pixels)
        assert np.array_equal(tile[:6, 6:], subs[1].pixels)
        assert np.array_equal(tile[6:, :6], subs[2].pixels)
        assert np.array_equal(tile[6:, 6:], subs[3].pixels)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            compose_temporal_tile(const_sub(0, 4), const_sub(0, 6), const_sub(0, 4), const_sub(0, 4))


class TestLegAndTrunk:
    def test_channel_stacking(self):
        tiles = [np.full((8, 8), v, dtype=np.uint8) for v in (0, 128, 255)]
        pi = compose_leg_pi(tiles, "LF")
        assert pi.pixels.shape == (8, 8, 3)
        assert np.all(pi.pixels[..., 0] == 0)
        assert np.all(pi.pixels[..., 1] == 128)
        assert np.all(pi.pixels[..., 2] == 255)
        assert pi.scope == "LF"

    def test_w10_leg_shape(self):
        tiles = [np.zeros((20, 20), dtype=np.uint8)] * 3
        assert compose_leg_pi(tiles, "RH").pixels.shape == (20, 20, 3)

    def test_channel_extraction_roundtrip(self):
        rng = np.random.default_rng(4)
        tiles = [rng.integers(0, 256, (8, 8), dtype=np.uint8) for _ in range(3)]
        pi = compose_leg_pi(tiles, "LH")
        for c in range(3):
            assert np.array_equal(pi.pixels[..., c], tiles[c])

    def test_trunk_stacking(self):
        tiles = [np.full((8, 8), v, dtype=np.uint8) for v in (1, 2, 3)]
        pi = compose_trunk_pi(tiles, "angular_velocity")
        assert pi.pixels.shape == (8, 8, 3)
        assert tuple(pi.pixels[0, 0]) == (1, 2, 3)
        assert pi.scope == "trunk"
        assert pi.signal_kind == "angular_velocity"

    def test_wrong_count(self):
        with pytest.raises(ShapeMismatch):
            compose_leg_pi([np.zeros((8, 8), dtype=np.uint8)] * 2, "LF")


class TestBody:
    def test_quadrant_layout(self):
        w = 5
        legs = {}
        for v, leg in zip((10, 20, 30, 40), ("LF", "RF", "LH", "RH")):
            legs[leg] = ProprioImage(np.full((2 * w, 2 * w, 3), v, dtype=np.uint8), leg, "torque")
        body = compose_body_pi(legs)
        assert body.pixels.shape == (4 * w, 4 * w, 3)
        assert body.pixels[0, 0, 0] == 10
        assert body.pixels[0, -1, 0] == 20
        assert body.pixels[-1, 0, 0] == 30
        assert body.pixels[-1, -1, 0] == 40

    def test_w10_body_shape(self):
        rng = np.random.default_rng(6)
        legs = {leg: rand_leg_pi(rng, 10, leg) for leg in ("LF", "RF", "LH", "RH")}
        assert compose_body_pi(legs).pixels.shape == (40, 40, 3)

    def test_split_roundtrip(self):
        rng = np.random.default_rng(8)
        legs = {leg: rand_leg_pi(rng, 7, leg) for leg in ("LF", "RF", "LH", "RH")}
        back = split_body_pi(compose_body_pi(legs))
        for leg in ("LF", "RF", "LH", "RH"):
            assert np.array_equal(back[leg].pixels, legs[leg].pixels)
            assert back[leg].scope == leg

    def test_rf_quadrant_definition(self):
        rng = np.random.default_rng(9)
        legs = {leg: rand_leg_pi(rng, 10, leg) for leg in ("LF", "RF", "LH", "RH")}
        body = compose_body_pi(legs)
        assert np.array_equal(body.pixels[:20, 20:], legs["RF"].pixels)

    def test_missing_leg(self):
        rng = np.random.default_rng(10)
        legs = {leg: rand_leg_pi(rng, 4, leg) for leg in ("LF", "RF", "LH")}
        with pytest.raises(MissingLeg):
            compose_body_pi(legs)

    def test_leg_permutation_equivariance(self):
        rng = np.random.default_rng(12)
        legs = {leg: rand_leg_pi(rng, 4, leg) for leg in ("LF", "RF", "LH", "RH")}
        swapped = dict(legs)
        swapped["LF"], swapped["RH"] = legs["RH"], legs["LF"]
        a = compose_body_pi(legs).pixels
        b = compose_body_pi(swapped).pixels
        assert np.array_equal(b[:8, :8], a[8:, 8:])
        assert np.array_equal(b[8:, 8:], a[:8, :8])
        assert np.array_equal(b[:8, 8:], a[:8, 8:])


class TestSignalGroup:
    BOUNDS = [GlobalBounds(-5.0, 5.0)] * 3

    def test_identical_windows_identical_tiles(self):
        w = Window(np.linspace(-1, 1, 10))
        tiles = build_signal_group_pi([w, w, w], self.BOUNDS, CFG)
        assert len(tiles) == 3
        assert np.array_equal(tiles[0], tiles[1])
        assert np.array_equal(tiles[1], tiles[2])

    def test_tile_shape(self):
        rng = np.random.default_rng(14)
        wins = [Window(rng.normal(0, 1, 10)) for _ in range(3)]
        tiles = build_signal_group_pi(wins, self.BOUNDS, CFG)
        assert all(t.shape == (20, 20) for t in tiles)

    def test_cymatic_quadrant_shared(self):
        rng = np.random.default_rng(16)
        wins = [Window(rng.normal(0, 1, 10)) for _ in range(3)]
        tiles = build_signal_group_pi(wins, self.BOUNDS, CFG)
        cym = [t[10:, 10:] for t in tiles]
        assert np.array_equal(cym[0], cym[1])
        assert np.array_equal(cym[1], cym[2])
        # the per-channel quadrants generally differ
        assert not np.array_equal(tiles[0][:10, :10], tiles[1][:10, :10])


def test_layout_tag_is_stable():
    assert LAYOUT_TAG == "SLSPGFCY-LFRFLHR"
    assert len(LAYOUT_TAG) == 16
