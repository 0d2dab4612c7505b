"""Proprioceptive image encoding toolkit for quadruped signal streams."""

from .core import (
    Deviation,
    EncoderConfig,
    GlobalBounds,
    LocalRange,
    Morphology,
    Window,
    compute_deviation,
    compute_local_range,
    normalize_global,
)
from .composer import (
    LAYOUT_TAG,
    ProprioImage,
    build_signal_group_pi,
    compose_body_pi,
    compose_leg_pi,
    compose_temporal_tile,
    compose_trunk_pi,
    split_body_pi,
)
from .encoders import (
    CymaticParams,
    SlopeFeatures,
    SpikeStats,
    SubImage,
    SubImageKind,
    encode_cymatic,
    encode_gaf_polar,
    encode_slope_dynamics,
    encode_spike_patterns,
    map_cymatic_params,
    quantize_to_u8,
)

__version__ = "0.1.0"
