"""Epsilon-ball geometry, internal coverings, and classical encodings of pure states."""

from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    SeededSampler,
    bloch_to_density,
    bloch_to_pure,
    density_to_bloch,
    fidelity,
    haar_sample,
    pure_to_bloch,
    sample_amplitudes,
    trace_distance,
)
from .balls import (
    BallSpec,
    VolumeEstimate,
    ball_volume_exact,
    ball_volume_mc,
    external_ball_bound,
    f_lower_bound,
    g4_closed_form,
    g4_coefficients,
    g_integral,
)
from .covering import (
    CoverageReport,
    Covering,
    CoveringBounds,
    CoveringSchedule,
    build_internal_covering,
    coverage_verify,
    covering_schedule,
    default_packing_ratio,
    external_covering_lower_bound,
    internal_covering_bounds,
)
from .encoding import (
    OCTAHEDRON_EPSILON,
    BitLengthBounds,
    DetEncoding,
    EncodingResult,
    LabelDistribution,
    MinimaxCheck,
    bit_length_bounds_deterministic,
    bit_length_bounds_probabilistic,
    decode,
    deterministic_encode,
    farthest_from_octahedron,
    octahedron_book,
    octahedron_demo,
    probabilistic_encode,
    rate_bits,
    verify_minimax,
)

__all__ = [
    "BallSpec",
    "BitLengthBounds",
    "BlochVector",
    "CoverageReport",
    "Covering",
    "CoveringBounds",
    "CoveringSchedule",
    "DensityMatrix",
    "DetEncoding",
    "EncodingResult",
    "LabelDistribution",
    "MinimaxCheck",
    "OCTAHEDRON_EPSILON",
    "PureState",
    "SeededSampler",
    "VolumeEstimate",
    "ball_volume_exact",
    "ball_volume_mc",
    "bit_length_bounds_deterministic",
    "bit_length_bounds_probabilistic",
    "bloch_to_density",
    "bloch_to_pure",
    "build_internal_covering",
    "coverage_verify",
    "covering_schedule",
    "decode",
    "default_packing_ratio",
    "density_to_bloch",
    "deterministic_encode",
    "external_ball_bound",
    "external_covering_lower_bound",
    "f_lower_bound",
    "farthest_from_octahedron",
    "fidelity",
    "g4_closed_form",
    "g4_coefficients",
    "g_integral",
    "haar_sample",
    "internal_covering_bounds",
    "octahedron_book",
    "octahedron_demo",
    "probabilistic_encode",
    "pure_to_bloch",
    "rate_bits",
    "sample_amplitudes",
    "trace_distance",
    "verify_minimax",
]
