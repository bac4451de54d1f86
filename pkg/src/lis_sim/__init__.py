"""Uplink simulator for a panel-based large intelligent surface.

Near-field indoor channels, centralized and daisy-chained linear
equalization (MRC, ZF, MMSE), a cycle-calibrated latency model, and the
Monte-Carlo experiments tying spectral efficiency to detection latency.
"""

from .chain import (
    ChainTopology,
    HopRecord,
    fronthaul_latency,
    payload_complex_values,
    run_chain,
)
from .channel import (
    ChannelParams,
    ChannelRealization,
    build_los_matrix,
    derived_seed,
    normalize_scenario_set,
    sample_channel,
)
from .equalize import (
    AggregateState,
    EqualizerKind,
    LocalContribution,
    SingularGramianError,
    absorb,
    equalizer_matrix,
    finalize,
    local_contribution,
    split_panels,
)
from .latency import (
    CycleModel,
    FrameSpec,
    LatencyBreakdown,
    default_cycle_model,
    fit_cycle_model,
    total_latency,
)
from .metrics import (
    SeSummary,
    SweepPoint,
    SweepResult,
    per_user_se,
    per_user_sinr,
    run_sweep,
    spectral_efficiency,
    user_sinr,
)
from .scenario import (
    AntennaArray,
    PanelSpec,
    RoomSpec,
    UePlacement,
    build_wall_layout,
    place_users,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateState",
    "AntennaArray",
    "ChainTopology",
    "ChannelParams",
    "ChannelRealization",
    "CycleModel",
    "EqualizerKind",
    "FrameSpec",
    "HopRecord",
    "LatencyBreakdown",
    "LocalContribution",
    "PanelSpec",
    "RoomSpec",
    "SeSummary",
    "SingularGramianError",
    "SweepPoint",
    "SweepResult",
    "UePlacement",
    "absorb",
    "build_los_matrix",
    "build_wall_layout",
    "default_cycle_model",
    "derived_seed",
    "equalizer_matrix",
    "finalize",
    "fit_cycle_model",
    "fronthaul_latency",
    "local_contribution",
    "normalize_scenario_set",
    "payload_complex_values",
    "per_user_se",
    "per_user_sinr",
    "place_users",
    "run_chain",
    "run_sweep",
    "sample_channel",
    "spectral_efficiency",
    "split_panels",
    "total_latency",
    "user_sinr",
]
