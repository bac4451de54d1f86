"""Experiment configuration: JSON file loading, defaults, validation.

Desk-scale settings (small arrays, reduced Monte-Carlo counts) are the
defaults so every experiment finishes in minutes on a laptop; the
--paper-scale switch restores the full published scenario (M=1024, K=128,
panel counts up to 256, 100 x 1000 realizations) at a much larger runtime.
Validation errors name the offending field by its dotted path.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

from .scenario import DEFAULT_PLANE_HEIGHT_M, RoomSpec

EXPERIMENTS = ("latency-breakdown", "sweep-fixed-m", "sweep-fixed-n",
               "chain-trace", "validate")


class ConfigError(ValueError):
    """Bad experiment configuration; the message carries the field path."""


@dataclass(frozen=True)
class ScenarioConfig:
    total_antennas: int = 128
    antennas_per_panel: int = 16
    n_users: int = 16
    # P list for the fixed-M sweep (panels shrink as they multiply) and for
    # the fixed-N sweep (the array grows with P); the desk defaults differ
    # because P=1 is pointless when every point has 16-antenna panels
    panel_counts: tuple[int, ...] = (1, 4, 16, 32)
    fixed_n_panel_counts: tuple[int, ...] = (2, 4, 8, 16, 32)
    snr_db: float = 10.0
    rician_db: float = 5.0
    plane_height_m: float = DEFAULT_PLANE_HEIGHT_M


@dataclass(frozen=True)
class MonteCarloConfig:
    placements: int = 20
    fading_draws: int = 100
    master_seed: int = 1


@dataclass(frozen=True)
class LatencyConfig:
    clock_hz: float = 150e6
    per_hop_latency_us: float = 0.87
    slots_per_frame: int = 7
    ofdm_symbol_us: float = 19.0
    subcarrier_spacing_hz: float = 60e3
    worst_case_wait_symbols: int = 7
    inter_panel_distance_m: float = 0.0
    air_distance_km: float = 0.0


@dataclass(frozen=True)
class BreakdownConfig:
    k_values: tuple[int, ...] = (16, 128)
    panel_count: int = 128


@dataclass(frozen=True)
class ChainTraceConfig:
    kind: str = "zf"
    panel_count: int = 4


@dataclass(frozen=True)
class ExperimentConfig:
    room: RoomSpec = field(default_factory=RoomSpec)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    monte_carlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    latency: LatencyConfig = field(default_factory=LatencyConfig)
    breakdown: BreakdownConfig = field(default_factory=BreakdownConfig)
    chain_trace: ChainTraceConfig = field(default_factory=ChainTraceConfig)
    paper_scale: bool = False
    figures: bool = True
    fuzz_instances: int = 1000

    def to_dict(self) -> dict:
        d = asdict(self)
        d["room"] = {"length_m": self.room.length_m, "width_m": self.room.width_m,
                     "carrier_hz": self.room.carrier_hz,
                     "wavelength_m": self.room.wavelength_m}
        return d


def paper_scale_config(base: ExperimentConfig | None = None) -> ExperimentConfig:
    """The published scenario: M=1024, K=128, panel counts 1..256 by powers
    of two, 10^2 placements x 10^3 fading draws."""
    base = base or ExperimentConfig()
    panel_counts = tuple(2 ** i for i in range(9))  # 1..256
    return replace(
        base,
        scenario=replace(base.scenario, total_antennas=1024, n_users=128,
                         panel_counts=panel_counts,
                         fixed_n_panel_counts=panel_counts),
        monte_carlo=replace(base.monte_carlo, placements=100, fading_draws=1000),
        paper_scale=True,
    )


_SCHEMA = {
    "room": {"length_m": float, "width_m": float, "carrier_hz": float},
    "scenario": {
        "total_antennas": int, "antennas_per_panel": int, "n_users": int,
        "panel_counts": list, "fixed_n_panel_counts": list,
        "snr_db": float, "rician_db": float, "plane_height_m": float,
    },
    "monte_carlo": {"placements": int, "fading_draws": int, "master_seed": int},
    "latency": {
        "clock_hz": float, "per_hop_latency_us": float, "slots_per_frame": int,
        "ofdm_symbol_us": float, "subcarrier_spacing_hz": float,
        "worst_case_wait_symbols": int, "inter_panel_distance_m": float,
        "air_distance_km": float,
    },
    "breakdown": {"k_values": list, "panel_count": int},
    "chain_trace": {"kind": str, "panel_count": int},
    "paper_scale": bool,
    "figures": bool,
    "fuzz_instances": int,
}


def _coerce(value, want, path: str):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if want is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if want is list:
        if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{path}: expected a list of integers, got {value!r}")
        return tuple(value)
    raise AssertionError(f"unhandled schema type {want}")


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a JSON object")
    cfg = ExperimentConfig()
    sections = {
        "room": cfg.room, "scenario": cfg.scenario, "monte_carlo": cfg.monte_carlo,
        "latency": cfg.latency, "breakdown": cfg.breakdown,
        "chain_trace": cfg.chain_trace,
    }
    updates: dict = {}
    for key, value in data.items():
        if key not in _SCHEMA:
            raise ConfigError(f"{key}: unknown field")
        want = _SCHEMA[key]
        if isinstance(want, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{key}: expected an object")
            section_updates = {}
            for sub_key, sub_value in value.items():
                if sub_key not in want:
                    raise ConfigError(f"{key}.{sub_key}: unknown field")
                section_updates[sub_key] = _coerce(sub_value, want[sub_key],
                                                   f"{key}.{sub_key}")
            if key == "room":
                merged = {"length_m": cfg.room.length_m, "width_m": cfg.room.width_m,
                          "carrier_hz": cfg.room.carrier_hz}
                merged.update(section_updates)
                updates[key] = RoomSpec(**merged)
            else:
                updates[key] = replace(sections[key], **section_updates)
        else:
            updates[key] = _coerce(value, want, key)
    return replace(cfg, **updates)


def load_config(path) -> ExperimentConfig:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from None
    return config_from_dict(data)


def validate_for_experiment(cfg: ExperimentConfig, experiment: str) -> None:
    """Cross-field checks before running; raises ConfigError with a path."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(
            f"experiment: {experiment!r} is not one of {', '.join(EXPERIMENTS)}")
    sc = cfg.scenario
    if sc.n_users < 1:
        raise ConfigError("scenario.n_users: must be >= 1")
    for name, counts in (("panel_counts", sc.panel_counts),
                         ("fixed_n_panel_counts", sc.fixed_n_panel_counts)):
        if not counts:
            raise ConfigError(f"scenario.{name}: must be non-empty")
        if any(p < 1 for p in counts):
            raise ConfigError(f"scenario.{name}: entries must be >= 1")
    if experiment == "sweep-fixed-m":
        for p in sc.panel_counts:
            if sc.total_antennas % p != 0:
                raise ConfigError(
                    f"scenario.panel_counts: {p} does not divide"
                    f" total_antennas={sc.total_antennas}")
    if experiment == "sweep-fixed-n" and sc.antennas_per_panel < 1:
        raise ConfigError("scenario.antennas_per_panel: must be >= 1")
    mc = cfg.monte_carlo
    if mc.placements < 1 or mc.fading_draws < 1:
        raise ConfigError("monte_carlo: placements and fading_draws must be >= 1")
    if cfg.latency.clock_hz <= 0:
        raise ConfigError("latency.clock_hz: must be positive")
    if cfg.breakdown.panel_count < 1:
        raise ConfigError("breakdown.panel_count: must be >= 1")
    if cfg.chain_trace.kind.lower() not in ("mrc", "zf", "mmse"):
        raise ConfigError("chain_trace.kind: must be one of mrc, zf, mmse")
