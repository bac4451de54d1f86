"""Hardware-calibrated physical-layer latency model.

Total detection latency = frame wait + local panel processing (front-end plus
the per-panel math) + fronthaul aggregation + central solve. The per-op cycle
counts come from a vector-processor implementation measured at N=16 antennas
per panel with K=16 and K=128 users; each operation is modeled as affine in
its complexity order (fixed overhead plus cycles per complexity unit), which
interpolates both measured columns exactly. Predictions at other N ride on
the measured complexity orders and are extrapolations.

Optional propagation terms (air, and cable via the chain topology) exist but
default to zero; indoor distances make them negligible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

from .chain import ChainTopology, fronthaul_latency
from .equalize import EqualizerKind

ASIP_CLOCK_HZ = 150e6
FRONTEND_US = 25.0
MEASURED_N = 16
AIR_US_PER_KM = 3.3

# measured cycle counts at N=16 for K=16 and K=128, and each op's complexity order
CYCLE_ANCHORS = {
    "chan_est": {16: 83, 128: 531},
    "gramian": {16: 946, 128: 58_000},
    "gramian_inv": {16: 1_817, 128: 890_000},
    "mrc_combine": {16: 81, 128: 460},
    "zf_multiply": {16: 81, 128: 3_300},
}

COMPLEXITY = {
    "chan_est": lambda n, k: k * n,
    "gramian": lambda n, k: k * k * n,
    "gramian_inv": lambda n, k: k ** 3,
    "mrc_combine": lambda n, k: k * n,
    "zf_multiply": lambda n, k: k * k,
}

OPS = tuple(COMPLEXITY)


def default_anchors(n: int = MEASURED_N) -> dict:
    """Anchor tuples {op: [(n, k, cycles), (n, k, cycles)]} from the measured table."""
    return {
        op: [(n, k, cycles) for k, cycles in sorted(points.items())]
        for op, points in CYCLE_ANCHORS.items()
    }


@dataclass(frozen=True)
class CycleModel:
    """Affine cycle predictors a_op + b_op * complexity_op(N, K), one per op.

    Coefficients are exact rationals so the model reproduces its anchors to
    the integer.
    """

    coefficients: dict
    clock_hz: float = ASIP_CLOCK_HZ
    measured_n: int = MEASURED_N

    def cycles(self, op: str, n: int, k: int) -> float:
        a, b = self.coefficients[op]
        return float(a + b * COMPLEXITY[op](n, k))

    def op_latency_us(self, op: str, n: int, k: int) -> float:
        return self.cycles(op, n, k) / self.clock_hz * 1e6

    def is_extrapolated(self, n: int) -> bool:
        """True when N differs from the measured panel size."""
        return n != self.measured_n

    def coefficients_as_floats(self) -> dict:
        return {op: {"fixed_cycles": float(a), "cycles_per_unit": float(b)}
                for op, (a, b) in self.coefficients.items()}


def fit_cycle_model(anchors: dict, clock_hz: float = ASIP_CLOCK_HZ) -> CycleModel:
    """Two-point affine fit per operation.

    anchors: {op: [(n1, k1, cycles1), (n2, k2, cycles2)]}. The two points must
    sit at distinct complexity values and the fitted slope must be positive.
    """
    coeffs = {}
    measured_n = None
    for op in OPS:
        if op not in anchors or len(anchors[op]) != 2:
            raise ValueError(f"need exactly two anchors for {op!r}")
        (n1, k1, c1), (n2, k2, c2) = anchors[op]
        x1 = COMPLEXITY[op](n1, k1)
        x2 = COMPLEXITY[op](n2, k2)
        if x1 == x2:
            raise ValueError(f"anchors for {op!r} share the complexity value {x1}")
        b = Fraction(c2 - c1, x2 - x1)
        if b <= 0:
            raise ValueError(f"non-positive fitted slope {float(b):g} for {op!r}")
        a = Fraction(c1) - b * x1
        coeffs[op] = (a, b)
        measured_n = n1
    return CycleModel(coefficients=coeffs, clock_hz=clock_hz, measured_n=measured_n)


def default_cycle_model(clock_hz: float = ASIP_CLOCK_HZ) -> CycleModel:
    return fit_cycle_model(default_anchors(), clock_hz=clock_hz)


@dataclass(frozen=True)
class FrameSpec:
    """TDD frame timing; the worst-case wait is a whole-symbol count."""

    slots_per_frame: int = 7
    ofdm_symbol_us: float = 19.0
    subcarrier_spacing_hz: float = 60e3
    worst_case_wait_symbols: int = 7

    def __post_init__(self):
        if self.ofdm_symbol_us < 0 or self.worst_case_wait_symbols < 0:
            raise ValueError("frame timing values cannot be negative")


def wait_latency(frame: FrameSpec) -> float:
    """Worst-case wait before the next uplink data slot, in microseconds."""
    return frame.worst_case_wait_symbols * frame.ofdm_symbol_us


def lpu_latency(model: CycleModel, n: int, k: int, kind: EqualizerKind) -> tuple[float, float]:
    """(front-end us, local math us) for one panel.

    The local math serializes channel estimation, the local Gramian (ZF/MMSE
    only, since it must be shipped over the fronthaul), and the local
    matched-filter combine.
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    cycles = model.cycles("chan_est", n, k)
    if kind.needs_gramian:
        cycles += model.cycles("gramian", n, k)
    cycles += model.cycles("mrc_combine", n, k)
    return FRONTEND_US, cycles / model.clock_hz * 1e6


def cpu_latency(model: CycleModel, k: int, kind: EqualizerKind) -> float:
    """Central solve cost: zero for MRC; Gramian inversion plus the final
    multiply for ZF, and the same for MMSE (the diagonal loading is charged
    at zero cycles)."""
    if k < 1:
        raise ValueError("need k >= 1")
    if kind is EqualizerKind.MRC:
        return 0.0
    cycles = model.cycles("gramian_inv", model.measured_n, k)
    cycles += model.cycles("zf_multiply", model.measured_n, k)
    return cycles / model.clock_hz * 1e6


@dataclass(frozen=True)
class LatencyBreakdown:
    wait_us: float
    lpu_frontend_us: float
    lpu_local_us: float
    fronthaul_us: float
    cpu_us: float
    air_us: float = 0.0

    @property
    def total_us(self) -> float:
        return (self.wait_us + self.lpu_frontend_us + self.lpu_local_us
                + self.fronthaul_us + self.cpu_us + self.air_us)

    def components(self) -> dict:
        return {
            "wait_us": self.wait_us,
            "frontend_us": self.lpu_frontend_us,
            "local_us": self.lpu_local_us,
            "fronthaul_us": self.fronthaul_us,
            "cpu_us": self.cpu_us,
            "air_us": self.air_us,
        }


def total_latency(
    frame: FrameSpec,
    model: CycleModel,
    n: int,
    k: int,
    p: int,
    kind: EqualizerKind,
    topology: ChainTopology | None = None,
    air_distance_km: float = 0.0,
) -> LatencyBreakdown:
    """Assemble the full detection latency for an (N, K, P) deployment.

    A topology may be passed to reuse its hop cost and cable term; otherwise a
    natural P-panel chain at the default hop latency is assumed. The air
    propagation term stays off unless a distance is given.
    """
    if topology is None:
        topology = ChainTopology.natural(p)
    elif len(topology.panel_order) != p:
        raise ValueError(
            f"topology spans {len(topology.panel_order)} panels, expected {p}"
        )
    frontend_us, local_us = lpu_latency(model, n, k, kind)
    return LatencyBreakdown(
        wait_us=wait_latency(frame),
        lpu_frontend_us=frontend_us,
        lpu_local_us=local_us,
        fronthaul_us=fronthaul_latency(topology),
        cpu_us=cpu_latency(model, k, kind),
        air_us=AIR_US_PER_KM * air_distance_km,
    )


BREAKDOWN_CSV_HEADER = ["kind", "n", "k", "p", "wait_us", "frontend_us",
                        "local_us", "fronthaul_us", "cpu_us", "air_us",
                        "total_us"]


def breakdown_csv_row(kind: EqualizerKind, n: int, k: int, p: int,
                      breakdown: LatencyBreakdown) -> list:
    c = breakdown.components()
    return [kind.value, n, k, p,
            repr(c["wait_us"]), repr(c["frontend_us"]), repr(c["local_us"]),
            repr(c["fronthaul_us"]), repr(c["cpu_us"]), repr(c["air_us"]),
            repr(breakdown.total_us)]


def write_breakdowns_csv(rows, path) -> None:
    """rows: iterable of (kind, n, k, p, LatencyBreakdown)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(BREAKDOWN_CSV_HEADER)
        for kind, n, k, p, breakdown in rows:
            w.writerow(breakdown_csv_row(kind, n, k, p, breakdown))
