"""Daisy-chain aggregation across panels with per-hop transfer accounting.

Panels are visited in chain order: the first emits its local contribution,
every later panel absorbs the incoming aggregate and forwards it, and the
last one finalizes the equalization. Messages really are serialized and
re-parsed at every hop (the byte format below), so payload sizes come from
counting what went over the wire, and the fold can later be swapped for a
real transport without touching the math.

Wire format, all little-endian: header <u32 K, u8 kind, u32 panels_absorbed>,
then K complex doubles (interleaved re/im) for the matched-filter sum, then,
for ZF/MMSE, the K(K+1)/2 upper-triangle entries of the Hermitian Gramian
sum in row-major order.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .equalize import (
    AggregateState,
    EqualizerKind,
    absorb,
    finalize,
    local_contribution,
)

DEFAULT_HOP_LATENCY_US = 0.87
CABLE_US_PER_KM = 5.6

_HEADER = struct.Struct("<IBI")
_KIND_CODE = {EqualizerKind.MRC: 0, EqualizerKind.ZF: 1, EqualizerKind.MMSE: 2}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}

BYTES_PER_COMPLEX = 16


def payload_complex_values(kind: EqualizerKind, n_users: int) -> int:
    """Complex values per aggregation message: K for MRC, K + K(K+1)/2 with a
    Hermitian-packed Gramian for ZF/MMSE."""
    k = n_users
    if kind is EqualizerKind.MRC:
        return k
    return k + k * (k + 1) // 2


def pack_message(state: AggregateState, kind: EqualizerKind) -> bytes:
    k = state.n_users
    parts = [_HEADER.pack(k, _KIND_CODE[kind], state.panels_absorbed)]
    parts.append(np.ascontiguousarray(state.z_mrc_sum, dtype="<c16").tobytes())
    if kind.needs_gramian:
        iu, ju = np.triu_indices(k)
        parts.append(np.ascontiguousarray(state.gramian_sum[iu, ju], dtype="<c16").tobytes())
    return b"".join(parts)


def unpack_message(data: bytes) -> tuple[AggregateState, EqualizerKind]:
    k, code, absorbed = _HEADER.unpack_from(data)
    kind = _CODE_KIND[code]
    expected = _HEADER.size + payload_complex_values(kind, k) * BYTES_PER_COMPLEX
    if len(data) != expected:
        raise ValueError(f"message of {len(data)} bytes, expected {expected}")
    vals = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    z = vals[:k].astype(np.complex128)
    gram = None
    if kind.needs_gramian:
        gram = np.zeros((k, k), dtype=np.complex128)
        iu, ju = np.triu_indices(k)
        gram[iu, ju] = vals[k:]
        lower = ju != iu
        gram[ju[lower], iu[lower]] = np.conj(vals[k:][lower])
    return AggregateState(z_mrc_sum=z, gramian_sum=gram, panels_absorbed=absorbed), kind


@dataclass(frozen=True)
class ChainTopology:
    """Panel visit order plus per-hop cost. inter_panel_distance_m enables the
    optional cable propagation term (off at the default of zero)."""

    panel_order: tuple[int, ...]
    per_hop_latency_us: float = DEFAULT_HOP_LATENCY_US
    inter_panel_distance_m: float = 0.0

    def __post_init__(self):
        if len(self.panel_order) < 1:
            raise ValueError("chain needs at least one panel")
        if sorted(self.panel_order) != list(range(len(self.panel_order))):
            raise ValueError("panel_order must be a permutation of 0..P-1")
        if self.per_hop_latency_us < 0:
            raise ValueError("per-hop latency cannot be negative")
        if self.inter_panel_distance_m < 0:
            raise ValueError("inter-panel distance cannot be negative")

    @property
    def hop_count(self) -> int:
        return len(self.panel_order) - 1

    @property
    def hop_cost_us(self) -> float:
        return self.per_hop_latency_us + CABLE_US_PER_KM * self.inter_panel_distance_m / 1000.0

    @classmethod
    def natural(cls, panel_count: int, **kwargs) -> "ChainTopology":
        return cls(panel_order=tuple(range(panel_count)), **kwargs)


@dataclass(frozen=True)
class HopRecord:
    from_panel: int
    to_panel: int
    payload_complex_values: int
    cumulative_latency_us: float

    @property
    def payload_bytes(self) -> int:
        return self.payload_complex_values * BYTES_PER_COMPLEX


def fronthaul_latency(topology: ChainTopology) -> float:
    """Total interconnect latency in microseconds: hop cost times P-1."""
    return topology.hop_cost_us * topology.hop_count


def run_chain(
    topology: ChainTopology,
    panel_inputs,
    kind: EqualizerKind,
    noise_power: float,
) -> tuple[np.ndarray, list[HopRecord]]:
    """Sequentially aggregate the panel inputs along the chain.

    panel_inputs[p] = (H_p, y_p), indexed by panel id; the chain visits them
    in topology.panel_order. Returns the equalized K-vector (identical to the
    centralized result up to floating point) and one HopRecord per link.
    """
    panel_inputs = list(panel_inputs)
    if not panel_inputs:
        raise ValueError("chain needs at least one panel input")
    if len(panel_inputs) != len(topology.panel_order):
        raise ValueError(
            f"{len(panel_inputs)} panel inputs for a chain of {len(topology.panel_order)}"
        )
    need_gramian = kind.needs_gramian
    n_users = panel_inputs[0][0].shape[1]

    state = AggregateState.empty(n_users, with_gramian=need_gramian)
    hops: list[HopRecord] = []
    for pos, panel_id in enumerate(topology.panel_order):
        h_p, y_p = panel_inputs[panel_id]
        state = absorb(state, local_contribution(h_p, y_p, need_gramian, panel_id=panel_id))
        if pos < topology.hop_count:
            wire = pack_message(state, kind)
            hops.append(HopRecord(
                from_panel=panel_id,
                to_panel=topology.panel_order[pos + 1],
                payload_complex_values=(len(wire) - _HEADER.size) // BYTES_PER_COMPLEX,
                cumulative_latency_us=(pos + 1) * topology.hop_cost_us,
            ))
            state, _ = unpack_message(wire)
    return finalize(state, kind, noise_power), hops


def write_hops_csv(hops, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["hop_index", "from_panel", "to_panel", "payload_bytes",
                    "cumulative_latency_us"])
        for i, hop in enumerate(hops):
            w.writerow([i, hop.from_panel, hop.to_panel, hop.payload_bytes,
                        repr(hop.cumulative_latency_us)])
