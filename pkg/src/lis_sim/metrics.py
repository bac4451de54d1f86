"""Per-user SINR / spectral efficiency and Monte-Carlo sweep aggregation.

A sweep compares several panel deployments under one shared SNR
normalization: user placements and fading seeds are common random numbers
across deployments and equalizer kinds, so ordering claims (e.g. MMSE at
least as good as ZF) hold draw by draw and not only on average.
"""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelParams,
    build_los_matrix,
    derived_seed,
    normalize_scenario_set,
    sample_channel,
)
from .equalize import EqualizerKind, SingularGramianError, equalizer_matrix
from .scenario import (
    DEFAULT_PLANE_HEIGHT_M,
    RoomSpec,
    build_wall_layout,
    place_users,
)

log = logging.getLogger(__name__)

THREADS_ENV_VAR = "LIS_SIM_THREADS"


def user_sinr(w_row_k: np.ndarray, h: np.ndarray, k: int, noise_power: float) -> float:
    """Post-equalization SINR of user k for one equalizer row.

    |w h_k|^2 over the other users' leakage plus the noise picked up by the
    row. A zero row yields SINR 0; a zero denominator with signal present
    yields inf (noiseless interference-free reception).
    """
    a = w_row_k @ h
    sig = float(np.abs(a[k]) ** 2)
    interference = float(np.sum(np.abs(a) ** 2) - np.abs(a[k]) ** 2)
    noise = noise_power * float(np.real(np.vdot(w_row_k, w_row_k)))
    denom = interference + noise
    if denom == 0.0:
        return float("inf") if sig > 0.0 else 0.0
    return sig / denom


def per_user_sinr(w: np.ndarray, h: np.ndarray, noise_power: float) -> np.ndarray:
    """All K SINRs at once for an equalization matrix W (K x M)."""
    a = w @ h
    sig = np.abs(np.diag(a)) ** 2
    interference = np.sum(np.abs(a) ** 2, axis=1) - sig
    noise = noise_power * np.sum(np.abs(w) ** 2, axis=1)
    denom = interference + noise
    out = np.where(denom > 0, sig / np.where(denom > 0, denom, 1.0), 0.0)
    out = np.where((denom == 0) & (sig > 0), np.inf, out)
    return out


def spectral_efficiency(sinr) -> np.ndarray:
    """Shannon mapping log2(1 + SINR), bits/s/Hz."""
    return np.log2(1.0 + np.asarray(sinr, dtype=float))


def per_user_se(h: np.ndarray, kind: EqualizerKind, noise_power: float) -> np.ndarray:
    """Per-user SE for one channel draw, recomputing the equalizer on it."""
    w = equalizer_matrix(kind, h, noise_power)
    return spectral_efficiency(per_user_sinr(w, h, noise_power))


@dataclass(frozen=True)
class SeSample:
    per_user_se: np.ndarray
    realization_id: int = 0
    placement_id: int = 0


@dataclass(frozen=True)
class SeSummary:
    mean_user_se: float
    percentile_se: dict
    n_placements: int
    n_fading_draws: int
    singular_draws: int = 0


@dataclass(frozen=True)
class SweepPoint:
    """One deployment in a sweep: P panels holding M antennas in total."""

    label: str
    panel_count: int
    total_antennas: int

    @property
    def antennas_per_panel(self) -> int:
        return self.total_antennas // self.panel_count


@dataclass(frozen=True)
class SweepResult:
    beta: float
    summaries: dict = field(default_factory=dict)  # {label: {kind: SeSummary}}
    arrays: dict = field(default_factory=dict)     # {label: AntennaArray}


def _max_workers() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
        return 1


def _placement_samples(los, beta, kinds, params, placement_id, n_fading, master_seed):
    """SE samples for every fading draw of one placement of one point.

    Returns ({kind: list of per-user SE vectors}, {kind: singular count}).
    """
    se_by_kind = {kind: [] for kind in kinds}
    singular = {kind: 0 for kind in kinds}
    for j in range(n_fading):
        seed = derived_seed(master_seed, 1, placement_id, j)
        h = beta * sample_channel(los, params, rng_seed=seed).h
        for kind in kinds:
            try:
                se_by_kind[kind].append(per_user_se(h, kind, params.noise_power))
            except SingularGramianError:
                singular[kind] += 1
                log.warning(
                    "singular draw excluded: kind=%s placement=%d fading=%d",
                    kind.value, placement_id, j,
                )
    return se_by_kind, singular


def run_sweep(
    room: RoomSpec,
    points,
    n_users: int,
    kinds,
    params: ChannelParams,
    n_placements: int,
    n_fading: int,
    master_seed: int,
    plane_height_m: float = DEFAULT_PLANE_HEIGHT_M,
    percentiles=(5, 50),
) -> SweepResult:
    """Monte-Carlo SE evaluation over placements x fading for each point.

    One normalization constant is computed from all LoS matrices of the whole
    compared set before any SE evaluation. Placement p uses the derived seed
    (master, 0, p) and fading draw j of placement p uses (master, 1, p, j),
    shared across points and kinds. Aggregation runs in sorted placement
    order regardless of the worker count, so summaries are reproducible
    bit for bit.
    """
    points = list(points)
    kinds = list(kinds)
    arrays = {
        pt.label: build_wall_layout(room, pt.total_antennas, pt.panel_count,
                                    plane_height_m)
        for pt in points
    }
    placements = [
        place_users(room, n_users, plane_height_m, rng_seed=derived_seed(master_seed, 0, i))
        for i in range(n_placements)
    ]
    los = {
        pt.label: [build_los_matrix(arrays[pt.label], ues, room.wavelength_m)
                   for ues in placements]
        for pt in points
    }
    beta = normalize_scenario_set(
        [mat for per_point in los.values() for mat in per_point], params
    )

    summaries: dict = {}
    workers = _max_workers()
    for pt in points:
        per_kind_samples = {kind: [] for kind in kinds}
        per_kind_singular = {kind: 0 for kind in kinds}

        def job(i, label=pt.label):
            return _placement_samples(los[label][i], beta, kinds, params, i,
                                      n_fading, master_seed)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(job, range(n_placements)))
        else:
            results = [job(i) for i in range(n_placements)]

        for se_by_kind, singular in results:  # sorted placement order
            for kind in kinds:
                per_kind_samples[kind].extend(se_by_kind[kind])
                per_kind_singular[kind] += singular[kind]

        summaries[pt.label] = {}
        for kind in kinds:
            pooled = (np.concatenate(per_kind_samples[kind])
                      if per_kind_samples[kind] else np.array([]))
            if pooled.size == 0:
                raise SingularGramianError(
                    f"every draw was singular for {kind.value} at {pt.label}"
                )
            summaries[pt.label][kind] = SeSummary(
                mean_user_se=float(np.mean(pooled)),
                percentile_se={p: float(np.percentile(pooled, p)) for p in percentiles},
                n_placements=n_placements,
                n_fading_draws=n_fading,
                singular_draws=per_kind_singular[kind],
            )
    return SweepResult(beta=beta, summaries=summaries, arrays=arrays)


SWEEP_CSV_HEADER = ["label", "p", "n", "m", "k", "kind", "mean_se", "p5_se",
                    "p50_se", "n_samples", "singular_draws"]


def sweep_csv_rows(result: SweepResult, points, n_users: int, kinds) -> list:
    rows = []
    for pt in points:
        for kind in kinds:
            s = result.summaries[pt.label][kind]
            n_samples = (s.n_placements * s.n_fading_draws - s.singular_draws) * n_users
            rows.append([
                pt.label, pt.panel_count, pt.antennas_per_panel,
                pt.total_antennas, n_users, kind.value,
                repr(s.mean_user_se),
                repr(s.percentile_se.get(5)),
                repr(s.percentile_se.get(50)),
                n_samples, s.singular_draws,
            ])
    return rows


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SWEEP_CSV_HEADER)
        w.writerows(rows)
