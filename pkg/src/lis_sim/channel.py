"""Near-field line-of-sight steering and Rician channel realizations.

Every antenna-user link is evaluated with the exact spherical propagation
model (per-antenna distance and incidence angle, no planar-wave shortcut).
Only the component of the incident power perpendicular to a panel is
absorbed, which gives each entry the amplitude sqrt(cos theta) / d. Absolute
scale is arbitrary until a scenario-set SNR normalization pins it down.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .scenario import AntennaArray, UePlacement


@dataclass(frozen=True)
class ChannelParams:
    """Fading and noise parameters shared by a simulation campaign.

    rician_factor_linear is the LoS-to-scattered power ratio (linear, not dB);
    target_snr_linear is the per-antenna average receive SNR the scenario-set
    normalization aims at, assuming unit-energy transmit symbols.
    """

    rician_factor_linear: float = 10.0 ** 0.5
    noise_power: float = 1.0
    target_snr_linear: float = 10.0

    def __post_init__(self):
        if self.rician_factor_linear < 0:
            raise ValueError("Rician factor must be non-negative")
        if self.noise_power <= 0:
            raise ValueError("noise power must be positive")
        if self.target_snr_linear <= 0:
            raise ValueError("target SNR must be positive")


@dataclass(frozen=True)
class ChannelRealization:
    """One flat-fading draw: full matrix, its LoS component, and the noise level."""

    h: np.ndarray
    h_los: np.ndarray
    noise_power: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.h.shape


def los_entry(antenna_pos, antenna_normal, ue_pos, wavelength: float) -> complex:
    """Spherical-wave gain from one user to one antenna.

    g = sqrt(max(cos theta, 0)) / d * exp(-j 2 pi d / lambda), with d the
    exact distance and theta the incidence angle off the panel normal.
    """
    delta = np.asarray(ue_pos, dtype=float) - np.asarray(antenna_pos, dtype=float)
    d = float(np.linalg.norm(delta))
    if d == 0.0:
        raise ValueError("user coincides with an antenna")
    cos_theta = float(np.dot(np.asarray(antenna_normal, dtype=float), delta)) / d
    amp = np.sqrt(max(cos_theta, 0.0)) / d
    return amp * np.exp(-2j * np.pi * d / wavelength)


def build_los_matrix(array: AntennaArray, ues: UePlacement, wavelength: float) -> np.ndarray:
    """(M, K) LoS matrix with entry (m, k) = los_entry(antenna m, user k)."""
    if array.total_antennas == 0 or ues.n_users == 0:
        raise ValueError("array and user placement must be non-empty")
    delta = ues.positions[None, :, :] - array.positions[:, None, :]  # (M, K, 3)
    d = np.linalg.norm(delta, axis=2)
    if np.any(d == 0.0):
        raise ValueError("a user coincides with an antenna")
    cos_theta = np.einsum("mkd,md->mk", delta, array.normals) / d
    amp = np.sqrt(np.maximum(cos_theta, 0.0)) / d
    return amp * np.exp(-2j * np.pi * d / wavelength)


def sample_channel(h_los: np.ndarray, params: ChannelParams, rng_seed=0) -> ChannelRealization:
    """Draw one Rician realization around the given LoS matrix.

    The scattered part is IID circularly-symmetric Gaussian per entry with
    variance matched to the LoS power of that entry, so the expected total
    entry power equals the LoS entry power for any Rician factor.
    """
    kf = params.rician_factor_linear
    rng = np.random.default_rng(rng_seed)
    g = (rng.standard_normal(h_los.shape) + 1j * rng.standard_normal(h_los.shape)) / np.sqrt(2.0)
    h_r = np.abs(h_los) * g
    h = np.sqrt(kf / (1.0 + kf)) * h_los + np.sqrt(1.0 / (1.0 + kf)) * h_r
    return ChannelRealization(h=h, h_los=h_los, noise_power=params.noise_power)


def mean_entry_power(h: np.ndarray) -> float:
    """Average of |h[m, k]|^2 over all entries (per-antenna per-user receive power)."""
    return float(np.mean(np.abs(h) ** 2))


def normalize_scenario_set(los_matrices, params: ChannelParams) -> float:
    """Common scale factor beta for a set of compared scenarios.

    After scaling every channel by beta, the per-antenna receive power
    averaged over users and over the whole set equals
    target_snr_linear * noise_power. One beta per compared sweep; matrices
    may differ in M (mean power is taken per entry within each scenario
    before the set average).
    """
    mats = list(los_matrices)
    if not mats:
        raise ValueError("need at least one scenario to normalize")
    p_mean = float(np.mean([mean_entry_power(h) for h in mats]))
    if p_mean == 0.0:
        raise ValueError("cannot normalize all-zero channels")
    return float(np.sqrt(params.target_snr_linear * params.noise_power / p_mean))


def receive_vector(h_scaled: np.ndarray, symbols: np.ndarray, noise_power: float, rng_seed=0) -> np.ndarray:
    """y = H s + n with n ~ CN(0, noise_power I)."""
    symbols = np.asarray(symbols)
    if symbols.shape != (h_scaled.shape[1],):
        raise ValueError(
            f"symbol vector of length {symbols.shape} does not match K={h_scaled.shape[1]}"
        )
    m = h_scaled.shape[0]
    rng = np.random.default_rng(rng_seed)
    n = np.sqrt(noise_power / 2.0) * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return h_scaled @ symbols + n


_MATRIX_MAGIC = b"CPLXMK1\x00"


def save_channel_matrix(h: np.ndarray, path) -> None:
    """Binary export: magic, uint64 M, uint64 K, then row-major interleaved
    re/im float64, all little-endian."""
    h = np.ascontiguousarray(h, dtype=np.complex128)
    m, k = h.shape
    with open(path, "wb") as f:
        f.write(_MATRIX_MAGIC)
        f.write(struct.pack("<QQ", m, k))
        f.write(h.astype("<c16").tobytes())


def load_channel_matrix(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _MATRIX_MAGIC:
            raise ValueError(f"not a channel matrix file: bad magic {magic!r}")
        m, k = struct.unpack("<QQ", f.read(16))
        data = np.frombuffer(f.read(), dtype="<c16")
    if data.size != m * k:
        raise ValueError(f"expected {m * k} entries, file holds {data.size}")
    return data.reshape(m, k).astype(np.complex128)


def derived_seed(master_seed: int, *path: int) -> np.random.SeedSequence:
    """Child seed stream for a realization, stable across runs and schedulers.

    The splitting rule is a SeedSequence keyed on (master_seed, *path), e.g.
    path = (placement_index,) or (placement_index, fading_index).
    """
    return np.random.SeedSequence([int(master_seed), *map(int, path)])
