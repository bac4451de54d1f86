"""Linear uplink equalization, centralized and as per-panel contributions.

The centralized path builds the full K x M equalization matrix. The
decentralized path computes per-panel matched-filter outputs and local
Gramians, sums them (the sums equal the global quantities exactly), and
applies the matching solve once at the end. Both paths must agree to
numerical precision; nothing is silently regularized.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

# reciprocal condition number below this is treated as singular
RCOND_FLOOR = 1e-12


class SingularGramianError(np.linalg.LinAlgError):
    """Aggregated Gramian (or its regularized version) is numerically singular."""


class EqualizerKind(enum.Enum):
    MRC = "mrc"
    ZF = "zf"
    MMSE = "mmse"

    @property
    def needs_gramian(self) -> bool:
        return self is not EqualizerKind.MRC

    @classmethod
    def parse(cls, name: str) -> "EqualizerKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown equalizer {name!r}, expected one of mrc, zf, mmse"
            ) from None


def _solve_hermitian(a: np.ndarray, b: np.ndarray, what: str) -> np.ndarray:
    """Solve a x = b for Hermitian positive-definite a via Cholesky.

    Raises SingularGramianError when the reciprocal condition number of `a`
    falls below RCOND_FLOOR (rank-deficient or numerically so).
    """
    w = np.linalg.eigvalsh(a)
    if w[-1] <= 0.0 or w[0] <= RCOND_FLOOR * w[-1]:
        raise SingularGramianError(
            f"{what} is singular (reciprocal condition {w[0] / w[-1] if w[-1] > 0 else 0.0:.3e})"
        )
    c, low = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    return scipy.linalg.cho_solve((c, low), b, check_finite=False)


def equalizer_matrix(kind: EqualizerKind, h: np.ndarray, noise_power: float) -> np.ndarray:
    """K x M equalization matrix W for the full channel.

    MRC: H^H. ZF: (H^H H)^-1 H^H. MMSE: (H^H H + N0 I)^-1 H^H. The inversions
    are realized as Hermitian solves, never as explicit inverses.
    """
    hh = h.conj().T
    if kind is EqualizerKind.MRC:
        return hh.copy()
    gram = hh @ h
    if kind is EqualizerKind.ZF:
        return _solve_hermitian(gram, hh, "Gramian")
    if kind is EqualizerKind.MMSE:
        k = gram.shape[0]
        return _solve_hermitian(gram + noise_power * np.eye(k), hh,
                                "regularized Gramian")
    raise ValueError(f"unknown equalizer kind {kind!r}")


@dataclass(frozen=True)
class LocalContribution:
    """What one panel adds to the aggregate: its matched-filter output and,
    when the final solve needs it, its local Gramian."""

    z_mrc_local: np.ndarray
    gramian_local: np.ndarray | None
    panel_id: int = 0

    @property
    def n_users(self) -> int:
        return self.z_mrc_local.shape[0]


def local_contribution(h_p: np.ndarray, y_p: np.ndarray, need_gramian: bool,
                       panel_id: int = 0) -> LocalContribution:
    """Per-panel quantities: z_p = H_p^H y_p and optionally G_p = H_p^H H_p."""
    y_p = np.asarray(y_p)
    if y_p.shape != (h_p.shape[0],):
        raise ValueError(
            f"received vector shape {y_p.shape} does not match {h_p.shape[0]} antennas"
        )
    hh = h_p.conj().T
    z = hh @ y_p
    gram = hh @ h_p if need_gramian else None
    return LocalContribution(z_mrc_local=z, gramian_local=gram, panel_id=panel_id)


@dataclass(frozen=True)
class AggregateState:
    """Running sums over absorbed panels; the order of absorption must not
    matter beyond floating-point reassociation."""

    z_mrc_sum: np.ndarray
    gramian_sum: np.ndarray | None
    panels_absorbed: int = 0

    @classmethod
    def empty(cls, n_users: int, with_gramian: bool) -> "AggregateState":
        gram = np.zeros((n_users, n_users), dtype=complex) if with_gramian else None
        return cls(z_mrc_sum=np.zeros(n_users, dtype=complex), gramian_sum=gram,
                   panels_absorbed=0)

    @property
    def n_users(self) -> int:
        return self.z_mrc_sum.shape[0]


def absorb(state: AggregateState, contribution: LocalContribution) -> AggregateState:
    """Add one panel's contribution; returns a new state."""
    if contribution.n_users != state.n_users:
        raise ValueError(
            f"contribution for K={contribution.n_users} cannot be absorbed into"
            f" an aggregate for K={state.n_users}"
        )
    if (state.gramian_sum is None) != (contribution.gramian_local is None):
        raise ValueError("Gramian presence must be consistent along the chain")
    gram = None
    if state.gramian_sum is not None:
        gram = state.gramian_sum + contribution.gramian_local
    return AggregateState(
        z_mrc_sum=state.z_mrc_sum + contribution.z_mrc_local,
        gramian_sum=gram,
        panels_absorbed=state.panels_absorbed + 1,
    )


def finalize(state: AggregateState, kind: EqualizerKind, noise_power: float) -> np.ndarray:
    """Turn the fully aggregated state into the equalized symbol estimates."""
    if state.panels_absorbed < 1:
        raise ValueError("no panels absorbed, nothing to finalize")
    if kind is EqualizerKind.MRC:
        return state.z_mrc_sum.copy()
    if state.gramian_sum is None:
        raise ValueError(f"{kind.value} finalize needs an aggregated Gramian")
    if kind is EqualizerKind.ZF:
        return _solve_hermitian(state.gramian_sum, state.z_mrc_sum, "aggregated Gramian")
    if kind is EqualizerKind.MMSE:
        k = state.n_users
        return _solve_hermitian(state.gramian_sum + noise_power * np.eye(k),
                                state.z_mrc_sum, "regularized aggregated Gramian")
    raise ValueError(f"unknown equalizer kind {kind!r}")


def split_panels(h: np.ndarray, y: np.ndarray, panel_count: int):
    """Slice a full (M, K) channel and M-vector into P equal row blocks."""
    m = h.shape[0]
    if m % panel_count != 0:
        raise ValueError(f"M={m} antennas cannot be split into {panel_count} panels")
    n = m // panel_count
    return [(h[p * n:(p + 1) * n], y[p * n:(p + 1) * n]) for p in range(panel_count)]
