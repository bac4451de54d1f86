"""Cross-module consistency checks runnable from the CLI.

These are the end-to-end guarantees the simulator leans on: the decentralized
fold reproduces centralized equalization, the cycle model reproduces its
measured anchors to the integer, chain order does not matter, the analytic
SINR matches a brute-force moment measurement, and the wire payloads have the
advertised sizes. Each check reports pass/fail plus a short detail string.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainTopology, payload_complex_values, run_chain
from .equalize import (
    EqualizerKind,
    SingularGramianError,
    equalizer_matrix,
    split_panels,
)
from .latency import CYCLE_ANCHORS, MEASURED_N, default_cycle_model
from .metrics import user_sinr

ALL_KINDS = (EqualizerKind.MRC, EqualizerKind.ZF, EqualizerKind.MMSE)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def random_instance(rng, m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Random complex Gaussian channel (M x K) and received vector."""
    h = (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2)
    y = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2)
    return h, y


def _rel_err(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / scale)


def check_equivalence_fuzz(n_instances: int = 1000, seed: int = 2024,
                           tol: float = 1e-10) -> CheckResult:
    """Decentralized chain output vs centralized W @ y over random instances."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        n_per = int(rng.integers(1, 17))
        p = int(2 ** rng.integers(0, 4))
        m = n_per * p
        if m < 8:
            m = 8
            n_per = m // p
        # keep K <= M so the ZF/MMSE Gramian stays invertible
        k = int(rng.integers(1, min(16, m) + 1))
        h, y = random_instance(rng, m, k)
        noise_power = float(rng.uniform(0.05, 2.0))
        topo = ChainTopology.natural(p)
        inputs = split_panels(h, y, p)
        for kind in ALL_KINDS:
            central = equalizer_matrix(kind, h, noise_power) @ y
            decentralized, hops = run_chain(topo, inputs, kind, noise_power)
            assert len(hops) == p - 1
            worst = max(worst, _rel_err(decentralized, central))
    return CheckResult(
        "central-decentralized-equivalence", worst <= tol,
        f"{n_instances} instances x 3 kinds, worst relative error {worst:.3e} (tol {tol:g})",
    )


def check_anchor_exactness() -> CheckResult:
    """Fitted cycle model must return every measured count exactly."""
    model = default_cycle_model()
    bad = []
    for op, points in CYCLE_ANCHORS.items():
        for k, expected in points.items():
            got = model.cycles(op, MEASURED_N, k)
            if round(got) != expected or abs(got - expected) > 1e-6:
                bad.append(f"{op}(K={k}): {got!r} != {expected}")
    return CheckResult(
        "cycle-anchor-exactness", not bad,
        "all 10 measured counts reproduced" if not bad else "; ".join(bad),
    )


def check_chain_order_invariance(seed: int = 7, n_perms: int = 6,
                                 tol: float = 1e-12) -> CheckResult:
    """Permuting the panel visiting order must not change the output."""
    rng = np.random.default_rng(seed)
    m, k, p = 64, 8, 8
    h, y = random_instance(rng, m, k)
    inputs = split_panels(h, y, p)
    worst = 0.0
    for kind in ALL_KINDS:
        ref, _ = run_chain(ChainTopology.natural(p), inputs, kind, 0.3)
        for _ in range(n_perms):
            order = tuple(rng.permutation(p))
            out, _ = run_chain(ChainTopology(panel_order=order), inputs, kind, 0.3)
            worst = max(worst, _rel_err(out, ref))
    return CheckResult(
        "chain-order-invariance", worst <= tol,
        f"worst relative deviation {worst:.3e} over {n_perms} permutations x 3 kinds",
    )


def sinr_moment_oracle(w_row_k: np.ndarray, h: np.ndarray, k: int,
                       noise_power: float, n_draws: int = 100_000,
                       rng_seed=0) -> float:
    """Brute-force SINR: transmit random unit-energy symbol vectors plus
    noise and measure signal, interference, and noise powers at the
    equalizer output. Independent of the analytic formula."""
    rng = np.random.default_rng(rng_seed)
    n_users = h.shape[1]
    m = h.shape[0]
    s = (rng.standard_normal((n_users, n_draws))
         + 1j * rng.standard_normal((n_users, n_draws))) / np.sqrt(2)
    noise = np.sqrt(noise_power / 2.0) * (
        rng.standard_normal((m, n_draws)) + 1j * rng.standard_normal((m, n_draws)))
    s_own = np.zeros_like(s)
    s_own[k] = s[k]
    s_others = s.copy()
    s_others[k] = 0.0
    sig = w_row_k @ (h @ s_own)
    interference = w_row_k @ (h @ s_others)
    picked_noise = w_row_k @ noise
    p_sig = float(np.mean(np.abs(sig) ** 2))
    p_int = float(np.mean(np.abs(interference) ** 2))
    p_noise = float(np.mean(np.abs(picked_noise) ** 2))
    return p_sig / (p_int + p_noise)


def check_sinr_oracle(n_instances: int = 20, n_draws: int = 100_000,
                      seed: int = 11, tol: float = 0.02) -> CheckResult:
    """Analytic user_sinr against the moment oracle on small instances."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_instances):
        m = int(rng.integers(4, 10))
        k_users = int(rng.integers(2, min(m, 4) + 1))
        h, _ = random_instance(rng, m, k_users)
        noise_power = float(rng.uniform(0.2, 1.5))
        kind = ALL_KINDS[i % 3]
        w = equalizer_matrix(kind, h, noise_power)
        k = int(rng.integers(0, k_users))
        analytic = user_sinr(w[k], h, k, noise_power)
        measured = sinr_moment_oracle(w[k], h, k, noise_power, n_draws,
                                      rng_seed=derived_oracle_seed(seed, i))
        worst = max(worst, abs(analytic - measured) / measured)
    return CheckResult(
        "sinr-oracle-agreement", worst <= tol,
        f"worst relative mismatch {worst:.4f} over {n_instances} instances (tol {tol:g})",
    )


def derived_oracle_seed(seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, 0xE0, index])


def check_payload_counts(k_values=range(1, 129)) -> CheckResult:
    """Serialized message sizes vs the advertised K and K + K(K+1)/2."""
    rng = np.random.default_rng(3)
    bad = []
    for k in k_values:
        h, y = random_instance(rng, 2 * max(2, k), k)
        inputs = split_panels(h, y, 2)
        for kind in ALL_KINDS:
            _, hops = run_chain(ChainTopology.natural(2), inputs, kind, 0.5)
            got = hops[0].payload_complex_values
            expected = payload_complex_values(kind, k)
            stated = k if kind is EqualizerKind.MRC else k + k * (k + 1) // 2
            if got != expected or got != stated:
                bad.append(f"{kind.value} K={k}: {got} != {stated}")
    return CheckResult(
        "payload-counts", not bad,
        f"K in [{min(k_values)}, {max(k_values)}] serialized sizes match"
        if not bad else "; ".join(bad[:4]),
    )


def check_mmse_zf_limit(seed: int = 5, tol: float = 1e-8) -> CheckResult:
    """MMSE collapses to ZF as the noise power vanishes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        h, _ = random_instance(rng, 8, 4)
        w_zf = equalizer_matrix(EqualizerKind.ZF, h, 0.0)
        w_mmse = equalizer_matrix(EqualizerKind.MMSE, h, 1e-12)
        worst = max(worst, _rel_err(w_mmse, w_zf))
    return CheckResult(
        "mmse-zf-limit", worst <= tol,
        f"worst relative gap {worst:.3e} at noise power 1e-12 (tol {tol:g})",
    )


def check_rank_deficiency_surfaced() -> CheckResult:
    """ZF with more users than antennas must fail loudly, not pseudo-invert."""
    rng = np.random.default_rng(9)
    h, _ = random_instance(rng, 4, 6)
    try:
        equalizer_matrix(EqualizerKind.ZF, h, 0.0)
    except SingularGramianError as e:
        return CheckResult("rank-deficiency-surfaced", True,
                           f"singular Gramian raised as expected ({e})")
    return CheckResult("rank-deficiency-surfaced", False,
                       "K > M zero-forcing did not raise")


def run_all_checks(fuzz_instances: int = 1000) -> list[CheckResult]:
    return [
        check_equivalence_fuzz(n_instances=fuzz_instances),
        check_anchor_exactness(),
        check_chain_order_invariance(),
        check_sinr_oracle(),
        check_payload_counts(),
        check_mmse_zf_limit(),
        check_rank_deficiency_surfaced(),
    ]
