"""Acceptance gate: the eight headline guarantees, one test and one printed
pass/fail line each. Run with `pytest -s tests/test_acceptance.py` to see the
lines; every tolerance is stated inline."""

import json

import numpy as np

from lis_sim.channel import ChannelParams
from lis_sim.cli import main as cli_main
from lis_sim.equalize import (
    AggregateState,
    EqualizerKind,
    absorb,
    local_contribution,
    split_panels,
)
from lis_sim.latency import FrameSpec, default_cycle_model, total_latency
from lis_sim.metrics import SweepPoint, run_sweep
from lis_sim.scenario import RoomSpec
from lis_sim.validate import (
    check_chain_order_invariance,
    check_equivalence_fuzz,
    check_mmse_zf_limit,
    check_payload_counts,
    check_sinr_oracle,
)

KINDS = (EqualizerKind.MRC, EqualizerKind.ZF, EqualizerKind.MMSE)


def report(num, name, ok, detail):
    print(f"criterion {num} {'PASS' if ok else 'FAIL'} [{name}] {detail}")
    assert ok, f"criterion {num} [{name}] {detail}"


def test_criterion_1_chain_matches_central():
    """1000 fuzzed instances (M <= 128, K <= 16, P | M): daisy-chain MRC/ZF/
    MMSE within 1e-10 relative of the centralized equalizer."""
    r = check_equivalence_fuzz(n_instances=1000, tol=1e-10)
    report(1, "central-decentralized equivalence", r.passed, r.detail)


def test_criterion_2_cycle_anchors_exact():
    """The fitted cycle model reproduces all ten measured counts exactly."""
    expected = {
        ("chan_est", 16): 83, ("chan_est", 128): 531,
        ("gramian", 16): 946, ("gramian", 128): 58_000,
        ("gramian_inv", 16): 1_817, ("gramian_inv", 128): 890_000,
        ("mrc_combine", 16): 81, ("mrc_combine", 128): 460,
        ("zf_multiply", 16): 81, ("zf_multiply", 128): 3_300,
    }
    model = default_cycle_model()
    misses = {key: (model.cycles(key[0], 16, key[1]), want)
              for key, want in expected.items()
              if model.cycles(key[0], 16, key[1]) != want}
    report(2, "cycle anchor exactness", not misses,
           "all 10 counts exact" if not misses else f"mismatches: {misses}")


def test_criterion_3_latency_constants():
    """Frame wait 133 us, front end 25 us, 128-panel fronthaul 110.49 us,
    MRC central cost 0; all exact."""
    model = default_cycle_model()
    b = total_latency(FrameSpec(), model, 16, 16, 128, EqualizerKind.MRC)
    ok = (b.wait_us == 133.0 and b.lpu_frontend_us == 25.0
          and b.fronthaul_us == 110.49 and b.cpu_us == 0.0)
    report(3, "latency constants", ok,
           f"wait={b.wait_us} frontend={b.lpu_frontend_us} "
           f"fronthaul={b.fronthaul_us} cpu(mrc)={b.cpu_us}")


def test_criterion_4_breakdown_shape():
    """At N=16, P=128: ZF/MMSE central-solve share >= 0.85 and MRC total
    <= 300 us at K=128; at K=16 every kind has wait share in [0.40, 0.55]
    and fronthaul share in [0.30, 0.45]."""
    model = default_cycle_model()
    frame = FrameSpec()
    checks = []
    for kind in (EqualizerKind.ZF, EqualizerKind.MMSE):
        b = total_latency(frame, model, 16, 128, 128, kind)
        checks.append((f"{kind.value} cpu share", b.cpu_us / b.total_us >= 0.85))
    mrc128 = total_latency(frame, model, 16, 128, 128, EqualizerKind.MRC)
    checks.append(("mrc total at K=128", mrc128.total_us <= 300.0))
    for kind in KINDS:
        b = total_latency(frame, model, 16, 16, 128, kind)
        checks.append((f"{kind.value} wait share",
                       0.40 <= b.wait_us / b.total_us <= 0.55))
        checks.append((f"{kind.value} fronthaul share",
                       0.30 <= b.fronthaul_us / b.total_us <= 0.45))
    failed = [name for name, ok in checks if not ok]
    report(4, "latency breakdown shape", not failed,
           f"{len(checks)} bounds hold" if not failed else f"violated: {failed}")


def test_criterion_5_fixed_m_sweep_trends():
    """M=128, K=16, P in {1,4,16,32}, 20 placements x 100 draws: ZF and MMSE
    5th-percentile SE non-decreasing in P; MMSE mean >= ZF mean (shared
    noise and fading) within 1e-9."""
    panel_counts = (1, 4, 16, 32)
    points = [SweepPoint(f"P{p}", p, 128) for p in panel_counts]
    r = run_sweep(RoomSpec(), points, n_users=16,
                  kinds=[EqualizerKind.ZF, EqualizerKind.MMSE],
                  params=ChannelParams(), n_placements=20, n_fading=100,
                  master_seed=1)
    problems = []
    for kind in (EqualizerKind.ZF, EqualizerKind.MMSE):
        p5 = [r.summaries[f"P{p}"][kind].percentile_se[5] for p in panel_counts]
        if not all(a <= b + 1e-12 for a, b in zip(p5, p5[1:])):
            problems.append(f"{kind.value} p5 not non-decreasing: {p5}")
    for p in panel_counts:
        zf = r.summaries[f"P{p}"][EqualizerKind.ZF].mean_user_se
        mmse = r.summaries[f"P{p}"][EqualizerKind.MMSE].mean_user_se
        if mmse < zf - 1e-9:
            problems.append(f"P={p}: mmse mean {mmse} < zf mean {zf}")
    p5_zf = [round(r.summaries[f"P{p}"][EqualizerKind.ZF].percentile_se[5], 3)
             for p in panel_counts]
    report(5, "fixed-M sweep trends", not problems,
           f"zf p5 over P: {p5_zf}" if not problems else "; ".join(problems))


def test_criterion_6_fixed_n_sweep_trends():
    """N=16, P in {2,4,8,16,32}, K=16: ZF mean SE strictly increasing in P;
    ZF within 5% of MMSE at P=32; and at K=128 the latency of ZF with P
    panels is >= 10x that of MRC with 4P panels."""
    panel_counts = (2, 4, 8, 16, 32)
    points = [SweepPoint(f"P{p}", p, 16 * p) for p in panel_counts]
    r = run_sweep(RoomSpec(), points, n_users=16,
                  kinds=[EqualizerKind.ZF, EqualizerKind.MMSE],
                  params=ChannelParams(), n_placements=20, n_fading=100,
                  master_seed=1)
    problems = []
    means = [r.summaries[f"P{p}"][EqualizerKind.ZF].mean_user_se
             for p in panel_counts]
    if not all(a < b for a, b in zip(means, means[1:])):
        problems.append(f"zf mean not strictly increasing: {means}")
    zf32 = r.summaries["P32"][EqualizerKind.ZF].mean_user_se
    mmse32 = r.summaries["P32"][EqualizerKind.MMSE].mean_user_se
    if abs(zf32 - mmse32) / mmse32 > 0.05:
        problems.append(f"zf/mmse gap at P=32: {zf32} vs {mmse32}")
    model = default_cycle_model()
    frame = FrameSpec()
    ratios = []
    for p in (2, 4, 8):
        zf = total_latency(frame, model, 16, 128, p, EqualizerKind.ZF).total_us
        mrc = total_latency(frame, model, 16, 128, 4 * p, EqualizerKind.MRC).total_us
        ratios.append(zf / mrc)
        if zf / mrc < 10.0:
            problems.append(f"latency ratio at P={p}: {zf / mrc:.1f} < 10")
    report(6, "fixed-N sweep trends", not problems,
           (f"zf means {[round(m, 2) for m in means]}; "
            f"latency ratios {[round(x, 1) for x in ratios]}")
           if not problems else "; ".join(problems))


def test_criterion_7_sinr_oracle():
    """Analytic SINR within 2% of a 1e5-draw measurement oracle on 20
    random instances."""
    r = check_sinr_oracle(n_instances=20, n_draws=100_000, tol=0.02)
    report(7, "sinr oracle agreement", r.passed, r.detail)


def test_criterion_8_property_suite(tmp_path):
    """Gramian sums Hermitian PSD; chain order invariance <= 1e-12; MMSE ->
    ZF limit <= 1e-8; payload counts K and K + K(K+1)/2; reruns with one
    seed produce byte-identical CSVs."""
    problems = []

    rng = np.random.default_rng(12)
    for _ in range(100):
        k = int(rng.integers(1, 9))
        p = int(rng.choice([1, 2, 4]))
        m = int(rng.integers(1, 9)) * p
        h = (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k)))
        y = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        state = AggregateState.empty(k, with_gramian=True)
        for pid, (h_p, y_p) in enumerate(split_panels(h, y, p)):
            state = absorb(state, local_contribution(h_p, y_p, True, pid))
        g = state.gramian_sum
        if not np.allclose(g, g.conj().T, atol=1e-12):
            problems.append("gramian sum not hermitian")
            break
        if np.linalg.eigvalsh(g)[0] < -1e-10:
            problems.append("gramian sum not PSD")
            break

    for check in (check_chain_order_invariance(tol=1e-12),
                  check_mmse_zf_limit(tol=1e-8),
                  check_payload_counts()):
        if not check.passed:
            problems.append(f"{check.name}: {check.detail}")

    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "scenario": {"total_antennas": 32, "n_users": 4,
                     "panel_counts": [1, 2]},
        "monte_carlo": {"placements": 2, "fading_draws": 3},
    }))
    blobs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        cli_main(["sweep-fixed-m", "--config", str(cfg_path), "--out",
                  str(out), "--no-figures"])
        cli_main(["latency-breakdown", "--out", str(out / "lb"),
                  "--no-figures"])
        blobs.append((out / "sweep_fixed_m.csv").read_bytes()
                     + (out / "lb" / "latency_breakdown.csv").read_bytes())
    if blobs[0] != blobs[1]:
        problems.append("reruns with one seed differ byte for byte")

    report(8, "property suite", not problems,
           "gramian PSD, order invariance, mmse->zf limit, payloads,"
           " byte-identical reruns" if not problems else "; ".join(problems))
