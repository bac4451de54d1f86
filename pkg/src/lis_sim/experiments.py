"""The canonical experiments behind the CLI.

Each runner takes a resolved ExperimentConfig plus an output directory and
leaves behind: the delimited results, rendered figures (unless disabled),
and resolved_config.json echoing every knob that produced them, including
the fitted cycle-model coefficients and, where one was computed, the SNR
normalization constant. Re-running with the same config and seed rewrites
byte-identical CSV and JSON files.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import plots
from .chain import ChainTopology, payload_complex_values, run_chain, write_hops_csv
from .channel import (
    ChannelParams,
    build_los_matrix,
    derived_seed,
    normalize_scenario_set,
    receive_vector,
    sample_channel,
    save_channel_matrix,
)
from .config import ExperimentConfig
from .equalize import EqualizerKind, equalizer_matrix, split_panels
from .latency import (
    BREAKDOWN_CSV_HEADER,
    CycleModel,
    FrameSpec,
    breakdown_csv_row,
    default_anchors,
    fit_cycle_model,
    total_latency,
)
from .metrics import (
    SWEEP_CSV_HEADER,
    SweepPoint,
    run_sweep,
    sweep_csv_rows,
)
from .scenario import build_wall_layout, place_users, snr_db_to_linear, write_geometry_csv
from .validate import run_all_checks

log = logging.getLogger(__name__)

ALL_KINDS = (EqualizerKind.MRC, EqualizerKind.ZF, EqualizerKind.MMSE)

SHARE_COLUMNS = ["wait_share", "frontend_share", "local_share",
                 "fronthaul_share", "cpu_share", "air_share"]


def _params(cfg: ExperimentConfig) -> ChannelParams:
    sc = cfg.scenario
    return ChannelParams(
        rician_factor_linear=snr_db_to_linear(sc.rician_db),
        noise_power=1.0,
        target_snr_linear=snr_db_to_linear(sc.snr_db),
    )


def _frame(cfg: ExperimentConfig) -> FrameSpec:
    lt = cfg.latency
    return FrameSpec(
        slots_per_frame=lt.slots_per_frame,
        ofdm_symbol_us=lt.ofdm_symbol_us,
        subcarrier_spacing_hz=lt.subcarrier_spacing_hz,
        worst_case_wait_symbols=lt.worst_case_wait_symbols,
    )


def _model(cfg: ExperimentConfig) -> CycleModel:
    return fit_cycle_model(default_anchors(), clock_hz=cfg.latency.clock_hz)


def _topology(cfg: ExperimentConfig, panel_count: int) -> ChainTopology:
    return ChainTopology.natural(
        panel_count,
        per_hop_latency_us=cfg.latency.per_hop_latency_us,
        inter_panel_distance_m=cfg.latency.inter_panel_distance_m,
    )


def echo_config(out_dir: Path, experiment: str, cfg: ExperimentConfig,
                model: CycleModel, beta: float | None) -> Path:
    """Every run leaves the fully-resolved configuration next to its data.

    beta is the channel scale of the run, or None for experiments that never
    draw a channel (serialized as JSON null).
    """
    payload = {
        "experiment": experiment,
        "config": cfg.to_dict(),
        "cycle_model": {
            "clock_hz": model.clock_hz,
            "measured_n": model.measured_n,
            "coefficients": model.coefficients_as_floats(),
        },
        "normalization_beta": beta,
    }
    path = out_dir / "resolved_config.json"
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _ensure_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def run_latency_breakdown(cfg: ExperimentConfig, out_dir) -> dict:
    """Latency components, absolute and as shares of the total, for each
    equalizer at every configured user count."""
    out_dir = _ensure_dir(out_dir)
    model = _model(cfg)
    frame = _frame(cfg)
    n = cfg.scenario.antennas_per_panel
    p = cfg.breakdown.panel_count
    topology = _topology(cfg, p)

    rows = []
    for k in cfg.breakdown.k_values:
        for kind in ALL_KINDS:
            b = total_latency(frame, model, n, k, p, kind, topology=topology,
                              air_distance_km=cfg.latency.air_distance_km)
            row = dict(zip(BREAKDOWN_CSV_HEADER, breakdown_csv_row(kind, n, k, p, b)))
            total = b.total_us
            for share_col, comp in zip(SHARE_COLUMNS, b.components().values()):
                row[share_col] = repr(comp / total)
            rows.append(row)

    header = BREAKDOWN_CSV_HEADER + SHARE_COLUMNS
    csv_path = out_dir / "latency_breakdown.csv"
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows([r[c] for c in header] for r in rows)

    figures = []
    if cfg.figures:
        fig_path = out_dir / "latency_breakdown.png"
        plots.plot_latency_breakdown(rows, fig_path)
        figures.append(fig_path)

    echo_config(out_dir, "latency-breakdown", cfg, model, beta=None)
    return {"rows": rows, "csv": csv_path, "figures": figures}


def _sweep_rows_with_latency(cfg, points, kinds, result):
    """Extend the SE summary rows with the latency model evaluated at each
    point's (N, K, P)."""
    model = _model(cfg)
    frame = _frame(cfg)
    rows = sweep_csv_rows(result, points, cfg.scenario.n_users, kinds)
    out = []
    i = 0
    for pt in points:
        for kind in kinds:
            b = total_latency(frame, model, pt.antennas_per_panel,
                              cfg.scenario.n_users, pt.panel_count, kind,
                              topology=_topology(cfg, pt.panel_count),
                              air_distance_km=cfg.latency.air_distance_km)
            out.append(dict(zip(SWEEP_CSV_HEADER, rows[i]),
                            total_latency_us=repr(b.total_us)))
            i += 1
    return out


def _write_sweep_outputs(cfg, out_dir, rows, name, title):
    header = SWEEP_CSV_HEADER + ["total_latency_us"]
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows([r[c] for c in header] for r in rows)
    figures = []
    if cfg.figures:
        se_fig = out_dir / "se_vs_panels.png"
        plots.plot_se_vs_panels(rows, se_fig, title)
        trade_fig = out_dir / "se_vs_latency.png"
        latency_rows = [{"kind": r["kind"], "p": r["p"],
                         "total_us": r["total_latency_us"]} for r in rows]
        plots.plot_se_vs_latency(rows, latency_rows, trade_fig, title)
        figures = [se_fig, trade_fig]
    return csv_path, figures


def run_sweep_fixed_m(cfg: ExperimentConfig, out_dir) -> dict:
    """SE and latency versus panel count while the total antenna count is
    held fixed (panels shrink as they multiply)."""
    out_dir = _ensure_dir(out_dir)
    sc = cfg.scenario
    points = [SweepPoint(label=f"P{p}", panel_count=p, total_antennas=sc.total_antennas)
              for p in sc.panel_counts]
    kinds = list(ALL_KINDS)
    result = run_sweep(
        cfg.room, points, sc.n_users, kinds, _params(cfg),
        cfg.monte_carlo.placements, cfg.monte_carlo.fading_draws,
        cfg.monte_carlo.master_seed, plane_height_m=sc.plane_height_m,
    )
    rows = _sweep_rows_with_latency(cfg, points, kinds, result)
    csv_path, figures = _write_sweep_outputs(
        cfg, out_dir, rows, "sweep_fixed_m",
        f"fixed total antennas M={sc.total_antennas}, K={sc.n_users}")
    echo_config(out_dir, "sweep-fixed-m", cfg, _model(cfg), beta=result.beta)
    return {"rows": rows, "result": result, "csv": csv_path, "figures": figures}


RATIO_CSV_HEADER = ["k", "p_zf", "p_mrc", "zf_total_us", "mrc_total_us",
                    "latency_ratio"]


def zf_mrc_latency_ratio_rows(cfg: ExperimentConfig, k_values) -> list[dict]:
    """ZF with P panels against MRC with 4P panels of the same size: the
    cost of interference suppression versus simply adding aperture."""
    model = _model(cfg)
    frame = _frame(cfg)
    n = cfg.scenario.antennas_per_panel
    counts = cfg.scenario.fixed_n_panel_counts
    rows = []
    for k in k_values:
        for p in counts:
            if 4 * p not in counts:
                continue
            zf = total_latency(frame, model, n, k, p, EqualizerKind.ZF,
                               topology=_topology(cfg, p),
                               air_distance_km=cfg.latency.air_distance_km)
            mrc = total_latency(frame, model, n, k, 4 * p, EqualizerKind.MRC,
                                topology=_topology(cfg, 4 * p),
                                air_distance_km=cfg.latency.air_distance_km)
            rows.append({
                "k": k, "p_zf": p, "p_mrc": 4 * p,
                "zf_total_us": repr(zf.total_us),
                "mrc_total_us": repr(mrc.total_us),
                "latency_ratio": repr(zf.total_us / mrc.total_us),
            })
    return rows


def run_sweep_fixed_n(cfg: ExperimentConfig, out_dir) -> dict:
    """SE and latency versus panel count at a fixed panel size (the array
    grows with P), plus the ZF-vs-MRC latency ratio table."""
    out_dir = _ensure_dir(out_dir)
    sc = cfg.scenario
    points = [SweepPoint(label=f"P{p}", panel_count=p,
                         total_antennas=sc.antennas_per_panel * p)
              for p in sc.fixed_n_panel_counts]
    kinds = list(ALL_KINDS)
    result = run_sweep(
        cfg.room, points, sc.n_users, kinds, _params(cfg),
        cfg.monte_carlo.placements, cfg.monte_carlo.fading_draws,
        cfg.monte_carlo.master_seed, plane_height_m=sc.plane_height_m,
    )
    rows = _sweep_rows_with_latency(cfg, points, kinds, result)
    csv_path, figures = _write_sweep_outputs(
        cfg, out_dir, rows, "sweep_fixed_n",
        f"fixed panel size N={sc.antennas_per_panel}, K={sc.n_users}")

    k_values = sorted({sc.n_users, 128})
    ratio_rows = zf_mrc_latency_ratio_rows(cfg, k_values)
    ratio_path = out_dir / "zf_mrc_latency_ratio.csv"
    with open(ratio_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(RATIO_CSV_HEADER)
        w.writerows([r[c] for c in RATIO_CSV_HEADER] for r in ratio_rows)

    echo_config(out_dir, "sweep-fixed-n", cfg, _model(cfg), beta=result.beta)
    return {"rows": rows, "ratio_rows": ratio_rows, "result": result,
            "csv": csv_path, "ratio_csv": ratio_path, "figures": figures}


def run_chain_trace(cfg: ExperimentConfig, out_dir) -> dict:
    """One fully materialized daisy-chain pass: geometry and channel dumps,
    per-hop records, and the final estimate checked against the centralized
    equalizer on the same draw."""
    out_dir = _ensure_dir(out_dir)
    sc = cfg.scenario
    ct = cfg.chain_trace
    kind = EqualizerKind.parse(ct.kind)
    params = _params(cfg)
    master = cfg.monte_carlo.master_seed

    array = build_wall_layout(cfg.room, sc.total_antennas, ct.panel_count,
                              sc.plane_height_m)
    ues = place_users(cfg.room, sc.n_users, sc.plane_height_m,
                      rng_seed=derived_seed(master, 0, 0))
    los = build_los_matrix(array, ues, cfg.room.wavelength_m)
    beta = normalize_scenario_set([los], params)
    h = beta * sample_channel(los, params, rng_seed=derived_seed(master, 1, 0, 0)).h

    sym_rng = np.random.default_rng(derived_seed(master, 2, 0))
    symbols = (sym_rng.standard_normal(sc.n_users)
               + 1j * sym_rng.standard_normal(sc.n_users)) / np.sqrt(2)
    y = receive_vector(h, symbols, params.noise_power,
                       rng_seed=derived_seed(master, 3, 0))

    topology = _topology(cfg, ct.panel_count)
    inputs = split_panels(h, y, ct.panel_count)
    z_chain, hops = run_chain(topology, inputs, kind, params.noise_power)
    z_central = equalizer_matrix(kind, h, params.noise_power) @ y
    rel_err = float(np.linalg.norm(z_chain - z_central)
                    / max(np.linalg.norm(z_central), 1e-300))

    write_geometry_csv(array, out_dir / "geometry.csv")
    save_channel_matrix(h, out_dir / "channel.bin")
    hops_path = out_dir / "chain_trace.csv"
    write_hops_csv(hops, hops_path)

    summary = {
        "kind": kind.value,
        "panel_count": ct.panel_count,
        "total_antennas": sc.total_antennas,
        "n_users": sc.n_users,
        "payload_complex_values_per_hop": payload_complex_values(kind, sc.n_users),
        "hop_count": topology.hop_count,
        "fronthaul_total_us": hops[-1].cumulative_latency_us if hops else 0.0,
        "final_vs_central_rel_err": rel_err,
        "normalization_beta": beta,
    }
    with open(out_dir / "chain_summary.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")

    figures = []
    if cfg.figures and hops:
        hop_dicts = [{"hop_index": i, "payload_bytes": hp.payload_bytes,
                      "cumulative_latency_us": hp.cumulative_latency_us}
                     for i, hp in enumerate(hops)]
        fig_path = out_dir / "chain_trace.png"
        plots.plot_chain_trace(hop_dicts, fig_path, kind.value)
        figures.append(fig_path)

    echo_config(out_dir, "chain-trace", cfg, _model(cfg), beta=beta)
    return {"summary": summary, "hops": hops, "csv": hops_path,
            "figures": figures}


def run_validate(cfg: ExperimentConfig, out_dir) -> dict:
    """Cross-module invariant suite; the report CSV carries one row per check."""
    out_dir = _ensure_dir(out_dir)
    results = run_all_checks(fuzz_instances=cfg.fuzz_instances)
    report_path = out_dir / "validation_report.csv"
    with open(report_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["check", "status", "detail"])
        for r in results:
            w.writerow([r.name, r.status, r.detail])
    echo_config(out_dir, "validate", cfg, _model(cfg), beta=None)
    return {"results": results, "csv": report_path,
            "passed": all(r.passed for r in results)}
