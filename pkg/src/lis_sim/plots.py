"""Figure rendering for the experiment reports.

Everything draws to files through the Agg backend; no window is ever
opened. Each function takes already-computed rows so the plotting stays a
pure presentation step on top of the CSV data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KIND_COLORS = {"mrc": "tab:blue", "zf": "tab:orange", "mmse": "tab:green"}
KIND_LABELS = {"mrc": "MRC", "zf": "ZF", "mmse": "MMSE"}

_STACK = [("wait_us", "wait", "#9e9e9e"),
          ("frontend_us", "front end", "#64b5f6"),
          ("local_us", "local math", "#1976d2"),
          ("fronthaul_us", "fronthaul", "#ffb300"),
          ("cpu_us", "central solve", "#e53935"),
          ("air_us", "air", "#8e24aa")]


def plot_latency_breakdown(rows: list[dict], path) -> None:
    """Stacked bars, one per (kind, K) case, components in fixed order."""
    labels = [f"{KIND_LABELS.get(r['kind'], r['kind'])}\nK={r['k']}" for r in rows]
    x = range(len(rows))
    fig, ax = plt.subplots(figsize=(1.8 + 1.1 * len(rows), 4.2))
    bottom = [0.0] * len(rows)
    for key, label, color in _STACK:
        heights = [float(r[key]) for r in rows]
        if not any(heights):
            continue
        ax.bar(x, heights, bottom=bottom, label=label, color=color, width=0.6)
        bottom = [b + h for b, h in zip(bottom, heights)]
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel("latency (us)")
    ax.set_title("detection latency breakdown")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_se_vs_panels(rows: list[dict], path, title: str,
                      percentile_key: str = "p5_se") -> None:
    """Mean (solid) and low-percentile (dashed) SE per user over P, one
    curve pair per equalizer."""
    kinds = sorted({r["kind"] for r in rows},
                   key=lambda k: ["mrc", "zf", "mmse"].index(k))
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for kind in kinds:
        pts = sorted((r for r in rows if r["kind"] == kind),
                     key=lambda r: int(r["p"]))
        p = [int(r["p"]) for r in pts]
        color = KIND_COLORS.get(kind)
        ax.plot(p, [float(r["mean_se"]) for r in pts], "o-", color=color,
                label=f"{KIND_LABELS.get(kind, kind)} mean")
        if percentile_key in pts[0]:
            ax.plot(p, [float(r[percentile_key]) for r in pts], "s--",
                    color=color, alpha=0.6,
                    label=f"{KIND_LABELS.get(kind, kind)} 5th pct")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("panel count P")
    ax.set_ylabel("SE per user (bit/s/Hz)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_se_vs_latency(se_rows: list[dict], latency_rows: list[dict],
                       path, title: str) -> None:
    """The trade-off view: mean SE against total detection latency, panel
    count annotated at each marker."""
    lat = {(r["kind"], int(r["p"])): float(r["total_us"]) for r in latency_rows}
    kinds = sorted({r["kind"] for r in se_rows},
                   key=lambda k: ["mrc", "zf", "mmse"].index(k))
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for kind in kinds:
        pts = sorted((r for r in se_rows if r["kind"] == kind),
                     key=lambda r: int(r["p"]))
        xs = [lat[(kind, int(r["p"]))] for r in pts]
        ys = [float(r["mean_se"]) for r in pts]
        ax.plot(xs, ys, "o-", color=KIND_COLORS.get(kind),
                label=KIND_LABELS.get(kind, kind))
        for r, x, y in zip(pts, xs, ys):
            ax.annotate(f"P={r['p']}", (x, y), fontsize=7,
                        xytext=(3, 3), textcoords="offset points")
    ax.set_xlabel("total detection latency (us)")
    ax.set_ylabel("mean SE per user (bit/s/Hz)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_chain_trace(hops: list[dict], path, kind: str) -> None:
    """Cumulative fronthaul latency along the chain with payload sizes."""
    idx = [int(h["hop_index"]) for h in hops]
    cum = [float(h["cumulative_latency_us"]) for h in hops]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.step([-1] + idx, [0.0] + cum, where="post",
            color=KIND_COLORS.get(kind, "tab:blue"))
    ax.plot(idx, cum, "o", color=KIND_COLORS.get(kind, "tab:blue"))
    for h, x, y in zip(hops, idx, cum):
        ax.annotate(f"{h['payload_bytes']} B", (x, y), fontsize=7,
                    xytext=(0, 6), textcoords="offset points", ha="center")
    ax.set_xlabel("hop index")
    ax.set_ylabel("cumulative fronthaul latency (us)")
    ax.set_title(f"daisy-chain aggregation trace ({KIND_LABELS.get(kind, kind)})")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
