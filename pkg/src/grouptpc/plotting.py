"""PNG figures for the CLI report paths (non-interactive Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_bler(rows, path, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 4))
    x = [r["eb_n0_db"] for r in rows]
    y = [r["bler"] if r["bler"] > 0 else float("nan") for r in rows]
    label = f"{rows[0]['scheme']}/{rows[0]['mode']}" if rows else ""
    ax.semilogy(x, y, "o-", label=label)
    ax.set_xlabel("Eb/N0 [dB]")
    ax.set_ylabel("BLER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    ax.set_title(title)
    _save(fig, path)


def plot_rates(rows, path, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for scheme in ("gw", "bw", "bs"):
        pts = [(r["eb_n0_db"], r["rate"]) for r in rows if r["scheme"] == scheme]
        if pts:
            ax.plot(*zip(*pts), "o-", label=scheme)
    ax.set_xlabel("Eb/N0 [dB]")
    ax.set_ylabel("rate [bits per coded bit]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title(title)
    _save(fig, path)


def plot_thresholds(rows, path, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = [f"{r['modulation']}{1 << int(r['ell'])}" for r in rows]
    w = 0.35
    xs = range(len(rows))
    ax.bar([i - w / 2 for i in xs], [r["gain_bw_gw"] for r in rows], w, label="bw - gw")
    ax.bar([i + w / 2 for i in xs], [r["gain_bs_bw"] for r in rows], w, label="bs - bw")
    ax.set_xticks(list(xs), labels)
    ax.set_ylabel("Eb/N0 gain [dB]")
    ax.legend()
    ax.set_title(title)
    _save(fig, path)


def plot_endo(rows, path, title: str = ""):
    fig, ax = plt.subplots(figsize=(5, 4))
    for nk in sorted({(r["n"], r["k"]) for r in rows}):
        sel = [r for r in rows if (r["n"], r["k"]) == nk]
        ax.errorbar([r["g"] for r in sel], [r["gap"] for r in sel],
                    yerr=[3 * r["std_err"] for r in sel], marker="o", capsize=3,
                    label=f"({nk[0]},{nk[1]})")
    ax.set_xlabel("group size g [bits]")
    ax.set_ylabel("I_g - I_b [bits per coded bit]")
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title(title)
    _save(fig, path)
