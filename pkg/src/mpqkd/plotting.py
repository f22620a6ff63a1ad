"""Figure rendering for sweep results (written to files, never shown)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _grid_from_rows(rows, protocol: str):
    sel = [r for r in rows if r["protocol"] == protocol]
    etas = sorted({r["eta"] for r in sel})
    taus = sorted({r["tau"] for r in sel})
    z = np.full((len(taus), len(etas)), np.nan)
    ei = {e: i for i, e in enumerate(etas)}
    ti = {t: i for i, t in enumerate(taus)}
    for r in sel:
        z[ti[r["tau"]], ei[r["eta"]]] = r["cs_min"]
    return np.array(etas), np.array(taus), z


def render_sweep_heatmap(rows, path: str):
    """One cs_min(eta, tau) panel per protocol present in the rows."""
    protocols = sorted({r["protocol"] for r in rows})
    fig, axes = plt.subplots(1, len(protocols),
                             figsize=(5.2 * len(protocols), 4.0),
                             squeeze=False)
    for ax, proto in zip(axes[0], protocols):
        etas, taus, z = _grid_from_rows(rows, proto)
        pm = ax.pcolormesh(etas, taus, z, shading="nearest", cmap="viridis")
        fig.colorbar(pm, ax=ax, label="secure bits per pulse")
        ax.set_xlabel(r"overall transmission $\eta$")
        ax.set_ylabel(r"interaction time $\tau$")
        ax.set_title(f"{proto} protocol")
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def render_rate_figure(curve_rows, optima, crossover_eta, path: str):
    """Secure rate vs transmission for both protocols at their optimal tau.

    curve_rows: sweep-style rows holding one tau per protocol.
    optima: {protocol: (tau_star, cs_at_star)}.
    """
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    styles = {"multi": {"color": "tab:blue"},
              "standard": {"color": "tab:orange", "ls": "--"}}
    for proto, (tau_star, _) in sorted(optima.items()):
        pts = sorted((r["eta"], r["cs_min"]) for r in curve_rows
                     if r["protocol"] == proto)
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        ax.plot(x, y, label=rf"{proto} ($\tau^*={tau_star:.2f}$)",
                **styles.get(proto, {}))
    if crossover_eta is not None and not math.isnan(crossover_eta):
        ax.axvline(crossover_eta, color="gray", lw=0.8, ls=":")
        ax.annotate(rf"crossover $\eta \approx {crossover_eta:.2f}$",
                    xy=(crossover_eta, ax.get_ylim()[1] * 0.05),
                    fontsize=8, rotation=90, va="bottom", ha="right")
    ax.set_xlabel(r"overall transmission $\eta$")
    ax.set_ylabel("secure bits per pulse")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
