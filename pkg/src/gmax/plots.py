"""Headless figure rendering for the experiment CSV outputs.

Each ``render_*`` function takes the already-computed row lists (same order
and content as the CSV) and writes a PNG.  The figures are companions to the
delimited data, not the primary artifact, so styling stays minimal.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_fig1",
    "render_fig2",
    "render_bounds_table",
    "render_delta_study",
    "render_limit_h0",
    "render_thm3_demo",
]


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_fig1(rows, path: str) -> None:
    """One curve of E max estimates over H per grid resolution n."""
    by_n: dict[int, list] = {}
    for H, n, mean, *_ in rows:
        if mean is not None:
            by_n.setdefault(int(n), []).append((H, mean))
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for n in sorted(by_n):
        pts = sorted(by_n[n])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", lw=1,
                label=f"n={n}")
    ax.set_xlabel("H")
    ax.set_ylabel("estimated E max on grid")
    ax.legend(fontsize=7, ncol=2)
    _save(fig, path)


def render_fig2(rows, path: str) -> None:
    H = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(H, [r[1] for r in rows], "k--", label="1/(5 sqrt H)")
    ax.errorbar(H, [r[2] for r in rows], yerr=[3 * r[3] for r in rows],
                fmt="o-", ms=3, lw=1, label="MC estimate")
    ax.set_xlabel("H")
    ax.set_ylabel("expected grid maximum")
    ax.legend()
    _save(fig, path)


def render_bounds_table(rows, path: str) -> None:
    """Lower/upper envelopes for E max as functions of H (first n only)."""
    n0 = rows[0][1] if rows else None
    sel = [r for r in rows if r[1] == n0]
    H = [r[0] for r in sel]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.plot(H, [r[2] for r in sel], label="lower")
    ax.plot(H, [r[3] for r in sel], label="upper")
    ax.plot(H, [r[4] for r in sel], label="upper (H >= 1/2)")
    ax.plot(H, [r[5] for r in sel], label=f"grid lower (n={n0})")
    ax.set_yscale("log")
    ax.set_xlabel("H")
    ax.set_ylabel("bound value")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_delta_study(rows, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    hs = sorted({r[0] for r in rows})
    for H in hs:
        sel = [r for r in rows if r[0] == H]
        ns = [r[1] for r in sel]
        ax.plot(ns, [r[2] for r in sel], "o-", label=f"gap estimate, H={H:g}")
        if any(r[4] is not None for r in sel):
            ax.plot(ns, [r[4] for r in sel], "--", label=f"gap bound, H={H:g}")
        if any(r[5] is not None for r in sel):
            ax.plot(ns, [r[5] for r in sel], ":", label="0.5826/sqrt(n)")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("coarse grid n")
    ax.set_ylabel("nested-grid gap")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_limit_h0(rows, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for n in sorted({r[0] for r in rows}):
        sel = [r for r in rows if r[0] == n]
        H = [r[1] for r in sel]
        ax.plot(H, [r[2] for r in sel], "o-", label=f"estimate, n={n}")
        ax.axhline(sel[0][3], ls="--", lw=0.8, color="gray")
    ax.set_xscale("log")
    ax.set_xlabel("H")
    ax.set_ylabel("expected grid maximum")
    ax.legend(fontsize=8)
    _save(fig, path)


def render_thm3_demo(rows, path: str) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ga = [r for r in rows if r[0] == "grid_growth"]
    fx = [r for r in rows if r[0] == "fixed_n"]
    ch = [r for r in rows if r[0] == "chaining"]
    if ga:
        H = [r[1] for r in ga]
        ax1.plot(H, [r[4] for r in ga], "o-", label="small-H lower bound, n(H)")
        ax1.plot(H, [r[5] for r in ga], "--", label="lower bound for E sup")
    if fx:
        H = [r[1] for r in fx]
        ax1.plot(H, [r[7] for r in fx], "s-", label=f"estimate, fixed n={fx[0][2]}")
        ax1.axhline(fx[0][9], ls=":", color="gray", label="H -> 0 limit")
    ax1.set_xscale("log")
    ax1.set_xlabel("H")
    ax1.set_ylabel("value")
    ax1.legend(fontsize=7)
    if ch:
        H = [r[1] for r in ch]
        ax2.plot(H, [r[11] for r in ch], "o-")
        ax2.set_xscale("log")
        ax2.set_xlabel("H")
        ax2.set_ylabel("chaining bound x sqrt(H)")
    _save(fig, path)
