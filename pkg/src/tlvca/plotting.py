"""PNG figures for the CLI result tables (matplotlib, headless)."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _series(rows: Sequence[dict], key: str, x: str, y: str):
    groups = defaultdict(list)
    for r in rows:
        groups[r[key]].append((r[x], r[y]))
    return {k: sorted(v) for k, v in sorted(groups.items())}


def _positive(pts):
    return [(a, b) for a, b in pts if b is not None and not math.isnan(b) and b > 0]


def plot_decode(rows: Sequence[dict], path: str) -> None:
    """Failure probability and mean decoding time against L, one curve per p0."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for p0, pts in _series(rows, "p0", "L", "p_fail").items():
        pts = _positive(pts)
        if pts:
            ax1.plot(*zip(*pts), "o-", label=f"p0={p0:g}")
    for p0, pts in _series(rows, "p0", "L", "mean_tdec").items():
        pts = _positive(pts)
        if pts:
            ax2.plot(*zip(*pts), "o-", label=f"p0={p0:g}")
    ax1.set(xlabel="L", ylabel="P_fail", yscale="log", title=f"t_max = {rows[0]['tmax_policy']}")
    ax2.set(xlabel="L", ylabel="mean t_dec")
    for ax in (ax1, ax2):
        if ax.lines:
            ax.legend(fontsize=7)
    _save(fig, path)


def plot_ff(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    groups = defaultdict(list)
    for r in rows:
        groups[(r["mode"], r["p0"])].append((r["L"], r["mean_tff"], r["stderr_tff"]))
    for (mode, p0), pts in sorted(groups.items()):
        pts = [p for p in sorted(pts) if p[1] > 0 and not math.isnan(p[1])]
        if pts:
            L, m, s = zip(*pts)
            ax.errorbar(L, m, yerr=[0 if math.isnan(v) else v for v in s], fmt="o-", label=f"{mode} p0={p0:g}")
    ax.set(xlabel="L", ylabel="<T_ff>", yscale="log")
    if ax.lines:
        ax.legend(fontsize=7)
    _save(fig, path)


def plot_circuit(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    for dl, pts in _series(rows, "dl_policy", "L", "p_fail").items():
        pts = _positive(pts)
        if pts:
            ax.plot(*zip(*pts), "o-", label=f"D_L {dl}")
    ax.set(xlabel="L", ylabel="failure per step", yscale="log")
    if ax.lines:
        ax.legend(fontsize=7)
    _save(fig, path)


def plot_eroder(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    l = [r["l"] for r in rows]
    ax.step(l, [r["t_dec"] for r in rows], where="mid", label="measured")
    ax.plot(l, [r["bound_3l4"] for r in rows], "--", label="floor(3l/4)+1")
    ax.plot(l, [r["bound_ml"] for r in rows], ":", label="m l")
    ax.set(xlabel="cluster diameter l", ylabel="t_dec")
    ax.legend(fontsize=7)
    _save(fig, path)


def plot_sparse(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    pts = _positive([(r["level"], r["uncovered_frac"]) for r in rows])
    if pts:
        ax.plot(*zip(*pts), "o-", label="uncovered fraction")
    ax.plot([r["level"] for r in rows], [r["bound_clamped"] for r in rows], "--", label="bound (clamped)")
    ax.set(xlabel="level l", ylabel="fraction", yscale="log")
    ax.legend(fontsize=7)
    _save(fig, path)


def plot_bounds(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    for q, pts in _series([r for r in rows if r["L"] != ""], "quantity", "L", "raw").items():
        pts = _positive(pts)
        if pts:
            ax.plot(*zip(*pts), "o-", label=q)
    ax.set(xlabel="L", ylabel="bound (raw)", xscale="log", yscale="log")
    if ax.lines:
        ax.legend(fontsize=7)
    _save(fig, path)


def plot_fixed_points(rows: Sequence[dict], path: str) -> None:
    fig, ax = plt.subplots(figsize=(5, max(1.5, 0.3 * len(rows) + 1)))
    grid = [[int(c) for c in r["state"]] for r in rows] or [[0]]
    ax.imshow(grid, cmap="Greys", aspect="auto", interpolation="nearest")
    ax.set(xlabel="site", ylabel="fixed point", title=f"{len(rows)} fixed points")
    _save(fig, path)


PLOTTERS = {
    "decode": plot_decode,
    "ff": plot_ff,
    "circuit": plot_circuit,
    "eroder": plot_eroder,
    "sparse": plot_sparse,
    "bounds": plot_bounds,
    "fixed-points": plot_fixed_points,
}
