"""Figure recipes: how each anirabi artifact becomes a figure.

Recipes only rearrange what the CLI files already contain; pole and crossing
abscissas are read from the embedded metadata or the exceptional rows, never
recomputed here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvdata import DataError, Table, read_table, require

SECTOR_COLOR = {"plus": "tab:green", "minus": "tab:purple", "eps": "tab:blue",
                "none": "black"}


@dataclass
class FigureRecipe:
    """One input-validation + rendering rule set."""

    figure_id: str
    description: str
    n_inputs: int
    renderer: callable = field(repr=False)

    def render(self, paths, out_path):
        if len(paths) != self.n_inputs:
            raise DataError(
                f"{self.figure_id} takes {self.n_inputs} input file(s), "
                f"got {len(paths)}"
            )
        fig, info = self.renderer(paths)
        fig.savefig(out_path, dpi=150)
        plt.close(fig)
        return info


def _scan_sector(table: Table, sector: str):
    xs, re, im = [], [], []
    for row_x, row_re, row_im, row_s in zip(
        table.floats("x"), table.floats("re_G"), table.floats("im_G"),
        table.strings("sector"),
    ):
        if row_s == sector:
            xs.append(row_x)
            re.append(row_re)
            im.append(row_im)
    return np.array(xs), np.array(re), np.array(im)


def _meta_poles(table: Table):
    fwd = [float(v) for v in table.meta.get("poles_forward", "").split()]
    bwd = [float(v) for v in table.meta.get("poles_backward", "").split()]
    return sorted(set(fwd) | set(bwd))


def render_broken_symmetry_scan(paths):
    """Complex G scan with the symmetry-breaking field on: real and imaginary
    parts share zeros exactly at the eigenvalue abscissas."""
    table = read_table(paths[0])
    require(table, paths[0], command="gscan",
            columns=("x", "re_G", "im_G", "sector"), epsilon="nonzero")
    xs, re, im = _scan_sector(table, "eps")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.plot(xs, re, color="tab:blue", lw=1.4, label="Re G")
    ax.plot(xs, im, color="tab:red", ls="--", lw=1.4, label="Im G")
    span = np.nanpercentile(np.abs(re), 90)
    ax.set_ylim(-4 * span, 4 * span)
    ax.set_xlabel("x")
    ax.set_ylabel("G(x)")
    ax.legend(loc="upper right")
    ax.set_title("broken-symmetry transcendental function")
    fig.tight_layout()
    return fig, {}


def render_sector_scan(paths):
    """Z2 sector functions with dotted verticals at the pole ladder."""
    table = read_table(paths[0])
    require(table, paths[0], command="gscan",
            columns=("x", "re_G", "im_G", "sector"), epsilon="zero")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.axhline(0.0, color="0.8", lw=0.8)
    styles = {"plus": ("-", "even sector"), "minus": ("--", "odd sector")}
    spans = []
    for sector, (ls, label) in styles.items():
        xs, re, _ = _scan_sector(table, sector)
        if len(xs) == 0:
            raise DataError(f"{paths[0]}: no rows for the {sector} sector")
        ax.plot(xs, re, ls=ls, color=SECTOR_COLOR[sector], lw=1.4, label=label)
        spans.append(np.nanpercentile(np.abs(re), 90))
    xs_all = table.floats("x")
    poles = [p for p in _meta_poles(table) if min(xs_all) <= p <= max(xs_all)]
    for p in poles:
        ax.axvline(p, color="0.4", ls=":", lw=1.0)
    span = max(spans)
    ax.set_ylim(-4 * span, 4 * span)
    ax.set_xlabel("x")
    ax.set_ylabel("G(x)")
    ax.legend(loc="upper right")
    ax.set_title("parity sector functions and their poles")
    fig.tight_layout()
    return fig, {"pole_lines": poles}


def _sweep_levels(table: Table):
    out = {}
    name = table.columns[0]
    for val, level, energy, sector, kind in zip(
        table.floats(name), table.floats("level"), table.floats("energy"),
        table.strings("sector"), table.strings("kind"),
    ):
        if kind == "exceptional" and level < 0:
            out.setdefault("crossings", []).append((val, energy))
        else:
            out.setdefault(int(level), []).append((val, energy, sector))
    return name, out


def render_broken_symmetry_sweep(paths):
    """Levels along a sweep with the symmetry-breaking field on; no
    degeneracies anywhere."""
    table = read_table(paths[0])
    require(table, paths[0], command="spectrum",
            columns=("level", "energy", "sector", "kind"), epsilon="nonzero")
    name, levels = _sweep_levels(table)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for level, rows in sorted(k for k in levels.items() if isinstance(k[0], int)):
        rows.sort()
        ax.plot([r[0] for r in rows], [r[1] for r in rows], lw=1.4)
    ax.set_xlabel(name)
    ax.set_ylabel("energy")
    ax.set_title("spectrum with broken parity symmetry")
    fig.tight_layout()
    return fig, {}


def render_sector_sweep(paths):
    """Two-sector spectrum with exceptional crossings marked."""
    table = read_table(paths[0])
    require(table, paths[0], command="spectrum",
            columns=("level", "energy", "sector", "kind"), epsilon="zero")
    name, levels = _sweep_levels(table)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    seen = set()
    for level, rows in sorted(k for k in levels.items() if isinstance(k[0], int)):
        rows.sort()
        for sector in ("plus", "minus"):
            pts = [(v, e) for v, e, s in rows if s == sector]
            if not pts:
                continue
            label = None
            if sector not in seen:
                seen.add(sector)
                label = {"plus": "even parity", "minus": "odd parity"}[sector]
            ax.plot([p[0] for p in pts], [p[1] for p in pts], ".",
                    ms=4, color=SECTOR_COLOR[sector], label=label)
    crossings = levels.get("crossings", [])
    for v, e in crossings:
        ax.plot(v, e, "o", ms=9, mfc="none", mec="black", mew=1.4)
        ax.annotate(f"({v:.4f}, {e:.4f})", (v, e), textcoords="offset points",
                    xytext=(6, 6), fontsize=8)
    ax.set_xlabel(name)
    ax.set_ylabel("energy")
    ax.legend(loc="best")
    ax.set_title("parity-resolved spectrum with level crossings")
    fig.tight_layout()
    return fig, {"crossings": crossings}


def render_fit_overlay(paths):
    """Spectroscopy rows against the fitted model transitions."""
    table = read_table(paths[0])
    require(table, paths[0], command="fit",
            columns=("bias_mPhi0", "k", "freq_data_GHz", "freq_model_GHz"))
    bias = np.array(table.floats("bias_mPhi0"))
    ks = np.array(table.floats("k"), dtype=int)
    data = np.array(table.floats("freq_data_GHz"))
    model = np.array(table.floats("freq_model_GHz"))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for k in sorted(set(ks)):
        sel = ks == k
        order = np.argsort(bias[sel])
        ax.plot(bias[sel][order], model[sel][order], "-", lw=1.2,
                label=f"model k={k}")
        ax.plot(bias[sel][order], data[sel][order], "o", ms=3, mfc="none")
    lam = table.meta.get("lambda_hat", "?")
    ax.set_xlabel("flux bias (mPhi0)")
    ax.set_ylabel("transition frequency (GHz)")
    ax.set_title(f"spectroscopy fit, anisotropy = {float(lam):.4f}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    return fig, {"lambda_hat": float(lam)}


def render_entropy_sweep(paths):
    """Ground energy (upper) and entropy (lower) with the jump marked."""
    table = read_table(paths[0])
    require(table, paths[0], command="entropy",
            columns=("g", "energy", "parity", "entropy"), epsilon="zero")
    g = np.array(table.floats("g"))
    energy = np.array(table.floats("energy"))
    s = np.array(table.floats("entropy"))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5.5), sharex=True)
    ax1.plot(g, energy, "-", color="tab:blue", lw=1.4)
    ax1.set_ylabel("ground energy")
    ax2.plot(g, s, ".-", color="tab:orange", lw=1.2)
    ax2.set_ylabel("entropy (nats)")
    ax2.set_xlabel("g")
    jumps = np.abs(np.diff(s))
    marker = None
    if len(jumps) and np.max(jumps) > 0.05:
        i = int(np.argmax(jumps))
        marker = 0.5 * (g[i] + g[i + 1])
        for ax in (ax1, ax2):
            ax.axvline(marker, color="0.4", ls=":", lw=1.0)
    fig.suptitle("ground-state entanglement across the level crossing")
    fig.tight_layout()
    return fig, {"jump_marker": marker}


RECIPES = {
    "fig1": FigureRecipe(
        "fig1", "complex G scan, broken symmetry (gscan, epsilon != 0)", 1,
        render_broken_symmetry_scan,
    ),
    "fig2": FigureRecipe(
        "fig2", "sector G functions with pole ladder (gscan, epsilon = 0)", 1,
        render_sector_scan,
    ),
    "fig3a": FigureRecipe(
        "fig3a", "spectrum sweep, broken symmetry (spectrum, epsilon != 0)", 1,
        render_broken_symmetry_sweep,
    ),
    "fig3b": FigureRecipe(
        "fig3b", "parity-resolved spectrum sweep with crossings (spectrum)", 1,
        render_sector_sweep,
    ),
    "fig4": FigureRecipe(
        "fig4", "spectroscopy data vs fitted model (fit --curves)", 1,
        render_fit_overlay,
    ),
    "fig5": FigureRecipe(
        "fig5", "ground energy and entropy discontinuity (entropy)", 1,
        render_entropy_sweep,
    ),
}
