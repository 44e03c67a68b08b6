"""Figures written next to CLI reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def choi_spectrum_figure(spectra, path, title="Choi spectrum"):
    """One stem panel per domain block; negative eigenvalues in red."""
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(spectra), figsize=(2.6 * len(spectra) + 0.6, 2.4), squeeze=False)
        for i, (ax, w) in enumerate(zip(axes[0], spectra)):
            w = np.asarray(w)
            x = np.arange(len(w))
            colors = np.where(w < 0, "tab:red", "tab:blue")
            ax.vlines(x, 0, w, colors=colors)
            ax.scatter(x, w, c=colors, s=12, zorder=3)
            ax.axhline(0, color="0.6", lw=0.6)
            ax.set_xlabel("index")
            ax.set_title(f"block {i}")
        axes[0][0].set_ylabel("eigenvalue")
        fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def defects_figure(defects: dict, thresholds: dict, path, title="defects"):
    """Log-scale bars of each defect against its threshold."""
    names = list(defects)
    vals = np.array([max(float(defects[n]), 1e-18) for n in names])
    tols = np.array([thresholds[n] for n in names])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.8, 0.35 * len(names) + 1.2))
        y = np.arange(len(names))
        ax.barh(y, vals, color=np.where(vals <= tols, "tab:green", "tab:red"), left=1e-18)
        ax.scatter(tols, y, marker="|", s=120, color="k", label="threshold", zorder=3)
        ax.set_xscale("log")
        ax.set_yticks(y, names)
        ax.set_xlim(1e-18, max(1.0, vals.max() * 10))
        ax.legend(loc="lower right", frameon=False)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
