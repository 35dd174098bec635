"""Figures written next to the CLI's CSV tables (Agg backend, PNG files)."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}

MARKERS = {"fd": "s", "ga": "^", "oga": "v", "afd": "o", "preoga": "D"}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    # No timestamp or version metadata, so reruns give identical files.
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_error_curves(terms: Sequence[int], curves: Mapping[str, Sequence[float]],
                      path: str | Path, ylabel: str = "relative error (dB)") -> Path:
    """One line per engine against the number of effective terms."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        for name, ys in curves.items():
            ys = np.asarray(ys, float)
            ax.plot(terms, np.where(np.isfinite(ys), ys, np.nan), marker=MARKERS.get(name, "."),
                    ms=3, lw=1, label=name)
        ax.set_xlabel("number of terms")
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_bounds(ns: Sequence[int], observed: Sequence[float], bounds: Mapping[str, Sequence[float]],
                path: str | Path, title: str = "") -> Path:
    """Observed remainder norms against every bound curve on a log scale."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3.2))
        ax.semilogy(ns, np.maximum(observed, 1e-300), "k.-", lw=1, label="observed")
        for name, ys in bounds.items():
            ax.semilogy(ns, ys, lw=1, label=name)
        ax.set_xlabel("n")
        ax.set_ylabel("norm of remainder")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_image_grid(images: Mapping[str, np.ndarray], path: str | Path, ncols: int = 4,
                    vmin: float = 0.0, vmax: float = 255.0) -> Path:
    """Labelled grayscale panels, row-major in mapping order."""
    n = len(images)
    ncols = max(1, min(ncols, n))
    nrows = -(-n // ncols)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(nrows, ncols, figsize=(1.9 * ncols, 2.0 * nrows), squeeze=False)
        for ax in axes.ravel():
            ax.axis("off")
        for ax, (label, img) in zip(axes.ravel(), images.items()):
            ax.imshow(img, cmap="gray", vmin=vmin, vmax=vmax, interpolation="nearest")
            ax.set_title(label, fontsize=8)
        return _save(fig, path)
