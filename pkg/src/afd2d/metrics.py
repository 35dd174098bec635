"""Image quality indicators: Bhattacharyya distance, PSNR and MSSIM."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


@dataclass(frozen=True)
class Histogram:
    bins: np.ndarray
    range: tuple[float, float] = (0.0, 256.0)


@dataclass(frozen=True)
class MetricsReport:
    bhattacharyya: float
    psnr_db: float
    mssim: float


def histogram(image: np.ndarray, bins: int = 256, lo: float = 0.0, hi: float = 256.0) -> Histogram:
    """Pixel histogram after clamping values to ``[lo, hi - 1]``."""
    vals = np.clip(np.asarray(image, float), lo, hi - 1.0)
    counts, _ = np.histogram(vals, bins=bins, range=(lo, hi))
    return Histogram(counts.astype(float), (lo, hi))


def bhattacharyya(H1, H2) -> float:
    """``sqrt(1 - sum(sqrt(H1*H2)) / sqrt(sum(H1) * sum(H2)))``.

    Accepts :class:`Histogram` objects or plain arrays.  Histograms need not
    be normalised.
    """
    h1 = np.asarray(getattr(H1, "bins", H1), float)
    h2 = np.asarray(getattr(H2, "bins", H2), float)
    if h1.shape != h2.shape:
        raise ValueError(f"bin count mismatch: {h1.shape} vs {h2.shape}")
    if np.any(h1 < 0) or np.any(h2 < 0):
        raise ValueError("histogram bins must be nonnegative")
    s1, s2 = h1.sum(), h2.sum()
    if s1 <= 0 or s2 <= 0:
        raise ValueError("histograms must have positive mass")
    bc = np.sum(np.sqrt(h1 * h2)) / math.sqrt(s1 * s2)
    return math.sqrt(min(max(1.0 - bc, 0.0), 1.0))


def psnr(F: np.ndarray, G: np.ndarray, L: float = 255.0) -> float:
    """Peak signal-to-noise ratio in dB, ``10 log10(L^2 / MSE)``; ``inf`` if equal."""
    F = np.asarray(F, float)
    G = np.asarray(G, float)
    if F.shape != G.shape:
        raise ValueError(f"shape mismatch: {F.shape} vs {G.shape}")
    if L <= 0:
        raise ValueError("peak value must be positive")
    mse = float(np.mean((F - G) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(L * L / mse)


def gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def _filter_valid(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    win = sliding_window_view(X, w.shape)
    return np.einsum("ijkl,kl->ij", win, w)


def ssim_map(F: np.ndarray, G: np.ndarray, L: float = 255.0, K1: float = 0.01,
             K2: float = 0.03, size: int = 11, sigma: float = 1.5) -> np.ndarray:
    """Local SSIM for every window lying fully inside the image."""
    F = np.asarray(F, float)
    G = np.asarray(G, float)
    if F.shape != G.shape:
        raise ValueError(f"shape mismatch: {F.shape} vs {G.shape}")
    if min(F.shape) < size:
        raise ValueError(f"image {F.shape} is smaller than the {size}x{size} window")
    w = gaussian_window(size, sigma)
    C1, C2 = (K1 * L) ** 2, (K2 * L) ** 2
    mu1, mu2 = _filter_valid(F, w), _filter_valid(G, w)
    s11 = _filter_valid(F * F, w) - mu1 * mu1
    s22 = _filter_valid(G * G, w) - mu2 * mu2
    s12 = _filter_valid(F * G, w) - mu1 * mu2
    return ((2 * mu1 * mu2 + C1) * (2 * s12 + C2)) / ((mu1 ** 2 + mu2 ** 2 + C1) * (s11 + s22 + C2))


def mssim(F: np.ndarray, G: np.ndarray, L: float = 255.0) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03."""
    return float(np.mean(ssim_map(F, G, L)))


def evaluate(reference: np.ndarray, approx: np.ndarray, bins: int = 256, L: float = 255.0) -> MetricsReport:
    """All three indicators of ``approx`` against ``reference``.

    Only the histogram sees clamped pixel values (see :func:`histogram`);
    PSNR and MSSIM use the raw approximation.
    """
    approx = np.asarray(approx, float)
    return MetricsReport(
        bhattacharyya(histogram(approx, bins), histogram(reference, bins)),
        psnr(reference, approx, L),
        mssim(reference, approx, L),
    )
