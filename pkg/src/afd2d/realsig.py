"""Decomposition of real-valued images through Hardy-space splitting.

A real signal ``F`` is lifted to ``F~ = F + F0 + G0 + c00`` (axis means and
grand mean) and to its reflection ``F~(t, -s)``.  Any engine working on
the ``(+,+)`` Hardy space decomposes both; the image is then rebuilt from
twice the real parts of the two approximations.

The naive rebuild ``2Re L + 2Re H(., -.) - F0 - G0 - c00`` double counts the
modes with ``k = 0`` or ``l = 0``, which belong to more than one quadrant
(a constant image comes back multiplied by 13).  Carrying the axis modes
through both lifts gives the compensation used here::

    F = 2Re L + 2Re H(., -.) - 3 F0 - 3 G0 - 9 c00

valid for signals without Nyquist content.

Sampled Szego atoms are not confined to the discrete ``(+,+)`` quadrant:
their modes beyond ``m/2`` alias onto negative frequencies.  The engines
therefore decompose the quadrant projections of both lifts, and partial
sums are projected back before the real parts are taken, so that aliased
content cannot leak into the other quadrants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dictionary import ParameterGrid
from .engines import Decomposition, reconstruct_at, run_engine
from .errors import DomainError
from .signal import Signal2D, TorusGrid


@dataclass(frozen=True, eq=False)
class RealSplit:
    """Lifted signal, its reflection in ``s`` and the removed means.

    ``F0`` is the mean over ``s`` (a function of ``t``, length ``m``), ``G0``
    the mean over ``t`` (length ``n``) and ``c00`` the grand mean.
    """

    F_lift: Signal2D
    F_flip: Signal2D
    F0: np.ndarray
    G0: np.ndarray
    c00: float


@dataclass(frozen=True, eq=False)
class RealDecomposition:
    engine: str
    lift: Decomposition
    flip: Decomposition
    split: RealSplit


def flip_index(grid: TorusGrid) -> np.ndarray:
    """Index map ``q -> q'`` with ``s_q' = -s_q`` on the grid.

    Only offsets that are multiples of one half make the reflection a
    permutation of the nodes.
    """
    two_o = 2.0 * grid.offset
    if abs(two_o - round(two_o)) > 1e-12:
        raise DomainError(f"offset {grid.offset} does not admit a reflected grid; use 0 or 0.5")
    return (-np.arange(grid.n) - int(round(two_o))) % grid.n


def _flip(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    return values[:, flip_index(grid)]


def split_real(F: Signal2D) -> RealSplit:
    vals = F.values
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    if np.max(np.abs(vals.imag)) > 1e-12 * scale:
        raise DomainError("split_real expects a real-valued signal")
    X = vals.real
    F0 = X.mean(axis=1)
    G0 = X.mean(axis=0)
    c00 = float(X.mean())
    lift = X + F0[:, None] + G0[None, :] + c00
    return RealSplit(Signal2D(F.grid, lift), Signal2D(F.grid, _flip(lift, F.grid)),
                     F0, G0, c00)


def plus_projection(F: Signal2D) -> Signal2D:
    """Keep only the modes ``0 <= k < m/2``, ``0 <= l < n/2``.

    The node offset only multiplies each mode by a phase, which the forward
    and inverse transforms cancel, so plain FFT masking is exact.
    """
    m, n = F.grid.shape
    mask = np.zeros((m, n), bool)
    mask[: (m + 1) // 2, : (n + 1) // 2] = True
    spec = np.fft.fft2(F.values)
    return Signal2D(F.grid, np.fft.ifft2(np.where(mask, spec, 0.0)))


def decompose_real(F: Signal2D, engine: str, N: int, grid: ParameterGrid | None = None,
                   **engine_opts) -> RealDecomposition:
    """Split a real signal and decompose the ``(+,+)`` parts of the lift and its reflection.

    ``N`` counts engine steps (levels for ``fd``/``afd``).  Extra keyword
    arguments are passed to :func:`afd2d.engines.run_engine`.
    """
    split = split_real(F)
    lift = run_engine(plus_projection(split.F_lift), engine, N, grid, **engine_opts)
    flip = run_engine(plus_projection(split.F_flip), engine, N, grid, **engine_opts)
    return RealDecomposition(engine, lift, flip, split)


def reconstruct_real(parts: RealDecomposition, K: int) -> Signal2D:
    """Real approximation from the first ``K`` steps of both decompositions."""
    if K < 0:
        raise IndexError("K must be nonnegative")
    sp = parts.split
    grid = sp.F_lift.grid
    L = plus_projection(reconstruct_at(parts.lift, K)).values
    H = _flip(plus_projection(reconstruct_at(parts.flip, K)).values, grid)
    out = (2.0 * L.real + 2.0 * H.real
           - 3.0 * sp.F0[:, None] - 3.0 * sp.G0[None, :] - 9.0 * sp.c00)
    return Signal2D(grid, out)
