"""Complex signals sampled on a uniform grid of the 2-torus.

A signal is stored as an ``m x n`` complex matrix whose entry ``[p, q]`` is
the sample at ``(t_p, s_q)`` with ``t_p = 2*pi*(p + offset)/m`` and
``s_q = 2*pi*(q + offset)/n``.  Inner products use the plain Riemann sum
``(1/mn) * sum(f * conj(g))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SingularNodeError


@dataclass(frozen=True)
class TorusGrid:
    """Uniform sampling lattice on the 2-torus.

    Parameters
    ----------
    m, n : int
        Number of samples along ``t`` and ``s``.  Both must be at least 2.
    offset : float
        Phase shift of every node, as a fraction of one sample step, in
        ``[0, 1)``.
    """

    m: int
    n: int
    offset: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n:
            raise ValueError("grid sizes must be integers")
        if self.m < 2 or self.n < 2:
            raise ValueError(f"grid must be at least 2x2, got {self.m}x{self.n}")
        if not 0.0 <= self.offset < 1.0:
            raise ValueError(f"offset must lie in [0, 1), got {self.offset}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    @property
    def t(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.m) + self.offset) / self.m

    @property
    def s(self) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(self.n) + self.offset) / self.n

    @property
    def z(self) -> np.ndarray:
        """Nodes ``e^{i t_p}`` on the unit circle (first variable)."""
        return np.exp(1j * self.t)

    @property
    def w(self) -> np.ndarray:
        """Nodes ``e^{i s_q}`` on the unit circle (second variable)."""
        return np.exp(1j * self.s)


@dataclass(frozen=True, eq=False)
class Signal2D:
    """Complex samples of a function on a :class:`TorusGrid`.

    The value array is copied on construction and made read-only.
    """

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.shape != self.grid.shape:
            raise DimensionError(
                f"values have shape {vals.shape}, grid expects {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> "Signal2D":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid: TorusGrid, func) -> "Signal2D":
        """Sample ``func(z, w)`` (vectorised, ``z``/``w`` on the circle)."""
        z = grid.z[:, None]
        w = grid.w[None, :]
        return cls(grid, np.broadcast_to(func(z, w), grid.shape))

    def _check(self, other: "Signal2D"):
        if self.grid != other.grid:
            raise DimensionError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "Signal2D") -> "Signal2D":
        self._check(other)
        return Signal2D(self.grid, self.values + other.values)

    def __sub__(self, other: "Signal2D") -> "Signal2D":
        return subtract(self, other)

    def __mul__(self, c: complex) -> "Signal2D":
        return Signal2D(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self) -> "Signal2D":
        return Signal2D(self.grid, -self.values)

    @property
    def real(self) -> np.ndarray:
        return self.values.real


def inner_product(f: Signal2D, g: Signal2D) -> complex:
    """Discrete inner product ``(1/mn) sum f[p,q] conj(g[p,q])``."""
    f._check(g)
    return complex(np.vdot(g.values, f.values) / f.values.size)


def norm(f: Signal2D) -> float:
    """Norm induced by :func:`inner_product`."""
    ip = inner_product(f, f)
    assert abs(ip.imag) <= 1e-12 * max(abs(ip.real), 1e-300) + 1e-300
    return float(np.sqrt(max(ip.real, 0.0)))


def energy(values: np.ndarray) -> float:
    """Squared discrete norm of a raw sample array."""
    return float(np.vdot(values, values).real / values.size)


def subtract(f: Signal2D, g: Signal2D) -> Signal2D:
    f._check(g)
    return Signal2D(f.grid, f.values - g.values)


def toy_factor(z: np.ndarray, inner: bool) -> np.ndarray:
    """``4z^2(1+0.02z)/(1+0.7z)``, times ``exp((z+i)/(z-i))`` if ``inner``."""
    out = 4.0 * z**2 * (1.0 + 0.02 * z) / (1.0 + 0.7 * z)
    if inner:
        out = out * np.exp((z + 1j) / (z - 1j))
    return out


def sample_toy_signal(grid: TorusGrid) -> Signal2D:
    """Sample the tensor-product test function with a singular inner factor.

    ``f(z, w) = f1(z) * f2(w)`` where ``f2(w) = 4w^2(1+0.02w)/(1+0.7w)`` and
    ``f1`` is the same rational factor multiplied by ``exp((z+i)/(z-i))``,
    which is singular at ``z = i``.

    Raises
    ------
    SingularNodeError
        If a ``t`` node coincides with ``z = i``; choose a nonzero offset.
    """
    z = grid.z
    if np.any(np.abs(z - 1j) < 1e-12):
        raise SingularNodeError(
            "a sampling node coincides with z = i where the toy signal is "
            "singular; use a nonzero grid offset (e.g. 0.5)"
        )
    return Signal2D(grid, np.outer(toy_factor(z, True), toy_factor(grid.w, False)))
