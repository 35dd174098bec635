"""Szegő kernels, Takenaka-Malmquist systems and the parameter lattice.

All one-dimensional atoms are unit vectors for the discrete inner product
``<u, v> = mean(u * conj(v))`` on the axis nodes.  For parameters well inside
the disc this is indistinguishable from the analytic normalisation; near the
boundary it keeps every product atom an exact unit vector on the grid, which
the greedy engines rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DomainError
from .signal import Signal2D, TorusGrid


@dataclass(frozen=True)
class DiscPoint:
    """A point ``re + i*im`` strictly inside the unit disc."""

    re: float
    im: float

    def __post_init__(self):
        if self.re * self.re + self.im * self.im >= 1.0:
            raise DomainError(f"|a| must be < 1, got {complex(self)}")

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, a: complex) -> "DiscPoint":
        a = complex(a)
        return cls(a.real, a.imag)


Param = Union[complex, DiscPoint]


def as_param(a: Param) -> complex:
    """Validate a disc parameter and return it as a Python complex."""
    a = complex(a)
    if not np.isfinite(a) or abs(a) >= 1.0:
        raise DomainError(f"|a| must be < 1, got {a}")
    return a


def as_params(seq: Iterable[Param]) -> np.ndarray:
    return np.array([as_param(a) for a in seq], dtype=np.complex128)


@dataclass(frozen=True)
class ParameterGrid:
    """Finite candidate set of disc parameters on a rectangular lattice.

    ``points`` holds every ``x + iy`` with ``x = i/N_t``, ``y = j/N_s`` for
    ``i in 1-N_t..N_t-1``, ``j in 1-N_s..N_s-1`` and ``x^2 + y^2 < 1``
    (optionally ``<= r_max^2``), in lexicographic ``(i, j)`` order.
    """

    N_t: int
    N_s: int
    points: tuple[DiscPoint, ...]
    r_max: float | None = None
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array([complex(p) for p in self.points], dtype=np.complex128)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_values(cls, values: Sequence[Param]) -> "ParameterGrid":
        """Ad hoc candidate set, e.g. ``{0}`` for Fourier decomposition."""
        pts = tuple(DiscPoint.from_complex(as_param(v)) for v in values)
        return cls(0, 0, pts)

    def index(self, a: Param) -> int:
        hits = np.flatnonzero(self.values == complex(a))
        if hits.size == 0:
            raise KeyError(f"{complex(a)} is not a grid point")
        return int(hits[0])


def build_parameter_grid(N_t: int, N_s: int, r_max: float | None = None) -> ParameterGrid:
    """Lattice of candidate parameters in the unit disc.

    Parameters
    ----------
    N_t, N_s : int
        Lattice resolution along the real and imaginary axes.
    r_max : float, optional
        If given, drop points with ``|a| > r_max``.  Kernels very close to the
        circle are under-resolved by the sampling grid.

    Examples
    --------
    >>> len(build_parameter_grid(8, 8))
    193
    """
    if N_t < 1 or N_s < 1:
        raise ValueError("N_t and N_s must be positive")
    pts = []
    for i in range(1 - N_t, N_t):
        for j in range(1 - N_s, N_s):
            x, y = i / N_t, j / N_s
            r2 = x * x + y * y
            if r2 >= 1.0:
                continue
            if r_max is not None and r2 > r_max * r_max:
                continue
            pts.append(DiscPoint(x, y))
    return ParameterGrid(N_t, N_s, tuple(pts), r_max)


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    nrm = np.sqrt(np.mean(np.abs(mat) ** 2, axis=-1, keepdims=True))
    return mat / nrm


def szego_kernels(params: np.ndarray, nodes: np.ndarray, multiplicity: int = 1) -> np.ndarray:
    """Unit-norm kernels of the given multiplicity for many parameters.

    Row ``i`` holds ``z^(m-1) / (1 - conj(a_i) z)^m`` sampled at ``nodes`` and
    normalised, where ``m`` is the multiplicity.  For ``m = 1`` this is the
    normalised Szegő kernel ``e_a``; higher ``m`` gives the direction of the
    ``(m-1)``-th derivative in ``conj(a)``, which spans the same space as the
    powers ``1/(1 - conj(a) z)^j`` for ``a != 0`` and stays valid at ``a = 0``.
    """
    if multiplicity < 1:
        raise ValueError("multiplicity must be >= 1")
    params = np.atleast_1d(np.asarray(params, dtype=np.complex128))
    if np.any(np.abs(params) >= 1.0):
        raise DomainError("all parameters must satisfy |a| < 1")
    z = np.asarray(nodes, dtype=np.complex128)[None, :]
    ac = np.conj(params)[:, None]
    if multiplicity == 1:
        raw = np.sqrt(1.0 - np.abs(params) ** 2)[:, None] / (1.0 - ac * z)
    else:
        raw = z ** (multiplicity - 1) / (1.0 - ac * z) ** multiplicity
    return _unit_rows(raw)


def eval_szego_1d(a: Param, multiplicity: int, nodes: np.ndarray) -> np.ndarray:
    """Samples of one unit-norm Szegő kernel (see :func:`szego_kernels`)."""
    return szego_kernels(np.array([as_param(a)]), nodes, multiplicity)[0]


def blaschke_factor(a: complex, z: np.ndarray) -> np.ndarray:
    return (z - a) / (1.0 - np.conj(a) * z)


def tm_basis_matrix(params: Sequence[Param], nodes: np.ndarray) -> np.ndarray:
    """Closed-form TM vectors ``B_1..B_k`` as the rows of a ``k x len(nodes)`` array.

    ``B_k(z) = sqrt(1-|a_k|^2)/(1 - conj(a_k) z) * prod_{l<k} (z-a_l)/(1-conj(a_l) z)``.
    """
    a = as_params(params)
    z = np.asarray(nodes, dtype=np.complex128)
    out = np.empty((a.size, z.size), dtype=np.complex128)
    blaschke = np.ones_like(z)
    for k, ak in enumerate(a):
        out[k] = np.sqrt(1.0 - abs(ak) ** 2) / (1.0 - np.conj(ak) * z) * blaschke
        blaschke = blaschke * blaschke_factor(ak, z)
    return out


def eval_tm_basis(params: Sequence[Param], nodes: np.ndarray) -> np.ndarray:
    """Samples of ``B_k`` for ``k = len(params)`` (closed form)."""
    if len(params) == 0:
        raise ValueError("params must be nonempty")
    return tm_basis_matrix(params, nodes)[-1]


def project_out(vec: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Remove from ``vec`` its components along the orthonormal rows of ``frame``.

    ``vec`` may be a single vector or a stack of row vectors.  Two classical
    Gram-Schmidt passes; the second restores orthogonality lost to
    cancellation.
    """
    if frame.shape[0] == 0:
        return vec
    n = vec.shape[-1]
    for _ in range(2):
        coef = vec @ frame.conj().T / n
        vec = vec - coef @ frame
    return vec


def tm_frame(params: Sequence[Param], nodes: np.ndarray) -> np.ndarray:
    """TM vectors made exactly orthonormal for the discrete inner product.

    The closed-form ``B_k`` are orthonormal in ``L^2`` of the circle but only
    approximately so under the node quadrature (aliasing of order
    ``|a|^len(nodes)``).  Each closed-form vector is projected off its
    predecessors and renormalised; for well-resolved parameters the change is
    at rounding level.
    """
    raw = tm_basis_matrix(params, nodes)
    out = np.empty_like(raw)
    for k in range(raw.shape[0]):
        v = project_out(raw[k], out[:k])
        out[k] = v / np.sqrt(np.mean(np.abs(v) ** 2))
    return out


def eval_product_atom(a: Param, b: Param, ma: int, mb: int, grid: TorusGrid) -> Signal2D:
    """Rank-one atom ``u (x) v`` with ``u``, ``v`` unit Szegő kernels."""
    u = eval_szego_1d(a, ma, grid.z)
    v = eval_szego_1d(b, mb, grid.w)
    return Signal2D(grid, np.outer(u, v))


def eval_tm_product(pa: Sequence[Param], pb: Sequence[Param], k: int, l: int,
                    grid: TorusGrid) -> Signal2D:
    """``B_k^a (x) B_l^b`` from closed-form TM vectors; ``k``, ``l`` are 1-based."""
    if not (1 <= k <= len(pa) and 1 <= l <= len(pb)):
        raise IndexError(f"(k, l) = ({k}, {l}) out of range for lengths {len(pa)}, {len(pb)}")
    u = eval_tm_basis(list(pa)[:k], grid.z)
    v = eval_tm_basis(list(pb)[:l], grid.w)
    return Signal2D(grid, np.outer(u, v))
