"""Product AFD: greedy construction of a tensor-product TM system.

At step ``k0`` the engine appends one parameter to each axis sequence,
choosing the pair ``(a, b)`` from the candidate grid that maximises the
energy of the new shell of coefficients,
``sum_{max(k,l)=k0} |<f, B_k (x) B_l>|^2``, measured against the original
signal.  Fourier decomposition is the special case where every parameter is
zero.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dictionary import ParameterGrid, Param, as_param, blaschke_factor, project_out, tm_frame
from .signal import Signal2D, TorusGrid, energy

_DEAD = -1.0


@dataclass
class ProductAfdResult:
    """Output of :func:`run_product_afd` / :func:`run_fd`.

    Attributes
    ----------
    a_seq, b_seq : tuple of complex
        Selected parameters per axis, one per step.
    coeffs : ndarray, shape (N, N)
        ``coeffs[k, l] = <f, B_{k+1}^a (x) B_{l+1}^b>`` (0-based storage).
    step_energies : list of float
        Maximal shell energy found at each step.
    residual_energy : list of float
        ``residual_energy[K] = ||f - S_K||^2`` for ``K = 0..N``.
    """

    engine: str
    grid: TorusGrid
    a_seq: tuple = ()
    b_seq: tuple = ()
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    step_energies: list = field(default_factory=list)
    residual_energy: list = field(default_factory=list)
    status: str = "ok"

    @property
    def steps(self) -> int:
        return len(self.a_seq)

    @property
    def f_energy(self) -> float:
        return self.residual_energy[0] if self.residual_energy else 0.0


def _frame_rows(cand: np.ndarray, nodes: np.ndarray, blaschke: np.ndarray,
                frame: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Next TM vector for every candidate, orthonormalised against ``frame``."""
    raw = (np.sqrt(1.0 - np.abs(cand) ** 2)[:, None]
           / (1.0 - np.conj(cand)[:, None] * nodes[None, :])) * blaschke[None, :]
    raw_norm = np.sqrt(np.mean(np.abs(raw) ** 2, axis=1))
    rows = project_out(raw, frame)
    nrm = np.sqrt(np.mean(np.abs(rows) ** 2, axis=1))
    alive = nrm > 1e-10 * raw_norm
    rows[alive] /= nrm[alive, None]
    rows[~alive] = 0.0
    return rows, alive


def _coefficients(F: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``<F, A_k (x) B_l>`` for all row pairs of ``A`` and ``B``."""
    return A.conj() @ F @ B.conj().T / F.size


def run_product_afd(f: Signal2D, grid: ParameterGrid, N: int, *, engine: str = "afd") -> ProductAfdResult:
    """Decompose ``f`` with Product AFD over the candidate set ``grid``.

    Ties are broken in favour of the lexicographically first pair of grid
    indices.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    F = f.values
    m, n = F.shape
    f_en = energy(F)
    if f_en == 0.0:
        warnings.warn("zero input signal; returning an empty decomposition")
        return ProductAfdResult(engine, f.grid, residual_energy=[0.0], status="zero-input")

    cand = np.asarray(grid.values)
    z, w = f.grid.z, f.grid.w
    Qa = np.zeros((0, m), complex)
    Qb = np.zeros((0, n), complex)
    blz, blw = np.ones(m, complex), np.ones(n, complex)
    a_seq, b_seq, step_en = [], [], []

    for _ in range(N):
        Ua, alive_a = _frame_rows(cand, z, blz, Qa)
        Vb, alive_b = _frame_rows(cand, w, blw, Qb)
        Wa = Ua.conj() @ F / F.size                # (|D|, n)
        gamma = Wa @ Vb.conj().T                   # new-new coefficient
        alpha = np.sum(np.abs(Wa @ Qb.conj().T) ** 2, axis=1)
        beta = np.sum(np.abs((Qa.conj() @ F / F.size) @ Vb.conj().T) ** 2, axis=0)
        obj = alpha[:, None] + beta[None, :] + np.abs(gamma) ** 2
        obj[~alive_a, :] = _DEAD
        obj[:, ~alive_b] = _DEAD
        flat = int(np.argmax(obj))
        ia, ib = divmod(flat, obj.shape[1])
        a, b = complex(cand[ia]), complex(cand[ib])
        a_seq.append(a)
        b_seq.append(b)
        step_en.append(float(obj[ia, ib]))
        Qa = np.vstack([Qa, Ua[ia]])
        Qb = np.vstack([Qb, Vb[ib]])
        blz = blz * blaschke_factor(a, z)
        blw = blw * blaschke_factor(b, w)

    coeffs = _coefficients(F, Qa, Qb)
    resid = [f_en]
    for K in range(1, N + 1):
        S = Qa[:K].T @ coeffs[:K, :K] @ Qb[:K]
        resid.append(energy(F - S))
    return ProductAfdResult(engine, f.grid, tuple(a_seq), tuple(b_seq), coeffs, step_en, resid)


def run_fd(f: Signal2D, N: int) -> ProductAfdResult:
    """Fourier decomposition: Product AFD with every parameter fixed at 0.

    ``coeffs[k, l]`` is the Fourier coefficient of mode ``(k, l)``.
    """
    return run_product_afd(f, ParameterGrid.from_values([0j]), N, engine="fd")


def objective_energy(f: Signal2D, a_prefix: Sequence[Param], b_prefix: Sequence[Param],
                     a: Param, b: Param) -> float:
    """Energy of the shell ``max(k, l) = k0`` for the trial pair ``(a, b)``.

    ``k0 = len(a_prefix) + 1``.  Evaluated directly from the orthonormal TM
    frames of ``a_prefix + [a]`` and ``b_prefix + [b]``.
    """
    if len(a_prefix) != len(b_prefix):
        raise ValueError("prefixes must have equal length")
    pa = [as_param(x) for x in a_prefix] + [as_param(a)]
    pb = [as_param(x) for x in b_prefix] + [as_param(b)]
    A = tm_frame(pa, f.grid.z)
    B = tm_frame(pb, f.grid.w)
    k0 = len(pa) - 1
    total = 0.0
    for k in range(k0 + 1):
        for l in range(k0 + 1):
            if max(k, l) == k0:
                c = np.vdot(np.outer(A[k], B[l]), f.values) / f.values.size
                total += abs(c) ** 2
    return float(total)


def partial_sum(result: ProductAfdResult, grid: TorusGrid, K: int) -> Signal2D:
    """``S_K = sum_{k,l <= K} coeffs[k,l] B_k (x) B_l`` evaluated on ``grid``."""
    if not 0 <= K <= result.steps:
        raise IndexError(f"K = {K} outside 0..{result.steps}")
    if K == 0:
        return Signal2D.zeros(grid)
    A = tm_frame(result.a_seq[:K], grid.z)
    B = tm_frame(result.b_seq[:K], grid.w)
    return Signal2D(grid, A.T @ result.coeffs[:K, :K] @ B)
