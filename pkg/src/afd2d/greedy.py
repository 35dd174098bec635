"""Greedy engines on the product-Szegő dictionary: GA, OGA and Pre-OGA.

Every candidate atom is a rank-one product ``u_a (x) v_b`` of unit 1D
kernels, so inner products of a signal against the whole dictionary reduce
to two matrix products (``U* G V^H``).  This is the "scan" used below.

Pre-OGA scores a candidate ``psi`` by ``|<g, psi>| / ||psi - P psi||``,
which equals ``|<g, xi^psi>|`` for the orthonormalised direction because the
remainder ``g`` is orthogonal to the current span.  The squared projections
``||P psi||^2`` are accumulated one orthonormal vector at a time.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dictionary import ParameterGrid, eval_product_atom, szego_kernels
from .errors import DictionaryExhaustedError, EscalationLimitError
from .signal import Signal2D, TorusGrid, energy

# Below this the scanned ||psi - P psi||^2 is rounding noise.
_R2_FLOOR = 1e-14


@dataclass(frozen=True)
class AtomRef:
    """Dictionary element ``e_a^(ma) (x) e_b^(mb)``; multiplicity 1 is the plain kernel."""

    a: complex
    b: complex
    ma: int = 1
    mb: int = 1


@dataclass
class GreedyState:
    """Progress of a greedy run.

    ``coeffs[k]`` is ``<f, xi_k>`` for OGA/Pre-OGA and ``<g_k, psi_k>`` for GA.
    ``history[k]`` is the residual energy after ``k`` steps (``history[0]``
    is ``||f||^2``).  ``v_seq[k]`` is ``||psi_k - P psi_k||`` for the selected
    atom (always 1 for GA, which does not orthogonalise).
    """

    engine: str
    grid: TorusGrid
    atoms: list = field(default_factory=list)
    ortho: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)
    residual: np.ndarray | None = None
    v_seq: list = field(default_factory=list)
    history: list = field(default_factory=list)
    status: str = "ok"

    @property
    def steps(self) -> int:
        return len(self.atoms)

    @property
    def residual_signal(self) -> Signal2D:
        return Signal2D(self.grid, self.residual)

    def ortho_matrix(self) -> np.ndarray:
        """Orthonormal family as rows of a ``(k, m*n)`` array."""
        m, n = self.grid.shape
        if not self.ortho:
            return np.zeros((0, m * n), complex)
        return np.stack([x.ravel() for x in self.ortho])


def _project_out(vec: np.ndarray, frame: np.ndarray) -> np.ndarray:
    if frame.shape[0] == 0:
        return vec
    for _ in range(2):
        vec = vec - frame.T @ (frame.conj() @ vec / vec.size)
    return vec


def _gs_extend(frame: np.ndarray, psi: np.ndarray, tol: float):
    """Flat-array core of :func:`gram_schmidt_extend`."""
    scale = np.sqrt(energy(psi))
    res = _project_out(psi, frame)
    r = np.sqrt(energy(res))
    if r <= tol * scale:
        return None
    return res / r, r / scale


def gram_schmidt_extend(ortho: Sequence[Signal2D], psi: Signal2D, tol: float = 1e-8):
    """Orthonormalise ``psi`` against an orthonormal family.

    Returns
    -------
    (xi, r) or None
        ``xi`` is the normalised component of ``psi`` orthogonal to ``ortho``
        and ``r`` its norm relative to ``||psi||``.  ``None`` means ``psi`` lies
        in the span (``r <= tol``).
    """
    m, n = psi.grid.shape
    frame = (np.stack([o.values.ravel() for o in ortho]) if len(ortho)
             else np.zeros((0, m * n), complex))
    out = _gs_extend(frame, psi.values.ravel(), tol)
    if out is None:
        return None
    xi, r = out
    return Signal2D(psi.grid, xi.reshape(m, n)), float(r)


def _scan(G: np.ndarray, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """``<G, u_a (x) v_b>`` for every pair of rows of ``U`` and ``V``."""
    return U.conj() @ G @ V.conj().T / G.size


def _weakness(t_seq, k: int) -> float:
    if t_seq is None:
        return 1.0
    t = float(t_seq[k] if k < len(t_seq) else t_seq[-1])
    if not 0.0 < t <= 1.0:
        raise ValueError(f"weakness parameters must lie in (0, 1], got {t}")
    return t


def _ranked(scores: np.ndarray, t: float) -> np.ndarray:
    """Flat candidate indices in the order they should be tried.

    With ``t = 1``: descending score, ties in scan order.  With ``t < 1``:
    candidates reaching ``t * max`` in scan order first, then the rest.
    """
    flat = scores.ravel()
    desc = np.argsort(-flat, kind="stable")
    if t >= 1.0:
        return desc
    ok = np.flatnonzero(flat >= t * flat.max())
    rest = desc[~np.isin(desc, ok)]
    return np.concatenate([ok, rest])


def _start(engine: str, f: Signal2D) -> GreedyState:
    f_en = energy(f.values)
    state = GreedyState(engine, f.grid, residual=f.values.copy(), history=[f_en])
    if f_en == 0.0:
        warnings.warn("zero input signal; returning an empty decomposition")
        state.status = "zero-input"
    return state


def _done(state: GreedyState, rtol: float) -> bool:
    return state.status != "ok" or state.history[-1] <= (rtol ** 2) * state.history[0]


def run_ga(f: Signal2D, grid: ParameterGrid, N: int, *, t_seq=None,
           rtol: float = 1e-12) -> GreedyState:
    """Pure greedy algorithm (matching pursuit) with one-term updates.

    ``g_{k+1} = g_k - <g_k, psi_k> psi_k`` where ``psi_k`` maximises
    ``|<g_k, psi>|`` over the product atoms of ``grid``.  Stops early once
    ``||g|| <= rtol * ||f||``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    state = _start("ga", f)
    cand = grid.values
    U, V = szego_kernels(cand, f.grid.z), szego_kernels(cand, f.grid.w)
    g = state.residual
    for k in range(N):
        if _done(state, rtol):
            break
        C = _scan(g, U, V)
        idx = int(_ranked(np.abs(C), _weakness(t_seq, k))[0])
        ia, ib = divmod(idx, C.shape[1])
        coef = complex(C[ia, ib])
        g = g - coef * np.outer(U[ia], V[ib])
        state.atoms.append(AtomRef(complex(cand[ia]), complex(cand[ib])))
        state.coeffs.append(coef)
        state.v_seq.append(1.0)
        state.history.append(energy(g))
    state.residual = g
    return state


def run_oga(f: Signal2D, grid: ParameterGrid, N: int, *, t_seq=None,
            tol: float = 1e-8, rtol: float = 1e-12) -> GreedyState:
    """Orthogonal greedy algorithm.

    Selects the atom maximising ``|<f_k, psi>|`` against the orthogonal
    remainder, then projects ``f`` onto the span of all selected atoms.  An
    atom already in the span (relative residual norm ``<= tol``) is skipped in
    favour of the next best.

    Raises
    ------
    DictionaryExhaustedError
        If every candidate lies in the current span.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    state = _start("oga", f)
    cand = grid.values
    U, V = szego_kernels(cand, f.grid.z), szego_kernels(cand, f.grid.w)
    m, n = f.grid.shape
    F = f.values.ravel()
    frame = np.zeros((0, m * n), complex)
    g = F.copy()
    for k in range(N):
        if _done(state, rtol):
            break
        C = _scan(g.reshape(m, n), U, V)
        for idx in _ranked(np.abs(C), _weakness(t_seq, k)):
            ia, ib = divmod(int(idx), C.shape[1])
            out = _gs_extend(frame, np.outer(U[ia], V[ib]).ravel(), tol)
            if out is not None:
                break
        else:
            raise DictionaryExhaustedError("all candidate atoms lie in the current span")
        xi, r = out
        coef = complex(np.vdot(xi, F) / F.size)
        g = g - coef * xi
        frame = np.vstack([frame, xi])
        state.atoms.append(AtomRef(complex(cand[ia]), complex(cand[ib])))
        state.ortho.append(xi.reshape(m, n))
        state.coeffs.append(coef)
        state.v_seq.append(float(r))
        state.history.append(energy(g))
    state.residual = g.reshape(m, n)
    return state


class _Escalated:
    """A higher-multiplicity candidate attached to an already selected pair."""

    __slots__ = ("pair", "ma", "mb", "vec", "proj2", "norm2")

    def __init__(self, pair: int, ma: int, mb: int, vec: np.ndarray, frame: np.ndarray):
        self.pair, self.ma, self.mb = pair, ma, mb
        self.vec = vec
        self.norm2 = energy(vec)
        self.proj2 = float(np.sum(np.abs(frame.conj() @ vec / vec.size) ** 2)) if len(frame) else 0.0

    @property
    def key(self):
        return (self.pair, self.ma, self.mb)


def run_preoga(f: Signal2D, grid: ParameterGrid, N: int, *, t_seq=None,
               tol: float = 1e-8, max_multiplicity: int = 8,
               rtol: float = 1e-12) -> GreedyState:
    """Pre-orthogonal greedy algorithm with multiplicity escalation.

    At step ``k`` the candidate whose orthonormalised direction ``xi^psi``
    captures the most of the remainder is chosen, i.e. the maximiser of
    ``|<g_k, psi>| / ||psi - P psi||``.  Once a pair ``(a, b)`` has been
    selected its plain atom lies in the span; the pair then competes through
    its next-multiplicity atoms ``(ma+1, mb)`` and ``(ma, mb+1)``.

    Raises
    ------
    EscalationLimitError
        If a selected pair cannot be escalated without exceeding
        ``max_multiplicity`` on both axes.
    DictionaryExhaustedError
        If every candidate lies in the current span.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    state = _start("preoga", f)
    cand = grid.values
    nd = cand.size
    z, w = f.grid.z, f.grid.w
    U, V = szego_kernels(cand, z), szego_kernels(cand, w)
    norm2 = np.outer(np.mean(np.abs(U) ** 2, axis=1), np.mean(np.abs(V) ** 2, axis=1))
    proj2 = np.zeros((nd, nd))
    blocked = np.zeros((nd, nd), bool)  # plain atoms no longer available
    m, n = f.grid.shape
    F = f.values.ravel()
    frame = np.zeros((0, m * n), complex)
    g = F.copy()
    escalated: list[_Escalated] = []
    used: set = set()

    def atom_vec(pair, ma, mb):
        ia, ib = divmod(pair, nd)
        u = szego_kernels(cand[ia:ia + 1], z, ma)[0]
        v = szego_kernels(cand[ib:ib + 1], w, mb)[0]
        return np.outer(u, v).ravel()

    for k in range(N):
        if _done(state, rtol):
            break
        t = _weakness(t_seq, k)
        C = _scan(g.reshape(m, n), U, V)
        r2 = norm2 - proj2
        ok = (r2 > _R2_FLOOR * norm2) & ~blocked
        plain = np.zeros((nd, nd))
        plain[ok] = np.abs(C[ok]) / np.sqrt(r2[ok])
        esc_scores = []
        for e in escalated:
            er2 = e.norm2 - e.proj2
            s = abs(np.vdot(e.vec, g) / g.size) / np.sqrt(er2) if er2 > _R2_FLOOR * e.norm2 else 0.0
            esc_scores.append(s)

        while True:
            best = max(plain.max(initial=0.0), max(esc_scores, default=0.0))
            if best <= 0.0:
                raise DictionaryExhaustedError("all candidate atoms lie in the current span")
            # candidate list: (key, score, source)
            if t >= 1.0:
                pidx = int(np.argmax(plain))
                pool = [((pidx, 1, 1), plain.flat[pidx], None)]
                pool += [(e.key, s, e) for e, s in zip(escalated, esc_scores) if s > 0.0]
                top = max(s for _, s, _ in pool)
                key, score, src = min((p for p in pool if p[1] == top), key=lambda p: p[0])
            else:
                thr = t * best
                hits = np.flatnonzero(plain.ravel() >= thr)
                pool = [((int(hits[0]), 1, 1), plain.flat[hits[0]], None)] if hits.size else []
                pool += [(e.key, s, e) for e, s in zip(escalated, esc_scores) if s >= thr]
                key, score, src = min(pool, key=lambda p: p[0])
            pair, ma, mb = key
            vec = atom_vec(pair, ma, mb) if src is not None else np.outer(
                U[pair // nd], V[pair % nd]).ravel()
            out = _gs_extend(frame, vec, tol)
            if out is not None:
                break
            if src is None:
                blocked.flat[pair] = True
                plain.flat[pair] = 0.0
            else:
                i = escalated.index(src)
                escalated.pop(i)
                esc_scores.pop(i)

        xi, r = out
        coef = complex(np.vdot(xi, F) / F.size)
        g = g - coef * xi
        frame = np.vstack([frame, xi])
        proj2 += np.abs(_scan(xi.reshape(m, n), U, V)) ** 2
        for e in escalated:
            e.proj2 += abs(np.vdot(xi, e.vec) / xi.size) ** 2

        ia, ib = divmod(pair, nd)
        state.atoms.append(AtomRef(complex(cand[ia]), complex(cand[ib]), ma, mb))
        state.ortho.append(xi.reshape(m, n))
        state.coeffs.append(coef)
        state.v_seq.append(float(r))
        state.history.append(energy(g))

        used.add(key)
        if src is None:
            blocked.flat[pair] = True
        else:
            escalated.remove(src)
        pending = {e.key for e in escalated}
        succ = [(pair, ma + 1, mb), (pair, ma, mb + 1)]
        fits = [s for s in succ if max(s[1], s[2]) <= max_multiplicity]
        if not fits:
            raise EscalationLimitError(
                f"pair ({cand[ia]}, {cand[ib]}) exceeds multiplicity {max_multiplicity}")
        for s in fits:
            if s not in used and s not in pending:
                escalated.append(_Escalated(s[0], s[1], s[2], atom_vec(*s), frame))

    state.residual = g.reshape(m, n)
    return state


def atom_signal(atom: AtomRef, grid: TorusGrid) -> Signal2D:
    return eval_product_atom(atom.a, atom.b, atom.ma, atom.mb, grid)


def reconstruct(state: GreedyState, K: int) -> Signal2D:
    """Sum of the first ``K`` terms of a greedy expansion."""
    if not 0 <= K <= state.steps:
        raise IndexError(f"K = {K} outside 0..{state.steps}")
    out = np.zeros(state.grid.shape, complex)
    for k in range(K):
        if state.engine == "ga":
            out += state.coeffs[k] * atom_signal(state.atoms[k], state.grid).values
        else:
            out += state.coeffs[k] * state.ortho[k]
    return Signal2D(state.grid, out)
