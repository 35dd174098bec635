"""A priori and a posteriori error bounds for orthogonal greedy expansions.

Conventions: ``f_n`` is the remainder *before* step ``n`` (so ``f_1 = f``)
and step ``k`` selected an atom whose component orthogonal to the earlier
span has norm ``v_k``.  For ``f = sum c_k psi_k`` with ``sum |c_k| <= M``:

* weak OGA, a priori:      ``||f_n|| <= M (1 + sum_{k<n} t_k^2)^(-1/2)``
* weak OGA, a posteriori:  ``||f_n|| <= M (1 + sum_{k<n} (t_k/v_k)^2)^(-1/2)``
* weak Pre-OGA:            ``||f_n|| <= M (1 + sum_{k<n} (t_k/r_k)^2)^(-1/2)``
* Pre-OGA, completed dictionary budget ``N``: ``||f_n|| <= N / sqrt(n)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dictionary import ParameterGrid, szego_kernels
from .greedy import AtomRef, GreedyState, _gs_extend, _scan, atom_signal
from .signal import Signal2D, TorusGrid


def _t(t_seq, k: int) -> float:
    if t_seq is None:
        return 1.0
    return float(t_seq[k] if k < len(t_seq) else t_seq[-1])


def woga_apriori_bound(M: float, t_seq, n: int) -> float:
    s = sum(_t(t_seq, k) ** 2 for k in range(n - 1))
    return M / math.sqrt(1.0 + s)


def oga_bound(M: float, n: int) -> float:
    return M / math.sqrt(n)


def woga_posteriori_bound(M: float, t_seq, v_seq: Sequence[float], n: int) -> float:
    if len(v_seq) < n - 1:
        raise ValueError(f"need {n - 1} values of v, got {len(v_seq)}")
    s = 0.0
    for k in range(n - 1):
        v = float(v_seq[k])
        if not 0.0 < v <= 1.0 + 1e-12:
            raise ValueError(f"v_k must lie in (0, 1], got {v}")
        s += (_t(t_seq, k) / v) ** 2
    return M / math.sqrt(1.0 + s)


def wpreoga_posteriori_bound(M: float, t_seq, r_seq: Sequence[float], n: int) -> float:
    if len(r_seq) < n - 1:
        raise ValueError(f"need {n - 1} values of r, got {len(r_seq)}")
    s = 0.0
    for k in range(n - 1):
        r = float(r_seq[k])
        if not 0.0 < r <= 1.0 + 1e-12:
            raise ValueError(f"r_k must lie in (0, 1], got {r}")
        s += (_t(t_seq, k) / r) ** 2
    return M / math.sqrt(1.0 + s)


def wpreoga_previous_bound(M: float, t: float, r_seq: Sequence[float], n: int) -> float:
    """Older WPre-OGA estimate ``max(r_1..r_n) * M / (t sqrt(n))``."""
    return max(float(r) for r in r_seq[:n]) * M / (t * math.sqrt(n))


def preoga_completed_bound(N_budget: float, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return N_budget / math.sqrt(n)


def lemma_hypothesis(a_seq: Sequence[float], A: float, t_seq) -> bool:
    """Whether ``a_1 <= A`` and ``a_m <= a_{m-1}(1 - t_{m-1}^2 a_{m-1}/A)`` hold."""
    a = [float(x) for x in a_seq]
    if not a or a[0] > A or min(a) < 0:
        return False
    for m in range(1, len(a)):
        t = _t(t_seq, m - 1)
        if a[m] > a[m - 1] * (1.0 - t * t * a[m - 1] / A) + 1e-15 * A:
            return False
    return True


def check_lemma_sequence(a_seq: Sequence[float], A: float, t_seq) -> bool:
    """Whether ``a_m <= A / (1 + sum_{k<m} t_k^2)`` for every ``m``."""
    s = 0.0
    for m, am in enumerate(a_seq):
        if float(am) > A / (1.0 + s) * (1.0 + 1e-12):
            return False
        s += _t(t_seq, m) ** 2
    return True


def _residual_norms(family: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """``||psi - P psi|| / ||psi||`` for each row of ``vecs``."""
    out = np.empty(len(vecs))
    for i, v in enumerate(vecs):
        res = _gs_extend(family, v, 0.0)
        out[i] = 0.0 if res is None else res[1]
    return out


def estimate_rn(state: GreedyState, grid: ParameterGrid | None = None,
                atoms: Sequence[AtomRef] | None = None) -> float:
    """Largest distance of a unit atom from the current orthonormal span.

    With ``atoms`` (the known representing atoms of ``f``) the value is exact;
    otherwise every plain product atom of ``grid`` is used as a proxy.
    """
    family = state.ortho_matrix()
    if atoms is not None:
        vecs = np.stack([atom_signal(a, state.grid).values.ravel() for a in atoms])
        return float(_residual_norms(family, vecs).max())
    if grid is None:
        raise ValueError("pass either a parameter grid or the representing atoms")
    U, V = szego_kernels(grid.values, state.grid.z), szego_kernels(grid.values, state.grid.w)
    proj2 = np.zeros((len(grid), len(grid)))
    for xi in state.ortho:
        proj2 += np.abs(_scan(xi, U, V)) ** 2
    return float(np.sqrt(np.clip(1.0 - proj2, 0.0, None)).max())


def rn_sequence(state: GreedyState, atoms: Sequence[AtomRef]) -> list[float]:
    """``r_n`` for ``n = 1..steps`` (``r_n`` uses the first ``n-1`` directions)."""
    family = state.ortho_matrix()
    vecs = np.stack([atom_signal(a, state.grid).values.ravel() for a in atoms])
    return [float(_residual_norms(family[: n - 1], vecs).max()) for n in range(1, state.steps + 1)]


@dataclass
class BoundTrace:
    """Observed remainder norms next to a bound curve (index ``n - 1`` holds ``n``)."""

    name: str
    M: float
    bound_curve: list = field(default_factory=list)
    observed_curve: list = field(default_factory=list)

    def violations(self, slack: float = 1e-9) -> list[int]:
        return [n + 1 for n, (o, b) in enumerate(zip(self.observed_curve, self.bound_curve))
                if o > b + slack]


def observed_norms(state: GreedyState, n_max: int) -> list[float]:
    """``||f_n||`` for ``n = 1..n_max`` from a run's energy history."""
    return [math.sqrt(max(state.history[n - 1], 0.0)) for n in range(1, n_max + 1)]


def bound_traces(state: GreedyState, M: float, atoms: Sequence[AtomRef] | None = None,
                 N_budget: float | None = None, t_seq=None) -> list[BoundTrace]:
    """All applicable bound curves for ``n = 1..steps`` of an OGA/Pre-OGA run."""
    n_max = state.steps
    obs = observed_norms(state, n_max)
    ns = range(1, n_max + 1)
    traces = [
        BoundTrace("woga_apriori", M, [woga_apriori_bound(M, t_seq, n) for n in ns], obs),
        BoundTrace("woga_posteriori", M,
                   [woga_posteriori_bound(M, t_seq, state.v_seq, n) for n in ns], obs),
    ]
    if atoms is not None:
        r = rn_sequence(state, atoms)
        # r_n = 0 only once f lies in the span; the bound is then trivially 0-safe.
        r_safe = [x if x > 0 else 1e-300 for x in r]
        traces.append(BoundTrace("wpreoga_posteriori", M,
                                 [wpreoga_posteriori_bound(M, t_seq, r_safe, n) for n in ns], obs))
    if N_budget is not None:
        traces.append(BoundTrace("preoga_completed", N_budget,
                                 [preoga_completed_bound(N_budget, n) for n in ns], obs))
    return traces


def synthetic_member(grid: TorusGrid, params: ParameterGrid, K: int,
                     rng: np.random.Generator) -> tuple[Signal2D, float, list[AtomRef]]:
    """Random ``f = sum_{k<=K} c_k psi_k`` over distinct on-grid atoms.

    Returns ``f``, its explicit budget ``M = sum |c_k|`` and the atoms.
    """
    nd = len(params)
    picks = rng.choice(nd * nd, size=K, replace=False)
    atoms = [AtomRef(complex(params.values[p // nd]), complex(params.values[p % nd])) for p in picks]
    c = rng.normal(size=K) + 1j * rng.normal(size=K)
    vals = sum(ck * atom_signal(a, grid).values for ck, a in zip(c, atoms))
    return Signal2D(grid, vals), float(np.sum(np.abs(c))), atoms
