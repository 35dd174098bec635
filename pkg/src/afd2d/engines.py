"""Uniform front end over the five decomposition engines.

Product AFD and FD advance in levels: level ``K`` carries ``K^2`` terms.  The
greedy engines add one term per step.  Helpers here translate between steps,
levels and term counts so callers can compare engines at equal term budgets.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .afd import ProductAfdResult, partial_sum, run_fd, run_product_afd
from .dictionary import ParameterGrid
from .greedy import GreedyState, reconstruct, run_ga, run_oga, run_preoga
from .signal import Signal2D

ENGINES = ("fd", "ga", "oga", "afd", "preoga")

Decomposition = Union[ProductAfdResult, GreedyState]


def is_product(engine: str) -> bool:
    return engine in ("fd", "afd")


def steps_for_terms(engine: str, terms: int) -> int:
    """Steps needed so that ``terms`` effective terms are available."""
    return math.isqrt(terms - 1) + 1 if is_product(engine) else terms


def level_for_terms(engine: str, terms: int) -> int:
    """Largest level whose effective term count does not exceed ``terms``."""
    return math.isqrt(terms) if is_product(engine) else terms


def effective_terms(engine: str, level: int) -> int:
    return level * level if is_product(engine) else level


def run_engine(f: Signal2D, engine: str, steps: int, grid: ParameterGrid | None = None,
               *, tol: float = 1e-8, t_seq=None, max_multiplicity: int = 8) -> Decomposition:
    """Run ``engine`` for ``steps`` steps (levels for ``fd``/``afd``)."""
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    if engine == "fd":
        if steps > min(f.grid.shape):
            raise ValueError(f"FD level {steps} exceeds the grid size {f.grid.shape}")
        return run_fd(f, steps)
    if grid is None:
        raise ValueError(f"engine {engine!r} needs a parameter grid")
    if engine == "afd":
        if steps > min(f.grid.shape):
            raise ValueError(f"AFD level {steps} exceeds the grid size {f.grid.shape}")
        return run_product_afd(f, grid, steps)
    if engine == "ga":
        return run_ga(f, grid, steps, t_seq=t_seq)
    if engine == "oga":
        return run_oga(f, grid, steps, t_seq=t_seq, tol=tol)
    return run_preoga(f, grid, steps, t_seq=t_seq, tol=tol, max_multiplicity=max_multiplicity)


def reconstruct_at(result: Decomposition, level: int) -> Signal2D:
    """Partial reconstruction after ``level`` steps, clamped to the steps taken."""
    level = min(level, result.steps)
    if isinstance(result, ProductAfdResult):
        return partial_sum(result, result.grid, level)
    return reconstruct(result, level)


def residual_energy_at(result: Decomposition, level: int) -> float:
    level = min(level, result.steps)
    if isinstance(result, ProductAfdResult):
        return result.residual_energy[level]
    return result.history[level]


def input_energy(result: Decomposition) -> float:
    if isinstance(result, ProductAfdResult):
        return result.residual_energy[0]
    return result.history[0]


def coefficient_energy(result: Decomposition) -> float:
    """``sum |coeffs|^2`` over all recorded terms."""
    c = result.coeffs if isinstance(result, ProductAfdResult) else np.asarray(result.coeffs)
    return float(np.sum(np.abs(c) ** 2))


def term_rows(result: Decomposition):
    """Rows ``(step, a, b, ma, mb, coeff, residual_energy)`` describing the expansion.

    For ``fd``/``afd`` one row per coefficient ``(k, l)``: the step is
    ``max(k, l)``, ``a`` is the k-th axis parameter and ``b`` the l-th, and
    rows come shell by shell.  The residual energy is the one after the step.
    """
    rows = []
    if isinstance(result, ProductAfdResult):
        for K in range(1, result.steps + 1):
            for k in range(K):
                for l in range(K):
                    if max(k, l) != K - 1:
                        continue
                    rows.append((K, result.a_seq[k], result.b_seq[l], 1, 1,
                                 complex(result.coeffs[k, l]), result.residual_energy[K]))
        return rows
    for k, atom in enumerate(result.atoms):
        rows.append((k + 1, atom.a, atom.b, atom.ma, atom.mb,
                     complex(result.coeffs[k]), result.history[k + 1]))
    return rows


def relative_error_db(result: Decomposition, level: int) -> float:
    """``20 log10(||f - f_K|| / ||f||)``; ``-inf`` for exact recovery or zero input."""
    f_en = input_energy(result)
    if f_en == 0.0:
        return -math.inf
    ratio = residual_energy_at(result, level) / f_en
    return 10.0 * math.log10(ratio) if ratio > 0 else -math.inf

