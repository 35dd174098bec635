"""Shared fixtures, plus the one-line-per-criterion acceptance summary."""

from __future__ import annotations

import contextlib

import numpy as np
import pytest

from afd2d.dictionary import build_parameter_grid
from afd2d.signal import TorusGrid

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@contextlib.contextmanager
def criterion(number: int, title: str, detail: str = ""):
    """Record PASS/FAIL for an acceptance criterion and print its line."""
    note = {"detail": detail}
    try:
        yield note
    except BaseException:
        ACCEPTANCE[number] = ("FAIL", title, note["detail"])
        print(f"\n[FAIL] criterion {number}: {title} {note['detail']}".rstrip())
        raise
    ACCEPTANCE[number] = ("PASS", title, note["detail"])
    print(f"\n[PASS] criterion {number}: {title} {note['detail']}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{status}] {n:2d}. {title}" + (f" ({detail})" if detail else ""))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid32():
    return TorusGrid(32, 32)


@pytest.fixture(scope="session")
def params44():
    return build_parameter_grid(4, 4)


@pytest.fixture(scope="session")
def params88():
    return build_parameter_grid(8, 8)


def random_signal(grid: TorusGrid, rng) -> np.ndarray:
    return rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)


def bandlimited(grid: TorusGrid, rng, real: bool = False) -> np.ndarray:
    """Random signal with modes strictly below Nyquist on both axes."""
    m, n = grid.shape
    spec = np.zeros((m, n), complex)
    km, kn = (m - 1) // 2, (n - 1) // 2
    for k in range(-km, km + 1):
        for l in range(-kn, kn + 1):
            spec[k % m, l % n] = rng.normal() + 1j * rng.normal()
    vals = np.fft.ifft2(spec) * m * n
    if real:
        vals = vals.real
    return vals
