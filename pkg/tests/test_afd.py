import numpy as np
import pytest

import oracles
from conftest import bandlimited, random_signal
from afd2d.afd import objective_energy, partial_sum, run_fd, run_product_afd
from afd2d.dictionary import ParameterGrid, build_parameter_grid, eval_product_atom, tm_frame
from afd2d.signal import Signal2D, TorusGrid, energy


def energy_gap(res) -> float:
    return abs(res.f_energy - np.sum(np.abs(res.coeffs) ** 2) - res.residual_energy[-1])


class TestObjective:
    def test_first_level_is_single_inner_product(self, grid32, rng):
        f = Signal2D(grid32, random_signal(grid32, rng))
        a, b = 0.25 + 0.5j, -0.75
        want = abs(oracles.ip(f.values, oracles.atom(a, b, 1, 1, grid32.z, grid32.w))) ** 2
        assert objective_energy(f, [], [], a, b) == pytest.approx(want, rel=1e-12)

    def test_atom_maximises_at_itself(self, grid32, params44):
        f = eval_product_atom(0.5, -0.25j, 1, 1, grid32)
        vals = np.array([[objective_energy(f, [], [], a, b) for b in params44.values]
                         for a in params44.values])
        ia, ib = np.unravel_index(np.argmax(vals), vals.shape)
        assert (params44.values[ia], params44.values[ib]) == (0.5, -0.25j)
        assert vals.max() == pytest.approx(1.0, abs=1e-12)

    def test_second_level_three_terms(self, grid32, rng):
        f = Signal2D(grid32, random_signal(grid32, rng))
        pa, pb = [0.25], [-0.5j]
        a, b = 0.5 + 0.25j, 0.0
        A = oracles._axis_basis(pa + [a], grid32.z)
        B = oracles._axis_basis(pb + [b], grid32.w)
        terms = [(1, 0), (0, 1), (1, 1)]
        want = sum(abs(oracles.ip(f.values, np.outer(A[:, k], B[:, l]))) ** 2 for k, l in terms)
        assert objective_energy(f, pa, pb, a, b) == pytest.approx(want, rel=1e-12)

    def test_prefix_length_mismatch(self, grid32):
        with pytest.raises(ValueError):
            objective_energy(Signal2D.zeros(grid32), [0.1], [], 0, 0)


class TestRunProductAfd:
    def test_single_atom_recovery(self, grid32, params44):
        f = eval_product_atom(-0.5 + 0.25j, 0.75, 1, 1, grid32)
        res = run_product_afd(f, params44, 1)
        assert (res.a_seq[0], res.b_seq[0]) == (-0.5 + 0.25j, 0.75)
        assert res.residual_energy[1] <= 1e-10 * res.f_energy

    def test_matches_oracle(self, grid32, params44, rng):
        f = random_signal(grid32, rng)
        res = run_product_afd(Signal2D(grid32, f), params44, 3)
        want = oracles.afd_selections(f, list(params44.values), grid32.z, grid32.w, 3)
        assert list(zip(res.a_seq, res.b_seq)) == want

    def test_selection_dominance(self, rng):
        g = TorusGrid(16, 16)
        params = build_parameter_grid(2, 2)
        f = Signal2D(g, random_signal(g, rng))
        res = run_product_afd(f, params, 3)
        for k in range(3):
            pa, pb = list(res.a_seq[:k]), list(res.b_seq[:k])
            chosen = objective_energy(f, pa, pb, res.a_seq[k], res.b_seq[k])
            for a in params.values:
                for b in params.values:
                    assert chosen >= objective_energy(f, pa, pb, a, b) - 1e-12
            assert chosen == pytest.approx(res.step_energies[k], rel=1e-10)

    def test_invariants(self, grid32, params44, rng):
        f = Signal2D(grid32, random_signal(grid32, rng))
        res = run_product_afd(f, params44, 4)
        assert energy_gap(res) <= 1e-6 * res.f_energy
        assert np.all(np.diff(res.residual_energy) <= 1e-12 * res.f_energy)
        for K in range(5):
            r = f.values - partial_sum(res, grid32, K).values
            assert energy(r) == pytest.approx(res.residual_energy[K], abs=1e-8 * res.f_energy)
            if K:
                A, B = tm_frame(res.a_seq[:K], grid32.z), tm_frame(res.b_seq[:K], grid32.w)
                np.testing.assert_allclose(A.conj() @ r @ B.conj().T / r.size, 0, atol=1e-8)

    def test_scaling_equivariance(self, grid32, params44, rng):
        f = Signal2D(grid32, random_signal(grid32, rng))
        c = 2.5 - 1.5j
        r1 = run_product_afd(f, params44, 3)
        r2 = run_product_afd(f * c, params44, 3)
        assert r1.a_seq == r2.a_seq and r1.b_seq == r2.b_seq
        np.testing.assert_allclose(r2.coeffs, c * r1.coeffs, rtol=1e-10, atol=1e-12)

    def test_full_reconstruction_inside_system(self, grid32):
        # A one-point candidate set forces the system, so f lies in its span.
        p = [0.5 - 0.25j] * 3
        A, B = tm_frame(p, grid32.z), tm_frame(p, grid32.w)
        C = np.arange(9).reshape(3, 3) + 1j
        f = Signal2D(grid32, A.T @ C @ B)
        res = run_product_afd(f, ParameterGrid.from_values([p[0]]), 3)
        np.testing.assert_allclose(res.coeffs, C, atol=1e-10)
        np.testing.assert_allclose(partial_sum(res, grid32, 3).values, f.values, atol=1e-8)

    def test_zero_input(self, grid32, params44):
        with pytest.warns(UserWarning):
            res = run_product_afd(Signal2D.zeros(grid32), params44, 2)
        assert res.status == "zero-input" and res.steps == 0
        assert not partial_sum(res, grid32, 0).values.any()

    def test_bad_arguments(self, grid32, params44):
        f = Signal2D(grid32, np.ones(grid32.shape))
        with pytest.raises(ValueError):
            run_product_afd(f, params44, 0)
        res = run_product_afd(f, params44, 1)
        with pytest.raises(IndexError):
            partial_sum(res, grid32, 2)


class TestFD:
    def test_character(self):
        g = TorusGrid(16, 16)
        f = Signal2D.from_function(g, lambda z, w: z ** 2 * w)
        res = run_fd(f, 4)
        want = np.zeros((4, 4))
        want[2, 1] = 1
        np.testing.assert_allclose(res.coeffs, want, atol=1e-10)

    @pytest.mark.parametrize("offset", [0.0, 0.5])
    def test_dft_oracle(self, rng, offset):
        g = TorusGrid(16, 12, offset)
        f = Signal2D(g, bandlimited(g, rng))
        res = run_fd(f, 6)
        np.testing.assert_allclose(res.coeffs, oracles.dft_coefficients(f.values, offset, 6),
                                   atol=1e-10)

    def test_toy_signal_dft(self):
        from afd2d.signal import sample_toy_signal
        g = TorusGrid(64, 64)
        f = sample_toy_signal(g)
        res = run_fd(f, 8)
        np.testing.assert_allclose(res.coeffs, oracles.dft_coefficients(f.values, 0.5, 8), atol=1e-10)

    def test_parseval(self, rng):
        g = TorusGrid(16, 16)
        f = Signal2D(g, random_signal(g, rng))
        res = run_fd(f, 5)
        want = energy(f.values) - np.sum(np.abs(res.coeffs) ** 2)
        assert res.residual_energy[-1] == pytest.approx(want, rel=1e-10)

    def test_equals_afd_on_origin_grid(self, rng):
        g = TorusGrid(16, 16)
        f = Signal2D(g, random_signal(g, rng))
        a = run_fd(f, 4)
        b = run_product_afd(f, ParameterGrid.from_values([0]), 4)
        np.testing.assert_array_equal(a.coeffs, b.coeffs)
        assert a.engine == "fd" and b.engine == "afd"
