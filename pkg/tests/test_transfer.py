import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwdefect import (
    Coin,
    Defect,
    DefectStack,
    Direction,
    amplitudes_from_matrix,
    find_reflectance_zeros,
    lambda_matrix,
    lambda_matrix_printed,
    min_reflectance,
    reflectance_spectrum,
    scatter_single,
    stack_matrix,
    stack_scatter,
)
from qwdefect.errors import ResonanceError

thetas = st.floats(0.05, np.pi / 2 - 0.05)
left_k = st.floats(np.pi / 2 + 1e-2, 3 * np.pi / 2 - 1e-2)
phases = st.floats(-np.pi, np.pi)
positions = st.integers(-30, 30)


class TestLambda:
    @given(thetas, left_k, positions)
    def test_identity_for_trivial_defect(self, theta, k, n):
        np.testing.assert_allclose(
            lambda_matrix(Defect(n, 0.0), k, Coin(theta)), np.eye(2), atol=1e-10
        )

    def test_printed_variant_is_not_identity(self):
        """The sign variant fails the trivial-defect check; the form in use passes it."""
        coin = Coin.hadamard()
        L = lambda_matrix_printed(Defect(0, 0.0), 2.5, coin)
        assert np.max(np.abs(L - np.eye(2))) > 0.1
        np.testing.assert_allclose(lambda_matrix(Defect(0, 0.0), 2.5, coin), np.eye(2), atol=1e-14)

    def test_printed_variant_breaks_unitarity(self):
        coin = Coin.hadamard()
        M = lambda_matrix_printed(Defect(0, 1.0), 2.5, coin)
        r, t = amplitudes_from_matrix(M)
        assert abs(abs(r) ** 2 + abs(t) ** 2 - 1.0) > 1e-3

    @given(thetas, left_k, phases, positions)
    def test_position_shift(self, theta, k, phi, n):
        """Moving a defect by N conjugates its matrix with the plane-wave phases."""
        coin = Coin(theta)
        L0 = lambda_matrix(Defect(0, phi), k, coin)
        LN = lambda_matrix(Defect(n, phi), k, coin)
        D = np.diag([np.exp(1j * k * n), np.exp(1j * (np.pi - k) * n)])
        np.testing.assert_allclose(
            LN, np.linalg.inv(D) @ L0 @ D, atol=1e-9 * max(1, np.abs(L0).max())
        )

    def test_regular_at_k_pi(self):
        coin = Coin(0.7)
        L = lambda_matrix(Defect(0, 1.3), np.pi, coin)
        Lp = lambda_matrix(Defect(0, 1.3), np.pi + 1e-6, coin)
        np.testing.assert_allclose(L, Lp, atol=1e-5)


class TestSingleDefect:
    @given(thetas, left_k.filter(lambda k: abs(k - np.pi) > 1e-5), phases)
    def test_reproduces_closed_form(self, theta, k, phi):
        coin = Coin(theta)
        a = scatter_single(k, coin, phi)
        b = stack_scatter(DefectStack.of([(0, phi)]), k, coin)
        assert abs(a.r - b.r) < 1e-10
        assert abs(a.t - b.t) < 1e-10

    @given(thetas, left_k, phases, positions)
    def test_reflectance_independent_of_position(self, theta, k, phi, n):
        coin = Coin(theta)
        R0 = stack_scatter(DefectStack.of([(0, phi)]), k, coin).R
        assert stack_scatter(DefectStack.of([(n, phi)]), k, coin).R == pytest.approx(R0, abs=1e-10)


class TestStacks:
    @given(
        thetas,
        left_k,
        st.lists(st.tuples(st.integers(-8, 8), phases), min_size=1, max_size=5),
    )
    @settings(max_examples=100)
    def test_unitarity(self, theta, k, defects):
        try:
            amp = stack_scatter(DefectStack.of(defects), k, Coin(theta))
        except ResonanceError:
            return
        assert amp.R + amp.T == pytest.approx(1.0, abs=1e-9)

    @given(
        thetas, st.floats(-np.pi / 2 + 1e-2, np.pi / 2 - 1e-2), st.integers(1, 8), phases, phases
    )
    def test_right_incidence_unitarity(self, theta, k, sep, p1, p2):
        amp = stack_scatter(
            DefectStack.of([(0, p1), (sep, p2)]), k, Coin(theta), Direction.FROM_RIGHT
        )
        assert amp.R + amp.T == pytest.approx(1.0, abs=1e-9)

    def test_same_site_phases_merge(self):
        stack = DefectStack.of([(3, 0.4), (1, 1.0), (3, 0.6)])
        assert stack.positions == [1, 3]
        assert stack.defects[1].phase == pytest.approx(1.0)
        coin = Coin(0.8)
        a = stack_scatter(stack, 2.6, coin)
        b = stack_scatter(DefectStack.of([(1, 1.0), (3, 1.0)]), 2.6, coin)
        assert a.r == pytest.approx(b.r)

    def test_order_independent_input(self):
        coin = Coin(0.8)
        a = stack_matrix(DefectStack.of([(0, 0.5), (4, -1.0)]), 2.2, coin)
        b = stack_matrix(DefectStack.of([(4, -1.0), (0, 0.5)]), 2.2, coin)
        np.testing.assert_array_equal(a, b)

    def test_split_composition(self):
        coin = Coin(0.9)
        stack = DefectStack.of([(0, 0.5), (2, -1.0), (5, 2.0), (9, 0.1)])
        lo, hi = stack.split(2)
        M = stack_matrix(stack, 2.4, coin)
        np.testing.assert_allclose(
            stack_matrix(hi, 2.4, coin) @ stack_matrix(lo, 2.4, coin), M, rtol=1e-12
        )

    def test_empty_stack_is_transparent(self):
        amp = stack_scatter(DefectStack(), 2.0, Coin(0.4))
        assert amp.r == 0 and amp.t == 1

    def test_t_survives_strong_reflection(self):
        """Tiny transmission through many strong defects stays unitary."""
        coin = Coin(1.4)
        stack = DefectStack.of([(n, 2.5) for n in range(0, 40, 3)])
        amp = stack_scatter(stack, 2.0, coin)
        assert amp.T < 1e-6
        assert amp.R + amp.T == pytest.approx(1.0, abs=1e-12)


class TestSpectrum:
    def test_flags(self):
        coin = Coin.hadamard()
        ks = [0.3, np.pi, 2.0, 5.0]
        sp = reflectance_spectrum(DefectStack.of([(0, 1.0)]), coin, ks)
        assert sp.flags == ["out_of_band", "k_pi", "", "out_of_band"]
        assert np.isnan(sp.R[0]) and np.isnan(sp.T[3])
        assert np.isfinite(sp.R[1])

    def test_empty_stack_zero(self):
        ks = np.linspace(1.6, 4.6, 50)
        sp = reflectance_spectrum(DefectStack(), Coin(0.3), ks)
        np.testing.assert_array_equal(sp.R, 0.0)
        np.testing.assert_array_equal(sp.T, 1.0)

    def test_matches_pointwise(self):
        coin = Coin(0.6)
        stack = DefectStack.of([(0, 0.7), (3, -0.4)])
        ks = np.linspace(1.7, 4.5, 13)
        sp = reflectance_spectrum(stack, coin, ks)
        for k, R in zip(ks, sp.R):
            assert R == pytest.approx(stack_scatter(stack, k, coin).R, abs=1e-14)


class TestZeros:
    def test_single_defect_zero_matches_analytic(self):
        coin = Coin.hadamard()
        phi = 0.3 * np.pi
        zs = find_reflectance_zeros(DefectStack.of([(0, phi)]), coin).zeros
        assert len(zs) == 1
        assert zs[0] == pytest.approx(np.pi - np.arcsin(np.sin(phi / 2) / coin.cos), abs=1e-7)

    def test_no_zero_above_critical(self):
        res = find_reflectance_zeros(DefectStack.of([(0, 0.6 * np.pi)]), Coin.hadamard())
        assert res.zeros == []
        assert res.near_misses

    def test_min_reflectance_above_critical(self):
        k, R = min_reflectance(DefectStack.of([(0, 0.6 * np.pi)]), Coin.hadamard())
        assert R == pytest.approx(0.6180339887, abs=1e-6)
        assert np.pi / 2 < k < 3 * np.pi / 2
        R_near = [
            stack_scatter(DefectStack.of([(0, 0.6 * np.pi)]), k + d, Coin.hadamard()).R
            for d in (-1e-3, 1e-3)
        ]
        assert min(R_near) >= R
