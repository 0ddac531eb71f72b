"""Tests for spin states, polynomial coefficients and spin operators."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import DimensionMismatchError, EmptyStateError, InvalidArgumentError
from src.spinstate import (
    Ladder,
    amplitudes_from_coefficients,
    apply_ladder,
    coherent_amplitudes,
    dicke_state,
    expectation,
    fidelity,
    from_polynomial,
    make_polynomial,
    make_state,
    mean_spin,
    rotate,
    spin_coherent_state,
    spin_operators,
    to_polynomial,
    with_phase_convention,
)
from tests.conftest import (
    assert_same_ray,
    make_ghz_state,
    make_random_state,
    make_tetrahedron_state,
    random_unit_vectors,
)


class TestMakeState:
    def test_normalizes(self) -> None:
        state = make_state(2, [2, 0, 2])
        assert state.amplitudes == pytest.approx([1 / math.sqrt(2), 0, 1 / math.sqrt(2)])

    def test_basis_state_is_kept(self) -> None:
        state = make_state(1, [1, 0])
        assert state.amplitudes == (1 + 0j, 0j)

    def test_relative_phases_survive(self) -> None:
        state = make_tetrahedron_state()
        assert state.amplitudes[2] == pytest.approx(1j * math.sqrt(2) / 2)

    def test_zero_vector_raises(self) -> None:
        with pytest.raises(EmptyStateError):
            make_state(2, [0, 0, 0])

    def test_wrong_length_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_state(2, [1, 0])

    def test_negative_two_s_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            make_state(-1, [])

    def test_non_finite_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            make_state(1, [math.nan, 1])

    def test_error_codes(self) -> None:
        assert EmptyStateError.code == "EMPTY_STATE"
        assert DimensionMismatchError.code == "DIMENSION_MISMATCH"
        assert InvalidArgumentError.code == "INVALID_ARGUMENT"

    def test_phase_convention(self) -> None:
        state = with_phase_convention(make_state(1, [0, -1j]))
        assert state.amplitudes == (0j, 1 + 0j)


class TestPolynomial:
    def test_cat_state_polynomial(self) -> None:
        poly = to_polynomial(make_ghz_state(4))
        assert poly.coefficients[0] == pytest.approx(poly.coefficients[4])
        assert np.allclose(poly.coefficients[1:4], 0)

    def test_highest_weight_is_monomial(self) -> None:
        poly = to_polynomial(dicke_state(3, 3))
        assert np.allclose(poly.coefficients[:3], 0)
        assert abs(poly.coefficients[3]) == pytest.approx(1.0)
        assert poly.degree_deficit == 0

    def test_middle_basis_state(self) -> None:
        poly = to_polynomial(dicke_state(4, 2))
        assert poly.coefficients[2] == pytest.approx(math.sqrt(6))
        assert poly.degree_deficit == 2

    def test_constant_polynomial_is_lowest_state(self) -> None:
        state = from_polynomial(make_polynomial([1, 0]))
        assert state.amplitudes == pytest.approx([1, 0])

    def test_zero_polynomial_raises(self) -> None:
        with pytest.raises(EmptyStateError):
            from_polynomial(make_polynomial([0, 0, 0]))

    def test_random_round_trip(self) -> None:
        rng = np.random.default_rng(6)
        coefficients = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        state = from_polynomial(make_polynomial(coefficients))
        again = from_polynomial(to_polynomial(state))
        assert np.max(np.abs(state.vector - again.vector)) < 1e-12

    @given(two_s=st.integers(min_value=0, max_value=60), seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_state_round_trip(self, two_s: int, seed: int) -> None:
        state = make_random_state(two_s, seed)
        again = from_polynomial(to_polynomial(state))
        assert_same_ray(state, again, atol=1e-12)


class TestLadder:
    def test_lowering_monomial(self) -> None:
        poly = make_polynomial([0, 0, 0, 1])
        result = apply_ladder(poly, Ladder.J_MINUS)
        assert result.coefficients == pytest.approx([0, 0, 3, 0])

    def test_raising_constant(self) -> None:
        result = apply_ladder(make_polynomial([1, 0, 0, 0]), Ladder.J_PLUS)
        assert result.coefficients == pytest.approx([0, 3, 0, 0])

    def test_raising_top_monomial_vanishes(self) -> None:
        result = apply_ladder(make_polynomial([0, 0, 1]), Ladder.J_PLUS)
        assert np.allclose(result.coefficients, 0)

    @pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
    def test_jz_eigen_monomials(self, k: int) -> None:
        coefficients = np.zeros(5)
        coefficients[k] = 1.0
        result = apply_ladder(make_polynomial(coefficients), Ladder.J_Z)
        assert result.coefficients[k] == pytest.approx(k - 2)

    @pytest.mark.parametrize(
        ("which", "sign", "attribute"),
        [(Ladder.J_PLUS, -1.0, "s_plus"), (Ladder.J_MINUS, -1.0, "s_minus"), (Ladder.J_Z, 1.0, "sz")],
    )
    def test_matches_matrix_action(self, which: Ladder, sign: float, attribute: str) -> None:
        state = make_random_state(5, 11)
        image = apply_ladder(to_polynomial(state), which)
        amplitudes = amplitudes_from_coefficients(5, image.vector)
        expected = sign * getattr(spin_operators(5), attribute) @ state.vector
        assert np.allclose(amplitudes, expected)

    @pytest.mark.parametrize("two_s", range(1, 21))
    def test_every_monomial_matches_matrix_action(self, two_s: int) -> None:
        ops = spin_operators(two_s)
        cases = [
            (Ladder.J_PLUS, -1.0, ops.s_plus),
            (Ladder.J_MINUS, -1.0, ops.s_minus),
            (Ladder.J_Z, 1.0, ops.sz),
        ]
        for which, sign, matrix in cases:
            for k in range(two_s + 1):
                monomial = np.zeros(two_s + 1, dtype=complex)
                monomial[k] = 1.0
                image = apply_ladder(make_polynomial(monomial), which)
                amplitudes = amplitudes_from_coefficients(two_s, image.vector)
                expected = sign * matrix @ amplitudes_from_coefficients(two_s, monomial)
                assert np.allclose(amplitudes, expected, rtol=1e-10, atol=1e-12), (which, k)


class TestOperators:
    def test_commutator(self) -> None:
        ops = spin_operators(4)
        assert np.allclose(ops.sx @ ops.sy - ops.sy @ ops.sx, 1j * ops.sz)

    def test_tetrahedron_second_moments(self) -> None:
        state = make_tetrahedron_state()
        ops = spin_operators(4)
        for op in ops.vector():
            assert expectation(state, op @ op).real == pytest.approx(2.0)

    def test_highest_weight_sz(self) -> None:
        assert expectation(dicke_state(5, 5), spin_operators(5).sz).real == pytest.approx(2.5)

    def test_cat_sz_vanishes(self) -> None:
        assert expectation(make_ghz_state(2), spin_operators(2).sz).real == pytest.approx(0.0)

    def test_shape_mismatch_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            expectation(dicke_state(2, 0), np.eye(2))

    def test_fidelity_mismatch_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            fidelity(dicke_state(2, 0), dicke_state(3, 0))


class TestCoherentStates:
    def test_points_along_direction(self) -> None:
        for direction in random_unit_vectors(5, 3):
            state = spin_coherent_state(4, direction)
            assert np.allclose(mean_spin(state), 2.0 * direction)

    def test_batch_matches_single(self) -> None:
        directions = np.vstack([random_unit_vectors(4, 8), [[0, 0, -1], [0, 0, 1]]])
        batch = coherent_amplitudes(3, directions)
        for row, direction in zip(batch, directions, strict=True):
            assert np.allclose(row, spin_coherent_state(3, direction).vector)

    def test_rotation_turns_mean_spin(self) -> None:
        state = rotate(dicke_state(2, 2), (0.0, math.pi / 2, 0.0))
        assert np.allclose(mean_spin(state), [1.0, 0.0, 0.0], atol=1e-12)

    def test_dicke_out_of_range_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            dicke_state(2, 3)
