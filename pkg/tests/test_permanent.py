"""Tests for permanents, Gram matrices and symmetric-state overlaps."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.constants import RYSER_CHUNK_BITS
from src.errors import BasisRankError, DimensionMismatchError, InvalidArgumentError, PermanentSizeError
from src.models import PoleConvention
from src.permanent import (
    antipodal_basis,
    coherent_tower,
    gram_matrix,
    normalization,
    permanent_rank2,
    permanent_ryser,
    spinor_of_star,
    spinor_permanent,
    symmetric_overlap,
)
from src.spinstate import dicke_state, spin_coherent_state
from src.stellar import constellation_from_vectors, constellation_of
from tests.conftest import (
    make_ghz_state,
    make_random_state,
    make_triplet_state,
    random_unit_vectors,
)


def naive_permanent(matrix: np.ndarray) -> complex:
    n = matrix.shape[0]
    return complex(
        sum(math.prod(matrix[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))
    )


def symmetrized_norm_squared(vectors: np.ndarray) -> float:
    """Squared norm of the sum over orderings of a product of spinors."""
    spinors = [np.array(spinor_of_star(v)) for v in vectors]
    total = np.zeros((2,) * len(spinors), dtype=complex)
    for order in itertools.permutations(range(len(spinors))):
        product = np.array(1.0 + 0j)
        for index in order:
            product = np.multiply.outer(product, spinors[index])
        total += product
    return float(np.vdot(total, total).real)


class TestSpinorOfStar:
    def test_north_pole(self) -> None:
        assert spinor_of_star((0, 0, 1)) == pytest.approx((1, 0))

    def test_south_pole_gauge(self) -> None:
        assert spinor_of_star((0, 0, -1)) == pytest.approx((0, 1))

    def test_orthogonal_directions(self) -> None:
        a = np.array(spinor_of_star((1, 0, 0)))
        b = np.array(spinor_of_star((0, 1, 0)))
        assert abs(np.vdot(a, b)) ** 2 == pytest.approx(0.5)

    def test_non_unit_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            spinor_of_star((1, 1, 0))


class TestRyser:
    def test_identity(self) -> None:
        assert permanent_ryser(np.eye(3)) == pytest.approx(1.0)

    def test_all_ones(self) -> None:
        assert permanent_ryser(np.ones((3, 3))) == pytest.approx(6.0)

    def test_empty_matrix(self) -> None:
        assert permanent_ryser(np.zeros((0, 0))) == 1.0

    def test_random_complex_matches_permutation_sum(self) -> None:
        rng = np.random.default_rng(3)
        matrix = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        expected = naive_permanent(matrix)
        assert abs(permanent_ryser(matrix) - expected) < 1e-12 * abs(expected)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_matches_permutation_sum_for_small_sizes(self, n: int) -> None:
        rng = np.random.default_rng(n)
        matrix = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        expected = naive_permanent(matrix)
        assert abs(permanent_ryser(matrix) - expected) < 1e-12 * max(1.0, abs(expected))

    def test_sweep_spanning_several_chunks(self) -> None:
        n = RYSER_CHUNK_BITS + 1
        rng = np.random.default_rng(8)
        a, b, c, d = (rng.uniform(0.5, 1.5, n) for _ in range(4))
        expected = permanent_rank2(a, b, c, d)
        assert permanent_ryser(np.outer(a, b) + np.outer(c, d)) == pytest.approx(expected, rel=1e-6)

    def test_non_square_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            permanent_ryser(np.ones((2, 3)))

    def test_too_large_raises(self) -> None:
        with pytest.raises(PermanentSizeError) as excinfo:
            permanent_ryser(np.ones((21, 21)))
        assert excinfo.value.code == "PERMANENT_TOO_LARGE"


class TestRank2:
    def test_all_ones_two_by_two(self) -> None:
        assert permanent_rank2([1, 1], [1, 1], [0, 0], [0, 0]) == pytest.approx(2.0)

    def test_length_mismatch_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            permanent_rank2([1, 1], [1], [0, 0], [0, 0])

    @given(n=st.integers(min_value=2, max_value=14), seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_matches_ryser(self, n: int, seed: int) -> None:
        rng = np.random.default_rng(seed)
        a, b, c, d = (rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(4))
        matrix = np.outer(a, b) + np.outer(c, d)
        expected = permanent_ryser(matrix)
        assert abs(permanent_rank2(a, b, c, d) - expected) < 1e-9 * max(1.0, abs(expected))

    def test_large_n_uses_log_factorials(self) -> None:
        ones = np.ones(25)
        zeros = np.zeros(25)
        assert permanent_rank2(ones, ones, zeros, zeros) == pytest.approx(math.factorial(25), rel=1e-10)


class TestGramMatrix:
    def test_hermitian_unit_diagonal_rank_two(self) -> None:
        state = make_random_state(7, 5)
        gram = gram_matrix(constellation_of(state))
        assert np.allclose(gram.entries, gram.entries.conj().T)
        assert np.allclose(np.diag(gram.entries), 1.0)
        assert gram.has_rank_at_most_two()
        assert gram.size == 7

    def test_coincident_stars(self) -> None:
        constellation = constellation_from_vectors([(0, 0, 1)] * 2)
        assert permanent_ryser(gram_matrix(constellation).entries) == pytest.approx(2.0)

    def test_ten_random_stars_match_ryser(self) -> None:
        constellation = constellation_from_vectors(random_unit_vectors(10, 8), tolerance=0.0)
        gram = gram_matrix(constellation)
        expected = permanent_ryser(gram.entries)
        assert abs(spinor_permanent(gram.spinors, gram.spinors) - expected) < 1e-9 * abs(expected)


class TestNormalization:
    def test_coincident_stars(self) -> None:
        constellation = constellation_from_vectors([(1, 0, 0)] * 3)
        assert normalization(constellation) == pytest.approx(36.0)

    def test_antipodal_pair(self) -> None:
        constellation = constellation_from_vectors([(0, 0, 1), (0, 0, -1)])
        assert normalization(constellation) == pytest.approx(2.0)

    def test_matches_symmetrized_tensor(self) -> None:
        vectors = random_unit_vectors(6, 14)
        constellation = constellation_from_vectors(vectors, tolerance=0.0, convention=PoleConvention.NORTH)
        expected = symmetrized_norm_squared(vectors)
        assert normalization(constellation) == pytest.approx(expected, rel=1e-10)


class TestSymmetricOverlap:
    def test_self_overlap(self) -> None:
        constellation = constellation_of(make_random_state(5, 2))
        assert abs(symmetric_overlap(constellation, constellation)) == pytest.approx(1.0)

    def test_coherent_state_at_antipode_is_orthogonal(self) -> None:
        constellation = constellation_of(make_random_state(4, 7), convention=PoleConvention.NORTH)
        star = np.array(constellation.stars[0].n)
        coherent = constellation_of(spin_coherent_state(4, -star))
        assert abs(symmetric_overlap(constellation, coherent)) < 1e-7

    def test_ghz_against_north_coherent(self) -> None:
        ghz = constellation_of(make_ghz_state(3))
        north = constellation_of(dicke_state(3, 3))
        assert abs(symmetric_overlap(ghz, north)) == pytest.approx(1 / math.sqrt(2))

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_magnitude_matches_amplitudes(self, seed: int) -> None:
        first = make_random_state(4, seed)
        second = make_random_state(4, seed + 1)
        stellar = symmetric_overlap(constellation_of(first, 0.0), constellation_of(second, 0.0))
        assert abs(stellar) == pytest.approx(abs(np.vdot(first.vector, second.vector)), abs=1e-9)

    def test_count_mismatch_raises(self) -> None:
        with pytest.raises(DimensionMismatchError):
            symmetric_overlap(constellation_of(dicke_state(2, 0)), constellation_of(dicke_state(3, 0)))


class TestAntipodalBasis:
    def test_cat_state(self) -> None:
        state = make_ghz_state(2)
        basis = antipodal_basis(state)
        assert len(basis) == 2
        for member in basis:
            assert abs(np.vdot(member.vector, state.vector)) < 1e-10

    def test_coherent_state_tower(self) -> None:
        state = dicke_state(3, 3)
        basis = antipodal_basis(state)
        assert len(basis) == 3
        for member in basis:
            assert abs(np.vdot(member.vector, state.vector)) < 1e-10

    def test_single_qubit(self) -> None:
        state = make_random_state(1, 4)
        (member,) = antipodal_basis(state)
        assert abs(np.vdot(member.vector, state.vector)) < 1e-10

    def test_triplet(self) -> None:
        basis = antipodal_basis(make_triplet_state())
        assert len(basis) == 2

    @pytest.mark.parametrize("two_s", [2, 5, 10])
    def test_completeness(self, two_s: int) -> None:
        state = make_random_state(two_s, 40 + two_s)
        basis = np.column_stack([member.vector for member in antipodal_basis(state)])
        orthonormal, _ = np.linalg.qr(basis)
        projector = orthonormal @ orthonormal.conj().T + np.outer(state.vector, state.vector.conj())
        assert np.linalg.norm(projector - np.eye(two_s + 1), ord=2) < 1e-8

    @pytest.mark.parametrize("w", [0.7 + 0.4j, 3.0 - 2.0j])
    def test_tower_head_is_coherent_state(self, w: complex) -> None:
        tower = coherent_tower(4, w, 3)
        assert len(tower) == 3
        assert all(np.linalg.norm(v) == pytest.approx(1.0) for v in tower)
        direction = np.array([2 * w.real, 2 * w.imag, 1 - abs(w) ** 2]) / (1 + abs(w) ** 2)
        assert abs(np.vdot(tower[0], spin_coherent_state(4, direction).vector)) == pytest.approx(1.0)

    def test_rank_error_code(self) -> None:
        assert BasisRankError.code == "BASIS_RANK_DEFICIENT"
