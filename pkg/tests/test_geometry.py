"""Tests for constellation geometry, multipoles, quasi-probabilities and ensembles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from src.errors import EmptyStateError, InvalidArgumentError
from src.geometry import (
    barycenter,
    ensemble_stats,
    hannay_mean,
    husimi_from_polynomial,
    husimi_q,
    husimi_zero_map,
    icosphere,
    latlon_grid,
    multipoles,
    pair_metrics,
    power_sums,
    random_state,
    random_states,
    spherical_harmonics,
    spiral_points,
    spread_functional,
    star_multipole_norms,
    stellar_entropy,
    stellar_rank,
    wigner_sphere,
)
from src.models import PoleConvention
from src.spinstate import (
    dicke_state,
    make_polynomial,
    mean_spin,
    rotate,
    spin_coherent_state,
    to_polynomial,
)
from src.stellar import constellation_from_vectors, constellation_of, stars_to_state
from tests.conftest import (
    make_coherent_state,
    make_ghz_state,
    make_random_state,
    make_tetrahedron_state,
    make_triplet_state,
    random_unit_vectors,
)


class TestPairMetrics:
    def test_ghz_triangle(self) -> None:
        metrics = pair_metrics(constellation_of(make_ghz_state(3)))
        off_diagonal = metrics.dot[~np.eye(3, dtype=bool)]
        assert np.allclose(off_diagonal, -0.5)
        assert metrics.normalized_chordal[0, 1] ** 2 == pytest.approx(0.75)
        assert metrics.distance_product == pytest.approx(27 / 64)
        assert metrics.mean_pair_dot == pytest.approx(-0.5)

    def test_coherent_state(self) -> None:
        metrics = pair_metrics(constellation_of(dicke_state(4, 4)))
        assert np.allclose(metrics.dot, 1.0)
        assert metrics.distance_product == 0.0
        assert metrics.mean_pair_dot == pytest.approx(1.0)

    def test_antipodal_pair(self) -> None:
        metrics = pair_metrics(constellation_of(make_triplet_state()))
        assert metrics.dot[0, 1] == pytest.approx(-1.0)
        assert metrics.normalized_chordal[0, 1] == pytest.approx(1.0)
        assert metrics.triple_products is None

    def test_single_star_has_no_mean(self) -> None:
        assert pair_metrics(constellation_of(dicke_state(1, 0))).mean_pair_dot is None

    def test_triple_products_for_tetrahedron(self) -> None:
        metrics = pair_metrics(constellation_of(make_tetrahedron_state()))
        assert metrics.triple_products is not None
        assert len(metrics.triple_products) == 4
        assert all(abs(v) == pytest.approx(4 / (3 * math.sqrt(3))) for v in metrics.triple_products)


class TestStellarRank:
    def test_coherent(self) -> None:
        assert stellar_rank(constellation_of(dicke_state(5, 0))) == (1, 1.0)

    @pytest.mark.parametrize("clusters", [2, 3])
    def test_equal_clusters(self, clusters: int) -> None:
        directions = random_unit_vectors(clusters, 3)
        constellation = constellation_from_vectors(np.repeat(directions, 2, axis=0))
        rank, effective = stellar_rank(constellation)
        assert rank == clusters
        assert effective == pytest.approx(clusters)

    def test_generic_random_state(self) -> None:
        assert stellar_rank(constellation_of(make_random_state(8, 1))) == (8, 8.0)


class TestBarycenter:
    def test_differs_from_exact_mean_spin(self) -> None:
        vectors = [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]
        constellation = constellation_from_vectors(vectors, convention=PoleConvention.NORTH)
        state = stars_to_state(constellation)
        assert np.allclose(state.vector, np.array([0, 1, math.sqrt(2)]) / math.sqrt(3))
        assert mean_spin(state)[2] == pytest.approx(2 / 3)
        assert barycenter(constellation)[2] == pytest.approx(0.5)

    def test_coherent_state_agrees(self) -> None:
        direction = random_unit_vectors(1, 2)[0]
        constellation = constellation_of(spin_coherent_state(3, direction))
        assert np.allclose(barycenter(constellation), 1.5 * direction, atol=1e-8)


class TestScalarFunctionals:
    def test_spread_of_regular_polygon_vanishes(self) -> None:
        assert spread_functional(constellation_of(make_ghz_state(3))) == pytest.approx(0.0, abs=1e-20)

    def test_spread_needs_pairs(self) -> None:
        assert spread_functional(constellation_of(dicke_state(1, 1))) is None

    def test_entropy_of_equal_distances(self) -> None:
        assert stellar_entropy(constellation_of(make_ghz_state(3))) == pytest.approx(math.log(3))

    def test_entropy_of_coincident_stars(self) -> None:
        assert stellar_entropy(constellation_of(dicke_state(3, 0))) == 0.0

    def test_power_sums_of_roots(self) -> None:
        roots = np.array([0.5 + 0.2j, -1.0 + 0.0j, 2.0j])
        poly = make_polynomial(np.polynomial.polynomial.polyfromroots(roots))
        expected = [np.sum(roots**r) for r in range(1, 5)]
        assert np.allclose(power_sums(poly, 4), expected)

    def test_power_sums_reject_zero_order(self) -> None:
        with pytest.raises(InvalidArgumentError):
            power_sums(to_polynomial(dicke_state(2, 1)), 0)


class TestSphericalHarmonics:
    def test_orthonormal_on_quadrature_grid(self) -> None:
        nodes, weights = np.polynomial.legendre.leggauss(12)
        theta = np.arccos(nodes)
        phi = np.linspace(0, 2 * math.pi, 24, endpoint=False)
        grid_theta, grid_phi = np.meshgrid(theta, phi, indexing="ij")
        w = np.outer(weights, np.full(24, 2 * math.pi / 24))
        table = spherical_harmonics(3, grid_theta, grid_phi)
        for a, b in [((2, 1), (2, 1)), ((3, -2), (3, -2)), ((1, 0), (2, 0)), ((2, 1), (2, -1))]:
            integral = np.sum(w * np.conj(table[a]) * table[b])
            assert integral == pytest.approx(1.0 if a == b else 0.0, abs=1e-12)

    def test_condon_shortley_phase(self) -> None:
        table = spherical_harmonics(1, math.pi / 2, 0.0)
        assert table[(1, 1)] == pytest.approx(-math.sqrt(3 / (8 * math.pi)))


class TestMultipoles:
    def test_tetrahedron_is_two_anticoherent(self) -> None:
        table = multipoles(make_tetrahedron_state())
        assert table.anticoherence_order == 2
        for l in (1, 2):
            for m in range(-l, l + 1):
                assert abs(table.moments[(l, m)]) < 1e-12

    def test_coherent_state_has_dipole(self) -> None:
        table = multipoles(dicke_state(4, 4))
        assert abs(table.moments[(1, 0)]) > 0.1
        assert table.anticoherence_order == 0

    def test_cat_state_is_one_anticoherent(self) -> None:
        assert multipoles(make_ghz_state(2)).anticoherence_order == 1

    def test_coherent_moments_are_harmonics(self) -> None:
        direction = random_unit_vectors(1, 19)[0]
        table = multipoles(spin_coherent_state(4, direction))
        theta, phi = math.acos(direction[2]), math.atan2(direction[1], direction[0])
        harmonics = spherical_harmonics(4, theta, phi)
        for key, value in table.moments.items():
            assert value == pytest.approx(complex(harmonics[key]), abs=1e-10)

    def test_star_average_of_coherent_state_is_exact_at_dipole(self) -> None:
        table = multipoles(make_coherent_state(3, (1.0, 2.0, -0.5)), max_l=1)
        norms = star_multipole_norms(table)
        assert norms[1][0] == pytest.approx(norms[1][1], rel=1e-6)

    def test_max_l_out_of_range_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            multipoles(dicke_state(2, 0), max_l=3)

    def test_norms_are_rotation_invariant(self) -> None:
        state = make_random_state(5, 6)
        before = multipoles(state).norms()
        after = multipoles(rotate(state, (0.3, 1.1, -0.7))).norms()
        assert before == pytest.approx(after)


class TestHusimi:
    def test_coherent_peak_and_antipode_zero(self) -> None:
        direction = random_unit_vectors(1, 4)[0]
        state = spin_coherent_state(3, direction)
        field = husimi_q(state, np.vstack([direction, -direction]))
        assert field.values == pytest.approx([1.0, 0.0], abs=1e-12)

    def test_highest_weight_closed_form(self) -> None:
        directions, theta, _ = latlon_grid(9, 8)
        field = husimi_q(dicke_state(3, 3), directions)
        assert np.allclose(field.values, np.cos(theta / 2) ** 6)

    def test_polynomial_form_matches_overlap(self) -> None:
        state = make_random_state(5, 13)
        grid = spiral_points(50)
        assert np.allclose(husimi_from_polynomial(to_polynomial(state), grid).values, husimi_q(state, grid).values)

    @pytest.mark.parametrize("convention", list(PoleConvention))
    def test_zeros_follow_zero_map(self, convention: PoleConvention) -> None:
        state = make_random_state(4, 23)
        stars = constellation_of(state, convention=convention).vectors()
        zeros = stars @ husimi_zero_map(convention).T
        assert np.allclose(husimi_q(state, zeros).values, 0.0, atol=1e-16)

    def test_noon_zeros_on_great_circle(self) -> None:
        state = make_ghz_state(4)
        stars = constellation_of(state, convention=PoleConvention.NORTH).vectors()
        assert np.allclose(stars[:, 2], 0.0)
        assert np.allclose(husimi_q(state, -stars).values, 0.0, atol=1e-16)

    def test_normalized_peak(self) -> None:
        field = husimi_q(make_random_state(3, 3), spiral_points(100))
        assert field.normalized().max() == pytest.approx(1.0)

    def test_empty_grid_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            husimi_q(dicke_state(1, 0), np.zeros((0, 3)))


class TestWigner:
    def test_axially_symmetric_for_highest_weight(self) -> None:
        directions, _, _ = latlon_grid(7, 12)
        values = wigner_sphere(dicke_state(4, 4), directions).values.reshape(7, 12)
        assert np.allclose(values, values[:, :1])

    def test_cat_poles_agree(self) -> None:
        values = wigner_sphere(make_ghz_state(2), np.array([[0, 0, 1.0], [0, 0, -1.0]])).values
        assert values[0] == pytest.approx(values[1])

    def test_tetrahedral_symmetry(self) -> None:
        state = make_tetrahedron_state()
        stars = constellation_of(state, convention=PoleConvention.NORTH).vectors()
        values = wigner_sphere(state, stars).values
        assert np.allclose(values, values[0], atol=1e-8)

    def test_integral_is_monopole(self) -> None:
        nodes, weights = np.polynomial.legendre.leggauss(8)
        theta, phi = np.meshgrid(np.arccos(nodes), np.linspace(0, 2 * math.pi, 16, endpoint=False), indexing="ij")
        directions = np.column_stack(
            [(np.sin(theta) * np.cos(phi)).ravel(), (np.sin(theta) * np.sin(phi)).ravel(), np.cos(theta).ravel()]
        )
        values = wigner_sphere(make_random_state(3, 8), directions).values.reshape(theta.shape)
        integral = float(np.sum(np.outer(weights, np.full(16, 2 * math.pi / 16)) * values))
        assert integral == pytest.approx(math.sqrt(4 * math.pi), rel=1e-10)


class TestGrids:
    def test_latlon_includes_poles(self) -> None:
        directions, _, _ = latlon_grid(3, 4)
        assert directions.shape == (12, 3)
        assert np.allclose(directions[:4], [0, 0, 1])

    def test_spiral_points_are_unit(self) -> None:
        assert np.allclose(np.linalg.norm(spiral_points(30), axis=1), 1.0)

    def test_icosphere_vertex_count(self) -> None:
        assert icosphere(0).shape == (12, 3)
        assert icosphere(1).shape == (42, 3)

    def test_bad_grid_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            latlon_grid(1, 4)


class TestRandomEnsemble:
    def test_seed_is_deterministic(self) -> None:
        first = random_states(6, 3, seed=99)
        second = random_states(6, 3, seed=99)
        assert [s.amplitudes for s in first] == [s.amplitudes for s in second]
        assert random_state(6, 99).amplitudes == first[0].amplitudes

    def test_mean_pair_dot_above_lower_bound(self) -> None:
        states = random_states(20, 400, seed=5)
        stats = ensemble_stats([constellation_of(s) for s in states])
        assert stats.pair_dot_lower_bound == pytest.approx(-1 / 19)
        assert stats.mean_pair_dot < 0
        assert stats.mean_pair_dot > stats.pair_dot_lower_bound + 3 * stats.standard_error

    def test_single_star_is_uniform(self) -> None:
        states = random_states(1, 2000, seed=11)
        stats = ensemble_stats([constellation_of(s) for s in states])
        assert stats.band_counts.sum() == 2000
        assert stats.uniformity_pvalue > 1e-3
        assert math.isnan(stats.mean_pair_dot)

    def test_nearest_neighbours_recorded(self) -> None:
        stats = ensemble_stats([constellation_of(s) for s in random_states(4, 10, seed=1)])
        assert stats.nearest_neighbor_distances.shape == (40,)

    def test_empty_ensemble_raises(self) -> None:
        with pytest.raises(EmptyStateError):
            ensemble_stats([])

    def test_two_s_zero_rejected(self) -> None:
        with pytest.raises(InvalidArgumentError):
            random_states(0, 1, seed=0)


class TestHannay:
    def test_rigid_constellation(self) -> None:
        assert hannay_mean([0.4, 0.4, 0.4]) == pytest.approx(-0.4)

    def test_spin_one(self) -> None:
        assert hannay_mean([2 * math.pi, 0.0]) == pytest.approx(-math.pi)

    def test_empty_raises(self) -> None:
        with pytest.raises(InvalidArgumentError):
            hannay_mean([])
