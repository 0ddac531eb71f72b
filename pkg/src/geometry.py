"""Constellation geometry and the fields it determines on the sphere.

Pairwise metrics are evaluated over the multiplicity-expanded star list.
Multipole moments, Q and W functions come from exact operators on the
amplitude vector; quantities built from the stars alone are reported next
to them for comparison, never in their place.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.stats import chisquare

from .constants import ANTICOHERENCE_THRESHOLD
from .errors import EmptyStateError, InvalidArgumentError
from .models import Constellation, MajoranaPolynomial, PoleConvention, SpinState
from .spinstate import coherent_amplitudes, make_state, spin_operators
from .stellar import constellation_of, to_physical_frame

logger = logging.getLogger(__name__)

type HarmonicTable = dict[tuple[int, int], np.ndarray]


@dataclass(frozen=True)
class PairMetrics:
    """Pairwise geometry of the expanded star list."""

    dot: np.ndarray
    chordal: np.ndarray
    normalized_chordal: np.ndarray
    mean_pair_dot: float | None
    distance_product: float
    triple_products: tuple[float, ...] | None


@dataclass(frozen=True)
class MultipoleTable:
    """Exact moments <T^(l)_m> and the discrete star average, keyed by (l, m)."""

    moments: Mapping[tuple[int, int], complex]
    discrete_star_average: Mapping[tuple[int, int], complex]
    anticoherence_order: int
    max_l: int

    def norms(self) -> dict[int, float]:
        """Rotation-invariant sqrt(sum_m |<T^(l)_m>|^2) per rank."""
        return {
            l: math.sqrt(sum(abs(self.moments[(l, m)]) ** 2 for m in range(-l, l + 1)))
            for l in range(self.max_l + 1)
        }


@dataclass(frozen=True)
class SphereField:
    """Scalar samples of a quasi-probability on a direction grid."""

    directions: np.ndarray
    values: np.ndarray

    @property
    def peak(self) -> float:
        return float(np.max(self.values))

    def normalized(self) -> np.ndarray:
        peak = self.peak
        return self.values / peak if peak > 0 else self.values.copy()

    def angles(self) -> tuple[np.ndarray, np.ndarray]:
        theta = np.arccos(np.clip(self.directions[:, 2], -1.0, 1.0))
        phi = np.arctan2(self.directions[:, 1], self.directions[:, 0])
        return theta, phi


@dataclass(frozen=True)
class EnsembleStats:
    """Statistics of star positions over a sample of random states."""

    two_s: int
    sample_count: int
    mean_pair_dot: float
    standard_error: float
    pair_dot_lower_bound: float
    band_edges: np.ndarray
    band_counts: np.ndarray
    uniformity_pvalue: float
    nearest_neighbor_distances: np.ndarray


# ----------------------------------------------------------------------
# Pairwise metrics
# ----------------------------------------------------------------------


def _physical_vectors(constellation: Constellation) -> np.ndarray:
    return to_physical_frame(constellation.expanded_vectors(), constellation.convention)


def pair_metrics(constellation: Constellation) -> PairMetrics:
    """Dot products, chordal distances, mean pair dot and distance product.

    Raises:
        EmptyStateError: If the constellation has no stars.
    """
    vectors = _physical_vectors(constellation)
    n = vectors.shape[0]
    if n == 0:
        msg = "Pair metrics need at least one star"
        raise EmptyStateError(msg)
    dot = np.clip(vectors @ vectors.T, -1.0, 1.0)
    np.fill_diagonal(dot, 1.0)
    chordal = np.linalg.norm(vectors[:, None, :] - vectors[None, :, :], axis=-1)
    normalized = chordal / 2.0
    upper = np.triu_indices(n, k=1)
    mean_pair_dot = float(dot[upper].sum() / (n * (n - 1))) * 2.0 if n > 1 else None
    distance_product = float(np.prod(normalized[upper] ** 2))
    triples = None
    if n >= 3:
        triples = tuple(
            float(np.dot(vectors[k], np.cross(vectors[l], vectors[m])))
            for k, l, m in combinations(range(n), 3)
        )
    return PairMetrics(
        dot=dot,
        chordal=chordal,
        normalized_chordal=normalized,
        mean_pair_dot=mean_pair_dot,
        distance_product=distance_product,
        triple_products=triples,
    )


def stellar_rank(constellation: Constellation) -> tuple[int, float]:
    """Number of distinct stars and N^2 / sum m_k^2."""
    multiplicities = np.array(constellation.multiplicities, dtype=float)
    total = float(multiplicities.sum())
    return len(multiplicities), total**2 / float(np.sum(multiplicities**2))


def barycenter(constellation: Constellation) -> np.ndarray:
    """Half the vector sum of the physical star directions.

    This is a diagnostic only; it differs from the exact <S> in general.
    """
    return 0.5 * _physical_vectors(constellation).sum(axis=0)


def _pair_distances(constellation: Constellation) -> np.ndarray:
    vectors = _physical_vectors(constellation)
    return np.array([np.linalg.norm(a - b) for a, b in combinations(vectors, 2)])


def spread_functional(constellation: Constellation) -> float | None:
    """Population variance of the pairwise chordal distances."""
    distances = _pair_distances(constellation)
    return float(np.var(distances)) if distances.size else None


def stellar_entropy(constellation: Constellation) -> float | None:
    """Shannon entropy (nats) of the pair distances normalized to sum one."""
    distances = _pair_distances(constellation)
    if not distances.size:
        return None
    total = float(distances.sum())
    if total == 0.0:
        return 0.0
    p = distances[distances > 0] / total
    return float(-np.sum(p * np.log(p)))


def power_sums(poly: MajoranaPolynomial, max_r: int) -> np.ndarray:
    """Power sums p_r = sum_k z_k^r of the finite roots, r = 1..max_r.

    Computed from the coefficients by Newton's identities.
    """
    if max_r < 1:
        msg = f"max_r must be positive, got {max_r}"
        raise InvalidArgumentError(msg)
    a = poly.vector
    degree = poly.two_s - poly.degree_deficit
    sums = np.zeros(max_r, dtype=complex)
    if degree <= 0:
        return sums
    lead = a[degree]
    elementary = np.zeros(max_r + 1, dtype=complex)
    for i in range(1, min(degree, max_r) + 1):
        elementary[i] = (-1) ** i * a[degree - i] / lead
    for r in range(1, max_r + 1):
        value = (-1) ** (r - 1) * r * elementary[r]
        for i in range(1, r):
            value += (-1) ** (i - 1) * elementary[i] * sums[r - i - 1]
        sums[r - 1] = value
    return sums


# ----------------------------------------------------------------------
# Spherical harmonics and multipoles
# ----------------------------------------------------------------------


def _legendre_start(m: int) -> float:
    a = 1.0
    for k in range(1, m + 1):
        a *= (2 * k + 1) / (2 * k)
    return math.sqrt(a / (4 * math.pi))


def spherical_harmonics(max_l: int, theta: np.ndarray | float, phi: np.ndarray | float) -> HarmonicTable:
    """Orthonormal Y_lm with the Condon-Shortley phase for l <= max_l.

    Normalized associated Legendre functions are built by upward recurrence
    in l at fixed m; negative m follow from Y_{l,-m} = (-1)^m conj(Y_lm).
    """
    theta_arr = np.asarray(theta, dtype=float)
    phi_arr = np.asarray(phi, dtype=float)
    x = np.cos(theta_arr)
    s = np.sin(theta_arr)
    table: HarmonicTable = {}
    for m in range(max_l + 1):
        legendre = {m: _legendre_start(m) * (-s) ** m}
        if m + 1 <= max_l:
            legendre[m + 1] = math.sqrt(2 * m + 3) * x * legendre[m]
        for l in range(m + 2, max_l + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = -math.sqrt((2 * l + 1) * ((l - 1) ** 2 - m * m) / ((2 * l - 3) * (l * l - m * m)))
            legendre[l] = a * x * legendre[l - 1] + b * legendre[l - 2]
        phase = np.exp(1j * m * phi_arr)
        for l, p in legendre.items():
            value = p * phase
            table[(l, m)] = value
            if m:
                table[(l, -m)] = (-1) ** m * np.conj(value)
    return table


@lru_cache(maxsize=32)
def tensor_operators(two_s: int, l: int) -> dict[int, np.ndarray]:
    """Irreducible tensor operators T^(l)_q for one spin, keyed by q.

    Built from the top component (-1)^l (S+)^l by repeated commutators with
    S-, then scaled so that a coherent state along n has moments Y_lm(n).
    """
    if not 0 <= l <= two_s:
        msg = f"Rank l={l} outside 0..{two_s}"
        raise InvalidArgumentError(msg)
    ops = spin_operators(two_s)
    top = (-1) ** l * np.linalg.matrix_power(ops.s_plus, l)
    components = {l: top}
    for q in range(l, -l, -1):
        current = components[q]
        commutator = ops.s_minus @ current - current @ ops.s_minus
        components[q - 1] = commutator / math.sqrt((l + q) * (l - q + 1))
    scale = math.sqrt((2 * l + 1) / (4 * math.pi)) / components[0][-1, -1].real
    for q in components:
        components[q] = components[q] * scale
        components[q].setflags(write=False)
    return components


def multipoles(
    state: SpinState,
    max_l: int | None = None,
    threshold: float = ANTICOHERENCE_THRESHOLD,
) -> MultipoleTable:
    """Exact multipole moments and their discrete star counterparts.

    Raises:
        InvalidArgumentError: If max_l is outside 0..2S.
    """
    top = state.two_s if max_l is None else max_l
    if not 0 <= top <= state.two_s:
        msg = f"max_l={top} outside 0..{state.two_s}"
        raise InvalidArgumentError(msg)
    vector = state.vector
    moments: dict[tuple[int, int], complex] = {}
    for l in range(top + 1):
        for q, operator in tensor_operators(state.two_s, l).items():
            moments[(l, q)] = complex(np.vdot(vector, operator @ vector))
    if state.two_s:
        vectors = constellation_of(state, convention=PoleConvention.NORTH).expanded_vectors()
        theta = np.arccos(np.clip(vectors[:, 2], -1.0, 1.0))
        phi = np.arctan2(vectors[:, 1], vectors[:, 0])
        harmonics = spherical_harmonics(top, theta, phi)
        average = {key: complex(np.mean(values)) for key, values in harmonics.items()}
    else:
        average = dict(moments)
    order = 0
    for l in range(1, top + 1):
        if all(abs(moments[(l, m)]) < threshold for m in range(-l, l + 1)):
            order = l
        else:
            break
    return MultipoleTable(
        moments=moments,
        discrete_star_average=average,
        anticoherence_order=order,
        max_l=top,
    )


def star_multipole_norms(table: MultipoleTable) -> dict[int, tuple[float, float]]:
    """Per-rank norms of the exact moments and of the star average."""
    exact = table.norms()
    result = {}
    for l in range(table.max_l + 1):
        discrete = math.sqrt(sum(abs(table.discrete_star_average[(l, m)]) ** 2 for m in range(-l, l + 1)))
        result[l] = (exact[l], discrete)
    return result


# ----------------------------------------------------------------------
# Quasi-probabilities
# ----------------------------------------------------------------------


def _unit_grid(directions: np.ndarray) -> np.ndarray:
    grid = np.asarray(directions, dtype=float).reshape(-1, 3)
    if grid.shape[0] == 0:
        msg = "Direction grid is empty"
        raise InvalidArgumentError(msg)
    return grid / np.linalg.norm(grid, axis=1, keepdims=True)


def husimi_q(state: SpinState, directions: np.ndarray) -> SphereField:
    """Q(n) = |<n|psi>|^2 from coherent-state amplitudes."""
    grid = _unit_grid(directions)
    overlaps = coherent_amplitudes(state.two_s, grid).conj() @ state.vector
    return SphereField(directions=grid, values=np.abs(overlaps) ** 2)


def husimi_from_polynomial(poly: MajoranaPolynomial, directions: np.ndarray) -> SphereField:
    """Q(n) as |P(zeta)|^2 / (1 + |zeta|^2)^{2S}, written homogeneously.

    zeta is the antipode of the physical stereographic coordinate of n, so
    Q vanishes opposite each physical star direction.
    """
    grid = _unit_grid(directions)
    alpha = np.sqrt(np.clip((1.0 + grid[:, 2]) / 2.0, 0.0, None))
    beta = np.ones(grid.shape[0], dtype=complex)
    safe = alpha > 1e-150
    beta[safe] = (grid[safe, 0] + 1j * grid[safe, 1]) / (2.0 * alpha[safe])
    q = -alpha.astype(complex)
    p = beta.conj()
    n = poly.two_s
    q_powers = np.ones((grid.shape[0], n + 1), dtype=complex)
    p_powers = np.ones((grid.shape[0], n + 1), dtype=complex)
    for k in range(1, n + 1):
        q_powers[:, k] = q_powers[:, k - 1] * q
        p_powers[:, k] = p_powers[:, k - 1] * p
    total = (q_powers * p_powers[:, ::-1]) @ poly.vector
    return SphereField(directions=grid, values=np.abs(total) ** 2)


def husimi_zero_map(convention: PoleConvention) -> np.ndarray:
    """Matrix sending each displayed star to a zero of Q."""
    if convention is PoleConvention.NORTH:
        return -np.eye(3)
    return np.diag([-1.0, -1.0, 1.0])


def wigner_sphere(state: SpinState, directions: np.ndarray, max_l: int | None = None) -> SphereField:
    """Real kernel sum over (l, m) of sqrt(4pi/(2l+1)) conj(<T_lm>) Y_lm(n)."""
    grid = _unit_grid(directions)
    table = multipoles(state, max_l)
    theta = np.arccos(np.clip(grid[:, 2], -1.0, 1.0))
    phi = np.arctan2(grid[:, 1], grid[:, 0])
    harmonics = spherical_harmonics(table.max_l, theta, phi)
    values = np.zeros(grid.shape[0], dtype=complex)
    for (l, m), moment in table.moments.items():
        values += math.sqrt(4 * math.pi / (2 * l + 1)) * np.conj(moment) * harmonics[(l, m)]
    imaginary = float(np.max(np.abs(values.imag)))
    if imaginary > 1e-10:
        logger.warning("Wigner function has imaginary residue %.3e", imaginary)
    return SphereField(directions=grid, values=values.real)


# ----------------------------------------------------------------------
# Grids
# ----------------------------------------------------------------------


def latlon_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Product grid including both poles; returns (directions, theta, phi)."""
    if n_theta < 2 or n_phi < 1:
        msg = f"Grid needs n_theta >= 2 and n_phi >= 1, got {n_theta}x{n_phi}"
        raise InvalidArgumentError(msg)
    theta, phi = np.meshgrid(
        np.linspace(0.0, math.pi, n_theta),
        np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False),
        indexing="ij",
    )
    theta, phi = theta.ravel(), phi.ravel()
    directions = np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return directions, theta, phi


def spiral_points(n: int) -> np.ndarray:
    """Nearly uniform points along a spherical spiral."""
    i = np.arange(n)
    polar = np.arccos(-1.0 + (2 * i + 1) / n)
    azimuth = math.sqrt(n * math.pi) * polar
    s = np.sin(polar)
    return np.column_stack([s * np.cos(azimuth), s * np.sin(azimuth), np.cos(polar)])


_ICOSAHEDRON_FACES = (
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
)  # fmt: skip


def icosphere(subdivisions: int = 2) -> np.ndarray:
    """Vertices of a subdivided icosahedron projected to the unit sphere."""
    if subdivisions < 0:
        msg = f"subdivisions must be nonnegative, got {subdivisions}"
        raise InvalidArgumentError(msg)
    t = (1.0 + math.sqrt(5.0)) / 2.0
    vertices = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]  # fmt: skip
    points = [np.array(v, dtype=float) / np.linalg.norm(v) for v in vertices]
    faces = list(_ICOSAHEDRON_FACES)
    for _ in range(subdivisions):
        midpoints: dict[tuple[int, int], int] = {}

        def midpoint(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in midpoints:
                middle = points[i] + points[j]
                points.append(middle / np.linalg.norm(middle))
                midpoints[key] = len(points) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = refined
    return np.array(points)


# ----------------------------------------------------------------------
# Random ensembles
# ----------------------------------------------------------------------


def random_states(two_s: int, count: int, seed: int) -> list[SpinState]:
    """Haar-random states from complex Gaussian amplitudes, one stream per seed."""
    if two_s < 1:
        msg = f"Random states need two_s >= 1, got {two_s}"
        raise InvalidArgumentError(msg)
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(count):
        amplitudes = rng.standard_normal(two_s + 1) + 1j * rng.standard_normal(two_s + 1)
        states.append(make_state(two_s, amplitudes))
    return states


def random_state(two_s: int, seed: int) -> SpinState:
    return random_states(two_s, 1, seed)[0]


def ensemble_stats(samples: Sequence[Constellation], bands: int = 10) -> EnsembleStats:
    """Mean pair dot, colatitude band counts and nearest-neighbour distances.

    Bands have equal area, so a uniform density fills them equally.

    Raises:
        EmptyStateError: If no samples are given.
        InvalidArgumentError: If samples mix star counts or have one star only
            while a pair statistic is requested.
    """
    if not samples:
        msg = "Ensemble is empty"
        raise EmptyStateError(msg)
    two_s = samples[0].two_s
    if any(sample.two_s != two_s for sample in samples):
        msg = "Ensemble samples must share two_s"
        raise InvalidArgumentError(msg)
    pair_dots = []
    heights = []
    nearest = []
    for sample in samples:
        vectors = _physical_vectors(sample)
        heights.append(vectors[:, 2])
        if two_s > 1:
            metrics = pair_metrics(sample)
            pair_dots.append(metrics.mean_pair_dot)
            masked = metrics.chordal + np.diag(np.full(two_s, np.inf))
            nearest.append(masked.min(axis=1))
    edges = np.linspace(-1.0, 1.0, bands + 1)
    counts, _ = np.histogram(np.concatenate(heights), bins=edges)
    pvalue = float(chisquare(counts).pvalue)
    dots = np.array(pair_dots, dtype=float)
    if dots.size:
        mean = float(dots.mean())
        error = float(dots.std(ddof=1) / math.sqrt(dots.size)) if dots.size > 1 else 0.0
        bound = -1.0 / (two_s - 1)
    else:
        mean, error, bound = math.nan, math.nan, math.nan
    logger.debug("Ensemble of %d samples: mean pair dot %.6f +- %.6f", len(samples), mean, error)
    return EnsembleStats(
        two_s=two_s,
        sample_count=len(samples),
        mean_pair_dot=mean,
        standard_error=error,
        pair_dot_lower_bound=bound,
        band_edges=edges,
        band_counts=counts,
        uniformity_pvalue=pvalue,
        nearest_neighbor_distances=np.concatenate(nearest) if nearest else np.zeros(0),
    )


def hannay_mean(solid_angles: Sequence[float]) -> float:
    """Semiclassical Hannay angle -(1/2S) sum_k Omega_k.

    Raises:
        InvalidArgumentError: If no solid angles are given.
    """
    values = np.asarray(solid_angles, dtype=float)
    if values.size == 0:
        msg = "Hannay mean needs at least one solid angle"
        raise InvalidArgumentError(msg)
    return -float(values.mean())
