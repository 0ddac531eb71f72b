"""Majorana constellations: root extraction, projection and inversion.

Roots of the Majorana polynomial are found as eigenvalues of the companion
matrix of its finite part, polished by Newton steps on the unscaled
polynomial, projected onto the sphere and clustered by chordal distance.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .constants import (
    DEFAULT_TOLERANCE,
    INFINITY_THRESHOLD,
    MULTIPLE_ROOT_MIN_RADIUS,
    MULTIPLE_ROOT_RADIUS,
    MULTIPLE_ROOT_RESIDUAL,
    POLISH_MAX_ITERATIONS,
    POLISH_TOLERANCE,
)
from .errors import DimensionMismatchError, EmptyStateError, InvalidArgumentError
from .models import (
    INFINITY,
    Constellation,
    MajoranaPolynomial,
    PoleConvention,
    SpinState,
    Star,
    is_infinite,
)
from .spinstate import (
    amplitudes_from_coefficients,
    make_state,
    to_polynomial,
    with_phase_convention,
)

logger = logging.getLogger(__name__)

REFLECT_Z = np.diag([1.0, 1.0, -1.0])


def project(z: complex, convention: PoleConvention = PoleConvention.SOUTH) -> np.ndarray:
    """Inverse stereographic projection of an extended complex number.

    Under SOUTH, z = 0 maps to (0, 0, -1) and infinity to (0, 0, 1).
    """
    sign = 1.0 if convention is PoleConvention.SOUTH else -1.0
    if is_infinite(z):
        return np.array([0.0, 0.0, sign])
    if abs(z) <= 1.0:
        r2 = abs(z) ** 2
        planar = 2.0 * z / (1.0 + r2)
        height = (r2 - 1.0) / (1.0 + r2)
    else:
        w = 1.0 / z
        r2 = abs(w) ** 2
        planar = 2.0 * w.conjugate() / (1.0 + r2)
        height = (1.0 - r2) / (1.0 + r2)
    return np.array([planar.real, planar.imag, sign * height])


def unproject(n: Sequence[float] | np.ndarray, convention: PoleConvention = PoleConvention.SOUTH) -> complex:
    """Stereographic coordinate of a unit vector (inverse of :func:`project`)."""
    nx, ny, nz = (float(c) for c in n)
    if convention is PoleConvention.NORTH:
        nz = -nz
    if nz <= 0.0:
        return complex(nx, ny) / (1.0 - nz)
    denominator = complex(nx, -ny)
    if abs(denominator) == 0.0:
        return INFINITY
    return (1.0 + nz) / denominator


def antipode(z: complex) -> complex:
    """Return -1/conj(z), exchanging 0 and infinity."""
    if is_infinite(z):
        return 0j
    if z == 0:
        return INFINITY
    return -1.0 / complex(z).conjugate()


def chordal_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def star_rotation(rotation: np.ndarray, convention: PoleConvention = PoleConvention.SOUTH) -> np.ndarray:
    """Orthogonal matrix moving displayed stars when the state is rotated.

    Physical rotations of the state turn the NORTH-convention stars rigidly.
    SOUTH displays the mirror image in the equatorial plane, so the matrix
    is conjugated by that reflection.
    """
    matrix = np.asarray(rotation, dtype=float)
    if convention is PoleConvention.NORTH:
        return matrix
    return REFLECT_Z @ matrix @ REFLECT_Z


def to_physical_frame(vectors: np.ndarray, convention: PoleConvention) -> np.ndarray:
    """Map displayed star vectors to the directions of their spin-1/2 factors."""
    array = np.asarray(vectors, dtype=float)
    if convention is PoleConvention.NORTH:
        return array
    return array @ REFLECT_Z


def _newton_polish(coefficients: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Newton refinement; keeps a point only if |P| decreases."""
    derivative = npoly.polyder(coefficients)
    magnitudes = np.abs(coefficients)
    x = x.copy()
    residual = np.abs(npoly.polyval(x, coefficients))
    converged = residual <= POLISH_TOLERANCE * npoly.polyval(np.abs(x), magnitudes)
    for _ in range(POLISH_MAX_ITERATIONS):
        active = ~converged
        if not np.any(active):
            break
        slope = npoly.polyval(x[active], derivative)
        value = npoly.polyval(x[active], coefficients)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(slope != 0, value / slope, 0)
        candidate = x[active] - step
        candidate_residual = np.abs(npoly.polyval(candidate, coefficients))
        improved = np.isfinite(candidate) & (candidate_residual < residual[active])
        indices = np.flatnonzero(active)
        x[indices[improved]] = candidate[improved]
        residual[indices[improved]] = candidate_residual[improved]
        scale = npoly.polyval(np.abs(x[indices]), magnitudes)
        converged[indices] = (residual[indices] <= POLISH_TOLERANCE * scale) | ~improved
    scale = npoly.polyval(np.abs(x), magnitudes)
    return x, residual <= POLISH_TOLERANCE * scale


def _refine_multiple(core: np.ndarray, cluster: np.ndarray) -> complex | None:
    """Common value of a cluster if it is one root of multiplicity len(cluster).

    The centroid is refined as a simple root of P^(m-1) and accepted only
    when P, P', ..., P^(m-1) all vanish there relative to their coefficient
    scale. Clusters outside the unit disk are handled on the reversed
    polynomial in w = 1/z.
    """
    m = cluster.size
    inverted = abs(complex(cluster.mean())) > 1.0
    coefficients = core[::-1] if inverted else core
    with np.errstate(divide="ignore", invalid="ignore"):
        x = complex(np.mean(1.0 / cluster)) if inverted else complex(cluster.mean())
    if not np.isfinite(x):
        return None
    target = npoly.polyder(coefficients, m - 1)
    slope = npoly.polyder(target)
    for _ in range(POLISH_MAX_ITERATIONS):
        derivative = complex(npoly.polyval(x, slope))
        if derivative == 0:
            break
        step = complex(npoly.polyval(x, target)) / derivative
        x -= step
        if abs(step) <= POLISH_TOLERANCE * max(1.0, abs(x)):
            break
    for order in range(m):
        derived = npoly.polyder(coefficients, order)
        residual = abs(complex(npoly.polyval(x, derived)))
        if residual > MULTIPLE_ROOT_RESIDUAL * float(npoly.polyval(abs(x), np.abs(derived))):
            return None
    if not inverted:
        return x
    return INFINITY if x == 0 else 1.0 / x


def _merge_multiple_roots(core: np.ndarray, roots: np.ndarray) -> list[tuple[complex, np.ndarray]]:
    """Group polished roots into (value, member indices), merging multiple roots.

    Newton polishing pins an m-fold root only to about eps^(1/m), so its copies
    scatter on a small ring. Nearby roots are grouped by chordal distance and
    each group is tested as a single multiple root; failing groups are split
    at half the radius until they pass or become singletons.
    """
    vectors = np.array([project(complex(z)) for z in roots]).reshape(-1, 3)
    merged: list[tuple[complex, np.ndarray]] = []
    pending = [(np.arange(roots.size), MULTIPLE_ROOT_RADIUS)]
    while pending:
        members, radius = pending.pop()
        points = vectors[members]
        distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
        _, labels = connected_components(csr_matrix(distances <= radius), directed=False)
        for label in np.unique(labels):
            group = members[labels == label]
            if group.size == 1:
                merged.append((complex(roots[group[0]]), group))
                continue
            value = _refine_multiple(core, roots[group])
            if value is not None:
                merged.append((value, group))
            elif radius > MULTIPLE_ROOT_MIN_RADIUS:
                pending.append((group, radius / 2))
            else:
                merged.extend((complex(roots[i]), np.array([i])) for i in group)
    return merged


def extended_roots(coefficients: Sequence[complex] | np.ndarray) -> tuple[list[complex], int]:
    """All roots of an ascending coefficient vector on the extended plane.

    Multiple roots come back as exactly repeated values.

    Returns:
        The roots with multiplicity (infinity for each vanishing leading
        coefficient) and the count of simple roots whose polishing did not
        reach tolerance; those keep their best value found.

    Raises:
        EmptyStateError: If every coefficient is zero.
    """
    a = np.asarray(coefficients, dtype=complex).ravel()
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale == 0.0:
        msg = "Zero polynomial has no roots"
        raise EmptyStateError(msg)
    significant = np.flatnonzero(np.abs(a) >= INFINITY_THRESHOLD * scale)
    low, high = int(significant[0]), int(significant[-1])
    at_infinity = a.size - 1 - high
    core = a[low : high + 1]
    degree = core.size - 1
    roots: list[complex] = [0j] * low
    unconverged = 0
    if degree > 0:
        companion = np.zeros((degree, degree), dtype=complex)
        companion[1:, :-1] = np.eye(degree - 1)
        companion[:, -1] = -core[:-1] / core[-1]
        raw = np.linalg.eigvals(companion)
        inner = np.abs(raw) <= 1.0
        polished = raw.copy()
        ok = np.ones(degree, dtype=bool)
        if np.any(inner):
            polished[inner], ok[inner] = _newton_polish(core, raw[inner])
        if np.any(~inner):
            inverse, ok[~inner] = _newton_polish(core[::-1], 1.0 / raw[~inner])
            polished[~inner] = 1.0 / inverse
        for value, members in _merge_multiple_roots(core, polished):
            roots.extend([value] * members.size)
            if members.size == 1 and not ok[members[0]]:
                unconverged += 1
        if unconverged:
            logger.debug("Polishing left %d of %d roots above tolerance", unconverged, degree)
    roots.extend([INFINITY] * at_infinity)
    return roots, unconverged


def _centroid(vectors: np.ndarray) -> np.ndarray:
    mean = vectors.mean(axis=0)
    norm = np.linalg.norm(mean)
    return vectors[0] if norm < 1e-15 else mean / norm


def cluster_roots(
    roots: Iterable[complex],
    tolerance: float,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> tuple[Star, ...]:
    """Single-linkage clustering of roots by chordal distance on the sphere.

    Merging repeats on the cluster centroids until all stars are more than
    tolerance apart.
    """
    root_list = list(roots)
    vectors = np.array([project(z, convention) for z in root_list]).reshape(-1, 3)
    groups = [np.array([i]) for i in range(len(root_list))]
    centers = vectors
    while True:
        distances = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
        count, labels = connected_components(csr_matrix(distances <= tolerance), directed=False)
        if count == len(groups):
            break
        groups = [np.concatenate([groups[i] for i in np.flatnonzero(labels == label)]) for label in range(count)]
        centers = np.array([_centroid(vectors[g]) for g in groups])
    stars: list[Star] = []
    for members, center in zip(groups, centers, strict=True):
        first = root_list[members[0]]
        if all(root_list[i] == first for i in members):
            z, n = first, vectors[members[0]]
        else:
            z, n = unproject(center, convention), center
        stars.append(Star(z=z, n=(float(n[0]), float(n[1]), float(n[2])), multiplicity=int(members.size)))
    stars.sort(key=lambda s: (-s.n[2], s.phi, -s.multiplicity))
    return tuple(stars)


def find_stars(
    poly: MajoranaPolynomial,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> Constellation:
    """Extract the constellation of a Majorana polynomial.

    Args:
        poly: Polynomial of degree at most 2S.
        tolerance: Chordal radius under which roots merge into one star.
        convention: Pole convention for the displayed unit vectors.

    Returns:
        Constellation whose multiplicities sum to 2S.

    Raises:
        EmptyStateError: If the polynomial is zero.
        InvalidArgumentError: If tolerance is negative.
    """
    if tolerance < 0:
        msg = f"tolerance must be nonnegative, got {tolerance}"
        raise InvalidArgumentError(msg)
    roots, unconverged = extended_roots(poly.vector)
    return Constellation(
        two_s=poly.two_s,
        stars=cluster_roots(roots, tolerance, convention),
        tolerance=float(tolerance),
        convention=convention,
        unconverged=unconverged,
    )


def constellation_of(
    state: SpinState,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> Constellation:
    """Shortcut for find_stars(to_polynomial(state))."""
    return find_stars(to_polynomial(state), tolerance, convention)


def make_constellation(
    roots: Sequence[complex],
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> Constellation:
    """Constellation from an explicit root multiset (infinity allowed)."""
    if not roots:
        msg = "A constellation needs at least one star"
        raise EmptyStateError(msg)
    return Constellation(
        two_s=len(roots),
        stars=cluster_roots(roots, tolerance, convention),
        tolerance=float(tolerance),
        convention=convention,
    )


def constellation_from_vectors(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> Constellation:
    """Constellation from unit vectors given in the convention's frame."""
    array = np.asarray(vectors, dtype=float).reshape(-1, 3)
    norms = np.linalg.norm(array, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        msg = "Star directions must be unit vectors"
        raise InvalidArgumentError(msg)
    return make_constellation([unproject(v, convention) for v in array], tolerance, convention)


def _factor(z: complex) -> np.ndarray:
    """Normalized linear factor vanishing at z, as ascending coefficients."""
    if is_infinite(z):
        return np.array([1.0 + 0j, 0j])
    p = 1.0 / math.sqrt(1.0 + abs(z) ** 2)
    return np.array([-z * p, p + 0j])


def stars_to_state(stars: Constellation) -> SpinState:
    """Rebuild the state whose polynomial vanishes on the given stars.

    Raises:
        EmptyStateError: If the constellation has no stars.
        DimensionMismatchError: If multiplicities do not sum to two_s.
    """
    roots = stars.expanded_roots()
    if not roots:
        msg = "Empty constellation"
        raise EmptyStateError(msg)
    if len(roots) != stars.two_s:
        msg = f"Multiplicities sum to {len(roots)}, expected {stars.two_s}"
        raise DimensionMismatchError(msg)
    coefficients = np.array([1.0 + 0j])
    for z in roots:
        coefficients = np.convolve(coefficients, _factor(z))
    amplitudes = amplitudes_from_coefficients(stars.two_s, coefficients)
    return with_phase_convention(make_state(stars.two_s, amplitudes))


def coherent_state_at(two_s: int, z: complex) -> SpinState:
    """State with all 2S stars at z."""
    return stars_to_state(make_constellation([z] * two_s, tolerance=0.0))


def _mobius(z: complex, matrix: np.ndarray) -> complex:
    a, b, c, d = matrix.ravel()
    if is_infinite(z):
        return INFINITY if c == 0 else a / c
    denominator = c * z + d
    if denominator == 0:
        return INFINITY
    return (a * z + b) / denominator


def apply_mobius(constellation: Constellation, matrix: Sequence[Sequence[complex]] | np.ndarray) -> Constellation:
    """Act with an invertible 2x2 matrix on every root, keeping multiplicities."""
    array = np.asarray(matrix, dtype=complex)
    if array.shape != (2, 2) or abs(np.linalg.det(array)) < 1e-14:
        msg = "Moebius map needs an invertible 2x2 matrix"
        raise InvalidArgumentError(msg)
    stars = []
    for star in constellation.stars:
        z = _mobius(star.z, array)
        n = project(z, constellation.convention)
        stars.append(Star(z=z, n=(float(n[0]), float(n[1]), float(n[2])), multiplicity=star.multiplicity))
    return Constellation(
        two_s=constellation.two_s,
        stars=tuple(stars),
        tolerance=constellation.tolerance,
        convention=constellation.convention,
    )


def bargmann_zeros(state: SpinState) -> list[complex]:
    """Labels w of the star-coherent states orthogonal to the state.

    The coherent family used here has all stars at w; its overlap with the
    state is a polynomial in conj(w) whose zeros are returned (conjugated
    back). Each equals the antipode of one Majorana star.
    """
    n = state.two_s
    weights = np.sqrt([float(math.comb(n, k)) for k in range(n + 1)])
    bargmann = (weights * state.vector)[::-1]
    roots, _ = extended_roots(bargmann)
    return [z if is_infinite(z) else z.conjugate() for z in roots]
