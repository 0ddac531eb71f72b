"""Permanent-based overlaps of symmetric states.

A symmetric state built from spinors |n_1>..|n_N> has squared norm
N! Perm(G) with G the Gram matrix of the spinors, and two such states
overlap as Perm(M)/sqrt(Perm(G_a) Perm(G_b)) with M the cross matrix.
All these matrices have rank at most two, so their permanents reduce to
products of two polynomials.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .constants import (
    BASIS_RANK_TOLERANCE,
    DEFAULT_TOLERANCE,
    LOG_FACTORIAL_CUTOFF,
    RYSER_CHUNK_BITS,
    RYSER_MAX_SIZE,
)
from .errors import BasisRankError, DimensionMismatchError, InvalidArgumentError, PermanentSizeError
from .models import Constellation, PoleConvention, SpinState, Star, is_infinite
from .spinstate import make_state, spinor
from .stellar import antipode, constellation_of, to_physical_frame

logger = logging.getLogger(__name__)

type Spinor = tuple[complex, complex]


@dataclass(frozen=True)
class GramMatrix:
    """Overlaps <n_i|n_j> of the spin-1/2 factors of a constellation."""

    entries: np.ndarray
    spinors: tuple[Spinor, ...]

    @property
    def size(self) -> int:
        return len(self.spinors)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    def has_rank_at_most_two(self, threshold: float = 1e-10) -> bool:
        values = self.singular_values()
        return values.size < 3 or bool(values[2] < threshold)


def spinor_of_star(n: Sequence[float] | np.ndarray) -> Spinor:
    """(cos(theta/2), sin(theta/2) e^{i phi}) for a unit vector.

    Raises:
        InvalidArgumentError: If n is not a unit vector.
    """
    vector = np.asarray(n, dtype=float)
    if vector.shape != (3,) or abs(float(np.linalg.norm(vector)) - 1.0) > 1e-9:
        msg = f"Expected a unit 3-vector, got {vector.tolist()}"
        raise InvalidArgumentError(msg)
    return spinor(vector)


def _physical_spinors(constellation: Constellation) -> tuple[Spinor, ...]:
    vectors = to_physical_frame(constellation.expanded_vectors(), constellation.convention)
    return tuple(spinor_of_star(v) for v in vectors)


def _columns(spinors: Sequence[Spinor]) -> tuple[np.ndarray, np.ndarray]:
    alpha = np.array([s[0] for s in spinors], dtype=complex)
    beta = np.array([s[1] for s in spinors], dtype=complex)
    return alpha, beta


def cross_matrix(bra: Sequence[Spinor], ket: Sequence[Spinor]) -> np.ndarray:
    """M_ij = <bra_i|ket_j>."""
    alpha_a, beta_a = _columns(bra)
    alpha_b, beta_b = _columns(ket)
    return np.outer(alpha_a.conj(), alpha_b) + np.outer(beta_a.conj(), beta_b)


def gram_matrix(constellation: Constellation) -> GramMatrix:
    """Gram matrix of the multiplicity-expanded stars."""
    spinors = _physical_spinors(constellation)
    return GramMatrix(entries=cross_matrix(spinors, spinors), spinors=spinors)


def permanent_ryser(matrix: np.ndarray) -> complex:
    """Exact permanent by inclusion-exclusion over column subsets.

    Subsets are swept in Gray-code order, so consecutive subsets differ in
    one column and the row sums are updated in O(N) per subset. Chunks of
    updates are applied with a cumulative sum and reduced with numpy's
    pairwise sum, which keeps the result deterministic.

    Raises:
        DimensionMismatchError: If the matrix is not square.
        PermanentSizeError: If the matrix is larger than the exact-cost guard.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        msg = f"Permanent needs a square matrix, got shape {a.shape}"
        raise DimensionMismatchError(msg)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j
    if n > RYSER_MAX_SIZE:
        msg = f"Exact permanent limited to {RYSER_MAX_SIZE}x{RYSER_MAX_SIZE}, got {n}x{n}"
        raise PermanentSizeError(msg)
    shifts = np.arange(n)
    chunk = 1 << min(n, RYSER_CHUNK_BITS)
    running = np.zeros(n, dtype=complex)
    total = 0j
    # The empty subset has zero row sums and contributes nothing.
    for start in range(1, 1 << n, chunk):
        k = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        column = np.argmax(((k & -k)[:, None] >> shifts) & 1, axis=1)
        entering = ((k ^ (k >> 1)) >> column) & 1
        updates = np.where(entering == 1, 1.0, -1.0)[:, None] * a[:, column].T
        sums = running + np.cumsum(updates, axis=0)
        running = sums[-1]
        signs = np.where(k % 2 == 1, -1.0, 1.0)
        total += complex(np.sum(signs * np.prod(sums, axis=1)))
    return (-1) ** n * total


def _factorial_weights(n: int) -> np.ndarray:
    t = np.arange(n + 1)
    if n <= LOG_FACTORIAL_CUTOFF:
        return np.array([float(math.factorial(i) * math.factorial(n - i)) for i in t])
    logs = np.array([math.lgamma(i + 1) + math.lgamma(n - i + 1) for i in t])
    return np.exp(logs)


def permanent_rank2(
    a: Sequence[complex] | np.ndarray,
    b: Sequence[complex] | np.ndarray,
    c: Sequence[complex] | np.ndarray,
    d: Sequence[complex] | np.ndarray,
) -> complex:
    """Permanent of A_ij = a_i b_j + c_i d_j in O(N^2).

    Choosing the a-term in t rows and the b-term in t columns contributes
    t!(N-t)! times the matching elementary symmetric products, which are
    the coefficients of prod_i (c_i + y a_i) and prod_j (d_j + x b_j).

    Raises:
        DimensionMismatchError: If the four vectors differ in length.
    """
    arrays = [np.asarray(v, dtype=complex).ravel() for v in (a, b, c, d)]
    n = arrays[0].size
    if any(v.size != n for v in arrays):
        msg = "Rank-2 factors must have equal length"
        raise DimensionMismatchError(msg)
    a_vec, b_vec, c_vec, d_vec = arrays
    rows = np.array([1.0 + 0j])
    cols = np.array([1.0 + 0j])
    for i in range(n):
        rows = np.convolve(rows, [c_vec[i], a_vec[i]])
        cols = np.convolve(cols, [d_vec[i], b_vec[i]])
    return complex(np.sum(_factorial_weights(n) * rows * cols))


def spinor_permanent(bra: Sequence[Spinor], ket: Sequence[Spinor]) -> complex:
    """Perm of the cross matrix without forming it."""
    alpha_a, beta_a = _columns(bra)
    alpha_b, beta_b = _columns(ket)
    return permanent_rank2(alpha_a.conj(), alpha_b, beta_a.conj(), beta_b)


def normalization(stars: Constellation) -> float:
    """Squared norm N! Perm(G) of the unnormalized symmetrized product."""
    spinors = _physical_spinors(stars)
    value = spinor_permanent(spinors, spinors).real
    return math.factorial(len(spinors)) * value


def symmetric_overlap(stars_a: Constellation, stars_b: Constellation) -> complex:
    """<phi|psi> of the states built from two constellations.

    The phase belongs to the spinor gauge; the magnitude is gauge free.

    Raises:
        DimensionMismatchError: If the star counts differ.
    """
    if stars_a.two_s != stars_b.two_s:
        msg = f"Star counts differ: {stars_a.two_s} vs {stars_b.two_s}"
        raise DimensionMismatchError(msg)
    spinors_a = _physical_spinors(stars_a)
    spinors_b = _physical_spinors(stars_b)
    cross = spinor_permanent(spinors_a, spinors_b)
    norm_a = spinor_permanent(spinors_a, spinors_a).real
    norm_b = spinor_permanent(spinors_b, spinors_b).real
    return cross / math.sqrt(norm_a * norm_b)


def _falling(n: np.ndarray, r: int) -> np.ndarray:
    out = np.ones_like(n, dtype=float)
    for i in range(r):
        out = out * (n - i)
    return out


def coherent_tower(two_s: int, w: complex, depth: int) -> list[np.ndarray]:
    """Coherent amplitudes with all stars at w and their first derivatives.

    Uses the parameter w for |w| <= 1 and u = 1/w otherwise; both charts
    span the same subspace for a given depth.
    """
    k = np.arange(two_s + 1)
    weights = np.sqrt([float(math.comb(two_s, i)) for i in k])
    use_inverse = is_infinite(w) or abs(w) > 1.0
    x = 0j if is_infinite(w) else (1.0 / w if use_inverse else w)
    powers = k if use_inverse else two_s - k
    tower = []
    for r in range(depth):
        exponents = powers - r
        factor = _falling(powers.astype(float), r)
        values = np.array(
            [x**e if e >= 0 else 0j for e in exponents],
            dtype=complex,
        )
        vector = weights * factor * values
        tower.append(vector / np.linalg.norm(vector))
    return tower


def antipodal_basis(state: SpinState, tolerance: float = DEFAULT_TOLERANCE) -> list[SpinState]:
    """Orthogonal-complement basis from coherent states at star antipodes.

    Each distinct star of multiplicity m contributes the coherent state at
    its antipode and m - 1 derivative states.

    Raises:
        BasisRankError: If a cluster's derivative states fail to add rank.
    """
    constellation = constellation_of(state, tolerance, PoleConvention.NORTH)
    vectors: list[np.ndarray] = []
    for star in constellation.stars:
        tower = coherent_tower(state.two_s, antipode(star.z), star.multiplicity)
        candidate = np.column_stack([*vectors, *tower])
        _check_rank(candidate, star)
        vectors.extend(tower)
    return [make_state(state.two_s, v) for v in vectors]


def _check_rank(columns: np.ndarray, star: Star) -> None:
    values = np.linalg.svd(columns, compute_uv=False)
    if values[-1] < BASIS_RANK_TOLERANCE * values[0]:
        msg = (
            f"Antipodal basis lost rank at star z={star.z} "
            f"(multiplicity {star.multiplicity}, sigma_min={values[-1]:.3e})"
        )
        raise BasisRankError(msg)
