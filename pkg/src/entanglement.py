"""Entanglement classes and measures of symmetric multiqubit states.

A spin-S state is read as a symmetric state of N = 2S qubits. The amplitude
of a bitstring with k ones is c_k / sqrt(C(N, k)). Each geometric quantity
is reported next to an algebraic oracle computed from these amplitudes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .constants import DEFAULT_TOLERANCE, MEAN_SPIN_THRESHOLD
from .errors import DimensionMismatchError, InvalidArgumentError
from .geometry import MultipoleTable, multipoles, pair_metrics, spiral_points, stellar_rank
from .models import Constellation, PoleConvention, SpinState
from .spinstate import coherent_amplitudes, expectation, spin_operators
from .stellar import cluster_roots, constellation_of, stars_to_state, to_physical_frame

logger = logging.getLogger(__name__)

SLOCC_LABELS: dict[tuple[int, ...], str] = {
    (1, 1): "Bell-class",
    (2, 1): "W-class",
    (1, 1, 1): "GHZ-class",
    (3, 1): "W-class",
    (2, 2): "Dicke-class",
    (2, 1, 1): "degenerate-pair",
    (1, 1, 1, 1): "generic",
}

PETROV_LABELS: dict[tuple[int, ...], str] = {
    (1, 1, 1, 1): "I",
    (2, 1, 1): "II",
    (2, 2): "D",
    (3, 1): "III",
    (4,): "N",
}

GM_PROXY_LABEL = "approx"

_AXES = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
    dtype=float,
)
_LEVI_CIVITA_2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class DegeneracyPartition:
    """Star multiplicities as an integer partition of N, with class labels."""

    parts: tuple[int, ...]
    tolerance: float
    slocc_label: str
    petrov_label: str | None

    @property
    def n(self) -> int:
        return sum(self.parts)


@dataclass(frozen=True)
class ThreeTangle:
    oracle: float
    contraction_oracle: float
    geometric_product: float
    fitted_constant: float | None


@dataclass(frozen=True)
class GeometricEntanglement:
    """Closest product state found by multi-start local search."""

    value: float
    max_overlap: float
    closest_direction: tuple[float, float, float]
    converged: bool
    star_surrogate: float


@dataclass(frozen=True)
class WitnessRecord:
    """Necessary geometric conditions for genuine multipartite entanglement."""

    distance_product: float
    product_positive: bool
    anticoherence_order: int
    effective_rank: float
    degenerate: bool


@dataclass(frozen=True)
class FisherInformation:
    value: float
    axis: tuple[float, float, float]
    dipole: tuple[float, float, float] | None
    quadrupole: float | None


@dataclass(frozen=True)
class MeasureReport:
    """All applicable measures; fields are None where N rules them out."""

    two_s: int
    concurrence_geometric: float | None
    concurrence_oracle: float | None
    one_vs_rest_geometric: float | None
    one_vs_rest_oracle: float | None
    three_tangle_oracle: float | None
    three_tangle_geometric_product: float | None
    three_tangle_fitted_constant: float | None
    e_geometric: float
    e_geometric_star_surrogate: float
    e_geometric_converged: bool
    gm_concurrence_proxy: float | None
    gm_concurrence_label: str
    distance_product: float
    qfi_max: float
    qfi_axis: tuple[float, float, float]
    squeezing_xi2: float | None


# ----------------------------------------------------------------------
# Classification
# ----------------------------------------------------------------------


def classify(constellation: Constellation, tolerance: float | None = None) -> DegeneracyPartition:
    """Degeneracy partition of the stars and its SLOCC and Petrov labels.

    Args:
        constellation: Stars to classify.
        tolerance: Reclustering radius; defaults to the constellation's own.
    """
    radius = constellation.tolerance if tolerance is None else tolerance
    if tolerance is None or tolerance == constellation.tolerance:
        multiplicities = constellation.multiplicities
    else:
        stars = cluster_roots(constellation.expanded_roots(), radius, constellation.convention)
        multiplicities = tuple(star.multiplicity for star in stars)
    parts = tuple(sorted(multiplicities, reverse=True))
    n = sum(parts)
    if len(parts) == 1:
        label = "separable"
    else:
        label = SLOCC_LABELS.get(parts, "partition-(" + ",".join(str(p) for p in parts) + ")")
    return DegeneracyPartition(
        parts=parts,
        tolerance=float(radius),
        slocc_label=label,
        petrov_label=PETROV_LABELS.get(parts) if n == 4 else None,
    )


def count_partitions(n: int) -> int:
    """Number of integer partitions p(n) by the pentagonal-number recurrence."""
    if n < 0:
        msg = f"count_partitions needs n >= 0, got {n}"
        raise InvalidArgumentError(msg)
    table = [1] + [0] * n
    for i in range(1, n + 1):
        total = 0
        k = 1
        while True:
            first = i - k * (3 * k - 1) // 2
            if first < 0:
                break
            sign = 1 if k % 2 else -1
            total += sign * table[first]
            second = i - k * (3 * k + 1) // 2
            if second >= 0:
                total += sign * table[second]
            k += 1
        table[i] = total
    return table[n]


# ----------------------------------------------------------------------
# Qubit picture
# ----------------------------------------------------------------------


def expanded_tensor(state: SpinState) -> np.ndarray:
    """Amplitudes over 2^N bitstrings, shape (2,) * N."""
    n = state.two_s
    weights = state.vector / np.sqrt([float(math.comb(n, k)) for k in range(n + 1)])
    ones = np.indices((2,) * n).sum(axis=0) if n else np.array(0)
    return weights[ones]


def single_qubit_reduction(state: SpinState) -> np.ndarray:
    """Reduced density matrix of one qubit (all are equal by symmetry)."""
    if state.two_s < 1:
        msg = "Single-qubit reduction needs two_s >= 1"
        raise InvalidArgumentError(msg)
    flat = expanded_tensor(state).reshape(2, -1)
    return flat @ flat.conj().T


def _require_n(state: SpinState, n: int, what: str) -> None:
    if state.two_s != n:
        msg = f"{what} needs two_s={n}, got {state.two_s}"
        raise DimensionMismatchError(msg)


def concurrence(state: SpinState, tolerance: float = DEFAULT_TOLERANCE) -> tuple[float, float]:
    """Return (sin(theta/2) from the star angle, pure-state Wootters value)."""
    _require_n(state, 2, "Concurrence")
    a = expanded_tensor(state)
    oracle = 2.0 * abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    metrics = pair_metrics(constellation_of(state, tolerance))
    return float(metrics.normalized_chordal[0, 1]), float(oracle)


def concurrence_one_vs_rest(constellation: Constellation) -> float:
    """sqrt((N-1)/N (1 - C)) with C the mean pair dot."""
    n = constellation.two_s
    if n < 2:
        msg = f"One-versus-rest concurrence needs N >= 2, got {n}"
        raise InvalidArgumentError(msg)
    mean = pair_metrics(constellation).mean_pair_dot
    return math.sqrt(max(0.0, (n - 1) / n * (1.0 - mean)))


def purity_concurrence(state: SpinState) -> float:
    """sqrt(2 (1 - Tr rho_1^2)) from the exact one-qubit reduction."""
    rho = single_qubit_reduction(state)
    purity = float(np.real(np.trace(rho @ rho)))
    return math.sqrt(max(0.0, 2.0 * (1.0 - purity)))


def _hyperdeterminant(a: np.ndarray) -> complex:
    d1 = (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
    )
    d2 = (
        a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
        + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1]
    )
    d3 = a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1] + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    return d1 - 2.0 * d2 + 4.0 * d3


def _tangle_contraction(a: np.ndarray) -> complex:
    e = _LEVI_CIVITA_2
    return np.einsum("ijk,IJm,npK,NPM,iI,jJ,kK,mM,nN,pP->", a, a, a, a, e, e, e, e, e, e)


def three_tangle(state: SpinState, tolerance: float = DEFAULT_TOLERANCE) -> ThreeTangle:
    """Three-tangle by the hyperdeterminant and by an epsilon contraction.

    fitted_constant is the ratio to the product of squared normalized star
    distances and is only reported, not assumed constant.
    """
    _require_n(state, 3, "Three-tangle")
    a = expanded_tensor(state)
    oracle = 4.0 * abs(_hyperdeterminant(a))
    contraction = 2.0 * abs(_tangle_contraction(a))
    product = pair_metrics(constellation_of(state, tolerance)).distance_product
    return ThreeTangle(
        oracle=float(oracle),
        contraction_oracle=float(contraction),
        geometric_product=product,
        fitted_constant=float(oracle / product) if product > 1e-12 else None,
    )


# ----------------------------------------------------------------------
# Geometric measure
# ----------------------------------------------------------------------


def _coherent_overlap(state: SpinState, direction: np.ndarray) -> float:
    amplitudes = coherent_amplitudes(state.two_s, direction)[0]
    return float(abs(np.vdot(amplitudes, state.vector)) ** 2)


def _tangent_frame(seed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([1.0, 0.0, 0.0]) if abs(seed[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    first = np.cross(seed, helper)
    first /= np.linalg.norm(first)
    return first, np.cross(seed, first)


def _local_ascent(state: SpinState, seed: np.ndarray) -> tuple[float, np.ndarray, bool]:
    first, second = _tangent_frame(seed)

    def direction(x: np.ndarray) -> np.ndarray:
        point = seed + x[0] * first + x[1] * second
        return point / np.linalg.norm(point)

    result = minimize(
        lambda x: -_coherent_overlap(state, direction(x)),
        np.zeros(2),
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    return -float(result.fun), direction(result.x), bool(result.success)


def star_surrogate(constellation: Constellation) -> float:
    """-log2 of the best star-anchored product of pair overlaps."""
    dot = pair_metrics(constellation).dot
    overlaps = (1.0 + dot) / 2.0
    np.fill_diagonal(overlaps, 1.0)
    return -math.log2(float(np.max(np.prod(overlaps, axis=1))))


def geometric_entanglement(constellation: Constellation) -> GeometricEntanglement:
    """E_g = -log2 max_n |<n^N|psi>|^2.

    Seeds are the physical star directions, the six coordinate axes and the
    maximum of Q on a spiral grid; ties keep the lowest seed index.
    """
    state = stars_to_state(constellation)
    stars = to_physical_frame(constellation.vectors(), constellation.convention)
    grid = spiral_points(200)
    grid_values = np.abs(coherent_amplitudes(state.two_s, grid).conj() @ state.vector) ** 2
    seeds = np.vstack([stars, _AXES, grid[np.argmax(grid_values)]])
    best_value = -1.0
    best_direction = seeds[0]
    best_converged = False
    for seed in seeds:
        value, direction, converged = _local_ascent(state, seed / np.linalg.norm(seed))
        if value > best_value + 1e-14:
            best_value, best_direction, best_converged = value, direction, converged
    if not best_converged:
        logger.warning("Geometric-entanglement search did not converge (best overlap %.12f)", best_value)
    overlap = min(1.0, best_value)
    return GeometricEntanglement(
        value=max(0.0, -math.log2(overlap)),
        max_overlap=overlap,
        closest_direction=(float(best_direction[0]), float(best_direction[1]), float(best_direction[2])),
        converged=best_converged,
        star_surrogate=star_surrogate(constellation),
    )


def gm_concurrence_proxy(constellation: Constellation) -> float | None:
    """One minus the largest mean intra-window dot over cyclic star windows.

    Windows are contiguous runs of size 2..N-1 in the stored star order.
    The value is an approximation and is always labelled as such.
    """
    n = constellation.two_s
    if n < 3:
        return None
    dot = pair_metrics(constellation).dot
    best = -math.inf
    for size in range(2, n):
        for start in range(n):
            members = [(start + i) % n for i in range(size)]
            block = dot[np.ix_(members, members)]
            mean = (block.sum() - size) / (size * (size - 1))
            best = max(best, float(mean))
    return 1.0 - best


def witnesses(constellation: Constellation, table: MultipoleTable) -> WitnessRecord:
    """Pi counts as positive only when every pair is resolved beyond the clustering radius."""
    metrics = pair_metrics(constellation)
    product = metrics.distance_product
    n = metrics.chordal.shape[0]
    closest = float(metrics.chordal[np.triu_indices(n, k=1)].min()) if n > 1 else math.inf
    _, effective = stellar_rank(constellation)
    return WitnessRecord(
        distance_product=product,
        product_positive=product > 0.0 and closest > constellation.tolerance,
        anticoherence_order=table.anticoherence_order,
        effective_rank=effective,
        degenerate=any(m > 1 for m in constellation.multiplicities),
    )


# ----------------------------------------------------------------------
# Metrology
# ----------------------------------------------------------------------


@lru_cache(maxsize=32)
def _anticommutators(two_s: int) -> tuple[tuple[np.ndarray, ...], ...]:
    ops = spin_operators(two_s).vector()
    return tuple(tuple((a @ b + b @ a) / 2 for b in ops) for a in ops)


def spin_covariance(state: SpinState) -> tuple[np.ndarray, np.ndarray]:
    """Return (<S>, Cov) with Cov_ab = <{S_a, S_b}>/2 - <S_a><S_b>."""
    ops = spin_operators(state.two_s).vector()
    mean = np.array([expectation(state, op).real for op in ops])
    symmetric = _anticommutators(state.two_s)
    second = np.array([[expectation(state, symmetric[a][b]).real for b in range(3)] for a in range(3)])
    return mean, second - np.outer(mean, mean)


def _canonical_axis(axis: np.ndarray) -> np.ndarray:
    index = int(np.argmax(np.abs(axis) > 1e-12))
    return -axis if axis[index] < 0 else axis


def qfi(state: SpinState, axis: np.ndarray | tuple[float, float, float] | None = None) -> FisherInformation:
    """Quantum Fisher information 4 Var(S_n) of a pure state.

    Args:
        state: Pure state.
        axis: Rotation axis; None selects the optimal axis from the
            covariance eigenproblem.

    Raises:
        InvalidArgumentError: If the axis has zero norm.
    """
    mean, covariance = spin_covariance(state)
    if axis is None:
        values, vectors = np.linalg.eigh(covariance)
        direction = _canonical_axis(vectors[:, -1])
        value = 4.0 * float(values[-1])
    else:
        direction = np.asarray(axis, dtype=float)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            msg = "QFI axis has zero norm"
            raise InvalidArgumentError(msg)
        direction = direction / norm
        value = 4.0 * float(direction @ covariance @ direction)
    j = state.spin
    dipole = tuple(float(v) for v in mean / j) if j > 0 else None
    quadrupole = None
    if j > 0.5:
        second = float(direction @ covariance @ direction) + float(direction @ mean) ** 2
        quadrupole = (second - j / 2) / (j * (j - 0.5))
    return FisherInformation(
        value=max(0.0, value),
        axis=(float(direction[0]), float(direction[1]), float(direction[2])),
        dipole=dipole,
        quadrupole=quadrupole,
    )


def squeezing(state: SpinState) -> float | None:
    """Wineland parameter N min Var(S_perp) / |<S>|^2; None if <S> vanishes."""
    mean, covariance = spin_covariance(state)
    length = float(np.linalg.norm(mean))
    if length < MEAN_SPIN_THRESHOLD:
        return None
    first, second = _tangent_frame(mean / length)
    frame = np.column_stack([first, second])
    transverse = frame.T @ covariance @ frame
    return state.two_s * float(np.linalg.eigvalsh(transverse)[0]) / length**2


def measure_report(
    state: SpinState,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> MeasureReport:
    """Every measure that applies to the state's N, None elsewhere."""
    constellation = constellation_of(state, tolerance, convention)
    n = state.two_s
    pair = concurrence(state, tolerance) if n == 2 else (None, None)
    tangle = three_tangle(state, tolerance) if n == 3 else None
    geometric = geometric_entanglement(constellation)
    fisher = qfi(state)
    return MeasureReport(
        two_s=n,
        concurrence_geometric=pair[0],
        concurrence_oracle=pair[1],
        one_vs_rest_geometric=concurrence_one_vs_rest(constellation) if n >= 2 else None,
        one_vs_rest_oracle=purity_concurrence(state) if n >= 2 else None,
        three_tangle_oracle=tangle.oracle if tangle else None,
        three_tangle_geometric_product=tangle.geometric_product if tangle else None,
        three_tangle_fitted_constant=tangle.fitted_constant if tangle else None,
        e_geometric=geometric.value,
        e_geometric_star_surrogate=geometric.star_surrogate,
        e_geometric_converged=geometric.converged,
        gm_concurrence_proxy=gm_concurrence_proxy(constellation),
        gm_concurrence_label=GM_PROXY_LABEL,
        distance_product=pair_metrics(constellation).distance_product,
        qfi_max=fisher.value,
        qfi_axis=fisher.axis,
        squeezing_xi2=squeezing(state),
    )


def witness_report(state: SpinState, tolerance: float = DEFAULT_TOLERANCE) -> WitnessRecord:
    return witnesses(constellation_of(state, tolerance), multipoles(state))
