"""Time evolution of spin states and of their stars.

States are propagated by matrix exponentials of the Hamiltonian
H(t) = B(t).S + sum_a chi_a S_a^2. For linear drives (chi = 0) every star
obeys its own Riccati equation, which is integrated independently as a
cross-check. Closed loops yield a Berry phase that splits into a rigid
solid-angle part carried by the individual stars and an anomalous rest.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum, auto
from itertools import combinations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from .constants import (
    CHART_SWITCH_RADIUS,
    CLOSED_LOOP_FIDELITY,
    CLOSED_PATH_TOLERANCE,
    DEFAULT_TOLERANCE,
    MATCHING_RADIUS,
    POLE_CLEARANCE,
    RICCATI_ATOL,
    RICCATI_RTOL,
    STAR_CLOSURE_RADIUS,
)
from .errors import InvalidArgumentError, OpenLoopError, UnsupportedDriveError
from .geometry import hannay_mean
from .models import INFINITY, Constellation, PoleConvention, SpinState
from .permanent import spinor_of_star, spinor_permanent
from .spinstate import make_state, rotation_operator, spin_operators
from .stellar import constellation_from_vectors, constellation_of, project, stars_to_state, to_physical_frame

logger = logging.getLogger(__name__)

type FieldFunction = Callable[[float], np.ndarray]


class Propagator(Enum):
    """Single-step propagators for time-dependent Hamiltonians."""

    MIDPOINT = auto()
    MAGNUS4 = auto()

    @classmethod
    def parse(cls, name: str) -> Propagator:
        try:
            return cls[name.upper()]
        except KeyError:
            msg = f"Unknown propagator: {name!r} (expected 'midpoint' or 'magnus4')"
            raise ValueError(msg) from None


@dataclass(frozen=True)
class DriveField:
    """Field B(t) (angular-frequency units) plus optional one-axis twisting."""

    b_field: FieldFunction
    period: float
    kind: str
    twisting: tuple[float, float, float] = (0.0, 0.0, 0.0)
    parameters: Mapping[str, float | list[float]] = field(default_factory=dict)

    @property
    def closed(self) -> bool:
        start = np.asarray(self.b_field(0.0), dtype=float)
        end = np.asarray(self.b_field(self.period), dtype=float)
        return bool(np.all(np.abs(start - end) < 1e-12))

    @property
    def linear(self) -> bool:
        return all(chi == 0.0 for chi in self.twisting)

    def hamiltonian(self, two_s: int, t: float) -> np.ndarray:
        ops = spin_operators(two_s)
        matrix = ops.along(self.b_field(t))
        for chi, op in zip(self.twisting, ops.vector(), strict=True):
            if chi:
                matrix = matrix + chi * (op @ op)
        return matrix


@dataclass(frozen=True)
class LoopTrajectory:
    """States and labelled star paths sampled at increasing times.

    star_paths has shape (len(times), 2S, 3) in the convention's frame.
    dynamical_phase is -integral <H> dt, or None for purely geometric loops.
    """

    times: np.ndarray
    states: tuple[SpinState, ...]
    star_paths: np.ndarray
    convention: PoleConvention
    dynamical_phase: float | None
    ambiguous_steps: tuple[int, ...] = ()

    @property
    def two_s(self) -> int:
        return self.states[0].two_s


@dataclass(frozen=True)
class StarPaths:
    """Star positions from the Riccati flow, shape (len(times), 2S, 3)."""

    times: np.ndarray
    paths: np.ndarray
    convention: PoleConvention
    chart_switches: int


@dataclass(frozen=True)
class BerryPhase:
    """Geometric phase of a closed loop of states.

    gamma is in (-pi, pi]; accumulated tracks the winding step by step.
    subtracted is the total phase minus the dynamical phase, a consistency
    value that agrees with gamma modulo 2 pi for Schroedinger trajectories.
    """

    gamma: float
    accumulated: float
    total_phase: float
    dynamical_phase: float | None
    subtracted: float | None
    closure_fidelity: float


@dataclass(frozen=True)
class PhaseDecomposition:
    """Berry phase split into star solid angles, twists and the anomalous rest."""

    solid_angles: tuple[float, ...]
    star_cycles: tuple[tuple[int, ...], ...]
    rigid: float
    berry: BerryPhase
    anomalous: float
    anomalous_accumulated: float
    twist_angles: dict[tuple[int, int], float]
    hannay: float
    gram_permanents: np.ndarray
    pair_overlaps: np.ndarray


# ----------------------------------------------------------------------
# Drives
# ----------------------------------------------------------------------


def _check_period(period: float) -> None:
    if not period > 0:
        msg = f"Drive period must be positive, got {period}"
        raise InvalidArgumentError(msg)


def constant_drive(field_vector: Sequence[float], period: float) -> DriveField:
    _check_period(period)
    vector = np.asarray(field_vector, dtype=float)
    return DriveField(
        b_field=lambda _t: vector,
        period=float(period),
        kind="constant",
        parameters={"field": vector.tolist()},
    )


def cone_drive(magnitude: float, colatitude: float, period: float) -> DriveField:
    """Field of fixed length precessing once about z at the given colatitude."""
    _check_period(period)
    omega = 2 * math.pi / period
    s, c = math.sin(colatitude), math.cos(colatitude)

    def field_at(t: float) -> np.ndarray:
        return magnitude * np.array([s * math.cos(omega * t), s * math.sin(omega * t), c])

    return DriveField(
        b_field=field_at,
        period=float(period),
        kind="cone",
        parameters={"magnitude": magnitude, "colatitude": colatitude},
    )


def lmg_drive(field_vector: Sequence[float], twisting: Sequence[float], period: float) -> DriveField:
    """Constant field plus quadratic terms chi_a S_a^2 (nonlinear star dynamics)."""
    _check_period(period)
    vector = np.asarray(field_vector, dtype=float)
    chi = tuple(float(x) for x in twisting)
    if len(chi) != 3:
        msg = f"Twisting needs three components, got {len(chi)}"
        raise InvalidArgumentError(msg)
    return DriveField(
        b_field=lambda _t: vector,
        period=float(period),
        kind="lmg",
        twisting=(chi[0], chi[1], chi[2]),
        parameters={"field": vector.tolist(), "twisting": list(chi)},
    )


def hamiltonian(drive: DriveField, two_s: int, t: float) -> np.ndarray:
    return drive.hamiltonian(two_s, t)


def classical_flow(n: np.ndarray, field_vector: Sequence[float]) -> np.ndarray:
    """Velocity B x n of a physical star direction under a linear drive."""
    return np.cross(np.asarray(field_vector, dtype=float), np.asarray(n, dtype=float))


# ----------------------------------------------------------------------
# Schroedinger evolution
# ----------------------------------------------------------------------

_GAUSS_OFFSET = math.sqrt(3) / 6


def step_operator(drive: DriveField, two_s: int, t: float, dt: float, propagator: Propagator) -> np.ndarray:
    """Unitary advancing the state from t to t + dt."""
    match propagator:
        case Propagator.MIDPOINT:
            return expm(-1j * dt * drive.hamiltonian(two_s, t + dt / 2))
        case Propagator.MAGNUS4:
            a1 = -1j * drive.hamiltonian(two_s, t + (0.5 - _GAUSS_OFFSET) * dt)
            a2 = -1j * drive.hamiltonian(two_s, t + (0.5 + _GAUSS_OFFSET) * dt)
            omega = dt / 2 * (a1 + a2) + math.sqrt(3) / 12 * dt**2 * (a2 @ a1 - a1 @ a2)
            return expm(omega)


def match_stars(previous: np.ndarray, current: np.ndarray) -> tuple[np.ndarray, float]:
    """Reorder current stars to follow previous labels; returns (ordered, worst step)."""
    cost = np.linalg.norm(previous[:, None, :] - current[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(cost)
    order = np.empty(len(rows), dtype=int)
    order[rows] = cols
    return current[order], float(cost[rows, cols].max()) if len(rows) else 0.0


def _star_paths(
    states: Sequence[SpinState], tolerance: float, convention: PoleConvention
) -> tuple[np.ndarray, tuple[int, ...]]:
    paths = [constellation_of(states[0], tolerance, convention).expanded_vectors()]
    ambiguous = []
    for index, state in enumerate(states[1:], start=1):
        current = constellation_of(state, tolerance, convention).expanded_vectors()
        ordered, worst = match_stars(paths[-1], current)
        if worst > MATCHING_RADIUS:
            ambiguous.append(index)
        paths.append(ordered)
    if ambiguous:
        logger.warning("Star matching exceeded radius %.2f at %d steps", MATCHING_RADIUS, len(ambiguous))
    return np.array(paths), tuple(ambiguous)


def evolve_schrodinger(
    state: SpinState,
    drive: DriveField,
    steps: int,
    propagator: Propagator = Propagator.MIDPOINT,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> LoopTrajectory:
    """Propagate over one drive period and follow the stars.

    Raises:
        InvalidArgumentError: If fewer than two steps are requested.
    """
    if steps < 2:
        msg = f"Evolution needs at least 2 steps, got {steps}"
        raise InvalidArgumentError(msg)
    times = np.linspace(0.0, drive.period, steps + 1)
    dt = drive.period / steps
    vector = state.vector
    vectors = [vector]
    energy_integral = 0.0
    for t in times[:-1]:
        step = step_operator(drive, state.two_s, float(t), dt, propagator)
        updated = step @ vector
        middle = drive.hamiltonian(state.two_s, float(t) + dt / 2)
        energy_integral += dt * 0.5 * (np.vdot(vector, middle @ vector).real + np.vdot(updated, middle @ updated).real)
        vector = updated
        vectors.append(vector)
    drift = abs(float(np.linalg.norm(vector)) - 1.0)
    if drift > 1e-10:
        logger.warning("Norm drift %.3e after %d steps", drift, steps)
    states = tuple(make_state(state.two_s, v) for v in vectors)
    paths, ambiguous = _star_paths(states, tolerance, convention)
    return LoopTrajectory(
        times=times,
        states=states,
        star_paths=paths,
        convention=convention,
        dynamical_phase=-energy_integral,
        ambiguous_steps=ambiguous,
    )


def cone_loop(
    state: SpinState,
    colatitude: float,
    steps: int,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> LoopTrajectory:
    """Rigidly carry a state's z axis once around a cone.

    psi(phi) = exp(-i phi Sz) exp(-i theta Sy) exp(i phi Sz) psi_0 closes
    exactly at phi = 2 pi, so the loop has no dynamical phase.
    """
    if steps < 2:
        msg = f"Cone loop needs at least 2 steps, got {steps}"
        raise InvalidArgumentError(msg)
    angles = np.linspace(0.0, 2 * math.pi, steps + 1)
    tilt = rotation_operator(state.two_s, (0.0, colatitude, 0.0))
    sz = np.diag(spin_operators(state.two_s).sz).real
    states = []
    for phi in angles:
        vector = np.exp(-1j * phi * sz) * (tilt @ (np.exp(1j * phi * sz) * state.vector))
        states.append(make_state(state.two_s, vector))
    paths, ambiguous = _star_paths(states, tolerance, convention)
    return LoopTrajectory(
        times=angles,
        states=tuple(states),
        star_paths=paths,
        convention=convention,
        dynamical_phase=None,
        ambiguous_steps=ambiguous,
    )


def star_loop(
    paths: np.ndarray,
    tolerance: float = DEFAULT_TOLERANCE,
    convention: PoleConvention = PoleConvention.SOUTH,
) -> LoopTrajectory:
    """Loop of states whose stars follow prescribed labelled paths.

    Stars may move independently, so the loop need not be a rigid rotation.
    paths has shape (samples, 2S, 3) in the convention's frame; times are
    the sample fractions of the loop.

    Raises:
        InvalidArgumentError: If paths has the wrong shape or fewer than three samples.
    """
    array = np.asarray(paths, dtype=float)
    if array.ndim != 3 or array.shape[2] != 3 or array.shape[0] < 3:
        msg = f"Star paths need shape (samples >= 3, 2S, 3), got {array.shape}"
        raise InvalidArgumentError(msg)
    states = tuple(stars_to_state(constellation_from_vectors(step, tolerance, convention)) for step in array)
    return LoopTrajectory(
        times=np.linspace(0.0, 1.0, array.shape[0]),
        states=states,
        star_paths=array,
        convention=convention,
        dynamical_phase=None,
    )


# ----------------------------------------------------------------------
# Riccati flow
# ----------------------------------------------------------------------


def _riccati_rhs(drive: DriveField, inverted: bool) -> Callable[[float, np.ndarray], np.ndarray]:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        bx, by, bz = drive.b_field(t)
        b_plus, b_minus = complex(bx, by), complex(bx, -by)
        x = y[0]
        if inverted:
            return np.array([-1j * (0.5 * b_minus + bz * x - 0.5 * b_plus * x * x)])
        return np.array([-1j * (0.5 * b_plus - bz * x - 0.5 * b_minus * x * x)])

    return rhs


def _leaves_chart(_t: float, y: np.ndarray) -> float:
    return abs(y[0]) - CHART_SWITCH_RADIUS


_leaves_chart.terminal = True  # type: ignore[attr-defined]
_leaves_chart.direction = 1  # type: ignore[attr-defined]


def _integrate_root(z0: complex, drive: DriveField, times: np.ndarray) -> tuple[list[complex], int]:
    """Root positions at the requested times, switching to u = 1/z when needed."""
    inverted = bool(np.isinf(z0)) or abs(z0) > CHART_SWITCH_RADIUS
    value = 0j if np.isinf(z0) else (1.0 / z0 if inverted else complex(z0))
    start = float(times[0])
    remaining = times
    roots: list[complex] = []
    switches = 0
    while True:
        solution = solve_ivp(
            _riccati_rhs(drive, inverted),
            (start, float(times[-1])),
            np.array([value], dtype=complex),
            method="RK45",
            t_eval=remaining,
            events=_leaves_chart,
            rtol=RICCATI_RTOL,
            atol=RICCATI_ATOL,
        )
        for x in solution.y[0]:
            if inverted:
                roots.append(INFINITY if x == 0 else 1.0 / x)
            else:
                roots.append(complex(x))
        remaining = remaining[len(solution.t) :]
        if solution.status != 1 or remaining.size == 0:
            break
        start = float(solution.t_events[0][0])
        value = 1.0 / complex(solution.y_events[0][0][0])
        inverted = not inverted
        switches += 1
    return roots, switches


def evolve_riccati(constellation: Constellation, drive: DriveField, steps: int) -> StarPaths:
    """Integrate each distinct star under a linear drive over one period.

    Raises:
        UnsupportedDriveError: If the drive has quadratic terms.
        InvalidArgumentError: If fewer than two steps are requested.
    """
    if not drive.linear:
        msg = f"Riccati flow needs a linear drive, got {drive.kind} with twisting {drive.twisting}"
        raise UnsupportedDriveError(msg)
    if steps < 2:
        msg = f"Evolution needs at least 2 steps, got {steps}"
        raise InvalidArgumentError(msg)
    times = np.linspace(0.0, drive.period, steps + 1)
    columns = []
    total_switches = 0
    for star in constellation.stars:
        roots, switches = _integrate_root(star.z, drive, times)
        total_switches += switches
        vectors = np.array([project(z, constellation.convention) for z in roots])
        columns.extend([vectors] * star.multiplicity)
    paths = np.stack(columns, axis=1)
    return StarPaths(times=times, paths=paths, convention=constellation.convention, chart_switches=total_switches)


# ----------------------------------------------------------------------
# Phases and solid angles
# ----------------------------------------------------------------------


def _wrap(angle: float) -> float:
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def berry_phase(traj: LoopTrajectory) -> BerryPhase:
    """Pancharatnam phase -arg of the closed product of neighbour overlaps.

    Raises:
        OpenLoopError: If the last state differs from the first beyond phase.
    """
    vectors = [s.vector for s in traj.states]
    closure = complex(np.vdot(vectors[-1], vectors[0]))
    fidelity = abs(closure) ** 2
    if fidelity < CLOSED_LOOP_FIDELITY:
        msg = f"Loop is not closed: end-to-start fidelity {fidelity:.12f}"
        raise OpenLoopError(msg)
    overlaps = [complex(np.vdot(a, b)) for a, b in zip(vectors[:-1], vectors[1:], strict=True)]
    accumulated = -sum(math.atan2(o.imag, o.real) for o in overlaps) - math.atan2(closure.imag, closure.real)
    product = complex(np.prod(overlaps)) * closure
    total = math.atan2(-closure.imag, closure.real)
    subtracted = None
    if traj.dynamical_phase is not None:
        subtracted = _wrap(total - traj.dynamical_phase)
    return BerryPhase(
        gamma=_wrap(-math.atan2(product.imag, product.real)),
        accumulated=accumulated,
        total_phase=total,
        dynamical_phase=traj.dynamical_phase,
        subtracted=subtracted,
        closure_fidelity=fidelity,
    )


def _rotation_to_z(axis: np.ndarray) -> np.ndarray:
    target = np.array([0.0, 0.0, 1.0])
    v = np.cross(axis, target)
    c = float(axis @ target)
    if np.linalg.norm(v) < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    skew = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + skew + skew @ skew / (1.0 + c)


def _clear_axis(path: np.ndarray) -> np.ndarray:
    candidates = np.array([[1, 0, 0], [0, 1, 0], [1, 1, 1], [1, -1, 1], [-1, 1, 1], [1, 1, -1]], dtype=float)
    candidates /= np.linalg.norm(candidates, axis=1, keepdims=True)
    clearance = [np.min(1.0 - np.abs(path @ axis)) for axis in candidates]
    return candidates[int(np.argmax(clearance))]


def solid_angle_increments(path: np.ndarray) -> np.ndarray:
    """Per-segment (1 - cos theta) dphi with each dphi wrapped into (-pi, pi]."""
    points = np.asarray(path, dtype=float)
    theta = np.arccos(np.clip(points[:, 2], -1.0, 1.0))
    phi = np.arctan2(points[:, 1], points[:, 0])
    dphi = np.remainder(np.diff(phi) + math.pi, 2 * math.pi) - math.pi
    height = 1.0 - np.cos(theta)
    return 0.5 * (height[:-1] + height[1:]) * dphi


def solid_angle(path: Sequence[Sequence[float]] | np.ndarray) -> float:
    """Signed area enclosed by a closed path of unit vectors.

    A path that passes within the pole clearance is evaluated in a rotated
    frame; the result is then defined modulo 4 pi.

    Raises:
        OpenLoopError: If the endpoints differ.
    """
    points = np.asarray(path, dtype=float).reshape(-1, 3)
    if points.shape[0] < 3 or np.linalg.norm(points[0] - points[-1]) > CLOSED_PATH_TOLERANCE:
        msg = "Solid angle needs a closed path"
        raise OpenLoopError(msg)
    planar = np.hypot(points[:, 0], points[:, 1])
    if np.min(planar) < POLE_CLEARANCE:
        rotation = _rotation_to_z(_clear_axis(points))
        points = points @ rotation.T
        logger.debug("Path touches a pole; using rotated frame")
    return float(np.sum(solid_angle_increments(points)))


def solid_angle_triangulated(path: Sequence[Sequence[float]] | np.ndarray) -> float:
    """Spherical-excess fan around the path's centroid (independent check)."""
    points = np.asarray(path, dtype=float).reshape(-1, 3)
    center = points[:-1].mean(axis=0)
    center /= np.linalg.norm(center)
    total = 0.0
    for a, b in zip(points[:-1], points[1:], strict=True):
        numerator = float(center @ np.cross(a, b))
        denominator = 1.0 + float(center @ a) + float(a @ b) + float(b @ center)
        total += 2.0 * math.atan2(numerator, denominator)
    return total


def _pair_twist(first: np.ndarray, second: np.ndarray) -> float:
    total = 0.0
    previous = None
    for a, b in zip(first, second, strict=True):
        relative = a - b
        center = a + b
        if np.linalg.norm(relative) < 1e-9 or np.linalg.norm(center) < 1e-9:
            previous = None
            continue
        current = (relative / np.linalg.norm(relative), center / np.linalg.norm(center))
        if previous is not None:
            r0, _ = previous
            r1, axis = current
            total += math.atan2(float(axis @ np.cross(r0, r1)), float(r0 @ r1))
        previous = current
    return total


def _closed_star_loops(physical: np.ndarray) -> tuple[list[np.ndarray], tuple[tuple[int, ...], ...]]:
    """Close labelled star paths by matching the final stars to the initial multiset.

    Stars may exchange places over a loop. Labels are then chained along the
    cycles of the closing permutation, and each cycle is one closed path.

    Raises:
        OpenLoopError: If some final star is not near any initial star.
    """
    start, end = physical[0], physical[-1]
    cost = np.linalg.norm(end[:, None, :] - start[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(cost)
    gap = float(cost[rows, cols].max())
    if gap > STAR_CLOSURE_RADIUS:
        msg = f"Star paths do not close: largest end-to-start gap {gap:.3e}"
        raise OpenLoopError(msg)
    successor = np.empty(len(rows), dtype=int)
    successor[rows] = cols
    visited: set[int] = set()
    loops = []
    cycles = []
    for first in range(len(rows)):
        if first in visited:
            continue
        cycle = [first]
        visited.add(first)
        while int(successor[cycle[-1]]) != first:
            cycle.append(int(successor[cycle[-1]]))
            visited.add(cycle[-1])
        pieces = [physical[:-1, k, :] for k in cycle]
        loops.append(np.vstack([*pieces, physical[:1, first, :]]))
        cycles.append(tuple(cycle))
    if any(len(c) > 1 for c in cycles):
        logger.debug("Stars exchange places over the loop: cycles %s", cycles)
    return loops, tuple(cycles)


def decompose(traj: LoopTrajectory) -> PhaseDecomposition:
    """Solid angles, rigid part, anomalous residual and bare pair twists.

    Stars that exchange places share the area of their joint closed path
    equally.

    Raises:
        OpenLoopError: If the state loop or the star multiset does not close.
    """
    berry = berry_phase(traj)
    physical = to_physical_frame(traj.star_paths.reshape(-1, 3), traj.convention).reshape(traj.star_paths.shape)
    n = physical.shape[1]
    loops, cycles = _closed_star_loops(physical)
    per_star = np.zeros(n)
    for loop, cycle in zip(loops, cycles, strict=True):
        per_star[list(cycle)] = solid_angle(loop) / len(cycle)
    angles = tuple(float(a) for a in per_star)
    rigid = -0.5 * sum(angles)
    twists = {(k, l): _pair_twist(physical[:, k, :], physical[:, l, :]) for k, l in combinations(range(n), 2)}
    permanents = []
    overlaps = []
    for stars in physical:
        spinors = [spinor_of_star(v / np.linalg.norm(v)) for v in stars]
        permanents.append(spinor_permanent(spinors, spinors).real)
        overlaps.append((1.0 + np.clip(stars @ stars.T, -1.0, 1.0)) / 2.0)
    return PhaseDecomposition(
        solid_angles=angles,
        star_cycles=cycles,
        rigid=rigid,
        berry=berry,
        anomalous=_wrap(berry.gamma - rigid),
        anomalous_accumulated=berry.accumulated - rigid,
        twist_angles=twists,
        hannay=hannay_mean(angles),
        gram_permanents=np.array(permanents),
        pair_overlaps=np.array(overlaps),
    )


def trajectory_records(traj: LoopTrajectory) -> list[dict[str, object]]:
    """One JSON-ready record per time step with running solid angles."""
    physical = to_physical_frame(traj.star_paths.reshape(-1, 3), traj.convention).reshape(traj.star_paths.shape)
    running = np.zeros((physical.shape[0], physical.shape[1]))
    for k in range(physical.shape[1]):
        running[1:, k] = np.cumsum(solid_angle_increments(physical[:, k, :]))
    records = []
    for index, (t, state) in enumerate(zip(traj.times, traj.states, strict=True)):
        records.append(
            {
                "t": float(t),
                "amplitudes": [[c.real, c.imag] for c in state.amplitudes],
                "stars": traj.star_paths[index].tolist(),
                "omega": running[index].tolist(),
            }
        )
    return records
