"""Spin states in the |S,m> basis and their Majorana polynomials.

The amplitude vector is the single source of algebraic truth. Index k runs
over k = S + m in ascending m, so the polynomial coefficient a_k multiplies
z^k and the two are related by a_k = (-1)^k sqrt(C(2S, k)) c_k.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum, auto
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .constants import NORMALIZATION_TOLERANCE
from .errors import DimensionMismatchError, EmptyStateError, InvalidArgumentError
from .models import MajoranaPolynomial, SpinState

logger = logging.getLogger(__name__)


class Ladder(Enum):
    """Spin operators acting on polynomials as differential operators."""

    J_PLUS = auto()
    J_MINUS = auto()
    J_Z = auto()


@dataclass(frozen=True)
class SpinOperators:
    """Spin matrices for one dimension (hbar = 1)."""

    two_s: int
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray

    @property
    def dimension(self) -> int:
        return self.two_s + 1

    def along(self, axis: Sequence[float]) -> np.ndarray:
        """Return n . S for a (not necessarily unit) axis."""
        nx, ny, nz = (float(a) for a in axis)
        return nx * self.sx + ny * self.sy + nz * self.sz

    def vector(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.sx, self.sy, self.sz


def _validate_two_s(two_s: int) -> None:
    if not isinstance(two_s, int | np.integer) or two_s < 0:
        msg = f"two_s must be a nonnegative integer, got {two_s!r}"
        raise InvalidArgumentError(msg)


def _binomial_roots(two_s: int) -> np.ndarray:
    return np.sqrt([float(math.comb(two_s, k)) for k in range(two_s + 1)])


def _signs(two_s: int) -> np.ndarray:
    return np.array([(-1.0) ** k for k in range(two_s + 1)])


def make_state(two_s: int, amplitudes: Sequence[complex] | np.ndarray) -> SpinState:
    """Build a normalized spin state.

    Args:
        two_s: Twice the spin, N = 2S.
        amplitudes: Complex amplitudes in ascending m.

    Returns:
        The normalized state; relative phases are preserved.

    Raises:
        InvalidArgumentError: If two_s is negative or amplitudes are not finite.
        DimensionMismatchError: If the length is not two_s + 1.
        EmptyStateError: If every amplitude is zero.
    """
    _validate_two_s(two_s)
    vector = np.asarray(amplitudes, dtype=complex).ravel()
    if vector.size != two_s + 1:
        msg = f"Expected {two_s + 1} amplitudes for two_s={two_s}, got {vector.size}"
        raise DimensionMismatchError(msg)
    if not np.all(np.isfinite(vector)):
        msg = "Amplitudes must be finite"
        raise InvalidArgumentError(msg)
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        msg = "State vector is zero"
        raise EmptyStateError(msg)
    vector = vector / norm
    return SpinState(two_s=int(two_s), amplitudes=tuple(complex(c) for c in vector))


def with_phase_convention(state: SpinState) -> SpinState:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    vector = state.vector
    scale = float(np.max(np.abs(vector)))
    index = int(np.argmax(np.abs(vector) > NORMALIZATION_TOLERANCE * scale))
    lead = vector[index]
    vector = vector * (abs(lead) / lead)
    vector[index] = abs(lead)
    return SpinState(two_s=state.two_s, amplitudes=tuple(complex(c) for c in vector))


def coefficients_from_amplitudes(two_s: int, amplitudes: np.ndarray) -> np.ndarray:
    """Linear map c -> a of the polynomial coefficient rule."""
    return _signs(two_s) * _binomial_roots(two_s) * np.asarray(amplitudes, dtype=complex)


def amplitudes_from_coefficients(two_s: int, coefficients: np.ndarray) -> np.ndarray:
    """Inverse of :func:`coefficients_from_amplitudes` (no normalization)."""
    return np.asarray(coefficients, dtype=complex) * _signs(two_s) / _binomial_roots(two_s)


def _degree_deficit(coefficients: np.ndarray, threshold: float = 0.0) -> int:
    magnitudes = np.abs(coefficients)
    cutoff = threshold * float(np.max(magnitudes)) if magnitudes.size else 0.0
    deficit = 0
    for magnitude in magnitudes[::-1]:
        if magnitude > cutoff:
            break
        deficit += 1
    return deficit


def make_polynomial(coefficients: Sequence[complex] | np.ndarray) -> MajoranaPolynomial:
    """Wrap raw ascending coefficients, counting vanishing leading terms."""
    vector = np.asarray(coefficients, dtype=complex).ravel()
    if vector.size == 0:
        msg = "Polynomial needs at least one coefficient"
        raise EmptyStateError(msg)
    return MajoranaPolynomial(
        coefficients=tuple(complex(a) for a in vector),
        degree_deficit=_degree_deficit(vector),
    )


def to_polynomial(state: SpinState) -> MajoranaPolynomial:
    """Return the Majorana polynomial of a state."""
    return make_polynomial(coefficients_from_amplitudes(state.two_s, state.vector))


def from_polynomial(poly: MajoranaPolynomial) -> SpinState:
    """Invert the coefficient rule.

    The result is normalized with its first nonzero amplitude real positive.

    Raises:
        EmptyStateError: If the polynomial is identically zero.
    """
    vector = poly.vector
    if not np.any(vector):
        msg = "Zero polynomial has no state"
        raise EmptyStateError(msg)
    state = make_state(poly.two_s, amplitudes_from_coefficients(poly.two_s, vector))
    return with_phase_convention(state)


def apply_ladder(poly: MajoranaPolynomial, which: Ladder) -> MajoranaPolynomial:
    """Apply a spin operator in its differential form.

    J+ -> 2j z - z^2 d/dz, J- -> d/dz, Jz -> z d/dz - j, with j = S. On the
    amplitude side the images of J+ and J- equal minus the matrix action of
    S+ and S- (a global phase) while Jz matches Sz exactly.

    The image may be the zero polynomial, e.g. J+ on z^{2S}.
    """
    a = poly.vector
    n = poly.two_s
    k = np.arange(n + 1)
    out = np.zeros(n + 1, dtype=complex)
    match which:
        case Ladder.J_MINUS:
            out[:-1] = k[1:] * a[1:]
        case Ladder.J_PLUS:
            out[1:] = (n - k[1:] + 1) * a[:-1]
        case Ladder.J_Z:
            out = (k - n / 2) * a
    return make_polynomial(out)


@lru_cache(maxsize=64)
def spin_operators(two_s: int) -> SpinOperators:
    """Spin matrices in the ascending-m basis from exact ladder coefficients."""
    _validate_two_s(two_s)
    s = two_s / 2
    m = np.arange(two_s + 1) - s
    raising = np.sqrt((s - m[:-1]) * (s + m[:-1] + 1))
    s_plus = np.diag(raising, k=-1).astype(complex)
    s_minus = s_plus.conj().T
    sx = (s_plus + s_minus) / 2
    sy = (s_plus - s_minus) / 2j
    sz = np.diag(m).astype(complex)
    for matrix in (sx, sy, sz, s_plus, s_minus):
        matrix.setflags(write=False)
    return SpinOperators(two_s=two_s, sx=sx, sy=sy, sz=sz, s_plus=s_plus, s_minus=s_minus)


def expectation(state: SpinState, operator: np.ndarray) -> complex:
    """Return <psi|O|psi>.

    Raises:
        DimensionMismatchError: If the operator does not act on the state.
    """
    matrix = np.asarray(operator)
    if matrix.shape != (state.dimension, state.dimension):
        msg = f"Operator shape {matrix.shape} does not match dimension {state.dimension}"
        raise DimensionMismatchError(msg)
    vector = state.vector
    return complex(np.vdot(vector, matrix @ vector))


def mean_spin(state: SpinState) -> np.ndarray:
    """Exact <S> as a real 3-vector."""
    ops = spin_operators(state.two_s)
    return np.array([expectation(state, op).real for op in ops.vector()])


def fidelity(a: SpinState, b: SpinState) -> float:
    """Return |<a|b>|^2."""
    if a.two_s != b.two_s:
        msg = f"Cannot compare two_s={a.two_s} with two_s={b.two_s}"
        raise DimensionMismatchError(msg)
    return float(abs(np.vdot(a.vector, b.vector)) ** 2)


def spinor(direction: Sequence[float] | np.ndarray) -> tuple[complex, complex]:
    """Spin-1/2 state (alpha, beta) pointing along a unit vector.

    Gauge: alpha real nonnegative, beta = 1 at the south pole.
    """
    nx, ny, nz = (float(c) for c in direction)
    alpha = math.sqrt(max(0.0, (1.0 + nz) / 2.0))
    if alpha < 1e-150:
        return 0.0j, 1.0 + 0.0j
    beta = complex(nx, ny) / (2.0 * alpha)
    return complex(alpha), beta


def spin_coherent_state(two_s: int, direction: Sequence[float] | np.ndarray) -> SpinState:
    """Return |n> = (alpha|up> + beta|down>)^{x N} in the |S,m> basis."""
    _validate_two_s(two_s)
    alpha, beta = spinor(direction)
    powers = np.array([alpha**k * beta ** (two_s - k) for k in range(two_s + 1)])
    amplitudes = _binomial_roots(two_s) * powers
    return make_state(two_s, amplitudes)


def coherent_amplitudes(two_s: int, directions: np.ndarray) -> np.ndarray:
    """Coherent-state amplitudes for many unit vectors, shape (G, 2S + 1)."""
    _validate_two_s(two_s)
    points = np.asarray(directions, dtype=float).reshape(-1, 3)
    alpha = np.sqrt(np.clip((1.0 + points[:, 2]) / 2.0, 0.0, None))
    safe = alpha > 1e-150
    beta = np.ones(points.shape[0], dtype=complex)
    beta[safe] = (points[safe, 0] + 1j * points[safe, 1]) / (2.0 * alpha[safe])
    alpha_powers = np.ones((points.shape[0], two_s + 1), dtype=complex)
    beta_powers = np.ones((points.shape[0], two_s + 1), dtype=complex)
    for k in range(1, two_s + 1):
        alpha_powers[:, k] = alpha_powers[:, k - 1] * alpha
        beta_powers[:, k] = beta_powers[:, k - 1] * beta
    return _binomial_roots(two_s) * alpha_powers * beta_powers[:, ::-1]


def dicke_state(two_s: int, k: int) -> SpinState:
    """Return the basis state |S, k - S>, i.e. k excitations."""
    _validate_two_s(two_s)
    if not 0 <= k <= two_s:
        msg = f"Excitation number {k} outside 0..{two_s}"
        raise InvalidArgumentError(msg)
    amplitudes = np.zeros(two_s + 1, dtype=complex)
    amplitudes[k] = 1.0
    return make_state(two_s, amplitudes)


def rotation_operator(two_s: int, rotvec: Sequence[float] | np.ndarray) -> np.ndarray:
    """Return exp(-i theta n.S) for a rotation vector theta * n."""
    ops = spin_operators(two_s)
    return expm(-1j * ops.along(rotvec))


def rotate(state: SpinState, rotvec: Sequence[float] | np.ndarray) -> SpinState:
    """Actively rotate a state; <S> turns by the same rotation vector."""
    vector = rotation_operator(state.two_s, rotvec) @ state.vector
    return make_state(state.two_s, vector)
