"""Domain models for Majorana constellations.

Immutable data structures shared across the library: spin states, their
Majorana polynomials, stars and constellations.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum, auto

import numpy as np

INFINITY = complex(math.inf, 0.0)


def is_infinite(z: complex) -> bool:
    """Return True for the point at infinity of the extended plane."""
    return cmath.isinf(z)


class PoleConvention(Enum):
    """Which pole of the sphere z = 0 is sent to.

    SOUTH: n = (2Re z, 2Im z, |z|²-1)/(|z|²+1); z = 0 is the south pole.
    NORTH: n = (2Re z, 2Im z, 1-|z|²)/(1+|z|²); z = 0 is the north pole and
    every star sits at the direction of its constituent spin-1/2 state.
    """

    SOUTH = auto()
    NORTH = auto()

    @classmethod
    def parse(cls, name: str) -> PoleConvention:
        try:
            return cls[name.upper()]
        except KeyError:
            msg = f"Unknown pole convention: {name!r} (expected 'south' or 'north')"
            raise ValueError(msg) from None

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class SpinState:
    """A pure spin-S state in the |S,m> basis.

    Amplitudes are ordered by ascending m, so index k = S + m.
    """

    two_s: int
    amplitudes: tuple[complex, ...]

    @property
    def dimension(self) -> int:
        return self.two_s + 1

    @property
    def spin(self) -> float:
        return self.two_s / 2

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.amplitudes, dtype=complex)


@dataclass(frozen=True)
class MajoranaPolynomial:
    """Coefficients a_k of z^k, k = 0..2S (ascending powers)."""

    coefficients: tuple[complex, ...]
    degree_deficit: int

    @property
    def two_s(self) -> int:
        return len(self.coefficients) - 1

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)


@dataclass(frozen=True)
class Star:
    """One clustered root on the sphere."""

    z: complex
    n: tuple[float, float, float]
    multiplicity: int

    @property
    def is_infinite(self) -> bool:
        return is_infinite(self.z)

    @property
    def theta(self) -> float:
        return math.acos(max(-1.0, min(1.0, self.n[2])))

    @property
    def phi(self) -> float:
        return math.atan2(self.n[1], self.n[0])


@dataclass(frozen=True)
class Constellation:
    """The 2S stars of a state, with multiplicities."""

    two_s: int
    stars: tuple[Star, ...]
    tolerance: float
    convention: PoleConvention = PoleConvention.SOUTH
    unconverged: int = 0

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(star.multiplicity for star in self.stars)

    def vectors(self) -> np.ndarray:
        """Distinct star directions, shape (rank, 3)."""
        return np.array([star.n for star in self.stars], dtype=float).reshape(-1, 3)

    def expanded_vectors(self) -> np.ndarray:
        """Directions repeated by multiplicity, shape (2S, 3)."""
        rows = [star.n for star in self.stars for _ in range(star.multiplicity)]
        return np.array(rows, dtype=float).reshape(-1, 3)

    def expanded_roots(self) -> tuple[complex, ...]:
        return tuple(star.z for star in self.stars for _ in range(star.multiplicity))


@dataclass(frozen=True)
class Result[T, E]:
    """Simple Result container for outcomes that may fail without raising."""

    value: T | None
    error: E | None

    def is_ok(self) -> bool:
        return self.error is None
