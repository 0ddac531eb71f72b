"""Tests for domain models - frozen dataclasses and conventions."""

from __future__ import annotations

import dataclasses
import math

import pytest

from src.models import (
    INFINITY,
    Constellation,
    MajoranaPolynomial,
    PoleConvention,
    Result,
    SpinState,
    Star,
    is_infinite,
)


class TestPoleConvention:
    def test_parse_is_case_insensitive(self) -> None:
        assert PoleConvention.parse("North") is PoleConvention.NORTH
        assert PoleConvention.parse("south") is PoleConvention.SOUTH

    def test_parse_unknown_raises(self) -> None:
        with pytest.raises(ValueError, match="Unknown pole convention"):
            PoleConvention.parse("east")

    def test_label(self) -> None:
        assert PoleConvention.NORTH.label == "north"


class TestSpinState:
    def test_derived_properties(self) -> None:
        state = SpinState(two_s=3, amplitudes=(1 + 0j, 0j, 0j, 0j))
        assert state.dimension == 4
        assert state.spin == 1.5
        assert state.vector.shape == (4,)

    def test_state_is_frozen(self) -> None:
        state = SpinState(two_s=1, amplitudes=(1 + 0j, 0j))
        with pytest.raises(dataclasses.FrozenInstanceError):
            state.two_s = 2  # type: ignore[misc]


class TestMajoranaPolynomial:
    def test_two_s_from_length(self) -> None:
        poly = MajoranaPolynomial(coefficients=(1 + 0j, 0j, 0j), degree_deficit=2)
        assert poly.two_s == 2


class TestStar:
    def test_angles(self) -> None:
        star = Star(z=1 + 0j, n=(0.0, 1.0, 0.0), multiplicity=1)
        assert star.theta == pytest.approx(math.pi / 2)
        assert star.phi == pytest.approx(math.pi / 2)

    def test_infinite_star(self) -> None:
        star = Star(z=INFINITY, n=(0.0, 0.0, 1.0), multiplicity=2)
        assert star.is_infinite
        assert is_infinite(INFINITY)
        assert not is_infinite(3 + 4j)


class TestConstellation:
    @pytest.fixture
    def constellation(self) -> Constellation:
        return Constellation(
            two_s=3,
            stars=(
                Star(z=INFINITY, n=(0.0, 0.0, 1.0), multiplicity=2),
                Star(z=0j, n=(0.0, 0.0, -1.0), multiplicity=1),
            ),
            tolerance=1e-7,
        )

    def test_default_convention_is_south(self, constellation: Constellation) -> None:
        assert constellation.convention is PoleConvention.SOUTH

    def test_multiplicities(self, constellation: Constellation) -> None:
        assert constellation.multiplicities == (2, 1)

    def test_expanded_vectors_repeat_by_multiplicity(self, constellation: Constellation) -> None:
        assert constellation.vectors().shape == (2, 3)
        assert constellation.expanded_vectors().shape == (3, 3)
        assert constellation.expanded_roots()[:2] == (INFINITY, INFINITY)


class TestResult:
    def test_ok(self) -> None:
        result: Result[int, str] = Result(value=1, error=None)
        assert result.is_ok()

    def test_error(self) -> None:
        result: Result[int, str] = Result(value=None, error="boom")
        assert not result.is_ok()
