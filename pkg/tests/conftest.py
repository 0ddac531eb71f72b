"""Shared fixtures and state factories for the constellation tests."""

from __future__ import annotations

import json
import math
from collections.abc import Callable
from pathlib import Path
from textwrap import dedent
from typing import Any

import numpy as np
import pytest

from src.models import PoleConvention, SpinState
from src.spinstate import dicke_state, make_state, spin_coherent_state
from src.stellar import constellation_from_vectors, stars_to_state

type WriteJsonFixture = Callable[[str, Any], Path]
type WriteYamlFixture = Callable[[str, str], Path]

# ---------------------------------------------------------------------------
# Named states
# ---------------------------------------------------------------------------


def make_tetrahedron_state() -> SpinState:
    """|2,2> + i sqrt(2)|2,0> + |2,-2>, stars on a regular tetrahedron."""
    return make_state(4, [1, 0, 1j * math.sqrt(2), 0, 1])


def make_ghz_state(two_s: int = 3) -> SpinState:
    """Cat state (|S,-S> + |S,S>)/sqrt(2); stars form an equatorial polygon."""
    amplitudes = np.zeros(two_s + 1, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1.0
    return make_state(two_s, amplitudes)


def make_w_state() -> SpinState:
    """Three qubits with one excitation: a degenerate pair plus one star."""
    return dicke_state(3, 1)


def make_coherent_state(two_s: int, direction: tuple[float, float, float] = (0.0, 0.0, 1.0)) -> SpinState:
    vector = np.asarray(direction, dtype=float)
    return spin_coherent_state(two_s, vector / np.linalg.norm(vector))


def make_triplet_state() -> SpinState:
    """|1,0>: two antipodal stars."""
    return dicke_state(2, 1)


def make_two_star_state(angle: float) -> SpinState:
    """Spin-1 state whose physical stars are z and z rotated by angle about y."""
    vectors = [(0.0, 0.0, 1.0), (math.sin(angle), 0.0, math.cos(angle))]
    return stars_to_state(constellation_from_vectors(vectors, 0.0, PoleConvention.NORTH))


def make_random_state(two_s: int, seed: int) -> SpinState:
    rng = np.random.default_rng(seed)
    return make_state(two_s, rng.standard_normal(two_s + 1) + 1j * rng.standard_normal(two_s + 1))


def random_unit_vectors(count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((count, 3))
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def state_document(state: SpinState) -> dict[str, Any]:
    return {"two_s": state.two_s, "amplitudes": [[c.real, c.imag] for c in state.amplitudes]}


def assert_same_ray(a: SpinState, b: SpinState, atol: float = 1e-10) -> None:
    """Assert two states agree up to a global phase."""
    overlap = abs(np.vdot(a.vector, b.vector))
    assert overlap == pytest.approx(1.0, abs=atol)


# ---------------------------------------------------------------------------
# File helpers
# ---------------------------------------------------------------------------


@pytest.fixture
def write_json(tmp_path: Path) -> WriteJsonFixture:
    """Write a JSON document under tmp_path and return its path."""

    def _write(name: str, payload: Any) -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def write_yaml(tmp_path: Path) -> WriteYamlFixture:
    """Write dedented YAML under tmp_path and return its path."""

    def _write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(dedent(content), encoding="utf-8")
        return path

    return _write
