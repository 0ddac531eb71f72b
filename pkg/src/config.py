"""Configuration and input-file loaders.

Run settings come from an optional YAML file and command-line overrides and
are validated with Pydantic. State, constellation and drive documents are
JSON (or YAML) files validated by their own schemas.
"""

from __future__ import annotations

import json
import logging
import math
import sys
from pathlib import Path
from typing import Annotated, Any, Literal, Self

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from .constants import DEFAULT_TOLERANCE, STAR_AGREEMENT_TOLERANCE
from .dynamics import DriveField, Propagator, cone_drive, constant_drive, lmg_drive
from .models import INFINITY, Constellation, PoleConvention, SpinState
from .spinstate import make_state
from .stellar import make_constellation, project, stars_to_state, unproject

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path("config/config.yaml")
STDIN_MARKER = "-"

Vector3 = tuple[float, float, float]


class RunConfig(BaseModel):
    """Fully resolved settings of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str | None = None
    input: str | None = None
    other: str | None = None
    drive: str | None = None
    output: str | None = None
    tolerance: float = Field(default=DEFAULT_TOLERANCE, ge=0.0)
    grid: int = Field(default=24, ge=2)
    seed: int = Field(default=0, ge=0, lt=2**64)
    steps: int = Field(default=400, ge=2)
    format: Literal["json", "csv"] = "json"
    convention: Literal["south", "north"] = "south"
    propagator: Literal["midpoint", "magnus4"] = "midpoint"
    max_l: int | None = Field(default=None, ge=0)
    two_s: int = Field(default=2, ge=1)
    samples: int = Field(default=1, ge=1)
    n: int = Field(default=4, ge=0)
    colatitude: float = Field(default=math.pi / 3, ge=0.0, le=math.pi)

    @property
    def pole_convention(self) -> PoleConvention:
        return PoleConvention.parse(self.convention)

    @property
    def step_propagator(self) -> Propagator:
        return Propagator.parse(self.propagator)


class StateFileSchema(BaseModel):
    """Amplitudes as [re, im] pairs or plain reals, ascending m."""

    model_config = ConfigDict(extra="forbid")

    two_s: int = Field(ge=0)
    amplitudes: list[tuple[float, float] | float]

    def to_state(self) -> SpinState:
        values = [complex(a[0], a[1]) if isinstance(a, tuple) else complex(a) for a in self.amplitudes]
        return make_state(self.two_s, values)


class StarSchema(BaseModel):
    """One star given by z ([re, im] or "inf"), by n, or by both."""

    model_config = ConfigDict(extra="ignore")

    z: tuple[float, float] | Literal["inf"] | None = None
    n: Vector3 | None = None
    multiplicity: int = Field(default=1, ge=1)

    def root(self, convention: PoleConvention) -> complex:
        """Stereographic coordinate; z and n must agree when both are given.

        Raises:
            ValueError: If neither is given or they disagree.
        """
        if self.z is None:
            if self.n is None:
                msg = "A star needs z or n"
                raise ValueError(msg)
            return unproject(self.n, convention)
        z = INFINITY if self.z == "inf" else complex(self.z[0], self.z[1])
        if self.n is not None:
            gap = float(np.linalg.norm(project(z, convention) - np.asarray(self.n, dtype=float)))
            if gap > STAR_AGREEMENT_TOLERANCE:
                msg = f"Star z={self.z} and n={list(self.n)} disagree by {gap:.3e}"
                raise ValueError(msg)
        return z


class ConstellationFileSchema(BaseModel):
    """Stars as stereographic coordinates or unit vectors in the stated pole convention."""

    model_config = ConfigDict(extra="ignore")

    two_s: int = Field(ge=1)
    convention: Literal["south", "north"] = "south"
    tolerance: float = Field(default=DEFAULT_TOLERANCE, ge=0.0)
    stars: list[StarSchema] = Field(min_length=1)

    @model_validator(mode="after")
    def validate_stars(self) -> Self:
        total = sum(star.multiplicity for star in self.stars)
        if total != self.two_s:
            msg = f"Star multiplicities sum to {total}, expected two_s={self.two_s}"
            raise ValueError(msg)
        convention = PoleConvention.parse(self.convention)
        for star in self.stars:
            star.root(convention)
        return self

    def to_constellation(self) -> Constellation:
        convention = PoleConvention.parse(self.convention)
        roots = [star.root(convention) for star in self.stars for _ in range(star.multiplicity)]
        return make_constellation(roots, self.tolerance, convention)


class ConstantDriveSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["constant"]
    field: Vector3
    period: float = Field(gt=0.0)


class ConeDriveSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["cone"]
    magnitude: float
    colatitude: float = Field(ge=0.0, le=math.pi)
    period: float = Field(gt=0.0)


class LmgDriveSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["lmg"]
    field: Vector3 = (0.0, 0.0, 0.0)
    twisting: Vector3
    period: float = Field(gt=0.0)


DriveSchema = Annotated[
    ConstantDriveSchema | ConeDriveSchema | LmgDriveSchema,
    Field(discriminator="type"),
]

DRIVE_ADAPTER: TypeAdapter[ConstantDriveSchema | ConeDriveSchema | LmgDriveSchema] = TypeAdapter(DriveSchema)


def drive_from_schema(schema: ConstantDriveSchema | ConeDriveSchema | LmgDriveSchema) -> DriveField:
    match schema:
        case ConstantDriveSchema():
            return constant_drive(schema.field, schema.period)
        case ConeDriveSchema():
            return cone_drive(schema.magnitude, schema.colatitude, schema.period)
        case LmgDriveSchema():
            return lmg_drive(schema.field, schema.twisting, schema.period)


def load_config(config_path: Path = DEFAULT_CONFIG_PATH) -> RunConfig:
    """Load and validate run defaults from a YAML file.

    Args:
        config_path: Path to the YAML configuration file.

    Returns:
        Validated RunConfig; keys absent from the file keep their defaults.

    Raises:
        FileNotFoundError: If the config file doesn't exist.
        ValueError: If the configuration is invalid.
    """
    if not config_path.exists():
        msg = f"Configuration file not found: {config_path}"
        raise FileNotFoundError(msg)

    with config_path.open() as f:
        raw_config = yaml.safe_load(f) or {}

    return RunConfig.model_validate(raw_config)


def resolve_config(base: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    """Apply explicit overrides (None means not given) on top of a base config."""
    merged = base.model_dump(exclude_unset=True)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig.model_validate(merged)


def read_text(source: str) -> str:
    """Read a file, or standard input for '-'.

    Raises:
        FileNotFoundError: If the file doesn't exist.
    """
    if source == STDIN_MARKER:
        return sys.stdin.read()
    path = Path(source)
    if not path.exists():
        msg = f"Input file not found: {path}"
        raise FileNotFoundError(msg)
    return path.read_text(encoding="utf-8")


def parse_document(text: str, source: str = STDIN_MARKER) -> Any:
    """Decode JSON (YAML for .yaml/.yml files) and unwrap a result envelope."""
    if source.endswith((".yaml", ".yml")):
        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if isinstance(data, dict) and "result" in data and "input_digest" in data:
        return data["result"]
    return data


def state_from_document(data: Any) -> SpinState:
    """Accept either an amplitude document or a constellation document."""
    if isinstance(data, dict) and "stars" in data:
        return stars_to_state(ConstellationFileSchema.model_validate(data).to_constellation())
    return StateFileSchema.model_validate(data).to_state()


def constellation_from_document(data: Any) -> Constellation:
    return ConstellationFileSchema.model_validate(data).to_constellation()


def drive_from_document(data: Any) -> DriveField:
    return drive_from_schema(DRIVE_ADAPTER.validate_python(data))


def load_state(source: str) -> tuple[SpinState, str]:
    """Load a state and return it with the raw text for digesting."""
    text = read_text(source)
    return state_from_document(parse_document(text, source)), text


def load_drive(source: str) -> tuple[DriveField, str]:
    text = read_text(source)
    return drive_from_document(parse_document(text, source)), text
