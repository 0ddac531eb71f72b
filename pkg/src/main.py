"""Majorana constellations - command-line entry point.

Every subcommand reads its inputs, runs one analysis and writes a result
envelope holding the resolved config, a digest of the inputs and the
result itself. Errors go to standard error as one JSON record.
"""

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field, is_dataclass
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import ValidationError

from .config import (
    STDIN_MARKER,
    RunConfig,
    load_config,
    load_drive,
    load_state,
    resolve_config,
)
from .dynamics import (
    cone_loop,
    decompose,
    evolve_riccati,
    evolve_schrodinger,
    trajectory_records,
)
from .entanglement import classify, count_partitions, measure_report, witness_report
from .errors import StellarError
from .geometry import (
    ensemble_stats,
    husimi_q,
    latlon_grid,
    multipoles,
    pair_metrics,
    random_states,
    star_multipole_norms,
    stellar_rank,
    wigner_sphere,
)
from .models import Constellation, Result, SpinState, is_infinite
from .permanent import antipodal_basis, symmetric_overlap
from .stellar import constellation_of

logger = logging.getLogger(__name__)

COMMANDS = (
    "stars",
    "state",
    "classify",
    "measures",
    "witness",
    "multipoles",
    "qfunc",
    "wigner",
    "overlap",
    "basis",
    "evolve",
    "berry",
    "random",
    "partitions",
)

VALIDATION_EXIT_CODE = 2


@dataclass(frozen=True)
class CommandOutput:
    """Result document plus optional CSV rows and JSON-lines records.

    When lines is set, JSON output is one record per line instead of an
    envelope; each record carries the input digest.
    """

    result: dict[str, Any]
    rows: list[dict[str, Any]] | None = None
    lines: list[dict[str, Any]] | None = None


@dataclass(frozen=True)
class ErrorRecord:
    code: str
    message: str


@dataclass
class InputLog:
    """Raw input texts in read order, digested for reproducibility."""

    texts: list[str] = field(default_factory=list)

    def digest(self) -> str:
        return hashlib.sha256("\0".join(self.texts).encode("utf-8")).hexdigest()


type Handler = Callable[[RunConfig, InputLog], CommandOutput]


def setup_logging(verbose: bool, log_file: Path | None = None) -> None:
    """Configure logging to stderr with an optional rotating file handler.

    Args:
        verbose: Enable debug logging if True.
        log_file: Optional path for a rotating log file.
    """
    level = logging.DEBUG if verbose else logging.INFO
    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]

    if log_file is not None:
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=5 * 1024 * 1024,  # 5 MB
            backupCount=3,
        )
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-c", "--config", type=Path, default=None, help="YAML file with run defaults")
    parent.add_argument("-i", "--input", default=None, help="State or constellation file ('-' for stdin)")
    parent.add_argument("--other", default=None, help="Second state file (overlap)")
    parent.add_argument("--drive", default=None, help="Drive file (evolve, berry)")
    parent.add_argument("-o", "--output", default=None, help="Output file (default: stdout)")
    parent.add_argument("--tolerance", type=float, default=None, help="Star clustering radius")
    parent.add_argument("--grid", type=int, default=None, help="Colatitude samples of field grids")
    parent.add_argument("--seed", type=int, default=None, help="Random seed")
    parent.add_argument("--steps", type=int, default=None, help="Time or loop steps")
    parent.add_argument("--format", choices=["json", "csv"], default=None)
    parent.add_argument("--convention", choices=["south", "north"], default=None)
    parent.add_argument("--propagator", choices=["midpoint", "magnus4"], default=None)
    parent.add_argument("--max-l", type=int, default=None, help="Highest multipole rank")
    parent.add_argument("--two-s", type=int, default=None, help="Twice the spin (random)")
    parent.add_argument("--samples", type=int, default=None, help="Number of random samples")
    parent.add_argument("--n", type=int, default=None, help="Integer to partition")
    parent.add_argument("--colatitude", type=float, default=None, help="Cone colatitude in radians (berry)")
    parent.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    parent.add_argument("--log-file", type=Path, default=None, help="Path to rotating log file (5 MB x 3 backups)")
    return parent


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse command line arguments.

    Returns:
        Parsed arguments.
    """
    parent = _common_options()
    parser = argparse.ArgumentParser(
        prog="majorana",
        description="Stellar representation of spin states",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[parent])
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional YAML defaults with explicit flags."""
    base = load_config(args.config) if args.config is not None else RunConfig()
    if args.config is not None:
        logger.info("Configuration loaded from %s", args.config)
    overrides = {
        "subcommand": args.subcommand,
        "input": args.input,
        "other": args.other,
        "drive": args.drive,
        "output": args.output,
        "tolerance": args.tolerance,
        "grid": args.grid,
        "seed": args.seed,
        "steps": args.steps,
        "format": args.format,
        "convention": args.convention,
        "propagator": args.propagator,
        "max_l": args.max_l,
        "two_s": args.two_s,
        "samples": args.samples,
        "n": args.n,
        "colatitude": args.colatitude,
    }
    config = resolve_config(base, overrides)
    return config.model_copy(update={"input": config.input or STDIN_MARKER})


# ----------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------


def to_jsonable(value: Any) -> Any:
    """Convert results to JSON types; complex numbers become [re, im]."""
    if is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, complex):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(config: RunConfig, digest: str, output: CommandOutput) -> str:
    """Render the envelope; JSON keys are sorted and floats use repr."""
    config_data = to_jsonable(config.model_dump())
    if config.format == "json":
        if output.lines is not None:
            records = [{**to_jsonable(line), "input_digest": digest} for line in output.lines]
            return "".join(json.dumps(record, sort_keys=True) + "\n" for record in records)
        envelope = {"config": config_data, "input_digest": digest, "result": to_jsonable(output.result)}
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    buffer = io.StringIO()
    buffer.write(f"# config: {json.dumps(config_data, sort_keys=True)}\n")
    buffer.write(f"# input_digest: {digest}\n")
    rows = output.rows
    if rows is None:
        flat = sorted(to_jsonable(output.result).items())
        rows = [{"key": k, "value": json.dumps(v, sort_keys=True)} for k, v in flat]
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows([{k: to_jsonable(v) for k, v in row.items()} for row in rows])
    return buffer.getvalue()


def amplitude_pairs(state: SpinState) -> list[list[float]]:
    return [[c.real, c.imag] for c in state.amplitudes]


def constellation_document(constellation: Constellation) -> dict[str, Any]:
    rank, effective = stellar_rank(constellation)
    return {
        "two_s": constellation.two_s,
        "convention": constellation.convention.label,
        "tolerance": constellation.tolerance,
        "unconverged": constellation.unconverged,
        "rank": rank,
        "effective_rank": effective,
        "stars": [
            {
                "z": "inf" if is_infinite(star.z) else [star.z.real, star.z.imag],
                "n": list(star.n),
                "multiplicity": star.multiplicity,
            }
            for star in constellation.stars
        ],
    }


# ----------------------------------------------------------------------
# Handlers
# ----------------------------------------------------------------------


def _read_state(source: str, log: InputLog) -> SpinState:
    state, text = load_state(source)
    log.texts.append(text)
    return state


def _constellation(config: RunConfig, log: InputLog) -> tuple[SpinState, Constellation]:
    state = _read_state(config.input or STDIN_MARKER, log)
    return state, constellation_of(state, config.tolerance, config.pole_convention)


def handle_stars(config: RunConfig, log: InputLog) -> CommandOutput:
    _, constellation = _constellation(config, log)
    document = constellation_document(constellation)
    rows = [
        {"x": s["n"][0], "y": s["n"][1], "z": s["n"][2], "multiplicity": s["multiplicity"]}
        for s in document["stars"]
    ]
    return CommandOutput(result=document, rows=rows)


def handle_state(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    rows = [{"k": k, "re": c.real, "im": c.imag} for k, c in enumerate(state.amplitudes)]
    return CommandOutput(result={"two_s": state.two_s, "amplitudes": amplitude_pairs(state)}, rows=rows)


def handle_classify(config: RunConfig, log: InputLog) -> CommandOutput:
    _, constellation = _constellation(config, log)
    partition = classify(constellation)
    return CommandOutput(
        result={
            "partition": list(partition.parts),
            "slocc_label": partition.slocc_label,
            "petrov_label": partition.petrov_label,
            "tolerance": partition.tolerance,
        }
    )


def handle_measures(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    return CommandOutput(result=asdict(measure_report(state, config.tolerance, config.pole_convention)))


def handle_witness(config: RunConfig, log: InputLog) -> CommandOutput:
    state, constellation = _constellation(config, log)
    record = asdict(witness_report(state, config.tolerance))
    record["mean_pair_dot"] = pair_metrics(constellation).mean_pair_dot
    return CommandOutput(result=record)


def handle_multipoles(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    table = multipoles(state, config.max_l)
    moments = [{"l": l, "m": m, "re": v.real, "im": v.imag} for (l, m), v in sorted(table.moments.items())]
    average = [
        {"l": l, "m": m, "re": v.real, "im": v.imag} for (l, m), v in sorted(table.discrete_star_average.items())
    ]
    norms = star_multipole_norms(table)
    return CommandOutput(
        result={
            "max_l": table.max_l,
            "anticoherence_order": table.anticoherence_order,
            "moments": moments,
            "star_average": average,
            "norms": [{"l": l, "exact": e, "star_average": d} for l, (e, d) in sorted(norms.items())],
        },
        rows=moments,
    )


def _field_output(directions: np.ndarray, values: np.ndarray, peak: float) -> CommandOutput:
    theta = np.arccos(np.clip(directions[:, 2], -1.0, 1.0))
    phi = np.arctan2(directions[:, 1], directions[:, 0]) % (2 * math.pi)
    normalized = values / peak if peak > 0 else values
    rows = [
        {"theta": float(t), "phi": float(p), "value": float(v), "normalized": float(w)}
        for t, p, v, w in zip(theta, phi, values, normalized, strict=True)
    ]
    return CommandOutput(result={"peak": peak, "points": rows}, rows=rows)


def handle_qfunc(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    directions, _, _ = latlon_grid(config.grid, 2 * config.grid)
    result = husimi_q(state, directions)
    return _field_output(result.directions, result.values, result.peak)


def handle_wigner(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    directions, _, _ = latlon_grid(config.grid, 2 * config.grid)
    result = wigner_sphere(state, directions, config.max_l)
    return _field_output(result.directions, result.values, result.peak)


def handle_overlap(config: RunConfig, log: InputLog) -> CommandOutput:
    first, constellation_a = _constellation(config, log)
    second = _read_state(config.other or STDIN_MARKER, log)
    constellation_b = constellation_of(second, config.tolerance, config.pole_convention)
    stellar = symmetric_overlap(constellation_a, constellation_b)
    direct = complex(np.vdot(first.vector, second.vector))
    return CommandOutput(
        result={
            "stellar_overlap": stellar,
            "amplitude_overlap": direct,
            "magnitude": abs(stellar),
        }
    )


def handle_basis(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    basis = antipodal_basis(state, config.tolerance)
    overlaps = [abs(complex(np.vdot(b.vector, state.vector))) for b in basis]
    return CommandOutput(
        result={
            "basis": [amplitude_pairs(b) for b in basis],
            "max_overlap": max(overlaps, default=0.0),
        }
    )


def handle_evolve(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    drive, text = load_drive(config.drive or STDIN_MARKER)
    log.texts.append(text)
    trajectory = evolve_schrodinger(
        state,
        drive,
        config.steps,
        config.step_propagator,
        config.tolerance,
        config.pole_convention,
    )
    records = trajectory_records(trajectory)
    result: dict[str, Any] = {
        "drive": drive.kind,
        "period": drive.period,
        "closed": drive.closed,
        "ambiguous_steps": list(trajectory.ambiguous_steps),
        "riccati_max_deviation": None,
    }
    if drive.linear:
        paths = evolve_riccati(constellation_of(state, config.tolerance, config.pole_convention), drive, config.steps)
        deviation = 0.0
        for schrodinger_stars, riccati_stars in zip(trajectory.star_paths, paths.paths, strict=True):
            cost = np.linalg.norm(schrodinger_stars[:, None, :] - riccati_stars[None, :, :], axis=-1)
            deviation = max(deviation, float(np.max(np.min(cost, axis=1))))
        result["riccati_max_deviation"] = deviation
    logger.info("Evolution summary: %s", json.dumps(to_jsonable(result), sort_keys=True))
    rows = [
        {"t": record["t"], "star": k, "x": n[0], "y": n[1], "z": n[2]}
        for record in records
        for k, n in enumerate(record["stars"])
    ]
    return CommandOutput(result=result, rows=rows, lines=records)


def handle_berry(config: RunConfig, log: InputLog) -> CommandOutput:
    state = _read_state(config.input or STDIN_MARKER, log)
    if config.drive is not None:
        drive, text = load_drive(config.drive)
        log.texts.append(text)
        trajectory = evolve_schrodinger(
            state,
            drive,
            config.steps,
            config.step_propagator,
            config.tolerance,
            config.pole_convention,
        )
    else:
        trajectory = cone_loop(state, config.colatitude, config.steps, config.tolerance, config.pole_convention)
    decomposition = decompose(trajectory)
    return CommandOutput(
        result={
            "berry": asdict(decomposition.berry),
            "solid_angles": list(decomposition.solid_angles),
            "star_cycles": [list(cycle) for cycle in decomposition.star_cycles],
            "rigid": decomposition.rigid,
            "anomalous": decomposition.anomalous,
            "anomalous_accumulated": decomposition.anomalous_accumulated,
            "hannay": decomposition.hannay,
            "twists": [{"pair": list(pair), "angle": angle} for pair, angle in decomposition.twist_angles.items()],
        }
    )


def handle_random(config: RunConfig, log: InputLog) -> CommandOutput:
    del log
    states = random_states(config.two_s, config.samples, config.seed)
    result: dict[str, Any] = {
        "two_s": config.two_s,
        "seed": config.seed,
        "states": [amplitude_pairs(s) for s in states],
        "ensemble": None,
    }
    if config.two_s >= 2:
        stats = ensemble_stats([constellation_of(s, config.tolerance, config.pole_convention) for s in states])
        result["ensemble"] = {
            "mean_pair_dot": stats.mean_pair_dot,
            "standard_error": stats.standard_error,
            "pair_dot_lower_bound": stats.pair_dot_lower_bound,
            "band_edges": stats.band_edges,
            "band_counts": stats.band_counts,
            "uniformity_pvalue": stats.uniformity_pvalue,
            "mean_nearest_neighbor": float(np.mean(stats.nearest_neighbor_distances)),
        }
    return CommandOutput(result=result)


def handle_partitions(config: RunConfig, log: InputLog) -> CommandOutput:
    del log
    return CommandOutput(result={"n": config.n, "count": count_partitions(config.n)})


HANDLERS: dict[str, Handler] = {
    "stars": handle_stars,
    "state": handle_state,
    "classify": handle_classify,
    "measures": handle_measures,
    "witness": handle_witness,
    "multipoles": handle_multipoles,
    "qfunc": handle_qfunc,
    "wigner": handle_wigner,
    "overlap": handle_overlap,
    "basis": handle_basis,
    "evolve": handle_evolve,
    "berry": handle_berry,
    "random": handle_random,
    "partitions": handle_partitions,
}


# ----------------------------------------------------------------------
# Entry point
# ----------------------------------------------------------------------


def execute(config: RunConfig) -> Result[tuple[CommandOutput, str], ErrorRecord]:
    """Run one subcommand, mapping every expected failure to an error code."""
    log = InputLog()
    handler = HANDLERS[config.subcommand or ""]
    try:
        output = handler(config, log)
    except FileNotFoundError as e:
        return Result(value=None, error=ErrorRecord("FILE_NOT_FOUND", str(e)))
    except (json.JSONDecodeError, yaml.YAMLError, ValidationError) as e:
        return Result(value=None, error=ErrorRecord("MALFORMED_INPUT", str(e)))
    except StellarError as e:
        return Result(value=None, error=ErrorRecord(e.code, str(e)))
    return Result(value=(output, log.digest()), error=None)


def report_error(error: ErrorRecord) -> int:
    logger.error("%s: %s", error.code, error.message)
    sys.stderr.write(json.dumps({"error": error.code, "message": error.message}, sort_keys=True) + "\n")
    return VALIDATION_EXIT_CODE


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the subcommand and write its output.

    Returns:
        Exit code (0 for success, 2 for validation errors).
    """
    args = parse_args(argv)
    setup_logging(args.verbose, log_file=args.log_file)

    try:
        config = build_config(args)
    except FileNotFoundError as e:
        return report_error(ErrorRecord("FILE_NOT_FOUND", str(e)))
    except yaml.YAMLError as e:
        return report_error(ErrorRecord("MALFORMED_INPUT", str(e)))
    except ValidationError as e:
        return report_error(ErrorRecord("CONFIG_ERROR", str(e)))

    logger.debug("Resolved config: %s", config.model_dump())
    outcome = execute(config)
    if not outcome.is_ok() or outcome.value is None:
        return report_error(outcome.error or ErrorRecord("INTERNAL", "no output"))

    output, digest = outcome.value
    text = render(config, digest, output)
    if config.output is None:
        sys.stdout.write(text)
    else:
        Path(config.output).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", config.output)
    return 0


def main() -> int:
    return run()


if __name__ == "__main__":
    sys.exit(main())
