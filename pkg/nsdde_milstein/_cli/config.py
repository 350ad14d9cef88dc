import argparse
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from dataclasses import dataclass, fields, replace

import yaml

from .._datainput.builtin_problems import list_builtin_problems
from .._schemes.one_step import SchemeKind
from .._utils.exceptions import BadFlag, ConstraintViolation

SEED_ENVIRONMENT_VARIABLE = "NSDDE_SEED"


@dataclass(frozen=True)
class ExperimentConfig:
    # pylint: disable=too-many-instance-attributes
    problem: str = "linear-sdde"
    schemes: Tuple[SchemeKind, ...] = (SchemeKind.TAMED_MILSTEIN,)
    m_exponents: Tuple[int, ...] = (3, 4, 5, 6, 7, 8)
    ref_exponent: int = 11
    paths: int = 1000
    p: float = 2.0
    alpha: float = 0.5
    seed: int = 42
    radii: Tuple[float, ...] = (2.0, 4.0, 8.0, 16.0)
    output_dir: str = "."
    radius: float = 10.0
    samples: int = 10000
    l2_refinement: int = 0
    reference_scheme: SchemeKind = SchemeKind.TAMED_MILSTEIN
    workers: int = 1
    batch_size: int = 250
    check_acceptance: bool = False


FIELD_NAMES = [field.name for field in fields(ExperimentConfig)]


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlag(message)


def parse_exponents(text: str) -> Tuple[int, ...]:
    """Exponent ranges as `3..8` (inclusive) or comma separated `3,5,7`."""
    try:
        if ".." in text:
            first, last = text.split("..")
            return tuple(range(int(first), int(last) + 1))
        return tuple(int(value) for value in text.split(","))
    except ValueError as exc:
        raise BadFlag(
            f"Could not read step exponents from '{text}', use e.g. 3..8 or 3,5,7."
        ) from exc


def parse_schemes(text: str) -> Tuple[SchemeKind, ...]:
    try:
        return tuple(SchemeKind.from_name(name.strip()) for name in text.split(","))
    except ValueError as exc:
        raise BadFlag(str(exc)) from exc


def parse_radii(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(value) for value in text.split(","))
    except ValueError as exc:
        raise BadFlag(f"Could not read radii from '{text}'.") from exc


def option_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    """Experiment flags. Defaults are suppressed so that only given flags override
    the configuration file.
    """
    parser = _ArgumentParser(
        prog=prog, add_help=False, argument_default=argparse.SUPPRESS
    )
    parser.add_argument("--config", type=Path, help="YAML file with configuration")
    parser.add_argument("--problem", choices=list_builtin_problems())
    parser.add_argument("--scheme", dest="schemes", type=parse_schemes)
    parser.add_argument("--schemes", dest="schemes", type=parse_schemes)
    parser.add_argument("--m-exp", dest="m_exponents", type=parse_exponents)
    parser.add_argument("--m-exps", dest="m_exponents", type=parse_exponents)
    parser.add_argument("--ref-exp", dest="ref_exponent", type=int)
    parser.add_argument("--paths", type=int)
    parser.add_argument("--p", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--radii", type=parse_radii)
    parser.add_argument("--radius", type=float)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--l2-refinement", dest="l2_refinement", type=int)
    parser.add_argument(
        "--reference-scheme",
        dest="reference_scheme",
        type=lambda name: parse_schemes(name)[0],
    )
    parser.add_argument("--workers", type=int)
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--assert", dest="check_acceptance", action="store_true")
    return parser


def _file_value(key: str, value: Any) -> Any:
    """Convert a YAML value to the type of the configuration field."""
    if key == "schemes":
        return parse_schemes(value if isinstance(value, str) else ",".join(value))
    if key == "reference_scheme":
        return parse_schemes(value)[0]
    if key == "m_exponents":
        if isinstance(value, str):
            return parse_exponents(value)
        return tuple(int(exponent) for exponent in value)
    if key == "radii":
        if isinstance(value, str):
            return parse_radii(value)
        return tuple(float(radius) for radius in value)
    if key in ("p", "alpha", "radius"):
        return float(value)
    if key in (
        "ref_exponent",
        "paths",
        "seed",
        "samples",
        "l2_refinement",
        "workers",
        "batch_size",
    ):
        return int(value)
    if key == "check_acceptance":
        return bool(value)
    return str(value)


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML configuration. A run manifest is accepted too, its `config`
    section is used.
    """
    try:
        with open(path, "r") as stream:
            data = yaml.safe_load(stream)
    except yaml.YAMLError as exc:
        extra_info = f"There is something wrong in the configuration file {path}."
        if hasattr(exc, "problem_mark"):
            extra_info += (
                " The typo is probably somewhere around line "
                f"{exc.problem_mark.line + 1}."
            )
        raise BadFlag(f"{exc}. {extra_info}") from exc
    except OSError as exc:
        raise BadFlag(f"Could not read the configuration file {path}: {exc}") from exc

    if data is None:
        return {}
    if isinstance(data, dict) and isinstance(data.get("config"), dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise BadFlag(
            f"The outermost level of {path} must be a mapping, got "
            f"{type(data).__name__}."
        )
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise BadFlag(
            f"Unknown keys {unknown} in {path}. Valid keys are: "
            f"{', '.join(FIELD_NAMES)}."
        )
    try:
        return {key: _file_value(key, value) for key, value in data.items()}
    except (TypeError, ValueError) as exc:
        raise BadFlag(f"Invalid value in the configuration file {path}: {exc}") from exc


def check_constraints(config: ExperimentConfig) -> ExperimentConfig:
    if not config.m_exponents:
        raise ConstraintViolation("At least one step exponent is required.")
    if config.ref_exponent <= max(config.m_exponents):
        raise ConstraintViolation(
            f"The reference exponent ({config.ref_exponent}) must exceed every step "
            f"exponent (largest is {max(config.m_exponents)})."
        )
    if min(config.m_exponents) < 1:
        raise ConstraintViolation("Step exponents must be at least 1 so that dt < tau.")
    if config.paths < 1:
        raise ConstraintViolation(f"Need at least one path, got {config.paths}.")
    if not 0 < config.alpha <= 0.5:
        raise ConstraintViolation(
            f"The taming exponent alpha must lie in (0, 1/2], got {config.alpha}."
        )
    if config.p <= 0:
        raise ConstraintViolation(
            f"The error exponent p must be positive, got {config.p}."
        )
    if not config.schemes:
        raise ConstraintViolation("At least one scheme is required.")
    if not config.radii or min(config.radii) <= 0:
        raise ConstraintViolation(f"Radii must be positive, got {config.radii}.")
    if config.radius <= 0 or config.samples < 2:
        raise ConstraintViolation("The check radius must be positive and samples >= 2.")
    if config.l2_refinement < 0 or config.workers < 1 or config.batch_size < 1:
        raise ConstraintViolation(
            "l2 refinement must be nonnegative, workers and batch size positive."
        )
    return replace(
        config,
        m_exponents=tuple(sorted(set(config.m_exponents))),
        radii=tuple(sorted(config.radii)),
    )


def parse_config(
    argv: Sequence[str], environ: Optional[Mapping[str, str]] = None
) -> ExperimentConfig:
    """Configuration from defaults, the NSDDE_SEED environment variable, an optional
    YAML file given with `--config` and the flags, later sources overriding earlier.
    """
    environ = os.environ if environ is None else environ
    flags = vars(option_parser().parse_args(list(argv)))

    values: Dict[str, Any] = {}
    if SEED_ENVIRONMENT_VARIABLE in environ:
        try:
            values["seed"] = int(environ[SEED_ENVIRONMENT_VARIABLE])
        except ValueError as exc:
            raise BadFlag(
                f"{SEED_ENVIRONMENT_VARIABLE} must be an integer, got "
                f"'{environ[SEED_ENVIRONMENT_VARIABLE]}'."
            ) from exc
    config_file = flags.pop("config", None)
    if config_file is not None:
        values.update(load_config_file(config_file))
    values.update(flags)
    return check_constraints(ExperimentConfig(**values))


def config_to_dict(config: ExperimentConfig) -> Dict[str, Any]:
    """Plain YAML-friendly mapping of every configuration field."""
    return {
        "problem": config.problem,
        "schemes": [kind.value for kind in config.schemes],
        "m_exponents": list(config.m_exponents),
        "ref_exponent": config.ref_exponent,
        "paths": config.paths,
        "p": config.p,
        "alpha": config.alpha,
        "seed": config.seed,
        "radii": list(config.radii),
        "output_dir": config.output_dir,
        "radius": config.radius,
        "samples": config.samples,
        "l2_refinement": config.l2_refinement,
        "reference_scheme": config.reference_scheme.value,
        "workers": config.workers,
        "batch_size": config.batch_size,
        "check_acceptance": config.check_acceptance,
    }


def emit_config(config: ExperimentConfig) -> List[str]:
    """Flags reproducing `config` through `parse_config`."""
    argv = [
        "--problem", config.problem,
        "--schemes", ",".join(kind.value for kind in config.schemes),
        "--m-exps", ",".join(str(exponent) for exponent in config.m_exponents),
        "--ref-exp", str(config.ref_exponent),
        "--paths", str(config.paths),
        "--p", repr(config.p),
        "--alpha", repr(config.alpha),
        "--seed", str(config.seed),
        "--radii", ",".join(repr(radius) for radius in config.radii),
        "--output-dir", config.output_dir,
        "--radius", repr(config.radius),
        "--samples", str(config.samples),
        "--l2-refinement", str(config.l2_refinement),
        "--reference-scheme", config.reference_scheme.value,
        "--workers", str(config.workers),
        "--batch-size", str(config.batch_size),
    ]  # fmt: skip
    if config.check_acceptance:
        argv.append("--assert")
    return argv


def print_config_error(exc: Exception):
    print(f"nsdde: {exc}", file=sys.stderr)
