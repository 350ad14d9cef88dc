import logging
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import pandas as pd
import yaml

from .. import __version__
from .._datainput.brownian import (
    coarsen_increments,
    dyadic_grid,
    sample_fine_paths,
)
from .._datainput.builtin_problems import builtin_problem
from .._datainput.problem import NsddeProblem
from .._schemes.one_step import SchemeKind
from .._schemes.simulate import simulate_path, trajectory_frame
from .._utils.csv_output import SCHEMAS, path_schema, violations_schema, write_csv
from .._utils.exceptions import ConstraintViolation
from ..experiments import (
    acceptance_check,
    estimate_exit_probability,
    estimate_interpolation_gap,
    estimate_sup_moment,
    report_frame,
    run_assumption_checks,
    run_strong_convergence,
    violations_frame,
)
from .config import ExperimentConfig, config_to_dict

LOGGER = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_INVALID = 2
EXIT_ACCEPTANCE = 3

# (file name, table, schema) written by a command
Output = Tuple[str, pd.DataFrame, List[str]]


def _single(values: tuple, flag: str, subcommand: str, option: str):
    if len(values) != 1:
        raise ConstraintViolation(
            f"'{subcommand}' runs a single {flag}, got {len(values)}: "
            f"{list(values)}. Pass exactly one with {option}."
        )
    return values[0]


def _fine_exponent(config: ExperimentConfig) -> int:
    return config.ref_exponent + config.l2_refinement


def _simulate(problem: NsddeProblem, config: ExperimentConfig) -> List[Output]:
    kind = _single(config.schemes, "scheme", "simulate", "--scheme")
    exponent = _single(config.m_exponents, "step exponent", "simulate", "--m-exp")
    grid = dyadic_grid(problem.delay, problem.horizon, exponent)
    fine = sample_fine_paths(
        config.seed,
        range(config.paths),
        problem.horizon,
        problem.delay / 2 ** _fine_exponent(config),
    )
    traj = simulate_path(
        problem, grid, coarsen_increments(fine, grid), kind, config.alpha
    )
    if traj.exploded.any():
        LOGGER.warning(
            "%d of %d paths exploded", int(traj.exploded.sum()), traj.n_paths
        )
    schema = path_schema(problem.dim)
    if config.paths == 1:
        return [("path.csv", trajectory_frame(traj), schema)]
    return [
        (f"path_{index}.csv", trajectory_frame(traj, path=index), schema)
        for index in range(config.paths)
    ]


def _convergence(problem: NsddeProblem, config: ExperimentConfig) -> List[Output]:
    report = run_strong_convergence(
        problem,
        config.schemes,
        config.m_exponents,
        config.ref_exponent,
        config.paths,
        p=config.p,
        alpha=config.alpha,
        seed=config.seed,
        reference_scheme=config.reference_scheme,
        l2_refinement=config.l2_refinement,
        workers=config.workers,
        batch_size=config.batch_size,
    )
    for scheme, slope in report.slopes.items():
        LOGGER.info("Fitted strong order of %s: %s", scheme, slope)
    return [("conv.csv", report.table, SCHEMAS["convergence"])]


def _moments(problem: NsddeProblem, config: ExperimentConfig) -> List[Output]:
    tables = [
        estimate_sup_moment(
            problem,
            kind,
            exponent,
            config.paths,
            p=config.p,
            alpha=config.alpha,
            seed=config.seed,
            ref_exponent=_fine_exponent(config),
            workers=config.workers,
            batch_size=config.batch_size,
        ).table
        for kind in config.schemes
        for exponent in config.m_exponents
    ]
    return [("moments.csv", pd.concat(tables, ignore_index=True), SCHEMAS["moments"])]


def _gap(problem: NsddeProblem, config: ExperimentConfig) -> List[Output]:
    kind = _single(config.schemes, "scheme", "gap", "--scheme")
    tables = [
        estimate_interpolation_gap(
            problem,
            exponent,
            _fine_exponent(config),
            config.paths,
            p=config.p,
            alpha=config.alpha,
            seed=config.seed,
            kind=kind,
            workers=config.workers,
            batch_size=config.batch_size,
        ).table
        for exponent in config.m_exponents
    ]
    return [("gap.csv", pd.concat(tables, ignore_index=True), SCHEMAS["gap"])]


def _exit_probability(
    problem: NsddeProblem, config: ExperimentConfig
) -> List[Output]:
    report = estimate_exit_probability(
        problem,
        _single(config.schemes, "scheme", "exit-prob", "--scheme"),
        _single(config.m_exponents, "step exponent", "exit-prob", "--m-exp"),
        config.paths,
        radii=config.radii,
        alpha=config.alpha,
        seed=config.seed,
        ref_exponent=_fine_exponent(config),
        workers=config.workers,
        batch_size=config.batch_size,
    )
    return [("exit.csv", report.table, SCHEMAS["exit"])]


def _check(problem: NsddeProblem, config: ExperimentConfig) -> List[Output]:
    report = run_assumption_checks(
        problem,
        radius=config.radius,
        samples=config.samples,
        seed=config.seed,
        alpha=config.alpha,
    )
    if report.violations:
        LOGGER.warning(
            "%d sampled points violate the declared constants of %s",
            len(report.violations),
            problem.name,
        )
    return [
        ("assumptions.csv", report_frame(report), SCHEMAS["assumptions"]),
        ("taming_gap.csv", report.taming_gap, SCHEMAS["taming_gap"]),
        (
            "violations.csv",
            violations_frame(report, problem.dim),
            violations_schema(problem.dim),
        ),
    ]


COMMANDS: Dict[str, Callable[[NsddeProblem, ExperimentConfig], List[Output]]] = {
    "simulate": _simulate,
    "convergence": _convergence,
    "moments": _moments,
    "gap": _gap,
    "exit-prob": _exit_probability,
    "check": _check,
}


def write_manifest(
    csv_path: Path, subcommand: str, config: ExperimentConfig
) -> Path:
    """Write `<stem>.manifest.yml` next to `csv_path`. The manifest can be passed
    back through `--config` to reproduce the file.
    """
    manifest_path = csv_path.with_name(f"{csv_path.stem}.manifest.yml")
    manifest = {
        "version": __version__,
        "command": subcommand,
        "config": config_to_dict(config),
        "outputs": [csv_path.name],
    }
    manifest_path.write_text(yaml.safe_dump(manifest, sort_keys=False))
    return manifest_path


def run_command(subcommand: str, config: ExperimentConfig) -> int:
    """Run one subcommand, write its CSV files and manifests to `output_dir` and
    return the exit status.
    """
    if subcommand not in COMMANDS:
        raise ConstraintViolation(
            f"Unknown subcommand '{subcommand}'. Valid subcommands are: "
            f"{', '.join(COMMANDS)}."
        )
    problem = builtin_problem(config.problem)
    outputs = COMMANDS[subcommand](problem, config)

    output_dir = Path(config.output_dir)
    for file_name, table, schema in outputs:
        csv_path = write_csv(table, schema, output_dir / file_name)
        write_manifest(csv_path, subcommand, config)
        LOGGER.info("Wrote %s", csv_path)

    if config.check_acceptance:
        # every simulated path is checked, other commands check their main table
        checked = outputs if subcommand == "simulate" else outputs[:1]
        failed = False
        for _, table, _ in checked:
            ok, messages = acceptance_check(subcommand, table)
            for message in messages:
                LOGGER.error(message)
            failed |= not ok
        if failed:
            return EXIT_ACCEPTANCE
    return EXIT_SUCCESS
