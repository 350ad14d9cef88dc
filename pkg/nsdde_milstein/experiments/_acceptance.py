from typing import List, Tuple

import numpy as np
import pandas as pd

SLACK = 3.0


def _decreasing(
    table: pd.DataFrame, value: str, label: str, messages: List[str]
) -> bool:
    ordered = table.sort_values("dt", ascending=False)
    values = ordered[value].to_numpy(dtype=float)
    stderrs = np.nan_to_num(ordered["stderr"].to_numpy(dtype=float))
    steps = ordered["dt"].to_numpy(dtype=float)
    ok = True
    for i in range(len(values) - 1):
        slack = SLACK * np.hypot(stderrs[i], stderrs[i + 1])
        if not values[i + 1] < values[i] + slack:
            ok = False
            messages.append(
                f"{label}: {value} {values[i + 1]} at dt = {steps[i + 1]} is not below "
                f"{values[i]} at dt = {steps[i]} (slack {slack})."
            )
    return ok


def _convergence(table: pd.DataFrame, messages: List[str]) -> bool:
    ok = True
    for scheme, rows in table.groupby("scheme", sort=False):
        rows = rows[rows["error"] > 0]
        ok &= _decreasing(rows, "error", scheme, messages)
        stable = table[(table["scheme"] == scheme) & (table["exploded_fraction"] == 0)]
        if not np.all(np.isfinite(stable["error"])):
            ok = False
            messages.append(f"{scheme}: non-finite error without exploded paths.")
    return ok


def _moments(table: pd.DataFrame, messages: List[str]) -> bool:
    finite = np.isfinite(table["sup_moment"].to_numpy(dtype=float))
    if not finite.all():
        messages.append("Some sup-moment estimates are not finite.")
    return bool(finite.all())


def _exit(table: pd.DataFrame, messages: List[str]) -> bool:
    ok = True
    for which, rows in table.groupby("which", sort=False):
        rows = rows.sort_values("R")
        scaled = rows["scaled"].to_numpy(dtype=float)
        if "stderr" in rows:
            scaled_stderr = rows["R"].to_numpy(dtype=float) ** 2 * np.nan_to_num(
                rows["stderr"].to_numpy(dtype=float)
            )
        else:
            scaled_stderr = np.zeros_like(scaled)
        bound = SLACK * scaled[0] + SLACK * np.sqrt(np.sum(scaled_stderr ** 2))
        if scaled.max() > bound:
            ok = False
            messages.append(
                f"{which}: R^2 P(exit) reaches {scaled.max()}, above the bound {bound}."
            )
    return ok


def _report_value(table: pd.DataFrame, assumption: str, quantity: str):
    rows = table[(table["assumption"] == assumption) & (table["quantity"] == quantity)]
    return float(rows["value"].iloc[0]) if len(rows) else None


def _checks(table: pd.DataFrame, messages: List[str]) -> bool:
    ok = True
    for assumption, quantity, expected in (
        ("A2", "contraction_ok", 1.0),
        ("A5", "khasminskii_ok", 1.0),
        ("all", "violations", 0.0),
    ):
        value = _report_value(table, assumption, quantity)
        if value != expected:
            ok = False
            messages.append(f"{assumption} {quantity} is {value}, expected {expected}.")
    return ok


def _path(table: pd.DataFrame, messages: List[str]) -> bool:
    finite = np.isfinite(table.drop(columns="t").to_numpy(dtype=float)).all()
    if not finite:
        messages.append("The simulated path exploded.")
    return bool(finite)


_CHECKS = {
    "simulate": _path,
    "convergence": _convergence,
    "moments": _moments,
    "gap": lambda table, messages: _decreasing(table, "gap", "gap", messages),
    "exit-prob": _exit,
    "check": _checks,
}


def acceptance_check(kind: str, table: pd.DataFrame) -> Tuple[bool, List[str]]:
    """Acceptance thresholds for a report table, keyed by CLI subcommand name."""
    try:
        check = _CHECKS[kind]
    except KeyError as exc:
        raise ValueError(
            f"No acceptance check for '{kind}'. Valid kinds are: {', '.join(_CHECKS)}."
        ) from exc
    messages: List[str] = []
    return bool(check(table, messages)), messages
