from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd

SCHEMAS: Dict[str, List[str]] = {
    "convergence": [
        "scheme",
        "dt",
        "paths",
        "p",
        "error",
        "stderr",
        "exploded_fraction",
    ],
    "moments": ["scheme", "dt", "p", "sup_moment", "stderr", "exploded_fraction"],
    "exit": ["which", "R", "prob", "scaled"],
    "gap": ["dt", "p", "gap", "stderr"],
    "assumptions": ["assumption", "quantity", "R", "value"],
    "taming_gap": ["dt", "gap", "n_r_hat", "n_r_alpha_hat"],
}


def path_schema(dim: int) -> List[str]:
    return ["t"] + [f"y_{component}" for component in range(dim)]


def violations_schema(dim: int) -> List[str]:
    return (
        ["assumption"]
        + [f"x_{component}" for component in range(dim)]
        + [f"y_{component}" for component in range(dim)]
        + ["value", "bound"]
    )


def format_float(value: float) -> str:
    """Decimal notation with 17 significant digits, enough to read back the exact
    double. Trailing zeros are dropped.
    """
    if np.isnan(value):
        return "nan"
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return np.format_float_positional(
        value, precision=17, unique=False, fractional=False, trim="-"
    )


def write_csv(table: pd.DataFrame, schema: List[str], path: Union[str, Path]) -> Path:
    """Write the schema columns of `table` in schema order with a header row and
    LF line endings.
    """
    missing = [column for column in schema if column not in table.columns]
    if missing:
        raise ValueError(
            f"Report is missing the columns {missing} required by the output schema."
        )
    output = table[schema].copy()
    for column in schema:
        if pd.api.types.is_float_dtype(output[column]):
            output[column] = output[column].map(format_float)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    output.to_csv(path, index=False, lineterminator="\n")
    return path
