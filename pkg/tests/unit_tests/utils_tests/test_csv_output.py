import numpy as np
import pandas as pd
import pytest

import nsdde_milstein._utils.csv_output as csv_output


@pytest.mark.parametrize(
    "value,text",
    [
        (0.5, "0.5"),
        (1.0, "1"),
        (0.0, "0"),
        (0.1, "0.10000000000000001"),
        (np.nan, "nan"),
        (np.inf, "inf"),
        (-np.inf, "-inf"),
    ],
)
def test_format_float(value, text):
    assert csv_output.format_float(value) == text


@pytest.mark.parametrize("value", [1 / 3, 2.0 ** -40, 1e20, -7.123456789e-5])
def test_format_float_is_exact(value):
    assert float(csv_output.format_float(value)) == value


def test_write_csv(output_dir):
    table = pd.DataFrame(
        {
            "stderr": [np.nan, 0.0],
            "gap": [0.1, 0.05],
            "dt": [0.5, 0.25],
            "p": [2.0, 2.0],
            "ignored": ["a", "b"],
        }
    )
    path = csv_output.write_csv(
        table, csv_output.SCHEMAS["gap"], output_dir / "nested" / "gap.csv"
    )
    assert path.read_bytes() == (
        b"dt,p,gap,stderr\n"
        b"0.5,2,0.10000000000000001,nan\n"
        b"0.25,2,0.050000000000000003,0\n"
    )


def test_write_csv_keeps_integers(output_dir):
    table = pd.DataFrame({"t": [0.0, 0.5], "y_0": [1, 2]})
    path = csv_output.write_csv(table, csv_output.path_schema(1), output_dir / "p.csv")
    assert path.read_text().splitlines() == ["t,y_0", "0,1", "0.5,2"]


def test_write_csv_missing_columns(output_dir):
    with pytest.raises(ValueError):
        csv_output.write_csv(
            pd.DataFrame({"dt": [0.5]}), csv_output.SCHEMAS["gap"], output_dir / "x.csv"
        )


def test_schemas():
    assert csv_output.SCHEMAS["convergence"] == [
        "scheme",
        "dt",
        "paths",
        "p",
        "error",
        "stderr",
        "exploded_fraction",
    ]
    assert csv_output.SCHEMAS["exit"] == ["which", "R", "prob", "scaled"]
    assert csv_output.path_schema(2) == ["t", "y_0", "y_1"]
    assert csv_output.violations_schema(2) == [
        "assumption",
        "x_0",
        "x_1",
        "y_0",
        "y_1",
        "value",
        "bound",
    ]
