import io
import json

import numpy as np
import pandas as pd
import pytest

from src.services.profile import Mode
from src.services.report import (
    TABLE_ROWS,
    render,
    render_csv,
    render_json,
    render_table,
    report_rows,
    resource_frame,
    rows_to_csv,
    sig3,
    vector_frame,
    vectors_from_json,
)
from src.services.resources import gates


@pytest.mark.parametrize(
    "value, text",
    [
        (0, "0"),
        (341, "341"),
        (9999, "9999"),
        (10_000, "1.00e+04"),
        (32_583_000_000_000_000_000_000_000, "3.26e+25"),
        (np.int64(287), "287"),
        (0.5, "5.00e-01"),
    ],
)
def test_sig3(value, text):
    assert sig3(value) == text


def test_resource_frame(default_report):
    df = resource_frame(default_report, [Mode.INCL, Mode.EXCL])
    assert list(df.columns) == ["incl. oracles", "excl. oracles"]
    assert list(df.index) == list(TABLE_ROWS)
    assert df.loc["width", "excl. oracles"] == "341"
    assert df.loc["ancilla_max", "excl. oracles"] == "281"


def test_render_table(default_report):
    text = render_table(default_report, [Mode.EXCL])
    assert text.startswith("QLSA logical resources, N = 332,020,680")
    assert "hs_calls" in text
    assert "196596" not in text
    assert "1.97e+05" in text
    assert "years" in text
    assert "incl. oracles" not in text


def test_json_keeps_big_integers_exact(default_report):
    payload = json.loads(render_json(default_report, list(Mode)))
    assert payload["excl_oracles"]["width"] == "341"
    assert payload["anchors"]["hs_calls"] == "196596"
    assert payload["registers"] == "287"
    assert int(payload["excl_oracles"]["t"]) == default_report.excl_oracles.t_count
    back = vectors_from_json(payload)
    for mode in Mode:
        assert back[mode].to_fields() == default_report.vector(mode).to_fields()


def test_json_with_one_mode(default_report):
    payload = json.loads(render(default_report, "json", [Mode.INCL]))
    assert "excl_oracles" not in payload
    assert set(vectors_from_json(payload)) == {Mode.INCL}


def test_csv_rows(default_report):
    df = pd.read_csv(io.StringIO(render_csv(default_report, list(Mode))), dtype=str)
    assert list(df["mode"]) == ["incl", "excl"]
    assert df.loc[1, "width"] == "341"
    assert int(df.loc[1, "total_gates"]) == default_report.excl_oracles.total_gates
    assert df.loc[0, "n2"] == "30"


def test_report_rows_carry_extra_columns(default_report):
    rows = report_rows(default_report, [Mode.EXCL], extra={"epsilon_sweep": 0.01})
    assert rows[0]["epsilon_sweep"] == 0.01
    assert list(rows[0])[:2] == ["epsilon_sweep", "mode"]
    text = rows_to_csv(rows)
    assert text.splitlines()[0].startswith("epsilon_sweep,mode,N")


def test_vector_frame():
    df = vector_frame(gates(t=7, h=2, width=3), "toffoli")
    assert df.loc["t", "toffoli"] == "7"
    assert df.loc["total_gates", "toffoli"] == "9"
