from __future__ import annotations

import json
import numbers
from typing import Any, Iterable, Mapping

import pandas as pd

from .profile import Mode, Report
from .resources import ResourceVector

MODE_LABELS = {Mode.INCL: "incl. oracles", Mode.EXCL: "excl. oracles"}

# table rows in display order; total_gates is derived
TABLE_ROWS = (
    "width",
    "ancilla_max",
    "ancilla_cycles",
    "total_gates",
    "h",
    "s",
    "t",
    "x",
    "y",
    "z",
    "cnot",
    "depth",
    "t_depth",
    "measurements",
)
# params echoed in CSV rows
CSV_PARAMS = ("N", "epsilon", "kappa", "Nb", "k", "r", "n0", "n1", "n2", "n4")


def sig3(value: int | float) -> str:
    """Small counts exactly, everything else in scientific notation to 3 significant digits."""
    if isinstance(value, numbers.Integral) and abs(value) < 10_000:
        return str(int(value))
    return f"{float(value):.2e}"


def vector_row(v: ResourceVector) -> dict[str, int]:
    fields = v.to_fields()
    fields["total_gates"] = v.total_gates
    return {k: fields[k] for k in TABLE_ROWS}


def resource_frame(report: Report, modes: Iterable[Mode]) -> pd.DataFrame:
    data = {MODE_LABELS[m]: vector_row(report.vector(m)) for m in modes}
    df = pd.DataFrame(data, index=list(TABLE_ROWS))
    return df.map(sig3)


def anchors_frame(report: Report) -> pd.DataFrame:
    return pd.DataFrame(
        {"count": [sig3(v) for v in report.anchors.values()]},
        index=list(report.anchors),
    )


def render_table(report: Report, modes: Iterable[Mode]) -> str:
    modes = list(modes)
    p = report.params
    lines = [
        f"QLSA logical resources, N = {p.N:,}, epsilon = {p.epsilon:g}, "
        f"kappa = {p.kappa:g}, r = {sig3(p.r)}"
        + (" (parallel amplitude estimation)" if report.parallel_ampest else ""),
        "",
        resource_frame(report, modes).to_string(),
        "",
        "anchors",
        anchors_frame(report).to_string(),
        "",
    ]
    for m in modes:
        lines.append(
            f"run time {MODE_LABELS[m]} at {report.gate_time_ns:g} ns/gate: "
            f"{report.run_time_seconds(m):.2e} s ({report.run_time_years(m):.2e} years)"
        )
    return "\n".join(lines)


def report_to_json(report: Report, modes: Iterable[Mode] = (Mode.INCL, Mode.EXCL)) -> dict[str, Any]:
    # big integers as decimal strings so any JSON reader keeps them exact
    out: dict[str, Any] = {"params": report.params.to_dict()}
    for m in modes:
        out[f"{m.value}_oracles"] = report.vector(m).to_json()
    out["anchors"] = {k: str(v) for k, v in report.anchors.items()}
    out["registers"] = str(report.registers)
    out["data_qubits"] = str(report.data_qubits)
    return out


def render_json(report: Report, modes: Iterable[Mode]) -> str:
    return json.dumps(report_to_json(report, modes), indent=2, sort_keys=True)


def vectors_from_json(payload: Mapping[str, Any]) -> dict[Mode, ResourceVector]:
    return {
        m: ResourceVector.from_json(payload[f"{m.value}_oracles"])
        for m in Mode
        if f"{m.value}_oracles" in payload
    }


def report_rows(
    report: Report, modes: Iterable[Mode], extra: Mapping[str, Any] | None = None
) -> list[dict[str, Any]]:
    params = report.params.to_dict()
    rows = []
    for m in modes:
        row: dict[str, Any] = dict(extra or {})
        row["mode"] = m.value
        row.update({k: params[k] for k in CSV_PARAMS})
        row.update(vector_row(report.vector(m)))
        rows.append(row)
    return rows


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    # exact integers survive as object columns
    return pd.DataFrame(rows).astype(object).to_csv(index=False)


def render_csv(report: Report, modes: Iterable[Mode]) -> str:
    return rows_to_csv(report_rows(report, modes))


def render(report: Report, fmt: str, modes: Iterable[Mode]) -> str:
    modes = list(modes)
    if fmt == "json":
        return render_json(report, modes)
    if fmt == "csv":
        return render_csv(report, modes)
    return render_table(report, modes)


def vector_frame(v: ResourceVector, label: str = "value") -> pd.DataFrame:
    return pd.DataFrame({label: vector_row(v)}, index=list(TABLE_ROWS)).map(sig3)
