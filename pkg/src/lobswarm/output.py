"""Bit-stable CSV and JSON emission for every result type.

CSV schemas (exact headers):

    paths (PredictionPath, AgentSimPath, lists of either)  series,t,x
    iteration reports                                      iter,sup_diff
    queue statistics (single or pooled)                    class,mean_wait,sem,n
    field grids                                            x,y,value
    equilibria                                             ratio,stability
    analytic summaries                                     quantity,value

Floats are written with the shortest round-trip decimal representation
(Python ``repr``), so identical results produce byte-identical files.  JSON
output mirrors the CSV records and adds a ``meta`` object echoing the fully
resolved run configuration, including the seed.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

from .dynamics import Equilibrium, IterationReport, PredictionPath
from .simulate import AgentSimPath, PooledQueueStats, QueueSimStats
from .sweeps import FieldGrid

__all__ = ["csv_header", "csv_rows", "records", "emit_csv", "emit_json"]

PATH_HEADER = "series,t,x"
REPORT_HEADER = "iter,sup_diff"
QUEUE_HEADER = "class,mean_wait,sem,n"
FIELD_HEADER = "x,y,value"
EQUILIBRIA_HEADER = "ratio,stability"
ANALYTIC_HEADER = "quantity,value"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _is_path_list(result) -> bool:
    return (
        isinstance(result, (list, tuple))
        and len(result) > 0
        and all(isinstance(r, (PredictionPath, AgentSimPath)) for r in result)
    )


def _path_rows(series: int, path) -> list[tuple]:
    if isinstance(path, PredictionPath):
        times, values = path.times, path.values
    else:
        times, values = path.times, path.fractions
    return [(series, float(t), float(x)) for t, x in zip(times, values)]


def csv_header(result) -> str:
    """The exact header line for a result's CSV schema."""
    if isinstance(result, (PredictionPath, AgentSimPath)) or _is_path_list(result):
        return PATH_HEADER
    if isinstance(result, IterationReport):
        return REPORT_HEADER
    if isinstance(result, (QueueSimStats, PooledQueueStats)):
        return QUEUE_HEADER
    if isinstance(result, FieldGrid):
        return FIELD_HEADER
    if isinstance(result, (list, tuple)) and result and all(
        isinstance(r, Equilibrium) for r in result
    ):
        return EQUILIBRIA_HEADER
    if isinstance(result, dict):
        return ANALYTIC_HEADER
    raise TypeError(f"no CSV schema for {type(result).__name__}")


def csv_rows(result) -> list[tuple]:
    """Data rows matching csv_header(result), in emission order."""
    if isinstance(result, (PredictionPath, AgentSimPath)):
        return _path_rows(0, result)
    if _is_path_list(result):
        rows: list[tuple] = []
        for series, path in enumerate(result):
            rows.extend(_path_rows(series, path))
        return rows
    if isinstance(result, IterationReport):
        # iter counts updates, starting at 1 for the first one.
        return [(i + 1, float(d)) for i, d in enumerate(result.sup_diffs)]
    if isinstance(result, (QueueSimStats, PooledQueueStats)):
        return [
            (1, float(result.mean_wait_1), float(result.sem_1), int(result.n_1)),
            (2, float(result.mean_wait_2), float(result.sem_2), int(result.n_2)),
        ]
    if isinstance(result, FieldGrid):
        xs = result.spec.x_values()
        ys = result.spec.y_values()
        return [
            (float(xs[i]), float(ys[j]), float(result.values[i, j]))
            for i in range(result.spec.x_count)
            for j in range(result.spec.y_count)
        ]
    if isinstance(result, (list, tuple)) and result and all(
        isinstance(r, Equilibrium) for r in result
    ):
        return [(float(e.ratio), "stable" if e.stable else "unstable") for e in result]
    if isinstance(result, dict):
        return [(k, v) for k, v in result.items()]
    raise TypeError(f"no CSV schema for {type(result).__name__}")


def records(result) -> list[dict]:
    """The CSV rows as JSON-ready objects keyed by the schema's column names."""
    header = csv_header(result).split(",")
    out = []
    for row in csv_rows(result):
        rec: dict[str, Any] = {}
        for key, value in zip(header, row):
            if isinstance(value, float):
                rec[key] = float(value)
            elif isinstance(value, int) and not isinstance(value, bool):
                rec[key] = int(value)
            else:
                rec[key] = value
        out.append(rec)
    return out


def emit_csv(result, path) -> None:
    """Write the result's CSV file (schema header plus data rows)."""
    lines = [csv_header(result)]
    lines.extend(",".join(_fmt(v) for v in row) for row in csv_rows(result))
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines))
        handle.write("\n")


def emit_json(result, path, meta: dict, extra: dict | None = None) -> None:
    """Write the result as JSON: the CSV records plus the resolved config echo."""
    payload: dict[str, Any] = {"meta": meta, "records": records(result)}
    if extra:
        payload.update(extra)
    with open(path, "w", newline="\n") as handle:
        json.dump(payload, handle, indent=2, allow_nan=True)
        handle.write("\n")


def write_meta_sidecar(path, meta: dict) -> str:
    """Write the config echo next to a CSV file; returns the sidecar path."""
    sidecar = f"{path}.meta.json"
    with open(sidecar, "w", newline="\n") as handle:
        json.dump(meta, handle, indent=2, allow_nan=True)
        handle.write("\n")
    return sidecar
