"""Tables, record files and field exports."""

import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

from cross_modes.base import SweepRecord
from cross_modes.geometry import cut_position
from cross_modes.reference import SETS, reference_lookup

CSV_COLUMNS = ["beta", "set", "E/E_TH", "ell_x", "ell_y"]

# Logging
logger = logging.getLogger(__name__)
logger.setLevel(logging.INFO)
out_handler = logging.StreamHandler(stream=sys.stdout)
out_formatter = logging.Formatter("\n# %(asctime)s\n%(message)s\n", datefmt="%Y-%m-%d %H:%M:%S")
out_handler.setFormatter(out_formatter)
logger.addHandler(out_handler)
logger.propagate = False


@contextmanager
def _file_logger(file, file_format="\n# %(asctime)s\n%(message)s\n"):
    if file is not None:
        file = Path(file)
        file.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(file)
        file_formatter = logging.Formatter(file_format, datefmt="%Y-%m-%d %H:%M:%S")
        file_handler.setFormatter(file_formatter)

        logger.addHandler(file_handler)
        try:
            yield logger
        finally:
            logger.removeHandler(file_handler)
            file_handler.close()
    else:
        yield logger


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return ""
        return f"{value:#.6g}"
    return str(value)


def records_table(records):
    """Records in published column order, values formatted to 6 significant digits."""
    rows = [
        [_fmt(r.beta), _fmt(r.grid_set), _fmt(r.e_ratio), _fmt(r.ell_x), _fmt(r.ell_y)]
        for r in records
    ]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def print_table(records, **tabulate_kwargs):
    """Markdown table of records, with boundness and errors."""
    df = records_table(records)
    df["bound"] = [r.bound for r in records]
    df["error"] = [r.error or "" for r in records]
    tabulate_kwargs_ = dict(tablefmt="github", index=False)
    tabulate_kwargs_.update(tabulate_kwargs)
    return df.to_markdown(**tabulate_kwargs_)


def write_csv(records, file):
    """
    Write records as CSV with header ``beta,set,E/E_TH,ell_x,ell_y``.

    Null values are empty fields.

    """
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    records_table(records).to_csv(file, index=False, lineterminator="\n")


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def records_to_json(records, config=None):
    data = {"records": [{k: _jsonable(v) for k, v in r._asdict().items()} for r in records]}
    if config is not None:
        data["config"] = config
    return json.dumps(data, indent=2)


def write_json(records, file, config=None):
    """Write records with full diagnostics, at full precision."""
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_text(records_to_json(records, config) + "\n")


def compare_with_reference(records):
    """
    Deviations from the published tables.

    Returns
    -------
    pandas.DataFrame
        Relative deviations of the energy ratio and decay lengths, per matching record.

    """
    rows = []
    for record in records:
        ref = reference_lookup(record.sym, record.beta)
        if ref is None:
            continue
        row = {"beta": record.beta, "sym": str(record.sym)}
        for name in ("e_ratio", "ell_x", "ell_y"):
            value, value_ref = getattr(record, name), getattr(ref, name)
            row[f"{name}_ref"] = value_ref
            row[f"d_{name}"] = np.nan if value is None else value / value_ref - 1.0
        rows.append(row)
    return pd.DataFrame(rows)


def write_field(field, file, grid, problem):
    """
    Write a field on the node grid.

    Two header lines give ``N_x N_y L_x L_y beta class``; the values of all ``(N_y - 1) x
    (N_x - 1)`` nodes of the whole cross follow row-major with y rows ascending.

    """
    field = field.unfold()
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    header = "N_x N_y L_x L_y beta class\n"
    header += f"{grid.N_x} {grid.N_y} {grid.L_x:g} {grid.L_y:g} {problem.beta:.12g} {problem.sym}"
    np.savetxt(file, field.values, fmt="%.10e", header=header)


def write_field_csv(field, file):
    """Write ``x,y,value`` rows in original coordinates."""
    field = field.unfold()
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    x, y = field.original_coordinates()
    xx, yy = np.meshgrid(x, y)
    df = pd.DataFrame({"x": xx.ravel(), "y": yy.ravel(), "value": field.values.ravel()})
    df.to_csv(file, index=False, float_format="%.10e", lineterminator="\n")


def write_cut(field, file, axis="x", position=None):
    """
    Write a gnuplot-ready cut as three whitespace-separated columns ``x y value``.

    Parameters
    ----------
    field : Field
        Field to cut.
    file : os.PathLike or str
        Output path.
    axis : {"x", "y"}, optional
        Direction of the cut line.
    position : float, optional
        Rescaled transverse position; defaults to 0 or 1/3 by the class parity.

    """
    if position is None:
        position = cut_position(field.sym, axis)
    field = field.unfold()
    if axis == "x":
        s, values = field.cut_x(position)
        columns = np.column_stack([s, np.full(s.size, field.beta * position), values])
    elif axis == "y":
        s, values = field.cut_y(position)
        columns = np.column_stack([np.full(s.size, position), field.beta * s, values])
    else:
        raise ValueError("Axis must be 'x' or 'y'.")

    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(file, columns, fmt="%.10e", header="x y value")


def read_records(file, sym=None):
    """
    Load records written by `write_json` or `write_csv`.

    Parameters
    ----------
    file : os.PathLike or str
        JSON or CSV file.
    sym : SymmetryClass or str, optional
        Class of CSV rows, which do not store it.

    Returns
    -------
    list of SweepRecord
        CSV rows are bound exactly when both decay lengths are present.

    """
    file = Path(file)
    if file.suffix == ".json":
        data = json.loads(file.read_text())
        records = []
        for rec in data["records"]:
            for name in ("window_x", "window_y"):
                if rec.get(name) is not None:
                    rec[name] = tuple(rec[name])
            records.append(SweepRecord(**rec))
        return records

    if sym is None:
        raise ValueError("CSV records need the symmetry class.")
    df = pd.read_csv(file, dtype={"set": str}, keep_default_na=True)
    records = []
    for row in df.itertuples(index=False):
        beta, label, e_ratio, ell_x, ell_y = (None if pd.isna(v) else v for v in row)
        L, N = SETS.get(label, (None, None))
        bound = ell_x is not None and ell_y is not None
        records.append(
            SweepRecord(float(beta), str(sym), e_ratio, ell_x, ell_y, bound, label, L, N)
        )
    return records
