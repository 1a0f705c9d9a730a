"""Reading and writing dictionaries and query sets.

Both CSV and JSON store one point per row. Point CSV files have exactly ``n``
rows of ``d`` values written with ``%.17g`` so they round-trip exactly (a
leading header row is tolerated on input); JSON uses
``{"d": ..., "n": ..., "points": [[...], ...]}``. Experiment tables always
carry a header row.
"""

import csv
import json
from pathlib import Path

import numpy as np

from ._validation import check_matrix
from .exceptions import InvalidInputError
from .geometry import Dictionary

FLOAT_FMT = "%.17g"


def fmt(x):
    return FLOAT_FMT % x


def _format_of(path, fmt_=None):
    if fmt_ is not None:
        return fmt_
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def write_points(path, rows, fmt_=None):
    """Write an ``(n, d)`` array, one point per row."""
    rows = check_matrix(rows, name="points")
    n, d = rows.shape
    if _format_of(path, fmt_) == "json":
        Path(path).write_text(json.dumps(
            {"d": d, "n": n, "points": [[float(v) for v in r] for r in rows]}
        ) + "\n")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows([[fmt(v) for v in r] for r in rows])


def read_points(path, fmt_=None):
    """Read an ``(n, d)`` array written by :func:`write_points`."""
    try:
        if _format_of(path, fmt_) == "json":
            data = json.loads(Path(path).read_text())
            rows = np.asarray(data["points"], dtype=float)
            if rows.ndim != 2 or rows.shape != (int(data["n"]), int(data["d"])):
                raise InvalidInputError(f"{path}: points do not match the declared d and n")
        else:
            with open(path, newline="") as fh:
                lines = [r for r in csv.reader(fh) if r]
            if not lines:
                raise InvalidInputError(f"{path}: empty file")
            body = lines[1:] if not _is_numeric(lines[0]) else lines
            rows = np.asarray([[float(v) for v in r] for r in body], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"cannot read points from {path}: {exc}") from None
    return check_matrix(rows, name=str(path))


def _is_numeric(row):
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def read_dictionary(path, fmt_=None):
    return Dictionary.from_rows(read_points(path, fmt_))


def write_dictionary(path, X, fmt_=None):
    write_points(path, X.rows, fmt_)


def write_csv(path_or_file, header, rows):
    """Tidy CSV with a mandatory header; floats are written with ``%.17g``."""

    def cell(v):
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        if isinstance(v, (tuple, list)):
            return " ".join(str(i) for i in v)
        return "" if v is None else str(v)

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow([cell(v) for v in r])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as fh:
            emit(fh)
