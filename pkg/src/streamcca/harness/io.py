"""Plain-text file formats.

Dataset::

    dx dy n
    x_1 ... x_dx y_1 ... y_dy      (n rows)

Ground truth::

    dx dy k_true
    rho_1 ... rho_k
    C_x   (dx rows)
    C_y   (dy rows)
    C_xy  (dx rows)

Solution::

    dx dy count heuristic
    U (dx rows), V (dy rows), U_tilde (dx rows), V_tilde (dy rows)

Numbers are written with 17 significant digits, which round-trips float64
exactly. Files are ASCII with LF line endings.
"""

import csv
from collections import namedtuple

import numpy as np

from ..errors import DatasetFormatError
from ..evaluation import GroundTruth
from ..rounding import CcaSolution

DatasetHeader = namedtuple("DatasetHeader", "d_x d_y n")

METRICS_FIELDS = (
    "iter", "wall_ms", "pop_obj_avg", "pop_obj_rounded_mean", "emp_obj_holdout",
    "subopt", "orth_x", "orth_y", "grad_err",
)


def _fmt_row(values):
    return " ".join(format(float(v), ".17g") for v in values)


def _write_matrix(fh, A):
    for row in np.atleast_2d(A):
        fh.write(_fmt_row(row) + "\n")


def save_dataset(path, X, Y):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if X.shape[0] != Y.shape[0]:
        raise DatasetFormatError("views have different numbers of samples")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{X.shape[1]} {Y.shape[1]} {X.shape[0]}\n")
        for x, y in zip(X, Y):
            fh.write(_fmt_row(x) + " " + _fmt_row(y) + "\n")


def _parse_ints(line, count, lineno, what):
    parts = line.split()
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise DatasetFormatError(f"{what} must hold {count} integers", lineno) from None
    if len(vals) != count or any(v < 0 for v in vals):
        raise DatasetFormatError(f"{what} must hold {count} non-negative integers", lineno)
    return vals


def _parse_floats(line, count, lineno):
    parts = line.split()
    if len(parts) != count:
        raise DatasetFormatError(f"expected {count} values, found {len(parts)}", lineno)
    try:
        row = np.array([float(p) for p in parts])
    except ValueError:
        raise DatasetFormatError("could not parse a real number", lineno) from None
    if not np.all(np.isfinite(row)):
        raise DatasetFormatError("non-finite value", lineno)
    return row


def read_header(path):
    with open(path, encoding="ascii") as fh:
        first = fh.readline()
    if not first.strip():
        raise DatasetFormatError("empty file or missing header", 1)
    d_x, d_y, n = _parse_ints(first, 3, 1, "header")
    if d_x < 1 or d_y < 1:
        raise DatasetFormatError("dimensions must be positive", 1)
    return DatasetHeader(d_x, d_y, n)


def iter_samples(path):
    """Yield ``(x, y)`` pairs one line at a time, validating as it goes."""
    header = read_header(path)
    width = header.d_x + header.d_y
    seen = 0
    with open(path, encoding="ascii") as fh:
        fh.readline()
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                raise DatasetFormatError("blank line", lineno)
            if seen == header.n:
                raise DatasetFormatError(f"more than the {header.n} rows declared", lineno)
            row = _parse_floats(line, width, lineno)
            seen += 1
            yield row[:header.d_x], row[header.d_x:]
    if seen != header.n:
        raise DatasetFormatError(f"header declares {header.n} rows, found {seen}", seen + 2)


def load_dataset(path):
    """Return ``(header, iterator over (x, y))``; samples are read lazily."""
    return read_header(path), iter_samples(path)


def read_dataset(path):
    """Read a whole dataset into ``(X, Y)`` arrays."""
    header = read_header(path)
    X = np.empty((header.n, header.d_x))
    Y = np.empty((header.n, header.d_y))
    for i, (x, y) in enumerate(iter_samples(path)):
        X[i], Y[i] = x, y
    return X, Y


def save_truth(path, truth: GroundTruth):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{truth.d_x} {truth.d_y} {truth.rho.size}\n")
        fh.write(_fmt_row(truth.rho) + "\n")
        _write_matrix(fh, truth.C_x)
        _write_matrix(fh, truth.C_y)
        _write_matrix(fh, truth.C_xy)


def load_truth(path) -> GroundTruth:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].strip():
        raise DatasetFormatError("empty file or missing header", 1)
    d_x, d_y, k = _parse_ints(lines[0], 3, 1, "header")
    need = 2 + 2 * d_x + d_y
    for lineno in range(2, need + 1):
        if lineno > len(lines) or not lines[lineno - 1].strip():
            raise DatasetFormatError(f"truth file needs {need} lines", lineno)
    rho = _parse_floats(lines[1], k, 2)

    def block(start, rows, cols):
        return np.array([_parse_floats(lines[start + i], cols, start + i + 1) for i in range(rows)])

    C_x = block(2, d_x, d_x)
    C_y = block(2 + d_x, d_y, d_y)
    C_xy = block(2 + d_x + d_y, d_x, d_y)
    return GroundTruth(C_x=C_x, C_y=C_y, C_xy=C_xy, rho=rho)


def save_solution(path, sol: CcaSolution):
    d_x, d_y, count = sol.U.shape[0], sol.V.shape[0], sol.selected_count
    U_t = sol.U_tilde if sol.U_tilde is not None else np.full_like(sol.U, np.nan)
    V_t = sol.V_tilde if sol.V_tilde is not None else np.full_like(sol.V, np.nan)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{d_x} {d_y} {count} {int(sol.heuristic)}\n")
        for A in (sol.U, sol.V, U_t, V_t):
            for row in A.reshape(A.shape[0], count):
                fh.write(_fmt_row(row) + "\n")


def load_solution(path) -> CcaSolution:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].strip():
        raise DatasetFormatError("empty file or missing header", 1)
    d_x, d_y, count, heuristic = _parse_ints(lines[0], 4, 1, "header")
    pos = 1
    blocks = []
    for rows in (d_x, d_y, d_x, d_y):
        A = np.zeros((rows, count))
        for i in range(rows if count else 0):
            if pos + i >= len(lines):
                raise DatasetFormatError("solution file is truncated", pos + i + 1)
            parts = lines[pos + i].split()
            if len(parts) != count:
                raise DatasetFormatError(f"expected {count} values, found {len(parts)}", pos + i + 1)
            A[i] = [float(v) for v in parts]
        blocks.append(A)
        pos += rows if count else 0
    U, V, U_t, V_t = blocks
    if count and np.isnan(U_t).all():
        U_t = V_t = None
    return CcaSolution(U, V, U_t, V_t, heuristic=bool(heuristic))


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_metrics_csv(path, rows):
    """Write metric rows (mappings keyed by :data:`METRICS_FIELDS`); ``None`` is an empty field."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_FIELDS)
        for row in rows:
            writer.writerow([_csv_value(row[name]) for name in METRICS_FIELDS])


def read_metrics_csv(path):
    with open(path, encoding="ascii", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            {k: (None if v == "" else (int(v) if k == "iter" else float(v))) for k, v in row.items()}
            for row in reader
        ]
