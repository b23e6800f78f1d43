"""Text formats: density-matrix JSON, counts CSV and sweep CSV.

All writers produce UTF-8 with LF line endings and are byte-deterministic
for equal inputs.
"""

import csv
import io
import json
import math
import sys

import numpy as np

from .gamesim import SWEEP_COLUMNS
from .tomography import CountsTable, settings_by_label

SCHEMA_VERSION = 1
COUNTS_HEADER = ("setting", "alice_outcome", "bob_outcome", "count")


class CountsFormatError(ValueError):
    """Malformed counts file; ``line`` is the 1-based offending line."""

    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


def fmt9(x):
    """Fixed 9-decimal format with negative zero normalised."""
    s = f"{float(x):.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def fmt_angle(x):
    """Radians to 12 significant digits."""
    return float(f"{float(x):.12g}") + 0.0


def clean9(x):
    return round(float(x), 9) + 0.0


def density_to_json(rho):
    """Row-major nested ``[re, im]`` pairs."""
    rho = np.asarray(rho, dtype=complex)
    return [[[clean9(z.real), clean9(z.imag)] for z in row] for row in rho]


def density_from_json(data):
    arr = np.array(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("density matrix JSON must be an n x n array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dumps(obj):
    """JSON text with a top-level ``schema`` field and a trailing newline."""
    payload = {"schema": SCHEMA_VERSION, **obj}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _count_text(v, exact):
    if not exact and float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def counts_to_csv(table):
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COUNTS_HEADER)
    for setting, row in zip(table.settings, table.counts):
        for k, v in enumerate(row):
            w.writerow((setting.label, k // 2, k % 2, _count_text(v, table.exact)))
    return buf.getvalue()


def counts_from_csv(text):
    """Parse a counts CSV; every listed setting needs all four outcomes once."""
    known = settings_by_label()
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise CountsFormatError(1, "empty file")
    if tuple(h.strip() for h in header) != COUNTS_HEADER:
        raise CountsFormatError(1, f"expected header {','.join(COUNTS_HEADER)}")
    order, rows, first_line = [], {}, {}
    for fields in reader:
        line = reader.line_num
        if not fields or all(not f.strip() for f in fields):
            continue
        if len(fields) != 4:
            raise CountsFormatError(line, f"expected 4 fields, got {len(fields)}")
        label, a, b, c = (f.strip() for f in fields)
        if label not in known:
            raise CountsFormatError(line, f"unknown setting {label!r}")
        if a not in ("0", "1") or b not in ("0", "1"):
            raise CountsFormatError(line, "outcomes must be 0 or 1")
        try:
            count = float(c)
        except ValueError:
            raise CountsFormatError(line, f"count {c!r} is not a number") from None
        if not math.isfinite(count) or count < 0:
            raise CountsFormatError(line, f"count {c!r} must be finite and non-negative")
        if label not in rows:
            order.append(label)
            rows[label] = [None] * 4
            first_line[label] = line
        k = 2 * int(a) + int(b)
        if rows[label][k] is not None:
            raise CountsFormatError(line, f"duplicate outcome ({a},{b}) for {label}")
        rows[label][k] = count
    if not order:
        raise CountsFormatError(reader.line_num or 1, "no data rows")
    for label in order:
        if None in rows[label]:
            raise CountsFormatError(first_line[label], f"setting {label} lacks some outcomes")
    counts = np.array([rows[lbl] for lbl in order])
    exact = not all(float(v).is_integer() for v in counts.ravel())
    return CountsTable([known[lbl] for lbl in order], counts, exact=exact)


def sweep_to_csv(result):
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in result.rows:
        w.writerow([r.witness if k == "witness" else fmt9(getattr(r, k)) for k in SWEEP_COLUMNS])
    return buf.getvalue()


def sweep_to_json(result):
    rows = [
        {k: (r.witness if k == "witness" else clean9(getattr(r, k))) for k in SWEEP_COLUMNS}
        for r in result.rows
    ]
    return dumps({"kind": result.kind, "x": result.x_label, "rows": rows,
                  "violations": list(result.violations)})


def write_text(path, text):
    """Write UTF-8 text with LF endings; ``-`` means stdout."""
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
