"""Deterministic CSV helpers for run artifacts.

Floats are written with ``repr`` so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, bool)):
        return str(v)
    try:
        import numpy as np

        if isinstance(v, np.floating):
            return repr(float(v))
        if isinstance(v, (np.integer, np.bool_)):
            return str(v)
    except ImportError:  # pragma: no cover
        pass
    return str(v)


def write_csv(path, header, rows):
    """Write a table; rows are iterables matching the header length."""
    header = list(header)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        count = 0
        for row in rows:
            row = list(row)
            if len(row) != len(header):
                raise ValueError("row length does not match header")
            writer.writerow([_fmt(v) for v in row])
            count += 1
    return count
