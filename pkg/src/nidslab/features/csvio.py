"""Feature-matrix CSV serialization (header row names every dimension)."""

from __future__ import annotations

import csv
import io
from typing import List, Tuple

import numpy as np


def feature_csv(names: List[str], rows: np.ndarray) -> str:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size and rows.shape[1] != len(names):
        raise ValueError(f"{rows.shape[1]} columns but {len(names)} names")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def write_feature_csv(path, names: List[str], rows: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(feature_csv(names, rows))


def read_feature_csv(path) -> Tuple[List[str], np.ndarray]:
    with open(path) as fh:
        reader = csv.reader(fh)
        names = next(reader)
        data = [[float(x) for x in row] for row in reader if row]
    matrix = np.asarray(data, dtype=float) if data else np.zeros((0, len(names)))
    return names, matrix
