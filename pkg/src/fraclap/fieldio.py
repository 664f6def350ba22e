"""Reading and writing fields as CSV or as a headed little-endian binary dump.

CSV columns are ``j1[,j2,j3],x1[,x2,x3],value`` with 1-based lattice
indices.  The binary layout is one ASCII header line

    fraclap-field v1 <d> <m> <lower_1> <upper_1> ... <lower_d> <upper_d> <n_active>

followed by ``n_active`` float64 values (little endian) in lexicographic
order of the active points.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DimensionError
from .grid import Field, Grid, make_grid

__all__ = ["write_csv", "read_csv", "write_binary", "read_binary"]

MAGIC = "fraclap-field"
VERSION = "v1"


def write_csv(field: Field, path) -> None:
    g = field.grid
    j = g.indices()
    x = g.coordinates(j)
    header = [f"j{k + 1}" for k in range(g.d)] + [f"x{k + 1}" for k in range(g.d)] + ["value"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for jj, xx, v in zip(j, x, field.values):
            w.writerow([*map(int, jj), *map(repr, map(float, xx)), repr(float(v))])


def read_csv(path, grid: Grid | None = None) -> Field:
    """Load a CSV field.

    Without ``grid`` a full grid is inferred from the indices and
    coordinates; this needs every lattice point to be present.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    d = sum(1 for h in header if h.startswith("j"))
    if d not in (1, 2, 3) or len(header) != 2 * d + 1:
        raise ConfigurationError(f"unrecognized header {header}")
    data = np.array(rows, dtype=float)
    j = data[:, :d].astype(int)
    x = data[:, d:2 * d]
    vals = data[:, -1]
    if grid is None:
        m = int(j.max())
        if len(rows) != m**d:
            raise DimensionError("cannot infer an occluded grid from CSV, pass grid=")
        # two points on axis 0 pin down h and the lower bound
        i0, i1 = np.argmin(j[:, 0]), np.argmax(j[:, 0])
        h = (x[i1, 0] - x[i0, 0]) / (j[i1, 0] - j[i0, 0])
        lower = x[i0] - h * j[i0]
        grid = make_grid(d, m, [(lo, lo + h * (m + 1)) for lo in lower])
    full = np.zeros(grid.shape)
    seen = np.zeros(grid.shape, dtype=bool)
    idx = tuple((j - 1).T)
    full[idx] = vals
    seen[idx] = True
    if not np.array_equal(seen, grid.active):
        raise DimensionError("CSV points do not match the grid's active set")
    return Field(grid, grid.from_full(full))


def write_binary(field: Field, path) -> None:
    g = field.grid
    bounds = " ".join(f"{lo!r} {hi!r}" for lo, hi in zip(g.lower, g.upper))
    header = f"{MAGIC} {VERSION} {g.d} {g.m} {bounds} {g.n_active}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_binary(path, grid: Grid | None = None) -> Field:
    """Load a binary dump; occluded fields need their ``grid``."""
    raw = Path(path).read_bytes()
    nl = raw.index(b"\n")
    parts = raw[:nl].decode("ascii").split()
    if len(parts) < 4 or parts[0] != MAGIC or parts[1] != VERSION:
        raise ConfigurationError("not a fraclap field file")
    d, m = int(parts[2]), int(parts[3])
    bounds = [float(v) for v in parts[4:4 + 2 * d]]
    n = int(parts[4 + 2 * d])
    values = np.frombuffer(raw[nl + 1:], dtype="<f8")
    if values.size != n:
        raise DimensionError(f"header promises {n} values, file holds {values.size}")
    if grid is None:
        grid = make_grid(d, m, tuple(zip(bounds[0::2], bounds[1::2])))
        if grid.n_active != n:
            raise DimensionError("occluded field: pass the grid explicitly")
    elif grid.d != d or grid.m != m or grid.n_active != n:
        raise DimensionError("binary header does not match the supplied grid")
    return Field(grid, values.astype(float))
