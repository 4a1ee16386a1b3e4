"""CSV persistence for grid fields.

Layout::

    # rotelast-field 1
    # dims 4 4 4
    # spacing 0.10000000000000001
    # boundary periodic
    # kind vector
    # components 3
    x,y,z,c0,c1,c2
    0,0,0,0.5,0,0
    ...

Rows run over the grid in C order (z fastest).  Numbers carry 17 significant
digits, which round-trips every double exactly.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .grid import Boundary, Field, GridSpec

FORMAT_TAG = "rotelast-field"
FORMAT_VERSION = "1"

_SHAPES = {"scalar": (), "vector": (3,), "matrix": (3, 3), "tensor3": (3, 3, 3)}
_HEADER_KEYS = ("dims", "spacing", "boundary", "kind", "components")


class FieldFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)
        self.lineno = lineno


def _fmt(x: float) -> str:
    return "%.17g" % x


def format_field(f: Field) -> str:
    data = f.data.reshape(f.grid.npoints, -1)
    if not np.all(np.isfinite(data)):
        raise FieldFormatError("field contains non-finite values")
    g = f.grid
    ncomp = data.shape[1]
    lines = [
        f"# {FORMAT_TAG} {FORMAT_VERSION}",
        "# dims " + " ".join(str(n) for n in g.dims),
        f"# spacing {_fmt(g.h)}",
        f"# boundary {g.boundary.value}",
        f"# kind {f.kind}",
        f"# components {ncomp}",
        ",".join(["x", "y", "z"] + [f"c{c}" for c in range(ncomp)]),
    ]
    X, Y, Z = (c.reshape(-1) for c in g.coords())
    for p in range(g.npoints):
        row = [_fmt(X[p]), _fmt(Y[p]), _fmt(Z[p])] + [_fmt(v) for v in data[p]]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_field_csv(f: Field, path) -> None:
    text = format_field(f)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def parse_field(text: str) -> Field:
    lines = text.splitlines()
    if not lines or lines[0].split() != ["#", FORMAT_TAG, FORMAT_VERSION]:
        raise FieldFormatError(f"expected '# {FORMAT_TAG} {FORMAT_VERSION}' header", 1)
    header: dict[str, tuple[int, list[str]]] = {}
    idx = 1
    while idx < len(lines) and lines[idx].startswith("#"):
        parts = lines[idx][1:].split()
        if not parts:
            raise FieldFormatError("empty header line", idx + 1)
        header[parts[0]] = (idx + 1, parts[1:])
        idx += 1
    for key in _HEADER_KEYS:
        if key not in header:
            raise FieldFormatError(f"missing header entry '{key}'", idx + 1)

    def header_value(key, conv, count=1):
        lineno, vals = header[key]
        if len(vals) != count:
            raise FieldFormatError(f"'{key}' expects {count} value(s)", lineno)
        try:
            out = [conv(v) for v in vals]
        except ValueError as exc:
            raise FieldFormatError(f"bad '{key}' value: {exc}", lineno) from None
        return out if count > 1 else out[0]

    dims = tuple(header_value("dims", int, 3))
    h = header_value("spacing", float)
    boundary = header_value("boundary", str)
    kind = header_value("kind", str)
    ncomp = header_value("components", int)
    try:
        grid = GridSpec(dims, h, Boundary(boundary))
    except ValueError as exc:
        raise FieldFormatError(str(exc), header["dims"][0]) from None
    if kind not in _SHAPES:
        raise FieldFormatError(f"unknown field kind '{kind}'", header["kind"][0])
    shape = _SHAPES[kind]
    if ncomp != int(np.prod(shape, dtype=int)):
        raise FieldFormatError(f"kind '{kind}' needs {int(np.prod(shape))} components", header["components"][0])

    if idx >= len(lines):
        raise FieldFormatError("missing column header", idx + 1)
    expected_cols = ["x", "y", "z"] + [f"c{c}" for c in range(ncomp)]
    if lines[idx].split(",") != expected_cols:
        raise FieldFormatError(f"expected columns {','.join(expected_cols)}", idx + 1)
    idx += 1

    rows = lines[idx:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != grid.npoints:
        raise FieldFormatError(
            f"dimension mismatch: header promises {grid.npoints} rows, found {len(rows)}", idx + len(rows)
        )
    coords = np.stack([c.reshape(-1) for c in grid.coords()], axis=-1)
    values = np.empty((grid.npoints, ncomp))
    width = 3 + ncomp
    for p, line in enumerate(rows):
        lineno = idx + p + 1
        cells = line.split(",")
        if len(cells) != width:
            raise FieldFormatError(f"expected {width} columns, found {len(cells)}", lineno)
        try:
            nums = [float(c) for c in cells]
        except ValueError as exc:
            raise FieldFormatError(f"unparsable number: {exc}", lineno) from None
        if not all(np.isfinite(nums)):
            raise FieldFormatError("non-finite value", lineno)
        if not np.allclose(nums[:3], coords[p], rtol=1e-12, atol=1e-12 * max(h, 1.0)):
            raise FieldFormatError(f"coordinates {nums[:3]} do not match grid point {coords[p].tolist()}", lineno)
        values[p] = nums[3:]
    return Field(grid, values.reshape(grid.dims + shape))


def read_field_csv(path) -> Field:
    return parse_field(Path(path).read_text())


def write_series_csv(path, columns: dict) -> None:
    """Plain CSV of equally long numeric columns (energy and speed time series)."""
    names = list(columns)
    n = len(columns[names[0]])
    lines = [",".join(names)]
    for i in range(n):
        lines.append(",".join(_fmt(float(columns[c][i])) for c in names))
    Path(path).write_text("\n".join(lines) + "\n")
