import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rotelast.fieldio import FieldFormatError, format_field, parse_field, read_field_csv, write_field_csv
from rotelast.grid import Boundary, Field, GridSpec


def test_zero_field_layout(tmp_path):
    g = GridSpec.cube(4)
    path = tmp_path / "zero.csv"
    write_field_csv(Field(g, np.zeros(g.dims + (3,))), path)
    lines = path.read_text().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    rows = [ln for ln in lines if not ln.startswith("#")][1:]
    assert len(rows) == 64
    assert lines[len(header)] == "x,y,z,c0,c1,c2"
    assert all(r.split(",")[3:] == ["0", "0", "0"] for r in rows)


@pytest.mark.parametrize("comp", [(), (3,), (3, 3), (3, 3, 3)])
def test_random_round_trip_is_bit_exact(tmp_path, comp):
    g = GridSpec((4, 5, 1), 0.1, Boundary.DIRICHLET_IDENTITY)
    data = np.random.default_rng(0).normal(size=g.dims + comp) * 10.0 ** np.random.default_rng(1).integers(-300, 300, size=g.dims + comp)
    f = Field(g, data)
    path = tmp_path / "f.csv"
    write_field_csv(f, path)
    back = read_field_csv(path)
    assert back.grid == g
    assert back.kind == f.kind
    np.testing.assert_array_equal(back.data, f.data)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 1, 4), elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_round_trip_any_finite_doubles(values):
    g = GridSpec((4, 1, 4), 0.25)
    back = parse_field(format_field(Field(g, values)))
    np.testing.assert_array_equal(back.data, values)
    # signed zeros survive too
    assert np.array_equal(np.signbit(back.data), np.signbit(values))


def _text():
    g = GridSpec((4, 4, 1), 0.5)
    return format_field(Field(g, np.arange(16.0).reshape(4, 4, 1)))


def test_truncated_row_names_line():
    lines = _text().splitlines()
    lines[12] = lines[12].rsplit(",", 1)[0]
    with pytest.raises(FieldFormatError, match="line 13") as info:
        parse_field("\n".join(lines))
    assert info.value.lineno == 13


def test_missing_rows_are_a_dimension_mismatch():
    lines = _text().splitlines()[:-2]
    with pytest.raises(FieldFormatError, match="dimension mismatch"):
        parse_field("\n".join(lines))


def test_malformed_header():
    text = _text().replace("# dims 4 4 1", "# dims 4 four 1")
    with pytest.raises(FieldFormatError, match="line 2"):
        parse_field(text)
    with pytest.raises(FieldFormatError, match="line 1"):
        parse_field("x,y,z\n")


def test_non_finite_value_rejected():
    lines = _text().splitlines()
    cells = lines[9].split(",")
    cells[3] = "nan"
    lines[9] = ",".join(cells)
    with pytest.raises(FieldFormatError, match="line 10"):
        parse_field("\n".join(lines))
    g = GridSpec((4, 4, 1), 0.5)
    with pytest.raises(FieldFormatError):
        format_field(Field(g, np.full(g.dims, math.inf)))


def test_coordinates_must_match_grid():
    lines = _text().splitlines()
    cells = lines[8].split(",")
    cells[0] = "99"
    lines[8] = ",".join(cells)
    with pytest.raises(FieldFormatError, match="line 9"):
        parse_field("\n".join(lines))
