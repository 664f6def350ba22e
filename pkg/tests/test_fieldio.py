import numpy as np
import pytest

from fraclap.errors import ConfigurationError, DimensionError
from fraclap.fieldio import read_binary, read_csv, write_binary, write_csv
from fraclap.grid import Field, make_grid, make_l_shape


@pytest.mark.parametrize(
    "grid", [make_grid(1, 9, (-1, 1)), make_grid(2, 5), make_grid(3, 3, ((0, 1), (2, 3), (-1, 0)))]
)
def test_csv_roundtrip(tmp_path, grid, rng):
    f = Field(grid, rng.standard_normal(grid.n_active))
    write_csv(f, tmp_path / "f.csv")
    back = read_csv(tmp_path / "f.csv")
    assert back.grid.compatible(grid)
    assert np.array_equal(back.values, f.values)


def test_csv_occluded_needs_grid(tmp_path, rng):
    g = make_l_shape(7)
    f = Field(g, rng.standard_normal(g.n_active))
    write_csv(f, tmp_path / "l.csv")
    with pytest.raises(DimensionError):
        read_csv(tmp_path / "l.csv")
    assert np.array_equal(read_csv(tmp_path / "l.csv", grid=g).values, f.values)
    with pytest.raises(DimensionError):
        read_csv(tmp_path / "l.csv", grid=make_grid(2, 7))


@pytest.mark.parametrize("grid", [make_grid(2, 7), make_grid(1, 4, (-1, 1)), make_l_shape(7)])
def test_binary_roundtrip(tmp_path, grid, rng):
    f = Field(grid, rng.standard_normal(grid.n_active))
    write_binary(f, tmp_path / "f.bin")
    back = read_binary(tmp_path / "f.bin", grid=None if grid.is_full else grid)
    assert np.array_equal(back.values, f.values)
    assert back.grid.h == grid.h


def test_binary_layout(tmp_path):
    g = make_grid(1, 3)
    write_binary(Field(g, np.array([1.0, 2.0, 3.0])), tmp_path / "f.bin")
    raw = (tmp_path / "f.bin").read_bytes()
    header, payload = raw.split(b"\n", 1)
    assert header.split()[:4] == [b"fraclap-field", b"v1", b"1", b"3"]
    assert np.frombuffer(payload, "<f8").tolist() == [1.0, 2.0, 3.0]


def test_binary_corrupt(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"garbage 1 2\n")
    with pytest.raises(ConfigurationError):
        read_binary(tmp_path / "x.bin")
    g = make_grid(1, 3)
    write_binary(Field(g, np.ones(3)), tmp_path / "t.bin")
    (tmp_path / "t.bin").write_bytes((tmp_path / "t.bin").read_bytes()[:-8])
    with pytest.raises(DimensionError):
        read_binary(tmp_path / "t.bin")
    write_binary(Field(g, np.ones(3)), tmp_path / "t.bin")
    with pytest.raises(DimensionError):
        read_binary(tmp_path / "t.bin", grid=make_grid(1, 5))
