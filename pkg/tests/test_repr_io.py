"""Binary and CSV representation-file IO."""

import struct

import numpy as np
import pytest

from mkteq import (
    GaussianMixtureSpec,
    Population,
    ReprFormatError,
    UnsupportedReprVersion,
    gaussian_mixture_population,
    read_csv_repr,
    read_repr,
    write_repr,
)
from mkteq.repr_io import file_size


def _tiny_population():
    X = np.asarray([[1.0, 2.0, 3.0], [-0.5, 0.25, 8.0]])
    return Population(X, np.asarray([1, 0]))


def test_file_size_arithmetic(tmp_path):
    path = tmp_path / "two.repr"
    write_repr(_tiny_population(), path)
    assert file_size(2, 3) == 42
    assert path.stat().st_size == 42


def test_roundtrip_is_bit_exact(tmp_path):
    pop = gaussian_mixture_population(GaussianMixtureSpec(), 64, seed=3)
    first = tmp_path / "a.repr"
    second = tmp_path / "b.repr"
    write_repr(pop, first)
    loaded = read_repr(first)
    write_repr(loaded, second)
    assert first.read_bytes() == second.read_bytes()
    assert (loaded.y == pop.y).all()
    np.testing.assert_array_equal(loaded.X, pop.X.astype(np.float32).astype(np.float64))


def test_write_rejects_nonuniform_weights(tmp_path):
    pop = Population(np.zeros((2, 1)), np.asarray([0, 1]), np.asarray([0.7, 0.3]))
    with pytest.raises(ValueError, match="uniform"):
        write_repr(pop, tmp_path / "w.repr")


def test_read_errors_are_distinct(tmp_path):
    empty = tmp_path / "empty.repr"
    empty.write_bytes(b"")
    with pytest.raises(ReprFormatError, match="truncated header"):
        read_repr(empty)

    bad_magic = tmp_path / "magic.repr"
    bad_magic.write_bytes(b"NOPE" + struct.pack("<III", 1, 1, 0) + b"\x00")
    with pytest.raises(ReprFormatError, match="bad magic"):
        read_repr(bad_magic)

    v2 = tmp_path / "v2.repr"
    v2.write_bytes(b"MKTR" + struct.pack("<III", 2, 1, 0) + b"\x00")
    with pytest.raises(UnsupportedReprVersion):
        read_repr(v2)

    truncated = tmp_path / "trunc.repr"
    good = tmp_path / "good.repr"
    write_repr(_tiny_population(), good)
    truncated.write_bytes(good.read_bytes()[:-1])
    with pytest.raises(ReprFormatError, match="header implies"):
        read_repr(truncated)

    bad_label = tmp_path / "label.repr"
    blob = bytearray(good.read_bytes())
    blob[-1] = 2
    bad_label.write_bytes(bytes(blob))
    with pytest.raises(ReprFormatError, match="not 0/1"):
        read_repr(bad_label)

    zero_points = tmp_path / "zero.repr"
    zero_points.write_bytes(b"MKTR" + struct.pack("<III", 1, 0, 3))
    with pytest.raises(ReprFormatError, match="n_points"):
        read_repr(zero_points)


def test_csv_basic_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,1\n")
    pop = read_csv_repr(path)
    assert pop.n == 1 and pop.dim == 2
    assert pop.y[0] == 1
    np.testing.assert_array_equal(pop.X, [[1.0, 2.0]])


def test_csv_ragged_row_names_line(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,1\n3.0,0\n")
    with pytest.raises(ReprFormatError, match="line 2"):
        read_csv_repr(path)


def test_csv_header_is_skipped(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x0,x1,y\n1.0,2.0,1\n0.5,0.5,0\n")
    pop = read_csv_repr(path)
    assert pop.n == 2
    assert list(pop.y) == [1, 0]


def test_csv_bad_label_and_bad_row(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1.0,2.0,3\n")
    with pytest.raises(ReprFormatError, match="label 3"):
        read_csv_repr(path)
    path.write_text("x0,x1,y\n1.0,oops,1\n")
    with pytest.raises(ReprFormatError, match="line 2"):
        read_csv_repr(path)
    path.write_text("x0,x1,y\n")
    with pytest.raises(ReprFormatError, match="no data rows"):
        read_csv_repr(path)


def test_zero_dimension_roundtrip(tmp_path):
    pop = Population(np.zeros((3, 0)), np.asarray([1, 0, 1]))
    path = tmp_path / "zero.repr"
    write_repr(pop, path)
    assert path.stat().st_size == 16 + 3
    loaded = read_repr(path)
    assert loaded.dim == 0
    assert (loaded.y == pop.y).all()
