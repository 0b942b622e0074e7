"""CSV/OBJ serialization round-trips and format guarantees."""

import numpy as np
import pytest

from bcvgeom.export import format_float, read_csv_grid, write_csv, write_obj


def sample_grid():
    u = np.linspace(0.0, 1.0, 4)
    v = np.linspace(-0.5, 0.5, 3)
    pts = np.array([[[uu, vv, uu * vv / 3.0] for vv in v] for uu in u])
    return u, v, pts


def test_format_float_full_precision():
    x = 1.0 / 3.0
    assert float(format_float(x)) == x
    assert format_float(0.0) == "0"


def test_csv_round_trip(tmp_path):
    u, v, pts = sample_grid()
    path = tmp_path / "grid.csv"
    write_csv(path, u, v, pts)
    text = path.read_text()
    assert text.startswith("u,v,x,y,z\n")
    assert len(text.splitlines()) == 1 + 4 * 3
    u2, v2, pts2 = read_csv_grid(path)
    assert np.array_equal(u, u2)
    assert np.array_equal(v, v2)
    assert np.array_equal(pts, pts2)


def test_csv_is_deterministic(tmp_path):
    u, v, pts = sample_grid()
    write_csv(tmp_path / "a.csv", u, v, pts)
    write_csv(tmp_path / "b.csv", u, v, pts)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_obj_counts(tmp_path):
    u, v, pts = sample_grid()
    path = tmp_path / "grid.obj"
    write_obj(path, pts)
    lines = path.read_text().splitlines()
    verts = [l for l in lines if l.startswith("v ")]
    faces = [l for l in lines if l.startswith("f ")]
    assert len(verts) == 4 * 3
    assert len(faces) == 2 * (4 - 1) * (3 - 1)
    # indices are 1-based and in range
    for f in faces:
        idx = [int(t) for t in f.split()[1:]]
        assert all(1 <= i <= 12 for i in idx)


def test_read_csv_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("x,y,z\n0,0,0\n")
    with pytest.raises(ValueError):
        read_csv_grid(p)


def test_read_csv_rejects_ragged_grid(tmp_path):
    p = tmp_path / "ragged.csv"
    p.write_text("u,v,x,y,z\n0,0,1,2,3\n0,1,4,5,6\n1,0,7,8,9\n")
    with pytest.raises(ValueError):
        read_csv_grid(p)
