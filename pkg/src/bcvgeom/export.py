"""Deterministic CSV / OBJ export of sampled surface grids."""

from __future__ import annotations

import numpy as np

__all__ = ["format_float", "write_csv", "write_obj", "read_csv_grid"]


def format_float(x: float) -> str:
    """Full-precision decimal formatting (17 significant digits, '.')."""
    return f"{float(x):.17g}"


def write_csv(path, u_nodes, v_nodes, points) -> None:
    """Rows u,v,x,y,z with a header line; grid order is u-major."""
    lines = ["u,v,x,y,z"]
    for i, u in enumerate(u_nodes):
        for j, v in enumerate(v_nodes):
            x, y, z = points[i][j]
            lines.append(",".join(format_float(t) for t in (u, v, x, y, z)))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_obj(path, points) -> None:
    """Vertices in grid order; each grid quad split into two triangles.
    Closed families are exported with an unwelded seam."""
    points = np.asarray(points, float)
    nu, nv = points.shape[:2]
    lines = []
    for i in range(nu):
        for j in range(nv):
            x, y, z = points[i, j]
            lines.append(f"v {format_float(x)} {format_float(y)} {format_float(z)}")
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            b = (i + 1) * nv + j + 1
            c = (i + 1) * nv + j + 2
            d = i * nv + j + 2
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv_grid(path):
    """Inverse of write_csv: returns (u_nodes, v_nodes, points)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header.replace(" ", "") != "u,v,x,y,z":
            raise ValueError(f"unexpected CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(t) for t in line.split(",")])
    data = np.asarray(rows, float)
    u_nodes = np.unique(data[:, 0])
    v_nodes = np.unique(data[:, 1])
    nu, nv = len(u_nodes), len(v_nodes)
    if nu * nv != len(data):
        raise ValueError("CSV rows do not form a full rectangular grid")
    points = np.full((nu, nv, 3), np.nan)
    iu = {u: i for i, u in enumerate(u_nodes)}
    iv = {v: j for j, v in enumerate(v_nodes)}
    for u, v, x, y, z in data:
        points[iu[u], iv[v]] = (x, y, z)
    if np.isnan(points).any():
        raise ValueError("CSV rows do not form a full rectangular grid")
    return u_nodes, v_nodes, points
