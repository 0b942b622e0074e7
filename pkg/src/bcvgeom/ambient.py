"""Geometry of the ambient Bianchi-Cartan-Vranceanu (BCV) spaces.

A BCV space M(kappa, tau) is the chart

    { (x, y, z) : sigma := 1 + (kappa/4)(x^2 + y^2) > 0 }

with the metric

    ds^2 = (dx^2 + dy^2) / sigma^2 + (dz + tau (y dx - x dy) / sigma)^2.

kappa = 0, tau != 0 is the Heisenberg group Nil3; kappa = tau = 0 is
Euclidean 3-space.  The orthonormal frame used everywhere is

    e1 = sigma d_x - tau y d_z,
    e2 = sigma d_y + tau x d_z,
    e3 = d_z,

and tangent vectors are passed around as components with respect to
{e1, e2, e3} unless explicitly labelled as coordinate components.
Every closed-form operation here has a finite-difference counterpart
("oracle") that is built from the metric alone, so the two routes can be
cross-checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StencilError

__all__ = [
    "AmbientParams",
    "conformal_factor",
    "metric_at",
    "frame_at",
    "frame_matrix",
    "coord_to_frame",
    "frame_to_coord",
    "connection_frame",
    "connection_apply",
    "connection_oracle",
    "commutator_closed_form",
    "commutator_oracle",
    "christoffel_oracle",
    "curvature_tensor",
    "curvature_oracle",
    "sectional_curvature",
    "hopf_project",
]

E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class AmbientParams:
    """The pair (kappa, tau) selecting a BCV space."""

    kappa: float = 0.0
    tau: float = 0.5

    def is_nil3(self) -> bool:
        return self.kappa == 0.0 and self.tau != 0.0


def conformal_factor(params: AmbientParams, p) -> float:
    """sigma(p) = 1 + (kappa/4)(x^2 + y^2); raises DomainError if <= 0."""
    x, y = float(p[0]), float(p[1])
    sigma = 1.0 + 0.25 * params.kappa * (x * x + y * y)
    if sigma <= 0.0:
        raise DomainError(f"point {tuple(p)} outside the chart: sigma = {sigma}")
    return sigma


def _require_margin(params: AmbientParams, p, h: float) -> None:
    """Oracles need a stencil of radius ~h; keep 10h away from the boundary."""
    if params.kappa >= 0.0:
        return
    r_boundary = 2.0 / math.sqrt(-params.kappa)
    r = math.hypot(float(p[0]), float(p[1]))
    if r_boundary - r < 10.0 * h:
        raise StencilError(
            f"step {h} too large: point at radius {r}, boundary at {r_boundary}"
        )


def metric_at(params: AmbientParams, p) -> np.ndarray:
    """Coordinate-basis Gram matrix of the metric at p (3x3, symmetric)."""
    sigma = conformal_factor(params, p)
    x, y = float(p[0]), float(p[1])
    t = params.tau
    s2 = sigma * sigma
    g = np.empty((3, 3))
    g[0, 0] = 1.0 / s2 + t * t * y * y / s2
    g[1, 1] = 1.0 / s2 + t * t * x * x / s2
    g[2, 2] = 1.0
    g[0, 1] = g[1, 0] = -t * t * x * y / s2
    g[0, 2] = g[2, 0] = t * y / sigma
    g[1, 2] = g[2, 1] = -t * x / sigma
    return g


def frame_at(params: AmbientParams, p):
    """Coordinate components of (e1, e2, e3) at p."""
    sigma = conformal_factor(params, p)
    x, y = float(p[0]), float(p[1])
    t = params.tau
    e1 = np.array([sigma, 0.0, -t * y])
    e2 = np.array([0.0, sigma, t * x])
    e3 = np.array([0.0, 0.0, 1.0])
    return e1, e2, e3


def frame_matrix(params: AmbientParams, p) -> np.ndarray:
    """3x3 matrix whose columns are the coordinate components of e1, e2, e3."""
    return np.column_stack(frame_at(params, p))


def coord_to_frame(params: AmbientParams, p, w) -> np.ndarray:
    """Components of a coordinate-basis vector w with respect to {e1,e2,e3}."""
    sigma = conformal_factor(params, p)
    x, y = float(p[0]), float(p[1])
    t = params.tau
    w = np.asarray(w, dtype=float)
    c1 = w[0] / sigma
    c2 = w[1] / sigma
    c3 = w[2] + t * (y * w[0] - x * w[1]) / sigma
    return np.array([c1, c2, c3])


def frame_to_coord(params: AmbientParams, p, c) -> np.ndarray:
    """Coordinate components of the frame-component vector c."""
    e1, e2, e3 = frame_at(params, p)
    c = np.asarray(c, dtype=float)
    return c[0] * e1 + c[1] * e2 + c[2] * e3


def _connection_table(params: AmbientParams, p) -> np.ndarray:
    """C[i, j, :] = frame components of nabla_{e_{i+1}} e_{j+1} at p."""
    conformal_factor(params, p)  # domain check
    x, y = float(p[0]), float(p[1])
    k2x = 0.5 * params.kappa * x
    k2y = 0.5 * params.kappa * y
    t = params.tau
    C = np.zeros((3, 3, 3))
    C[0, 0] = (0.0, k2y, 0.0)
    C[0, 1] = (-k2y, 0.0, t)
    C[0, 2] = (0.0, -t, 0.0)
    C[1, 0] = (0.0, -k2x, -t)
    C[1, 1] = (k2x, 0.0, 0.0)
    C[1, 2] = (t, 0.0, 0.0)
    C[2, 0] = (0.0, -t, 0.0)
    C[2, 1] = (t, 0.0, 0.0)
    # C[2, 2] = 0
    return C


def connection_frame(params: AmbientParams, i: int, j: int, p) -> np.ndarray:
    """nabla_{e_i} e_j at p in frame components, i, j in {1, 2, 3}."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError(f"frame indices must be in 1..3, got ({i}, {j})")
    return _connection_table(params, p)[i - 1, j - 1].copy()


def connection_apply(params: AmbientParams, xi, w, p) -> np.ndarray:
    """sum_{i,j} xi_i w_j nabla_{e_i} e_j -- the connection-coefficient part of
    the covariant derivative of a field with frame components w along a
    direction with frame components xi."""
    C = _connection_table(params, p)
    return np.einsum("i,j,ijk->k", np.asarray(xi, float), np.asarray(w, float), C)


def commutator_closed_form(params: AmbientParams, i: int, j: int, p) -> np.ndarray:
    """[e_i, e_j] in frame components from the closed-form relations."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError(f"frame indices must be in 1..3, got ({i}, {j})")
    conformal_factor(params, p)
    x, y = float(p[0]), float(p[1])
    k = params.kappa
    if (i, j) == (1, 2):
        return np.array([-0.5 * k * y, 0.5 * k * x, 2.0 * params.tau])
    if (i, j) == (2, 1):
        return -np.array([-0.5 * k * y, 0.5 * k * x, 2.0 * params.tau])
    return np.zeros(3)


def commutator_oracle(params: AmbientParams, i: int, j: int, p, h: float = 1e-5) -> np.ndarray:
    """[e_i, e_j] at p computed by central differences of the coordinate frame
    fields, returned in frame components."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError(f"frame indices must be in 1..3, got ({i}, {j})")
    _require_margin(params, p, h)
    p = np.asarray(p, dtype=float)

    def field(idx, q):
        return frame_at(params, q)[idx - 1]

    # Jacobians J[l, m] = d_m (e_idx)^l
    def jac(idx):
        J = np.empty((3, 3))
        for m in range(3):
            dp = np.zeros(3)
            dp[m] = h
            J[:, m] = (field(idx, p + dp) - field(idx, p - dp)) / (2.0 * h)
        return J

    Ei = field(i, p)
    Ej = field(j, p)
    bracket = jac(j) @ Ei - jac(i) @ Ej
    return coord_to_frame(params, p, bracket)


def christoffel_oracle(params: AmbientParams, p, h: float = 1e-5) -> np.ndarray:
    """Coordinate Christoffel symbols Gamma[k, i, j] = Gamma^k_{ij} at p by
    central differences of metric_at (Koszul formula)."""
    _require_margin(params, p, h)
    p = np.asarray(p, dtype=float)
    dg = np.empty((3, 3, 3))  # dg[m] = d_m g
    for m in range(3):
        dp = np.zeros(3)
        dp[m] = h
        dg[m] = (metric_at(params, p + dp) - metric_at(params, p - dp)) / (2.0 * h)
    ginv = np.linalg.inv(metric_at(params, p))
    # T[i, j, l] = d_i g_{lj} + d_j g_{li} - d_l g_{ij}
    T = (np.transpose(dg, (0, 2, 1)) + np.transpose(dg, (2, 0, 1))
         - np.transpose(dg, (1, 2, 0)))
    # Gamma^k_{ij} = (1/2) g^{kl} T[i, j, l]
    gamma = 0.5 * np.einsum("kl,ijl->kij", ginv, T)
    return gamma


def connection_oracle(params: AmbientParams, i: int, j: int, p, h: float = 1e-5) -> np.ndarray:
    """nabla_{e_i} e_j from the Christoffel oracle plus finite differences of
    the coordinate frame field, in frame components.  Fully independent of
    the closed-form connection table."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError(f"frame indices must be in 1..3, got ({i}, {j})")
    _require_margin(params, p, h)
    p = np.asarray(p, dtype=float)
    Ei = frame_at(params, p)[i - 1]
    Ej = frame_at(params, p)[j - 1]
    # directional derivative of the coordinate components of e_j along e_i
    J = np.empty((3, 3))
    for m in range(3):
        dp = np.zeros(3)
        dp[m] = h
        J[:, m] = (frame_at(params, p + dp)[j - 1] - frame_at(params, p - dp)[j - 1]) / (2.0 * h)
    gamma = christoffel_oracle(params, p, h)
    nabla = J @ Ei + np.einsum("kab,a,b->k", gamma, Ei, Ej)
    return coord_to_frame(params, p, nabla)


def curvature_tensor(params: AmbientParams, X, Y, Z, p=None) -> np.ndarray:
    """R(X, Y)Z in frame components from the closed form.

    Convention: R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
    - nabla_[X,Y] Z, which is position independent in frame components."""
    k, t = params.kappa, params.tau
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    Z = np.asarray(Z, float)
    term1 = (k - 3.0 * t * t) * (np.dot(Y, Z) * X - np.dot(X, Z) * Y)
    term2 = (k - 4.0 * t * t) * (
        Y[2] * Z[2] * X - X[2] * Z[2] * Y
        + X[2] * np.dot(Y, Z) * E3 - Y[2] * np.dot(X, Z) * E3
    )
    return term1 - term2


def curvature_oracle(params: AmbientParams, X, Y, Z, p,
                     h: float = 1e-3, h_inner: float = 1e-5) -> np.ndarray:
    """R(X, Y)Z at p in frame components, computed from finite differences of
    the Christoffel oracle (hence second differences of the metric)."""
    _require_margin(params, p, 10.0 * h)
    p = np.asarray(p, dtype=float)
    Xc = frame_to_coord(params, p, X)
    Yc = frame_to_coord(params, p, Y)
    Zc = frame_to_coord(params, p, Z)
    g0 = christoffel_oracle(params, p, h_inner)
    dgam = np.empty((3, 3, 3, 3))  # dgam[m] = d_m Gamma
    for m in range(3):
        dp = np.zeros(3)
        dp[m] = h
        dgam[m] = (christoffel_oracle(params, p + dp, h_inner)
                   - christoffel_oracle(params, p - dp, h_inner)) / (2.0 * h)
    # R^l_{kij} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
    #             + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}
    riem = np.empty((3, 3, 3, 3))
    for l in range(3):
        for kk in range(3):
            for i in range(3):
                for j in range(3):
                    riem[l, kk, i, j] = (
                        dgam[i, l, j, kk] - dgam[j, l, i, kk]
                        + np.dot(g0[l, i, :], g0[:, j, kk])
                        - np.dot(g0[l, j, :], g0[:, i, kk])
                    )
    W = np.einsum("lkij,i,j,k->l", riem, Xc, Yc, Zc)
    return coord_to_frame(params, p, W)


def sectional_curvature(params: AmbientParams, X, Y) -> float:
    """Sectional curvature of the plane spanned by frame-component vectors."""
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    num = np.dot(curvature_tensor(params, X, Y, Y), X)
    den = np.dot(X, X) * np.dot(Y, Y) - np.dot(X, Y) ** 2
    if den <= 0.0:
        raise ValueError("vectors do not span a 2-plane")
    return num / den


def hopf_project(p):
    """The Hopf fibration (x, y, z) -> (x, y)."""
    return float(p[0]), float(p[1])
