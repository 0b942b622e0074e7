"""Extrinsic and intrinsic geometry of immersed surface patches.

An Immersion wraps a map F(u, v) -> (x, y, z) into a BCV space together
with first-derivative accessors (analytic when available, central
differences otherwise).  On top of it this module computes the unit
normal, the angle theta between the normal and the fiber direction e3,
the projections T and JT, the shape operator, Gaussian curvature by two
independent routes (extrinsic via the Gauss relation, intrinsic via a
Brioschi-type finite-difference formula), and the residuals of the four
compatibility equations.

Conventions:
  * the normal is oriented so that <N, e3> >= 0; when <N, e3> is
    numerically zero the positively oriented normal of {F_u, F_v} is kept;
  * J X = N x X in the oriented frame {e1, e2, e3};
  * the {T, JT} shape-operator matrix is computed in the normalized basis
    {T/sin(theta), JT/sin(theta)}, which coincides with the {T, JT} matrix
    since |T| = |JT| = sin(theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import RectBivariateSpline

from . import ambient
from .ambient import AmbientParams, connection_apply, coord_to_frame
from .errors import DegenerateAngleError, ImmersionError

__all__ = [
    "Immersion",
    "immersion_from_grid",
    "SurfaceGeometry",
    "first_fundamental_form",
    "angle_and_projections",
    "shape_operator",
    "gaussian_curvature_extrinsic",
    "gaussian_curvature_intrinsic",
    "compatibility_residuals",
    "geometry_at",
]

THETA_EPS = 1e-9  # below this (or above pi/2 - this) the {T,JT} basis degenerates


class Immersion:
    """A parametrized surface patch (u, v) -> BCV space.

    position(u, v) must return the ambient coordinates; du/dv are optional
    analytic partials.  Missing partials fall back to central differences
    with step fd_step.
    """

    def __init__(self, params: AmbientParams, position: Callable,
                 du: Optional[Callable] = None, dv: Optional[Callable] = None,
                 fd_step: float = 1e-6, name: str = ""):
        self.params = params
        self.name = name
        self.fd_step = fd_step
        self._f = position
        self._du = du
        self._dv = dv

    def point(self, u: float, v: float) -> np.ndarray:
        return np.asarray(self._f(u, v), dtype=float)

    def du(self, u: float, v: float) -> np.ndarray:
        if self._du is not None:
            return np.asarray(self._du(u, v), dtype=float)
        h = self.fd_step
        return (self.point(u + h, v) - self.point(u - h, v)) / (2.0 * h)

    def dv(self, u: float, v: float) -> np.ndarray:
        if self._dv is not None:
            return np.asarray(self._dv(u, v), dtype=float)
        h = self.fd_step
        return (self.point(u, v + h) - self.point(u, v - h)) / (2.0 * h)


def immersion_from_grid(params: AmbientParams, u_nodes, v_nodes, points,
                        name: str = "grid") -> Immersion:
    """Spline-interpolated immersion through a (nu, nv, 3) grid of points."""
    u_nodes = np.asarray(u_nodes, float)
    v_nodes = np.asarray(v_nodes, float)
    points = np.asarray(points, float)
    kx = min(5, len(u_nodes) - 1)
    ky = min(5, len(v_nodes) - 1)
    splines = [RectBivariateSpline(u_nodes, v_nodes, points[:, :, c], kx=kx, ky=ky)
               for c in range(3)]

    def pos(u, v):
        return np.array([s(u, v)[0, 0] for s in splines])

    def du(u, v):
        return np.array([s(u, v, dx=1)[0, 0] for s in splines])

    def dv(u, v):
        return np.array([s(u, v, dy=1)[0, 0] for s in splines])

    return Immersion(params, pos, du, dv, name=name)


@dataclass
class SurfaceGeometry:
    """Per-point extrinsic data; vectors in frame components."""

    N: np.ndarray
    theta: float
    T: np.ndarray
    JT: np.ndarray
    S: np.ndarray          # 2x2, in {T, JT} when nondegenerate else orthonormal
    K: float
    lam: Optional[float]   # S[1,1] in the {T, JT} basis, when defined
    basis: str             # "tjt" or "orthonormal"


def _tangents_frame(imm: Immersion, u: float, v: float):
    """(p, fu, fv): point and frame components of the coordinate tangents."""
    p = imm.point(u, v)
    fu = coord_to_frame(imm.params, p, imm.du(u, v))
    fv = coord_to_frame(imm.params, p, imm.dv(u, v))
    return p, fu, fv


def first_fundamental_form(imm: Immersion, u: float, v: float) -> np.ndarray:
    """Gram matrix of {F_u, F_v} under the ambient metric."""
    _, fu, fv = _tangents_frame(imm, u, v)
    g = np.array([[fu @ fu, fu @ fv], [fu @ fv, fv @ fv]])
    if np.linalg.det(g) <= 1e-24:
        raise ImmersionError(f"degenerate tangent plane at (u, v) = ({u}, {v})")
    return g


def _normal(imm: Immersion, u: float, v: float) -> np.ndarray:
    """Oriented unit normal in frame components, <N, e3> >= 0."""
    _, fu, fv = _tangents_frame(imm, u, v)
    n = np.cross(fu, fv)
    nn = np.linalg.norm(n)
    if nn < 1e-14:
        raise ImmersionError(f"degenerate tangent plane at (u, v) = ({u}, {v})")
    n /= nn
    if n[2] < -1e-12:
        n = -n
    return n


def angle_and_projections(imm: Immersion, u: float, v: float):
    """(theta, T, JT, N) with T = e3 - cos(theta) N and JT = N x T."""
    n = _normal(imm, u, v)
    cos_th = float(np.clip(n[2], -1.0, 1.0))
    theta = math.acos(cos_th)
    T = np.array([0.0, 0.0, 1.0]) - cos_th * n
    JT = np.cross(n, T)
    return theta, T, JT, n


def _covariant_along(imm: Immersion, u: float, v: float, direction: str,
                     field: Callable, h: float) -> np.ndarray:
    """Covariant derivative of a frame-component field along a coordinate
    direction: d(components)/d(param) plus the connection correction."""
    p = imm.point(u, v)
    if direction == "u":
        wp, wm = field(u + h, v), field(u - h, v)
        xi = coord_to_frame(imm.params, p, imm.du(u, v))
    else:
        wp, wm = field(u, v + h), field(u, v - h)
        xi = coord_to_frame(imm.params, p, imm.dv(u, v))
    dw = (np.asarray(wp, float) - np.asarray(wm, float)) / (2.0 * h)
    w0 = np.asarray(field(u, v), float)
    return dw + connection_apply(imm.params, xi, w0, p)


def _orthonormal_tangent_basis(fu, fv):
    b1 = fu / np.linalg.norm(fu)
    b2 = fv - (fv @ b1) * b1
    n2 = np.linalg.norm(b2)
    if n2 < 1e-14:
        raise ImmersionError("degenerate tangent plane")
    return b1, b2 / n2


def _shape_in_basis(imm, u, v, b1, b2, h, normal_field=None):
    """Matrix of X -> -nabla_X N in the orthonormal tangent basis {b1, b2}."""
    nf = normal_field if normal_field is not None else (
        lambda uu, vv: _normal(imm, uu, vv))
    p, fu, fv = _tangents_frame(imm, u, v)
    n0 = np.asarray(nf(u, v), float)
    s_u = -_covariant_along(imm, u, v, "u", nf, h)
    s_v = -_covariant_along(imm, u, v, "v", nf, h)
    # remove the (numerically tiny) normal component
    s_u = s_u - (s_u @ n0) * n0
    s_v = s_v - (s_v @ n0) * n0
    P = np.array([[b1 @ fu, b1 @ fv], [b2 @ fu, b2 @ fv]])
    M = np.array([[b1 @ s_u, b1 @ s_v], [b2 @ s_u, b2 @ s_v]])
    return M @ np.linalg.inv(P)


def shape_operator(imm: Immersion, u: float, v: float, h: float = 1e-5,
                   basis: str = "tjt"):
    """Shape operator S X = -nabla_X N as a 2x2 matrix.

    basis="tjt": matrix in {T, JT} (equal to the normalized-basis matrix),
    returned as (S, lambda) with lambda = S[1, 1]; requires 0 < theta < pi/2.
    basis="orthonormal": matrix in a Gram-Schmidt basis of {F_u, F_v},
    returned as (S, None); valid for any theta.
    """
    theta, T, JT, n = angle_and_projections(imm, u, v)
    if basis == "tjt":
        if theta < THETA_EPS or theta > math.pi / 2 - THETA_EPS:
            raise DegenerateAngleError(
                f"theta = {theta}: {{T, JT}} basis degenerate; "
                "use basis='orthonormal'")
        s = math.sin(theta)
        S = _shape_in_basis(imm, u, v, T / s, JT / s, h)
        return S, float(S[1, 1])
    if basis == "orthonormal":
        _, fu, fv = _tangents_frame(imm, u, v)
        b1, b2 = _orthonormal_tangent_basis(fu, fv)
        S = _shape_in_basis(imm, u, v, b1, b2, h)
        return S, None
    raise ValueError(f"unknown basis {basis!r}")


def gaussian_curvature_extrinsic(imm: Immersion, u: float, v: float,
                                 h: float = 1e-5) -> float:
    """K = det S + tau^2 + (kappa - 4 tau^2) cos^2(theta)."""
    S, _ = shape_operator(imm, u, v, h=h, basis="orthonormal")
    theta, _, _, _ = angle_and_projections(imm, u, v)
    k, t = imm.params.kappa, imm.params.tau
    return float(np.linalg.det(S) + t * t + (k - 4.0 * t * t) * math.cos(theta) ** 2)


def gaussian_curvature_intrinsic(imm: Immersion, u: float, v: float,
                                 h: float = 1e-3) -> float:
    """Intrinsic K by the Brioschi formula with central differences of the
    first fundamental form.  Independent of the normal and shape operator."""
    def coeffs(uu, vv):
        g = first_fundamental_form(imm, uu, vv)
        return np.array([g[0, 0], g[0, 1], g[1, 1]])

    c00 = coeffs(u, v)
    cpu = coeffs(u + h, v)
    cmu = coeffs(u - h, v)
    cpv = coeffs(u, v + h)
    cmv = coeffs(u, v - h)
    cpp = coeffs(u + h, v + h)
    cpm = coeffs(u + h, v - h)
    cmp_ = coeffs(u - h, v + h)
    cmm = coeffs(u - h, v - h)

    E, F, G = c00
    d_u = (cpu - cmu) / (2 * h)
    d_v = (cpv - cmv) / (2 * h)
    d_uu = (cpu - 2 * c00 + cmu) / (h * h)
    d_vv = (cpv - 2 * c00 + cmv) / (h * h)
    d_uv = (cpp - cpm - cmp_ + cmm) / (4 * h * h)

    E_u, F_u, G_u = d_u
    E_v, F_v, G_v = d_v
    E_vv = d_vv[0]
    G_uu = d_uu[2]
    F_uv = d_uv[1]

    M1 = np.array([
        [-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v],
        [F_v - 0.5 * G_u, E, F],
        [0.5 * G_v, F, G],
    ])
    M2 = np.array([
        [0.0, 0.5 * E_v, 0.5 * G_u],
        [0.5 * E_v, E, F],
        [0.5 * G_u, F, G],
    ])
    den = (E * G - F * F) ** 2
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / den)


def geometry_at(imm: Immersion, u: float, v: float, h: float = 1e-5) -> SurfaceGeometry:
    """Full extrinsic package at a parameter point."""
    theta, T, JT, n = angle_and_projections(imm, u, v)
    degenerate = theta < THETA_EPS or theta > math.pi / 2 - THETA_EPS
    if degenerate:
        S, lam = shape_operator(imm, u, v, h=h, basis="orthonormal")
        basis = "orthonormal"
    else:
        S, lam = shape_operator(imm, u, v, h=h, basis="tjt")
        basis = "tjt"
    K = gaussian_curvature_extrinsic(imm, u, v, h=h)
    return SurfaceGeometry(N=n, theta=theta, T=T, JT=JT, S=S, K=K, lam=lam,
                           basis=basis)


def compatibility_residuals(imm: Immersion, u: float, v: float,
                            h: float = 1e-4, h_inner: float = 1e-5,
                            normal_tilt: Optional[Callable] = None) -> dict:
    """Residual magnitudes of the four compatibility equations at (u, v).

    Returns {"gauss", "codazzi", "struct1", "struct2"}.  normal_tilt, if
    given, is a function (u, v) -> frame components added to the normal
    before renormalizing; it exists so tests can verify that inconsistent
    data is detected (a genuine immersion always has small residuals).
    """
    params = imm.params
    k, t = params.kappa, params.tau

    def nf(uu, vv):
        n = _normal(imm, uu, vv)
        if normal_tilt is not None:
            n = n + np.asarray(normal_tilt(uu, vv), float)
            n = n / np.linalg.norm(n)
        return n

    def theta_of(uu, vv):
        return math.acos(float(np.clip(nf(uu, vv)[2], -1.0, 1.0)))

    def T_of(uu, vv):
        n = nf(uu, vv)
        c = float(np.clip(n[2], -1.0, 1.0))
        return np.array([0.0, 0.0, 1.0]) - c * n

    def s_field(direction):
        def field(uu, vv):
            n0 = nf(uu, vv)
            s = -_covariant_along(imm, uu, vv, direction, nf, h_inner)
            return s - (s @ n0) * n0
        return field

    p = imm.point(u, v)
    _, fu, fv = _tangents_frame(imm, u, v)
    n0 = nf(u, v)
    cos_th = float(np.clip(n0[2], -1.0, 1.0))
    T0 = T_of(u, v)
    su_f = s_field("u")
    sv_f = s_field("v")
    s_u0 = su_f(u, v)
    s_v0 = sv_f(u, v)

    # Gauss: intrinsic K vs det S + tau^2 + (kappa - 4 tau^2) cos^2 theta
    b1, b2 = _orthonormal_tangent_basis(fu, fv)
    P = np.array([[b1 @ fu, b1 @ fv], [b2 @ fu, b2 @ fv]])
    M = np.array([[b1 @ s_u0, b1 @ s_v0], [b2 @ s_u0, b2 @ s_v0]])
    det_s = np.linalg.det(M @ np.linalg.inv(P))
    k_ext = det_s + t * t + (k - 4.0 * t * t) * cos_th ** 2
    k_int = gaussian_curvature_intrinsic(imm, u, v)
    gauss = abs(k_int - k_ext)

    # Codazzi with X = d_u, Y = d_v (so [X, Y] = 0)
    cod_vec = (_covariant_along(imm, u, v, "u", sv_f, h)
               - _covariant_along(imm, u, v, "v", su_f, h)
               - (k - 4.0 * t * t) * cos_th * ((fv @ T0) * fu - (fu @ T0) * fv))
    codazzi = float(np.linalg.norm(cod_vec))

    # structure equations for X = d_u and X = d_v
    struct1 = 0.0
    struct2 = 0.0
    for direction, fx, sx in (("u", fu, s_u0), ("v", fv, s_v0)):
        jx = np.cross(n0, fx)
        # surface connection = tangential part of the ambient derivative
        cov_T = _covariant_along(imm, u, v, direction, T_of, h)
        cov_T = cov_T - (cov_T @ n0) * n0
        r1 = cov_T - cos_th * (sx - t * jx)
        struct1 = max(struct1, float(np.linalg.norm(r1)))
        if direction == "u":
            dcos = (math.cos(theta_of(u + h, v)) - math.cos(theta_of(u - h, v))) / (2 * h)
        else:
            dcos = (math.cos(theta_of(u, v + h)) - math.cos(theta_of(u, v - h))) / (2 * h)
        r2 = dcos + float((sx - t * jx) @ T0)
        struct2 = max(struct2, abs(r2))

    return {"gauss": gauss, "codazzi": codazzi,
            "struct1": struct1, "struct2": struct2}
