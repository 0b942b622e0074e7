"""Constant angle machinery for general BCV spaces (kappa, tau arbitrary).

On the strictly positive branch r^2 = kappa sin^2(theta)
+ 4 tau^2 cos^2(theta) > 0 the proof fields have closed forms

    lambda(u, v) = r tan(varphi(v) - r cos(theta) u),
    a(u, v)      = (2 tau / r) sin(varphi(v) - r cos(theta) u),
    b(u, v)      = cos(varphi(v) - r cos(theta) u),

and the u-subsystem for (phi, F1, F2) has the partial closed forms

    F1  =  sin(2 theta)/(2 D) sin(phi) + L cos(rho),
    F2  = -sin(2 theta)/(2 D) cos(phi) + L sin(rho),
    phi =  rho + 2 arctan((-A + sqrt(B^2 - A^2) tan(-sqrt(B^2 - A^2) u / 2
           + C)) / B),
    A   = (kappa/4) sin(2 theta) L,
    B   = D + (kappa/4)(sin^2(2 theta)/(4 D) + D L^2).

The four constants D, L, rho, C are not all free: substituting the closed
forms into the phi-equation of the flow forces

    D (1 + (kappa/4) L^2) - kappa sin^2(2 theta)/(16 D) = 2 tau cos^2(theta),

and exactly under this constraint B^2 - A^2 = r^2 cos^2(theta).  (F1 and
F2 solve their u-equations for any D, L.)  constrained_d solves the
constraint for D given L.

The remaining v-equations are not available in closed form; the full
eight-equation system is integrated numerically by integrate_bcv_system
and the numerically measured residuals are reported, not asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .ambient import AmbientParams
from .errors import (DomainError, InvalidSpecError, PoleError,
                     UnsolvedBranchError)
from .numerics import central_diff4, rk4_march
from .surface import (Immersion, angle_and_projections, immersion_from_grid,
                      shape_operator, gaussian_curvature_extrinsic,
                      _covariant_along, _tangents_frame)

__all__ = [
    "r_squared",
    "RemarkFields",
    "constrained_d",
    "bcv_lambda_a_b",
    "remark_closed_form",
    "integrate_bcv_system",
    "BCVIntegratedSurface",
    "lemma4_residuals",
]

POLE_GRID_TOL = 1e-3


def r_squared(kappa: float, tau: float, theta: float) -> float:
    """kappa sin^2(theta) + 4 tau^2 cos^2(theta)."""
    return kappa * math.sin(theta) ** 2 + 4.0 * tau * tau * math.cos(theta) ** 2


def _r_of(kappa, tau, theta) -> float:
    r2 = r_squared(kappa, tau, theta)
    if r2 <= 0.0:
        raise UnsolvedBranchError(
            f"r^2 = {r2} <= 0: only the strictly positive branch is solved")
    return math.sqrt(r2)


def _pole_distance(arg: float) -> float:
    r = (arg - math.pi / 2) % math.pi
    return min(r, math.pi - r)


def _as_fn(x: Union[float, Callable]) -> Callable[[float], float]:
    if callable(x):
        return x
    return lambda v, _x=float(x): _x


@dataclass(frozen=True)
class RemarkFields:
    """Integration constants D(v), L(v), rho(v), C(v) of the u-subsystem.

    Scalars are promoted to constant functions.  D must never vanish."""

    d: Union[float, Callable]
    l: Union[float, Callable] = 0.0
    rho: Union[float, Callable] = 0.0
    c: Union[float, Callable] = 0.0

    def d_at(self, v: float) -> float:
        d = _as_fn(self.d)(v)
        if d == 0.0:
            raise InvalidSpecError(f"D(v) = 0 at v = {v}")
        return d

    def l_at(self, v: float) -> float:
        return _as_fn(self.l)(v)

    def rho_at(self, v: float) -> float:
        return _as_fn(self.rho)(v)

    def c_at(self, v: float) -> float:
        return _as_fn(self.c)(v)

    def a_coef(self, kappa: float, theta: float, v: float) -> float:
        return 0.25 * kappa * math.sin(2.0 * theta) * self.l_at(v)

    def b_coef(self, kappa: float, theta: float, v: float) -> float:
        d = self.d_at(v)
        s2 = math.sin(2.0 * theta)
        return d + 0.25 * kappa * (s2 * s2 / (4.0 * d) + d * self.l_at(v) ** 2)

    def identity_residual(self, kappa: float, tau: float, theta: float,
                          v: float) -> float:
        """|B^2 - A^2 - r^2 cos^2(theta)|; zero iff D satisfies the
        phi-equation constraint."""
        a = self.a_coef(kappa, theta, v)
        b = self.b_coef(kappa, theta, v)
        return abs(b * b - a * a
                   - r_squared(kappa, tau, theta) * math.cos(theta) ** 2)


def constrained_d(kappa: float, tau: float, theta: float, ell: float) -> float:
    """The positive root D of
    D^2 (1 + kappa L^2 / 4) - 2 tau cos^2(theta) D - kappa sin^2(2 theta)/16
    = 0, i.e. the value making the closed forms solve the phi-equation
    (equivalently: making B^2 - A^2 = r^2 cos^2(theta))."""
    alpha = 1.0 + 0.25 * kappa * ell * ell
    beta = 2.0 * tau * math.cos(theta) ** 2
    s2 = math.sin(2.0 * theta)
    gamma = kappa * s2 * s2 / 16.0
    if alpha == 0.0:
        if beta == 0.0:
            raise InvalidSpecError("degenerate constraint: no admissible D")
        return -gamma / beta
    disc = beta * beta + 4.0 * alpha * gamma
    if disc < 0.0:
        raise InvalidSpecError("constraint has no real root for this L")
    d = (beta + math.sqrt(disc)) / (2.0 * alpha)
    if d == 0.0:
        raise InvalidSpecError("constraint root D = 0 is inadmissible")
    return d


def bcv_lambda_a_b(kappa: float, tau: float, theta: float,
                   varphi: Callable[[float], float], u: float, v: float,
                   pole_tol: float = 1e-6):
    """(lambda, a, b) closed forms on the r^2 > 0 branch."""
    r = _r_of(kappa, tau, theta)
    arg = varphi(v) - r * math.cos(theta) * u
    if _pole_distance(arg) < pole_tol:
        raise PoleError(f"lambda pole near (u, v) = ({u}, {v})")
    lam = r * math.tan(arg)
    a = 2.0 * tau / r * math.sin(arg)
    b = math.cos(arg)
    return lam, a, b


def remark_closed_form(rf: RemarkFields, kappa: float, tau: float,
                       theta: float, u: float, v: float):
    """(F1, F2, phi) of the u-subsystem closed forms.

    The arctan uses the principal branch; the tan argument must stay in
    the branch containing C(v) for all u' between 0 and u, otherwise a
    PoleError is raised."""
    a = rf.a_coef(kappa, theta, v)
    b = rf.b_coef(kappa, theta, v)
    g2 = b * b - a * a
    if b == 0.0:
        raise InvalidSpecError("B(v) = 0: arctan closed form undefined")
    if g2 <= 0.0:
        raise InvalidSpecError(f"B^2 - A^2 = {g2} <= 0: outside the solved branch")
    g = math.sqrt(g2)
    c = rf.c_at(v)
    psi0, psi1 = c, -0.5 * g * u + c
    lo, hi = min(psi0, psi1), max(psi0, psi1)
    # branch cut crossed iff a pole of tan lies in [lo, hi]
    k0 = math.floor((lo - math.pi / 2) / math.pi)
    if math.pi / 2 + k0 * math.pi + math.pi <= hi or \
            min(_pole_distance(psi0), _pole_distance(psi1)) < 1e-9:
        raise PoleError(f"tan branch crossing on the u-interval [0, {u}]")
    phi = rf.rho_at(v) + 2.0 * math.atan((-a + g * math.tan(psi1)) / b)
    s2d = math.sin(2.0 * theta) / (2.0 * rf.d_at(v))
    ell = rf.l_at(v)
    rho = rf.rho_at(v)
    f1 = s2d * math.sin(phi) + ell * math.cos(rho)
    f2 = -s2d * math.cos(phi) + ell * math.sin(rho)
    return f1, f2, phi


def _sigma(kappa, f1, f2):
    s = 1.0 + 0.25 * kappa * (f1 * f1 + f2 * f2)
    if s <= 0.0:
        raise DomainError(f"flow left the chart: sigma = {s}")
    return s


def _rhs_u_bcv(kappa, tau, theta, y):
    """u-flow of the state y = (F1, F2, F3, phi)."""
    f1, f2, f3, phi = y
    s, c = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    sig = _sigma(kappa, f1, f2)
    dphi = -0.5 * kappa * s * c * (f1 * sp - f2 * cp) - 2.0 * tau * c * c
    df1 = -s * c * cp * sig
    df2 = -s * c * sp * sig
    df3 = -s * (-tau * f2 * c * cp + tau * f1 * c * sp - s)
    return np.array([df1, df2, df3, dphi])


def _rhs_v_bcv(kappa, tau, theta, varphi, y, u, v):
    """v-flow of the state y = (F1, F2, F3, phi)."""
    f1, f2, f3, phi = y
    s = math.sin(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    sig = _sigma(kappa, f1, f2)
    lam, a, b = bcv_lambda_a_b(kappa, tau, theta, varphi, u, v)
    du = _rhs_u_bcv(kappa, tau, theta, y)
    df1 = a * du[0] + b * s * sp * sig
    df2 = a * du[1] - b * s * cp * sig
    df3 = a * du[2] - b * tau * s * (f2 * sp + f1 * cp)
    dphi = a * du[3] + b * (lam - 0.5 * kappa * s * (f1 * cp + f2 * sp))
    return np.array([df1, df2, df3, dphi])


class BCVIntegratedSurface:
    """Numerically integrated constant angle surface in a BCV space."""

    def __init__(self, kappa, tau, theta, varphi, u_nodes, v_nodes, states):
        self.params = AmbientParams(kappa, tau)
        self.theta = theta
        self.varphi = varphi
        self.u_nodes = np.asarray(u_nodes, float)
        self.v_nodes = np.asarray(v_nodes, float)
        self.states = np.asarray(states, float)   # (nu, nv, 4)
        self.points = self.states[:, :, :3]
        self.phi = self.states[:, :, 3]

    def tangent_u(self, i: int, j: int) -> np.ndarray:
        return _rhs_u_bcv(self.params.kappa, self.params.tau, self.theta,
                          self.states[i, j])[:3]

    def tangent_v(self, i: int, j: int) -> np.ndarray:
        return _rhs_v_bcv(self.params.kappa, self.params.tau, self.theta,
                          self.varphi, self.states[i, j],
                          self.u_nodes[i], self.v_nodes[j])[:3]

    def to_immersion(self) -> Immersion:
        """Spline immersion; first derivatives come from the flow equations
        evaluated on the spline-interpolated state."""
        from scipy.interpolate import RectBivariateSpline

        kx = min(5, len(self.u_nodes) - 1)
        ky = min(5, len(self.v_nodes) - 1)
        spl = [RectBivariateSpline(self.u_nodes, self.v_nodes,
                                   self.states[:, :, c], kx=kx, ky=ky)
               for c in range(4)]

        def state(u, v):
            return np.array([s(u, v)[0, 0] for s in spl])

        def pos(u, v):
            return state(u, v)[:3]

        k, t = self.params.kappa, self.params.tau

        def du(u, v):
            return _rhs_u_bcv(k, t, self.theta, state(u, v))[:3]

        def dv(u, v):
            return _rhs_v_bcv(k, t, self.theta, self.varphi, state(u, v), u, v)[:3]

        return Immersion(self.params, pos, du, dv, name="bcv_integrated")


def integrate_bcv_system(kappa: float, tau: float, theta: float,
                         varphi: Callable[[float], float], start,
                         u_nodes, v_nodes,
                         step: float = 1e-3) -> BCVIntegratedSurface:
    """RK4-integrate the eight flow equations as a u-flow along
    v = v_nodes[0] followed by a v-flow from every u-node.

    start = (F1, F2, F3, phi) at the corner (u_nodes[0], v_nodes[0])."""
    from .constant_angle import THETA_MAX, THETA_MIN
    from .errors import DegenerateAngleError, NonIntegrableError

    if theta > THETA_MAX:
        raise DegenerateAngleError(
            f"theta = {theta}: the parametrized flow degenerates at "
            "theta = pi/2; use hopf_cylinder")
    if theta < THETA_MIN:
        if tau != 0.0:
            raise NonIntegrableError(
                f"theta = {theta}: no surface is orthogonal to the vertical "
                "field when tau != 0")
        raise DegenerateAngleError(
            f"theta = {theta}: the u-flow has speed sin(theta) ~ 0")
    r = _r_of(kappa, tau, theta)
    u_nodes = np.asarray(u_nodes, float)
    v_nodes = np.asarray(v_nodes, float)
    for v in v_nodes:
        for u in u_nodes:
            if _pole_distance(varphi(v) - r * math.cos(theta) * u) < POLE_GRID_TOL:
                raise PoleError(
                    f"grid node (u, v) = ({u}, {v}) too close to a lambda pole")
    y0 = np.asarray(start, float)
    if y0.shape != (4,):
        raise InvalidSpecError("start must be (F1, F2, F3, phi)")
    _sigma(kappa, y0[0], y0[1])

    u_line = rk4_march(lambda u, y: _rhs_u_bcv(kappa, tau, theta, y),
                       y0, u_nodes, step)
    states = np.empty((len(u_nodes), len(v_nodes), 4))
    for i, u in enumerate(u_nodes):
        states[i] = rk4_march(
            lambda v, y: _rhs_v_bcv(kappa, tau, theta, varphi, y, u, v),
            u_line[i], v_nodes, step)
    return BCVIntegratedSurface(kappa, tau, theta, varphi, u_nodes, v_nodes,
                                states)


def lemma4_residuals(imm: Immersion, u_samples, v_samples,
                     h_field: float = 1e-4, h_lambda: float = 2e-2) -> dict:
    """Residual report for a candidate constant angle surface.

    Checks, over the sample points: constancy of theta, the shape-operator
    pattern (S11 = 0, S12 = -tau), K = (kappa - 4 tau^2) cos^2(theta), the
    Riccati equation for the measured lambda field, and the four entries of
    the surface connection table.  Returns a dict of maximal deviations."""
    params = imm.params
    k, t = params.kappa, params.tau
    thetas = []
    for u in u_samples:
        for v in v_samples:
            th, _, _, _ = angle_and_projections(imm, u, v)
            thetas.append(th)
    theta_bar = float(np.mean(thetas))
    c, s = math.cos(theta_bar), math.sin(theta_bar)
    k_target = (k - 4.0 * t * t) * c * c

    out = {
        "angle_deviation": float(np.max(np.abs(np.array(thetas) - theta_bar))),
        "s11": 0.0, "s12_plus_tau": 0.0, "s_asymmetry": 0.0,
        "k_deviation": 0.0, "lambda_pde": 0.0, "connection_table": 0.0,
    }

    degenerate = theta_bar < 1e-6 or theta_bar > math.pi / 2 - 1e-6
    for u in u_samples:
        for v in v_samples:
            out["k_deviation"] = max(
                out["k_deviation"],
                abs(gaussian_curvature_extrinsic(imm, u, v) - k_target))
            if degenerate:
                continue
            S, lam = shape_operator(imm, u, v)
            out["s11"] = max(out["s11"], abs(S[0, 0]))
            out["s12_plus_tau"] = max(out["s12_plus_tau"], abs(S[0, 1] + t))
            out["s_asymmetry"] = max(out["s_asymmetry"], abs(S[0, 1] - S[1, 0]))

            # measured-lambda Riccati equation, differentiated along T
            p, fu, fv = _tangents_frame(imm, u, v)
            th, T, JT, n = angle_and_projections(imm, u, v)
            coeffs, *_ = np.linalg.lstsq(np.column_stack([fu, fv]), T,
                                         rcond=None)
            al1, al2 = coeffs

            def lam_at(uu, vv):
                return shape_operator(imm, uu, vv)[1]

            dlam_u = central_diff4(lambda x: lam_at(x, v), u, h_lambda)
            dlam_v = central_diff4(lambda x: lam_at(u, x), v, h_lambda)
            t_lam = al1 * dlam_u + al2 * dlam_v
            lam0 = lam_at(u, v)
            out["lambda_pde"] = max(
                out["lambda_pde"],
                abs(t_lam + lam0 * lam0 * c + k * c * s * s + 4.0 * t ** 2 * c ** 3))

            # surface connection table in the {T, JT} frame
            def T_field(uu, vv):
                _, Tf, _, _ = angle_and_projections(imm, uu, vv)
                return Tf

            def JT_field(uu, vv):
                _, _, JTf, _ = angle_and_projections(imm, uu, vv)
                return JTf

            def nabla(direction_coeffs, field):
                cu = _covariant_along(imm, u, v, "u", field, h_field)
                cv = _covariant_along(imm, u, v, "v", field, h_field)
                w = direction_coeffs[0] * cu + direction_coeffs[1] * cv
                return w - (w @ n) * n

            beta, *_ = np.linalg.lstsq(np.column_stack([fu, fv]), JT,
                                       rcond=None)
            entries = [
                nabla(coeffs, T_field) + 2.0 * t * c * JT,
                nabla(beta, T_field) - lam0 * c * JT,
                nabla(coeffs, JT_field) - 2.0 * t * c * T,
                nabla(beta, JT_field) + lam0 * c * T,
            ]
            out["connection_table"] = max(
                out["connection_table"],
                max(float(np.linalg.norm(e)) for e in entries))
    out["theta_mean"] = theta_bar
    out["k_target"] = k_target
    return out
