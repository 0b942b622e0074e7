"""Constant angle surfaces in the Heisenberg group Nil3.

Two independent constructions of the classified surfaces are provided:

  * theorem1_surface -- the explicit closed-form parametrization
    (the ruled family; theta strictly between 0 and pi/2), together with
    hopf_cylinder for the theta = pi/2 family;
  * integrate_distribution -- RK4 integration of the tangent distribution
    spanned by T and a T + b JT, using only the frame expressions and the
    closed forms for lambda, a, b and the normal-angle function phi.

The closed proof fields are

    lambda(u, v) = 2 tau cos(theta) tan(varphi(v) - 2 tau cos^2(theta) u),
    a(u, v)      = sin(varphi(v) - 2 tau cos^2(theta) u) / cos(theta),
    b(u, v)      = cos(varphi(v) - 2 tau cos^2(theta) u),
    phi(u)       = -2 tau cos^2(theta) u + c,

in the (u, v) chart where d_u = T and d_v = a T + b JT.  The closed-form
parametrization uses the reparametrized coordinate
u_new = -2 tau cos^2(theta) u + c (which reverses u-orientation for
tau > 0); reconstruction tests compare the two constructions under this
change of variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from numpy.polynomial import Polynomial

from .ambient import AmbientParams
from .errors import (DegenerateAngleError, ImmersionError, InvalidSpecError,
                     NonIntegrableError, PoleError)
from .numerics import rk4_march
from .surface import Immersion, immersion_from_grid

__all__ = [
    "ConstantAngleSpec",
    "ProofFields",
    "check_theta",
    "hopf_cylinder",
    "theorem1_surface",
    "lambda_closed_form",
    "ab_closed_form",
    "phi_of_u",
    "integrate_distribution",
    "IntegratedSurface",
]

THETA_MIN = 1e-6         # below: rejected for tau != 0 (non-integrable)
THETA_MAX = math.pi / 2 - 1e-6   # above: belongs to the Hopf-cylinder family
POLE_GRID_TOL = 1e-3     # grid nodes must keep this distance from tan poles


def check_theta(theta: float, tau: float) -> None:
    """Validate the angle for the ruled (non-cylinder) Nil3 family."""
    if tau == 0.0:
        raise InvalidSpecError("the Nil3 constructions require tau != 0")
    if theta < THETA_MIN:
        raise NonIntegrableError(
            f"theta = {theta}: no constant angle surface with theta = 0 "
            "exists in Nil3 (horizontal distribution is non-integrable)")
    if theta > THETA_MAX:
        raise DegenerateAngleError(
            f"theta = {theta}: the theta = pi/2 family consists of Hopf "
            "cylinders; use hopf_cylinder")


def _pole_distance(arg: float) -> float:
    """Distance from arg to the nearest pole pi/2 + k pi of tan."""
    r = (arg - math.pi / 2) % math.pi
    return min(r, math.pi - r)


@dataclass(frozen=True)
class ConstantAngleSpec:
    """Data for a ruled constant angle surface in Nil3.

    f1, f2 are degree <= 1 polynomials in v with (f1')^2 + (f2')^2 =
    sin^2(theta); f3 has f3' = f1' f2 - f1 f2'.  Use from_angles to build
    the coefficients exactly rather than validating floats.
    """

    theta: float
    tau: float
    f1: Polynomial = field(default_factory=lambda: Polynomial([0.0]))
    f2: Polynomial = field(default_factory=lambda: Polynomial([0.0]))
    f3: Polynomial = field(default_factory=lambda: Polynomial([0.0]))

    @classmethod
    def from_angles(cls, theta: float, tau: float, c: float = 0.0,
                    varphi0: float = 0.0, f1_const: float = 0.0,
                    f2_const: float = 0.0, f3_const: float = 0.0):
        """Build a valid spec with f1' = sin(theta) sin(c - varphi0) and
        f2' = sin(theta) cos(c - varphi0), so the slope constraint holds
        exactly."""
        check_theta(theta, tau)
        q1 = math.sin(theta) * math.sin(c - varphi0)
        q2 = math.sin(theta) * math.cos(c - varphi0)
        f1 = Polynomial([f1_const, q1])
        f2 = Polynomial([f2_const, q2])
        # f3' = f1' f2 - f1 f2' = q1 f2_const - q2 f1_const (constant)
        f3 = Polynomial([f3_const, q1 * f2_const - q2 * f1_const])
        return cls(theta, tau, f1, f2, f3)

    def validate(self, tol: float = 1e-12) -> None:
        check_theta(self.theta, self.tau)
        d1, d2 = self.f1.deriv(), self.f2.deriv()
        if self.f1.degree() > 1 or self.f2.degree() > 1 or self.f3.degree() > 2:
            raise InvalidSpecError("f1, f2 must have degree <= 1, f3 degree <= 2")
        slope = float(d1.coef[-1]) ** 2 + float(d2.coef[-1]) ** 2 \
            if d1.degree() == 0 and d2.degree() == 0 else math.nan
        if not abs(slope - math.sin(self.theta) ** 2) <= tol:
            raise InvalidSpecError(
                f"(f1')^2 + (f2')^2 = {slope} != sin^2(theta) "
                f"= {math.sin(self.theta) ** 2}")
        resid = self.f3.deriv() - (d1 * self.f2 - self.f1 * d2)
        if np.max(np.abs(resid.coef)) > tol:
            raise InvalidSpecError("f3' != f1' f2 - f1 f2'")


def hopf_cylinder(curve: Callable, params: AmbientParams,
                  dcurve: Callable = None, fd_step: float = 1e-6) -> Immersion:
    """Immersion (s, t) -> (gamma1(s), gamma2(s), t) over a planar base
    curve; theta is identically pi/2."""
    def pos(s, t):
        x, y = curve(s)
        return np.array([float(x), float(y), float(t)])

    def du(s, t):
        if dcurve is not None:
            dx, dy = dcurve(s)
        else:
            xp, yp = curve(s + fd_step)
            xm, ym = curve(s - fd_step)
            dx = (xp - xm) / (2 * fd_step)
            dy = (yp - ym) / (2 * fd_step)
        if math.hypot(dx, dy) < 1e-12:
            raise ImmersionError(f"base curve is singular at s = {s}")
        return np.array([float(dx), float(dy), 0.0])

    def dv(s, t):
        return np.array([0.0, 0.0, 1.0])

    return Immersion(params, pos, du, dv, name="hopf_cylinder")


def theorem1_surface(spec: ConstantAngleSpec) -> Immersion:
    """Closed-form parametrization of the ruled constant angle family."""
    spec.validate()
    th, t = spec.theta, spec.tau
    tan_th = math.tan(th)
    f1, f2, f3 = spec.f1, spec.f2, spec.f3
    d1, d2, d3 = f1.deriv(), f2.deriv(), f3.deriv()

    def pos(u, v):
        su, cu = math.sin(u), math.cos(u)
        return np.array([
            tan_th / (2 * t) * su + f1(v),
            -tan_th / (2 * t) * cu + f2(v),
            -tan_th ** 2 / (4 * t) * u
            - 0.5 * tan_th * cu * f1(v) - 0.5 * tan_th * su * f2(v)
            - t * f3(v),
        ])

    def du(u, v):
        su, cu = math.sin(u), math.cos(u)
        return np.array([
            tan_th / (2 * t) * cu,
            tan_th / (2 * t) * su,
            -tan_th ** 2 / (4 * t)
            + 0.5 * tan_th * su * f1(v) - 0.5 * tan_th * cu * f2(v),
        ])

    def dv(u, v):
        su, cu = math.sin(u), math.cos(u)
        return np.array([
            d1(v),
            d2(v),
            -0.5 * tan_th * cu * d1(v) - 0.5 * tan_th * su * d2(v) - t * d3(v),
        ])

    imm = Immersion(AmbientParams(0.0, t), pos, du, dv, name="theorem1")
    imm.spec = spec
    return imm


@dataclass(frozen=True)
class ProofFields:
    """varphi(v) and the constant c fixing lambda, a, b and phi."""

    varphi: Callable[[float], float]
    c: float = 0.0

    @classmethod
    def constant(cls, varphi0: float = 0.0, c: float = 0.0):
        return cls(varphi=lambda v: varphi0, c=c)

    def phase(self, theta: float, tau: float, u: float, v: float) -> float:
        return self.varphi(v) - 2.0 * tau * math.cos(theta) ** 2 * u


def matched_fields(spec: ConstantAngleSpec, c: float = 0.0) -> ProofFields:
    """Proof fields whose distribution integrates to the given closed-form
    surface.

    Direct integration of d_v F yields slopes
    (f1', f2') = (sin(theta) sin(c - varphi0), -sin(theta) cos(c - varphi0)),
    so the varphi0 reproducing a spec's slopes is c - atan2(f1', -f2')
    (a pi shift relative to the naive reading; tan-periodicity makes it
    invisible in lambda)."""
    q1 = float(spec.f1.deriv()(0.0))
    q2 = float(spec.f2.deriv()(0.0))
    gamma = math.atan2(q1, -q2)
    return ProofFields.constant(varphi0=c - gamma, c=c)


def phi_of_u(pf: ProofFields, theta: float, tau: float, u: float) -> float:
    """Normal-angle function phi(u) = -2 tau cos^2(theta) u + c."""
    return -2.0 * tau * math.cos(theta) ** 2 * u + pf.c


def lambda_closed_form(pf: ProofFields, theta: float, tau: float,
                       u: float, v: float, pole_tol: float = 1e-6) -> float:
    """lambda = 2 tau cos(theta) tan(varphi(v) - 2 tau cos^2(theta) u)."""
    arg = pf.phase(theta, tau, u, v)
    if _pole_distance(arg) < pole_tol:
        raise PoleError(f"lambda pole near (u, v) = ({u}, {v}), arg = {arg}")
    return 2.0 * tau * math.cos(theta) * math.tan(arg)


def ab_closed_form(pf: ProofFields, theta: float, tau: float,
                   u: float, v: float):
    """One solution (a, b) of d_u a = -2 tau b cos(theta),
    d_u b = lambda b cos(theta)."""
    arg = pf.phase(theta, tau, u, v)
    return math.sin(arg) / math.cos(theta), math.cos(arg)


class IntegratedSurface:
    """Grid of ambient points obtained by integrating the tangent
    distribution, with exact tangent access from the flow equations."""

    def __init__(self, theta, tau, pf, u_nodes, v_nodes, points):
        self.theta = theta
        self.tau = tau
        self.pf = pf
        self.u_nodes = np.asarray(u_nodes, float)
        self.v_nodes = np.asarray(v_nodes, float)
        self.points = np.asarray(points, float)  # (nu, nv, 3)
        self.params = AmbientParams(0.0, tau)

    def tangent_u(self, F, u, v):
        return _rhs_u(self.theta, self.tau, self.pf, F, u)

    def tangent_v(self, F, u, v):
        return _rhs_v(self.theta, self.tau, self.pf, F, u, v)

    def to_immersion(self) -> Immersion:
        """Spline immersion through the grid; first derivatives come from
        the flow equations evaluated at the interpolated point."""
        base = immersion_from_grid(self.params, self.u_nodes, self.v_nodes,
                                   self.points, name="integrated")
        pos = base.point

        def du(u, v):
            return self.tangent_u(pos(u, v), u, v)

        def dv(u, v):
            return self.tangent_v(pos(u, v), u, v)

        return Immersion(self.params, pos, du, dv, name="integrated")


def _frame_coords(tau, F):
    """Nil3 coordinate frame at the point F = (F1, F2, F3)."""
    e1 = np.array([1.0, 0.0, -tau * F[1]])
    e2 = np.array([0.0, 1.0, tau * F[0]])
    e3 = np.array([0.0, 0.0, 1.0])
    return e1, e2, e3


def _rhs_u(theta, tau, pf, F, u):
    """d_u F = T in ambient coordinates."""
    s, c = math.sin(theta), math.cos(theta)
    phi = phi_of_u(pf, theta, tau, u)
    e1, e2, e3 = _frame_coords(tau, F)
    return -s * (c * math.cos(phi) * e1 + c * math.sin(phi) * e2 - s * e3)


def _rhs_v(theta, tau, pf, F, u, v):
    """d_v F = a T + b JT in ambient coordinates."""
    s, c = math.sin(theta), math.cos(theta)
    phi = phi_of_u(pf, theta, tau, u)
    a, b = ab_closed_form(pf, theta, tau, u, v)
    e1, e2, e3 = _frame_coords(tau, F)
    return s * ((-a * c * math.cos(phi) + b * math.sin(phi)) * e1
                - (a * c * math.sin(phi) + b * math.cos(phi)) * e2
                + a * s * e3)


def integrate_distribution(theta: float, tau: float, pf: ProofFields,
                           p0, u_nodes, v_nodes,
                           step: float = 1e-3) -> IntegratedSurface:
    """Reconstruct the surface by integrating d_u F = T and
    d_v F = a T + b JT with fixed-step RK4: first along u from the corner
    (u_nodes[0], v_nodes[0]), then along v from every u-node."""
    check_theta(theta, tau)
    u_nodes = np.asarray(u_nodes, float)
    v_nodes = np.asarray(v_nodes, float)
    for v in v_nodes:
        for u in u_nodes:
            if _pole_distance(pf.phase(theta, tau, u, v)) < POLE_GRID_TOL:
                raise PoleError(
                    f"grid node (u, v) = ({u}, {v}) too close to a pole of "
                    "the proof fields")

    u_line = rk4_march(lambda u, F: _rhs_u(theta, tau, pf, F, u),
                       np.asarray(p0, float), u_nodes, step)
    points = np.empty((len(u_nodes), len(v_nodes), 3))
    for i, u in enumerate(u_nodes):
        points[i] = rk4_march(lambda v, F: _rhs_v(theta, tau, pf, F, u, v),
                              u_line[i], v_nodes, step)
    return IntegratedSurface(theta, tau, pf, u_nodes, v_nodes, points)
