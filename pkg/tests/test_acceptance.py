"""Acceptance gate: the eight headline verification criteria.

Each check prints a `[criterion N] name ... pass|FAIL` line (run with
`pytest -s` to see them all) and then asserts.  Two checks in criterion 4
are expected to fail and are left red on purpose: the u-equation for phi
and the B^2 - A^2 identity do not hold for the freely chosen constants
D = 1, L = 1/2 -- substituting the closed forms into the phi-equation
forces D (1 + kappa L^2/4) - kappa sin^2(2 theta)/(16 D)
= 2 tau cos^2(theta), which D = 1 violates for kappa = 1, tau = 1/2,
theta = pi/3 (see the companion checks with the constrained root, which
pass).  Weakening the stated targets instead would hide that fact.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from bcvgeom import ambient, bcv
from bcvgeom import constant_angle as ca
from bcvgeom import surface as sf
from bcvgeom.ambient import AmbientParams
from bcvgeom.numerics import central_diff4

THETA3 = math.pi / 3


def report(criterion, name, value, tol, extra=""):
    ok = value < tol
    tag = "pass" if ok else "FAIL"
    line = f"[criterion {criterion}] {name}: max residual {value:.3e} " \
           f"(tol {tol:.0e}) {extra}-> {tag}"
    print(line)
    assert ok, line
    return ok


# ---------------------------------------------------------------------------
# criterion 1: ambient closed forms vs oracles
# ---------------------------------------------------------------------------

def test_criterion_1_ambient_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    ortho = comm = conn = curv = 0.0
    combos = []
    for tau in (0.0, 0.5, 1.0):
        for kappa in (0.0, 1.0, -1.0, 4.0 * tau * tau):
            combos.append((kappa, tau))
    for kappa, tau in combos:
        params = AmbientParams(kappa, tau)
        rmax = 0.9 * 2.0 / math.sqrt(-kappa) if kappa < 0 else 2.0
        n = 0
        while n < 100:
            p = rng.uniform(-rmax, rmax, size=3)
            if math.hypot(p[0], p[1]) >= rmax:
                continue
            n += 1
            g = ambient.metric_at(params, p)
            E = ambient.frame_matrix(params, p)
            ortho = max(ortho, np.abs(E.T @ g @ E - np.eye(3)).max())
            for i in range(1, 4):
                for j in range(i, 4):
                    comm = max(comm, np.abs(
                        ambient.commutator_oracle(params, i, j, p)
                        - ambient.commutator_closed_form(params, i, j, p)).max())
                    conn = max(conn, np.abs(
                        ambient.connection_oracle(params, i, j, p)
                        - ambient.connection_frame(params, i, j, p)).max())
            X, Y, Z = rng.normal(size=(3, 3))
            X, Y, Z = (w / np.linalg.norm(w) for w in (X, Y, Z))
            curv = max(curv, np.abs(
                ambient.curvature_oracle(params, X, Y, Z, p)
                - ambient.curvature_tensor(params, X, Y, Z)).max())
    elapsed = time.perf_counter() - t0
    report(1, "frame orthonormality", ortho, 1e-12)
    report(1, "commutator closed form vs FD oracle", comm, 1e-6)
    report(1, "connection closed form vs FD oracle", conn, 1e-6)
    report(1, "curvature closed form vs FD oracle", curv, 1e-4)
    report(1, "runtime (s)", elapsed, 10.0)


# ---------------------------------------------------------------------------
# criteria 2 and 3: curvature and shape pattern on the closed-form family
# ---------------------------------------------------------------------------

CONFIGS = [(theta, tau) for theta in (math.pi / 6, math.pi / 4, math.pi / 3)
           for tau in (0.5, 1.0)]


def closed_form_surface(theta, tau):
    spec = ca.ConstantAngleSpec.from_angles(theta, tau, c=0.2, varphi0=-0.1,
                                            f2_const=0.1)
    return ca.theorem1_surface(spec)


def test_criterion_2_constant_curvature():
    t0 = time.perf_counter()
    angle_dev = ki_dev = ke_dev = 0.0
    us = np.linspace(-1.0, 1.0, 50)
    vs = np.linspace(-0.5, 0.5, 50)
    for theta, tau in CONFIGS:
        imm = closed_form_surface(theta, tau)
        for u in us:
            for v in vs:
                got, _, _, _ = sf.angle_and_projections(imm, u, v)
                angle_dev = max(angle_dev, abs(got - theta))
        k_target = -4.0 * tau * tau * math.cos(theta) ** 2
        for u, v in [(-0.5, -0.2), (0.1, 0.3), (0.7, 0.0)]:
            ki_dev = max(ki_dev, abs(
                sf.gaussian_curvature_intrinsic(imm, u, v) - k_target))
            ke_dev = max(ke_dev, abs(
                sf.gaussian_curvature_extrinsic(imm, u, v) - k_target))
    elapsed = time.perf_counter() - t0
    report(2, "angle constancy over 50x50 grids", angle_dev, 1e-8)
    report(2, "intrinsic FD curvature vs -4 tau^2 cos^2 theta", ki_dev, 1e-3)
    report(2, "extrinsic curvature vs -4 tau^2 cos^2 theta", ke_dev, 1e-6)
    report(2, "runtime (s)", elapsed, 30.0)


def test_criterion_3_shape_operator_pattern():
    s11 = s12 = 0.0
    for theta, tau in CONFIGS:
        imm = closed_form_surface(theta, tau)
        for u, v in [(-0.5, -0.2), (0.1, 0.3), (0.7, 0.0)]:
            S, _ = sf.shape_operator(imm, u, v)
            s11 = max(s11, abs(S[0, 0]))
            s12 = max(s12, abs(S[0, 1] + tau))
    report(3, "|S11| in the {T, JT} basis", s11, 1e-6)
    report(3, "|S12 + tau| in the {T, JT} basis", s12, 1e-6)


# ---------------------------------------------------------------------------
# criterion 4: closed forms substituted into their ODE/PDE systems
# ---------------------------------------------------------------------------

def test_criterion_4_lambda_ab_phi_closed_forms():
    rng = np.random.default_rng(44)
    tau, theta = 0.5, 0.9
    pf = ca.ProofFields.constant(varphi0=0.15, c=0.05)
    c_th = math.cos(theta)
    lam_res = ab_res = phi_res = pde_res = 0.0
    for _ in range(100):
        u, v = rng.uniform(-0.35, 0.35, size=2)
        h = 1e-3
        lam = ca.lambda_closed_form(pf, theta, tau, u, v)
        dlam = central_diff4(
            lambda x: ca.lambda_closed_form(pf, theta, tau, x, v), u, h)
        lam_res = max(lam_res, abs(dlam + lam * lam * c_th
                                   + 4 * tau ** 2 * c_th ** 3))
        a, b = ca.ab_closed_form(pf, theta, tau, u, v)
        da = central_diff4(
            lambda x: ca.ab_closed_form(pf, theta, tau, x, v)[0], u, h)
        db = central_diff4(
            lambda x: ca.ab_closed_form(pf, theta, tau, x, v)[1], u, h)
        ab_res = max(ab_res, abs(da + 2 * tau * b * c_th),
                     abs(db - lam * b * c_th))
        dphi_u = central_diff4(lambda x: ca.phi_of_u(pf, theta, tau, x), u, h)
        phi_res = max(phi_res, abs(dphi_u + 2 * tau * c_th ** 2))
        # general-space version of the lambda equation at kappa = 1
        lam2, _, _ = bcv.bcv_lambda_a_b(1.0, tau, theta, lambda vv: 0.15, u, v)
        dlam2 = central_diff4(
            lambda x: bcv.bcv_lambda_a_b(1.0, tau, theta,
                                         lambda vv: 0.15, x, v)[0], u, h)
        pde_res = max(pde_res, abs(
            dlam2 + c_th * (lam2 ** 2 + math.sin(theta) ** 2
                            + 4 * tau ** 2 * c_th ** 2)))
    report(4, "lambda Riccati equation (kappa = 0)", lam_res, 1e-8)
    report(4, "(a, b) first-order system", ab_res, 1e-8)
    report(4, "phi linear system", phi_res, 1e-8)
    report(4, "lambda Riccati equation (kappa = 1)", pde_res, 1e-8)


def _remark_u_residuals(rf, kappa=1.0, tau=0.5, theta=THETA3, n=100):
    """Max FD residuals of the (F1, F2, phi) u-equations for the
    closed forms with the given constants."""
    rng = np.random.default_rng(45)
    r1 = r2 = rphi = 0.0
    for _ in range(n):
        u = rng.uniform(-0.4, 0.4)
        v = 0.0
        h = 1e-3

        def state(x):
            f1, f2, phi = bcv.remark_closed_form(rf, kappa, tau, theta, x, v)
            return np.array([f1, f2, phi])

        d_num = [central_diff4(lambda x: state(x)[i], u, h) for i in range(3)]
        f1, f2, phi = state(u)
        rhs = bcv._rhs_u_bcv(kappa, tau, theta, np.array([f1, f2, 0.0, phi]))
        r1 = max(r1, abs(d_num[0] - rhs[0]))
        r2 = max(r2, abs(d_num[1] - rhs[1]))
        rphi = max(rphi, abs(d_num[2] - rhs[3]))
    return r1, r2, rphi


def test_criterion_4_remark_f1_f2_equations():
    rf = bcv.RemarkFields(d=1.0, l=0.5)
    r1, r2, _ = _remark_u_residuals(rf)
    report(4, "F1 u-equation (D = 1, L = 1/2)", r1, 1e-6)
    report(4, "F2 u-equation (D = 1, L = 1/2)", r2, 1e-6)


def test_criterion_4_remark_phi_equation_literal_constants():
    """Expected red: the phi u-equation is not solved by the closed form
    with the free constants D = 1, L = 1/2 (the equation itself pins D)."""
    rf = bcv.RemarkFields(d=1.0, l=0.5)
    _, _, rphi = _remark_u_residuals(rf)
    report(4, "phi u-equation (D = 1, L = 1/2)", rphi, 1e-6,
           extra="[expected red: D = 1 violates the D-constraint] ")


def test_criterion_4_remark_identity_literal_constants():
    """Expected red: B^2 - A^2 = r^2 cos^2(theta) fails for free D, L;
    it is equivalent to the D-constraint."""
    rf = bcv.RemarkFields(d=1.0, l=0.5)
    resid = rf.identity_residual(1.0, 0.5, THETA3, 0.0)
    report(4, "B^2 - A^2 = r^2 cos^2 theta (D = 1, L = 1/2)", resid, 1e-12,
           extra="[expected red: identity holds only at the constrained D] ")


def test_criterion_4_remark_constrained_d_companions():
    """With D solving
    D (1 + kappa L^2/4) - kappa sin^2(2 theta)/(16 D) = 2 tau cos^2(theta)
    all three u-equations and the identity hold."""
    d = bcv.constrained_d(1.0, 0.5, THETA3, 0.5)
    rf = bcv.RemarkFields(d=d, l=0.5)
    r1, r2, rphi = _remark_u_residuals(rf)
    report(4, "F1 u-equation (constrained D)", r1, 1e-6)
    report(4, "F2 u-equation (constrained D)", r2, 1e-6)
    report(4, "phi u-equation (constrained D)", rphi, 1e-6)
    resid = rf.identity_residual(1.0, 0.5, THETA3, 0.0)
    report(4, "B^2 - A^2 = r^2 cos^2 theta (constrained D)", resid, 1e-12)


# ---------------------------------------------------------------------------
# criterion 5: reconstruction equivalence
# ---------------------------------------------------------------------------

def test_criterion_5_reconstruction_equivalence():
    t0 = time.perf_counter()
    tau, theta, c = 0.5, math.pi / 4, 0.0
    # the ruled-over-a-helix surface: f1 = f3 = 0, f2 = v / sqrt(2)
    spec = ca.ConstantAngleSpec.from_angles(theta, tau, c=c, varphi0=0.0)
    ref = ca.theorem1_surface(spec)
    pf = ca.matched_fields(spec, c=c)
    u_nodes = np.linspace(0.0, 1.2, 25)
    v_nodes = np.linspace(0.0, 0.6, 13)
    surf = ca.integrate_distribution(theta, tau, pf, ref.point(c, 0.0),
                                     u_nodes, v_nodes, step=1e-3)
    c2 = math.cos(theta) ** 2
    err = 0.0
    for i, u in enumerate(u_nodes):
        for j, v in enumerate(v_nodes):
            err = max(err, np.abs(surf.points[i, j]
                                  - ref.point(-2 * tau * c2 * u + c, v)).max())
    report(5, "pointwise match of integration vs closed form", err, 1e-6)

    imm = surf.to_immersion()
    angle_dev = 0.0
    for u in np.linspace(0.05, 1.15, 50):
        for v in np.linspace(0.05, 0.55, 50):
            got, _, _, _ = sf.angle_and_projections(imm, u, v)
            angle_dev = max(angle_dev, abs(got - theta))
    k_target = -4.0 * tau * tau * c2
    ki = ke = 0.0
    for u, v in [(0.3, 0.2), (0.6, 0.4), (0.9, 0.15)]:
        ki = max(ki, abs(sf.gaussian_curvature_intrinsic(imm, u, v) - k_target))
        ke = max(ke, abs(sf.gaussian_curvature_extrinsic(imm, u, v) - k_target))
    elapsed = time.perf_counter() - t0
    report(5, "angle constancy of the reconstructed surface", angle_dev, 1e-8)
    report(5, "intrinsic curvature of the reconstructed surface", ki, 1e-3)
    report(5, "extrinsic curvature of the reconstructed surface", ke, 1e-6)
    report(5, "runtime (s)", elapsed, 30.0)


# ---------------------------------------------------------------------------
# criterion 6: integration in general BCV spaces
# ---------------------------------------------------------------------------

def test_criterion_6_bcv_integration():
    u_nodes = np.linspace(0.0, 1.0, 31)
    v_nodes = np.linspace(0.0, 0.5, 16)
    for kappa, k_target in ((1.0, 0.0), (2.0, 0.25)):
        surf = bcv.integrate_bcv_system(kappa, 0.5, THETA3, lambda v: 0.0,
                                        (0.0, 0.0, 0.0, 0.0),
                                        u_nodes, v_nodes)
        angle_dev = 0.0
        for i in range(len(u_nodes)):
            for j in range(len(v_nodes)):
                p = surf.points[i, j]
                fu = ambient.coord_to_frame(surf.params, p, surf.tangent_u(i, j))
                fv = ambient.coord_to_frame(surf.params, p, surf.tangent_v(i, j))
                n = np.cross(fu, fv)
                n /= np.linalg.norm(n)
                angle_dev = max(angle_dev, abs(math.acos(abs(n[2])) - THETA3))
        imm = surf.to_immersion()
        k_dev = max(abs(sf.gaussian_curvature_extrinsic(imm, u, v) - k_target)
                    for u, v in [(0.25, 0.15), (0.5, 0.3), (0.8, 0.2)])
        report(6, f"angle constancy (kappa = {kappa:g})", angle_dev, 1e-5)
        report(6, f"K vs (kappa - 4 tau^2) cos^2 theta (kappa = {kappa:g})",
               k_dev, 1e-3)

    surf0 = bcv.integrate_bcv_system(0.0, 0.5, THETA3, lambda v: 0.0,
                                     (0.0, 0.0, 0.0, 0.0), u_nodes, v_nodes)
    pf = ca.ProofFields.constant(varphi0=0.0, c=0.0)
    nil = ca.integrate_distribution(THETA3, 0.5, pf, (0.0, 0.0, 0.0),
                                    u_nodes, v_nodes)
    dev = float(np.abs(surf0.points - nil.points).max())
    report(6, "kappa = 0 path vs dedicated integrator", dev, 1e-6)


# ---------------------------------------------------------------------------
# criterion 7: power of the compatibility oracle
# ---------------------------------------------------------------------------

def test_criterion_7_compatibility_oracle():
    imm = sf.Immersion(AmbientParams(0.0, 0.5),
                       lambda u, v: np.array([u, v, u * v]),
                       lambda u, v: np.array([1.0, 0.0, v]),
                       lambda u, v: np.array([0.0, 1.0, u]))
    worst = 0.0
    for u, v in [(0.2, 0.1), (-0.3, 0.4), (0.5, -0.5)]:
        res = sf.compatibility_residuals(imm, u, v)
        worst = max(worst, *res.values())
    report(7, "compatibility residuals on a genuine surface", worst, 1e-3)

    tilt = lambda u, v: np.array([0.05 * math.sin(3 * u), 0.0, 0.0])
    bad = sf.compatibility_residuals(imm, 0.2, 0.1, normal_tilt=tilt)
    detected = max(bad["gauss"], bad["codazzi"])
    print(f"[criterion 7] inconsistent data residual {detected:.3e} "
          "(must exceed 1e-3) -> " + ("pass" if detected > 1e-3 else "FAIL"))
    assert detected > 1e-3


# ---------------------------------------------------------------------------
# criterion 8: CLI determinism and exit codes
# ---------------------------------------------------------------------------

def test_criterion_8_cli_contract(tmp_path):
    cli = [sys.executable, "-m", "bcvgeom.cli"]
    d = tmp_path / "surf.ini"
    d.write_text("[surface]\nfamily = theorem1\ntau = 0.5\n"
                 f"theta = {THETA3!r}\nc = 0.3\n\n"
                 "[domain]\nu = 0:1.2\nv = 0:0.8\ngrid = 12x12\n")

    outs = []
    for tag in ("a", "b"):
        csv = tmp_path / f"{tag}.csv"
        rep = tmp_path / f"{tag}.kv"
        r1 = subprocess.run(cli + ["generate", "--def", str(d),
                                   "--out", str(csv)], capture_output=True)
        r2 = subprocess.run(cli + ["check", "--def", str(d),
                                   "--report", str(rep)], capture_output=True)
        assert r1.returncode == 0 and r2.returncode == 0
        outs.append((csv.read_bytes(), rep.read_bytes()))
    golden = outs[0] == outs[1]
    print(f"[criterion 8] golden-file equality across runs -> "
          + ("pass" if golden else "FAIL"))
    assert golden

    fail = subprocess.run(
        cli + ["integrate", "--kappa", "-4", "--tau", "0.5", "--theta", "1.5"],
        capture_output=True)
    usage = subprocess.run(cli + ["verify-ambient", "--samples", "0"],
                           capture_output=True)
    ok = subprocess.run(cli + ["verify-ambient", "--samples", "5"],
                        capture_output=True)
    codes = (ok.returncode, fail.returncode, usage.returncode)
    print(f"[criterion 8] exit codes (pass, failure, usage) = {codes} -> "
          + ("pass" if codes == (0, 1, 2) else "FAIL"))
    assert codes == (0, 1, 2)
