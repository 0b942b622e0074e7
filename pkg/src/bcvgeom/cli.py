"""Command-line front end.

Subcommands:
  verify-ambient  cross-check the closed-form frame/connection/curvature
                  formulas against their finite-difference oracles
  generate        sample a surface family and export CSV or OBJ
  check           run angle / curvature / shape-pattern / compatibility
                  checks on a surface and write a report
  integrate       reconstruct a constant angle surface by integrating the
                  tangent distribution, check it, and export it

Exit codes: 0 all checks passed, 1 checks failed or invalid parameters,
2 usage error.  Identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import ambient, bcv, constant_angle as ca, surface as sf
from .ambient import AmbientParams
from .errors import BCVGeomError
from .export import format_float, read_csv_grid, write_csv, write_obj

FAMILIES = ("hopf_cylinder", "theorem1", "bcv_integrated", "grid_file")


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    """Named residual checks plus a provenance block."""

    entries: list = field(default_factory=list)  # (name, residual, tol, ok, n)
    provenance: dict = field(default_factory=dict)

    def add(self, name: str, residual: float, tol: float, samples: int) -> None:
        self.entries.append((name, float(residual), float(tol),
                             float(residual) < float(tol), int(samples)))

    @property
    def overall_pass(self) -> bool:
        return all(ok for _, _, _, ok, _ in self.entries)

    def to_text(self) -> str:
        lines = [f"{'check':30s} {'max residual':>14s} {'tolerance':>12s} "
                 f"{'samples':>8s} {'result':>7s}"]
        for name, res, tol, ok, n in self.entries:
            lines.append(f"{name:30s} {res:14.4e} {tol:12.2e} {n:8d} "
                         f"{'pass' if ok else 'FAIL':>7s}")
        lines.append(f"overall: {'pass' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines)

    def to_kv(self) -> str:
        lines = []
        for name, res, tol, ok, n in self.entries:
            lines.append(f"check.{name}.max_residual = {format_float(res)}")
            lines.append(f"check.{name}.tolerance = {format_float(tol)}")
            lines.append(f"check.{name}.pass = {'true' if ok else 'false'}")
            lines.append(f"check.{name}.samples = {n}")
        lines.append(f"overall_pass = {'true' if self.overall_pass else 'false'}")
        for key in sorted(self.provenance):
            lines.append(f"provenance.{key} = {self.provenance[key]}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_kv())


# ---------------------------------------------------------------------------
# surface definitions
# ---------------------------------------------------------------------------

@dataclass
class SurfaceDefinition:
    family: str
    options: dict
    u0: float
    u1: float
    v0: float
    v1: float
    nu: int
    nv: int


def parse_grid(text: str):
    try:
        a, b = text.lower().split("x")
        nu, nv = int(a), int(b)
    except ValueError as exc:
        raise ValueError(f"bad grid spec {text!r}, expected NxM") from exc
    if nu < 2 or nv < 2:
        raise ValueError("grid resolution must be at least 2x2")
    return nu, nv


def parse_domain(text: str):
    try:
        uspec, vspec = text.split(",")
        u0, u1 = (float(t) for t in uspec.split(":"))
        v0, v1 = (float(t) for t in vspec.split(":"))
    except ValueError as exc:
        raise ValueError(f"bad domain spec {text!r}, expected u0:u1,v0:v1") from exc
    return u0, u1, v0, v1


def parse_coeffs(text: str):
    return [float(t) for t in str(text).split(",")]


def load_definition(path) -> SurfaceDefinition:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise ValueError(f"cannot read surface definition file {path}")
    if "surface" not in cp:
        raise ValueError("definition file needs a [surface] section")
    opts = dict(cp["surface"])
    family = opts.pop("family", None)
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}, got {family!r}")
    dom = cp["domain"] if "domain" in cp else {}
    u0, u1 = (float(t) for t in dom.get("u", "0:1").split(":"))
    v0, v1 = (float(t) for t in dom.get("v", "0:1").split(":"))
    nu, nv = parse_grid(dom.get("grid", "20x20"))
    return SurfaceDefinition(family, opts, u0, u1, v0, v1, nu, nv)


@dataclass
class BuiltSurface:
    definition: SurfaceDefinition
    params: AmbientParams
    immersion: sf.Immersion
    u_nodes: np.ndarray
    v_nodes: np.ndarray
    points: np.ndarray
    kind: str              # "functional" | "integrated" | "grid"
    theta_target: float = None


def build_surface(defn: SurfaceDefinition) -> BuiltSurface:
    o = defn.options
    u_nodes = np.linspace(defn.u0, defn.u1, defn.nu)
    v_nodes = np.linspace(defn.v0, defn.v1, defn.nv)
    kappa = float(o.get("kappa", 0.0))
    tau = float(o.get("tau", 0.5))

    if defn.family == "theorem1":
        theta = float(o["theta"])
        if "f1_coeffs" in o or "f2_coeffs" in o:
            from numpy.polynomial import Polynomial
            spec = ca.ConstantAngleSpec(
                theta, tau,
                Polynomial(parse_coeffs(o.get("f1_coeffs", "0"))),
                Polynomial(parse_coeffs(o.get("f2_coeffs", "0"))),
                Polynomial(parse_coeffs(o.get("f3_coeffs", "0"))))
            spec.validate()
        else:
            spec = ca.ConstantAngleSpec.from_angles(
                theta, tau,
                c=float(o.get("c", 0.0)),
                varphi0=float(o.get("varphi0", 0.0)),
                f1_const=float(o.get("f1_const", 0.0)),
                f2_const=float(o.get("f2_const", 0.0)),
                f3_const=float(o.get("f3_const", 0.0)))
        imm = ca.theorem1_surface(spec)
        pts = _sample(imm, u_nodes, v_nodes)
        return BuiltSurface(defn, imm.params, imm, u_nodes, v_nodes, pts,
                            "functional", theta_target=theta)

    if defn.family == "hopf_cylinder":
        params = AmbientParams(kappa, tau)
        curve = o.get("curve", "circle")
        if curve == "circle":
            radius = float(o.get("radius", 1.0))
            imm = ca.hopf_cylinder(
                lambda s: (radius * math.cos(s), radius * math.sin(s)), params,
                lambda s: (-radius * math.sin(s), radius * math.cos(s)))
        elif curve == "line":
            imm = ca.hopf_cylinder(lambda s: (s, 0.0), params,
                                   lambda s: (1.0, 0.0))
        else:
            raise ValueError(f"unknown base curve {curve!r}")
        pts = _sample(imm, u_nodes, v_nodes)
        return BuiltSurface(defn, params, imm, u_nodes, v_nodes, pts,
                            "functional", theta_target=math.pi / 2)

    if defn.family == "bcv_integrated":
        theta = float(o["theta"])
        coeffs = parse_coeffs(o.get("varphi", "0"))
        if len(coeffs) > 3:
            raise ValueError("varphi polynomial degree must be <= 2")
        varphi = (lambda v, c=tuple(coeffs):
                  sum(ci * v ** i for i, ci in enumerate(c)))
        start = parse_coeffs(o.get("start", "0,0,0,0"))
        if len(start) != 4:
            raise ValueError("start must be F1,F2,F3,phi")
        surf = bcv.integrate_bcv_system(
            kappa, tau, theta, varphi, start, u_nodes, v_nodes,
            step=float(o.get("step", 1e-3)))
        built = BuiltSurface(defn, surf.params, surf.to_immersion(),
                             u_nodes, v_nodes, surf.points, "integrated",
                             theta_target=theta)
        built.integrated = surf
        return built

    # grid_file
    path = o["path"]
    gu, gv, pts = read_csv_grid(path)
    params = AmbientParams(kappa, tau)
    imm = sf.immersion_from_grid(params, gu, gv, pts)
    return BuiltSurface(defn, params, imm, gu, gv, pts, "grid")


def _sample(imm, u_nodes, v_nodes):
    pts = np.empty((len(u_nodes), len(v_nodes), 3))
    for i, u in enumerate(u_nodes):
        for j, v in enumerate(v_nodes):
            pts[i, j] = imm.point(u, v)
    return pts


def _interior_samples(nodes, count, margin_frac=0.12):
    a, b = nodes[0], nodes[-1]
    m = margin_frac * (b - a)
    return np.linspace(a + m, b - m, count)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_verify_ambient(args, parser) -> int:
    if args.samples <= 0:
        parser.error("--samples must be positive")
    params = AmbientParams(args.kappa, args.tau)
    rng = np.random.default_rng(args.seed)
    if params.kappa < 0:
        rmax = 0.9 * 2.0 / math.sqrt(-params.kappa)
    else:
        rmax = 2.0
    pts = np.empty((args.samples, 3))
    for n in range(args.samples):
        while True:
            p = rng.uniform(-rmax, rmax, size=3)
            if math.hypot(p[0], p[1]) < rmax:
                pts[n] = p
                break

    ortho = comm = conn = curv = 0.0
    for p in pts:
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
        curv = max(curv, np.abs(
            ambient.curvature_oracle(params, X, Y, Z, p)
            - ambient.curvature_tensor(params, X, Y, Z)).max())

    rep = CheckReport(provenance={
        "kappa": format_float(args.kappa), "tau": format_float(args.tau),
        "samples": args.samples, "seed": args.seed,
        "fd_step_first": format_float(1e-5),
        "fd_step_second": format_float(1e-3),
    })
    tol = args.tol
    rep.add("orthonormality", ortho, tol or 1e-12, args.samples)
    rep.add("commutator_oracle", comm, tol or 1e-6, args.samples)
    rep.add("connection_oracle", conn, tol or 1e-6, args.samples)
    rep.add("curvature_oracle", curv, tol or 1e-4, args.samples)
    if params.kappa != 0.0 and abs(params.kappa - 4 * params.tau ** 2) < 1e-14:
        secs = [ambient.sectional_curvature(params, *rng.normal(size=(2, 3)))
                for _ in range(args.samples)]
        dev = max(abs(s - params.kappa / 4.0) for s in secs)
        rep.add("constant_sectional_curvature", dev, tol or 1e-10, args.samples)
    print(rep.to_text())
    if args.report:
        rep.write(args.report)
    return 0 if rep.overall_pass else 1


def cmd_generate(args, parser) -> int:
    defn = load_definition(args.definition)
    built = build_surface(defn)
    if args.format == "csv":
        write_csv(args.out, built.u_nodes, built.v_nodes, built.points)
    else:
        write_obj(args.out, built.points)
    print(f"wrote {built.points.shape[0] * built.points.shape[1]} vertices "
          f"to {args.out} ({args.format})")
    return 0


def _run_surface_checks(built: BuiltSurface, tol_override=None) -> CheckReport:
    imm = built.immersion
    params = built.params
    k, t = params.kappa, params.tau
    loose = built.kind != "functional"

    def tol(default):
        return tol_override if tol_override else default

    rep = CheckReport(provenance={
        "family": built.definition.family,
        "kappa": format_float(k), "tau": format_float(t),
        "kind": built.kind, "fd_step_first": format_float(1e-5),
    })

    # angle constancy
    if built.kind == "integrated":
        surf = built.integrated
        thetas = []
        for i in range(len(built.u_nodes)):
            for j in range(len(built.v_nodes)):
                p = surf.points[i, j]
                fu = ambient.coord_to_frame(params, p, surf.tangent_u(i, j))
                fv = ambient.coord_to_frame(params, p, surf.tangent_v(i, j))
                n = np.cross(fu, fv)
                n /= np.linalg.norm(n)
                thetas.append(math.acos(abs(np.clip(n[2], -1, 1))))
        thetas = np.asarray(thetas)
        n_ang = len(thetas)
    else:
        us = _interior_samples(built.u_nodes, 12)
        vs = _interior_samples(built.v_nodes, 12)
        thetas = np.array([sf.angle_and_projections(imm, u, v)[0]
                           for u in us for v in vs])
        n_ang = len(thetas)
    theta_bar = float(np.mean(thetas))
    rep.provenance["theta_mean"] = format_float(theta_bar)
    rep.add("angle_constancy", np.abs(thetas - theta_bar).max(),
            tol(1e-5 if loose else 1e-6), n_ang)

    # curvature against the constant-angle target
    k_target = (k - 4.0 * t * t) * math.cos(theta_bar) ** 2
    rep.provenance["k_target"] = format_float(k_target)
    us = _interior_samples(built.u_nodes, 4)
    vs = _interior_samples(built.v_nodes, 3)
    kdev = max(abs(sf.gaussian_curvature_extrinsic(imm, u, v) - k_target)
               for u in us for v in vs)
    rep.add("gaussian_curvature", kdev, tol(1e-3 if loose else 1e-4),
            len(us) * len(vs))

    # shape operator pattern (skipped on the degenerate branches)
    if 1e-6 < theta_bar < math.pi / 2 - 1e-6:
        s11 = s12 = 0.0
        for u in us:
            for v in vs:
                S, _ = sf.shape_operator(imm, u, v)
                s11 = max(s11, abs(S[0, 0]))
                s12 = max(s12, abs(S[0, 1] + t))
        rep.add("shape_pattern_s11", s11, tol(1e-4 if loose else 1e-6),
                len(us) * len(vs))
        rep.add("shape_pattern_s12", s12, tol(1e-4 if loose else 1e-6),
                len(us) * len(vs))
    else:
        rep.provenance["shape_pattern"] = \
            "skipped: theta degenerate (orthonormal-basis branch)"

    # compatibility residuals
    res = {"gauss": 0.0, "codazzi": 0.0, "struct1": 0.0, "struct2": 0.0}
    for u in _interior_samples(built.u_nodes, 3):
        for v in _interior_samples(built.v_nodes, 2):
            r = sf.compatibility_residuals(imm, u, v)
            for key in res:
                res[key] = max(res[key], r[key])
    for key in ("gauss", "codazzi", "struct1", "struct2"):
        rep.add(f"compatibility_{key}", res[key], tol(1e-3), 6)
    return rep


def cmd_check(args, parser) -> int:
    defn = load_definition(args.definition)
    built = build_surface(defn)
    rep = _run_surface_checks(built, tol_override=args.tol)
    print(rep.to_text())
    if args.report:
        rep.write(args.report)
    return 0 if rep.overall_pass else 1


def cmd_integrate(args, parser) -> int:
    coeffs = parse_coeffs(args.varphi)
    if len(coeffs) > 3:
        parser.error("--varphi polynomial degree must be <= 2")
    start = parse_coeffs(args.start)
    if len(start) != 4:
        parser.error("--start must be F1,F2,F3,phi")
    nu, nv = parse_grid(args.grid)
    u0, u1, v0, v1 = parse_domain(args.domain)
    u_nodes = np.linspace(u0, u1, nu)
    v_nodes = np.linspace(v0, v1, nv)
    varphi = (lambda v, c=tuple(coeffs):
              sum(ci * v ** i for i, ci in enumerate(c)))

    surf = bcv.integrate_bcv_system(args.kappa, args.tau, args.theta, varphi,
                                    start, u_nodes, v_nodes, step=args.step)
    defn = SurfaceDefinition("bcv_integrated", {}, u0, u1, v0, v1, nu, nv)
    built = BuiltSurface(defn, surf.params, surf.to_immersion(),
                         u_nodes, v_nodes, surf.points, "integrated",
                         theta_target=args.theta)
    built.integrated = surf
    rep = _run_surface_checks(built, tol_override=args.tol)
    rep.provenance.update({
        "theta": format_float(args.theta), "varphi": args.varphi,
        "start": args.start, "rk4_step": format_float(args.step),
    })

    # kappa = 0: cross-check against the closed-form family when varphi
    # is constant
    if args.kappa == 0.0 and all(c == 0.0 for c in coeffs[1:]):
        pf = ca.ProofFields.constant(varphi0=coeffs[0],
                                     c=start[3] + 2 * args.tau
                                     * math.cos(args.theta) ** 2 * u0)
        nil = ca.integrate_distribution(args.theta, args.tau, pf, start[:3],
                                        u_nodes, v_nodes, step=args.step)
        dev = float(np.abs(nil.points - surf.points).max())
        rep.add("nil3_integrator_crosscheck", dev, args.tol or 1e-6,
                nu * nv)

    print(rep.to_text())
    if args.out:
        if args.format == "csv":
            write_csv(args.out, u_nodes, v_nodes, surf.points)
        else:
            write_obj(args.out, surf.points)
    if args.report:
        rep.write(args.report)
    return 0 if rep.overall_pass else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcvgeom",
        description="constant angle surfaces in BCV spaces: generation, "
                    "verification, export")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("verify-ambient",
                        help="check closed forms against FD oracles")
    pa.add_argument("--kappa", type=float, default=0.0)
    pa.add_argument("--tau", type=float, default=0.5)
    pa.add_argument("--samples", type=int, default=100)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--tol", type=float, default=None,
                    help="override all check tolerances")
    pa.add_argument("--report", default=None, help="write key=value report")
    pa.set_defaults(func=cmd_verify_ambient)

    pg = sub.add_parser("generate", help="sample a surface and export it")
    pg.add_argument("--def", dest="definition", required=True,
                    help="surface definition file")
    pg.add_argument("--out", required=True)
    pg.add_argument("--format", choices=("csv", "obj"), default="csv")
    pg.set_defaults(func=cmd_generate)

    pc = sub.add_parser("check", help="run surface checks")
    pc.add_argument("--def", dest="definition", required=True)
    pc.add_argument("--tol", type=float, default=None)
    pc.add_argument("--report", default=None)
    pc.set_defaults(func=cmd_check)

    pi = sub.add_parser("integrate",
                        help="integrate the constant-angle distribution")
    pi.add_argument("--kappa", type=float, default=0.0)
    pi.add_argument("--tau", type=float, default=0.5)
    pi.add_argument("--theta", type=float, required=True)
    pi.add_argument("--varphi", default="0",
                    help="comma-separated polynomial coefficients of varphi(v)")
    pi.add_argument("--start", default="0,0,0,0", help="F1,F2,F3,phi at corner")
    pi.add_argument("--grid", default="41x21")
    pi.add_argument("--domain", default="0:1,0:0.5")
    pi.add_argument("--step", type=float, default=1e-3)
    pi.add_argument("--tol", type=float, default=None)
    pi.add_argument("--out", default=None)
    pi.add_argument("--format", choices=("csv", "obj"), default="csv")
    pi.add_argument("--report", default=None)
    pi.set_defaults(func=cmd_integrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except BCVGeomError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
