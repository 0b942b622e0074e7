"""Ambient-space closed forms versus their finite-difference oracles."""

import math

import numpy as np
import pytest

from bcvgeom import ambient
from bcvgeom.ambient import AmbientParams
from bcvgeom.errors import DomainError, StencilError

NIL3 = AmbientParams(0.0, 0.5)

PARAM_GRID = [
    AmbientParams(k, t)
    for t in (0.0, 0.5, 1.0)
    for k in (0.0, 1.0, -1.0, 4.0 * t * t)
]


def random_points(params, rng, n):
    """Points inside the chart (and away from its boundary for kappa < 0)."""
    rmax = 0.9 * 2.0 / math.sqrt(-params.kappa) if params.kappa < 0 else 2.0
    pts = []
    while len(pts) < n:
        p = rng.uniform(-rmax, rmax, size=3)
        if math.hypot(p[0], p[1]) < rmax:
            pts.append(p)
    return pts


def test_conformal_factor():
    assert ambient.conformal_factor(NIL3, (3.0, -4.0, 7.0)) == 1.0
    assert ambient.conformal_factor(AmbientParams(4.0, 0.0), (1.0, 0.0, 0.0)) == 2.0
    with pytest.raises(DomainError):
        ambient.conformal_factor(AmbientParams(-4.0, 0.0), (1.0, 0.0, 5.0))


def test_metric_nil3_closed_form():
    # ds^2 = dx^2 + dy^2 + (dz + tau(y dx - x dy))^2 when kappa = 0
    x, y, tau = 0.7, -1.3, 0.5
    g = ambient.metric_at(NIL3, (x, y, 2.0))
    w = np.array([tau * y, -tau * x, 1.0])
    expected = np.diag([1.0, 1.0, 0.0]) + np.outer(w, w)
    assert np.allclose(g, expected, atol=1e-15)


def test_metric_is_symmetric_positive_definite():
    rng = np.random.default_rng(7)
    for params in PARAM_GRID:
        for p in random_points(params, rng, 5):
            g = ambient.metric_at(params, p)
            assert np.allclose(g, g.T)
            assert np.all(np.linalg.eigvalsh(g) > 0)


def test_frame_orthonormal_and_inverse():
    rng = np.random.default_rng(11)
    for params in PARAM_GRID:
        for p in random_points(params, rng, 5):
            g = ambient.metric_at(params, p)
            E = ambient.frame_matrix(params, p)
            assert np.abs(E.T @ g @ E - np.eye(3)).max() < 1e-12
            w = rng.normal(size=3)
            c = ambient.coord_to_frame(params, p, w)
            assert np.allclose(ambient.frame_to_coord(params, p, c), w)
            # frame components of e_i are the canonical basis vectors
            for i, e in enumerate(ambient.frame_at(params, p)):
                ci = ambient.coord_to_frame(params, p, e)
                assert np.abs(ci - np.eye(3)[i]).max() < 1e-12


@pytest.mark.parametrize("params", PARAM_GRID, ids=str)
def test_commutators_match_oracle(params):
    rng = np.random.default_rng(3)
    for p in random_points(params, rng, 10):
        for i in range(1, 4):
            for j in range(i, 4):
                closed = ambient.commutator_closed_form(params, i, j, p)
                oracle = ambient.commutator_oracle(params, i, j, p)
                assert np.abs(closed - oracle).max() < 1e-6


@pytest.mark.parametrize("params", PARAM_GRID, ids=str)
def test_connection_matches_oracle(params):
    rng = np.random.default_rng(5)
    for p in random_points(params, rng, 10):
        for i in range(1, 4):
            for j in range(1, 4):
                closed = ambient.connection_frame(params, i, j, p)
                oracle = ambient.connection_oracle(params, i, j, p)
                assert np.abs(closed - oracle).max() < 1e-6


def test_connection_metric_compatibility():
    # d<e_i, e_j> = 0, so <nabla_k e_i, e_j> must be antisymmetric in (i, j)
    rng = np.random.default_rng(9)
    for params in PARAM_GRID:
        for p in random_points(params, rng, 3):
            for k in range(1, 4):
                for i in range(1, 4):
                    for j in range(1, 4):
                        a = ambient.connection_frame(params, k, i, p)[j - 1]
                        b = ambient.connection_frame(params, k, j, p)[i - 1]
                        assert abs(a + b) < 1e-15


def test_connection_torsion_free():
    # nabla_i e_j - nabla_j e_i = [e_i, e_j]
    rng = np.random.default_rng(13)
    for params in PARAM_GRID:
        for p in random_points(params, rng, 3):
            for i in range(1, 4):
                for j in range(1, 4):
                    lhs = (ambient.connection_frame(params, i, j, p)
                           - ambient.connection_frame(params, j, i, p))
                    rhs = ambient.commutator_closed_form(params, i, j, p)
                    assert np.abs(lhs - rhs).max() < 1e-12


def test_connection_apply_linearity():
    rng = np.random.default_rng(17)
    p = (0.3, -0.8, 1.1)
    xi, w = rng.normal(size=(2, 3))
    out = ambient.connection_apply(NIL3, xi, w, p)
    ref = sum(xi[i] * w[j] * ambient.connection_frame(NIL3, i + 1, j + 1, p)
              for i in range(3) for j in range(3))
    assert np.allclose(out, ref)


@pytest.mark.parametrize("params", PARAM_GRID, ids=str)
def test_curvature_matches_oracle(params):
    rng = np.random.default_rng(19)
    for p in random_points(params, rng, 4):
        X, Y, Z = rng.normal(size=(3, 3))
        closed = ambient.curvature_tensor(params, X, Y, Z)
        oracle = ambient.curvature_oracle(params, X, Y, Z, p)
        assert np.abs(closed - oracle).max() < 1e-4


def test_curvature_known_components():
    e1, e2, e3 = np.eye(3)
    for params in PARAM_GRID:
        k, t = params.kappa, params.tau
        # vertical and horizontal plane curvatures
        r1212 = ambient.curvature_tensor(params, e1, e2, e2) @ e1
        r1313 = ambient.curvature_tensor(params, e1, e3, e3) @ e1
        assert abs(r1212 - (k - 3.0 * t * t)) < 1e-14
        assert abs(r1313 - t * t) < 1e-14


def test_sectional_curvature_constant_iff_round():
    rng = np.random.default_rng(23)
    round_params = AmbientParams(1.0, 0.5)   # kappa = 4 tau^2
    secs = [ambient.sectional_curvature(round_params, *rng.normal(size=(2, 3)))
            for _ in range(50)]
    assert max(abs(s - 0.25) for s in secs) < 1e-10

    secs = [ambient.sectional_curvature(NIL3, *rng.normal(size=(2, 3)))
            for _ in range(50)]
    assert max(secs) - min(secs) > 0.1


def test_hopf_projection():
    assert np.allclose(ambient.hopf_project((1.0, 2.0, 3.0)), (1.0, 2.0))


def test_oracle_stencil_margin_enforced():
    params = AmbientParams(-1.0, 0.5)
    near_boundary = (1.99999, 0.0, 0.0)   # chart radius is 2
    with pytest.raises((StencilError, DomainError)):
        ambient.connection_oracle(params, 1, 2, near_boundary)


def test_frame_index_validation():
    with pytest.raises(ValueError):
        ambient.connection_frame(NIL3, 0, 1, (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        ambient.commutator_closed_form(NIL3, 1, 4, (0.0, 0.0, 0.0))
