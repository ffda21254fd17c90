"""Sphere grids and finite-difference operators."""

import numpy as np
import pytest

from dscurv import build_grid, covariant_gradient, covariant_hessian


def test_s1_construction(s1_64):
    g = s1_64
    assert g.dim == 1 and g.node_count == 64
    assert np.allclose(np.diff(g.theta), 2 * np.pi / 64)
    assert np.all(g.sigma[..., 0, 0] == 1.0)
    assert np.all(g.christoffel == 0.0)


def test_s2_construction(s2_32x64):
    g = s2_32x64
    assert g.shape == (32, 64)
    # staggered rings: no node at the poles
    assert g.phi[0] > 0.0 and g.phi[-1] < np.pi
    assert np.allclose(g.sigma[..., 1, 1], np.sin(g.phi[:, None]) ** 2)
    assert np.allclose(g.sigma_inv[..., 1, 1] * g.sigma[..., 1, 1], 1.0)


def test_refine_halves_spacing(s2_32x64):
    fine = s2_32x64.refine()
    assert fine.shape == (64, 128)
    assert fine.h == pytest.approx(s2_32x64.h / 2, rel=1e-12)


def test_build_grid_validation():
    with pytest.raises(ValueError):
        build_grid(3, 16)
    with pytest.raises(ValueError):
        build_grid(1, 4)
    with pytest.raises(ValueError):
        build_grid(2, (16, 17))   # odd longitude count breaks pole closure
    with pytest.raises(ValueError):
        build_grid(2, 16)


def test_constant_field_derivatives_vanish(s1_64, s2_32x64):
    for g in (s1_64, s2_32x64):
        u = np.full(g.shape, 1.234)
        assert np.all(covariant_gradient(u, g) == 0.0)
        assert np.all(covariant_hessian(u, g) == 0.0)


def test_s1_cosine_derivatives(s1_64):
    g = s1_64
    u = np.cos(g.theta)
    du = covariant_gradient(u, g)
    hess = covariant_hessian(u, g)
    assert np.max(np.abs(du[:, 0] + np.sin(g.theta))) < 2e-3
    assert np.max(np.abs(hess[:, 0, 0] + np.cos(g.theta))) < 1e-3


def test_s2_zonal_gradient(s2_32x64):
    g = s2_32x64
    phi, _ = g.coords()
    du = covariant_gradient(np.cos(phi), g)
    assert np.max(np.abs(du[..., 0] + np.sin(phi))) < 2e-3
    assert np.max(np.abs(du[..., 1])) == 0.0


def test_hessian_symmetry_exact(s2_32x64, rng):
    u = rng.normal(size=s2_32x64.shape)
    hess = covariant_hessian(u, s2_32x64)
    assert np.array_equal(hess[..., 0, 1], hess[..., 1, 0])


def test_linearity(s2_16x32, rng):
    g = s2_16x32
    u, v = rng.normal(size=(2,) + g.shape)
    for op in (covariant_gradient, covariant_hessian):
        combo = op(2.5 * u - 1.5 * v, g)
        parts = 2.5 * op(u, g) - 1.5 * op(v, g)
        assert np.allclose(combo, parts, atol=1e-12)


def _ratio(coarse_err, fine_err):
    return coarse_err / fine_err


def test_s1_operator_convergence_order():
    errs = []
    for n in (64, 128):
        g = build_grid(1, n)
        u = np.cos(g.theta)
        e_grad = np.max(np.abs(covariant_gradient(u, g)[:, 0] + np.sin(g.theta)))
        e_hess = np.max(np.abs(covariant_hessian(u, g)[:, 0, 0] + np.cos(g.theta)))
        errs.append((e_grad, e_hess))
    for i in range(2):
        assert 3.4 <= _ratio(errs[0][i], errs[1][i]) <= 4.6


def test_s2_component_convergence_order(s2_32x64):
    # tesseral test field: all stencils including the pole closure active
    def errors(g):
        phi, theta = g.coords()
        f = np.sin(phi) * np.cos(phi) * np.cos(theta)
        dphi = (np.cos(phi) ** 2 - np.sin(phi) ** 2) * np.cos(theta)
        dtheta = -np.sin(phi) * np.cos(phi) * np.sin(theta)
        grad = covariant_gradient(f, g)
        hess = covariant_hessian(f, g)
        h_pp = -4 * np.sin(phi) * np.cos(phi) * np.cos(theta)
        h_pt = (-(np.cos(phi) ** 2 - np.sin(phi) ** 2) * np.sin(theta)
                - np.cos(phi) / np.sin(phi) * dtheta)
        h_tt = (-np.sin(phi) * np.cos(phi) * np.cos(theta)
                + np.sin(phi) * np.cos(phi) * dphi)
        return (np.max(np.abs(grad[..., 0] - dphi)),
                np.max(np.abs(grad[..., 1] - dtheta)),
                np.max(np.abs(hess[..., 0, 0] - h_pp)),
                np.max(np.abs(hess[..., 0, 1] - h_pt)),
                np.max(np.abs(hess[..., 1, 1] - h_tt)))

    coarse = errors(s2_32x64)
    fine = errors(s2_32x64.refine())
    for c, f in zip(coarse, fine):
        assert 3.4 <= _ratio(c, f) <= 4.6


def test_laplace_beltrami_eigenvalue_oracle(s2_32x64):
    # trace of the covariant Hessian of a zonal harmonic of degree l is
    # -l(l+1) times the harmonic; checked under refinement
    def lap_err(g, f_of_phi, l):
        phi, _ = g.coords()
        f = f_of_phi(phi)
        lap = np.einsum("...ij,...ij->...", g.sigma_inv, covariant_hessian(f, g))
        return np.max(np.abs(lap + l * (l + 1) * f))

    cases = [(np.cos, 1), (lambda p: 1.5 * np.cos(p) ** 2 - 0.5, 2)]
    for f, l in cases:
        coarse = lap_err(s2_32x64, f, l)
        fine = lap_err(s2_32x64.refine(), f, l)
        assert 3.4 <= _ratio(coarse, fine) <= 4.6
