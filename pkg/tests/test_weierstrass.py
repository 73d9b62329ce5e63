import numpy as np
import pytest

from lorentz_weierstrass import gallery
from lorentz_weierstrass.algebra import inner3
from lorentz_weierstrass.errors import (
    DataError,
    DomainError,
    EquatorSingularity,
    MissingDecomposition,
    NonPositiveFrameDet,
    NotNull,
    SignObstruction,
    ZeroDenominator,
)
from lorentz_weierstrass.expr import parse
from lorentz_weierstrass.quadrature import d11
from lorentz_weierstrass.weierstrass import (
    NullCurvePair,
    Sampled,
    SpinorField,
    WeierstrassData,
    conjugate,
    dirac_residual,
    extract_data,
    integrate_surface,
    pseudosphere_surface,
    spinors_from_data,
    surface_from_spinors,
    tangents,
)

ENNEPER = WeierstrassData.from_strings("u", "1", "v", "1")
PLANE = WeierstrassData.from_strings("0", "1", "0", "1")
CATENOID = gallery.get("catenoid_spacelike").data


def test_tangent_examples():
    phi_u, phi_v = tangents(ENNEPER, 2.0, 0.0)
    assert np.allclose(phi_u, [2.5, 1.5, -2.0])
    for u in (-1.0, 0.3, 2.0):
        phi_u, _ = tangents(CATENOID, u, 0.0)
        assert np.allclose(phi_u, [-np.cosh(u), -np.sinh(u), -1.0], atol=1e-14)
    phi_u, phi_v = tangents(PLANE, 0.7, -0.2)
    assert np.allclose(phi_u, [0.5, -0.5, 0.0])
    assert inner3(phi_u, phi_u) == 0 and inner3(phi_v, phi_v) == 0


def test_enneper_X_at_one():
    grid = integrate_surface(ENNEPER, (0.0, 1.0, 0.0, 1.0), 5, 5)
    assert np.allclose(grid.X[-1], [2 / 3, -1 / 3, -0.5], atol=1e-14)
    assert np.array_equal(grid.points[0, 0], [0.0, 0.0, 0.0])


def test_plane_is_linear():
    grid = integrate_surface(PLANE, (0.0, 1.0, 0.0, 1.0), 9, 9)
    U, V = grid.mesh()
    expected = np.stack([0.5 * (U - V), -0.5 * (U + V), 0 * U], axis=-1)
    assert np.max(np.abs(grid.points - expected)) < 1e-15


def test_catenoid_matches_closed_form():
    grid = integrate_surface(CATENOID, (-1.0, 1.0, -1.0, 1.0), 129, 129)
    U, V = grid.mesh()
    closed = np.stack([-np.sinh(U) + np.sinh(V), -np.cosh(U) + np.cosh(V), -U + V], axis=-1)
    closed -= closed[0, 0]
    assert np.max(np.abs(grid.points - closed)) < 1e-8


def test_degenerate_nodes_are_flagged_not_fatal():
    grid = integrate_surface(ENNEPER, (-2.0, 2.0, -2.0, 2.0), 5, 5)
    U, V = grid.mesh()
    assert np.array_equal(grid.flags, np.isclose(1 + U * V, 0))
    assert grid.flags.sum() == 2


def test_domain_error_propagates():
    with pytest.raises(DomainError):
        integrate_surface(WeierstrassData.from_strings("ln(u)", "1", "v", "1"), (-1.0, 1.0, 0.0, 1.0), 5, 5)


def test_bad_lattice_rejected():
    with pytest.raises(ValueError):
        integrate_surface(ENNEPER, (0.0, 1.0, 0.0, 1.0), 1, 5)
    with pytest.raises(ValueError):
        integrate_surface(ENNEPER, (1.0, 0.0, 0.0, 1.0), 5, 5)


def test_variable_check():
    with pytest.raises(DataError):
        WeierstrassData.from_strings("u", "1", "u", "1")
    with pytest.raises(DataError):
        WeierstrassData.from_strings("v", "1", "v", "1")


def test_mixed_derivative_vanishes():
    grid = integrate_surface(CATENOID, (-1.0, 1.0, -1.0, 1.0), 65, 65)
    assert np.max(np.abs(d11(grid.points, grid.ha, grid.hb))) < 1e-7


def test_conjugate_examples():
    grid = integrate_surface(CATENOID, (-1.0, 1.0, -1.0, 1.0), 33, 33)
    helicoid = conjugate(grid)
    U, V = grid.mesh()
    closed = np.stack([-np.sinh(U) - np.sinh(V), -np.cosh(U) - np.cosh(V), -U - V], axis=-1)
    assert np.max(np.abs(helicoid.points - (closed - closed[0, 0]))) < 1e-8
    assert np.array_equal(conjugate(helicoid).points, grid.points)
    plane = conjugate(integrate_surface(PLANE, (0.0, 1.0, 0.0, 1.0), 9, 9))
    U, V = plane.mesh()
    assert np.allclose(plane.points, np.stack([0.5 * (U + V), -0.5 * (U - V), 0 * U], axis=-1), atol=1e-15)


def test_conjugate_needs_split():
    grid = integrate_surface(PLANE, (0.0, 1.0, 0.0, 1.0), 5, 5)
    with pytest.raises(MissingDecomposition):
        conjugate(grid.with_points(grid.points))


def test_extract_catenoid_data():
    pair = NullCurvePair(
        lambda u: np.stack([-np.cosh(u), -np.sinh(u), -np.ones_like(u)], axis=-1),
        lambda v: np.stack([np.cosh(v), np.sinh(v), np.ones_like(v)], axis=-1),
    )
    d = extract_data(pair, (-1.0, 1.0), (-1.0, 1.0), 65)
    u = np.linspace(-1, 1, 65)
    assert np.allclose(d.f(u), -np.exp(-u), atol=1e-14)
    assert np.allclose(d.q(u), -np.exp(u), atol=1e-14)
    assert np.allclose(d.g(u), -np.exp(u), atol=1e-14)
    assert np.allclose(d.r(u), np.exp(-u), atol=1e-14)


def test_extract_enneper_data():
    pair = NullCurvePair(lambda u: tangents(ENNEPER, u, 0 * u)[0], lambda v: tangents(ENNEPER, 0 * v, v)[1])
    d = extract_data(pair, (-1.0, 1.0), (-1.0, 1.0), 33)
    t = np.linspace(-1, 1, 33)
    assert np.allclose(d.q(t), t, atol=1e-15) and np.allclose(d.f(t), 1, atol=1e-15)
    # sampled data feed back into the integrator
    grid = integrate_surface(d, (-0.5, 0.5, -0.5, 0.5), 17, 17)
    ref = integrate_surface(ENNEPER, (-0.5, 0.5, -0.5, 0.5), 17, 17)
    assert np.max(np.abs(grid.points - ref.points)) < 1e-12


def test_extract_errors():
    not_null = NullCurvePair(lambda u: np.stack([u, 0 * u, 0 * u], -1) + 1, lambda v: tangents(ENNEPER, 0 * v, v)[1])
    with pytest.raises(NotNull):
        extract_data(not_null, (0.0, 1.0), (0.0, 1.0), 5)
    vanishing = NullCurvePair(lambda u: np.stack([u, u, 0 * u], -1), lambda v: tangents(ENNEPER, 0 * v, v)[1])
    with pytest.raises(ZeroDenominator):
        extract_data(vanishing, (0.0, 1.0), (0.0, 1.0), 5)


def test_sampled_spline():
    t = np.linspace(0, 1, 65)
    s = Sampled(t, np.sin(t), "u")
    assert s(0.5) == pytest.approx(np.sin(0.5), abs=1e-7)
    assert s.derivative()(0.5) == pytest.approx(np.cos(0.5), abs=1e-5)
    assert s.derivative("v")(0.5) == 0


def _constant_spinors(s1, t1, s2, t2, p=0.0):
    const = lambda c: (lambda u, v: np.full(np.broadcast(u, v).shape, float(c)))
    return SpinorField(const(s1), const(t1), const(s2), const(t2), const(p))


def test_constant_spinors_give_plane():
    grid = surface_from_spinors(_constant_spinors(1, 0, 1, 0), (0.0, 1.0, 0.0, 1.0), 9, 9)
    U, V = grid.mesh()
    assert np.allclose(grid.points, np.stack([0.5 * (U - V), 0.5 * (U + V), 0 * U], axis=-1), atol=1e-15)
    jet = grid.jet()
    assert np.allclose(2 * inner3(jet.u, jet.v), 1.0)


def test_spinor_metric_matches_determinant():
    sp = spinors_from_data(ENNEPER)
    grid = surface_from_spinors(sp, (-0.8, 0.8, -0.8, 0.8), 33, 33)
    jet = grid.jet()
    U, V = grid.mesh()
    assert np.max(np.abs(2 * inner3(jet.u, jet.v) - sp.frame_det(U, V) ** 2)) < 1e-6
    assert np.max(np.abs(2 * inner3(jet.u, jet.v) - ENNEPER.metric_factor(U, V))) < 1e-6


def test_non_positive_frame_rejected():
    with pytest.raises(NonPositiveFrameDet):
        surface_from_spinors(_constant_spinors(-1, 0, 1, 0), (0.0, 1.0, 0.0, 1.0), 5, 5)


def test_spinors_from_data_examples():
    sp = spinors_from_data(ENNEPER)
    assert [c(0.3, -0.4) for c in (sp.s1, sp.t1, sp.s2, sp.t2)] == pytest.approx([0.3, 1.0, -0.4, 1.0])
    sp = spinors_from_data(PLANE)
    assert [c(0.3, -0.4) for c in (sp.s1, sp.t1, sp.s2, sp.t2)] == pytest.approx([0.0, 1.0, 0.0, 1.0])
    with pytest.raises(SignObstruction):
        spinors_from_data(CATENOID)


def test_dirac_residual_examples():
    domain = (0.0, 1.0, 0.0, 1.0)
    assert dirac_residual(_constant_spinors(1, 0, 1, 0), domain) == 0
    assert dirac_residual(spinors_from_data(ENNEPER), domain) <= 1e-8
    sp = spinors_from_data(ENNEPER)
    # a constant shift of t2 has zero derivative, so the residual stays zero
    shifted = SpinorField(sp.s1, sp.t1, sp.s2, lambda u, v: sp.t2(u, v) + 0.1)
    assert dirac_residual(shifted, domain) <= 1e-8
    tilted = SpinorField(sp.s1, sp.t1, sp.s2, lambda u, v: sp.t2(u, v) + 0.1 * u)
    assert dirac_residual(tilted, domain) >= 0.05
    # the potential enters each equation
    assert dirac_residual(_constant_spinors(1, 0, 1, 0, p=1.0), domain) == pytest.approx(1.0)


def test_pseudosphere_examples():
    grid = pseudosphere_surface(1.0, (0, 0, 0), "u", "v", (-0.5, 0.5, -0.5, 0.5), 17, 17)
    assert np.allclose(grid.points[8, 8], [0.0, 0.0, 1.0])
    assert np.max(np.abs(inner3(grid.points, grid.points) - 1)) < 1e-10
    c = np.array([1.0, -2.0, 0.5])
    grid = pseudosphere_surface(2.0, c, "u", "v", (-0.5, 0.5, -0.5, 0.5), 17, 17)
    assert np.max(np.abs(inner3(grid.points - c, grid.points - c) - 0.25)) < 1e-10


def test_pseudosphere_jets_match_differences():
    grid = pseudosphere_surface(1.5, (0, 0, 0), "sin(u)", "v^2+v", (-0.4, 0.4, -0.4, 0.4), 5, 5)
    s = grid.surface
    u, v, h = 0.13, -0.21, 1e-4
    jet = s.jet(u, v)
    p = lambda a, b: s.position(a, b)
    assert np.allclose(jet.u, (p(u + h, v) - p(u - h, v)) / (2 * h), atol=1e-7)
    assert np.allclose(jet.v, (p(u, v + h) - p(u, v - h)) / (2 * h), atol=1e-7)
    assert np.allclose(jet.uu, (p(u + h, v) - 2 * p(u, v) + p(u - h, v)) / h**2, atol=1e-5)
    assert np.allclose(jet.vv, (p(u, v + h) - 2 * p(u, v) + p(u, v - h)) / h**2, atol=1e-5)
    mixed = (p(u + h, v + h) - p(u + h, v - h) - p(u - h, v + h) + p(u - h, v - h)) / (4 * h * h)
    assert np.allclose(jet.uv, mixed, atol=1e-5)


def test_pseudosphere_errors():
    with pytest.raises(EquatorSingularity):
        pseudosphere_surface(1.0, (0, 0, 0), "u", "v", (-2.0, 2.0, -2.0, 2.0), 5, 5)
    with pytest.raises(ValueError):
        pseudosphere_surface(0.0, (0, 0, 0), "u", "v", (-0.5, 0.5, -0.5, 0.5), 5, 5)


def test_expression_data_accepts_parsed_trees():
    d = WeierstrassData(parse("u"), parse("1"), parse("v"), parse("1"))
    assert d.metric_factor(1.0, 1.0) == 4.0
