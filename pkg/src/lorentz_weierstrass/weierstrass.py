"""Timelike surfaces from Weierstrass data (q, f, r, g) and from spinors.

A minimal surface is phi(u, v) = X(u) + Y(v) with null tangents

    phi_u = (  (1 + q^2)/2, -(1 - q^2)/2, -q ) f(u)
    phi_v = ( -(1 + r^2)/2, -(1 - r^2)/2, -r ) g(v)

and induced metric (1 + q r)^2 f g du dv.  Grids are anchored so that
phi vanishes at the lower-left corner of the domain.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .algebra import inner3
from .errors import (
    DataError,
    EquatorSingularity,
    MissingDecomposition,
    NonPositiveFrameDet,
    NotNull,
    SignObstruction,
    ZeroDenominator,
)
from .expr import ZERO, as_expr
from .grid import NULL, Jet, SurfaceGrid
from .quadrature import cumulative_integral, richardson

DEGENERATE_TOL = 1e-10
NULL_TOL = 1e-9
DENOMINATOR_TOL = 1e-12


class Sampled:
    """Cubic-spline interpolant through sampled values of a one-variable function."""

    def __init__(self, t, values, variable, spline=None):
        self.t = np.asarray(t, dtype=float)
        self.variable = variable
        self.spline = spline if spline is not None else CubicSpline(self.t, np.asarray(values, float))

    def __call__(self, t):
        out = self.spline(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, var=None):
        if var is not None and var != self.variable:
            return ZERO
        return Sampled(self.t, None, self.variable, spline=self.spline.derivative())

    def __repr__(self):
        return f"Sampled({self.variable}, n={self.t.size})"


@dataclass(frozen=True)
class WeierstrassData:
    q: object
    f: object
    r: object
    g: object

    def __post_init__(self):
        for name, fn, var in (("q", self.q, "u"), ("f", self.f, "u"), ("r", self.r, "v"), ("g", self.g, "v")):
            have = getattr(fn, "variable", None)
            if have not in (None, var):
                raise DataError(f"{name} must depend on {var} only, found variable {have!r}")

    @classmethod
    def from_strings(cls, q, f, r, g):
        return cls(as_expr(q), as_expr(f), as_expr(r), as_expr(g))

    @cached_property
    def dq(self):
        return self.q.derivative("u")

    @cached_property
    def df(self):
        return self.f.derivative("u")

    @cached_property
    def dr(self):
        return self.r.derivative("v")

    @cached_property
    def dg(self):
        return self.g.derivative("v")

    def metric_factor(self, u, v):
        """(1 + q r)^2 f g, which equals 2 <phi_u, phi_v>."""
        q, f, r, g = self.q(u), self.f(u), self.r(v), self.g(v)
        return (1 + q * r) ** 2 * f * g

    def as_strings(self):
        return {k: str(getattr(self, k)) for k in "qfrg"}


def _ev(fn, t):
    return np.asarray(fn(t), dtype=float) * np.ones_like(np.asarray(t, dtype=float))


def xi(d, u):
    q, f = _ev(d.q, u), _ev(d.f, u)
    return np.stack([0.5 * (1 + q * q) * f, -0.5 * (1 - q * q) * f, -q * f], axis=-1)


def eta(d, v):
    r, g = _ev(d.r, v), _ev(d.g, v)
    return np.stack([-0.5 * (1 + r * r) * g, -0.5 * (1 - r * r) * g, -r * g], axis=-1)


def xi_prime(d, u):
    q, f, dq, df = _ev(d.q, u), _ev(d.f, u), _ev(d.dq, u), _ev(d.df, u)
    return np.stack(
        [q * dq * f + 0.5 * (1 + q * q) * df, q * dq * f - 0.5 * (1 - q * q) * df, -dq * f - q * df],
        axis=-1,
    )


def eta_prime(d, v):
    r, g, dr, dg = _ev(d.r, v), _ev(d.g, v), _ev(d.dr, v), _ev(d.dg, v)
    return np.stack(
        [-r * dr * g - 0.5 * (1 + r * r) * dg, r * dr * g - 0.5 * (1 - r * r) * dg, -dr * g - r * dg],
        axis=-1,
    )


def tangents(d, u, v):
    """Exact (phi_u, phi_v) of the minimal surface generated by ``d``."""
    return xi(d, u), eta(d, v)


class SplitSurface:
    """phi(u, v) = X(u) + sign * Y(v) with X, Y integrated from (u0, v0)."""

    def __init__(self, dx, dy, ddx, ddy, u0, v0, sign=1):
        self.dx, self.dy, self.ddx, self.ddy = dx, dy, ddx, ddy
        self.u0, self.v0, self.sign = float(u0), float(v0), sign

    def X(self, u):
        u = np.asarray(u, dtype=float)
        return cumulative_integral(self.dx, u.ravel(), self.u0).reshape(u.shape + (3,))

    def Y(self, v):
        v = np.asarray(v, dtype=float)
        return self.sign * cumulative_integral(self.dy, v.ravel(), self.v0).reshape(v.shape + (3,))

    def position(self, u, v):
        return self.X(u) + self.Y(v)

    def jet(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        s = self.sign
        return Jet(self.dx(u), s * self.dy(v), self.ddx(u), np.zeros(u.shape + (3,)), s * self.ddy(v))

    def conjugate(self):
        return SplitSurface(self.dx, self.dy, self.ddx, self.ddy, self.u0, self.v0, -self.sign)


def weierstrass_surface(d, u0=0.0, v0=0.0):
    return SplitSurface(
        lambda u: xi(d, u),
        lambda v: eta(d, v),
        lambda u: xi_prime(d, u),
        lambda v: eta_prime(d, v),
        u0,
        v0,
    )


def _lattice(domain, nu, nv):
    u0, u1, v0, v1 = (float(x) for x in domain)
    if nu < 2 or nv < 2:
        raise ValueError("nu and nv must be at least 2")
    if not all(np.isfinite([u0, u1, v0, v1])) or u1 <= u0 or v1 <= v0:
        raise ValueError(f"invalid domain {domain!r}")
    return np.linspace(u0, u1, nu), np.linspace(v0, v1, nv)


def integrate_surface(d, domain, nu=129, nv=129):
    """Sample X(u) + Y(v) on a uniform (u, v) lattice.

    Nodes where |(1 + q r)^2 f g| < 1e-10 are flagged as degenerate rather
    than rejected.
    """
    u, v = _lattice(domain, nu, nv)
    surface = weierstrass_surface(d, u[0], v[0])
    X, Y = surface.X(u), surface.Y(v)
    points = X[:, None, :] + Y[None, :, :]
    U, V = np.meshgrid(u, v, indexing="ij")
    flags = np.abs(d.metric_factor(U, V)) < DEGENERATE_TOL
    return SurfaceGrid(u, v, points, flags, NULL, surface, X, Y, meta={"source": "weierstrass", "data": d})


def conjugate(grid):
    """The conjugate minimal surface X(u) - Y(v), anchored at the corner."""
    if grid.X is None or grid.Y is None:
        raise MissingDecomposition("grid carries no X(u) + Y(v) split")
    X = grid.X - grid.X[0]
    Y = -(grid.Y - grid.Y[0])
    surface = grid.surface.conjugate() if hasattr(grid.surface, "conjugate") else None
    meta = dict(grid.meta, conjugated=not grid.meta.get("conjugated", False))
    return SurfaceGrid(grid.a, grid.b, X[:, None, :] + Y[None, :, :], grid.flags.copy(), grid.chart,
                       surface, X, Y, grid.orientation, meta)


# ---------------------------------------------------------------------------
# null curves and the converse construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullCurvePair:
    """Tangent curves xi(u) = X'(u) and eta(v) = Y'(v); both map arrays to (n, 3)."""

    xi: Callable
    eta: Callable


def extract_data(pair, u_range, v_range, samples=129):
    """Recover (q, f, r, g) from null tangents: f = xi_1 - xi_2, q = -xi_3/f, g = -(eta_1 + eta_2), r = -eta_3/g."""
    u = np.linspace(*u_range, samples)
    v = np.linspace(*v_range, samples)
    a = np.asarray(pair.xi(u), dtype=float)
    b = np.asarray(pair.eta(v), dtype=float)
    for name, vec in (("xi", a), ("eta", b)):
        worst = float(np.max(np.abs(inner3(vec, vec))))
        if worst > NULL_TOL:
            raise NotNull(f"{name} is not null: |<{name},{name}>| = {worst:.3e}")
    f = a[:, 0] - a[:, 1]
    g = -(b[:, 0] + b[:, 1])
    if np.min(np.abs(f)) < DENOMINATOR_TOL:
        raise ZeroDenominator("f vanishes at a sample")
    if np.min(np.abs(g)) < DENOMINATOR_TOL:
        raise ZeroDenominator("g vanishes at a sample")
    return WeierstrassData(
        Sampled(u, -a[:, 2] / f, "u"),
        Sampled(u, f, "u"),
        Sampled(v, -b[:, 2] / g, "v"),
        Sampled(v, g, "v"),
    )


# ---------------------------------------------------------------------------
# spinor representation
# ---------------------------------------------------------------------------


def _zero_field(u, v):
    return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)


@dataclass(frozen=True)
class SpinorField:
    """Components of the conformal frame [[s1, -t2], [t1, s2]] as fields of (u, v)."""

    s1: Callable
    t1: Callable
    s2: Callable
    t2: Callable
    p: Callable = field(default=_zero_field)

    def frame_det(self, u, v):
        return self.s1(u, v) * self.s2(u, v) + self.t1(u, v) * self.t2(u, v)

    def phi_u(self, u, v):
        s, t = self.s1(u, v), self.t1(u, v)
        return np.stack(np.broadcast_arrays(0.5 * (s * s + t * t), 0.5 * (s * s - t * t), -s * t), axis=-1)

    def phi_v(self, u, v):
        s, t = self.s2(u, v), self.t2(u, v)
        return np.stack(np.broadcast_arrays(-0.5 * (s * s + t * t), 0.5 * (s * s - t * t), -s * t), axis=-1)


def _along(fn, axis):
    def component(u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return _ev(fn, u if axis == 0 else v)

    return component


def _sqrt_of(fn):
    def root(t):
        values = _ev(fn, t)
        if np.any(values < 0):
            raise SignObstruction("square root of a negative f or g")
        return np.sqrt(values)

    return root


def spinors_from_data(d, domain=(-1.0, 1.0, -1.0, 1.0), samples=65):
    """(s1, t1, s2, t2) = (q sqrt f, sqrt f, r sqrt g, sqrt g) with zero potential.

    Refuses data whose f or g is not positive on ``domain``.
    """
    u = np.linspace(domain[0], domain[1], samples)
    v = np.linspace(domain[2], domain[3], samples)
    if np.any(_ev(d.f, u) <= 0):
        raise SignObstruction("f takes non-positive values; sqrt(f) is not real")
    if np.any(_ev(d.g, v) <= 0):
        raise SignObstruction("g takes non-positive values; sqrt(g) is not real")
    sf, sg = _sqrt_of(d.f), _sqrt_of(d.g)
    return SpinorField(
        _along(lambda t: _ev(d.q, t) * sf(t), 0),
        _along(sf, 0),
        _along(lambda t: _ev(d.r, t) * sg(t), 1),
        _along(sg, 1),
    )


class SpinorSurface:
    """Tangent closures of a spinor-built surface (no exact second derivatives)."""

    def __init__(self, spinors):
        self.spinors = spinors

    def jet(self, u, v):
        return Jet(self.spinors.phi_u(u, v), self.spinors.phi_v(u, v))


def surface_from_spinors(sp, domain, nu=129, nv=129):
    """Integrate d phi along the bottom row, then up every column."""
    u, v = _lattice(domain, nu, nv)
    U, V = np.meshgrid(u, v, indexing="ij")
    det = sp.frame_det(U, V)
    if np.any(det <= 0):
        raise NonPositiveFrameDet(f"min det = {float(np.min(det)):.3e}")
    row = cumulative_integral(lambda s: sp.phi_u(s, np.full_like(s, v[0])), u, u[0])
    cols = cumulative_integral(lambda s: sp.phi_v(u[None, :], s[:, None]), v, v[0])
    points = row[:, None, :] + np.transpose(cols, (1, 0, 2))
    flags = det**2 < DEGENERATE_TOL
    return SurfaceGrid(u, v, points, flags, NULL, SpinorSurface(sp), meta={"source": "spinors"})


def dirac_residual(sp, domain, n=33, h=1e-3):
    """Max residual of the two Dirac systems on an n x n lattice.

    Derivatives are Richardson-extrapolated central differences of the
    component closures.
    """
    u, v = _lattice(domain, n, n)
    U, V = np.meshgrid(u, v, indexing="ij")

    def du(fn):
        return richardson(lambda k: (fn(U + k, V) - fn(U - k, V)) / (2 * k), h)

    def dv(fn):
        return richardson(lambda k: (fn(U, V + k) - fn(U, V - k)) / (2 * k), h)

    s1, t1, s2, t2, p = (c(U, V) for c in (sp.s1, sp.t1, sp.s2, sp.t2, sp.p))
    residuals = (
        -du(sp.t2) - p * s1,
        -dv(sp.s1) + p * t2,
        du(sp.s2) - p * t1,
        -dv(sp.t1) - p * s2,
    )
    return float(max(np.max(np.abs(r)) for r in residuals))


# ---------------------------------------------------------------------------
# totally umbilic surfaces
# ---------------------------------------------------------------------------


class PseudosphereSurface:
    """phi = c - S(q(u), r(v)) / H with S the inverse stereographic projection."""

    def __init__(self, H, center, q, r):
        self.H = float(H)
        self.center = np.asarray(center, dtype=float)
        self.q, self.r = q, r
        self.dq, self.dr = q.derivative("u"), r.derivative("v")
        self.ddq, self.ddr = self.dq.derivative("u"), self.dr.derivative("v")

    def _qr(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return _ev(self.q, u), _ev(self.r, v), u, v

    def position(self, u, v):
        q, r, _, _ = self._qr(u, v)
        D = 1 + q * r
        S = np.stack([q - r, q + r, q * r - 1], axis=-1) / D[..., None]
        return self.center - S / self.H

    def jet(self, u, v):
        q, r, u, v = self._qr(u, v)
        dq, dr = _ev(self.dq, u), _ev(self.dr, v)
        ddq, ddr = _ev(self.ddq, u), _ev(self.ddr, v)
        D = (1 + q * r)[..., None]
        a = np.stack([1 + r * r, 1 - r * r, 2 * r], axis=-1)
        b = np.stack([-(1 + q * q), 1 - q * q, 2 * q], axis=-1)
        Sq, Sr = a / D**2, b / D**2
        Sqq = -2 * r[..., None] * a / D**3
        Srr = -2 * q[..., None] * b / D**3
        Sqr = np.stack([2 * r, -2 * r, 2 * np.ones_like(r)], axis=-1) / D**2 - 2 * q[..., None] * a / D**3
        k = -1.0 / self.H
        dq, dr, ddq, ddr = dq[..., None], dr[..., None], ddq[..., None], ddr[..., None]
        return Jet(
            k * Sq * dq,
            k * Sr * dr,
            k * (Sqq * dq**2 + Sq * ddq),
            k * Sqr * dq * dr,
            k * (Srr * dr**2 + Sr * ddr),
        )


def pseudosphere_surface(H, center, q, r, domain, nu=129, nv=129):
    """Totally umbilic piece of the pseudosphere of radius 1/|H| about ``center``.

    The grid's normal is oriented along S(q, r), the same convention under
    which Weierstrass grids have Gauss map S(q, r); with it the measured
    mean curvature equals ``H``.
    """
    if H == 0:
        raise ValueError("H must be non-zero")
    q, r = as_expr(q), as_expr(r)
    if q.variable not in (None, "u") or r.variable not in (None, "v"):
        raise DataError("q must depend on u and r on v")
    u, v = _lattice(domain, nu, nv)
    U, V = np.meshgrid(u, v, indexing="ij")
    D = 1 + _ev(q, U) * _ev(r, V)
    if np.any(np.abs(D) < DEGENERATE_TOL):
        raise EquatorSingularity("1 + q r vanishes on the domain")
    surface = PseudosphereSurface(H, center, q, r)
    jet = surface.jet(U, V)
    flags = np.abs(2 * inner3(jet.u, jet.v)) < DEGENERATE_TOL
    return SurfaceGrid(u, v, surface.position(U, V), flags, NULL, surface, orientation=-1,
                       meta={"source": "pseudosphere", "H": float(H)})
