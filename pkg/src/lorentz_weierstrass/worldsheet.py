"""String worldsheets: Nambu-Goto action, field equations and d'Alembert evolution.

Worldsheet coordinates are (tau, sigma), related to the null chart by
u = tau + sigma, v = sigma - tau.  Grids in either chart are accepted;
the Jacobian between the two measures lives in :func:`grid.area_jacobian`.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .algebra import inner3
from .errors import ConstraintViolation, SignatureError
from .geometry import analyze
from .grid import NULL, WORLDSHEET, Jet, SurfaceGrid, area_jacobian, to_null, worldsheet_jet
from .quadrature import cumulative_integral, d1, d2, d11

log = logging.getLogger(__name__)

DEFAULT_TENSION = 1.0 / (2.0 * np.pi)
CONSTRAINT_TOL = 1e-8
SIGNATURE_TOL = 1e-12


def regge_slope(T):
    return 1.0 / (2.0 * np.pi * T)


def _integrate(values, grid):
    """Composite Simpson over the lattice, expressed in dtau dsigma."""
    return area_jacobian(grid.chart) * float(simpson(simpson(values, x=grid.b, axis=1), x=grid.a))


def induced_metric(grid):
    """(h_tautau, h_tausigma, h_sigmasigma) at every node."""
    tau, sigma, *_ = worldsheet_jet(grid.jet())
    return inner3(tau, tau), inner3(tau, sigma), inner3(sigma, sigma)


def _area_density(grid):
    htt, hts, hss = induced_metric(grid)
    minus_det = hts * hts - htt * hss
    ok = ~np.asarray(grid.flags, bool)
    scale = np.maximum(1.0, np.abs(hts * hts) + np.abs(htt * hss))
    bad = ok & (minus_det < -SIGNATURE_TOL * scale)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise SignatureError(f"induced metric is not Lorentzian at node ({i}, {j})")
    return np.sqrt(np.maximum(minus_det, 0.0))


def nambu_goto_action(grid, T=DEFAULT_TENSION):
    """S = -T * integral of sqrt(-det h) dtau dsigma (composite Simpson)."""
    return -T * _integrate(_area_density(grid), grid)


def conformal_area(grid):
    """Integral of e^omega dtau dsigma, the gauge-fixed area."""
    return _integrate(np.abs(2 * analyze(grid).half_metric), grid)


def _box(grid):
    """Finite-difference -phi_tautau + phi_sigmasigma at every node."""
    p = grid.points
    if grid.chart == NULL:
        return 4 * d11(p, grid.ha, grid.hb)
    return d2(p, grid.hb, 1) - d2(p, grid.ha, 0)


def wave_residual(grid):
    """Largest component of the finite-difference d'Alembertian over interior nodes.

    The Euclidean component norm is used: a null residual vector would have
    zero Minkowski length.
    """
    box = _box(grid)[1:-1, 1:-1]
    keep = ~np.asarray(grid.flags, bool)[1:-1, 1:-1]
    return float(np.max(np.abs(box[keep]))) if np.any(keep) else 0.0


def momenta(grid, T=DEFAULT_TENSION):
    """Canonical momenta (P^tau, P^sigma) of the Nambu-Goto Lagrangian."""
    tau, sigma, *_ = worldsheet_jet(grid.jet())
    density = _area_density(grid)
    tt, ts, ss = inner3(tau, tau), inner3(tau, sigma), inner3(sigma, sigma)
    with np.errstate(invalid="ignore", divide="ignore"):
        k = (-T / density)[..., None]
        p_tau = k * (ts[..., None] * sigma - ss[..., None] * tau)
        p_sigma = k * (ts[..., None] * tau - tt[..., None] * sigma)
    return p_tau, p_sigma


def euler_lagrange_residual(grid, T=DEFAULT_TENSION):
    """Max over interior nodes of |d_tau P^tau + d_sigma P^sigma|."""
    p_tau, p_sigma = momenta(grid, T)
    if grid.chart == NULL:
        du = lambda f: d1(f, grid.ha, 0)
        dv = lambda f: d1(f, grid.hb, 1)
        div = du(p_tau) - dv(p_tau) + du(p_sigma) + dv(p_sigma)
    else:
        div = d1(p_tau, grid.ha, 0) + d1(p_sigma, grid.hb, 1)
    flags = np.asarray(grid.flags, bool)
    # a flagged node spoils the stencils of its neighbours as well
    near = flags.copy()
    near[1:] |= flags[:-1]
    near[:-1] |= flags[1:]
    near[:, 1:] |= flags[:, :-1]
    near[:, :-1] |= flags[:, 1:]
    inner = div[1:-1, 1:-1][~near[1:-1, 1:-1]]
    inner = inner[np.all(np.isfinite(inner), axis=-1)]
    return float(np.max(np.abs(inner))) if inner.size else 0.0


def einstein_hilbert_interior(grid, alpha_prime=1.0):
    """(1 / (2 pi alpha')) * integral of K dA over the patch; no boundary term."""
    a = analyze(grid)
    skipped = int(np.count_nonzero(~a.valid))
    if skipped:
        log.warning("einstein_hilbert_interior: skipped %d degenerate nodes", skipped)
    density = np.where(a.valid, a.K * np.abs(2 * a.half_metric), 0.0)
    return _integrate(density, grid) / (2 * np.pi * alpha_prime)


def sample_worldsheet(surface, tau_range, sigma_range, n_tau=129, n_sigma=129, flags_tol=1e-10):
    """Sample a surface closure on a (tau, sigma) lattice.

    ``surface`` must expose ``position(u, v)`` and ``jet(u, v)`` in null
    coordinates.
    """
    tau = np.linspace(*tau_range, n_tau)
    sigma = np.linspace(*sigma_range, n_sigma)
    T, S = np.meshgrid(tau, sigma, indexing="ij")
    U, V = to_null(WORLDSHEET, T, S)
    points = surface.position(U, V)
    jet = surface.jet(U, V)
    flags = np.abs(2 * inner3(jet.u, jet.v)) < flags_tol
    return SurfaceGrid(tau, sigma, points, flags, WORLDSHEET, surface, meta={"source": "worldsheet"})


@dataclass(frozen=True)
class StringState:
    """Initial data of a string at tau = 0.

    ``position``, ``tangent`` (d/dsigma of position) and ``velocity``
    (d/dtau) map an array of sigma values to an (n, 3) array.  ``support``
    is the sigma interval on which they are trustworthy, if limited.
    """

    position: Callable
    tangent: Callable
    velocity: Callable
    sigma_range: tuple
    T: float = DEFAULT_TENSION
    support: Optional[tuple] = None

    @property
    def alpha_prime(self):
        return regge_slope(self.T)

    @classmethod
    def from_samples(cls, sigma, position, velocity, T=DEFAULT_TENSION, sigma_range=None):
        """Spline-interpolated state; the tangent is the spline's derivative."""
        sigma = np.asarray(sigma, float)
        pos = CubicSpline(sigma, np.asarray(position, float), axis=0)
        vel = CubicSpline(sigma, np.asarray(velocity, float), axis=0)
        span = (float(sigma[0]), float(sigma[-1]))
        return cls(pos, pos.derivative(), vel, sigma_range or span, T, span)

    def constraint_defects(self, sigma):
        """(|<phi_tau, phi_sigma>|, |<phi_tau, phi_tau> + <phi_sigma, phi_sigma>|) at ``sigma``."""
        t, s = self.velocity(sigma), self.tangent(sigma)
        return np.abs(inner3(t, s)), np.abs(inner3(t, t) + inner3(s, s))

    def check(self, sigma, tol=CONSTRAINT_TOL):
        cross, balance = self.constraint_defects(sigma)
        worst = max(float(np.max(cross)), float(np.max(balance)))
        if worst > tol:
            raise ConstraintViolation(f"conformal-gauge constraints violated by {worst:.3e}")


class EvolvedSurface:
    """phi = X(u) + Y(v) with the null tangents supplied by an initial state."""

    def __init__(self, state, sigma0):
        self.state, self.sigma0 = state, float(sigma0)
        self.start = np.asarray(state.position(np.array([self.sigma0])), float)[0]

    def right(self, s):
        return 0.5 * (self.state.tangent(s) + self.state.velocity(s))

    def left(self, s):
        return 0.5 * (self.state.tangent(s) - self.state.velocity(s))

    def _line(self, fn, t):
        t = np.asarray(t, float)
        return cumulative_integral(fn, t.ravel(), self.sigma0).reshape(t.shape + (3,))

    def position(self, u, v):
        return self.start + self._line(self.right, u) + self._line(self.left, v)

    def jet(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        shape = u.shape + (3,)
        return Jet(self.right(u.ravel()).reshape(shape), self.left(v.ravel()).reshape(shape))


def dalembert_evolve(state, tau_max, n_tau=129, n_sigma=None, samples=257):
    """Evolve initial data by the d'Alembert split X(sigma + tau) + Y(sigma - tau).

    With ``n_sigma`` omitted the sigma spacing is matched to the tau spacing
    as closely as the interval lengths allow; equal spacings make the
    discrete wave operator annihilate the sheet up to rounding.
    """
    s0, s1 = (float(x) for x in state.sigma_range)
    if tau_max <= 0 or s1 <= s0:
        raise ValueError("need tau_max > 0 and a non-empty sigma range")
    if state.support is not None:
        lo, hi = state.support
        if s0 - tau_max < lo - 1e-12 or s1 + tau_max > hi + 1e-12:
            raise ValueError("initial data do not cover the domain of dependence")
    state.check(np.linspace(s0 - tau_max, s1 + tau_max, samples))
    if n_sigma is None:
        n_sigma = max(2, int(round((s1 - s0) / (tau_max / (n_tau - 1)))) + 1)
    surface = EvolvedSurface(state, s0)
    grid = sample_worldsheet(surface, (0.0, float(tau_max)), (s0, s1), n_tau, n_sigma)
    return SurfaceGrid(grid.a, grid.b, grid.points, grid.flags, WORLDSHEET, surface,
                       meta={"source": "evolution", "T": state.T})


def null_tangent_defect(grid):
    """Largest |<phi_u, phi_u>| or |<phi_v, phi_v>| over the grid."""
    jet = grid.jet()
    return float(max(np.max(np.abs(inner3(jet.u, jet.u))), np.max(np.abs(inner3(jet.v, jet.v)))))


def slice_state(surface, sigma_range, T=DEFAULT_TENSION):
    """Initial data read off a null-chart surface closure along tau = 0 (u = v = sigma)."""

    def position(s):
        s = np.asarray(s, float)
        return surface.position(s, s)

    def tangent(s):
        jet = surface.jet(s, s)
        return jet.u + jet.v

    def velocity(s):
        jet = surface.jet(s, s)
        return jet.u - jet.v

    return StringState(position, tangent, velocity, tuple(sigma_range), T)
