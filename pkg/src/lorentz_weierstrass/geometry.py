"""Curvature analysis of sampled timelike surfaces.

All quantities are measured from the null-coordinate jet of a grid.  The
unit normal is ``lorentz_cross(phi_x, phi_y)`` normalised and multiplied by
``sign(<phi_u, phi_v>)`` and the grid's ``orientation``; with this choice a
Weierstrass surface and its conjugate share the Gauss map, and the Gauss
map of Weierstrass data is the inverse stereographic image of (q, r).

Writing F = <phi_u, phi_v> (so e^omega = |2F|):

    H = <phi_uv, N> / F,   Q = <phi_uu, N>,   R = <phi_vv, N>,
    K = H^2 - Q R / F^2.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .algebra import inner3, lorentz_cross, matrix_to_im
from .errors import (
    CurvatureMismatch,
    DegenerateMetric,
    EquatorSingularity,
    NorthPole,
    NotOnSphere,
    StepRejected,
    ZeroDenominator,
)
from .grid import NULL, worldsheet_jet
from .quadrature import d1, d2, d11, richardson

DEGENERATE_TOL = 1e-10
POLE_TOL = 1e-10
SPHERE_TOL = 1e-6
MEAN_CURVATURE_AGREEMENT = 1e-5
RK4_TOL = 1e-6
# nodes with |2<phi_u, phi_v>| below this are too close to a metric zero
# for finite differences of omega, H, Q, R to be meaningful
GC_CONDITIONING = 1e-2


class FundamentalForms(NamedTuple):
    E: float
    F: float
    G: float
    l: float
    m: float
    n: float
    omega: float


class HopfPair(NamedTuple):
    Q: float
    R: float


@dataclass(frozen=True)
class Analysis:
    """Per-node fields of a grid; entries at invalid nodes are NaN."""

    valid: np.ndarray
    half_metric: np.ndarray
    omega: np.ndarray
    normal: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    H: np.ndarray
    H_classic: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    K: np.ndarray


def _fields(jet, orientation, valid=None):
    """omega, N, H, Q, R, K and F = <phi_u, phi_v> from an exact jet."""
    F = inner3(jet.u, jet.v)
    ok = np.abs(2 * F) > DEGENERATE_TOL
    if valid is not None:
        ok = ok & valid
    phi_x, phi_y = jet.u - jet.v, jet.u + jet.v
    cross = lorentz_cross(phi_x, phi_y)
    with np.errstate(invalid="ignore", divide="ignore"):
        norm = np.sqrt(inner3(cross, cross))
        scale = np.where(ok, orientation * np.sign(F) / norm, np.nan)
        N = cross * scale[..., None]
        Q = inner3(jet.uu, N)
        R = inner3(jet.vv, N)
        H = inner3(jet.uv, N) / F
        K = H * H - Q * R / (F * F)
        omega = np.where(ok, np.log(np.abs(2 * F)), np.nan)
    return ok, F, omega, N, H, Q, R, K


def analyze(grid):
    """Measure every field on the whole lattice (cached on the grid)."""
    if "analysis" in grid._cache:
        return grid._cache["analysis"]
    jet = grid.jet()
    ok, Fuv, omega, N, H, Q, R, K = _fields(jet, grid.orientation, ~np.asarray(grid.flags, bool))
    phi_x, phi_y, xx, xy, yy = worldsheet_jet(jet)
    E, F, G = inner3(phi_x, phi_x), inner3(phi_x, phi_y), inner3(phi_y, phi_y)
    with np.errstate(invalid="ignore", divide="ignore"):
        l, m, n = inner3(xx, N), inner3(xy, N), inner3(yy, N)
        H_classic = (G * l + E * n - 2 * F * m) / (2 * (E * G - F * F))
    result = Analysis(ok, Fuv, omega, N, E, F, G, l, m, n, H, H_classic, Q, R, K)
    grid._cache["analysis"] = result
    return result


def fields_at(surface, u, v, orientation=1):
    """omega, H, Q, R, K and validity at arbitrary null coordinates of a closure."""
    ok, F, omega, _, H, Q, R, K = _fields(surface.jet(u, v), orientation)
    return {"valid": ok, "omega": omega, "H": H, "K": K, "Q": Q, "R": R}


def _at(grid, i, j):
    a = analyze(grid)
    if not a.valid[i, j]:
        raise DegenerateMetric(f"node ({i}, {j}) has a degenerate metric")
    return a


def fundamental_forms(grid, i, j):
    a = _at(grid, i, j)
    return FundamentalForms(*(float(getattr(a, k)[i, j]) for k in ("E", "F", "G", "l", "m", "n", "omega")))


def unit_normal(grid, i, j):
    return _at(grid, i, j).normal[i, j].copy()


def mean_curvature(grid, i, j, check=True):
    """Mean curvature from the conformal formula, cross-checked against the classical one."""
    a = _at(grid, i, j)
    H, Hc = float(a.H[i, j]), float(a.H_classic[i, j])
    if check and abs(H - Hc) > MEAN_CURVATURE_AGREEMENT * max(1.0, abs(H)):
        raise CurvatureMismatch(f"conformal H = {H!r}, classical H = {Hc!r}")
    return H


def mean_curvature_classic(grid, i, j):
    return float(_at(grid, i, j).H_classic[i, j])


def hopf_differential(grid, i, j):
    a = _at(grid, i, j)
    return HopfPair(float(a.Q[i, j]), float(a.R[i, j]))


def gaussian_curvature(grid, i, j):
    return float(_at(grid, i, j).K[i, j])


# ---------------------------------------------------------------------------
# Gauss-Codazzi compatibility
# ---------------------------------------------------------------------------


def _residuals(omega_uv, H, H_u, H_v, F, Q_v, R_u, Q, R):
    return np.stack([omega_uv + H * H * F - Q * R / F, H_u - Q_v / F, H_v - R_u / F])


def _lattice_residuals(grid, a):
    """Finite differences of the measured fields on the lattice itself."""
    ha, hb = grid.ha, grid.hb
    fields = {"omega": a.omega, "H": a.H, "Q": a.Q, "R": a.R}
    da = {k: d1(f, ha, 0) for k, f in fields.items()}
    db = {k: d1(f, hb, 1) for k, f in fields.items()}
    if grid.chart == NULL:
        du, dv = da, db
        omega_uv = d11(a.omega, ha, hb)
    else:
        du = {k: 0.5 * (da[k] + db[k]) for k in fields}
        dv = {k: 0.5 * (db[k] - da[k]) for k in fields}
        omega_uv = 0.25 * (d2(a.omega, hb, 1) - d2(a.omega, ha, 0))
    return _residuals(omega_uv, a.H, du["H"], dv["H"], a.half_metric, dv["Q"], du["R"], a.Q, a.R)


def _closure_residuals(grid, h):
    """Richardson-extrapolated central differences of fields evaluated off-lattice."""
    surface, orientation = grid.surface, grid.orientation
    U, V = grid.null_mesh()

    def field(du, dv):
        return _fields(surface.jet(U + du, V + dv), orientation)

    def d_u(name, k):
        idx = {"omega": 2, "H": 4, "Q": 5, "R": 6}[name]
        return (field(k, 0)[idx] - field(-k, 0)[idx]) / (2 * k)

    def d_v(name, k):
        idx = {"omega": 2, "H": 4, "Q": 5, "R": 6}[name]
        return (field(0, k)[idx] - field(0, -k)[idx]) / (2 * k)

    def mixed(k):
        return (field(k, k)[2] - field(k, -k)[2] - field(-k, k)[2] + field(-k, -k)[2]) / (4 * k * k)

    with np.errstate(invalid="ignore", divide="ignore"):
        _, F, _, _, H, Q, R, _ = field(0, 0)
        return _residuals(
            richardson(mixed, h),
            H,
            richardson(lambda k: d_u("H", k), h),
            richardson(lambda k: d_v("H", k), h),
            F,
            richardson(lambda k: d_v("Q", k), h),
            richardson(lambda k: d_u("R", k), h),
            Q,
            R,
        )


def gauss_codazzi_field(grid, method="auto", h=1e-3, min_metric=0.0):
    """Gauss and both Codazzi residuals at every node, plus the mask of nodes used.

    ``method="closure"`` differentiates the exact fields of the grid's surface
    (fourth order in ``h``); ``"lattice"`` differentiates the sampled fields
    with the grid spacing.  ``"auto"`` picks the closure when the grid has one
    with exact second derivatives.  Nodes whose metric |2<phi_u, phi_v>| is
    below ``min_metric``, or whose residual is not finite, are masked out.
    """
    a = analyze(grid)
    if method == "auto":
        corner = [x[:1, :1] for x in grid.null_mesh()]
        has_exact = grid.surface is not None and grid.surface.jet(*corner).uu is not None
        method = "closure" if has_exact else "lattice"
    if method == "closure":
        res = _closure_residuals(grid, h)
    elif method == "lattice":
        with np.errstate(invalid="ignore", divide="ignore"):
            res = _lattice_residuals(grid, a)
    else:
        raise ValueError(f"unknown method {method!r}")
    mask = a.valid & (np.abs(2 * a.half_metric) >= min_metric) & np.all(np.isfinite(res), axis=0)
    return res, mask


def gauss_codazzi_residual(grid, i, j, method="auto", h=1e-3):
    _at(grid, i, j)
    key = ("gauss_codazzi", method, h)
    if key not in grid._cache:
        grid._cache[key] = gauss_codazzi_field(grid, method, h)
    res, _ = grid._cache[key]
    return tuple(float(x) for x in res[:, i, j])


# ---------------------------------------------------------------------------
# Gauss map
# ---------------------------------------------------------------------------


def inverse_stereographic(q, r):
    """Point of the pseudosphere whose null stereographic coordinates are (q, r)."""
    q, r = np.asarray(q, float), np.asarray(r, float)
    D = 1 + q * r
    if np.any(np.abs(D) < POLE_TOL):
        raise EquatorSingularity("1 + q r vanishes")
    return np.stack([(q - r) / D, (q + r) / D, (q * r - 1) / D], axis=-1)


def project_gauss_map(n):
    """(q, r) = ((x1 + x2) / (1 - x3), (-x1 + x2) / (1 - x3)) for n on the pseudosphere."""
    n = np.asarray(n, float)
    x1, x2, x3 = n[..., 0], n[..., 1], n[..., 2]
    if np.any(np.abs(inner3(n, n) - 1) > SPHERE_TOL):
        raise NotOnSphere("point is not on the unit pseudosphere")
    denom = 1 - x3
    if np.any(np.abs(denom) < POLE_TOL):
        raise NorthPole("point is the projection pole")
    q, r = (x1 + x2) / denom, (-x1 + x2) / denom
    if np.ndim(q) == 0:
        return float(q), float(r)
    return q, r


def measured_gauss_map(grid):
    """Projected Gauss map (q, r) at every valid node; NaN elsewhere."""
    N = analyze(grid).normal
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = 1 - N[..., 2]
        return (N[..., 0] + N[..., 1]) / denom, (-N[..., 0] + N[..., 1]) / denom


def _values(fn, t):
    return np.asarray(fn(t), float) * np.ones_like(t)


def gmap_pde_field(d, grid, H=0.0):
    """Residuals of the four first-order equations of the projected Gauss map.

    Returned in the order q_u - Q/f, q_v - H (1+qr)^2 g / 2,
    r_u - H (1+qr)^2 f / 2, r_v - R/g; Q and R are the values measured on
    ``grid`` (which must be sampled on the null chart of ``d``).
    """
    a = analyze(grid)
    U, V = grid.null_mesh()
    q, f, r, g = (_values(d.q, U), _values(d.f, U), _values(d.r, V), _values(d.g, V))
    if np.any(np.abs(f[a.valid]) < 1e-12) or np.any(np.abs(g[a.valid]) < 1e-12):
        raise ZeroDenominator("f or g vanishes on the grid")
    q_u, q_v = _values(d.q.derivative("u"), U), _values(d.q.derivative("v"), V)
    r_u, r_v = _values(d.r.derivative("u"), U), _values(d.r.derivative("v"), V)
    lift = 0.5 * H * (1 + q * r) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        res = np.stack([q_u - a.Q / f, q_v - lift * g, r_u - lift * f, r_v - a.R / g])
    res[:, ~a.valid] = np.nan
    return res


def gmap_pde_residual(d, grid, i, j, H=0.0):
    _at(grid, i, j)
    return tuple(float(x) for x in gmap_pde_field(d, grid, H)[:, i, j])


def umbilic_points(grid, threshold, interior=True):
    """Nodes where both Q and R are below ``threshold`` in magnitude."""
    a = analyze(grid)
    with np.errstate(invalid="ignore"):
        hit = a.valid & (np.maximum(np.abs(a.Q), np.abs(a.R)) < threshold)
    if interior:
        edge = np.ones_like(hit)
        edge[1:-1, 1:-1] = False
        hit &= ~edge
    return [tuple(int(k) for k in ij) for ij in np.argwhere(hit)]


# ---------------------------------------------------------------------------
# Lax frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaxCoefficients:
    """Conformal factor, mean curvature and Hopf coefficients as fields of (u, v)."""

    omega: Callable
    omega_u: Callable
    omega_v: Callable
    H: Callable
    Q: Callable
    R: Callable

    def U(self, u, v):
        w, wu, H, Q = self.omega(u, v), self.omega_u(u, v), self.H(u, v), self.Q(u, v)
        e = np.exp(w / 2)
        return _mat(wu / 4, 0.5 * H * e, -Q / e, -wu / 4)

    def V(self, u, v):
        w, wv, H, R = self.omega(u, v), self.omega_v(u, v), self.H(u, v), self.R(u, v)
        e = np.exp(w / 2)
        return _mat(-wv / 4, R / e, -0.5 * H * e, wv / 4)


def _mat(a, b, c, d):
    a, b, c, d = np.broadcast_arrays(a, b, c, d)
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = a, b, c, d
    return out


def lax_fields_from_data(d):
    """Lax coefficients of the minimal surface generated by ``d`` (H = 0)."""
    dq, df, dr, dg = d.dq, d.df, d.dr, d.dg

    def omega(u, v):
        return np.log(np.abs(d.metric_factor(u, v)))

    def omega_u(u, v):
        q, r = _values(d.q, u), _values(d.r, v)
        return 2 * _values(dq, u) * r / (1 + q * r) + _values(df, u) / _values(d.f, u)

    def omega_v(u, v):
        q, r = _values(d.q, u), _values(d.r, v)
        return 2 * q * _values(dr, v) / (1 + q * r) + _values(dg, v) / _values(d.g, v)

    return LaxCoefficients(
        omega,
        omega_u,
        omega_v,
        lambda u, v: np.zeros(np.broadcast(u, v).shape),
        lambda u, v: _values(dq, u) * _values(d.f, u) + 0 * np.asarray(v, float),
        lambda u, v: _values(dr, v) * _values(d.g, v) + 0 * np.asarray(u, float),
    )


def initial_frame(d, u0, v0):
    """Unimodular frame e^{-omega/4} [[s1, -t2], [t1, s2]] built from the spinors of ``d``."""
    q, f, r, g = d.q(u0), d.f(u0), d.r(v0), d.g(v0)
    if f <= 0 or g <= 0:
        raise DegenerateMetric("the spinor frame needs f > 0 and g > 0")
    s1, t1, s2, t2 = q * np.sqrt(f), np.sqrt(f), r * np.sqrt(g), np.sqrt(g)
    det = s1 * s2 + t1 * t2
    if det <= 0:
        raise DegenerateMetric("frame determinant is not positive")
    return np.array([[s1, -t2], [t1, s2]]) / np.sqrt(det)


def _rk4(frame, coeff, t0, t1):
    h = t1 - t0
    k1 = frame @ coeff(t0)
    k2 = (frame + 0.5 * h * k1) @ coeff(t0 + 0.5 * h)
    k3 = (frame + 0.5 * h * k2) @ coeff(t0 + 0.5 * h)
    k4 = (frame + h * k3) @ coeff(t1)
    return frame + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _sweep(frame, coeff, ts):
    """Integrate Phi' = Phi A(t) through the nodes ``ts`` with step-doubling control."""
    out = [frame]
    for t0, t1 in zip(ts[:-1], ts[1:]):
        full = _rk4(frame, coeff, t0, t1)
        mid = 0.5 * (t0 + t1)
        frame = _rk4(_rk4(frame, coeff, t0, mid), coeff, mid, t1)
        err = float(np.max(np.abs(frame - full))) / 15
        if err > RK4_TOL:
            raise StepRejected(f"RK4 error estimate {err:.3e} at t = {t0!r}")
        out.append(frame)
    return np.stack(out)


def integrate_lax_frame(coeffs, frame0, u, v, order="uv"):
    """Frame field Phi on the lattice u x v solving Phi_u = Phi U, Phi_v = Phi V.

    ``order="uv"`` sweeps u along the first row and then v up every column;
    ``"vu"`` does the reverse.  Returns an array of shape (len(u), len(v), 2, 2).
    """
    u, v = np.asarray(u, float), np.asarray(v, float)
    frame0 = np.asarray(frame0, float)
    if order == "uv":
        row = _sweep(frame0, lambda t: coeffs.U(t, v[0]), u)
        cols = _sweep(row, lambda t: coeffs.V(u, t), v)
        return np.transpose(cols, (1, 0, 2, 3))
    if order == "vu":
        col = _sweep(frame0, lambda t: coeffs.V(u[0], t), v)
        return _sweep(col, lambda t: coeffs.U(t, v), u)
    raise ValueError(f"unknown order {order!r}")


def frame_tangents(coeffs, frames, u, v):
    """phi_u and phi_v recovered from a frame field as Vec3L arrays."""
    U, V = np.meshgrid(u, v, indexing="ij")
    scale = np.exp(coeffs.omega(U, V) / 2)[..., None, None]
    inv = np.linalg.inv(frames)
    raise_ = np.array([[0.0, 1.0], [0.0, 0.0]])
    lower = np.array([[0.0, 0.0], [1.0, 0.0]])
    phi_u = matrix_to_im(scale * frames @ raise_ @ inv)
    phi_v = matrix_to_im(scale * frames @ lower @ inv)
    return phi_u, phi_v
