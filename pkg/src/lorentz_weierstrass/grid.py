"""Sampled surfaces and the chart conventions shared by the analyzers.

Two charts are used.  The *null* chart has coordinates (u, v) with
u = x + y and v = -x + y; the *worldsheet* chart has (tau, sigma) = (x, y).
Every surface closure reports derivatives with respect to the null
coordinates; :func:`null_jet` and :func:`worldsheet_jet` convert between
the two, and :func:`area_jacobian` holds the single factor relating the
coordinate measures (dtau dsigma = du dv / 2).
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .quadrature import d1, d11, d2

NULL = "null"
WORLDSHEET = "worldsheet"


class Jet(NamedTuple):
    """Derivatives of a position field with respect to (u, v).

    Second-derivative entries may be None when a closure only knows the
    tangents; the lattice analyzers then fall back to finite differences.
    """

    u: np.ndarray
    v: np.ndarray
    uu: Optional[np.ndarray] = None
    uv: Optional[np.ndarray] = None
    vv: Optional[np.ndarray] = None


def to_null(chart, a, b):
    if chart == NULL:
        return a, b
    return a + b, b - a


def area_jacobian(chart):
    """Factor turning the chart's coordinate measure into dtau dsigma."""
    return 0.5 if chart == NULL else 1.0


def worldsheet_jet(jet):
    """(tau, sigma) derivatives from null ones: tau-derivative first, then sigma."""
    tau = jet.u - jet.v
    sigma = jet.u + jet.v
    if jet.uu is None:
        return tau, sigma, None, None, None
    tt = jet.uu - 2 * jet.uv + jet.vv
    ts = jet.uu - jet.vv
    ss = jet.uu + 2 * jet.uv + jet.vv
    return tau, sigma, tt, ts, ss


def null_jet(tau, sigma, tt=None, ts=None, ss=None):
    u = 0.5 * (sigma + tau)
    v = 0.5 * (sigma - tau)
    if tt is None:
        return Jet(u, v)
    return Jet(u, v, 0.25 * (tt + 2 * ts + ss), 0.25 * (ss - tt), 0.25 * (tt - 2 * ts + ss))


@dataclass(frozen=True, eq=False)
class SurfaceGrid:
    """Rectangular lattice of E^3_1 positions.

    ``a`` and ``b`` are the chart coordinates along axis 0 and axis 1
    ((u, v) for the null chart, (tau, sigma) for the worldsheet chart).
    ``surface`` optionally supplies exact derivatives through ``jet(u, v)``.
    ``X``/``Y`` hold the split phi = X(u) + Y(v) when the grid was built from
    one.  ``orientation`` multiplies the conventional unit normal.
    """

    a: np.ndarray
    b: np.ndarray
    points: np.ndarray
    flags: np.ndarray
    chart: str = NULL
    surface: object = None
    X: Optional[np.ndarray] = None
    Y: Optional[np.ndarray] = None
    orientation: int = 1
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self):
        return self.points.shape[:2]

    @property
    def u(self):
        return self.a

    @property
    def v(self):
        return self.b

    @property
    def ha(self):
        return float(self.a[1] - self.a[0])

    @property
    def hb(self):
        return float(self.b[1] - self.b[0])

    def mesh(self):
        return np.meshgrid(self.a, self.b, indexing="ij")

    def null_mesh(self):
        return to_null(self.chart, *self.mesh())

    def with_points(self, points, **changes):
        """Copy with new raw positions; exact closures and the split are dropped."""
        return replace(self, points=np.asarray(points, float), surface=None, X=None, Y=None,
                       _cache={}, **changes)

    def jet(self):
        """Null-coordinate jet on the lattice: exact where known, else finite differences."""
        if "jet" in self._cache:
            return self._cache["jet"]
        exact = self.surface.jet(*self.null_mesh()) if self.surface is not None else None
        fd = None
        if exact is None or exact.uu is None:
            fd = self.lattice_jet()
        if exact is None:
            jet = fd
        elif exact.uu is None:
            jet = Jet(exact.u, exact.v, fd.uu, fd.uv, fd.vv)
        else:
            jet = exact
        self._cache["jet"] = jet
        return jet

    def lattice_jet(self):
        p, ha, hb = self.points, self.ha, self.hb
        pa, pb = d1(p, ha, 0), d1(p, hb, 1)
        paa, pab, pbb = d2(p, ha, 0), d11(p, ha, hb), d2(p, hb, 1)
        if self.chart == NULL:
            return Jet(pa, pb, paa, pab, pbb)
        return null_jet(pa, pb, paa, pab, pbb)
