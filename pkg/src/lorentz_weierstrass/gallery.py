"""Named example surfaces with closed-form positions and curvature oracles."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnknownName
from .expr import as_expr, neg
from .weierstrass import (
    PseudosphereSurface,
    WeierstrassData,
    conjugate,
    integrate_surface,
    pseudosphere_surface,
    weierstrass_surface,
)
from .worldsheet import sample_worldsheet

HALF_PI = np.pi / 2


def _vec(*components):
    return np.stack(np.broadcast_arrays(*components), axis=-1)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    data: Optional[WeierstrassData]
    domain: tuple
    worldsheet_domain: tuple
    minimal: bool
    closed_X: Optional[Callable] = None
    closed_Y: Optional[Callable] = None
    metric: Optional[Callable] = None
    K: Optional[Callable] = None
    H: float = 0.0
    hopf: Optional[Callable] = None
    conjugate_of: Optional[str] = None
    pseudosphere: Optional[dict] = None

    def closed_position(self, u, v):
        """Closed-form X(u) + Y(v), translated to vanish at the domain corner."""
        u0, v0 = self.domain[0], self.domain[2]
        return (self.closed_X(u) - self.closed_X(u0)) + (self.closed_Y(v) - self.closed_Y(v0))

    def grid(self, domain=None, nu=129, nv=129):
        domain = tuple(domain or self.domain)
        if self.pseudosphere is not None:
            p = self.pseudosphere
            return pseudosphere_surface(p["H"], p["center"], p["q"], p["r"], domain, nu, nv)
        if self.conjugate_of is not None:
            return conjugate(get(self.conjugate_of).grid(domain, nu, nv))
        return integrate_surface(self.data, domain, nu, nv)

    def surface(self, u0=None, v0=None):
        """Closure with exact position and jets in null coordinates."""
        if self.pseudosphere is not None:
            p = self.pseudosphere
            return PseudosphereSurface(p["H"], p["center"], as_expr(p["q"]), as_expr(p["r"]))
        u0 = self.domain[0] if u0 is None else u0
        v0 = self.domain[2] if v0 is None else v0
        if self.conjugate_of is not None:
            return weierstrass_surface(get(self.conjugate_of).data, u0, v0).conjugate()
        return weierstrass_surface(self.data, u0, v0)

    def worldsheet(self, n_tau=129, n_sigma=129):
        t0, t1, s0, s1 = self.worldsheet_domain
        return sample_worldsheet(self.surface(), (t0, t1), (s0, s1), n_tau, n_sigma)


def _weierstrass_metric(d):
    return lambda u, v: d.metric_factor(u, v)


def _minimal_K(metric, hopf):
    """K = -4 Q R / metric^2 for H = 0 (metric = 2 <phi_u, phi_v>)."""

    def K(u, v):
        Q, R = hopf(u, v)
        with np.errstate(divide="ignore"):
            return -4 * Q * R / metric(u, v) ** 2

    return K


def _const_hopf(Q, R):
    return lambda u, v: (np.full(np.broadcast(u, v).shape, float(Q)), np.full(np.broadcast(u, v).shape, float(R)))


def _enneper(eps):
    d = WeierstrassData.from_strings("u" if eps > 0 else "-u", "1", "v", "1")
    return dict(
        data=d,
        domain=(-0.8, 0.8, -0.8, 0.8),
        worldsheet_domain=(0.0, 0.5, 0.0, 0.5),
        minimal=True,
        closed_X=lambda u: 0.5 * _vec(u + u**3 / 3, -u + u**3 / 3, -eps * u**2),
        closed_Y=lambda v: 0.5 * _vec(-v - v**3 / 3, -v + v**3 / 3, -(v**2)),
        metric=lambda u, v: (1 + eps * u * v) ** 2,
        K=lambda u, v: -4 * eps * (1 + eps * u * v) ** -4.0,
        hopf=_const_hopf(eps, 1),
    )


def _build():
    entries = {}

    plane = WeierstrassData.from_strings("0", "1", "0", "1")
    entries["plane"] = dict(
        data=plane,
        domain=(-1.0, 1.0, -1.0, 1.0),
        worldsheet_domain=(0.0, 1.0, 0.0, 1.0),
        minimal=True,
        closed_X=lambda u: _vec(u / 2, -u / 2, 0 * u),
        closed_Y=lambda v: _vec(-v / 2, -v / 2, 0 * v),
        metric=lambda u, v: np.ones(np.broadcast(u, v).shape),
        K=lambda u, v: np.zeros(np.broadcast(u, v).shape),
        hopf=_const_hopf(0, 0),
    )
    entries["enneper_plus"] = _enneper(1)
    entries["enneper_minus"] = _enneper(-1)

    cs = WeierstrassData.from_strings("-exp(u)", "-exp(-u)", "exp(-v)", "-exp(v)")
    cs_metric = _weierstrass_metric(cs)
    cs_hopf = _const_hopf(1, 1)
    entries["catenoid_spacelike"] = dict(
        data=cs,
        domain=(-1.0, 1.0, -1.0, 1.0),
        worldsheet_domain=(0.25, 0.75, 0.0, 0.5),
        minimal=True,
        closed_X=lambda u: _vec(-np.sinh(u), -np.cosh(u), -u),
        closed_Y=lambda v: _vec(np.sinh(v), np.cosh(v), v),
        metric=cs_metric,
        K=_minimal_K(cs_metric, cs_hopf),
        hopf=cs_hopf,
    )

    ct = WeierstrassData.from_strings("sin(u)/(-1+cos(u))", "-1+cos(u)", "sin(v)/(1+cos(v))", "-(1+cos(v))")
    ct_metric = _weierstrass_metric(ct)
    ct_hopf = _const_hopf(-1, -1)
    entries["catenoid_timelike"] = dict(
        data=ct,
        domain=(HALF_PI, 3 * HALF_PI, -HALF_PI, HALF_PI),
        worldsheet_domain=(0.25, 0.75, HALF_PI - 0.25, HALF_PI + 0.25),
        minimal=True,
        closed_X=lambda u: _vec(-u, -np.sin(u), np.cos(u)),
        closed_Y=lambda v: _vec(v, np.sin(v), -np.cos(v)),
        metric=ct_metric,
        K=_minimal_K(ct_metric, ct_hopf),
        hopf=ct_hopf,
    )

    for helicoid, catenoid in (("helicoid_spacelike", "catenoid_spacelike"), ("helicoid_timelike", "catenoid_timelike")):
        base = entries[catenoid]
        d = base["data"]
        flipped = WeierstrassData(d.q, d.f, d.r, neg(d.g))
        Y = base["closed_Y"]
        metric = _weierstrass_metric(flipped)
        hopf = (lambda h: lambda u, v: (h(u, v)[0], -h(u, v)[1]))(base["hopf"])
        entries[helicoid] = dict(
            base,
            data=flipped,
            closed_Y=(lambda y: lambda v: -y(v))(Y),
            metric=metric,
            K=_minimal_K(metric, hopf),
            hopf=hopf,
            conjugate_of=catenoid,
        )

    entries["pseudosphere"] = dict(
        data=None,
        domain=(-0.5, 0.5, -0.5, 0.5),
        worldsheet_domain=(0.0, 0.5, 0.0, 0.5),
        minimal=False,
        metric=lambda u, v: 4.0 / (1 + u * v) ** 2,
        K=lambda u, v: np.ones(np.broadcast(u, v).shape),
        H=1.0,
        hopf=_const_hopf(0, 0),
        pseudosphere={"H": 1.0, "center": (0.0, 0.0, 0.0), "q": "u", "r": "v"},
    )
    return {name: GalleryEntry(name=name, **fields) for name, fields in entries.items()}


NAMES = (
    "plane",
    "enneper_plus",
    "enneper_minus",
    "catenoid_spacelike",
    "helicoid_spacelike",
    "catenoid_timelike",
    "helicoid_timelike",
    "pseudosphere",
)
_ENTRIES = _build()


def names():
    return [*NAMES]


def get(name):
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownName(f"unknown gallery entry {name!r}; known: {', '.join(NAMES)}") from None


# the registry's public listing is spelled ``gallery.list()``
list = names
