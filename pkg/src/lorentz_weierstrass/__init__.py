"""Timelike minimal and constant-mean-curvature surfaces in Minkowski 3-space.

Surfaces are built from Weierstrass data (q, f, r, g) or from spinors,
analysed for curvature and compatibility, and read as string worldsheets.
"""

from . import algebra, expr, gallery, geometry, weierstrass, worldsheet
from . import errors
from .expr import parse
from .grid import SurfaceGrid
from .weierstrass import WeierstrassData, conjugate, integrate_surface

__all__ = [
    "algebra",
    "errors",
    "expr",
    "gallery",
    "geometry",
    "weierstrass",
    "worldsheet",
    "parse",
    "SurfaceGrid",
    "WeierstrassData",
    "conjugate",
    "integrate_surface",
]
