"""Cumulative Gauss-Legendre line integrals and finite-difference stencils."""

import numpy as np

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(4)


def cumulative_integral(fn, points, anchor, max_step=0.05):
    """Integral of ``fn`` from ``anchor`` to each of ``points``.

    ``fn`` maps a 1-D array of abscissae ``s`` to an array of shape
    ``(len(s), ...)``.  The sorted breakpoints (``points`` plus ``anchor``)
    are split into cells no longer than ``max_step``, each cell gets a
    4-point Gauss-Legendre rule, and the cell integrals are accumulated
    outward from the anchor.  Returns an array of shape
    ``(len(points), ...)`` that is exactly zero at the anchor.
    """
    points = np.asarray(points, dtype=float)
    knots = np.unique(np.concatenate([points, [float(anchor)]]))
    if knots.size == 1:
        probe = np.asarray(fn(knots))
        return np.zeros((points.size,) + probe.shape[1:])

    gaps = np.diff(knots)
    pieces = np.maximum(1, np.ceil(gaps / max_step).astype(int)) if max_step else np.ones_like(gaps, dtype=int)
    # fine breakpoints with the original knots marked
    fine = [knots[:1]]
    for a, gap, k in zip(knots[:-1], gaps, pieces):
        fine.append(a + gap * np.arange(1, k + 1) / k)
    fine = np.concatenate(fine)
    fine[np.cumsum(np.concatenate([[0], pieces]))] = knots
    lo, hi = fine[:-1], fine[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * GL_NODES[None, :]).ravel()
    values = np.asarray(fn(nodes))
    values = values.reshape((lo.size, GL_NODES.size) + values.shape[1:])
    weights = (half[:, None] * GL_WEIGHTS[None, :]).reshape((lo.size, GL_NODES.size) + (1,) * (values.ndim - 2))
    cells = np.sum(values * weights, axis=1)
    running = np.concatenate([np.zeros((1,) + cells.shape[1:]), np.cumsum(cells, axis=0)])
    at_knots = running[np.cumsum(np.concatenate([[0], pieces]))]
    at_knots = at_knots - at_knots[np.searchsorted(knots, anchor)]
    return at_knots[np.searchsorted(knots, points)]


def d1(arr, h, axis):
    """Second-order first derivative on a uniform lattice (one-sided at the ends)."""
    return np.gradient(arr, h, axis=axis, edge_order=2)


def d2(arr, h, axis):
    """Second-order second derivative: compact central stencil, one-sided at the ends."""
    a = np.moveaxis(np.asarray(arr, dtype=float), axis, 0)
    out = np.empty_like(a)
    n = a.shape[0]
    if n < 4:
        raise ValueError("need at least 4 nodes along an axis for second derivatives")
    out[1:-1] = (a[2:] - 2 * a[1:-1] + a[:-2]) / h**2
    out[0] = (2 * a[0] - 5 * a[1] + 4 * a[2] - a[3]) / h**2
    out[-1] = (2 * a[-1] - 5 * a[-2] + 4 * a[-3] - a[-4]) / h**2
    return np.moveaxis(out, 0, axis)


def d11(arr, h0, h1, axes=(0, 1)):
    """Mixed derivative; the standard 4-point stencil at interior nodes."""
    return d1(d1(arr, h0, axes[0]), h1, axes[1])


def richardson(stencil, h):
    """Combine a second-order stencil at h and h/2 into a fourth-order value."""
    coarse = stencil(h)
    fine = stencil(h / 2)
    return fine + (fine - coarse) / 3.0
