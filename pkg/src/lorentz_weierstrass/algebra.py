"""Split-quaternion model of E^4_2 and the Minkowski space E^3_1.

Vectors are plain numpy arrays: ``Vec4`` has shape (4,) with signature
(-,-,+,+), ``Vec3L`` has shape (3,) with signature (-,+,+) and the first
component timelike.  ``Mat2R`` is a (2, 2) float array.

Vec3L routines broadcast over leading axes, so a whole grid of vectors of
shape (..., 3) can be handled in one call.
"""

import numpy as np

from .errors import NotSL2, SingularMatrix

ONE = np.array([[1.0, 0.0], [0.0, 1.0]])
I = np.array([[0.0, 1.0], [-1.0, 0.0]])
J = np.array([[0.0, 1.0], [1.0, 0.0]])
K = np.array([[1.0, 0.0], [0.0, -1.0]])

SIGNATURE4 = np.array([-1.0, -1.0, 1.0, 1.0])
SIGNATURE3 = np.array([-1.0, 1.0, 1.0])

SINGULAR_TOL = 1e-12
RENORMALIZE_TOL = 1e-6


def to_matrix(v):
    """(x0, x1, x2, x3) -> [[x0+x3, x1+x2], [-x1+x2, x0-x3]]."""
    x0, x1, x2, x3 = np.asarray(v, dtype=float)
    return np.array([[x0 + x3, x1 + x2], [-x1 + x2, x0 - x3]])


def from_matrix(m):
    m = np.asarray(m, dtype=float)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return np.array([(a + d) / 2, (b - c) / 2, (b + c) / 2, (a - d) / 2])


def im_to_matrix(x):
    """Embed a Vec3L as the imaginary split-quaternion x1 i + x2 j' + x3 k'."""
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    out = np.empty(x.shape[:-1] + (2, 2))
    out[..., 0, 0] = x3
    out[..., 0, 1] = x1 + x2
    out[..., 1, 0] = -x1 + x2
    out[..., 1, 1] = -x3
    return out


def matrix_to_im(m):
    """Imaginary part of a split-quaternion as a Vec3L (the 1-part is dropped)."""
    m = np.asarray(m, dtype=float)
    b, c = m[..., 0, 1], m[..., 1, 0]
    x3 = (m[..., 0, 0] - m[..., 1, 1]) / 2
    return np.stack([(b - c) / 2, (b + c) / 2, x3], axis=-1)


def inner4(u, v):
    return float(np.sum(SIGNATURE4 * np.asarray(u, float) * np.asarray(v, float)))


def inner4_trace(u, v):
    """Same inner product through the matrix model: (tr(uv) - tr u tr v) / 2."""
    a, b = to_matrix(u), to_matrix(v)
    return 0.5 * (np.trace(a @ b) - np.trace(a) * np.trace(b))


def inner3(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def sq_mul(a, b):
    return np.asarray(a, float) @ np.asarray(b, float)


def lorentz_cross(a, b):
    """diag(-1, 1, 1) applied to the Euclidean cross product.

    The result is orthogonal to both inputs under ``inner3``; this is the
    orientation convention used for every unit normal in the package.
    """
    c = np.cross(np.asarray(a, float), np.asarray(b, float))
    c[..., 0] = -c[..., 0]
    return c


def normalize_sl2(g):
    """Rescale ``g`` to det 1 when it is within 1e-6 of SL(2, R)."""
    g = np.asarray(g, dtype=float)
    det = np.linalg.det(g)
    if abs(det) < SINGULAR_TOL:
        raise SingularMatrix(f"det = {det:.3e}")
    dev = abs(det - 1.0)
    if dev > RENORMALIZE_TOL:
        raise NotSL2(f"det = {det!r} is not within {RENORMALIZE_TOL} of 1")
    if dev > SINGULAR_TOL:
        g = g / np.sqrt(det)
    return g


def ad_action(g, x):
    """Ad(g)x = g x g^-1 on imaginary split-quaternions.

    Conjugation is invariant under scaling of ``g``, so any invertible matrix
    is accepted; only near-singular ones are refused.
    """
    g = np.asarray(g, dtype=float)
    det = np.linalg.det(g)
    if abs(det) < SINGULAR_TOL:
        raise SingularMatrix(f"det = {det:.3e}")
    ginv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
    return matrix_to_im(g @ im_to_matrix(x) @ ginv)
