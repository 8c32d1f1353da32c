"""Signed inner product, manifold membership, planar rotations, and the
planar angular-momentum component.

The ambient space is R^k with the inner product ``a (.) b = a1 b1 + ... +
a_{m-1} b_{m-1} + sigma a_m b_m``, where sigma is +1 on the spherical
branch and -1 on the hyperbolic one.  Vectors are plain 1-D float arrays;
all functions here are pure.
"""

import numpy as np

from .errors import DimensionError, ValidationError

SPHERICAL = 1
HYPERBOLIC = -1

# Convenience default used by membership checks; callers may always
# supply their own tolerance.
DEFAULT_MANIFOLD_TOL = 1e-9


def check_sigma(sigma):
    """Validate a curvature sign and return it as a plain int (+1 or -1)."""
    if sigma not in (1, -1):
        raise ValidationError(f"curvature sign must be +1 or -1, got {sigma!r}")
    return int(sigma)


def _as_vector(v, name="vector"):
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {a.shape}")
    return a


def sigma_dot(a, b, sigma):
    """Signed inner product: Euclidean except the last coordinate carries
    weight sigma.  Empty vectors contract to 0; a length-1 vector consists
    of only the weighted coordinate."""
    sigma = check_sigma(sigma)
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] == 0:
        return 0.0
    if sigma == 1:
        return float(np.dot(a, b))
    return float(np.dot(a[:-1], b[:-1]) - a[-1] * b[-1])


def on_manifold(q, sigma, tol=DEFAULT_MANIFOLD_TOL):
    """True iff q lies on the unit sphere (sigma=+1) or hyperboloid
    (sigma=-1), i.e. |q (.) q - sigma| <= tol."""
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    sigma = check_sigma(sigma)
    return abs(sigma_dot(q, q, sigma) - sigma) <= tol


def rotate(theta, v):
    """Apply the planar rotation by angle theta to a length-2 vector."""
    v = _as_vector(v, "v")
    if v.shape[0] != 2:
        raise DimensionError(f"rotate needs a length-2 vector, got {v.shape[0]}")
    c, s = np.cos(theta), np.sin(theta)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def rotation_generator_apply(v):
    """Apply the rotation generator J = [[0, -1], [1, 0]]: (x, y) -> (-y, x).

    J is the derivative of the rotation family at the identity; applying it
    twice negates the vector, and <v, Jv> = 0 for every v.
    """
    v = _as_vector(v, "v")
    if v.shape[0] != 2:
        raise DimensionError(f"generator needs a length-2 vector, got {v.shape[0]}")
    return np.array([-v[1], v[0]])


def wedge_c12(masses, positions, velocities):
    """Planar component of the angular-momentum bivector:
    sum_i m_i (q_i1 qdot_i2 - q_i2 qdot_i1).

    Only the first two coordinates of each body enter.  For the rigidly
    rotating ansatz this equals rho^2 thetadot * sum(m_i) and is conserved
    along solutions of the equations of motion.
    """
    m = np.asarray(masses, dtype=float)
    q = np.asarray(positions, dtype=float)
    v = np.asarray(velocities, dtype=float)
    if q.ndim != 2 or v.ndim != 2:
        raise DimensionError("positions and velocities must be 2-D (n, k) arrays")
    if not (m.shape[0] == q.shape[0] == v.shape[0]):
        raise DimensionError(
            f"count mismatch: {m.shape[0]} masses, {q.shape[0]} positions, "
            f"{v.shape[0]} velocities"
        )
    if q.shape[1] < 2 or v.shape[1] < 2:
        raise DimensionError("vectors must have length >= 2")
    return float(np.sum(m * (q[:, 0] * v[:, 1] - q[:, 1] * v[:, 0])))
