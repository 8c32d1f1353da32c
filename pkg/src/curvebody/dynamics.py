"""Right-hand sides and criterion quantities.

Three surfaces live here:

* ``criterion_terms`` -- the per-body radial coefficients b_i (which must
  agree across bodies) and tangential residuals c_i (which must vanish)
  that decide whether a polygonal configuration admits a rotopulsating
  orbit of non-constant size;
* ``full_rhs`` -- accelerations of the curved n-body problem on the
  ambient manifold;
* ``reduced_rhs`` -- the closed (rho, theta, Z) system the ansatz obeys.

The pairwise force denominator is taken as D_ij = sigma (1 - (q_i(.)q_j)^2),
which is positive on both curvature branches away from collisions and
antipodal pairs and reduces to u (2 - sigma u) with u = rho^2 (1 - cos
(beta_i - beta_j)) for embedded polygonal states; see THEORY.md for why
this is the only self-consistent choice.
"""

from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import (
    CollisionError,
    DimensionError,
    SingularityError,
    ValidationError,
)
from .geometry import check_sigma, sigma_dot
from .model import FullState, ReducedState

# Relative b-spread beyond which strict mode refuses to keep integrating.
STRICT_B_TOL = 1e-10


@dataclass(frozen=True)
class CriterionTerms:
    """Criterion quantities at one size value.

    ``b``: per-body radial force coefficients; the reduced system is only
    consistent when they are all equal.  ``c``: per-body tangential force
    residuals; conservation of rho^2 thetadot forces them to vanish.
    """

    b: np.ndarray
    c: np.ndarray
    rho: float


def pair_inner(rho, delta, sigma):
    """Inner product q_i (.) q_j of two embedded bodies whose angles differ
    by delta, at size rho: sigma - rho^2 (1 - cos delta)."""
    sigma = check_sigma(sigma)
    if not rho > 0:
        raise ValidationError(f"rho must be positive, got {rho}")
    return sigma - rho**2 * (1.0 - np.cos(delta))


def criterion_terms(config, rho):
    """Evaluate b_i and c_i for every body at size rho.

    b_i = sum_{j != i} m_j (1 - cos d_ij)^{-1/2} (2 - sigma rho^2 (1 - cos d_ij))^{-3/2}
    c_i = sum_{j != i} m_j sin d_ij (1 - cos d_ij)^{-3/2} (2 - sigma rho^2 (1 - cos d_ij))^{-3/2}

    with d_ij = beta_i - beta_j.  Raises CollisionError on coincident
    angles and SingularityError when a spherical pair reaches the
    antipodal degeneracy 2 - rho^2 (1 - cos d) <= 0.
    """
    if not rho > 0:
        raise SingularityError(f"rho must be positive, got {rho}")
    sigma = config.sigma
    beta = config.beta
    m = config.masses
    n = config.n
    delta = beta[:, None] - beta[None, :]
    one_minus_cos = 1.0 - np.cos(delta)
    off = ~np.eye(n, dtype=bool)
    if np.any(one_minus_cos[off] <= 0.0):
        i, j = np.argwhere((one_minus_cos <= 0.0) & off)[0]
        raise CollisionError(
            f"bodies {i + 1} and {j + 1} coincide (angle separation 0)"
        )
    denom = 2.0 - sigma * rho**2 * one_minus_cos
    if np.any(denom[off] <= 0.0):
        i, j = np.argwhere((denom <= 0.0) & off)[0]
        raise SingularityError(
            f"antipodal degeneracy between bodies {i + 1} and {j + 1} "
            f"at rho = {rho}"
        )
    # Off-diagonal summation in fixed j order; diagonals excised exactly.
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(off, one_minus_cos, 1.0) ** -0.5
        denom_pow = denom**-1.5
    weights = np.where(off, m[None, :] * denom_pow, 0.0)
    b = np.sum(weights * inv_sqrt, axis=1)
    c = np.sum(weights * inv_sqrt**3 * np.sin(delta), axis=1)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
        raise SingularityError(f"criterion terms overflow at rho = {rho}")
    return CriterionTerms(b=b, c=c, rho=float(rho))


def _accelerations(positions, velocities, masses, sigma):
    """Curved n-body accelerations for raw (n, k) arrays.

    qddot_i = sum_{j != i} m_j [q_j - sigma (q_i(.)q_j) q_i] / D_ij^{3/2}
              - sigma (qdot_i(.)qdot_i) q_i,   D_ij = sigma (1 - (q_i(.)q_j)^2).
    """
    n = positions.shape[0]
    w = np.ones(positions.shape[1])
    w[-1] = sigma
    gram = (positions * w) @ positions.T
    vel_sq = np.sum(velocities * w * velocities, axis=1)
    dmat = sigma * (1.0 - gram**2)
    off = ~np.eye(n, dtype=bool)
    bad = (dmat <= 0.0) & off
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        inner = gram[i, j]
        kind = "collision" if sigma * inner > 0 else "antipodal configuration"
        raise SingularityError(
            f"{kind} between bodies {i + 1} and {j + 1} "
            f"(q_i(.)q_j = {inner:.6g})"
        )
    with np.errstate(divide="ignore", over="ignore"):
        inv_denom = np.where(off, dmat, 1.0) ** -1.5
    weights = np.where(off, masses[None, :] * inv_denom, 0.0)
    pulls = weights @ positions
    radial = np.sum(weights * gram, axis=1)
    acc = pulls - sigma * (radial + vel_sq)[:, None] * positions
    if not np.all(np.isfinite(acc)):
        raise SingularityError("acceleration overflow: near-singular pair")
    return acc


def full_rhs(state):
    """Accelerations for a full ambient state, one (length-k) row per body.

    The caller is responsible for the state satisfying the manifold and
    tangency invariants; on such states q_i (.) qddot_i = -qdot_i (.) qdot_i
    holds identically.
    """
    return _accelerations(state.positions, state.velocities, state.masses, state.sigma)


ReducedDerivative = namedtuple(
    "ReducedDerivative",
    ["rho_dot", "rho_ddot", "theta_dot", "theta_ddot", "z_dot", "z_ddot"],
)


def reduced_rhs(state, config, strict_b=False):
    """Time derivative of a reduced state.

    rhoddot   = rho thetadot^2 - sigma rho rhodot^2 - sigma rho^3 thetadot^2
                - sigma rho (Zdot (.) Zdot) + (sigma - rho^-2) b
    thetaddot = -2 rhodot thetadot / rho
    Zddot     = ((sigma / rho) b - sigma rhodot^2 - sigma rho^2 thetadot^2
                - sigma (Zdot (.) Zdot)) Z

    b is the first body's radial coefficient; the tangential equation
    assumes the configuration passes the criterion (c_i = 0), which makes
    rho^2 thetadot a first integral.  ``strict_b`` re-checks the b-spread
    at every call and raises when it exceeds STRICT_B_TOL relative.
    """
    rho = state.rho
    if not rho > 0:
        raise SingularityError(f"rho must stay positive, got {rho}")
    sigma = config.sigma
    terms = criterion_terms(config, rho)
    b = float(terms.b[0])
    if strict_b:
        spread = float(np.max(terms.b) - np.min(terms.b))
        if spread > STRICT_B_TOL * float(np.max(np.abs(terms.b))):
            raise SingularityError(
                f"radial coefficients differ across bodies at rho = {rho} "
                f"(spread {spread:.3e}); reduced dynamics meaningless here"
            )
    zdot_sq = sigma_dot(state.z_dot, state.z_dot, sigma)
    rho_ddot = (
        rho * state.theta_dot**2
        - sigma * rho * state.rho_dot**2
        - sigma * rho**3 * state.theta_dot**2
        - sigma * rho * zdot_sq
        + (sigma - 1.0 / rho**2) * b
    )
    theta_ddot = -2.0 * state.rho_dot * state.theta_dot / rho
    z_coeff = (
        (sigma / rho) * b
        - sigma * state.rho_dot**2
        - sigma * rho**2 * state.theta_dot**2
        - sigma * zdot_sq
    )
    z_ddot = z_coeff * state.z
    return ReducedDerivative(
        rho_dot=state.rho_dot,
        rho_ddot=rho_ddot,
        theta_dot=state.theta_dot,
        theta_ddot=theta_ddot,
        z_dot=state.z_dot,
        z_ddot=z_ddot,
    )


# --- flat-vector packing for the integrator ---------------------------------
# Reduced states pack as (rho, rhodot, theta, thetadot, Z..., Zdot...);
# full states pack positions then velocities, body-major.


def pack_reduced(state):
    return np.concatenate((
        [state.rho, state.rho_dot, state.theta, state.theta_dot],
        state.z, state.z_dot,
    ))


def unpack_reduced(y, k):
    fiber = k - 2
    if y.shape[0] != 4 + 2 * fiber:
        raise DimensionError(
            f"flat reduced state for k = {k} needs length {4 + 2 * fiber}, "
            f"got {y.shape[0]}"
        )
    return ReducedState(
        rho=float(y[0]), rho_dot=float(y[1]),
        theta=float(y[2]), theta_dot=float(y[3]),
        z=y[4:4 + fiber], z_dot=y[4 + fiber:],
    )


def make_reduced_rhs(config, strict_b=False):
    """Flat-vector right-hand side f(t, y) for the reduced system."""
    k = config.k

    def rhs(t, y):
        state = unpack_reduced(y, k)
        d = reduced_rhs(state, config, strict_b=strict_b)
        return np.concatenate((
            [d.rho_dot, d.rho_ddot, d.theta_dot, d.theta_ddot],
            d.z_dot, d.z_ddot,
        ))

    return rhs


def pack_full(state):
    return np.concatenate((state.positions.ravel(), state.velocities.ravel()))


def unpack_full(y, masses, sigma, k):
    n = len(masses)
    if y.shape[0] != 2 * n * k:
        raise DimensionError(
            f"flat full state for n = {n}, k = {k} needs length {2 * n * k}, "
            f"got {y.shape[0]}"
        )
    return FullState(
        positions=y[: n * k].reshape(n, k),
        velocities=y[n * k:].reshape(n, k),
        masses=np.asarray(masses, dtype=float),
        sigma=sigma,
    )


def make_full_rhs(masses, sigma, k):
    """Flat-vector right-hand side f(t, y) for the ambient system.

    Invariants are not re-validated per call: manifold drift along the
    integration is itself a diagnostic and must stay visible.
    """
    m = np.asarray(masses, dtype=float)
    sigma = check_sigma(sigma)
    n = m.shape[0]

    def rhs(t, y):
        positions = y[: n * k].reshape(n, k)
        velocities = y[n * k:].reshape(n, k)
        acc = _accelerations(positions, velocities, m, sigma)
        return np.concatenate((velocities.ravel(), acc.ravel()))

    return rhs


def make_manifold_projection(masses, sigma, k):
    """Post-step hook rescaling each position onto q (.) q = sigma.

    Altering the trajectory this way hides constraint drift from the
    diagnostics; it is opt-in for exactly that reason.
    """
    n = len(masses)
    sigma = check_sigma(sigma)
    w = np.ones(k)
    w[-1] = sigma

    def project(y):
        out = np.array(y)
        positions = out[: n * k].reshape(n, k)
        norms = np.sum(positions * w * positions, axis=1)
        if np.any(sigma * norms <= 0.0):
            raise SingularityError("cannot project: position left its branch")
        positions *= np.sqrt(sigma / norms)[:, None]
        return out

    return project
