"""Configuration construction and the ansatz embedding.

A polygonal configuration pins each body to a unit planar direction
``U_i = (cos beta_i, sin beta_i)``.  A reduced state carries the size
factor rho, the rotation angle theta, the fiber vector Z in R^{k-2}, and
their rates; embedding produces the full ambient state

    q_i = (rho T(theta) U_i ; Z),
    qdot_i = (rhodot T(theta) U_i + rho thetadot T(theta) J U_i ; Zdot),

which lies on the manifold with tangent velocities whenever the reduced
constraints hold.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import (
    DimensionError,
    InfeasibleConstraintError,
    ValidationError,
)


def _frozen(a):
    # copy so freezing never locks a caller-owned array
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class PolygonConfig:
    """Body count, masses, planar angles, curvature sign, ambient dimension.

    Angles must be pairwise distinct modulo 2*pi: coincident angles mean a
    collision at every size, which the force law cannot evaluate.
    """

    masses: np.ndarray
    beta: np.ndarray
    sigma: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "masses", _frozen(self.masses))
        object.__setattr__(self, "beta", _frozen(self.beta))
        object.__setattr__(self, "sigma", geometry.check_sigma(self.sigma))
        if self.masses.ndim != 1 or self.beta.ndim != 1:
            raise DimensionError("masses and beta must be 1-D")
        n = self.masses.shape[0]
        if n < 2:
            raise ValidationError(f"need at least 2 bodies, got {n}")
        if self.beta.shape[0] != n:
            raise DimensionError(
                f"{n} masses but {self.beta.shape[0]} angles"
            )
        if not np.all(self.masses > 0):
            raise ValidationError("all masses must be positive")
        if int(self.k) != self.k or self.k < 2:
            raise ValidationError(f"ambient dimension must be an integer >= 2, got {self.k}")
        object.__setattr__(self, "k", int(self.k))
        for i in range(n):
            for j in range(i + 1, n):
                if 1.0 - np.cos(self.beta[i] - self.beta[j]) <= 0.0:
                    raise ValidationError(
                        f"angles {i + 1} and {j + 1} coincide modulo 2*pi"
                    )

    @property
    def n(self):
        return self.masses.shape[0]

    @property
    def planar_units(self):
        """Unit direction vectors U_i = (cos beta_i, sin beta_i), shape (n, 2)."""
        return np.column_stack([np.cos(self.beta), np.sin(self.beta)])


def regular_polygon(n, phase=0.0, masses=None, sigma=geometry.SPHERICAL, k=3):
    """Configuration with angles beta_i = phase + 2*pi*i/n, i = 0..n-1.

    ``masses=None`` gives unit masses.
    """
    if int(n) != n or n < 2:
        raise ValidationError(f"need an integer body count >= 2, got {n}")
    n = int(n)
    if masses is None:
        masses = np.ones(n)
    beta = phase + 2.0 * np.pi * np.arange(n) / n
    return PolygonConfig(masses=masses, beta=beta, sigma=sigma, k=k)


@dataclass(frozen=True)
class ReducedState:
    """Size/rotation/fiber coordinates (rho, rhodot, theta, thetadot, Z, Zdot).

    Valid states satisfy rho^2 + Z (.) Z = sigma (membership) and
    rho rhodot + Z (.) Zdot = 0 (tangency), with the fiber inner product
    weighting the last coordinate by sigma.
    """

    rho: float
    rho_dot: float
    theta: float
    theta_dot: float
    z: np.ndarray = field(default_factory=lambda: np.zeros(0))
    z_dot: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        object.__setattr__(self, "z", _frozen(self.z))
        object.__setattr__(self, "z_dot", _frozen(self.z_dot))
        if self.z.ndim != 1 or self.z_dot.ndim != 1:
            raise DimensionError("z and z_dot must be 1-D")
        if self.z.shape != self.z_dot.shape:
            raise DimensionError(
                f"z has length {self.z.shape[0]} but z_dot {self.z_dot.shape[0]}"
            )

    @property
    def k(self):
        """Ambient dimension implied by the fiber length."""
        return self.z.shape[0] + 2

    def constraint_residual(self, sigma):
        """rho^2 + Z (.) Z - sigma; zero on valid states."""
        return self.rho**2 + geometry.sigma_dot(self.z, self.z, sigma) - geometry.check_sigma(sigma)

    def tangency_residual(self, sigma):
        """rho rhodot + Z (.) Zdot; zero on valid states."""
        return self.rho * self.rho_dot + geometry.sigma_dot(self.z, self.z_dot, sigma)

    def validate(self, sigma, tol=1e-9):
        sigma = geometry.check_sigma(sigma)
        if not self.rho > 0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if sigma == 1 and self.rho > 1 + tol:
            raise ValidationError(
                f"spherical case requires rho <= 1, got {self.rho}"
            )
        r = self.constraint_residual(sigma)
        if abs(r) > tol:
            raise ValidationError(
                f"membership violated: rho^2 + Z(.)Z - sigma = {r:.3e} (tol {tol:.1e})"
            )
        t = self.tangency_residual(sigma)
        if abs(t) > tol:
            raise ValidationError(
                f"tangency violated: rho rhodot + Z(.)Zdot = {t:.3e} (tol {tol:.1e})"
            )


@dataclass(frozen=True)
class FullState:
    """Ambient positions and velocities for all bodies, plus masses and sign."""

    positions: np.ndarray
    velocities: np.ndarray
    masses: np.ndarray
    sigma: int

    def __post_init__(self):
        object.__setattr__(self, "positions", _frozen(self.positions))
        object.__setattr__(self, "velocities", _frozen(self.velocities))
        object.__setattr__(self, "masses", _frozen(self.masses))
        object.__setattr__(self, "sigma", geometry.check_sigma(self.sigma))
        q, v, m = self.positions, self.velocities, self.masses
        if q.ndim != 2 or v.ndim != 2 or m.ndim != 1:
            raise DimensionError("positions/velocities must be (n, k), masses (n,)")
        if q.shape != v.shape or q.shape[0] != m.shape[0]:
            raise DimensionError(
                f"shape mismatch: positions {q.shape}, velocities {v.shape}, "
                f"{m.shape[0]} masses"
            )
        if q.shape[1] < 2:
            raise DimensionError("ambient dimension must be >= 2")

    @property
    def n(self):
        return self.masses.shape[0]

    @property
    def k(self):
        return self.positions.shape[1]

    def manifold_residual(self):
        """max_i |q_i (.) q_i - sigma|."""
        return max(
            abs(geometry.sigma_dot(q, q, self.sigma) - self.sigma)
            for q in self.positions
        )

    def tangency_residual(self):
        """max_i |q_i (.) qdot_i|."""
        return max(
            abs(geometry.sigma_dot(q, v, self.sigma))
            for q, v in zip(self.positions, self.velocities)
        )

    def validate(self, tol=1e-9):
        r = self.manifold_residual()
        if r > tol:
            raise ValidationError(f"manifold residual {r:.3e} exceeds tol {tol:.1e}")
        t = self.tangency_residual()
        if t > tol:
            raise ValidationError(f"tangency residual {t:.3e} exceeds tol {tol:.1e}")


def synthesize_initial(config, rho0, rho_dot0=0.0, theta_dot0=0.0,
                       z_sign=1, z_direction=None):
    """Constraint-consistent reduced initial data with theta(0) = 0.

    The fiber is placed along the last ambient coordinate (or along an
    explicit ``z_direction`` in R^{k-2} when k > 3): the membership
    constraint fixes |Z| via sigma z^2 = sigma - rho0^2 and tangency fixes
    Zdot.  ``z_sign`` selects the hemisphere/sheet gauge.

    Spherical data need 0 < rho0 < 1 for k >= 3 and exactly rho0 = 1,
    rho_dot0 = 0 for k = 2 (the circle leaves no size freedom); hyperbolic
    data need rho0 > 0 and k >= 3.
    """
    sigma, k = config.sigma, config.k
    if z_sign not in (1, -1):
        raise ValidationError(f"z_sign must be +1 or -1, got {z_sign!r}")

    if k == 2:
        if sigma == geometry.HYPERBOLIC:
            raise InfeasibleConstraintError(
                "hyperbolic case needs k >= 3: rho^2 = -1 has no solution"
            )
        if rho0 != 1.0:
            raise InfeasibleConstraintError(
                f"k = 2 pins rho to 1 (got rho0 = {rho0}); only rigid rotation fits"
            )
        if rho_dot0 != 0.0:
            raise InfeasibleConstraintError(
                "k = 2 pins rho_dot to 0; the circle has no size freedom"
            )
        return ReducedState(rho=1.0, rho_dot=0.0, theta=0.0, theta_dot=theta_dot0)

    if not rho0 > 0:
        raise InfeasibleConstraintError(f"rho0 must be positive, got {rho0}")
    if sigma == geometry.SPHERICAL and rho0 >= 1.0:
        raise InfeasibleConstraintError(
            f"spherical case with k >= 3 requires 0 < rho0 < 1, got {rho0}"
        )

    fiber = sigma - rho0**2  # = Z (.) Z on the constraint
    if z_direction is None:
        direction = np.zeros(k - 2)
        direction[-1] = 1.0
    else:
        direction = np.asarray(z_direction, dtype=float)
        if direction.shape != (k - 2,):
            raise DimensionError(
                f"z_direction must have length {k - 2}, got {direction.shape}"
            )
    weight = geometry.sigma_dot(direction, direction, sigma)
    if weight == 0.0 or np.sign(weight) != np.sign(fiber):
        raise InfeasibleConstraintError(
            "z_direction has the wrong signed norm for this curvature sign"
        )
    z_mag = z_sign * np.sqrt(fiber / weight)
    z = z_mag * direction
    # tangency: rho rhodot + z_mag zdot_mag * weight = 0
    zdot_mag = -rho0 * rho_dot0 / (z_mag * weight)
    z_dot = zdot_mag * direction
    return ReducedState(
        rho=float(rho0), rho_dot=float(rho_dot0), theta=0.0,
        theta_dot=float(theta_dot0), z=z, z_dot=z_dot,
    )


def embed(state, config, tol=1e-6):
    """Lift a reduced state to the full ambient state via the ansatz.

    Raises ValidationError when the reduced constraints are violated
    beyond ``tol``; output rows then satisfy the full-state invariants to
    roundoff.
    """
    if state.k != config.k:
        raise DimensionError(
            f"state has fiber for k = {state.k} but config has k = {config.k}"
        )
    state.validate(config.sigma, tol=tol)
    units = config.planar_units
    c, s = np.cos(state.theta), np.sin(state.theta)
    rot = np.array([[c, -s], [s, c]])
    spun = units @ rot.T                 # T(theta) U_i, rows
    swirl = spun @ np.array([[0.0, 1.0], [-1.0, 0.0]])  # J applied after T (rows)
    n = config.n
    positions = np.empty((n, config.k))
    velocities = np.empty((n, config.k))
    positions[:, :2] = state.rho * spun
    positions[:, 2:] = state.z
    velocities[:, :2] = state.rho_dot * spun + state.rho * state.theta_dot * swirl
    velocities[:, 2:] = state.z_dot
    return FullState(
        positions=positions, velocities=velocities,
        masses=config.masses, sigma=config.sigma,
    )
