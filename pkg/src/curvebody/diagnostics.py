"""Conservation monitoring, criterion verdicts, and cross-validation.

The criterion verdict is numerical evidence, not a symbolic proof: the
radial coefficients are analytic in rho^2, so equality on a modest grid
of distinct sizes is a strong surrogate for equality at all sizes.  Every
report says so in its ``note``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import dynamics, geometry, model
from .errors import SingularityError, ValidationError
from .integrator import IntegrationSettings, integrate_adaptive

GRID_NOTE = (
    "grid-based numerical verdict: criterion equalities checked on finitely "
    "many sizes, not proved symbolically"
)

DEFAULT_TOL_B = 1e-10
DEFAULT_TOL_C = 1e-10


def default_rho_grid(sigma, points=5):
    """Log-spaced size grid over the branch's working range:
    (0.1, 0.95) on the sphere, (0.1, 3) on the hyperboloid."""
    sigma = geometry.check_sigma(sigma)
    hi = 0.95 if sigma == geometry.SPHERICAL else 3.0
    return np.geomspace(0.1, hi, points)


@dataclass(frozen=True)
class CriterionPoint:
    """Criterion statistics at one grid size (or the error that excluded it)."""

    rho: float
    b_spread_abs: float | None = None
    b_spread_rel: float | None = None
    c_max: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class CriterionReport:
    points: tuple
    tol_b: float
    tol_c: float
    verdict: str
    first_failure: dict | None = None
    note: str = GRID_NOTE

    @property
    def admissible(self):
        return self.verdict == "admissible"


def criterion_report(config, rho_grid=None, tol_b=DEFAULT_TOL_B, tol_c=DEFAULT_TOL_C):
    """Evaluate the existence criterion on a size grid.

    Admissible iff at every evaluable grid point the relative spread of the
    radial coefficients stays within ``tol_b`` and every tangential
    residual within ``tol_c``.  Singular grid points are recorded
    per-point and excluded from the verdict.
    """
    if rho_grid is None:
        rho_grid = default_rho_grid(config.sigma)
    rho_grid = np.atleast_1d(np.asarray(rho_grid, dtype=float))
    points = []
    first_failure = None
    any_valid = False
    ok = True
    for g, rho in enumerate(rho_grid):
        try:
            terms = dynamics.criterion_terms(config, rho)
        except SingularityError as exc:
            points.append(CriterionPoint(rho=float(rho), error=str(exc)))
            continue
        any_valid = True
        b = terms.b
        spread_abs = float(np.max(b) - np.min(b))
        spread_rel = spread_abs / float(np.max(np.abs(b)))
        c_max = float(np.max(np.abs(terms.c)))
        points.append(CriterionPoint(
            rho=float(rho), b_spread_abs=spread_abs,
            b_spread_rel=spread_rel, c_max=c_max,
        ))
        if ok and (spread_rel > tol_b or c_max > tol_c):
            ok = False
            if spread_rel > tol_b:
                body = int(np.argmax(np.abs(b - np.mean(b))))
                reason = "b_spread"
            else:
                body = int(np.argmax(np.abs(terms.c)))
                reason = "c_max"
            first_failure = {
                "rho": float(rho), "grid_index": g,
                "body_index": body + 1, "reason": reason,
            }
    if not any_valid:
        raise ValidationError("every grid point was singular; nothing to judge")
    return CriterionReport(
        points=tuple(points), tol_b=tol_b, tol_c=tol_c,
        verdict="admissible" if ok else "inadmissible",
        first_failure=first_failure,
    )


@dataclass(frozen=True)
class ConservationSeries:
    """Per-sample conserved/constrained quantities along a trajectory.

    Reduced runs carry ``angular_momentum`` (rho^2 thetadot) and the
    size/fiber constraint drift; full runs carry the planar wedge
    component, manifold drift, and tangency drift.
    """

    times: np.ndarray
    angular_momentum: np.ndarray | None = None
    wedge_c12: np.ndarray | None = None
    constraint_drift: np.ndarray = field(default_factory=lambda: np.zeros(0))
    tangency_drift: np.ndarray | None = None


def conservation_series(trajectory, kind, config):
    """Decode a trajectory's samples and compute its conserved quantities."""
    times = trajectory.times
    samples = trajectory.samples
    sigma = config.sigma
    if kind == "reduced":
        width = 4 + 2 * (config.k - 2)
        if samples.shape[1] != width:
            raise ValidationError(
                f"reduced samples for k = {config.k} need width {width}, "
                f"got {samples.shape[1]}"
            )
        momentum = np.empty(len(times))
        drift = np.empty(len(times))
        for m, y in enumerate(samples):
            state = dynamics.unpack_reduced(y, config.k)
            momentum[m] = state.rho**2 * state.theta_dot
            drift[m] = abs(state.constraint_residual(sigma))
        return ConservationSeries(
            times=times, angular_momentum=momentum, constraint_drift=drift,
        )
    if kind == "full":
        width = 2 * config.n * config.k
        if samples.shape[1] != width:
            raise ValidationError(
                f"full samples for n = {config.n}, k = {config.k} need width "
                f"{width}, got {samples.shape[1]}"
            )
        wedge = np.empty(len(times))
        drift = np.empty(len(times))
        tangency = np.empty(len(times))
        for m, y in enumerate(samples):
            state = dynamics.unpack_full(y, config.masses, sigma, config.k)
            wedge[m] = geometry.wedge_c12(
                state.masses, state.positions, state.velocities
            )
            drift[m] = state.manifold_residual()
            tangency[m] = state.tangency_residual()
        return ConservationSeries(
            times=times, wedge_c12=wedge,
            constraint_drift=drift, tangency_drift=tangency,
        )
    raise ValidationError(f"kind must be 'reduced' or 'full', got {kind!r}")


def relative_drift(values):
    """max_t |v(t) - v(0)| / |v(0)| (absolute when v(0) = 0)."""
    values = np.asarray(values, dtype=float)
    dev = float(np.max(np.abs(values - values[0])))
    ref = abs(float(values[0]))
    return dev / ref if ref > 0 else dev


@dataclass(frozen=True)
class CrossValidationReport:
    """Agreement between the reduced run (embedded) and the full run."""

    max_position_deviation: float
    max_velocity_deviation: float
    residual_max: float
    reduced_termination: object
    full_termination: object
    samples_compared: int


def cross_validate(config, initial, t_span, settings=None, force=False):
    """Integrate the reduced system, embed it, integrate the full system
    from the embedded initial data, and measure their disagreement.

    The two integrations act as mutual oracles; additionally the embedded
    samples are differenced in time (central, interior samples only) and
    checked against the ambient accelerations, which quantifies how well
    the embedded curve solves the full equations of motion.

    Requires an admissible criterion verdict unless ``force`` is set (the
    reduced system is not a faithful model off-criterion; forced runs
    exist to demonstrate exactly that).
    """
    if settings is None:
        settings = IntegrationSettings()
    if not force:
        report = criterion_report(config)
        if not report.admissible:
            raise ValidationError(
                "configuration fails the existence criterion; "
                "use force=True to cross-validate anyway"
            )
    reduced_traj = integrate_adaptive(
        dynamics.make_reduced_rhs(config),
        dynamics.pack_reduced(initial), t_span, settings,
    )
    full0 = model.embed(initial, config)
    full_traj = integrate_adaptive(
        dynamics.make_full_rhs(config.masses, config.sigma, config.k),
        dynamics.pack_full(full0), t_span, settings,
    )

    n_common = min(len(reduced_traj.times), len(full_traj.times))
    embedded = []
    for m in range(n_common):
        state = dynamics.unpack_reduced(reduced_traj.samples[m], config.k)
        embedded.append(model.embed(state, config, tol=1e-5))
    pos_dev = 0.0
    vel_dev = 0.0
    for m in range(n_common):
        full_state = dynamics.unpack_full(
            full_traj.samples[m], config.masses, config.sigma, config.k
        )
        pos_dev = max(pos_dev, float(np.max(np.abs(
            embedded[m].positions - full_state.positions
        ))))
        vel_dev = max(vel_dev, float(np.max(np.abs(
            embedded[m].velocities - full_state.velocities
        ))))

    residual = 0.0
    dt = settings.sample_interval
    for m in range(1, n_common - 1):
        fd = (
            embedded[m + 1].positions
            - 2.0 * embedded[m].positions
            + embedded[m - 1].positions
        ) / dt**2
        residual = max(residual, float(np.max(np.abs(
            fd - dynamics.full_rhs(embedded[m])
        ))))

    return CrossValidationReport(
        max_position_deviation=pos_dev,
        max_velocity_deviation=vel_dev,
        residual_max=residual,
        reduced_termination=reduced_traj.termination,
        full_termination=full_traj.termination,
        samples_compared=n_common,
    )


def regular_gap_deviation(beta):
    """How far a set of angles is from a regular polygon: the largest
    deviation of consecutive circular gaps from 2*pi/n."""
    beta = np.asarray(beta, dtype=float)
    if beta.ndim != 1 or beta.shape[0] < 2:
        raise ValidationError("need at least two angles")
    n = beta.shape[0]
    wrapped = np.sort(np.mod(beta, 2.0 * np.pi))
    gaps = np.empty(n)
    gaps[:-1] = np.diff(wrapped)
    gaps[-1] = wrapped[0] + 2.0 * np.pi - wrapped[-1]
    return float(np.max(np.abs(gaps - 2.0 * np.pi / n)))


def is_regular_polygon(beta, tol=1e-9):
    """True iff the angles are equally spaced by 2*pi/n modulo 2*pi."""
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    return regular_gap_deviation(beta) <= tol
