"""General-purpose ODE integration with typed terminal events.

Two drivers: classical fixed-step RK4 and an adaptive Dormand-Prince 5(4)
pair with proportional step control on the mixed error norm
``max_i |e_i| / (abs_tol + rel_tol |y_i|)``.  A right-hand side signals a
terminal event by raising ``SingularityError``; the adaptive driver then
bisects its step down to ``min_step`` to localize the event before giving
up, so the recorded termination time sits just before it.

Neither driver projects the state onto any constraint by default:
constraint drift is a correctness diagnostic and must stay visible.  An
optional ``post_step`` hook supports opt-in projection.

Sampling: output samples sit at multiples of ``sample_interval``.  The
adaptive driver shortens steps to land exactly on those instants, so
sampled values are integration nodes; the fixed-step driver interpolates
linearly between its nodes (accuracy O(step^2) between nodes).
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, ValidationError

COMPLETED = "completed"
SINGULARITY = "singularity"
STEP_COLLAPSE = "step-collapse"

# absolute/relative fuzz used when comparing time instants
_TIME_FUZZ = 1e-12


@dataclass(frozen=True)
class Termination:
    """How an integration ended: kind, time of last good state, detail."""

    kind: str
    time: float
    message: str | None = None


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    samples: np.ndarray
    termination: Termination

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        samples = np.array(self.samples, dtype=float)
        times.flags.writeable = False
        samples.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", samples)
        if times.ndim != 1 or samples.ndim != 2:
            raise ValidationError("times must be 1-D and samples 2-D")
        if times.shape[0] != samples.shape[0]:
            raise ValidationError(
                f"{times.shape[0]} times but {samples.shape[0]} samples"
            )
        if times.shape[0] > 1 and not np.all(np.diff(times) > 0):
            raise ValidationError("sample times must be strictly increasing")

    @property
    def completed(self):
        return self.termination.kind == COMPLETED


@dataclass(frozen=True)
class IntegrationSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.5
    min_step: float = 1e-12
    sample_interval: float = 0.01

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "min_step", "sample_interval"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.min_step < self.max_step:
            raise ValidationError(
                f"min_step {self.min_step} must be below max_step {self.max_step}"
            )


def _check_span(t_span):
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValidationError(f"t_span must increase, got ({t0}, {t1})")
    return t0, t1


def _fuzz(t):
    return _TIME_FUZZ * max(1.0, abs(t))


def integrate_fixed_rk4(rhs, y0, t_span, step, sample_interval):
    """Classical 4th-order Runge-Kutta at fixed step size.

    Samples at multiples of ``sample_interval`` from the start time are
    linearly interpolated between nodes.  The final step is shortened to
    land exactly on the end time.
    """
    if not step > 0:
        raise ValidationError(f"step must be positive, got {step}")
    if not sample_interval > 0:
        raise ValidationError(f"sample_interval must be positive, got {sample_interval}")
    t0, t1 = _check_span(t_span)
    y = np.array(y0, dtype=float)
    times = [t0]
    samples = [y.copy()]
    next_m = 1

    t = t0
    i = 0
    while t < t1 - _fuzz(t1):
        t_next = min(t0 + (i + 1) * step, t1)
        h = t_next - t
        try:
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
        except SingularityError as exc:
            return Trajectory(
                np.array(times), np.array(samples),
                Termination(SINGULARITY, t, str(exc)),
            )
        y_next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_next)):
            return Trajectory(
                np.array(times), np.array(samples),
                Termination(SINGULARITY, t, "state became non-finite"),
            )
        # emit all pending samples inside (t, t_next]
        while True:
            s = t0 + next_m * sample_interval
            if s > t_next + _fuzz(t_next):
                break
            if abs(s - t_next) <= _fuzz(t_next):
                times.append(t_next)
                samples.append(y_next.copy())
            else:
                w = (s - t) / h
                times.append(s)
                samples.append((1.0 - w) * y + w * y_next)
            next_m += 1
        t, y = t_next, y_next
        i += 1
    return Trajectory(np.array(times), np.array(samples), Termination(COMPLETED, t1))


# Dormand-Prince 5(4) tableau; the propagated solution is 5th order and
# the last stage is the first stage of the next step (FSAL).
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_ERR = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])

_SAFETY = 0.9
_SHRINK_MIN = 0.2
_GROW_MAX = 5.0


def integrate_adaptive(rhs, y0, t_span, settings, post_step=None):
    """Adaptive Dormand-Prince 5(4) integration.

    Terminates with ``step-collapse`` when error control pushes the step
    below ``settings.min_step`` and with ``singularity`` when the
    right-hand side keeps raising ``SingularityError`` all the way down to
    ``min_step``.  ``post_step``, when given, maps each accepted state to
    a replacement (e.g. constraint projection).
    """
    if not isinstance(settings, IntegrationSettings):
        settings = IntegrationSettings(**settings)
    t0, t1 = _check_span(t_span)
    interval = settings.sample_interval
    y = np.array(y0, dtype=float)
    times = [t0]
    samples = [y.copy()]
    next_m = 1

    t = t0
    h_ctrl = min(settings.max_step, (t1 - t0) * 1e-2)
    h_ctrl = max(h_ctrl, settings.min_step)
    k_first = None
    n_dim = y.shape[0]
    stages = np.empty((7, n_dim))

    def partial(kind, message=None):
        return Trajectory(
            np.array(times), np.array(samples), Termination(kind, t, message)
        )

    while t < t1 - _fuzz(t1):
        next_sample = t0 + next_m * interval
        is_sample = next_sample <= t1 + _fuzz(t1)
        target = min(next_sample, t1)
        clamped = target - t <= h_ctrl
        h = min(h_ctrl, target - t)

        try:
            if k_first is None:
                k_first = rhs(t, y)
            stages[0] = k_first
            with np.errstate(over="ignore", invalid="ignore"):
                for s in range(1, 7):
                    y_stage = y + h * (_DP_A[s] @ stages[:s])
                    stages[s] = rhs(t + _DP_C[s] * h, y_stage)
        except SingularityError as exc:
            # bisect toward the event; (t, y) is unchanged so any cached
            # first stage stays valid
            h_ctrl = h / 2.0
            if h_ctrl < settings.min_step:
                return partial(SINGULARITY, str(exc))
            continue

        # overflowing stages are handled by the rejection branch below
        with np.errstate(over="ignore", invalid="ignore"):
            y_new = y + h * (_DP_B5 @ stages)
            err_vec = h * (_DP_ERR @ stages)
            scale = settings.abs_tol + settings.rel_tol * np.maximum(
                np.abs(y), np.abs(y_new)
            )
            if np.all(np.isfinite(y_new)) and np.all(np.isfinite(err_vec)):
                err = float(np.max(np.abs(err_vec) / scale))
            else:
                err = np.inf

        if not err <= 1.0:
            factor = _SHRINK_MIN if not np.isfinite(err) else max(
                _SHRINK_MIN, _SAFETY * err**-0.2
            )
            h_ctrl = h * factor
            if h_ctrl < settings.min_step:
                return partial(STEP_COLLAPSE, f"step fell below min_step {settings.min_step}")
            continue

        # accept
        controlled = h == h_ctrl
        t = target if clamped else t + h
        y = y_new
        k_first = stages[6].copy()  # FSAL
        if post_step is not None:
            y = post_step(y)
            k_first = None
        if clamped and is_sample:
            times.append(t)
            samples.append(y.copy())
            next_m += 1
        if controlled:
            factor = _GROW_MAX if err == 0.0 else min(_GROW_MAX, _SAFETY * err**-0.2)
            h_ctrl = min(settings.max_step, h * factor)
        # steps shortened to hit an output instant leave the controller
        # step alone: a tiny clamped step must not stall the run

    return Trajectory(np.array(times), np.array(samples), Termination(COMPLETED, t1))
