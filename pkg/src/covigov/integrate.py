"""Classical fixed-step Runge-Kutta integration shared by both model phases."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidStep


class RK4Result(NamedTuple):
    t: np.ndarray
    y: np.ndarray
    reason: str
    clamp_events: int


def rk4(
    fun: Callable[[np.ndarray], np.ndarray],
    y0,
    t_end: float,
    dt: float,
    *,
    lower=None,
    upper=None,
    stop_tol: float | None = None,
    every: int = 1,
) -> RK4Result:
    """Integrate an autonomous system ``y' = fun(y)`` with the classical RK4 scheme.

    Parameters
    ----------
    fun : callable
        Right-hand side, maps a state array to its time derivative.
    y0 : array_like
        Initial state.
    t_end : float
        Horizon.  The number of steps is ``round(t_end / dt)``; the last step is
        shortened when ``dt`` does not divide the horizon.
    dt : float
        Step size.
    lower, upper : float or array_like, optional
        Box the state is clamped to after every step.  A clamp event is counted
        whenever the unclamped update left the box.
    stop_tol : float, optional
        Stop as soon as the max-norm of ``fun(y)`` drops below this value.  The
        check runs before every step, including the first.
    every : int, default 1
        Record only every ``every``-th step.  The initial and final states are
        always recorded.

    Returns
    -------
    RK4Result
        Sample times, states (one row per sample), termination reason
        (``"stationary"`` or ``"horizon"``) and the number of clamp events.
    """
    if not dt > 0 or not math.isfinite(dt):
        raise InvalidStep(f"step size must be positive, got {dt!r}")
    if not t_end >= dt:
        raise InvalidStep(f"horizon {t_end!r} shorter than step {dt!r}")
    if every < 1:
        raise ValueError("every must be >= 1")

    y = np.array(y0, dtype=float)
    n_steps = int(math.ceil(t_end / dt - 1e-9))
    ts = [0.0]
    ys = [y.copy()]
    t = 0.0
    clamps = 0
    reason = "horizon"
    for i in range(n_steps):
        k1 = fun(y)
        if stop_tol is not None and np.max(np.abs(k1)) < stop_tol:
            reason = "stationary"
            break
        h = min(dt, t_end - t) if i == n_steps - 1 else dt
        k2 = fun(y + 0.5 * h * k1)
        k3 = fun(y + 0.5 * h * k2)
        k4 = fun(y + h * k3)
        with np.errstate(over="ignore", invalid="ignore"):
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise InvalidStep(f"state became non-finite at t={t:g}; step size {dt!r} is too large")
        if lower is not None or upper is not None:
            clipped = np.clip(y, lower, upper)
            if np.any(clipped != y):
                clamps += 1
            y = clipped
        t = (i + 1) * dt if i < n_steps - 1 else t_end
        if (i + 1) % every == 0 or i == n_steps - 1:
            ts.append(t)
            ys.append(y.copy())
    else:
        if stop_tol is not None and np.max(np.abs(fun(y))) < stop_tol:
            reason = "stationary"
    if ts[-1] != t:
        ts.append(t)
        ys.append(y.copy())
    return RK4Result(np.asarray(ts), np.asarray(ys), reason, clamps)
