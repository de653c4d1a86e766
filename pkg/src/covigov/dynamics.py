"""Replicator trajectories, vertex convergence and punishment-severity sweeps."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .equilibria import enumerate_pure_points
from .errors import InvalidStep, OutOfRange, ValidationError
from .game import GameParams, PureProfile, StrategyState, replicator_rhs, stable_step
from .integrate import rk4

log = logging.getLogger(__name__)

STATIONARY_TOL = 1e-9
VERTEX_TOL = 1e-3
DEFAULT_T_END = 50.0


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # shape (samples, 4)
    dt: float
    reason: str
    params_hash: str

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "y", "z", "m"])
        for t, row in zip(self.t, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()


def integrate_replicator(
    params: GameParams,
    init=(0.5, 0.5, 0.5, 0.5),
    t_end: float = DEFAULT_T_END,
    dt: float | None = None,
) -> Trajectory:
    """Integrate the replicator system from ``init`` with fixed-step RK4.

    The state is clamped to the unit cube after every step, and integration
    stops early (reason ``"stationary"``) once the right-hand side falls below
    ``1e-9`` in max-norm.

    ``dt=None`` picks :func:`covigov.game.stable_step`.  Payoffs in the
    thousands make the system stiff: the baseline needs steps of a few 1e-4,
    and larger steps make RK4 overshoot straight onto a vertex, which
    clamping then turns into a spurious fixed point.
    """
    if dt is None:
        dt = stable_step(params)
    elif not dt > 0:
        raise InvalidStep(f"step size must be positive, got {dt!r}")
    elif dt > stable_step(params, cap=np.inf, safety=2.78):
        log.warning("dt=%g exceeds the RK4 stability bound for these payoffs", dt)
    StrategyState(*(float(c) for c in init))

    fun = lambda s: replicator_rhs(params, s)  # noqa: E731
    res = rk4(fun, tuple(init), t_end, dt, lower=0.0, upper=1.0, stop_tol=STATIONARY_TOL)
    return Trajectory(res.t, res.y, dt, res.reason, params.digest())


def detect_convergence(traj, tol: float = VERTEX_TOL) -> PureProfile | None:
    """The single vertex within max-norm ``tol`` of the final state, if any.

    ``traj`` may also be a bare state.  Ties (several vertices within ``tol``)
    return ``None``.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol!r}")
    final = np.asarray(traj.final if isinstance(traj, Trajectory) else traj, dtype=float)
    hits = [p for p in enumerate_pure_points() if np.max(np.abs(final - np.array(p))) <= tol]
    return hits[0] if len(hits) == 1 else None


def convergence_time(traj: Trajectory, profile, tol: float = VERTEX_TOL) -> float:
    """Earliest sample time after which the trajectory stays within ``tol`` of ``profile``."""
    dist = np.max(np.abs(traj.states - np.array(profile, dtype=float)), axis=1)
    outside = np.nonzero(dist > tol)[0]
    if len(outside) == 0:
        return float(traj.t[0])
    idx = outside[-1] + 1
    return float(traj.t[idx]) if idx < len(traj.t) else float("nan")


@dataclass(frozen=True)
class SweepRow:
    value: float
    profile: PureProfile | None
    time: float | None
    final: tuple


@dataclass(frozen=True)
class SweepSummary:
    symbol: str
    rows: tuple
    trajectories: tuple = ()

    def to_dict(self) -> dict:
        return {
            "symbol": self.symbol,
            "rows": [
                {
                    "value": r.value,
                    "converged": None if r.profile is None else r.profile.letter,
                    "profile": None if r.profile is None else list(r.profile),
                    "time": r.time,
                    "final_state": list(r.final),
                }
                for r in self.rows
            ],
        }


SWEEPABLE = ("phi", "beta")


def sweep(
    params: GameParams,
    symbol: str,
    values,
    init=(0.5, 0.5, 0.5, 0.5),
    t_end: float = DEFAULT_T_END,
    dt: float | None = None,
    tol: float = VERTEX_TOL,
) -> SweepSummary:
    """Integrate once per value of a punishment severity (``phi`` or ``beta``)."""
    if symbol not in SWEEPABLE:
        raise ValidationError(f"can only sweep {' or '.join(SWEEPABLE)}, not {symbol!r}")
    values = [float(v) for v in values]
    bad = [v for v in values if not 0.0 <= v <= 1.0]
    if bad:
        raise OutOfRange(f"{symbol} values outside [0, 1]: {bad}")
    rows, trajs = [], []
    for v in values:
        traj = integrate_replicator(params.replace(**{symbol: v}), init, t_end, dt)
        prof = detect_convergence(traj, tol)
        when = convergence_time(traj, prof, tol) if prof is not None else None
        rows.append(SweepRow(v, prof, when, tuple(float(c) for c in traj.final)))
        trajs.append(traj)
    return SweepSummary(symbol, tuple(rows), tuple(trajs))
