"""SBI1I2R opinion dissemination model.

Compartments: susceptible ``S``, bystanders ``B``, anti-violence
disseminators ``I1``, pro-violence disseminators ``I2`` and immune ``R``.
New users arrive at a constant rate ``A``.  Media guidance (``z1``/``z2``) and
emotional identification (``a1``/``a2``) split bystanders between the two
disseminator classes; government regulation (``m1``/``m2``) scaled by its
credibility ``k`` moves disseminators to ``R`` or, under weak regulation,
pro-violence disseminators back to ``B``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidStep, NoConvergence, ValidationError, ZeroDenominator
from .integrate import rk4

log = logging.getLogger(__name__)

COMPARTMENTS = ("S", "B", "I1", "I2", "R")
EXTINCTION_THRESHOLD = 0.5
SUM_TOL = 1e-9


@dataclass(frozen=True)
class OpinionParams:
    """Transition parameters of the opinion model.

    Fields may be numpy arrays of a common shape; every function in this
    module then evaluates the whole batch at once.
    """

    A: float = 1.0
    sigma: float = 0.2
    theta: float = 0.1
    z1: float = 0.5
    z2: float = 0.5
    m1: float = 0.5
    m2: float = 0.5
    a1: float = 0.5
    a2: float = 0.5
    k: float = 0.5
    n1: float = 0.9
    n2: float = 0.1

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = np.asarray(getattr(self, f.name), dtype=float)
            if not np.all(np.isfinite(v)):
                raise ValidationError(f"{f.name}: must be finite")
            if f.name == "A":
                if not np.all(v > 0):
                    raise ValidationError("A: inflow rate must be > 0")
            elif not np.all((v >= 0) & (v <= 1)):
                raise ValidationError(f"{f.name}: probability must lie in [0, 1]")
        if not np.all(np.abs(np.asarray(self.z1) + self.z2 - 1) <= SUM_TOL):
            raise ValidationError("z1 + z2 = 1 required")
        if not np.all(np.abs(np.asarray(self.m1) + self.m2 - 1) <= SUM_TOL):
            raise ValidationError("m1 + m2 = 1 required")
        if not np.all(np.asarray(self.n2) < self.n1):
            raise ValidationError("n2 < n1 required")

    @classmethod
    def control(cls, **overrides) -> "OpinionParams":
        """The control group; ``overrides`` replace individual fields."""
        return cls(**overrides)

    @classmethod
    def group(cls, name) -> "OpinionParams":
        """One of the experimental groups (``"control"`` or 1-8)."""
        key = str(name).lower().removeprefix("group").strip()
        try:
            return cls(**GROUPS[key])
        except KeyError:
            raise ValidationError(f"unknown experimental group {name!r}") from None

    def replace(self, **changes) -> "OpinionParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    # branch rates out of B and recovery rates out of I1/I2
    @property
    def to_I1(self):
        return self.z1 + self.a1

    @property
    def to_I2(self):
        return self.z2 + self.a2

    @property
    def recover_I1(self):
        return self.k * (self.m1 + self.n1)

    @property
    def recover_I2(self):
        return self.k * (self.m1 + self.n2)

    @property
    def backflow(self):
        return self.k * self.m2


_CONTROL = dict(A=1.0, sigma=0.2, z1=0.5, z2=0.5, m1=0.5, m2=0.5, a1=0.5, a2=0.5, k=0.5, n1=0.9, n2=0.1, theta=0.1)
GROUPS = {
    "control": _CONTROL,
    "1": {**_CONTROL, "z1": 0.1, "z2": 0.9},
    "2": {**_CONTROL, "z1": 0.9, "z2": 0.1},
    "3": {**_CONTROL, "m1": 0.1, "m2": 0.9},
    "4": {**_CONTROL, "m1": 0.9, "m2": 0.1},
    "5": {**_CONTROL, "z1": 1.0, "z2": 0.0, "m1": 0.0, "m2": 1.0},
    "6": {**_CONTROL, "z1": 0.0, "z2": 1.0, "m1": 1.0, "m2": 0.0},
    "7": {**_CONTROL, "z1": 1.0, "z2": 0.0, "m1": 1.0, "m2": 0.0},
    "8": {**_CONTROL, "z1": 1.0, "z2": 0.0, "m1": 1.0, "m2": 0.0, "k": 0.6, "theta": 0.3},
}  # fmt: skip


@dataclass(frozen=True)
class CompartmentState:
    S: float
    B: float
    I1: float
    I2: float
    R: float = 0.0

    def __post_init__(self):
        for name in COMPARTMENTS:
            if not getattr(self, name) >= 0:
                raise ValidationError(f"{name}: compartment mass must be >= 0")

    @property
    def N(self) -> float:
        return self.S + self.B + self.I1 + self.I2 + self.R

    def __iter__(self):
        return iter((self.S, self.B, self.I1, self.I2, self.R))

    def __array__(self, dtype=None, copy=None):
        return np.array(tuple(self), dtype=dtype or float)


def opinion_rhs(params: OpinionParams, state) -> np.ndarray:
    """Right-hand side ``(dS, dB, dI1, dI2, dR)/dt``.

    ``state`` is a :class:`CompartmentState` or an array whose first axis holds
    the five compartments.  The components always sum to ``A``.
    """
    S, B, I1, I2, _ = np.asarray(state, dtype=float)
    p = params
    with np.errstate(over="ignore", invalid="ignore"):
        return _rhs(p, S, B, I1, I2)


def _rhs(p, S, B, I1, I2):
    contact = p.sigma * S * I1 + p.sigma * S * I2
    out1 = p.to_I1 * B
    out2 = p.to_I2 * B
    rec1 = p.recover_I1 * I1
    rec2 = p.recover_I2 * I2
    back = p.backflow * I2
    dS = p.A - contact - p.theta * S
    dB = contact - out1 - out2 + back
    dI1 = out1 - rec1
    dI2 = out2 - rec2 - back
    dR = p.theta * S + rec1 + rec2
    return np.array([dS, dB, dI1, dI2, dR])


def r0(params: OpinionParams):
    """Basic reproduction number in closed form.

    The closed form treats the two disseminator branches separately and leaves
    the I2 -> B backflow out of the bystander exit rate.  With ``m2 > 0`` it is
    therefore smaller than the spectral radius of the next-generation matrix
    (:func:`r0_spectral`), which is the exact local threshold.
    """
    p = params
    factors = {
        "k*theta": p.k * p.theta,
        "m1+m2+n2": p.m1 + p.m2 + p.n2,
        "m1+n1": p.m1 + p.n1,
        "a1+a2+z1+z2": p.a1 + p.a2 + p.z1 + p.z2,
    }
    for name, val in factors.items():
        if np.any(np.asarray(val) == 0):
            raise ZeroDenominator(name)
    kt, d2, d1, tot = factors.values()
    return p.A * p.sigma * p.to_I2 / (kt * d2 * tot) + p.A * p.sigma * p.to_I1 / (kt * d1 * tot)


def next_generation_matrices(params: OpinionParams) -> tuple[np.ndarray, np.ndarray]:
    """New-opinion matrix ``F`` and transition matrix ``V`` over ``(B, I1, I2)``.

    Both are linearised at the zero-spread point ``S = A/theta``.
    """
    p = params
    if p.theta == 0:
        raise ZeroDenominator("theta")
    s0 = p.A / p.theta
    F = np.zeros((3, 3))
    F[0, 1] = F[0, 2] = p.sigma * s0
    V = np.array(
        [
            [p.to_I1 + p.to_I2, 0.0, -p.backflow],
            [-p.to_I1, p.recover_I1, 0.0],
            [-p.to_I2, 0.0, p.recover_I2 + p.backflow],
        ]
    )
    return F, V


def r0_spectral(params: OpinionParams) -> float:
    """Spectral radius of ``F V^-1``, computed numerically."""
    F, V = next_generation_matrices(params)
    try:
        ngm = F @ np.linalg.inv(V)
    except np.linalg.LinAlgError:
        raise ZeroDenominator("V", "transition matrix V is singular") from None
    return float(np.max(np.abs(np.linalg.eigvals(ngm))))


class OpinionMetrics(NamedTuple):
    peak_I2: float
    t_peak: float
    extinction_time: float | None
    horizon: float


@dataclass(frozen=True)
class OpinionRun:
    t: np.ndarray
    states: np.ndarray  # shape (samples, 5)
    metrics: OpinionMetrics
    clamp_events: int
    dt: float

    @property
    def N(self) -> np.ndarray:
        return self.states.sum(axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *COMPARTMENTS])
        for t, row in zip(self.t, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
        return buf.getvalue()


def curve_metrics(t, i2, horizon: float, threshold: float = EXTINCTION_THRESHOLD) -> OpinionMetrics:
    """Peak, time of peak and extinction time of a sampled I2 curve.

    Extinction is the first sample at or after the peak where I2 is below
    ``threshold``.
    """
    t = np.asarray(t, dtype=float)
    i2 = np.asarray(i2, dtype=float)
    ip = int(np.argmax(i2))
    below = np.nonzero(i2[ip:] < threshold)[0]
    ext = float(t[ip + below[0]]) if len(below) else None
    return OpinionMetrics(float(i2[ip]), float(t[ip]), ext, float(horizon))


def stiffness_bound(params: OpinionParams, state) -> float:
    """Rough upper bound on the Jacobian magnitude near ``state``."""
    S, B, I1, I2, _ = np.asarray(state, dtype=float)
    p = params
    n = S + B + I1 + I2
    return float(
        np.max(p.sigma * (n + I1 + I2) + p.theta + p.to_I1 + p.to_I2 + p.recover_I1 + p.recover_I2 + p.backflow)
    )


def integrate_opinion(
    params: OpinionParams,
    init,
    t_end: float = 100.0,
    dt: float = 0.01,
    extinction_threshold: float = EXTINCTION_THRESHOLD,
) -> OpinionRun:
    """Integrate the opinion system with fixed-step RK4, clamping masses at 0."""
    if not dt > 0:
        raise InvalidStep(f"step size must be positive, got {dt!r}")
    y0 = np.asarray(init, dtype=float)
    if np.any(y0 < 0):
        raise ValidationError("initial compartment masses must be >= 0")
    if dt * stiffness_bound(params, y0) > 2.5:
        log.warning("dt=%g is close to or beyond the RK4 stability limit for this start", dt)
    res = rk4(lambda y: opinion_rhs(params, y), y0, t_end, dt, lower=0.0)
    if res.clamp_events:
        log.info("nonnegativity clamp engaged on %d steps", res.clamp_events)
    metrics = curve_metrics(res.t, res.y[:, 3], t_end, extinction_threshold)
    return OpinionRun(res.t, res.y, metrics, res.clamp_events, dt)


def zero_spread_equilibrium(params: OpinionParams) -> CompartmentState:
    """The opinion-free state ``(A/theta, 0, 0, 0)``; ``R`` is reported as 0."""
    if params.theta == 0:
        raise ZeroDenominator("theta")
    return CompartmentState(params.A / params.theta, 0.0, 0.0, 0.0, 0.0)


def _subsystem(params, v):
    return opinion_rhs(params, np.append(v, 0.0))[:4]


def _subsystem_jacobian(params, v):
    S, B, I1, I2 = v
    p = params
    s = p.sigma
    out = p.to_I1 + p.to_I2
    return np.array(
        [
            [-s * (I1 + I2) - p.theta, 0.0, -s * S, -s * S],
            [s * (I1 + I2), -out, s * S, s * S + p.backflow],
            [0.0, p.to_I1, -p.recover_I1, 0.0],
            [0.0, p.to_I2, 0.0, -p.recover_I2 - p.backflow],
        ]
    )


def newton(fun, jac, x0, tol: float = 1e-10, max_iter: int = 100) -> np.ndarray:
    """Damped Newton iteration with residual-halving backtracking."""
    x = np.array(x0, dtype=float)
    r = fun(x)
    norm = np.max(np.abs(r))
    for _ in range(max_iter):
        if norm < tol:
            return x
        try:
            step = np.linalg.solve(jac(x), -r)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular Jacobian in Newton iteration") from None
        lam = 1.0
        while lam > 1e-8:
            trial = x + lam * step
            r_trial = fun(trial)
            n_trial = np.max(np.abs(r_trial))
            if n_trial < (1 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            raise NoConvergence("line search stalled")
        x, r, norm = trial, r_trial, n_trial
    if norm < tol:
        return x
    raise NoConvergence(f"no convergence after {max_iter} Newton iterations (residual {norm:.3g})")


ROOT_TOL = 1e-10
POSITIVE_TOL = 1e-9


def endemic_equilibrium_numeric(
    params: OpinionParams, settle_time: float = 400.0, dt: float | None = None
) -> tuple[float, float, float, float] | None:
    """Positive stationary point of the ``(S, B, I1, I2)`` subsystem, or ``None``.

    A long integration from a slightly seeded zero-spread state provides the
    starting guess; damped Newton then polishes it.  ``None`` means the
    iteration settled on the zero-spread point (no persistent opinion).
    """
    zs = zero_spread_equilibrium(params)
    seed = 1e-3 * zs.S
    y0 = np.array([zs.S, 0.0, seed, seed, 0.0])
    if dt is None:
        dt = min(0.01, 1.0 / stiffness_bound(params, y0))
    tail = rk4(lambda y: opinion_rhs(params, y), y0, settle_time, dt, lower=0.0).y[-1, :4]
    root = newton(
        lambda v: _subsystem(params, v), lambda v: _subsystem_jacobian(params, v), tail, tol=ROOT_TOL
    )
    if np.all(root[1:] > POSITIVE_TOL) and root[0] > 0:
        return tuple(float(v) for v in root)
    return None


@dataclass(frozen=True)
class PrintedEquilibrium:
    values: tuple
    numeric: tuple | None
    mismatch: tuple

    def to_dict(self) -> dict:
        names = COMPARTMENTS[:4]
        return {
            "printed": dict(zip(names, self.values)),
            "numeric": None if self.numeric is None else dict(zip(names, self.numeric)),
            "mismatch": dict(zip(names, self.mismatch)),
        }


def endemic_equilibrium_printed(params: OpinionParams, numeric=None) -> PrintedEquilibrium:
    """Evaluate the closed-form expressions for the non-zero spread point literally.

    Each coordinate is compared with the numerically computed root (computed
    here unless passed in) and flagged when they differ by more than
    ``1e-6 * (1 + |numeric|)``.  With no positive numeric root every
    coordinate is flagged.
    """
    p = params
    q1, q2 = p.to_I1, p.to_I2
    d_s = p.sigma * ((p.n2 + 1) * q1 + (p.m1 + p.n1) * q2)
    d_b = q1 * (p.n2 + 1) + q2 * (p.m1 + p.n2)
    d_1 = p.k * (p.m1 + p.n1)
    d_2 = p.k * (p.n2 + 1)
    for name, val in (("S* denominator", d_s), ("B* denominator", d_b), ("k(m1+n1)", d_1), ("k(n2+1)", d_2)):
        if val == 0:
            raise ZeroDenominator(name)
    S = p.k * (p.m1 + p.n1) * ((p.n2 + 1) * (p.a1 + p.a2 + 1) - q2 * p.m2) / d_s
    B = -p.theta * (p.n2 + 1) * S / d_b
    I1 = q1 * B / d_1
    I2 = q2 * B / d_2
    printed = (float(S), float(B), float(I1), float(I2))
    if numeric is None:
        numeric = endemic_equilibrium_numeric(params)
    if numeric is None:
        flags = (True,) * 4
    else:
        flags = tuple(bool(abs(a - b) > 1e-6 * (1 + abs(b))) for a, b in zip(printed, numeric))
    return PrintedEquilibrium(printed, None if numeric is None else tuple(numeric), flags)


def is_single_peaked(curve, rel_tol: float = 0.05) -> bool:
    """True when the curve rises to one maximum and then falls.

    Wiggles smaller than ``rel_tol`` times the peak height are ignored, which
    is needed for averaged stochastic curves.
    """
    c = np.asarray(curve, dtype=float)
    if c.size == 0:
        return False
    ip = int(np.argmax(c))
    slack = rel_tol * abs(c[ip])
    rising, falling = c[: ip + 1], c[ip:]
    ok_rise = np.all(np.maximum.accumulate(rising) - rising <= slack)
    ok_fall = np.all(falling - np.minimum.accumulate(falling) <= slack)
    return bool(ok_rise and ok_fall)
