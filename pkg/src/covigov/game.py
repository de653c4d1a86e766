"""Four-party evolutionary game: victim, perpetrator, online media, government.

Strategy probabilities are ``x`` (victim takes action), ``y`` (perpetrator stops
attacking), ``z`` (media gives correct guidance) and ``m`` (government applies
strong regulation).  Each player's replicator equation has the form
``s' = s (1 - s) D_s`` where ``D_s`` is the payoff advantage of the first
strategy over the second.  Every ``D_s`` is affine in the other players'
probabilities, which makes the Jacobian at the 16 vertices diagonal.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError, ZeroDenominator

PLAYERS = ("victim", "perpetrator", "media", "government")
COORDS = ("x", "y", "z", "m")

# Vertex names in the order the equilibrium list is usually printed.
LETTERS = {
    "A": (0, 0, 0, 0),
    "B": (1, 0, 0, 0),
    "C": (0, 1, 0, 0),
    "D": (0, 0, 0, 1),
    "E": (1, 1, 0, 0),
    "F": (1, 0, 0, 1),
    "L": (0, 1, 0, 1),
    "G": (1, 1, 0, 1),
    "M": (0, 0, 1, 0),
    "N": (1, 0, 1, 0),
    "H": (0, 1, 1, 0),
    "O": (0, 0, 1, 1),
    "P": (1, 0, 1, 1),
    "I": (0, 1, 1, 1),
    "J": (1, 1, 1, 0),
    "K": (1, 1, 1, 1),
}
_LETTER_OF = {v: k for k, v in LETTERS.items()}


@dataclass(frozen=True)
class GameParams:
    """Payoff, cost and punishment parameters of the four-party game.

    ``phi`` and ``beta`` are punishment severities in [0, 1] applied to the
    penalty bases ``g1`` (perpetrator) and ``g2`` (media).  Everything else is
    a non-negative payoff quantity; no unit is implied.
    """

    # victim
    Cv1: float
    Cv2: float
    Rv1: float
    H1: float
    H2: float
    H3: float
    # perpetrator
    Rp: float
    Cp: float
    delta: float
    Lp: float
    g1: float
    phi: float
    # online media
    Cm1: float
    Cm2: float
    Rm1: float
    Rm2: float
    P: float
    W: float
    g2: float
    beta: float
    # government
    Cg1: float
    Cg2: float
    F1: float
    F2: float
    F3: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValidationError(f"{f.name}: expected a real number, got {v!r}")
            if not math.isfinite(v):
                raise ValidationError(f"{f.name}: must be finite")
            if v < 0:
                raise ValidationError(f"{f.name}: must be >= 0, got {v}")
        if self.phi > 1:
            raise ValidationError(f"phi: must lie in [0, 1], got {self.phi}")
        if self.beta > 1:
            raise ValidationError(f"beta: must lie in [0, 1], got {self.beta}")
        if not self.Cm2 < self.Cm1:
            raise ValidationError("Cm2 < Cm1 required")
        if not self.Cg2 < self.Cg1:
            raise ValidationError("Cg2 < Cg1 required")

    @classmethod
    def baseline(cls, **overrides) -> "GameParams":
        """Reference parameter set (g1=1000, g2=10000, phi=0.2, beta=0.4, ...)."""
        values = dict(BASELINE)
        unknown = set(overrides) - set(values)
        if unknown:
            raise ValidationError(f"unknown game parameter(s): {', '.join(sorted(unknown))}")
        values.update(overrides)
        return cls(**values)

    def replace(self, **changes) -> "GameParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """Short stable hash of the parameter values."""
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


BASELINE = dict(
    Cv1=1000, Cv2=980, Rv1=50, H1=15, H2=16, H3=20,
    Rp=8, Cp=10, delta=5, Lp=20, g1=1000, phi=0.2,
    Cm1=4000, Cm2=800, Rm1=1500, Rm2=2000, P=300, W=100, g2=10000, beta=0.4,
    Cg1=5000, Cg2=1000, F1=2000, F2=2500, F3=1000,
)  # fmt: skip


@dataclass(frozen=True)
class StrategyState:
    """Mixed-strategy probabilities ``(x, y, z, m)``."""

    x: float
    y: float
    z: float
    m: float

    def __post_init__(self):
        for name in COORDS:
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name}: probability must lie in [0, 1], got {v!r}")

    def __iter__(self):
        return iter((self.x, self.y, self.z, self.m))

    def __array__(self, dtype=None, copy=None):
        return np.array(tuple(self), dtype=dtype or float)


class PureProfile(NamedTuple):
    """A vertex of the strategy cube, i.e. one of the 16 pure profiles."""

    x: int
    y: int
    z: int
    m: int

    @property
    def letter(self) -> str:
        return _LETTER_OF[tuple(self)]

    @classmethod
    def from_letter(cls, letter: str) -> "PureProfile":
        try:
            return cls(*LETTERS[letter.upper()])
        except KeyError:
            raise ValidationError(f"unknown equilibrium letter {letter!r}") from None

    @classmethod
    def coerce(cls, value) -> "PureProfile":
        if isinstance(value, str):
            return cls.from_letter(value)
        coords = tuple(int(c) for c in value)
        if len(coords) != 4 or any(c not in (0, 1) for c in coords) or coords != tuple(value):
            raise ValidationError(f"not a pure profile: {value!r}")
        return cls(*coords)

    def __str__(self):
        return f"{self.letter}{tuple(self)}".replace(" ", "")


class ExpectedPayoffs(NamedTuple):
    Ux: float
    U_not_x: float
    Uy: float
    U_not_y: float
    Uz: float
    U_not_z: float
    Um: float
    U_not_m: float


def _coords(state):
    x, y, z, m = (float(c) for c in state)
    return x, y, z, m


def expected_payoffs(params: GameParams, state) -> ExpectedPayoffs:
    """Expected payoff of each of the eight pure strategies against ``state``."""
    p = params
    x, y, z, m = _coords(state)
    return ExpectedPayoffs(
        Ux=p.Rv1 - p.Cv1,
        U_not_x=p.H2 * m - p.Cv2 - p.H1 - p.H2 - p.H3 + p.H3 * y + p.H1 * z,
        Uy=p.Rp,
        U_not_y=-p.delta * z + p.delta - p.Cp - p.phi * p.g1 * m - p.Lp * x,
        Uz=p.W - p.Cm1 + p.Rm1 * y - p.W * x,
        U_not_z=-p.P - p.Cm2 + p.Rm2 - p.beta * p.g2 * m,
        Um=-p.Cg1 + p.F1 * x + p.F2 * z,
        U_not_m=-p.Cg2 + p.F3 * y - p.F3,
    )


def payoff_advantages(params: GameParams, state) -> np.ndarray:
    """Payoff advantage of each player's first strategy, ``U_s - U_(1-s)``."""
    u = expected_payoffs(params, state)
    return np.array([u.Ux - u.U_not_x, u.Uy - u.U_not_y, u.Uz - u.U_not_z, u.Um - u.U_not_m])


def advantage_gradients(params: GameParams) -> np.ndarray:
    """Constant matrix ``G[i, j] = d(advantage_i)/d(s_j)``; the diagonal is zero."""
    p = params
    return np.array(
        [
            [0.0, -p.H3, -p.H1, -p.H2],
            [p.Lp, 0.0, p.delta, p.phi * p.g1],
            [-p.W, p.Rm1, 0.0, p.beta * p.g2],
            [p.F1, -p.F3, p.F2, 0.0],
        ]
    )


def replicator_rhs(params: GameParams, state) -> np.ndarray:
    """Time derivative ``(dx/dt, dy/dt, dz/dt, dm/dt)`` of the replicator system."""
    s = np.array(_coords(state))
    return s * (1.0 - s) * payoff_advantages(params, s)


def replicator_jacobian(params: GameParams, state) -> np.ndarray:
    """Jacobian of :func:`replicator_rhs` at ``state``.

    Row ``i`` is ``s_i (1 - s_i) dD_i/ds_j`` off the diagonal and
    ``(1 - 2 s_i) D_i`` on it.  Multiplying by ``s_i (1 - s_i)`` keeps the
    off-diagonal entries exactly zero at every vertex.
    """
    s = np.array(_coords(state))
    weight = s * (1.0 - s)
    jac = weight[:, None] * advantage_gradients(params)
    np.fill_diagonal(jac, (1.0 - 2.0 * s) * payoff_advantages(params, s))
    return jac


def _check_prob(name, v):
    if not 0.0 <= v <= 1.0:
        raise ValidationError(f"{name}: probability must lie in [0, 1], got {v!r}")


def threshold_victim_m0(params: GameParams, y: float, z: float) -> float:
    """Government regulation level above which the victim settles on non-action."""
    _check_prob("y", y)
    _check_prob("z", z)
    p = params
    if p.H2 == 0:
        raise ZeroDenominator("H2")
    num = p.Rv1 - p.Cv1 + p.Cv2 + p.H1 + p.H2 + p.H3 - p.H3 * y - p.H1 * z
    return num / p.H2


def threshold_perpetrator_m0(params: GameParams, x: float, z: float) -> float:
    """Regulation level above which the perpetrator stops attacking.

    The denominator is ``-phi*g1``, so the returned value is usually negative:
    any regulation level then deters the perpetrator.
    """
    _check_prob("x", x)
    _check_prob("z", z)
    p = params
    if p.phi * p.g1 == 0:
        raise ZeroDenominator("phi*g1")
    num = p.Rp + p.delta * z - p.delta + p.Cp + p.Lp * x
    return num / (-p.phi * p.g1)


def threshold_media_m0(params: GameParams, x: float, y: float) -> float:
    """Regulation level above which the media settles on correct guidance."""
    _check_prob("x", x)
    _check_prob("y", y)
    p = params
    if p.beta * p.g2 == 0:
        raise ZeroDenominator("beta*g2")
    num = p.W - p.Cm1 + p.Rm1 * y - p.W * x + p.P + p.Cm2 - p.Rm2
    return num / (-p.beta * p.g2)


def threshold_government_y0(params: GameParams, x: float, z: float) -> float:
    """Perpetrator stop-attacking level below which strong regulation is stable."""
    _check_prob("x", x)
    _check_prob("z", z)
    p = params
    if p.F3 == 0:
        raise ZeroDenominator("F3")
    return (-p.Cg1 + p.F1 * x + p.F2 * z + p.Cg2 + p.F3) / p.F3


def pure_profile_payoffs(params: GameParams, profile) -> tuple[float, float, float, float]:
    """Realised payoff of each player when everybody plays ``profile``."""
    prof = PureProfile.coerce(profile)
    u = expected_payoffs(params, prof)
    return (
        u.Ux if prof.x else u.U_not_x,
        u.Uy if prof.y else u.U_not_y,
        u.Uz if prof.z else u.U_not_z,
        u.Um if prof.m else u.U_not_m,
    )


def stable_step(params: GameParams, cap: float = 0.01, safety: float = 2.0) -> float:
    """Largest RK4 step that stays inside the scheme's stability interval.

    The Jacobian's spectral radius is bounded over the whole cube by the largest
    vertex advantage plus a quarter of the largest absolute row sum of
    :func:`advantage_gradients`.  RK4 is stable on the negative real axis up to
    ``|h*lambda| ~ 2.78``; ``safety`` sets the margin used here.
    """
    worst = 0.0
    for vertex in LETTERS.values():
        worst = max(worst, float(np.max(np.abs(payoff_advantages(params, vertex)))))
    worst += 0.25 * float(np.max(np.abs(advantage_gradients(params)).sum(axis=1)))
    if worst == 0.0:
        return cap
    return min(cap, safety / worst)
