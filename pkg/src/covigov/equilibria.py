"""Stability of the 16 pure-strategy profiles of the four-party game.

At a vertex the replicator Jacobian is diagonal, so its eigenvalues are the
diagonal entries ``(1 - 2 s_i) D_i``.  A vertex is an evolutionarily stable
strategy (ESS) when all four are strictly negative.

Besides the numeric classification this module keeps a small symbolic table
of the advantage forms so the sign conditions can be printed per vertex.  The
table is written out independently of :mod:`covigov.game`; the test-suite
checks that both routes agree.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import MalformedPlan
from .game import COORDS, LETTERS, PLAYERS, GameParams, PureProfile, replicator_jacobian

ZERO_TOL = 1e-12


class Stability(str, enum.Enum):
    ESS = "ESS"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"


def classify_eigenvalues(eigenvalues, tol: float = ZERO_TOL) -> Stability:
    ev = np.asarray(eigenvalues, dtype=float)
    if np.all(ev < -tol):
        return Stability.ESS
    if np.any(ev > tol):
        return Stability.UNSTABLE
    return Stability.INDETERMINATE


@dataclass(frozen=True)
class EquilibriumReport:
    profile: PureProfile
    eigenvalues: tuple[float, float, float, float]
    classification: Stability

    @property
    def letter(self) -> str:
        return self.profile.letter

    @property
    def is_ess(self) -> bool:
        return self.classification is Stability.ESS

    def positive_directions(self) -> list[tuple[str, float]]:
        return [(PLAYERS[i], ev) for i, ev in enumerate(self.eigenvalues) if ev > ZERO_TOL]

    def to_dict(self) -> dict:
        return {
            "letter": self.letter,
            "profile": list(self.profile),
            "eigenvalues": list(self.eigenvalues),
            "classification": self.classification.value,
        }


def enumerate_pure_points() -> list[PureProfile]:
    """All 16 vertices in the conventional A...P letter order."""
    return [PureProfile(*coords) for coords in LETTERS.values()]


def classify_point(params: GameParams, profile) -> EquilibriumReport:
    prof = PureProfile.coerce(profile)
    eig = np.diag(replicator_jacobian(params, prof))
    eig = tuple(float(v) + 0.0 for v in eig)  # normalise -0.0
    return EquilibriumReport(prof, eig, classify_eigenvalues(eig))


def classify_all(params: GameParams) -> list[EquilibriumReport]:
    return [classify_point(params, p) for p in enumerate_pure_points()]


def ess_set(params: GameParams) -> list[EquilibriumReport]:
    return [r for r in classify_all(params) if r.is_ess]


# Advantage forms: (coefficient, parameter symbols multiplied together, coordinate
# the term is multiplied by or None).
_ADVANTAGE_TERMS = {
    "x": [
        (1, ("Rv1",), None), (-1, ("Cv1",), None), (-1, ("H2",), "m"), (1, ("Cv2",), None),
        (1, ("H1",), None), (1, ("H2",), None), (1, ("H3",), None), (-1, ("H3",), "y"),
        (-1, ("H1",), "z"),
    ],
    "y": [
        (1, ("Rp",), None), (1, ("delta",), "z"), (-1, ("delta",), None), (1, ("Cp",), None),
        (1, ("phi", "g1"), "m"), (1, ("Lp",), "x"),
    ],
    "z": [
        (1, ("W",), None), (-1, ("Cm1",), None), (1, ("Rm1",), "y"), (-1, ("W",), "x"),
        (1, ("P",), None), (1, ("Cm2",), None), (-1, ("Rm2",), None), (1, ("beta", "g2"), "m"),
    ],
    "m": [
        (-1, ("Cg1",), None), (1, ("F1",), "x"), (1, ("F2",), "z"), (1, ("Cg2",), None),
        (-1, ("F3",), "y"), (1, ("F3",), None),
    ],
}  # fmt: skip


def _format_terms(terms: dict) -> str:
    if not terms:
        return "0"
    out = []
    for i, (mono, coef) in enumerate(terms.items()):
        name = "*".join(mono)
        mag = abs(coef)
        body = name if mag == 1 else f"{mag:g}*{name}"
        if i == 0:
            out.append(body if coef > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if coef > 0 else f"- {body}")
    return " ".join(out)


@dataclass(frozen=True)
class EssCondition:
    """Sign condition one player must meet for a vertex to be an ESS.

    ``advantage`` maps monomials (tuples of parameter names) to integer
    coefficients: it is the player's payoff advantage evaluated at the vertex.
    The matching Jacobian eigenvalue is ``(1 - 2 s) * advantage``, so the
    condition reads ``advantage > 0`` when the player's vertex coordinate is 1
    and ``advantage < 0`` when it is 0.
    """

    player: str
    coordinate: str
    vertex_value: int
    advantage: dict = field(hash=False)

    @property
    def required_sign(self) -> str:
        return ">" if self.vertex_value == 1 else "<"

    def advantage_value(self, params: GameParams) -> float:
        total = 0.0
        for mono, coef in self.advantage.items():
            term = float(coef)
            for sym in mono:
                term *= getattr(params, sym)
            total += term
        return total

    def eigenvalue(self, params: GameParams) -> float:
        return (1 - 2 * self.vertex_value) * self.advantage_value(params)

    def satisfied(self, params: GameParams) -> bool:
        return self.eigenvalue(params) < -ZERO_TOL

    def describe(self) -> str:
        return f"{_format_terms(self.advantage)} {self.required_sign} 0"

    def to_dict(self) -> dict:
        return {"player": self.player, "condition": self.describe()}


def ess_conditions(profile) -> list[EssCondition]:
    """Symbolic ESS conditions (one per player) for a vertex."""
    prof = PureProfile.coerce(profile)
    at = dict(zip(COORDS, prof))
    conds = []
    for player, coord in zip(PLAYERS, COORDS):
        terms: dict = {}
        for coef, mono, dep in _ADVANTAGE_TERMS[coord]:
            if dep is not None and at[dep] == 0:
                continue
            terms[mono] = terms.get(mono, 0) + coef
        terms = {k: v for k, v in terms.items() if v != 0}
        conds.append(EssCondition(player, coord, at[coord], terms))
    return conds


@dataclass(frozen=True)
class PathPhase:
    params: GameParams
    target: PureProfile
    label: str = ""


@dataclass(frozen=True)
class PathPlan:
    """Ordered phases, each with its own parameters and intended stable vertex."""

    phases: tuple

    def __init__(self, phases: Sequence):
        norm = []
        for i, ph in enumerate(phases):
            if not isinstance(ph, PathPhase):
                params, target, *rest = ph
                ph = PathPhase(params, PureProfile.coerce(target), rest[0] if rest else "")
            else:
                ph = PathPhase(ph.params, PureProfile.coerce(ph.target), ph.label)
            norm.append(ph if ph.label else PathPhase(ph.params, ph.target, f"phase {i + 1}"))
        if len(norm) < 2:
            raise MalformedPlan("a path needs at least two phases")
        for a, b in zip(norm, norm[1:]):
            if a.target == b.target:
                raise MalformedPlan(
                    f"consecutive phases {a.label!r} and {b.label!r} share target {a.target}"
                )
        object.__setattr__(self, "phases", tuple(norm))

    @property
    def letters(self) -> str:
        return "-".join(ph.target.letter for ph in self.phases)


@dataclass(frozen=True)
class PathReport:
    plan: PathPlan
    reports: tuple
    feasible: bool
    failures: tuple  # (phase label, player, eigenvalue) for every non-negative eigenvalue

    def to_dict(self) -> dict:
        return {
            "path": self.plan.letters,
            "feasible": self.feasible,
            "phases": [
                {"label": ph.label, **rep.to_dict()} for ph, rep in zip(self.plan.phases, self.reports)
            ],
            "failures": [
                {"phase": lbl, "player": who, "eigenvalue": ev} for lbl, who, ev in self.failures
            ],
        }


def validate_path(plan) -> PathReport:
    """Check that every phase's target vertex is an ESS under that phase's parameters."""
    if not isinstance(plan, PathPlan):
        plan = PathPlan(plan)
    reports = []
    failures = []
    for ph in plan.phases:
        rep = classify_point(ph.params, ph.target)
        reports.append(rep)
        if not rep.is_ess:
            failures.extend(
                (ph.label, PLAYERS[i], ev) for i, ev in enumerate(rep.eigenvalues) if ev >= -ZERO_TOL
            )
    return PathReport(plan, tuple(reports), not failures, tuple(failures))
