"""Experiment configuration documents.

A run is described by one JSON document.  Parameter blocks are partial: any
field left out takes its reference value (``GameParams.baseline()`` for the
game, the control group for the opinion model).  Unknown keys, and blocks the
selected mode does not use, are rejected.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field
from importlib import resources

from .abm import AbmConfig
from .errors import ParseError, ValidationError
from .game import BASELINE, COORDS, GameParams, PureProfile, StrategyState
from .opinion import COMPARTMENTS, GROUPS, CompartmentState, OpinionParams

MODES = (
    "game-evolve",
    "game-equilibria",
    "game-sweep",
    "opinion-r0",
    "opinion-ode",
    "opinion-abm",
    "opinion-equilibria",
    "case-run",
)

# block -> modes that accept it; "required" lists the blocks a mode cannot do without
_ACCEPTS = {
    "game": {"game-evolve", "game-equilibria", "game-sweep"},
    "opinion": {"opinion-r0", "opinion-ode", "opinion-abm", "opinion-equilibria", "case-run"},
    "groups": {"opinion-r0", "opinion-ode", "opinion-abm", "opinion-equilibria"},
    "initial": {"game-evolve", "game-sweep", "opinion-ode"},
    "solver": {"game-evolve", "game-sweep", "opinion-ode", "case-run"},
    "sweep": {"game-sweep"},
    "path": {"game-equilibria"},
    "abm": {"opinion-abm", "case-run"},
    "case": {"case-run"},
}
_REQUIRED = {
    "game-evolve": ("game",),
    "game-equilibria": ("game",),
    "game-sweep": ("game", "sweep"),
    "case-run": ("case",),
}
_TOP_KEYS = {"mode", "output", "seed", *_ACCEPTS}

SOLVER_DEFAULTS = {
    "game": {"dt": None, "t_end": 50.0},
    "opinion": {"dt": 0.01, "t_end": 100.0},
    "case": {"dt": 0.001, "t_end": None},
}
GAME_INITIAL = (0.5, 0.5, 0.5, 0.5)
OPINION_INITIAL = (800.0, 100.0, 50.0, 50.0, 0.0)


@dataclass(frozen=True)
class Solver:
    dt: float | None
    t_end: float | None


@dataclass(frozen=True)
class SweepSpec:
    symbol: str
    values: tuple


@dataclass(frozen=True)
class CaseStage:
    label: str
    duration: float
    params: OpinionParams
    initial: tuple
    game: GameParams | None = None
    target: PureProfile | None = None
    overrides: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CasePlan:
    stages: tuple

    def __post_init__(self):
        if not self.stages:
            raise ValidationError("case: at least one stage required")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    game: GameParams | None = None
    opinion: OpinionParams | None = None
    groups: tuple | None = None  # ((label, OpinionParams), ...)
    initial: tuple | None = None
    solver: Solver | None = None
    sweep: SweepSpec | None = None
    path: tuple | None = None  # ((label, GameParams, PureProfile), ...)
    abm: AbmConfig | None = None
    case: CasePlan | None = None
    output: str = "out"
    seed: int = 0

    def param_sets(self) -> list[tuple[str, OpinionParams]]:
        if self.groups:
            return list(self.groups)
        return [("default", self.opinion)]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _expect(cond, msg):
    if not cond:
        raise ValidationError(msg)


def _real(where, v):
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool), f"{where}: expected a number, got {v!r}")
    return float(v)


def _int(where, v):
    _expect(isinstance(v, int) and not isinstance(v, bool), f"{where}: expected an integer, got {v!r}")
    return v


def _mapping(where, v, allowed=None):
    _expect(isinstance(v, dict), f"{where}: expected an object")
    if allowed is not None:
        extra = [k for k in v if k not in allowed]
        _expect(not extra, f"{where}: unknown key(s) {', '.join(map(repr, extra))}")
    return v


def _game(where, block, base=None) -> GameParams:
    _mapping(where, block, BASELINE)
    values = dict(BASELINE) if base is None else base.as_dict()
    values.update({k: _real(f"{where}.{k}", v) for k, v in block.items()})
    try:
        return GameParams(**{k: float(v) for k, v in values.items()})
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


_OPINION_FIELDS = [f.name for f in dataclasses.fields(OpinionParams)]


def _opinion(where, block, base=None) -> OpinionParams:
    if isinstance(block, str):
        key = block.lower().removeprefix("group").strip()
        _expect(key in GROUPS, f"{where}: unknown experimental group {block!r}")
        return OpinionParams(**GROUPS[key])
    _mapping(where, block, _OPINION_FIELDS)
    values = (base or OpinionParams.control()).as_dict()
    values.update({k: _real(f"{where}.{k}", v) for k, v in block.items()})
    try:
        return OpinionParams(**{k: float(v) for k, v in values.items()})
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _initial_game(block):
    _mapping("initial", block, COORDS)
    vals = dict(zip(COORDS, GAME_INITIAL))
    vals.update({k: _real(f"initial.{k}", v) for k, v in block.items()})
    try:
        return tuple(StrategyState(**vals))
    except ValidationError as exc:
        raise ValidationError(f"initial: {exc}") from None


def _initial_opinion(where, block, default=OPINION_INITIAL):
    _mapping(where, block, COMPARTMENTS)
    vals = dict(zip(COMPARTMENTS, default))
    vals.update({k: _real(f"{where}.{k}", v) for k, v in block.items()})
    try:
        return tuple(CompartmentState(**vals))
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _solver(block, family):
    defaults = SOLVER_DEFAULTS[family]
    allowed = [k for k, v in defaults.items() if v is not None or family == "game"]
    _mapping("solver", block, allowed)
    out = dict(defaults)
    for k, v in block.items():
        if v is None and defaults[k] is None:
            continue
        out[k] = _real(f"solver.{k}", v)
        _expect(out[k] > 0, f"solver.{k}: must be > 0")
    if out["t_end"] is not None and out["dt"] is not None:
        _expect(out["dt"] <= out["t_end"], "solver: dt must not exceed t_end")
    return Solver(out["dt"], out["t_end"])


def _abm(block, seed):
    allowed = [f.name for f in dataclasses.fields(AbmConfig) if f.name != "base_seed"]
    _mapping("abm", block, allowed)
    kw = {}
    for k, v in block.items():
        if k == "initial":
            _expect(isinstance(v, list) and len(v) == 5, "abm.initial: five counts (S, B, I1, I2, R) required")
            kw[k] = tuple(_int(f"abm.initial[{i}]", c) for i, c in enumerate(v))
        else:
            kw[k] = _int(f"abm.{k}", v)
    try:
        return AbmConfig(base_seed=seed, **kw)
    except ValidationError as exc:
        raise ValidationError(f"abm: {exc}") from None


def _case(block, base: OpinionParams):
    _mapping("case", block, ["stages"])
    stages = block.get("stages")
    _expect(isinstance(stages, list) and stages, "case.stages: a non-empty list is required")
    out = []
    for i, st in enumerate(stages):
        where = f"case.stages[{i}]"
        _mapping(where, st, ["label", "duration", "opinion", "initial", "game", "target"])
        label = st.get("label")
        _expect(isinstance(label, str) and label, f"{where}.label: non-empty string required")
        duration = _real(f"{where}.duration", st.get("duration", 0.0))
        _expect(duration >= 0, f"{where}.duration: must be >= 0")
        overrides = st.get("opinion", {})
        params = _opinion(f"{where}.opinion", overrides, base)
        initial = _initial_opinion(f"{where}.initial", st.get("initial", {}), (0.0,) * 5)
        _expect(duration == 0 or sum(initial) > 0, f"{where}.initial: empty population")
        game = target = None
        if "game" in st or "target" in st:
            _expect("game" in st and "target" in st, f"{where}: 'game' and 'target' go together")
            game = _game(f"{where}.game", st["game"])
            try:
                target = PureProfile.coerce(st["target"])
            except ValidationError as exc:
                raise ValidationError(f"{where}.target: {exc}") from None
        kept = dict(overrides) if isinstance(overrides, dict) else {"group": overrides}
        out.append(CaseStage(label, duration, params, initial, game, target, kept))
    return CasePlan(tuple(out))


def _path(block, game):
    _expect(isinstance(block, list), "path: expected a list of phases")
    phases = []
    for i, ph in enumerate(block):
        where = f"path[{i}]"
        _mapping(where, ph, ["label", "target", "game"])
        _expect("target" in ph, f"{where}.target: required")
        try:
            target = PureProfile.coerce(ph["target"])
        except ValidationError as exc:
            raise ValidationError(f"{where}.target: {exc}") from None
        phases.append((ph.get("label", f"phase {i + 1}"), _game(f"{where}.game", ph.get("game", {}), game), target))
    return tuple(phases)


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed configuration document: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("configuration document must be a JSON object")
    return doc


def parse_config(text: str, mode: str | None = None) -> ExperimentConfig:
    """Parse and validate a configuration document.

    ``mode`` (from the command line) fills in a missing ``"mode"`` key and must
    agree with it when both are given.
    """
    doc = load_document(text) if isinstance(text, str) else dict(text)
    _mapping("config", doc, _TOP_KEYS)
    doc_mode = doc.get("mode")
    if mode is not None and doc_mode is not None and mode != doc_mode:
        raise ValidationError(f"mode: document says {doc_mode!r} but {mode!r} was requested")
    mode = mode or doc_mode
    _expect(mode in MODES, f"mode: expected one of {', '.join(MODES)}, got {mode!r}")

    for block in _ACCEPTS:
        if block in doc and mode not in _ACCEPTS[block]:
            raise ValidationError(f"{block}: block not used by mode {mode!r}")
    for block in _REQUIRED.get(mode, ()):
        _expect(block in doc, f"{block}: block required by mode {mode!r}")
    if mode.startswith("opinion-"):
        _expect("opinion" in doc or "groups" in doc, f"opinion: block (or groups) required by mode {mode!r}")

    seed = _int("seed", doc.get("seed", 0))
    _expect(0 <= seed < 2**64, "seed: must be an unsigned 64-bit integer")
    output = doc.get("output", "out")
    _expect(isinstance(output, str) and output, "output: non-empty path string required")

    kw = dict(mode=mode, output=output, seed=seed)
    if "game" in doc:
        kw["game"] = _game("game", doc["game"])
    if "opinion" in doc:
        kw["opinion"] = _opinion("opinion", doc["opinion"])
    if "groups" in doc:
        groups = _mapping("groups", doc["groups"])
        _expect(groups, "groups: at least one group required")
        kw["groups"] = tuple(
            (str(label), _opinion(f"groups.{label}", g, kw.get("opinion"))) for label, g in groups.items()
        )
    if mode.startswith("game-"):
        family = "game"
    elif mode == "case-run":
        family = "case"
    else:
        family = "opinion"
    if mode in _ACCEPTS["solver"]:
        kw["solver"] = _solver(doc.get("solver", {}), family)
    if mode in ("game-evolve", "game-sweep"):
        kw["initial"] = _initial_game(doc.get("initial", {}))
    elif mode == "opinion-ode":
        kw["initial"] = _initial_opinion("initial", doc.get("initial", {}))
    if mode == "game-sweep":
        sw = _mapping("sweep", doc["sweep"], ["symbol", "values"])
        _expect(sw.get("symbol") in ("phi", "beta"), "sweep.symbol: 'phi' or 'beta' required")
        vals = sw.get("values", [])
        _expect(isinstance(vals, list), "sweep.values: list required")
        vals = tuple(_real("sweep.values", v) for v in vals)
        bad = [v for v in vals if not 0 <= v <= 1]
        _expect(not bad, f"sweep.values: outside [0, 1]: {bad}")
        kw["sweep"] = SweepSpec(sw["symbol"], vals)
    if "path" in doc:
        kw["path"] = _path(doc["path"], kw["game"])
    if mode == "opinion-abm" or "abm" in doc:
        kw["abm"] = _abm(doc.get("abm", {}), seed)
    if mode == "case-run":
        kw["case"] = _case(doc["case"], kw.get("opinion"))
    return ExperimentConfig(**kw)


def to_document(config: ExperimentConfig) -> dict:
    """Fully resolved document; ``parse_config`` of it yields an equal config."""
    c = config
    doc: dict = {"mode": c.mode, "output": c.output, "seed": c.seed}
    if c.game is not None:
        doc["game"] = c.game.as_dict()
    if c.opinion is not None:
        doc["opinion"] = c.opinion.as_dict()
    if c.groups is not None:
        doc["groups"] = {label: p.as_dict() for label, p in c.groups}
    if c.initial is not None:
        names = COORDS if c.mode.startswith("game-") else COMPARTMENTS
        doc["initial"] = dict(zip(names, c.initial))
    if c.solver is not None:
        doc["solver"] = {k: v for k, v in dataclasses.asdict(c.solver).items() if v is not None}
    if c.sweep is not None:
        doc["sweep"] = {"symbol": c.sweep.symbol, "values": list(c.sweep.values)}
    if c.path is not None:
        doc["path"] = [{"label": lbl, "target": t.letter, "game": g.as_dict()} for lbl, g, t in c.path]
    if c.abm is not None:
        a = dataclasses.asdict(c.abm)
        a.pop("base_seed")
        a["initial"] = list(a["initial"])
        doc["abm"] = a
    if c.case is not None:
        stages = []
        for st in c.case.stages:
            d = {
                "label": st.label,
                "duration": st.duration,
                "opinion": st.params.as_dict(),
                "initial": dict(zip(COMPARTMENTS, st.initial)),
            }
            if st.game is not None:
                d["game"] = st.game.as_dict()
                d["target"] = st.target.letter
            stages.append(d)
        doc["case"] = {"stages": stages}
    return doc


def serialize(config: ExperimentConfig) -> str:
    return json.dumps(to_document(config), indent=2) + "\n"


def preset_names() -> list[str]:
    root = resources.files("covigov") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def preset_text(name: str) -> str:
    if not re.fullmatch(r"[A-Za-z0-9_.-]+", name or ""):
        raise ValidationError(f"invalid preset name {name!r}")
    path = resources.files("covigov") / "presets" / f"{name}.json"
    if not path.is_file():
        raise ValidationError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path.read_text()


def load_preset(name: str, **kw) -> ExperimentConfig:
    return parse_config(preset_text(name), **kw)
