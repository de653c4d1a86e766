"""Experiment orchestration and artifact emission."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .abm import run as run_abm
from .config import CasePlan, ExperimentConfig, to_document
from .dynamics import convergence_time, detect_convergence, integrate_replicator, sweep
from .equilibria import classify_all, classify_point, ess_conditions, validate_path
from .errors import ArtifactIOError, CovigovError
from .opinion import (
    COMPARTMENTS,
    endemic_equilibrium_numeric,
    endemic_equilibrium_printed,
    integrate_opinion,
    r0,
    r0_spectral,
    zero_spread_equilibrium,
)

log = logging.getLogger(__name__)


@dataclass
class Artifacts:
    """Files produced by a run: CSV bodies keyed by file name plus the JSON summary."""

    csv: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    status: str = "ok"
    error: str | None = None


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "-", label).strip("-").lower() or "run"


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def emit_artifacts(results: Artifacts, directory) -> list[Path]:
    """Write the CSVs, ``summary.json`` and ``manifest.json`` into ``directory``.

    The manifest records the resolved configuration and a SHA-256 digest of
    every other file, so identical inputs give byte-identical outputs.
    """
    out = Path(directory)
    written = []
    digests = {}

    def write(name, text):
        path = out / name
        try:
            path.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            raise ArtifactIOError(path, exc.strerror or str(exc)) from None
        written.append(path)
        digests[name] = hashlib.sha256(text.encode()).hexdigest()

    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactIOError(out, exc.strerror or str(exc)) from None
    if not os.access(out, os.W_OK):
        raise ArtifactIOError(out, "directory not writable")
    for name, text in results.csv.items():
        write(name, text)
    write("summary.json", _dumps(results.summary))
    manifest = {
        "package": "covigov",
        "version": __version__,
        "status": results.status,
        "error": results.error,
        "seed": results.config.get("seed"),
        "config": results.config,
        "files": dict(digests),
    }
    write("manifest.json", _dumps(manifest))
    return written


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, (int, str)) else repr(float(v)) for v in row])
    return buf.getvalue()


# -- modes -------------------------------------------------------------------


def _game_evolve(cfg: ExperimentConfig, art: Artifacts):
    traj = integrate_replicator(cfg.game, cfg.initial, cfg.solver.t_end, cfg.solver.dt)
    prof = detect_convergence(traj)
    art.csv["trajectory.csv"] = traj.to_csv()
    art.summary.update(
        final_state=list(traj.final),
        termination=traj.reason,
        dt=traj.dt,
        t_final=float(traj.t[-1]),
        converged=None if prof is None else prof.letter,
        convergence_time=None if prof is None else convergence_time(traj, prof),
        vertex_report=None if prof is None else classify_point(cfg.game, prof).to_dict(),
        params_hash=traj.params_hash,
    )


def _game_equilibria(cfg: ExperimentConfig, art: Artifacts):
    reports = classify_all(cfg.game)
    art.summary["points"] = [
        {**r.to_dict(), "conditions": [c.to_dict() for c in ess_conditions(r.profile)]} for r in reports
    ]
    art.summary["ess"] = [r.letter for r in reports if r.is_ess]
    if cfg.path:
        rep = validate_path([(g, t, lbl) for lbl, g, t in cfg.path])
        art.summary["path"] = rep.to_dict()


def _game_sweep(cfg: ExperimentConfig, art: Artifacts):
    res = sweep(cfg.game, cfg.sweep.symbol, cfg.sweep.values, cfg.initial, cfg.solver.t_end, cfg.solver.dt)
    art.summary["sweep"] = res.to_dict()
    for i, traj in enumerate(res.trajectories):
        art.csv[f"sweep_{res.symbol}_{i:02d}.csv"] = traj.to_csv()


def _opinion_r0(cfg: ExperimentConfig, art: Artifacts):
    art.summary["groups"] = {
        label: {"r0": float(r0(p)), "r0_spectral": r0_spectral(p)} for label, p in cfg.param_sets()
    }


def _opinion_ode(cfg: ExperimentConfig, art: Artifacts):
    out = {}
    for label, p in cfg.param_sets():
        res = integrate_opinion(p, cfg.initial, cfg.solver.t_end, cfg.solver.dt)
        art.csv[f"ode_{_slug(label)}.csv"] = res.to_csv()
        out[label] = {"r0": float(r0(p)), "metrics": res.metrics._asdict(), "clamp_events": res.clamp_events}
    art.summary["groups"] = out


def _opinion_abm(cfg: ExperimentConfig, art: Artifacts):
    out = {}
    for label, p in cfg.param_sets():
        res = run_abm(cfg.abm, p)
        art.csv[f"abm_{_slug(label)}.csv"] = res.to_csv()
        out[label] = {"r0": float(r0(p)), **res.metrics()}
    art.summary["groups"] = out
    art.summary["peak_order"] = sorted(out, key=lambda k: out[k]["mean_peak_I2_density"])


def _opinion_equilibria(cfg: ExperimentConfig, art: Artifacts):
    out = {}
    for label, p in cfg.param_sets():
        numeric = endemic_equilibrium_numeric(p)
        printed = endemic_equilibrium_printed(p, numeric=numeric) if numeric is not None else None
        out[label] = {
            "r0": float(r0(p)),
            "r0_spectral": r0_spectral(p),
            "zero_spread": dict(zip(COMPARTMENTS[:4], list(zero_spread_equilibrium(p))[:4])),
            "endemic_numeric": None if numeric is None else dict(zip(COMPARTMENTS[:4], numeric)),
            "endemic_printed": None if printed is None else printed.to_dict(),
        }
    art.summary["groups"] = out


@dataclass
class StageResult:
    label: str
    params: dict
    r0: float
    r0_spectral: float
    run: object | None = None
    abm: object | None = None
    ess: dict | None = None

    def to_dict(self) -> dict:
        d = {"label": self.label, "params": self.params, "r0": self.r0, "r0_spectral": self.r0_spectral}
        d["metrics"] = None if self.run is None else self.run.metrics._asdict()
        if self.abm is not None:
            d["abm"] = self.abm.metrics()
        if self.ess is not None:
            d["ess_report"] = self.ess
        return d


@dataclass
class CaseResult:
    stages: list
    failed_stage: str | None = None
    error: Exception | None = None


def run_case_plan(plan: CasePlan, dt: float = 0.001, abm=None) -> CaseResult:
    """Run the stages of a case plan in order.

    Each stage gets its R0 values, an ODE run over its duration from its own
    absolute initial counts, optionally an ABM run and an ESS report for its
    game phase.  Zero-duration stages only report parameters.  The first
    failing stage stops the plan; earlier results are kept.
    """
    result = CaseResult([])
    for st in plan.stages:
        try:
            sr = StageResult(st.label, st.params.as_dict(), float(r0(st.params)), r0_spectral(st.params))
            if st.duration > 0:
                sr.run = integrate_opinion(st.params, st.initial, st.duration, min(dt, st.duration))
                if abm is not None:
                    counts = tuple(int(round(c)) for c in st.initial)
                    sr.abm = run_abm(dataclasses.replace(abm, n=sum(counts), initial=counts), st.params)
            if st.game is not None:
                sr.ess = classify_point(st.game, st.target).to_dict()
        except CovigovError as exc:
            result.failed_stage, result.error = st.label, exc
            break
        result.stages.append(sr)
    return result


def _case_run(cfg: ExperimentConfig, art: Artifacts):
    res = run_case_plan(cfg.case, cfg.solver.dt, cfg.abm)
    timeline = []
    offset = 0.0
    for i, sr in enumerate(res.stages):
        if sr.run is None:
            continue
        art.csv[f"stage_{i + 1:02d}_{_slug(sr.label)}.csv"] = sr.run.to_csv()
        if sr.abm is not None:
            art.csv[f"stage_{i + 1:02d}_{_slug(sr.label)}_abm.csv"] = sr.abm.to_csv()
        for t, row in zip(sr.run.t, sr.run.states):
            timeline.append([sr.label, offset + float(t), *row])
        offset += float(sr.run.t[-1])
    art.csv["timeline.csv"] = _table(["stage", "t", *COMPARTMENTS], timeline)
    art.summary["stages"] = [sr.to_dict() for sr in res.stages]
    if res.error is not None:
        art.status = "partial"
        art.error = f"stage {res.failed_stage!r}: {res.error}"
        art.summary["failed_stage"] = res.failed_stage
        raise _Partial(res.error)


class _Partial(Exception):
    def __init__(self, cause):
        self.cause = cause


_DISPATCH = {
    "game-evolve": _game_evolve,
    "game-equilibria": _game_equilibria,
    "game-sweep": _game_sweep,
    "opinion-r0": _opinion_r0,
    "opinion-ode": _opinion_ode,
    "opinion-abm": _opinion_abm,
    "opinion-equilibria": _opinion_equilibria,
    "case-run": _case_run,
}


def run_experiment(config: ExperimentConfig, out_dir=None) -> Artifacts:
    """Run one experiment and write its artifacts.

    Module errors propagate unchanged (after a partial manifest has been
    written for a failing case plan); the command line maps them to exit codes.
    """
    art = Artifacts(config=to_document(config))
    art.summary["mode"] = config.mode
    try:
        _DISPATCH[config.mode](config, art)
    except _Partial as p:
        emit_artifacts(art, out_dir or config.output)
        raise p.cause from None
    emit_artifacts(art, out_dir or config.output)
    return art
