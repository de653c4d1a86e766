"""``covigov`` command line.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
errors, 4 for file-system errors.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import MODES, load_preset, parse_config, preset_names
from .errors import ArtifactIOError, ConfigError, CovigovError, ValidationError
from .runner import run_experiment


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="covigov", description=__doc__.splitlines()[0])
    ap.add_argument("mode", choices=MODES)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="FILE", help="JSON configuration document")
    src.add_argument("--preset", metavar="NAME", help="bundled configuration (see --list-presets)")
    ap.add_argument("--out", metavar="DIR", help="output directory (overrides the document)")
    ap.add_argument("--seed", type=int, metavar="U64", help="base seed (overrides the document)")
    ap.add_argument("--runs", type=int, metavar="N", help="ABM replications (overrides the document)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


class _ListPresets(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        print("\n".join(preset_names()))
        parser.exit()


def apply_overrides(config, seed=None, runs=None, out=None):
    """Command-line overrides of seed, replication count and output directory."""
    changes = {}
    if out is not None:
        changes["output"] = str(out)
    abm = config.abm
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ValidationError("--seed: must be an unsigned 64-bit integer")
        changes["seed"] = seed
        if abm is not None:
            abm = dataclasses.replace(abm, base_seed=seed)
    if runs is not None:
        if abm is None:
            raise ValidationError(f"--runs: mode {config.mode!r} has no agent-based block")
        abm = dataclasses.replace(abm, runs=runs)
    if abm is not config.abm:
        changes["abm"] = abm
    return config.replace(**changes) if changes else config


def main(argv=None) -> int:
    ap = build_parser()
    ap.add_argument("--list-presets", action=_ListPresets, nargs=0, help="print bundled preset names")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.config is not None:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ArtifactIOError(args.config, exc.strerror or str(exc), action="read") from None
            config = parse_config(text, mode=args.mode)
        else:
            config = load_preset(args.preset, mode=args.mode)
        config = apply_overrides(config, args.seed, args.runs, args.out)
        run_experiment(config)
    except CovigovError as exc:
        kind = "configuration" if isinstance(exc, ConfigError) else type(exc).__name__
        print(f"covigov: {kind} error: {exc}", file=sys.stderr)
        return exc.exit_code
    print(f"covigov: wrote artifacts to {config.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
