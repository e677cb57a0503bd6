"""Command-line entry point: ``scenebench``.

Exit status is 0 on success, 1 when an operation fails and 2 on usage errors
(bad arguments, stages run out of order, missing workspace artifacts).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import jsonschema

from . import __version__, jsonio
from .errors import SceneBenchError, UsageError
from .scene_adapter import CONDITIONS, AssetManifest, adapt_scene, validate_dataset
from .workspace import StageOutcome, Workspace, log, stderr_handler

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scenebench", description="Scene benchmark toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--workspace", type=Path, default=Path("."), help="workspace directory")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p.add_argument("--config", type=Path, default=None, help="config file (default: <workspace>/config.json)")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers for scene adaptation")
    p.add_argument("--json", action="store_true", help="print a machine-readable summary")
    sub = p.add_subparsers(dest="command", required=True)

    init = sub.add_parser("init", help="create the workspace layout")
    init.add_argument("--example", choices=["mini"], default=None, help="copy a shipped example workspace")

    prompts = sub.add_parser("prompts", help="prompt pool stages")
    prompts.add_argument("action", choices=["generate", "embed", "dedup", "select"])

    adapt = sub.add_parser("adapt", help="convert scene sources into simulator datasets")
    single = adapt.add_argument_group("single scene (bypasses the workspace)")
    single.add_argument("--scene", type=Path, help="SDF scene source")
    single.add_argument("--manifest", type=Path, help="asset manifest JSON")
    single.add_argument("--out", type=Path, help="output directory")
    single.add_argument("--lexicon-overrides", type=Path, help="JSON map of label overrides")
    single.add_argument("--conditions", default=",".join(CONDITIONS),
                        help="comma-separated lighting conditions (default: all four)")

    sub.add_parser("questions", help="generate prompt-grounded questions from scene specs")

    ev = sub.add_parser("eval", help="evaluation stages")
    ev.add_argument("target", choices=["seg", "qa", "ablation", "fidelity"])

    sub.add_parser("report", help="render figures and a summary from evaluation outputs")
    return p


def _emit(outcome: StageOutcome, as_json: bool) -> None:
    if as_json:
        print(json.dumps({"stage": outcome.stage, "status": outcome.status, "outputs": outcome.outputs,
                          "summary": outcome.summary}, sort_keys=True))
        return
    print(f"{outcome.stage}: {outcome.status}")
    for k, v in outcome.summary.items():
        print(f"  {k}: {v}")


def _adapt_single(args: argparse.Namespace) -> StageOutcome:
    missing = [f"--{n}" for n in ("scene", "manifest", "out") if getattr(args, n) is None]
    if missing:
        raise UsageError(f"single-scene adapt needs {', '.join(missing)}")
    conditions = [c.strip() for c in args.conditions.split(",") if c.strip()]
    unknown = sorted(set(conditions) - set(CONDITIONS))
    if unknown or not conditions:
        raise UsageError(f"unknown lighting conditions {unknown}; choose from {list(CONDITIONS)}")
    overrides = jsonio.read_json(args.lexicon_overrides) if args.lexicon_overrides else None
    result = adapt_scene(
        args.scene.read_bytes(),
        AssetManifest.load(args.manifest),
        args.out,
        name=args.scene.stem if args.scene.stem != "scene" else args.scene.parent.name,
        seed=args.seed or 0,
        lexicon_overrides=overrides,
        conditions=conditions,
    )
    validate_dataset(args.out, conditions)
    files = sorted(result.dataset.files())
    return StageOutcome("adapt", "done", files, {"files": len(files), "repairs": len(result.repairs)})


def _dispatch(args: argparse.Namespace) -> StageOutcome:
    if args.command == "adapt" and args.scene is not None:
        return _adapt_single(args)
    if args.command == "init":
        ws = Workspace.init(args.workspace, args.example)
        return StageOutcome("init", "done", [], {"workspace": str(ws.root)})
    ws = Workspace(args.workspace, args.config, args.seed, args.jobs)
    handler = ws.attach_logging()
    try:
        if args.command == "prompts":
            return ws.prompts(args.action)
        if args.command == "adapt":
            return ws.adapt()
        if args.command == "questions":
            return ws.questions()
        if args.command == "eval":
            return ws.evaluate(args.target)
        return ws.report()
    finally:
        log.removeHandler(handler)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stream = stderr_handler()
    log.addHandler(stream)
    log.setLevel(logging.INFO)
    try:
        outcome = _dispatch(args)
    except UsageError as exc:
        print(f"scenebench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except jsonschema.ValidationError as exc:
        print(f"scenebench: invalid config: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (SceneBenchError, OSError, ValueError) as exc:
        print(f"scenebench: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        log.removeHandler(stream)
    _emit(outcome, args.json)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
