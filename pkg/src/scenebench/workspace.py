"""On-disk workspace: layout, configuration, manifest and the pipeline stages.

Layout::

    workspace/
      config.json  manifest.json  qc_records.json
      prompts/ scenes/ datasets/ specs/ questions/ answers/ labelmaps/ reports/ logs/

Every stage records SHA-256 digests of its inputs and outputs in the
manifest. A stage whose inputs and outputs still match the recorded digests
is skipped without touching any file.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import os
import shutil
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import jsonschema
from filelock import FileLock

from . import jsonio
from ._data import data_path, load_table
from .errors import SceneBenchError, UsageError
from .evaluator import fidelity as fidelity_mod
from .evaluator import qa as qa_mod
from .evaluator import tables
from .prompt_pool import (
    PromptRecord,
    SelectionPlan,
    apply_selection,
    dedup_pool,
    plan_summary,
    read_pool,
    select_diverse,
    write_pool,
)
from .question_gen import (
    Verdict,
    generate_questions,
    load_scene_spec,
    read_answers,
    read_questions,
    score_answers,
    write_questions,
)
from .scene_adapter import CONDITIONS, AssetManifest, adapt_scene, validate_dataset
from .service_clients import (
    ENV_EMBED_URL,
    ENV_LLM_URL,
    GenerationRequest,
    embed_texts,
    endpoint_from_config,
    generate_prompts,
)

log = logging.getLogger("scenebench")

MANIFEST_VERSION = "1.0.0"
SUBDIRS = (
    "prompts",
    "scenes",
    "datasets",
    "specs",
    "questions",
    "answers",
    "labelmaps",
    "reports",
    "logs",
)
PREDECESSORS = {
    "prompts.generate": (),
    "prompts.embed": ("prompts.generate",),
    "prompts.dedup": ("prompts.embed",),
    "prompts.select": ("prompts.dedup",),
    "adapt": (),
    "questions": (),
    "eval.seg": (),
    "eval.qa": ("questions",),
    "eval.ablation": ("eval.qa",),
    "eval.fidelity": (),
    "report": (),
}

POOL_FILES = {
    "prompts.generate": "prompts/pool.generated.jsonl",
    "prompts.embed": "prompts/pool.embedded.jsonl",
    "prompts.dedup": "prompts/pool.deduped.jsonl",
    "prompts.select": "prompts/pool.selected.jsonl",
}

DEFAULT_CONFIG = {
    "seed": 0,
    "jobs": None,
    "selection": SelectionPlan().to_dict() | {"style_hints": []},
    "services": {"llm": None, "embed": None},
    "adapter": {"lexicon_overrides": {}, "conditions": list(CONDITIONS)},
    "evaluator": {
        "include_absent_classes": False,
        "pooling": "scene",
        "min_objects_assumed": 5,
        "ablation_condition": "baseline",
    },
}


# -- digests ----------------------------------------------------------------


def canonical_bytes(path: Path) -> bytes:
    """File bytes with JSON content re-serialized canonically."""
    raw = Path(path).read_bytes()
    suffix = Path(path).suffix
    try:
        if suffix == ".json":
            return jsonio.dumps(json.loads(raw), digits=None).encode("utf-8")
        if suffix == ".jsonl":
            lines = [l for l in raw.decode("utf-8").splitlines() if l.strip()]
            return "".join(jsonio.dumps_line(json.loads(l), None) + "\n" for l in lines).encode("utf-8")
    except (ValueError, UnicodeDecodeError):
        pass
    return raw


def digest_files(root: Path, paths: Iterable[Path], params: Mapping | None = None) -> str:
    h = hashlib.sha256()
    for p in sorted(set(Path(p) for p in paths)):
        rel = os.path.relpath(p, root).replace(os.sep, "/")
        h.update(rel.encode("utf-8") + b"\0")
        h.update(hashlib.sha256(canonical_bytes(p)).digest() if p.exists() else b"<missing>")
    if params is not None:
        h.update(b"params\0" + jsonio.dumps(params, digits=None).encode("utf-8"))
    return h.hexdigest()


def tree_files(path: Path) -> list[Path]:
    path = Path(path)
    if path.is_file():
        return [path]
    if not path.exists():
        return []
    return sorted(p for p in path.rglob("*") if p.is_file())


def derive_seed(seed: int, label: str) -> int:
    d = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return int.from_bytes(d[:8], "big")


# -- logging ----------------------------------------------------------------


class JsonLinesHandler(logging.Handler):
    def __init__(self, path: Path):
        super().__init__()
        self.path = Path(path)

    def emit(self, record: logging.LogRecord) -> None:
        event = {
            "ts": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname.lower(),
            "stage": getattr(record, "stage", None),
            "scene_id": getattr(record, "scene_id", None),
            "logger": record.name,
            "message": record.getMessage(),
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


# -- workspace --------------------------------------------------------------


@dataclass
class StageOutcome:
    stage: str
    status: str  # done | skipped | failed
    outputs: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    exit_code: int = 0


def _merge(base: dict, over: Mapping) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, Mapping) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_config(path: Path | None, seed: int | None = None) -> dict:
    user = jsonio.read_json(path) if path and Path(path).exists() else {}
    jsonschema.validate(user, load_table("schemas/config.schema.json"))
    conf = _merge(DEFAULT_CONFIG, user)
    if seed is not None:
        conf["seed"] = seed
    SelectionPlan.from_dict(conf["selection"])  # raises on inconsistent quotas
    return conf


class Workspace:
    def __init__(self, root: Path, config_path: Path | None = None, seed: int | None = None,
                 jobs: int | None = None):
        self.root = Path(root)
        if not self.root.is_dir():
            raise UsageError(f"workspace {self.root} does not exist (run 'scenebench init')")
        self.config = load_config(config_path or self.root / "config.json", seed)
        self.jobs = jobs or self.config.get("jobs") or os.cpu_count() or 1
        self.manifest_path = self.root / "manifest.json"
        self.manifest = self._load_manifest()
        self._lock = FileLock(str(self.root / ".lock"))

    @classmethod
    def init(cls, root: Path, example: str | None = None) -> "Workspace":
        root = Path(root)
        if example:
            src = data_path("fixtures", "workspaces", example)
            if not src.is_dir():
                raise UsageError(f"no shipped example workspace named {example!r}")
            shutil.copytree(src, root, dirs_exist_ok=True)
        root.mkdir(parents=True, exist_ok=True)
        for d in SUBDIRS:
            (root / d).mkdir(exist_ok=True)
        if not (root / "config.json").exists():
            jsonio.write_json(root / "config.json", {"seed": 0})
        return cls(root)

    # manifest ------------------------------------------------------------

    def _load_manifest(self) -> dict:
        if self.manifest_path.exists():
            return jsonio.read_json(self.manifest_path)
        return {"version": MANIFEST_VERSION, "seed": self.config["seed"], "stages": {}, "scenes": []}

    def _save_manifest(self) -> None:
        self.manifest["seed"] = self.config["seed"]
        jsonio.write_json(self.manifest_path, self.manifest)

    def stage_record(self, name: str) -> dict | None:
        return self.manifest["stages"].get(name)

    def path(self, rel: str) -> Path:
        return self.root / rel

    def _require(self, stage: str) -> None:
        for pred in PREDECESSORS[stage]:
            rec = self.stage_record(pred)
            if not rec or rec.get("status") != "done":
                raise UsageError(f"stage {stage!r} requires {pred!r} to be done first")

    def _require_path(self, rel: str) -> Path:
        p = self.path(rel)
        if not p.exists():
            raise UsageError(f"missing artifact: expected {p}")
        return p

    def _logger(self, stage: str, scene_id: str | None = None) -> logging.LoggerAdapter:
        return logging.LoggerAdapter(log, {"stage": stage, "scene_id": scene_id})

    def attach_logging(self) -> JsonLinesHandler:
        (self.root / "logs").mkdir(exist_ok=True)
        handler = JsonLinesHandler(self.root / "logs" / "events.jsonl")
        log.addHandler(handler)
        log.setLevel(logging.INFO)
        return handler

    def run_stage(
        self,
        stage: str,
        inputs: Sequence[Path],
        params: Mapping,
        action: Callable[[], tuple[list[Path], dict]],
    ) -> StageOutcome:
        """Digest-gated execution of one stage.

        ``action`` returns the produced files and a summary dict. The stage
        is skipped when its recorded input digest and output digest both
        still match.
        """
        self._require(stage)
        with self._lock:
            in_digest = digest_files(self.root, inputs, params)
            rec = self.stage_record(stage)
            if rec and rec.get("status") == "done" and rec.get("input_digest") == in_digest:
                outs = [self.root / p for p in rec.get("outputs", [])]
                if all(p.exists() for p in outs) and digest_files(self.root, outs) == rec.get("output_digest"):
                    self._logger(stage).info("skipped: inputs and outputs unchanged")
                    return StageOutcome(stage, "skipped", rec.get("outputs", []), rec.get("summary", {}))
            try:
                outputs, summary = action()
            except Exception as exc:
                self.manifest["stages"][stage] = {
                    "status": "failed",
                    "input_digest": in_digest,
                    "error": str(exc),
                    "timestamp": _now(),
                }
                self._save_manifest()
                self._logger(stage).error("failed: %s", exc)
                raise
            rels = sorted(os.path.relpath(p, self.root).replace(os.sep, "/") for p in outputs)
            self.manifest["stages"][stage] = {
                "status": "done",
                "input_digest": in_digest,
                "output_digest": digest_files(self.root, outputs),
                "outputs": rels,
                "summary": summary,
                "timestamp": _now(),
            }
            self._save_manifest()
            self._logger(stage).info("done: %d output files", len(rels))
            return StageOutcome(stage, "done", rels, summary)

    # prompts -------------------------------------------------------------

    def plan(self) -> SelectionPlan:
        return SelectionPlan.from_dict(self.config["selection"])

    def _subset_counts(self) -> dict[str, int]:
        plan = self.plan()
        subsets = sorted(s for s, q in plan.quotas.items() if q > 0)
        counts, left = {}, plan.pool_size_target
        for s in subsets[:-1]:
            counts[s] = plan.pool_size_target * plan.quotas[s] // plan.select_count
            left -= counts[s]
        if subsets:
            counts[subsets[-1]] = left
        return counts

    def prompts(self, action: str) -> StageOutcome:
        stage = f"prompts.{action}"
        if stage not in POOL_FILES:
            raise UsageError(f"unknown prompts action {action!r}")
        out = self.path(POOL_FILES[stage])
        out.parent.mkdir(exist_ok=True)
        seed = self.config["seed"]

        if action == "generate":
            llm = endpoint_from_config(self.config["services"].get("llm"), ENV_LLM_URL)
            counts = self._subset_counts()
            hints = tuple(self.config["selection"].get("style_hints", ()))
            params = {"counts": counts, "seed": seed, "hints": list(hints), "llm": llm.base_url if llm else None}

            def run():
                records, next_id = [], 0
                for subset, n in counts.items():
                    req = GenerationRequest(subset, n, derive_seed(seed, f"prompts:{subset}"), hints)
                    for text in generate_prompts(llm, req):
                        records.append(PromptRecord(next_id, text, subset))
                        next_id += 1
                write_pool(out, records)
                return [out], {"generated": len(records), **counts}

            return self.run_stage(stage, [], params, run)

        prev = self.path(POOL_FILES[_previous(stage)])
        if action == "embed":
            emb = endpoint_from_config(self.config["services"].get("embed"), ENV_EMBED_URL)
            params = {"embed": emb.base_url if emb else None}

            def run():
                pool = read_pool(prev)
                vectors = embed_texts(emb, [r.text for r in pool])
                embedded = [
                    PromptRecord(r.id, r.text, r.subset, v, r.status) for r, v in zip(pool, vectors)
                ]
                write_pool(out, embedded)
                return [out], {"embedded": len(embedded), "dim": len(vectors[0])}

            return self.run_stage(stage, [prev], params, run)

        plan = self.plan()
        if action == "dedup":

            def run():
                pool = dedup_pool(read_pool(prev), plan.dedup_threshold)
                write_pool(out, pool)
                return [out], plan_summary(plan, pool)["totals"]

            return self.run_stage(stage, [prev], {"threshold": plan.dedup_threshold}, run)

        selection_file = self.path("prompts/selection.json")

        def run():
            pool = read_pool(prev)
            chosen = select_diverse(pool, plan)
            final = apply_selection(pool, chosen)
            write_pool(out, final)
            summary = plan_summary(plan, final)
            jsonio.write_json(
                selection_file,
                {"order": [r.id for r in chosen], "summary": summary},
            )
            return [out, selection_file], {
                "selected": len(chosen),
                **{s: sum(r.subset == s for r in chosen) for s in sorted(plan.quotas)},
            }

        return self.run_stage(stage, [prev], plan.to_dict(), run)

    # adapt ---------------------------------------------------------------

    def scene_dirs(self) -> list[Path]:
        scenes = self.path("scenes")
        if not scenes.is_dir():
            return []
        return sorted(p for p in scenes.iterdir() if p.is_dir() and (p / "scene.sdf").exists())

    def _scene_inputs(self, sdir: Path) -> list[Path]:
        manifest = sdir / "manifest.json"
        if not manifest.exists():
            manifest = self.path("scenes/manifest.json")
        return [sdir / "scene.sdf", manifest]

    def adapt(self) -> StageOutcome:
        sdirs = self.scene_dirs()
        if not sdirs:
            raise UsageError(f"no scene sources found under {self.path('scenes')} (expected <id>/scene.sdf)")
        conf = self.config["adapter"]
        seed = self.config["seed"]
        params = {"seed": seed, "overrides": conf["lexicon_overrides"], "conditions": conf["conditions"]}
        inputs = [p for d in sdirs for p in self._scene_inputs(d)]
        report_path = self.path("reports/adapt_report.json")
        self.path("reports").mkdir(exist_ok=True)
        failed: list[str] = []

        def scene_params(sid):
            return {**params, "seed": derive_seed(seed, f"scene:{sid}")}

        def one(sdir: Path) -> dict:
            sid = sdir.name
            logger = self._logger("adapt", sid)
            out_dir = self.path(f"datasets/{sid}")
            ins = self._scene_inputs(sdir)
            in_digest = digest_files(self.root, ins, scene_params(sid))
            prev = (self.stage_record("adapt") or {}).get("scenes", {}).get(sid, {})
            if (
                prev.get("status") == "done"
                and prev.get("input_digest") == in_digest
                and digest_files(self.root, tree_files(out_dir)) == prev.get("output_digest")
            ):
                logger.info("skipped: unchanged")
                return {"scene_id": sid, **prev, "skipped": True}
            if out_dir.exists():
                shutil.rmtree(out_dir)
            try:
                if not ins[1].exists():
                    raise UsageError(f"missing asset manifest for scene {sid}: {ins[1]}")
                result = adapt_scene(
                    ins[0].read_bytes(),
                    AssetManifest.load(ins[1]),
                    out_dir,
                    name=sid,
                    seed=derive_seed(seed, f"scene:{sid}"),
                    lexicon_overrides=conf["lexicon_overrides"],
                    conditions=conf["conditions"],
                )
                validate_dataset(out_dir, conf["conditions"])
            except (SceneBenchError, OSError, ValueError) as exc:
                if out_dir.exists():
                    shutil.rmtree(out_dir)
                logger.error("failed: %s", exc)
                return {"scene_id": sid, "status": "failed", "input_digest": in_digest,
                        "error": f"{type(exc).__name__}: {exc}"}
            logger.info("adapted: %d repair events", len(result.repairs))
            return {
                "scene_id": sid,
                "status": "done",
                "input_digest": in_digest,
                "output_digest": digest_files(self.root, tree_files(out_dir)),
                "report": result.report(),
            }

        def run():
            with ThreadPoolExecutor(max_workers=max(1, self.jobs)) as pool:
                results = sorted(pool.map(one, sdirs), key=lambda r: r["scene_id"])
            scenes_rec, report = {}, {"scenes": []}
            old_report = {}
            if report_path.exists():
                old_report = {s["scene_id"]: s for s in jsonio.read_json(report_path).get("scenes", [])}
            for r in results:
                sid = r["scene_id"]
                entry = {k: r[k] for k in ("status", "input_digest") if k in r}
                if r["status"] == "done":
                    entry["output_digest"] = r["output_digest"]
                    rep = r.get("report") or old_report.get(sid, {}).get("report")
                    report["scenes"].append({"scene_id": sid, "status": "done", "report": rep})
                else:
                    failed.append(sid)
                    report["scenes"].append({"scene_id": sid, "status": "failed", "error": r["error"]})
                scenes_rec[sid] = entry
            report["failed"] = failed
            jsonio.write_json(report_path, report)
            self._adapt_scenes = scenes_rec
            outputs = [report_path] + [
                f for sid, e in scenes_rec.items() if e["status"] == "done"
                for f in tree_files(self.path(f"datasets/{sid}"))
            ]
            return outputs, {"scenes": len(results), "failed": len(failed)}

        outcome = self.run_stage("adapt", inputs, params, lambda: run())
        if outcome.status == "done":
            with self._lock:
                rec = self.manifest["stages"]["adapt"]
                rec["scenes"] = self._adapt_scenes
                if failed:
                    rec["status"] = "failed"
                self.manifest["scenes"] = [
                    {"scene_id": sid, "subset": self._scene_subset(sid),
                     "paths": {"source": f"scenes/{sid}", "dataset": f"datasets/{sid}"}}
                    for sid in sorted(self._adapt_scenes)
                ]
                self._save_manifest()
            if failed:
                outcome.status = "failed"
                outcome.exit_code = 1
        return outcome

    def _scene_subset(self, sid: str) -> str | None:
        spec = self.path(f"specs/{sid}.spec.json")
        if spec.exists():
            return jsonio.read_json(spec).get("subset")
        return None

    # questions -----------------------------------------------------------

    def questions(self) -> StageOutcome:
        specs = sorted(self.path("specs").glob("*.spec.json"))
        if not specs:
            raise UsageError(f"missing artifact: no *.spec.json under {self.path('specs')}")
        seed = self.config["seed"]
        templates = load_table("question_templates.json")
        self.path("questions").mkdir(exist_ok=True)

        def run():
            outs, total = [], 0
            for sp in specs:
                spec = load_scene_spec(sp.read_text(encoding="utf-8"))
                qs = generate_questions(spec, derive_seed(seed, f"questions:{spec.scene_id}"))
                out = self.path(f"questions/{spec.scene_id}.questions.jsonl")
                write_questions(out, qs)
                outs.append(out)
                total += len(qs)
            return outs, {"specs": len(specs), "questions": total}

        return self.run_stage("questions", specs, {"seed": seed, "templates": templates}, run)

    # evaluation ----------------------------------------------------------

    def eval_seg(self) -> StageOutcome:
        run_path = self._require_path("labelmaps/run.json")
        run_doc = jsonio.read_json(run_path)
        pairs = run_doc.get("pairs", [])
        base = run_path.parent
        refs = [base / e[k] for e in pairs for k in ("gt", "pred", "remap", "gt_remap", "pred_remap") if e.get(k)]
        ev = self.config["evaluator"]
        params = {"pooling": ev["pooling"], "include_absent_classes": ev["include_absent_classes"]}
        metrics_path = self.path("reports/metrics.json")
        rel_path = self.path("reports/relative_change.csv")

        def run():
            rows = tables.metric_table(
                pairs, int(run_doc["num_classes"]), base, ev["pooling"], ev["include_absent_classes"]
            )
            rel = tables.relative_change_rows(rows)
            jsonio.write_json(
                metrics_path,
                {"pooling": ev["pooling"], "include_absent_classes": ev["include_absent_classes"],
                 "rows": [r.as_dict() for r in rows]},
            )
            tables.write_relative_change_csv(rel_path, rel)
            return [metrics_path, rel_path], {"rows": len(rows), "relative_change_cells": len(rel)}

        return self.run_stage("eval.seg", [run_path, *refs], params, run)

    def _question_files(self) -> list[Path]:
        return sorted(self.path("questions").rglob("*.jsonl"))

    def eval_qa(self) -> StageOutcome:
        answers_path = self._require_path("answers/answers.jsonl")
        qfiles = self._question_files()
        verdict_path = self.path("reports/verdicts.jsonl")
        csv_path = self.path("reports/qa_accuracy.csv")

        def run():
            questions = [q for f in qfiles for q in read_questions(f)]
            verdicts = score_answers(questions, read_answers(answers_path))
            jsonio.write_jsonl(verdict_path, (v.to_dict() for v in verdicts))
            rows = qa_mod.aggregate_qa(verdicts)
            tables.write_qa_csv(csv_path, rows)
            return [verdict_path, csv_path], {
                "questions": len(questions),
                "verdicts": len(verdicts),
                "accuracy_rows": len(rows),
            }

        return self.run_stage("eval.qa", [answers_path, *qfiles], {}, run)

    def eval_ablation(self) -> StageOutcome:
        verdict_path = self._require_path("reports/verdicts.jsonl")
        cond = self.config["evaluator"]["ablation_condition"]
        out = self.path("reports/ablation.csv")

        def run():
            verdicts = [Verdict.from_dict(d) for d in jsonio.read_jsonl(verdict_path)]
            rows = qa_mod.ablation_table(verdicts, condition=cond)
            tables.write_ablation_csv(out, rows)
            return [out], {"rows": len(rows)}

        return self.run_stage("eval.ablation", [verdict_path], {"condition": cond}, run)

    def eval_fidelity(self) -> StageOutcome:
        qc_path = self._require_path("qc_records.json")
        min_obj = self.config["evaluator"]["min_objects_assumed"]
        out = self.path("reports/fidelity.json")

        def run():
            doc = jsonio.read_json(qc_path)
            recs = [fidelity_mod.QcRecord.from_dict(d) for d in (doc["records"] if isinstance(doc, dict) else doc)]
            stats = fidelity_mod.fidelity_stats(recs, min_obj)
            jsonio.write_json(out, {**stats.as_dict(), "min_objects_assumed": min_obj})
            return [out], stats.as_dict()

        return self.run_stage("eval.fidelity", [qc_path], {"min_objects_assumed": min_obj}, run)

    def evaluate(self, what: str) -> StageOutcome:
        fn = {
            "seg": self.eval_seg,
            "qa": self.eval_qa,
            "ablation": self.eval_ablation,
            "fidelity": self.eval_fidelity,
        }.get(what)
        if fn is None:
            raise UsageError(f"unknown eval target {what!r}")
        self.path("reports").mkdir(exist_ok=True)
        return fn()

    # report --------------------------------------------------------------

    def report(self) -> StageOutcome:
        from . import plotting

        sources = {
            "relative_change": self.path("reports/relative_change.csv"),
            "qa_accuracy": self.path("reports/qa_accuracy.csv"),
            "ablation": self.path("reports/ablation.csv"),
        }
        present = {k: p for k, p in sources.items() if p.exists()}
        if not present:
            raise UsageError("nothing to report: run an eval stage first")
        fig_dir = self.path("reports/figures")
        fig_dir.parent.mkdir(exist_ok=True)
        summary_path = self.path("reports/summary.json")
        renderers = {
            "relative_change": plotting.plot_relative_change,
            "qa_accuracy": plotting.plot_qa_accuracy,
            "ablation": plotting.plot_ablation,
        }
        extra = [self.path("reports/fidelity.json"), self.path("reports/metrics.json")]

        def run():
            fig_dir.mkdir(exist_ok=True)
            outs, summary = [], {"figures": {}, "tables": {}}
            for name, p in present.items():
                rows = tables.read_csv(p)
                fig = renderers[name](rows, fig_dir / f"{name}.png")
                outs.append(fig)
                summary["figures"][name] = os.path.relpath(fig, self.root).replace(os.sep, "/")
                summary["tables"][name] = rows
            for p in extra:
                if p.exists():
                    summary[p.stem] = jsonio.read_json(p)
            jsonio.write_json(summary_path, summary)
            outs.append(summary_path)
            return outs, {"figures": sorted(summary["figures"])}

        return self.run_stage("report", [*present.values(), *[p for p in extra if p.exists()]], {}, run)


def _previous(stage: str) -> str:
    return PREDECESSORS[stage][0]


def _now() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return datetime.fromtimestamp(t, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def stderr_handler() -> logging.Handler:
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    return h
