import json
import shutil

import pytest

from scenebench import jsonio
from scenebench.cli import main
from scenebench.question_gen import read_questions
from scenebench.workspace import derive_seed

from conftest import MINI_DIR


def run(ws, *args):
    return main(["--workspace", str(ws), *args])


def oracle_answer(q):
    if q.answer_type == "boolean":
        return "yes" if q.ground_truth else "no"
    return str(q.ground_truth)


def test_init_creates_layout(tmp_path):
    ws = tmp_path / "new"
    assert main(["--workspace", str(ws), "init"]) == 0
    for d in ("prompts", "scenes", "datasets", "specs", "questions", "answers", "labelmaps", "reports", "logs"):
        assert (ws / d).is_dir()
    assert jsonio.read_json(ws / "config.json") == {"seed": 0}


def test_init_example_and_missing_workspace(tmp_path):
    assert run(tmp_path / "m", "init", "--example", "mini") == 0
    assert (tmp_path / "m" / "scenes" / "kitchen_02" / "scene.sdf").exists()
    assert run(tmp_path / "absent", "adapt") == 2


def test_stage_order_enforced(mini_workspace, capsys):
    assert run(mini_workspace, "prompts", "select") == 2
    assert "prompts.dedup" in capsys.readouterr().err
    assert not (mini_workspace / "manifest.json").exists()


def test_prompt_pipeline_idempotent(mini_workspace):
    for action in ("generate", "embed", "dedup", "select"):
        assert run(mini_workspace, "prompts", action) == 0
    before = (mini_workspace / "manifest.json").read_bytes()
    for action in ("generate", "embed", "dedup", "select"):
        assert run(mini_workspace, "prompts", action) == 0
    assert (mini_workspace / "manifest.json").read_bytes() == before
    selected = jsonio.read_jsonl(mini_workspace / "prompts" / "pool.selected.jsonl")
    assert sum(r["status"]["kind"] == "selected" for r in selected) == 3


def test_changed_input_reruns_stage(mini_workspace, capsys):
    assert run(mini_workspace, "--json", "eval", "fidelity") == 0
    assert json.loads(capsys.readouterr().out)["status"] == "done"
    assert run(mini_workspace, "--json", "eval", "fidelity") == 0
    assert json.loads(capsys.readouterr().out)["status"] == "skipped"
    shutil.copy(MINI_DIR.parent.parent / "qc_records_40.json", mini_workspace / "qc_records.json")
    assert run(mini_workspace, "--json", "eval", "fidelity") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "done"
    assert out["summary"]["scene_match_percent"] == 90.0
    assert out["summary"]["object_fidelity_percent"] == 98.0


def test_config_schema_error(mini_workspace, capsys):
    jsonio.write_json(mini_workspace / "config.json", {"seed": "zero"})
    assert run(mini_workspace, "eval", "fidelity") == 2
    assert "invalid config" in capsys.readouterr().err


def test_adapt_partial_failure(mini_workspace):
    bad = mini_workspace / "scenes" / "broken_04"
    bad.mkdir()
    (bad / "scene.sdf").write_text("<sdf><world><model></world></sdf>")
    shutil.copy(mini_workspace / "scenes" / "kitchen_02" / "manifest.json", bad)
    assert run(mini_workspace, "adapt") == 1
    report = jsonio.read_json(mini_workspace / "reports" / "adapt_report.json")
    assert report["failed"] == ["broken_04"]
    status = {s["scene_id"]: s["status"] for s in report["scenes"]}
    assert status == {"bedroom_03": "done", "broken_04": "failed", "kitchen_02": "done", "living_room_01": "done"}
    assert not (mini_workspace / "datasets" / "broken_04").exists()
    for sid in ("bedroom_03", "kitchen_02", "living_room_01"):
        assert (mini_workspace / "datasets" / sid / "scene_dataset_config.json").exists()


def test_adapt_logs_events(mini_workspace):
    assert run(mini_workspace, "adapt") == 0
    events = jsonio.read_jsonl(mini_workspace / "logs" / "events.jsonl")
    assert {e["scene_id"] for e in events if e.get("scene_id")} == {"bedroom_03", "kitchen_02", "living_room_01"}
    assert all({"stage", "level", "message"} <= set(e) for e in events)


def test_missing_artifact_names_path(mini_workspace, capsys):
    (mini_workspace / "answers" / "answers.jsonl").unlink()
    assert run(mini_workspace, "questions") == 0
    capsys.readouterr()
    assert run(mini_workspace, "eval", "qa") == 2
    assert "answers.jsonl" in capsys.readouterr().err


def test_eval_seg_without_pairs_fails(mini_workspace):
    jsonio.write_json(mini_workspace / "labelmaps" / "run.json", {"num_classes": 4, "pairs": []})
    assert run(mini_workspace, "eval", "seg") == 1


def test_eval_seg_outputs(mini_workspace):
    assert run(mini_workspace, "eval", "seg") == 0
    rows = list(open(mini_workspace / "reports" / "relative_change.csv"))
    assert rows[0].strip() == "method,condition,metric,percent"
    assert len(rows) == 13


def test_eval_qa_with_oracle_answers(mini_workspace):
    assert run(mini_workspace, "questions") == 0
    questions = [q for f in sorted((mini_workspace / "questions").rglob("*.jsonl")) for q in read_questions(f)]
    answers = [
        {"qid": q.qid, "method": m, "condition": c, "answer_text": oracle_answer(q)}
        for q in questions for m in ("a", "b") for c in ("baseline", "nominal", "camera", "dynamic")
    ]
    jsonio.write_jsonl(mini_workspace / "answers" / "answers.jsonl", answers)
    assert run(mini_workspace, "eval", "qa") == 0
    assert run(mini_workspace, "eval", "ablation") == 0
    qa = list(open(mini_workspace / "reports" / "qa_accuracy.csv"))[1:]
    assert qa and all(line.strip().endswith(",100.0") for line in qa)
    ablation = list(open(mini_workspace / "reports" / "ablation.csv"))[1:]
    assert ablation and all(line.strip().endswith("100.0,100.0") for line in ablation)


def test_report_renders_figures(mini_workspace):
    assert run(mini_workspace, "report") == 2
    for args in (("eval", "seg"), ("questions",), ("eval", "qa"), ("eval", "ablation"), ("report",)):
        assert run(mini_workspace, *args) == 0
    figs = sorted(p.name for p in (mini_workspace / "reports" / "figures").glob("*.png"))
    assert figs == ["ablation.png", "qa_accuracy.png", "relative_change.png"]
    summary = jsonio.read_json(mini_workspace / "reports" / "summary.json")
    assert set(summary["figures"]) == {"ablation", "qa_accuracy", "relative_change"}


def test_same_seed_same_reports(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    outs = []
    for name in ("a", "b"):
        ws = tmp_path / name
        shutil.copytree(MINI_DIR, ws)
        for args in (("prompts", "generate"), ("prompts", "embed"), ("prompts", "dedup"), ("prompts", "select"),
                     ("adapt",), ("questions",), ("eval", "seg"), ("eval", "qa"), ("eval", "ablation"),
                     ("eval", "fidelity")):
            assert run(ws, *args) == 0
        outs.append({p.relative_to(ws).as_posix(): p.read_bytes()
                     for sub in ("reports", "prompts", "datasets", "questions") for p in (ws / sub).rglob("*")
                     if p.is_file()})
        outs[-1]["manifest.json"] = (ws / "manifest.json").read_bytes()
    assert outs[0] == outs[1]


def test_seed_override_changes_prompts(mini_workspace, tmp_path):
    other = tmp_path / "other"
    shutil.copytree(mini_workspace, other)
    assert run(mini_workspace, "prompts", "generate") == 0
    assert run(other, "--seed", "1", "prompts", "generate") == 0
    a = (mini_workspace / "prompts" / "pool.generated.jsonl").read_bytes()
    assert a != (other / "prompts" / "pool.generated.jsonl").read_bytes()


def test_derive_seed_stable():
    assert derive_seed(0, "scene:a") == derive_seed(0, "scene:a") != derive_seed(0, "scene:b")
    assert 0 <= derive_seed(5, "x") < 2**64


def test_single_scene_adapt(tmp_path, capsys):
    sdir = MINI_DIR / "scenes" / "kitchen_02"
    out = tmp_path / "out"
    code = main(["--json", "adapt", "--scene", str(sdir / "scene.sdf"), "--manifest", str(sdir / "manifest.json"),
                 "--out", str(out), "--conditions", "baseline,camera"])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["status"] == "done" and summary["summary"]["files"] > 0
    assert sorted(p.name for p in out.glob("*.lighting.*.json")) == [
        "kitchen_02.lighting.baseline.json", "kitchen_02.lighting.camera.json"
    ]


@pytest.mark.parametrize("extra", [["--conditions", "dusk"], []])
def test_single_scene_adapt_usage_errors(tmp_path, extra):
    sdir = MINI_DIR / "scenes" / "kitchen_02"
    args = ["adapt", "--scene", str(sdir / "scene.sdf"), *extra]
    if extra:
        args += ["--manifest", str(sdir / "manifest.json"), "--out", str(tmp_path / "o")]
    assert main(args) == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("scenebench ")
