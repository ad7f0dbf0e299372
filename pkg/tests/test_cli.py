from __future__ import annotations

import json
from pathlib import Path

import pytest

from malgebra.cli import build_parser, main
from malgebra.datasets import DatasetConfig, generate
from malgebra.equations import closed_form_solution, parse_equation
from malgebra.misconceptions import CATALOG


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "2x = 3(4x + 5)")
    assert (code, out.strip()) == (0, "T9")


def test_classify_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "classify", "7 = 12")
    assert code == 1 and "error" in err


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "3x = 12")
    assert code == 0 and out.strip() == "x = 4"


def test_solve_trace(capsys):
    code, out, _ = run(capsys, "solve", "2x = 3(4x + 5)", "--trace")
    lines = out.strip().splitlines()
    assert lines == [
        "T9 | 2x = 3(4x + 5) | distribute",
        "T7 | 2x = 12x + 15 | move-x",
        "T1 | -10x = 15 | solve",
        "x = -3/2",
    ]


def test_solve_degenerate_exit_1(capsys):
    code, _, err = run(capsys, "solve", "0x = 5")
    assert code == 1


def test_malsolve(capsys):
    code, out, _ = run(capsys, "malsolve", "4x = 12", "--misconceptions", "M22_S1")
    assert code == 0 and out.strip() == "x = 1/3"


def test_malsolve_trace_marks_misconceptions(capsys):
    code, out, _ = run(
        capsys, "malsolve", "2x = 3(4x + 5)", "--misconceptions", "M2_S3,M19", "--trace"
    )
    assert code == 0
    assert "| M2_S3" in out and "| M19" in out


def test_malsolve_dead_end(capsys):
    code, out, _ = run(capsys, "malsolve", "4x + 5 = 9", "--misconceptions", "M13")
    assert code == 0 and "dead end" in out


def test_tree_json_and_dot(capsys):
    code, out, _ = run(capsys, "tree", "4x = 12", "--misconceptions", "M19,M21")
    assert code == 0
    doc = json.loads(out)
    answers = [l["answer"] for l in doc["leaves"]]
    assert answers == ["3", "16", "-8"]
    code, out, _ = run(
        capsys, "tree", "4x = 12", "--misconceptions", "M19", "--format", "dot"
    )
    assert code == 0 and out.startswith("digraph")


def test_catalog_lists_all_rules(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 19
    assert any("M20_S20" in l and "All Types" in l for l in lines)
    assert any("M8" in l and "T9, T12" in l for l in lines)


def test_gen_verify_roundtrip(capsys, tmp_path):
    out_dir = tmp_path / "ds"
    code, out, _ = run(
        capsys, "gen", "--misconception", "M8", "--n-m", "10", "--ratio", "0.5",
        "--seed", "4", "--test-per-type", "1", "--out", str(out_dir),
    )
    assert code == 0 and "10 misconception" in out
    code, out, _ = run(capsys, "verify", str(out_dir / "train.jsonl"))
    assert code == 0 and "15/15 records replay cleanly" in out


def test_gen_config_file_with_overrides(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_correct_per_type": 2, "test_per_type": 0, "seed": 1}))
    out_dir = tmp_path / "ds2"
    code, out, _ = run(capsys, "gen", "--config", str(cfg), "--out", str(out_dir))
    assert code == 0
    assert len((out_dir / "train.jsonl").read_text().splitlines()) == 30


def test_gen_invalid_ratio_exit_2(capsys, tmp_path):
    code, _, err = run(
        capsys, "gen", "--misconception", "M8", "--n-m", "4", "--ratio", "0.4",
        "--out", str(tmp_path / "x"),
    )
    assert code == 2


def test_verify_corrupted_line(capsys, tmp_path):
    out_dir = tmp_path / "ds3"
    generate(DatasetConfig(seed=1, n_correct_per_type=1, test_per_type=0,
                           out_dir=str(out_dir)))
    path = out_dir / "train.jsonl"
    lines = path.read_text().splitlines()
    rec = json.loads(lines[0])
    rec["final_answer"] = "x = 42424242"
    rec["steps"][-1] = "x = 42424242"
    lines[0] = json.dumps(rec)
    path.write_text("\n".join(lines) + "\n")
    code, out, err = run(capsys, "verify", str(path))
    assert code == 1
    assert "line 1" in err


def test_verify_empty_file_exit_3(capsys, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code, _, _ = run(capsys, "verify", str(empty))
    assert code == 3


def test_score_text_and_json(capsys, tmp_path, sampler):
    rows = []
    for t in ("T9", "T12"):
        eq = sampler.sample(__import__("malgebra").ProblemType[t], f"cli:{t}")
        rows.append({"problem_type": t, "equation": str(eq),
                     "model_answer": str(closed_form_solution(eq))})
    path = tmp_path / "tr.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    code, out, _ = run(capsys, "score", str(path), "--misconception", "M8")
    assert code == 0 and "MA" in out
    code, out, _ = run(
        capsys, "score", str(path), "--misconception", "M8", "--report", "json"
    )
    doc = json.loads(out)
    assert doc["MA"] == 0.0 and doc["CA_A"] == 100.0
    assert doc["CA_NA"] is None  # 13 types absent from the batch


def test_score_empty_exit_3(capsys, tmp_path):
    path = tmp_path / "none.jsonl"
    path.write_text("")
    code, _, _ = run(capsys, "score", str(path), "--misconception", "M8")
    assert code == 3


def test_score_schema_error_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"problem_type": "T1"}\n')
    code, _, _ = run(capsys, "score", str(path), "--misconception", "M8")
    assert code == 2


def test_diagnose_cli(capsys, tmp_path):
    row = {
        "problem_type": "T1",
        "equation": "4x = 12",
        "model_answer": "12",
        "model_steps": ["4x = 12", "x = 12"],
    }
    path = tmp_path / "d.jsonl"
    path.write_text(json.dumps(row) + "\n")
    code, out, _ = run(capsys, "diagnose", str(path))
    assert code == 0
    doc = json.loads(out)
    assert doc[0]["diagnosis"][0]["misconceptions"] == ["M20_S20"]


def test_dump_graph(capsys):
    code, out, _ = run(capsys, "dump-graph")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["nodes"]) == 15
    correct = [e for e in doc["edges"] if e["kind"] == "correct"]
    mal = [e for e in doc["edges"] if e["kind"] == "misconception"]
    assert {"source": "T9", "target": "T7", "kind": "correct", "id": "distribute"} in correct
    m8 = [e for e in mal if e["id"] == "M8"]
    assert {e["source"] for e in m8} == {"T9", "T12"}
    assert all(e["computed"] for e in m8)
    solve_rules = [e for e in mal if e["id"] == "M19"]
    assert len(solve_rules) == 15 and all(e["computed"] == "solved" for e in solve_rules)


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "malgebra" in capsys.readouterr().out


def test_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_help_snapshot(capsys):
    golden = Path(__file__).parent / "data" / "cli_help.txt"
    assert build_parser().format_help() == golden.read_text()
