from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from malgebra.datasets import (
    DatasetConfig,
    InstanceSampler,
    config_from_dict,
    generate,
    sample_for_misconception,
    sample_instance,
    verify_dataset,
)
from malgebra.equations import closed_form_solution, parse_equation
from malgebra.errors import SamplingExhaustedError, SchemaError
from malgebra.misconceptions import reduce_with_misconceptions
from malgebra.taxonomy import ORDERED_TYPES, ProblemType, classify

T = ProblemType


def test_sampler_is_deterministic():
    a = InstanceSampler(seed=7)
    b = InstanceSampler(seed=7)
    for t in ORDERED_TYPES:
        assert a.sample(t, f"k:{t.name}") == b.sample(t, f"k:{t.name}")
    c = InstanceSampler(seed=8)
    assert any(
        a.sample(t, f"k:{t.name}") != c.sample(t, f"k:{t.name}") for t in ORDERED_TYPES
    )


def test_sampled_instances_are_wellformed(sampler):
    for t in ORDERED_TYPES:
        for i in range(30):
            eq = sampler.sample(t, f"wf:{t.name}:{i}")
            assert classify(eq) is t
            closed_form_solution(eq)  # must not raise


def test_t7_avoids_zero_slope(sampler):
    for i in range(100):
        eq = sampler.sample(T.T7, f"slope:{i}")
        left, right = eq.lhs.coef, eq.rhs
        closed_form_solution(eq)


def test_exhaustion_on_impossible_range():
    # the only T9 instance with every slot 1 has zero slope: 1 - 1*1 = 0
    rng = random.Random(0)
    with pytest.raises(SamplingExhaustedError):
        sample_instance(T.T9, rng, coeff_min=1, coeff_max=1)


def test_conforming_misconception_sampling(rng):
    for mid, t in (("M6", T.T9), ("M14", T.T2), ("M15", T.T4), ("M18", T.T2)):
        eq, trace = sample_for_misconception(mid, t, rng)
        assert classify(eq) is t
        assert trace.misconceptions_used == (mid,)
        if trace.dead_end is None:
            assert trace.answer != closed_form_solution(eq)


def test_dead_end_misconception_records_sample(rng):
    eq, trace = sample_for_misconception("M13", T.T5, rng)
    assert trace.dead_end == "variable eliminated"
    assert trace.answer is None


def test_generate_counts_and_ratio(tmp_path):
    config = DatasetConfig(
        seed=5, misconception="M8", n_m=40, ratio=0.25, test_per_type=2,
        out_dir=str(tmp_path / "d1"),
    )
    manifest = generate(config)
    assert manifest["counts"]["train"]["misconception"] == 40
    assert manifest["counts"]["train"]["correct"] == 10
    assert manifest["counts"]["test"]["total"] == 30
    by_type = manifest["counts"]["train"]["by_type"]
    assert set(by_type) <= {"T9", "T12"} | {t.name for t in ORDERED_TYPES}
    mal_types = {k for k, v in by_type.items() if v["misconception"]}
    assert mal_types <= {"T9", "T12"}
    lines = (tmp_path / "d1" / "train.jsonl").read_text().splitlines()
    assert len(lines) == 50
    assert manifest["counts"]["test"]["by_type"]["T1"]["correct"] == 2


def test_generate_ratio_zero(tmp_path):
    config = DatasetConfig(
        seed=5, misconception="M8", n_m=10, ratio=0.0, test_per_type=0,
        out_dir=str(tmp_path / "d2"),
    )
    manifest = generate(config)
    assert manifest["counts"]["train"]["total"] == 10
    assert manifest["counts"]["train"]["correct"] == 0
    assert manifest["counts"]["test"]["total"] == 0


def test_generate_correct_regime(tmp_path):
    config = DatasetConfig(
        seed=5, n_correct_per_type=4, test_per_type=1, out_dir=str(tmp_path / "d3"),
    )
    manifest = generate(config)
    assert manifest["counts"]["train"]["total"] == 4 * 15
    assert manifest["counts"]["train"]["misconception"] == 0
    for t in ORDERED_TYPES:
        assert manifest["counts"]["train"]["by_type"][t.name]["correct"] == 4


def test_generate_is_byte_identical(tmp_path):
    cfg = dict(seed=11, misconception="M12_S15", n_m=20, ratio=0.5, test_per_type=1)
    m1 = generate(DatasetConfig(**cfg, out_dir=str(tmp_path / "a")))
    m2 = generate(DatasetConfig(**cfg, out_dir=str(tmp_path / "b")))
    for name in ("train.jsonl", "test.jsonl", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert m1["digests"] == m2["digests"]


def test_train_and_test_are_disjoint(tmp_path):
    config = DatasetConfig(
        seed=3, n_correct_per_type=60, test_per_type=40, out_dir=str(tmp_path / "d4"),
    )
    generate(config)
    train_eqs = {
        json.loads(l)["equation"]
        for l in (tmp_path / "d4" / "train.jsonl").read_text().splitlines()
    }
    test_eqs = {
        json.loads(l)["equation"]
        for l in (tmp_path / "d4" / "test.jsonl").read_text().splitlines()
    }
    assert not (train_eqs & test_eqs)


def test_record_shape_and_replay(tmp_path):
    config = DatasetConfig(
        seed=9, misconception="M13", n_m=15, ratio=1.0, test_per_type=1,
        out_dir=str(tmp_path / "d5"),
    )
    generate(config)
    path = tmp_path / "d5" / "train.jsonl"
    for line in path.read_text().splitlines():
        rec = json.loads(line)
        base = ["id", "problem_type", "equation", "steps", "final_answer", "label"]
        expected = base + (["misconception_id"] if rec["label"] == "misconception" else []) + ["seed"]
        assert list(rec) == expected
        assert rec["steps"][0] == rec["equation"]
        assert rec["final_answer"] == rec["steps"][-1]
        if rec["label"] == "misconception":
            trace = reduce_with_misconceptions(parse_equation(rec["equation"]), ["M13"])
            assert trace.equation_lines() == rec["steps"]
    report = verify_dataset(path)
    assert report.ok, report.failures
    assert verify_dataset(tmp_path / "d5" / "test.jsonl").ok


def test_verify_flags_corruption(tmp_path):
    config = DatasetConfig(seed=2, n_correct_per_type=1, test_per_type=0,
                           out_dir=str(tmp_path / "d6"))
    generate(config)
    path = tmp_path / "d6" / "train.jsonl"
    lines = path.read_text().splitlines()
    rec = json.loads(lines[3])
    rec["steps"][-1] = "x = 999999"
    lines[3] = json.dumps(rec)
    path.write_text("\n".join(lines) + "\n")
    report = verify_dataset(path)
    assert not report.ok
    assert [ln for ln, _ in report.failures] == [4]


def test_invalid_ratio_rejected():
    with pytest.raises(SchemaError):
        DatasetConfig(ratio=0.3).validate()
    with pytest.raises(SchemaError):
        config_from_dict({"ratio": 0.25, "bogus": 1})


def test_manifest_counts_match_files(tmp_path):
    config = DatasetConfig(
        seed=13, misconception="M19", n_m=12, ratio=0.5, test_per_type=2,
        out_dir=str(tmp_path / "d7"),
    )
    manifest = generate(config)
    train_lines = (tmp_path / "d7" / "train.jsonl").read_text().splitlines()
    test_lines = (tmp_path / "d7" / "test.jsonl").read_text().splitlines()
    assert manifest["counts"]["train"]["total"] == len(train_lines)
    assert manifest["counts"]["test"]["total"] == len(test_lines)
    n_mal = sum(1 for l in train_lines if json.loads(l)["label"] == "misconception")
    assert manifest["counts"]["train"]["misconception"] == n_mal == 12
