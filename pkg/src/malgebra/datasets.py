"""Seeded, reproducible instance sampling and dataset generation.

Every record's randomness derives from ``(seed, stream, index)``, so output
is byte-identical across re-runs and independent of sharding.  Train/test
leakage is prevented structurally: each equation string hashes into either
the train pool or the test pool (about one quarter), and records are
resampled until they land in the right pool.  Small instance spaces (T1 has
only 324 equations at the default coefficient range) therefore stay disjoint
across the split even when records repeat within a file.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .equations import (
    Const,
    Equation,
    Mul,
    Paren,
    XTerm,
    chain,
    closed_form_solution,
    parse_equation,
    signed_const,
    signed_x,
)
from .errors import EngineError, SamplingExhaustedError, SchemaError
from .misconceptions import (
    CATALOG,
    Misconception,
    get_misconception,
    reduce_with_misconceptions,
    try_apply,
)
from .reduction import ReductionTrace, reduce
from .taxonomy import ORDERED_TYPES, ProblemType, classify

MAX_TRIES = 1000


def _nz(rng: random.Random, lo: int, hi: int) -> Fraction:
    if lo > hi or (lo == 0 and hi == 0):
        raise SchemaError(f"coefficient range [{lo}, {hi}] has no nonzero integer")
    while True:
        v = rng.randint(lo, hi)
        if v != 0:
            return Fraction(v)


def _prod_term(c: Fraction, d: Fraction) -> tuple[int, Mul]:
    sign = -1 if c < 0 else 1
    return sign, Mul(Const(abs(c)), Const(d))


def _group_term(c: Fraction, inner) -> tuple[int, Mul]:
    sign = -1 if c < 0 else 1
    return sign, Mul(Const(abs(c)), Paren(inner))


def _build(t: ProblemType, rng: random.Random, lo: int, hi: int) -> Equation:
    n = lambda: _nz(rng, lo, hi)
    T = ProblemType
    if t is T.T1:
        return Equation(XTerm(n()), Const(n()))
    if t is T.T2:
        return Equation(XTerm(n()), chain([signed_const(n()), signed_const(n())]))
    if t is T.T3:
        return Equation(XTerm(n()), Mul(Const(n()), Const(n())))
    if t is T.T4:
        return Equation(chain([signed_x(n()), signed_x(n())]), Const(n()))
    if t is T.T5:
        return Equation(chain([signed_x(n()), signed_const(n())]), Const(n()))
    if t is T.T6:
        return Equation(chain([signed_const(n()), signed_x(n())]), Const(n()))
    if t is T.T7:
        return Equation(XTerm(n()), chain([signed_x(n()), signed_const(n())]))
    if t is T.T8:
        return Equation(XTerm(n()), Mul(Const(n()), Paren(Mul(Const(n()), Const(n())))))
    if t is T.T9:
        inner = chain([signed_x(n()), signed_const(n())])
        return Equation(XTerm(n()), Mul(Const(n()), Paren(inner)))
    if t is T.T10:
        lead = signed_const(n())
        return Equation(XTerm(n()), chain([lead, _prod_term(n(), n())]))
    if t is T.T11:
        lhs = chain([signed_const(n()), signed_x(n()), signed_x(n())])
        return Equation(lhs, Const(n()))
    if t is T.T12:
        inner = chain([signed_x(n()), signed_const(n())])
        return Equation(XTerm(n()), chain([signed_const(n()), _group_term(n(), inner)]))
    if t is T.T14:
        return Equation(
            chain([signed_x(n()), signed_const(n())]),
            chain([signed_x(n()), signed_const(n())]),
        )
    if t is T.T15:
        return Equation(
            chain([signed_x(n()), signed_x(n())]),
            chain([signed_const(n()), signed_const(n())]),
        )
    if t is T.T16:
        rhs = chain([signed_x(n()), signed_const(n()), signed_const(n())])
        return Equation(XTerm(n()), rhs)
    raise ValueError(f"no builder for {t}")


def sample_instance(
    t: ProblemType,
    rng: random.Random,
    coeff_min: int = -9,
    coeff_max: int = 9,
    accept=None,
) -> Equation:
    """Draw a non-degenerate instance of exactly type ``t``.

    Rejects draws whose classification, closed form or full reduction fails,
    plus anything the optional ``accept`` hook refuses.
    """
    for _ in range(MAX_TRIES):
        eq = _build(t, rng, coeff_min, coeff_max)
        try:
            if classify(eq) is not t:
                continue
            closed_form_solution(eq)
            reduce(eq)
        except EngineError:
            continue
        if accept is not None and not accept(eq):
            continue
        return eq
    raise SamplingExhaustedError(
        f"no acceptable {t} instance in [{coeff_min}, {coeff_max}] after {MAX_TRIES} draws"
    )


@dataclass(frozen=True)
class InstanceSampler:
    """Deterministic instance source: same seed and config, same sequence."""

    seed: int
    coeff_min: int = -9
    coeff_max: int = 9
    types: tuple[ProblemType, ...] = ORDERED_TYPES

    def rng_for(self, key: str) -> random.Random:
        return random.Random(f"{self.seed}:{key}")

    def sample(self, t: ProblemType, key: str, accept=None) -> Equation:
        if t not in self.types:
            raise SchemaError(f"{t} is outside this sampler's type filter")
        return sample_instance(t, self.rng_for(key), self.coeff_min, self.coeff_max, accept)


def sample_for_misconception(
    m: Misconception | str,
    t: ProblemType,
    rng: random.Random,
    coeff_min: int = -9,
    coeff_max: int = 9,
    accept=None,
) -> tuple[Equation, ReductionTrace]:
    """An instance of ``t`` whose single-misconception trace actually uses
    ``m`` and ends somewhere distinguishable from the correct answer."""
    m = m if isinstance(m, Misconception) else get_misconception(m)
    for _ in range(MAX_TRIES):
        try:
            eq = sample_instance(t, rng, coeff_min, coeff_max)
        except SamplingExhaustedError:
            raise
        try:
            trace = reduce_with_misconceptions(eq, [m])
        except EngineError:
            continue
        if trace.misconceptions_used != (m.id,):
            continue
        if trace.dead_end is None and trace.answer == closed_form_solution(eq):
            continue
        if accept is not None and not accept(eq, trace):
            continue
        return eq, trace
    raise SamplingExhaustedError(
        f"no conforming ({m.id}, {t}) instance after {MAX_TRIES} attempts"
    )


# ---------------------------------------------------------------------------
# Dataset generation
# ---------------------------------------------------------------------------

_VALID_RATIOS = (0.0, 0.25, 0.5, 1.0)


@dataclass(frozen=True)
class DatasetConfig:
    seed: int = 0
    misconception: str | None = None
    n_m: int = 0
    ratio: float = 0.0  # n_c / n_m
    n_correct_per_type: int = 2000
    test_per_type: int = 500
    coeff_min: int = -9
    coeff_max: int = 9
    out_dir: str = "dataset"

    def validate(self) -> None:
        if self.ratio not in _VALID_RATIOS:
            raise SchemaError(
                f"ratio must be one of {_VALID_RATIOS}, got {self.ratio}"
            )
        for name in ("n_m", "n_correct_per_type", "test_per_type"):
            if getattr(self, name) < 0:
                raise SchemaError(f"{name} must be >= 0")
        if self.misconception is not None:
            get_misconception(self.misconception)


def config_from_dict(data: dict) -> DatasetConfig:
    allowed = set(DatasetConfig.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise SchemaError(f"unknown config fields: {sorted(unknown)}")
    return DatasetConfig(**data)


def _pool(seed: int, equation_text: str) -> str:
    digest = hashlib.sha256(f"{seed}:{equation_text}".encode()).digest()
    return "test" if digest[0] < 64 else "train"


def _record(idx_id: str, t: ProblemType, trace: ReductionTrace, label: str,
            misconception_id: str | None, seed_key: str) -> dict:
    lines = trace.equation_lines()
    rec = {
        "id": idx_id,
        "problem_type": t.name,
        "equation": lines[0],
        "steps": lines,
        "final_answer": lines[-1],
        "label": label,
    }
    if misconception_id is not None:
        rec["misconception_id"] = misconception_id
    rec["seed"] = seed_key
    return rec


def _sample_correct(sampler: InstanceSampler, seed: int, t: ProblemType, key: str,
                    pool: str) -> ReductionTrace:
    rng = sampler.rng_for(key)
    eq = sample_instance(
        t, rng, sampler.coeff_min, sampler.coeff_max,
        accept=lambda e: _pool(seed, str(e)) == pool,
    )
    return reduce(eq)


def _sample_mal(sampler: InstanceSampler, seed: int, m: Misconception,
                t: ProblemType, key: str, pool: str) -> ReductionTrace:
    rng = sampler.rng_for(key)
    _, trace = sample_for_misconception(
        m, t, rng, sampler.coeff_min, sampler.coeff_max,
        accept=lambda e, tr: _pool(seed, str(e)) == pool,
    )
    return trace


def generate(config: DatasetConfig) -> dict:
    """Emit train.jsonl, test.jsonl and manifest.json under ``out_dir``.

    With a misconception: n_m erroneous records over its applicable types
    plus floor(ratio * n_m) correct records over all types.  Without one:
    n_correct_per_type correct records per type.  The test file always holds
    test_per_type correct records per type, disjoint from train.
    """
    config.validate()
    m = get_misconception(config.misconception) if config.misconception else None
    sampler = InstanceSampler(config.seed, config.coeff_min, config.coeff_max)
    seed = config.seed

    train: list[dict] = []
    if m is None:
        for t in ORDERED_TYPES:
            for i in range(config.n_correct_per_type):
                key = f"train:cor:{t.name}:{i}"
                trace = _sample_correct(sampler, seed, t, key, "train")
                train.append(_record(f"train-{len(train):06d}", t, trace, "correct",
                                     None, f"{seed}:{key}"))
    else:
        alpha = [t for t in ORDERED_TYPES if t in m.applicable_types]
        for i in range(config.n_m):
            key = f"train:mal:{i}"
            t = sampler.rng_for(f"{key}:type").choice(alpha)
            trace = _sample_mal(sampler, seed, m, t, key, "train")
            train.append(_record(f"train-{len(train):06d}", t, trace, "misconception",
                                 m.id, f"{seed}:{key}"))
        n_c = int(config.ratio * config.n_m)
        for i in range(n_c):
            key = f"train:cor:{i}"
            t = sampler.rng_for(f"{key}:type").choice(list(ORDERED_TYPES))
            trace = _sample_correct(sampler, seed, t, key, "train")
            train.append(_record(f"train-{len(train):06d}", t, trace, "correct",
                                 None, f"{seed}:{key}"))

    test: list[dict] = []
    for t in ORDERED_TYPES:
        for i in range(config.test_per_type):
            key = f"test:{t.name}:{i}"
            trace = _sample_correct(sampler, seed, t, key, "test")
            test.append(_record(f"test-{len(test):06d}", t, trace, "correct",
                                None, f"{seed}:{key}"))

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, records in (("train.jsonl", train), ("test.jsonl", test)):
        payload = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
        (out / name).write_text(payload, encoding="utf-8")
        digests[name] = hashlib.sha256(payload.encode("utf-8")).hexdigest()

    # the manifest identifies the content, not its location
    echoed = {k: v for k, v in asdict(config).items() if k != "out_dir"}
    manifest = {
        "config": echoed,
        "config_hash": hashlib.sha256(
            json.dumps(echoed, sort_keys=True).encode()
        ).hexdigest(),
        "counts": {
            "train": _count(train),
            "test": _count(test),
        },
        "digests": digests,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def _count(records: list[dict]) -> dict:
    by_type: dict[str, dict[str, int]] = {}
    totals = {"total": len(records), "correct": 0, "misconception": 0}
    for r in records:
        totals[r["label"]] += 1
        slot = by_type.setdefault(r["problem_type"], {"correct": 0, "misconception": 0})
        slot[r["label"]] += 1
    totals["by_type"] = {k: by_type[k] for k in sorted(by_type)}
    return totals


# ---------------------------------------------------------------------------
# Dataset verification (replay)
# ---------------------------------------------------------------------------

_RECORD_KEYS = ("id", "problem_type", "equation", "steps", "final_answer", "label", "seed")


@dataclass
class VerifyReport:
    total: int = 0
    passed: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total


def _replay(rec: dict) -> None:
    eq = parse_equation(rec["equation"])
    t = classify(eq)
    if t.name != rec["problem_type"]:
        raise SchemaError(f"classifies as {t.name}, recorded {rec['problem_type']}")
    label = rec["label"]
    if label == "correct":
        trace = reduce(eq)
        if str(trace.answer) not in rec["final_answer"]:
            raise SchemaError("final answer does not match the oracle")
        if trace.answer != closed_form_solution(eq):
            raise SchemaError("correct record disagrees with the closed form")
    elif label == "misconception":
        mid = rec.get("misconception_id")
        if not mid:
            raise SchemaError("misconception record lacks misconception_id")
        trace = reduce_with_misconceptions(eq, [mid])
        if trace.misconceptions_used != (mid,):
            raise SchemaError(f"trace does not use exactly {mid}")
    else:
        raise SchemaError(f"unknown label {label!r}")
    if rec["steps"] != trace.equation_lines():
        raise SchemaError("steps do not replay")
    if rec["final_answer"] != rec["steps"][-1]:
        raise SchemaError("final_answer is not the last step")


def verify_records(lines: list[str]) -> VerifyReport:
    report = VerifyReport()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        report.total += 1
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            report.failures.append((lineno, f"bad JSON: {exc}"))
            continue
        missing = [k for k in _RECORD_KEYS if k not in rec]
        if missing:
            report.failures.append((lineno, f"missing fields: {missing}"))
            continue
        try:
            _replay(rec)
        except (EngineError, SchemaError) as exc:
            report.failures.append((lineno, str(exc)))
            continue
        report.passed += 1
    return report


def verify_dataset(path: str | Path) -> VerifyReport:
    text = Path(path).read_text(encoding="utf-8")
    return verify_records(text.splitlines())


def misconception_targets(seed: int = 0) -> dict[tuple[ProblemType, str], str]:
    """Computed target label per (type, misconception) edge, derived by
    rewriting a conforming representative instance and reclassifying."""
    out: dict[tuple[ProblemType, str], str] = {}
    for m in CATALOG:
        for t in ORDERED_TYPES:
            if t not in m.applicable_types:
                continue
            if m.at_solve:
                out[(t, m.id)] = "solved"
                continue
            rng = random.Random(f"{seed}:target:{m.id}:{t.name}")
            try:
                eq, _ = sample_for_misconception(m, t, rng)
            except SamplingExhaustedError:
                out[(t, m.id)] = "none"
                continue
            res = try_apply(m, eq, t)
            assert res is not None
            _, label = res
            out[(t, m.id)] = label.name if isinstance(label, ProblemType) else label
    return out
