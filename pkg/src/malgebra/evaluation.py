"""Scoring of externally produced transcripts against the engine oracles.

Accuracies are kept as exact fractions on a 0-100 scale.  The four
aggregates (MA, CA_A, CA_NA, OCA) are means of per-type accuracies over the
misconception's applicable set, its complement, and the full taxonomy; a
batch that misses a type renders every aggregate over that type undefined
rather than silently skewed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .equations import Const, Equation, XTerm, closed_form_solution, parse_equation
from .errors import EmptyBatchError, EngineError, SchemaError
from .misconceptions import (
    CATALOG,
    Misconception,
    get_misconception,
    reduce_with_misconceptions,
)
from .reduction import reduce
from .solution_space import enumerate_tree
from .taxonomy import ORDERED_TYPES, ProblemType, classify, correct_successors

GRADE_CORRECT = "correct"
GRADE_MATCH = "misconception-match"
GRADE_OTHER = "other"

DEFAULT_THETA = Fraction(90)


@dataclass(frozen=True)
class Transcript:
    problem_type: str
    equation: str
    model_answer: str
    model_steps: tuple[str, ...] | None = None


class TranscriptError(SchemaError):
    """Transcript cannot be interpreted; counts as 'other' in batch mode."""


def transcript_from_dict(data: dict) -> Transcript:
    try:
        steps = data.get("model_steps")
        return Transcript(
            problem_type=data["problem_type"],
            equation=data["equation"],
            model_answer=str(data["model_answer"]),
            model_steps=tuple(steps) if steps is not None else None,
        )
    except KeyError as exc:
        raise SchemaError(f"transcript missing field {exc}") from None


def load_transcripts(path: str | Path) -> list[Transcript]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(transcript_from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno}: bad JSON: {exc}") from None
    return out


def parse_answer(text: str) -> Fraction | Equation:
    """An answer is a rational, an ``x = value`` form, or (for dead-end
    transcripts) a full equation; formatting never affects comparison."""
    s = text.strip()
    if "=" in s:
        try:
            eq = parse_equation(s)
        except EngineError as exc:
            raise TranscriptError(f"unparsable answer {text!r}") from exc
        if eq.lhs == XTerm(Fraction(1)) and isinstance(eq.rhs, Const):
            return eq.rhs.value
        return eq
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise TranscriptError(f"unparsable answer {text!r}") from exc


def _steps_match(model_steps, trace_lines: list[str]) -> bool:
    if model_steps is None or len(model_steps) != len(trace_lines):
        return False
    try:
        return all(
            parse_equation(a) == parse_equation(b)
            for a, b in zip(model_steps, trace_lines)
        )
    except EngineError:
        return False


def _mal_outcomes(eq: Equation, m: Misconception) -> list[tuple[Fraction | Equation, tuple[str, ...]]]:
    """Every terminal reachable with exactly one firing of ``m``, paired with
    its step lines; outcomes equal to the correct answer are excluded."""
    correct = closed_form_solution(eq)
    tree = enumerate_tree(eq, [m], max_misconceptions_per_path=1)
    out = []
    for leaf in tree.leaves:
        if leaf.misconceptions != (m.id,):
            continue
        if leaf.dead_end == "variable eliminated":
            out.append((parse_equation(leaf.equations[-1]), leaf.equations))
        elif leaf.answer is not None and leaf.answer != correct:
            out.append((leaf.answer, leaf.equations))
    return out


def grade(
    transcript: Transcript,
    m: Misconception | str | None = None,
    mode: str = "answer",
) -> str:
    """Classify one transcript as correct, misconception-match, or other.

    ``answer`` mode compares final answers as exact rationals;
    ``steps`` mode additionally requires the step sequence to replay the
    corresponding engine trace line for line.
    """
    if mode not in ("answer", "steps"):
        raise SchemaError(f"unknown grading mode {mode!r}")
    m = get_misconception(m) if isinstance(m, str) else m
    try:
        eq = parse_equation(transcript.equation)
        answer = parse_answer(transcript.model_answer)
        correct = closed_form_solution(eq)
    except (EngineError, TranscriptError) as exc:
        raise TranscriptError(str(exc)) from None

    if answer == correct:
        if mode == "answer" or _steps_match(transcript.model_steps, reduce(eq).equation_lines()):
            return GRADE_CORRECT
        return GRADE_OTHER
    if m is not None:
        for outcome, lines in _mal_outcomes(eq, m):
            if answer == outcome:
                if mode == "answer" or _steps_match(transcript.model_steps, list(lines)):
                    return GRADE_MATCH
        if mode == "steps":
            return GRADE_OTHER
    return GRADE_OTHER


# ---------------------------------------------------------------------------
# Batch scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricsReport:
    misconception_id: str
    per_type_correct: dict[str, Fraction | None]
    per_type_misconception: dict[str, Fraction | None]
    ma: Fraction | None
    ca_a: Fraction | None
    ca_na: Fraction | None
    oca: Fraction | None
    theta_m: Fraction
    theta_c: Fraction
    absent_types: tuple[str, ...]
    counts: dict[str, dict[str, int]]

    @property
    def property_1(self) -> bool | None:
        """Replicates the misconception where it applies: MA >= theta_m."""
        if self.ma is None:
            return None
        return self.ma >= self.theta_m

    @property
    def property_2(self) -> bool | None:
        """Solves correctly where it does not apply: CA_NA >= theta_c."""
        if self.ca_na is None:
            return None
        return self.ca_na >= self.theta_c

    @property
    def is_csm(self) -> bool | None:
        if self.property_1 is None or self.property_2 is None:
            return None
        return self.property_1 and self.property_2

    def to_dict(self) -> dict:
        pct = lambda v: None if v is None else float(v)
        return {
            "misconception": self.misconception_id,
            "MA": pct(self.ma),
            "CA_A": pct(self.ca_a),
            "CA_NA": pct(self.ca_na),
            "OCA": pct(self.oca),
            "theta_m": float(self.theta_m),
            "theta_c": float(self.theta_c),
            "property_1": self.property_1,
            "property_2": self.property_2,
            "is_csm": self.is_csm,
            "absent_types": list(self.absent_types),
            "per_type": {
                t: {
                    "CA": pct(self.per_type_correct[t]),
                    "MA": pct(self.per_type_misconception[t]),
                    "n": self.counts[t]["n"],
                }
                for t in sorted(self.counts)
            },
        }

    def render_text(self) -> str:
        fmt = lambda v: "undefined" if v is None else f"{float(v):.2f}"
        mark = lambda v: "?" if v is None else ("yes" if v else "no")
        lines = [
            f"misconception: {self.misconception_id}",
            f"MA    = {fmt(self.ma)}",
            f"CA_A  = {fmt(self.ca_a)}",
            f"CA_NA = {fmt(self.ca_na)}",
            f"OCA   = {fmt(self.oca)}",
            f"property 1 (MA >= {float(self.theta_m):g}): {mark(self.property_1)}",
            f"property 2 (CA_NA >= {float(self.theta_c):g}): {mark(self.property_2)}",
            f"cognitive student model: {mark(self.is_csm)}",
        ]
        if self.absent_types:
            lines.append(f"absent types: {', '.join(self.absent_types)}")
        return "\n".join(lines)


def _mean(values: list[Fraction | None]) -> Fraction | None:
    if not values or any(v is None for v in values):
        return None
    return sum(values, Fraction(0)) / len(values)


def score(
    transcripts: list[Transcript],
    m: Misconception | str,
    mode: str = "answer",
    theta_m: Fraction = DEFAULT_THETA,
    theta_c: Fraction = DEFAULT_THETA,
) -> MetricsReport:
    """Aggregate per-type accuracies into MA, CA_A, CA_NA, OCA and the
    two-property verdict at the given thresholds."""
    if not transcripts:
        raise EmptyBatchError("no transcripts to score")
    m = get_misconception(m) if isinstance(m, str) else m
    counts: dict[str, dict[str, int]] = {
        t.name: {"n": 0, "correct": 0, "match": 0, "other": 0} for t in ORDERED_TYPES
    }
    for tr in transcripts:
        if tr.problem_type not in counts:
            raise SchemaError(f"unknown problem type {tr.problem_type!r}")
        try:
            g = grade(tr, m, mode)
        except TranscriptError:
            g = GRADE_OTHER
        slot = counts[tr.problem_type]
        slot["n"] += 1
        slot["correct" if g == GRADE_CORRECT else "match" if g == GRADE_MATCH else "other"] += 1

    ca: dict[str, Fraction | None] = {}
    ma: dict[str, Fraction | None] = {}
    for t in ORDERED_TYPES:
        slot = counts[t.name]
        if slot["n"] == 0:
            ca[t.name] = None
            ma[t.name] = None
        else:
            ca[t.name] = Fraction(100) * Fraction(slot["correct"], slot["n"])
            ma[t.name] = Fraction(100) * Fraction(slot["match"], slot["n"])

    alpha = [t for t in ORDERED_TYPES if t in m.applicable_types]
    non_alpha = [t for t in ORDERED_TYPES if t not in m.applicable_types]
    report = MetricsReport(
        misconception_id=m.id,
        per_type_correct=ca,
        per_type_misconception=ma,
        ma=_mean([ma[t.name] for t in alpha]),
        ca_a=_mean([ca[t.name] for t in alpha]),
        ca_na=_mean([ca[t.name] for t in non_alpha]) if non_alpha else None,
        oca=_mean([ca[t.name] for t in ORDERED_TYPES]),
        theta_m=Fraction(theta_m),
        theta_c=Fraction(theta_c),
        absent_types=tuple(t.name for t in ORDERED_TYPES if counts[t.name]["n"] == 0),
        counts=counts,
    )
    return report


# ---------------------------------------------------------------------------
# Diagnosis: which misconception explains a transcript?
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnosis:
    misconceptions: tuple[str, ...]
    quality: str  # "full" or "prefix <k>/<n>"
    matched: int
    trace_length: int


def _prefix_len(model: list[Equation], lines: list[str]) -> int:
    n = 0
    for got, want in zip(model, lines):
        try:
            if got != parse_equation(want):
                break
        except EngineError:
            break
        n += 1
    return n


def _reachable_types(t0: ProblemType) -> set[ProblemType]:
    seen = {t0}
    frontier = [t0]
    while frontier:
        t = frontier.pop()
        for dst, _ in correct_successors(t):
            if dst not in seen:
                seen.add(dst)
                frontier.append(dst)
    return seen


def diagnose(transcript: Transcript, max_candidates: int = 5) -> list[Diagnosis]:
    """Rank misconception sets (size <= 2) by how well their traces replay
    the transcript's steps: longest exact prefix first, then fewest
    misconceptions.  Empty when the all-correct trace matches fully."""
    if transcript.model_steps is None:
        raise SchemaError("diagnosis needs model_steps")
    eq = parse_equation(transcript.equation)
    model = [parse_equation(s) for s in transcript.model_steps]

    correct_lines = reduce(eq).equation_lines()
    if _prefix_len(model, correct_lines) == len(model) == len(correct_lines):
        return []

    relevant = [
        m for m in CATALOG
        if m.at_solve or (m.applicable_types & _reachable_types(classify(eq)))
    ]

    def trace_for(ms: tuple[Misconception, ...]) -> list[str] | None:
        try:
            tr = reduce_with_misconceptions(eq, list(ms))
        except EngineError:
            return None
        if tr.misconceptions_used != tuple(m.id for m in ms):
            return None
        return tr.equation_lines()

    def evaluate(ms: tuple[Misconception, ...]) -> Diagnosis | None:
        lines = trace_for(ms)
        if lines is None:
            return None
        k = _prefix_len(model, lines)
        if k == len(model) == len(lines):
            quality = "full"
        else:
            quality = f"prefix {k}/{len(lines)}"
        return Diagnosis(tuple(m.id for m in ms), quality, k, len(lines))

    singles = [d for m in relevant if (d := evaluate((m,))) is not None]
    full_singles = [d for d in singles if d.quality == "full"]
    if full_singles:
        return full_singles

    pairs = []
    for m1 in relevant:
        for m2 in relevant:
            if m1.id == m2.id:
                continue
            d = evaluate((m1, m2))
            if d is not None:
                pairs.append(d)

    ranked = sorted(
        singles + pairs,
        key=lambda d: (-d.matched, len(d.misconceptions)),
    )
    full = [d for d in ranked if d.quality == "full"]
    if full:
        return full
    return [d for d in ranked if d.matched > 0][:max_candidates]
