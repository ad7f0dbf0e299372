"""The misconception catalog: 19 buggy rewrite rules and the error-aware walk.

Each rule carries the set of problem types it can fire on and a rewrite that
edits the matched subterm in place, exactly following the rule's expression.
A misconception step replaces the correct step at its node; the result is
reclassified structurally, so the target of an erroneous edge is computed,
never hardcoded.

Four rules (M19, M20_S20, M21, M22_S1) apply to every type because they fire
at the terminal solve step rather than at a reduction node.

Site bindings are data: ``_SITES`` records, per (rule, type), which side and
subterm the rule's pattern is anchored to.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .equations import Const, Equation, Mul, Paren
from .errors import (
    MisconceptionNotApplicableError,
    NonterminationError,
    UnclassifiableResultError,
)
from .errors import UnclassifiableFormError
from .reduction import (
    EdgeRef,
    ReductionTrace,
    TraceStep,
    rebuild,
    reduce_step,
    solve_terminal,
    solved_equation,
    t1_parts,
)
from .taxonomy import (
    CAtom,
    DEAD_END,
    GroupAtom,
    OpaqueAtom,
    ORDERED_TYPES,
    ProblemType,
    ProdAtom,
    SOLVED,
    SignedAtom,
    TypeGraph,
    XAtom,
    build_type_graph,
    classify,
    correct_successors,
    has_unknown,
    view_atoms,
)

T = ProblemType


@dataclass(frozen=True)
class Misconception:
    id: str
    expression: str
    applicable_types: frozenset[ProblemType]
    description: str
    at_solve: bool = False

    def __str__(self) -> str:
        return self.id


_ALL_TYPES = frozenset(ORDERED_TYPES)


# ---------------------------------------------------------------------------
# Site helpers
# ---------------------------------------------------------------------------


def _find_group(atoms: list[SignedAtom]) -> tuple[int, int, GroupAtom] | None:
    for i, (s, a) in enumerate(atoms):
        if isinstance(a, GroupAtom):
            return i, s, a
    return None


def _find_prod(atoms: list[SignedAtom]) -> tuple[int, int, ProdAtom] | None:
    for i, (s, a) in enumerate(atoms):
        if isinstance(a, ProdAtom):
            return i, s, a
    return None


def _group_inner_xc(g: GroupAtom) -> tuple[Fraction, Fraction] | None:
    """Additive (x-coefficient, constant) of a ``(Bx +/- C)`` interior."""
    if len(g.inner) != 2:
        return None
    (s1, a1), (s2, a2) = g.inner
    if isinstance(a1, XAtom) and isinstance(a2, CAtom):
        return s1 * a1.coef, s2 * a2.value
    return None


def _pair_x_const(atoms: list[SignedAtom]) -> tuple[Fraction, Fraction] | None:
    """Additive (x, const) values of a two-term side in either order."""
    if len(atoms) != 2:
        return None
    kinds = {type(atoms[0][1]), type(atoms[1][1])}
    if kinds != {XAtom, CAtom}:
        return None
    x = next(s * a.coef for s, a in atoms if isinstance(a, XAtom))
    c = next(s * a.value for s, a in atoms if isinstance(a, CAtom))
    return x, c


# ---------------------------------------------------------------------------
# Rewrites.  Each returns the transformed equation, or None when the rule's
# pattern has no site on this instance.
# ---------------------------------------------------------------------------


def _rw_m1(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is not None:
        i, s, g = found
        part = Paren(rebuild(list(g.inner)))
        new = atoms[:i] + [(s, CAtom(g.multiplier)), (1, OpaqueAtom(part))] + atoms[i + 1 :]
        return Equation(eq.lhs, rebuild(new))
    prod = _find_prod(atoms)
    if prod is not None:
        i, s, p = prod
        rest = p.factors[1:]
        part_node = Const(rest[0]) if len(rest) == 1 else _prod_node(rest)
        new = atoms[:i] + [(s, CAtom(p.factors[0])), (1, OpaqueAtom(Paren(part_node)))] + atoms[i + 1 :]
        return Equation(eq.lhs, rebuild(new))
    return None


def _prod_node(factors):
    node = Const(factors[0])
    for f in factors[1:]:
        node = Mul(node, Const(f))
    return node


def _rw_m2(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, s, g = found
    if _group_inner_xc(g) is None:
        return None
    (s1, a1), (s2, a2) = g.inner
    new = atoms[:i] + [(1, XAtom(s * g.multiplier * s1 * a1.coef)), (s2, a2)] + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_m3(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    for i in range(len(atoms) - 1):
        s1, a1 = atoms[i]
        s2, a2 = atoms[i + 1]
        if isinstance(a1, CAtom) and isinstance(a2, GroupAtom):
            folded = s1 * a1.value + s2 * a2.multiplier
            new = atoms[:i] + [(1, GroupAtom(folded, a2.inner))] + atoms[i + 2 :]
            return Equation(eq.lhs, rebuild(new))
        if isinstance(a1, CAtom) and isinstance(a2, ProdAtom):
            folded = s1 * a1.value + s2 * a2.factors[0]
            new = atoms[:i] + [(1, ProdAtom((folded,) + a2.factors[1:]))] + atoms[i + 2 :]
            return Equation(eq.lhs, rebuild(new))
    return None


def _rw_m4(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, s, g = found
    if len(g.inner) != 1 or not isinstance(g.inner[0][1], ProdAtom):
        return None
    inner = g.inner[0][1]
    interleaved: list[Fraction] = []
    for f in inner.factors:
        interleaved.extend((g.multiplier, f))
    new = atoms[:i] + [(s, ProdAtom(tuple(interleaved)))] + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_m5(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, s, g = found
    xc = _group_inner_xc(g)
    if xc is None:
        return None
    b, c = xc
    m_eff = s * g.multiplier
    new_inner = ((1, XAtom(m_eff * b)), (1, CAtom(m_eff * c)))
    new = atoms[:i] + [(s, GroupAtom(g.multiplier, new_inner))] + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_m6(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, s, g = found
    m_eff = s * g.multiplier
    if m_eff >= 0:
        return None
    if len(g.inner) != 2:
        return None
    (s1, a1), (s2, a2) = g.inner
    if not (isinstance(a1, XAtom) and isinstance(a2, CAtom) and s2 == -1):
        return None
    # distributes into the x-term correctly but never flips the second sign
    new = atoms[:i] + [(1, XAtom(m_eff * s1 * a1.coef)), (1, CAtom(m_eff * a2.value))] + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_m8(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, s, g = found
    if _group_inner_xc(g) is None:
        return None
    (s1, a1), (s2, a2) = g.inner
    m_eff = s * g.multiplier
    new = atoms[:i] + [(1, XAtom(s * s1 * a1.coef)), (1, CAtom(s2 * m_eff * a2.value))] + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_m11(eq: Equation, t: ProblemType) -> Equation | None:
    lhs = view_atoms(eq.lhs)
    rhs = view_atoms(eq.rhs)
    left = _pair_x_const(lhs)
    right = _pair_x_const(rhs)
    if left is None or right is None:
        return None
    a, b = left
    c, d = right
    new_lhs = rebuild([(1, XAtom(a)), (1, XAtom(c))])
    new_rhs = rebuild([(1, CAtom(b)), (1, CAtom(d))])
    return Equation(new_lhs, new_rhs)


def _factor_site(eq: Equation, t: ProblemType) -> tuple[str, list[SignedAtom], int] | None:
    """Locate the ``Ax +/- B`` pair for M12/M13: the whole side on T5-T7,
    the parenthesized interior on T9/T12."""
    if t in (T.T5, T.T6):
        atoms = view_atoms(eq.lhs)
        if _pair_x_const(atoms) is not None:
            return "lhs", atoms, -1
        return None
    if t is T.T7:
        atoms = view_atoms(eq.rhs)
        if _pair_x_const(atoms) is not None:
            return "rhs", atoms, -1
        return None
    atoms = view_atoms(eq.rhs)
    found = _find_group(atoms)
    if found is None:
        return None
    i, _, g = found
    if _group_inner_xc(g) is None:
        return None
    return "group", atoms, i


def _rw_m12(eq: Equation, t: ProblemType) -> Equation | None:
    site = _factor_site(eq, t)
    if site is None:
        return None
    where, atoms, i = site
    if where == "group":
        s, g = atoms[i]
        x, c = _group_inner_xc(g)
        new_inner = ((1, XAtom(x + c)),)
        new = atoms[:i] + [(s, GroupAtom(g.multiplier, new_inner))] + atoms[i + 1 :]
        return Equation(eq.lhs, rebuild(new))
    x, c = _pair_x_const(atoms)
    folded = rebuild([(1, XAtom(x + c))])
    if where == "lhs":
        return Equation(folded, eq.rhs)
    return Equation(eq.lhs, folded)


def _rw_m13(eq: Equation, t: ProblemType) -> Equation | None:
    site = _factor_site(eq, t)
    if site is None:
        return None
    where, atoms, i = site
    if where == "group":
        s, g = atoms[i]
        x, c = _group_inner_xc(g)
        new_inner = ((1, CAtom(x + c)),)
        new = atoms[:i] + [(s, GroupAtom(g.multiplier, new_inner))] + atoms[i + 1 :]
        return Equation(eq.lhs, rebuild(new))
    x, c = _pair_x_const(atoms)
    folded = rebuild([(1, CAtom(x + c))])
    if where == "lhs":
        return Equation(folded, eq.rhs)
    return Equation(eq.lhs, folded)


def _op_side(eq: Equation, t: ProblemType) -> str:
    # M14-M18 edit the additive chain of the combine site: the constant sum
    # on T2/T3/T10's right side, the x-term sum on T4's left side.
    return "lhs" if t is T.T4 else "rhs"


def _rw_flip(eq: Equation, t: ProblemType, want: int) -> Equation | None:
    side = _op_side(eq, t)
    atoms = view_atoms(eq.lhs if side == "lhs" else eq.rhs)
    for i in range(1, len(atoms)):
        if atoms[i][0] == want:
            new = list(atoms)
            new[i] = (-want, atoms[i][1])
            rebuilt = rebuild(new)
            if side == "lhs":
                return Equation(rebuilt, eq.rhs)
            return Equation(eq.lhs, rebuilt)
    return None


def _rw_m14(eq: Equation, t: ProblemType) -> Equation | None:
    return _rw_flip(eq, t, want=1)


def _rw_m15(eq: Equation, t: ProblemType) -> Equation | None:
    return _rw_flip(eq, t, want=-1)


def _rw_m16(eq: Equation, t: ProblemType) -> Equation | None:
    atoms = view_atoms(eq.rhs)
    found = _find_prod(atoms)
    if found is None:
        return None
    i, s, p = found
    spread: list[SignedAtom] = [(s, CAtom(p.factors[0]))]
    spread += [(1, CAtom(f)) for f in p.factors[1:]]
    new = atoms[:i] + spread + atoms[i + 1 :]
    return Equation(eq.lhs, rebuild(new))


def _rw_swap(eq: Equation, t: ProblemType, want: int) -> Equation | None:
    side = _op_side(eq, t)
    atoms = view_atoms(eq.lhs if side == "lhs" else eq.rhs)
    for i in range(1, len(atoms)):
        if atoms[i][0] == want:
            new = list(atoms)
            s_prev, first = new[i - 1]
            _, second = new[i]
            new[i - 1] = (s_prev, second)
            new[i] = (-1, first)
            rebuilt = rebuild(new)
            if side == "lhs":
                return Equation(rebuilt, eq.rhs)
            return Equation(eq.lhs, rebuilt)
    return None


def _rw_m17(eq: Equation, t: ProblemType) -> Equation | None:
    return _rw_swap(eq, t, want=1)


def _rw_m18(eq: Equation, t: ProblemType) -> Equation | None:
    return _rw_swap(eq, t, want=-1)


# solve-step rules: value of x as a function of (A, B) in Ax = B
_SOLVE_FORMULAS: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "M19": lambda a, b: a + b,
    "M20_S20": lambda a, b: b,
    "M21": lambda a, b: a - b,
    "M22_S1": lambda a, b: a / b,
}

_REWRITES: dict[str, Callable[[Equation, ProblemType], Equation | None]] = {
    "M1": _rw_m1,
    "M2_S3": _rw_m2,
    "M3": _rw_m3,
    "M4": _rw_m4,
    "M5": _rw_m5,
    "M6": _rw_m6,
    "M8": _rw_m8,
    "M11": _rw_m11,
    "M12_S15": _rw_m12,
    "M13": _rw_m13,
    "M14": _rw_m14,
    "M15": _rw_m15,
    "M16": _rw_m16,
    "M17": _rw_m17,
    "M18": _rw_m18,
}

# Per-(rule, type) anchor of the matched subterm.  This is the binding table
# the rewrites implement; "solve" marks rules firing at the terminal step.
_SITES: dict[str, dict[ProblemType, str]] = {
    "M1": {T.T8: "rhs group", T.T9: "rhs group", T.T10: "rhs product", T.T12: "rhs group"},
    "M2_S3": {T.T9: "rhs group interior", T.T12: "rhs group interior"},
    "M3": {T.T10: "rhs constant+product pair", T.T12: "rhs constant+group pair"},
    "M4": {T.T8: "rhs group interior"},
    "M5": {T.T9: "rhs group interior", T.T12: "rhs group interior"},
    "M6": {T.T9: "rhs group (negative multiplier, inner subtraction)",
           T.T12: "rhs group (negative multiplier, inner subtraction)"},
    "M8": {T.T9: "rhs group interior", T.T12: "rhs group interior"},
    "M11": {T.T14: "both sides"},
    "M12_S15": {T.T5: "lhs pair", T.T6: "lhs pair", T.T7: "rhs pair",
                T.T9: "rhs group interior", T.T12: "rhs group interior"},
    "M13": {T.T5: "lhs pair", T.T6: "lhs pair", T.T7: "rhs pair",
            T.T9: "rhs group interior", T.T12: "rhs group interior"},
    "M14": {T.T2: "rhs first '+' junction", T.T4: "lhs first '+' junction"},
    "M15": {T.T2: "rhs first '-' junction", T.T4: "lhs first '-' junction"},
    "M16": {T.T3: "rhs product", T.T10: "rhs product"},
    "M17": {T.T2: "rhs first '+' junction", T.T4: "lhs first '+' junction"},
    "M18": {T.T2: "rhs first '-' junction", T.T4: "lhs first '-' junction"},
    "M19": {t: "solve" for t in ORDERED_TYPES},
    "M20_S20": {t: "solve" for t in ORDERED_TYPES},
    "M21": {t: "solve" for t in ORDERED_TYPES},
    "M22_S1": {t: "solve" for t in ORDERED_TYPES},
}


def _types(*names: str) -> frozenset[ProblemType]:
    return frozenset(ProblemType[n] for n in names)


CATALOG: tuple[Misconception, ...] = (
    Misconception("M1", "A(part) → A + (part)", _types("T8", "T9", "T10", "T12"),
                  "Treating distribution as addition"),
    Misconception("M2_S3", "A(Bx ± C) → ABx ± C", _types("T9", "T12"),
                  "Ignoring distribution"),
    Misconception("M3", "A ± B(part) → (A ± B)(part)", _types("T10", "T12"),
                  "Misapplying parentheses"),
    Misconception("M4", "A(B*C) → A*B*A*C", _types("T8"),
                  "Incorrectly distributing multiplication"),
    Misconception("M5", "A(Bx ± C) → A(A*Bx ± A*C)", _types("T9", "T12"),
                  "Over-distribution"),
    Misconception("M6", "-A(Bx - C) → -A*Bx - A*C", _types("T9", "T12"),
                  "Incorrect sign distribution"),
    Misconception("M8", "A(Bx ± C) → Bx ± A*C", _types("T9", "T12"),
                  "Incorrect distribution on x term"),
    Misconception("M11", "Ax ± B = Cx ± D → Ax + Cx = B + D", _types("T14"),
                  "Incorrectly combining terms"),
    Misconception("M12_S15", "Ax ± B → (A ± B)x", _types("T5", "T6", "T7", "T9", "T12"),
                  "Incorrectly factoring x"),
    Misconception("M13", "Ax ± B → (A ± B)", _types("T5", "T6", "T7", "T9", "T12"),
                  "Incorrectly factoring x"),
    Misconception("M14", "part1 + part2 → part1 - part2", _types("T2", "T4"),
                  "Incorrectly swapping addition and subtraction"),
    Misconception("M15", "part1 - part2 → part1 + part2", _types("T2", "T4"),
                  "Incorrectly swapping addition and subtraction"),
    Misconception("M16", "part1 * part2 → part1 + part2", _types("T3", "T10"),
                  "Treating multiplication as addition"),
    Misconception("M17", "A + B → B - A", _types("T2", "T4"),
                  "Incorrectly swapping order of addition and subtraction"),
    Misconception("M18", "A - B → B - A", _types("T2", "T4"),
                  "Incorrectly swapping order of addition and subtraction"),
    Misconception("M19", "Ax = B → x = A + B", _ALL_TYPES,
                  "Treat division as addition", at_solve=True),
    Misconception("M20_S20", "Ax = B → x = B", _ALL_TYPES,
                  "Divide only on one side", at_solve=True),
    Misconception("M21", "Ax = B → x = A - B", _ALL_TYPES,
                  "Treat division as subtraction", at_solve=True),
    Misconception("M22_S1", "Ax = B → x = A/B", _ALL_TYPES,
                  "Incorrect numerator and denominator", at_solve=True),
)

_BY_ID = {m.id: m for m in CATALOG}


def get_misconception(mid: str) -> Misconception:
    try:
        return _BY_ID[mid]
    except KeyError:
        raise MisconceptionNotApplicableError(f"unknown misconception id: {mid}") from None


def resolve_set(ms: Sequence["Misconception | str"]) -> list[Misconception]:
    """Validate an ordered misconception set: known ids, no duplicates."""
    out = [m if isinstance(m, Misconception) else get_misconception(m) for m in ms]
    ids = [m.id for m in out]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate misconception ids: {ids}")
    return out


def applicable(m: "Misconception | str", t: ProblemType) -> bool:
    m = m if isinstance(m, Misconception) else get_misconception(m)
    return t in m.applicable_types


def site_binding(m: "Misconception | str", t: ProblemType) -> str | None:
    m = m if isinstance(m, Misconception) else get_misconception(m)
    return _SITES[m.id].get(t)


def try_apply(
    m: Misconception, eq: Equation, t: ProblemType
) -> tuple[Equation, ProblemType | str] | None:
    """Fire ``m`` on an instance of type ``t`` if it matches; None otherwise.

    Applicability is type-level (the catalog's set) plus instance-level: a
    rule whose pattern needs a particular operator or sign only fires when
    the site is actually present (e.g. M6 needs a negative multiplier over an
    inner subtraction, M22_S1 needs a nonzero right side).
    """
    if t not in m.applicable_types:
        return None
    if m.at_solve:
        if t is not ProblemType.T1:
            return None
        a, b = t1_parts(eq)
        if m.id == "M22_S1" and b == 0:
            return None
        value = _SOLVE_FORMULAS[m.id](a, b)
        return solved_equation(value), SOLVED
    result = _REWRITES[m.id](eq, t)
    if result is None:
        return None
    if not (has_unknown(result.lhs) or has_unknown(result.rhs)):
        return result, DEAD_END
    try:
        label = classify(result)
    except UnclassifiableFormError as exc:
        raise UnclassifiableResultError(
            f"{m.id} on {eq} produced an unclassifiable form: {result}"
        ) from exc
    return result, label


def apply_misconception(
    m: "Misconception | str", eq: Equation
) -> tuple[Equation, ProblemType | str]:
    """Apply one misconception to an equation it is applicable to."""
    m = m if isinstance(m, Misconception) else get_misconception(m)
    t = classify(eq)
    if t not in m.applicable_types:
        raise MisconceptionNotApplicableError(f"{m.id} is not applicable to {t}")
    result = try_apply(m, eq, t)
    if result is None:
        raise MisconceptionNotApplicableError(
            f"{m.id} has no matching site on this {t} instance: {eq}"
        )
    return result


_MAX_TRACE_STEPS = 12


def reduce_with_misconceptions(
    eq: Equation, ms: Sequence["Misconception | str"]
) -> ReductionTrace:
    """Walk the graph firing the first applicable misconception at each node.

    Each misconception fires at most once per trace; otherwise the default
    correct edge is taken.  With an empty set this degenerates to the plain
    correct reduction.
    """
    mals = resolve_set(ms)
    t = classify(eq)
    steps = [TraceStep(eq, t, None)]
    used: set[str] = set()
    current = eq
    for _ in range(_MAX_TRACE_STEPS):
        fired: tuple[Misconception, tuple[Equation, ProblemType | str]] | None = None
        for m in mals:
            if m.id in used:
                continue
            res = try_apply(m, current, t)
            if res is not None:
                fired = (m, res)
                break
        if fired is not None:
            m, (new_eq, label) = fired
            used.add(m.id)
            steps.append(TraceStep(new_eq, label, EdgeRef("misconception", m.id)))
            if label == SOLVED:
                assert isinstance(new_eq.rhs, Const)
                return ReductionTrace(tuple(steps), new_eq.rhs.value)
            if label == DEAD_END:
                return ReductionTrace(tuple(steps), None, dead_end="variable eliminated")
            current, t = new_eq, label
            continue
        if t is ProblemType.T1:
            value = solve_terminal(current)
            steps.append(TraceStep(solved_equation(value), SOLVED, EdgeRef("solve", "solve")))
            return ReductionTrace(tuple(steps), value)
        target, rule_id = correct_successors(t)[0]
        current, t = reduce_step(current, t, rule_id)
        steps.append(TraceStep(current, t, EdgeRef("correct", rule_id)))
    raise NonterminationError(f"trace exceeded {_MAX_TRACE_STEPS} steps: {eq}")


def default_type_graph() -> TypeGraph:
    pairs = [
        (t, m.id) for m in CATALOG for t in ORDERED_TYPES if t in m.applicable_types
    ]
    return build_type_graph(pairs)
