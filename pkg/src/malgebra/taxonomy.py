"""Problem-type taxonomy and the correct-reduction graph.

Fifteen concrete equation shapes (T1-T12, T14-T16; there is no T13) form the
nodes of a DAG whose correct edges each perform one algebraic operation and
all converge on the base case T1 (``Ax = B``).

Classification is two-pass.  The exact pass matches the surface structure of
the fifteen canonical patterns.  The fallback pass normalizes forms that only
arise from rewrites (bare parentheses spliced away, constant multiples of a
parenthesized monomial folded, terms stably reordered x-first, flexible
constant-chain widths) and retries, so erroneous rewrites land on the nearest
pattern with zero slots, e.g. ``Ax = Bx`` classifies as T7 with a zero
constant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .equations import Add, Const, Equation, Expr, Mul, Neg, Paren, Sub, XTerm
from .errors import UnclassifiableFormError


class ProblemType(enum.Enum):
    T1 = "Ax = B"
    T2 = "Ax = B + C"
    T3 = "Ax = B * C"
    T4 = "Ax + Bx = C"
    T5 = "Ax + B = C"
    T6 = "A + Bx = C"
    T7 = "Ax = Bx + C"
    T8 = "Ax = B(C*D)"
    T9 = "Ax = B(Cx + D)"
    T10 = "Ax = B + C * D"
    T11 = "A + Bx + Cx = D"
    T12 = "Ax = B + C(Dx + E)"
    T14 = "Ax + B = Cx + D"
    T15 = "Ax + Bx = C + D"
    T16 = "Ax = Bx + C + D"

    @property
    def pattern(self) -> str:
        return self.value

    def __str__(self) -> str:
        return self.name


ORDERED_TYPES: tuple[ProblemType, ...] = tuple(ProblemType)

# Terminal labels used in traces alongside graph nodes.
SOLVED = "solved"
DEAD_END = "dead-end"


# ---------------------------------------------------------------------------
# Term decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class XAtom:
    coef: Fraction


@dataclass(frozen=True)
class CAtom:
    value: Fraction


@dataclass(frozen=True)
class ProdAtom:
    """An explicit constant product chain, e.g. ``3 * 4`` or ``3 * 4 * 5``."""

    factors: tuple[Fraction, ...]

    @property
    def product(self) -> Fraction:
        out = Fraction(1)
        for f in self.factors:
            out *= f
        return out


@dataclass(frozen=True)
class GroupAtom:
    """A constant multiplier applied to a parenthesized chain, e.g. ``3(4x + 5)``."""

    multiplier: Fraction
    inner: tuple[tuple[int, "Atom"], ...]


@dataclass(frozen=True)
class OpaqueAtom:
    node: Expr


Atom = XAtom | CAtom | ProdAtom | GroupAtom | OpaqueAtom
SignedAtom = tuple[int, Atom]


def split_terms(e: Expr) -> list[tuple[int, Expr]]:
    """Split the left-associated +/- spine into (sign, term-node) pairs."""
    if isinstance(e, Add):
        return split_terms(e.left) + [(1, e.right)]
    if isinstance(e, Sub):
        return split_terms(e.left) + [(-1, e.right)]
    return [(1, e)]


def _flatten_product(e: Expr) -> list[Expr]:
    if isinstance(e, Mul):
        return _flatten_product(e.left) + [e.right]
    return [e]


def _atomize(node: Expr) -> Atom:
    if isinstance(node, Const):
        return CAtom(node.value)
    if isinstance(node, XTerm):
        return XAtom(node.coef)
    if isinstance(node, Mul):
        factors = _flatten_product(node)
        if all(isinstance(f, Const) for f in factors):
            return ProdAtom(tuple(f.value for f in factors))
        if (
            len(factors) == 2
            and isinstance(factors[0], Const)
            and isinstance(factors[1], Paren)
        ):
            inner = surface_atoms(factors[1].inner)
            return GroupAtom(factors[0].value, tuple(inner))
    return OpaqueAtom(node)


def surface_atoms(e: Expr) -> list[SignedAtom]:
    """Atoms exactly as written, one per surface term."""
    return [(sign, _atomize(node)) for sign, node in split_terms(e)]


def view_atoms(e: Expr) -> list[SignedAtom]:
    """Normalized view: bare parens spliced, signs pushed inward, constant
    multiples of single-term parens folded.  Term order is preserved."""
    out: list[SignedAtom] = []
    for sign, node in split_terms(e):
        out.extend(_view_term(sign, node))
    return out


def _view_term(sign: int, node: Expr) -> list[SignedAtom]:
    if isinstance(node, Paren):
        return [(sign * s, a) for s, a in view_atoms(node.inner)]
    if isinstance(node, Neg):
        return [(-sign * s, a) for s, a in _view_term(1, node.inner)]
    atom = _atomize(node)
    if isinstance(atom, GroupAtom):
        inner = [(s, a) for s, a in atom.inner]
        inner_view: list[SignedAtom] = []
        for s, a in inner:
            if isinstance(a, OpaqueAtom):
                inner_view.extend(_view_term(s, a.node))
            else:
                inner_view.append((s, a))
        if len(inner_view) == 1:
            s, a = inner_view[0]
            if isinstance(a, XAtom):
                return [(sign, XAtom(atom.multiplier * s * a.coef))]
            if isinstance(a, CAtom):
                return [(sign, ProdAtom((atom.multiplier, s * a.value)))]
        return [(sign, GroupAtom(atom.multiplier, tuple(inner_view)))]
    return [(sign, atom)]


def reorder_x_first(atoms: list[SignedAtom]) -> list[SignedAtom]:
    xs = [sa for sa in atoms if isinstance(sa[1], XAtom)]
    rest = [sa for sa in atoms if not isinstance(sa[1], XAtom)]
    return xs + rest


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _kind(atom: Atom) -> str:
    if isinstance(atom, XAtom):
        return "x"
    if isinstance(atom, CAtom):
        return "c"
    if isinstance(atom, ProdAtom):
        return "p"
    if isinstance(atom, GroupAtom):
        inner = " ".join(_kind(a) for _, a in atom.inner)
        return f"g[{inner}]"
    return "?"


def _signature(atoms: list[SignedAtom]) -> tuple[str, ...]:
    return tuple(_kind(a) for _, a in atoms)


def _match_patterns(lhs: tuple[str, ...], rhs: tuple[str, ...]) -> ProblemType | None:
    n = len(rhs)
    if lhs == ("x",):
        if n >= 1 and all(k == "c" for k in rhs):
            return ProblemType.T1 if n == 1 else ProblemType.T2
        if rhs == ("p",):
            return ProblemType.T3
        if rhs == ("g[p]",):
            return ProblemType.T8
        if rhs == ("g[x c]",):
            return ProblemType.T9
        if rhs == ("c", "p"):
            return ProblemType.T10
        if rhs == ("c", "g[x c]"):
            return ProblemType.T12
        if rhs and rhs[0] == "x" and all(k == "c" for k in rhs[1:]):
            if n == 1:
                return ProblemType.T7  # zero-constant variant, Ax = Bx
            return ProblemType.T7 if n == 2 else ProblemType.T16
    if lhs == ("x", "x"):
        if n >= 1 and all(k == "c" for k in rhs):
            return ProblemType.T4 if n == 1 else ProblemType.T15
    if lhs == ("x", "c"):
        if rhs == ("c",):
            return ProblemType.T5
        if rhs == ("x", "c"):
            return ProblemType.T14
    if lhs == ("c", "x") and rhs == ("c",):
        return ProblemType.T6
    if lhs == ("c", "x", "x") and rhs == ("c",):
        return ProblemType.T11
    return None


def classify(eq: Equation) -> ProblemType:
    """Map an equation onto its problem type.

    Raises UnclassifiableFormError when neither the surface structure nor the
    normalized view matches any pattern (e.g. no unknown at all).
    """
    exact = _match_patterns(
        _signature(surface_atoms(eq.lhs)), _signature(surface_atoms(eq.rhs))
    )
    if exact is not None:
        return exact
    lhs = reorder_x_first(view_atoms(eq.lhs))
    rhs = reorder_x_first(view_atoms(eq.rhs))
    loose = _match_patterns(_signature(lhs), _signature(rhs))
    if loose is not None:
        return loose
    raise UnclassifiableFormError(f"no problem type matches: {eq}")


def has_unknown(e: Expr) -> bool:
    if isinstance(e, XTerm):
        return True
    if isinstance(e, (Neg, Paren)):
        return has_unknown(e.inner)
    if isinstance(e, (Add, Sub, Mul)):
        return has_unknown(e.left) or has_unknown(e.right)
    return False


# ---------------------------------------------------------------------------
# Correct-edge table and graph queries
# ---------------------------------------------------------------------------

# (source, rule id, target); list order per source is the canonical order and
# the first entry is the default edge taken by plain reduction.
CORRECT_EDGES: tuple[tuple[ProblemType, str, ProblemType], ...] = (
    (ProblemType.T2, "fold-sum", ProblemType.T1),
    (ProblemType.T3, "fold-product", ProblemType.T1),
    (ProblemType.T4, "combine-x", ProblemType.T1),
    (ProblemType.T5, "move-const", ProblemType.T1),
    (ProblemType.T6, "move-const", ProblemType.T1),
    (ProblemType.T7, "move-x", ProblemType.T1),
    (ProblemType.T8, "fold-inner-product", ProblemType.T3),
    (ProblemType.T9, "distribute", ProblemType.T7),
    (ProblemType.T10, "fold-product", ProblemType.T2),
    (ProblemType.T11, "combine-x", ProblemType.T6),
    (ProblemType.T12, "distribute", ProblemType.T16),
    (ProblemType.T14, "move-const", ProblemType.T7),
    (ProblemType.T14, "move-x", ProblemType.T5),
    (ProblemType.T15, "fold-sum", ProblemType.T4),
    (ProblemType.T15, "combine-x", ProblemType.T2),
    (ProblemType.T16, "fold-sum", ProblemType.T7),
    (ProblemType.T16, "move-x", ProblemType.T2),
)


def correct_successors(t: ProblemType) -> list[tuple[ProblemType, str]]:
    """All correct edges out of ``t`` in canonical order; empty only for T1."""
    return [(dst, rule) for src, rule, dst in CORRECT_EDGES if src is t]


def path_exists_to_T1(t: ProblemType) -> bool:
    seen = {t}
    frontier = [t]
    while frontier:
        node = frontier.pop()
        if node is ProblemType.T1:
            return True
        for dst, _ in correct_successors(node):
            if dst not in seen:
                seen.add(dst)
                frontier.append(dst)
    return False


@dataclass(frozen=True)
class TypeGraph:
    """The full graph: correct edges plus misconception applicability."""

    nodes: tuple[ProblemType, ...]
    correct_edges: tuple[tuple[ProblemType, str, ProblemType], ...]
    misconception_edges: tuple[tuple[ProblemType, str], ...]

    def to_records(
        self, computed_targets: Mapping[tuple[ProblemType, str], str] | None = None
    ) -> list[dict]:
        records = []
        for src, rule, dst in self.correct_edges:
            records.append(
                {"source": src.name, "target": dst.name, "kind": "correct", "id": rule}
            )
        for src, mid in self.misconception_edges:
            computed = None
            if computed_targets is not None:
                computed = computed_targets.get((src, mid))
            records.append(
                {"source": src.name, "computed": computed, "kind": "misconception", "id": mid}
            )
        return records


def build_type_graph(applicability: Iterable[tuple[ProblemType, str]]) -> TypeGraph:
    return TypeGraph(
        nodes=ORDERED_TYPES,
        correct_edges=CORRECT_EDGES,
        misconception_edges=tuple(applicability),
    )
