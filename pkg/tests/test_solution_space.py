from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest

from malgebra.equations import closed_form_solution, parse_equation
from malgebra.errors import BudgetExceededError, ZeroCoefficientError
from malgebra.misconceptions import get_misconception, try_apply
from malgebra.reduction import reduce, reduce_step, solve_terminal
from malgebra.solution_space import enumerate_tree, leaf_answers, to_dot, to_json_dict
from malgebra.taxonomy import (
    DEAD_END,
    ORDERED_TYPES,
    ProblemType,
    SOLVED,
    classify,
    correct_successors,
)


def brute_force_leaves(eq, mid: str, cap: int):
    """Independent oracle: enumerate edge-choice vectors, replaying each from
    the root through the public single-step operations."""
    m = get_misconception(mid)

    def options(state, label, used: bool):
        if label in (SOLVED, DEAD_END):
            return []
        opts = []
        if label is ProblemType.T1:
            opts.append(("solve", None))
        else:
            for _, rule_id in correct_successors(label):
                opts.append(("correct", rule_id))
        if not used and cap >= 1 and try_apply(m, state, label) is not None:
            opts.append(("mal", m.id))
        return opts

    results = []
    stack = [()]
    while stack:
        vec = stack.pop()
        state, label = parse_equation(str(eq)), classify(eq)
        used = False
        mals: tuple[str, ...] = ()
        alive = True
        for kind, ident in vec:
            if kind == "solve":
                try:
                    value = solve_terminal(state)
                except ZeroCoefficientError:
                    label = DEAD_END
                    break
                state = parse_equation(f"x = {value}")
                label = SOLVED
            elif kind == "correct":
                state, label = reduce_step(state, label, ident)
            else:
                state, label = try_apply(m, state, label)
                used = True
                mals = mals + (ident,)
        opts = options(state, label, used)
        if not opts:
            if label is SOLVED:
                results.append((state.rhs.value, mals))
            elif label is DEAD_END:
                results.append((None, mals))
            else:  # T1 jammed on a zero coefficient
                results.append((None, mals))
        else:
            for opt in opts:
                stack.append(vec + (opt,))
    return Counter(results)


def test_two_leaf_example():
    tree = enumerate_tree(parse_equation("2x = 3(4x + 5)"), ["M2_S3"], 1)
    answers = leaf_answers(tree)
    assert answers == [
        (Fraction(-3, 2), ()),
        (Fraction(-1, 2), ("M2_S3",)),
    ]


def test_single_path_tree():
    tree = enumerate_tree(parse_equation("3x = 12"), [], 0)
    assert leaf_answers(tree) == [(Fraction(4), ())]


def test_three_leaf_solve_rules():
    # note the correct answer of 4x = 12 is 3
    tree = enumerate_tree(parse_equation("4x = 12"), ["M19", "M21"], 1)
    assert leaf_answers(tree) == [
        (Fraction(3), ()),
        (Fraction(16), ("M19",)),
        (Fraction(-8), ("M21",)),
    ]


def test_correct_leaf_matches_oracle_and_default_path_unique(sampler):
    for t in ORDERED_TYPES:
        eq = sampler.sample(t, f"tree:{t.name}")
        tree = enumerate_tree(eq, ["M19"], 1)
        oracle = closed_form_solution(eq)
        correct_leaves = [l for l in tree.leaves if not l.misconceptions]
        assert all(l.answer == oracle for l in correct_leaves)
        default_lines = tuple(reduce(eq).equation_lines())
        assert sum(1 for l in correct_leaves if l.equations == default_lines) == 1


def test_replay_soundness(sampler):
    # re-walking each leaf's edge sequence reproduces its equations exactly
    for t in ORDERED_TYPES:
        for i in range(3):
            eq = sampler.sample(t, f"replay:{t.name}:{i}")
            tree = enumerate_tree(eq, ["M12_S15", "M20_S20"], 2)
            children = {}
            for e in tree.edges:
                children.setdefault(e.parent, []).append(e)
            by_id = {n.id: n for n in tree.nodes}
            for leaf in tree.leaves:
                # recover the root-to-leaf node path
                parent_of = {e.child: e.parent for e in tree.edges}
                path = [leaf.node_id]
                while path[-1] != tree.root:
                    path.append(parent_of[path[-1]])
                path.reverse()
                assert tuple(str(by_id[n].equation) for n in path) == leaf.equations


@pytest.mark.parametrize("mid", ["M2_S3", "M12_S15", "M19", "M16", "M13"])
def test_brute_force_equivalence(mid, sampler):
    m = get_misconception(mid)
    types = [t for t in ORDERED_TYPES if t in m.applicable_types][:3]
    for t in types:
        for i in range(5):
            eq = sampler.sample(t, f"brute:{mid}:{t.name}:{i}")
            tree = enumerate_tree(eq, [mid], 1)
            got = Counter(
                (l.answer, l.misconceptions) for l in tree.leaves
            )
            assert got == brute_force_leaves(eq, mid, 1)


def test_count_law_single_spine(sampler):
    # single-successor types: leaves = 1 + (nodes where the rule fires)
    for t, mid in ((ProblemType.T9, "M2_S3"), (ProblemType.T5, "M12_S15")):
        for i in range(10):
            eq = sampler.sample(t, f"count:{t.name}:{i}")
            spine = reduce(eq)
            m = get_misconception(mid)
            k = sum(
                1
                for s in spine.steps
                if isinstance(s.label, ProblemType) and try_apply(m, s.equation, s.label)
            )
            tree = enumerate_tree(eq, [mid], 1)
            assert len(tree.leaves) == 1 + k


def test_node_budget_guard():
    with pytest.raises(BudgetExceededError):
        enumerate_tree(
            parse_equation("2x = 3 + 4(5x + 6)"),
            ["M1", "M2_S3", "M3", "M5", "M8"],
            3,
            node_budget=10,
        )


def test_exports_are_deterministic():
    eq = parse_equation("2x = 3(4x + 5)")
    one = to_json_dict(enumerate_tree(eq, ["M8"], 1))
    two = to_json_dict(enumerate_tree(eq, ["M8"], 1))
    assert one == two
    dot = to_dot(enumerate_tree(eq, ["M8"], 1))
    assert "style=dashed" in dot and 'label="M8"' in dot and "digraph" in dot
