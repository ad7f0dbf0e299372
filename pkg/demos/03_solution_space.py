"""Enumerate the complete solution space of one instance.

Run:  python demos/03_solution_space.py
"""

from malgebra import enumerate_tree, leaf_answers, parse_equation
from malgebra.solution_space import to_dot

equation = parse_equation("2x = 3(4x + 5)")

# Every node branches on all correct successor edges and on every unused
# misconception from the requested set (here capped at one per path).
tree = enumerate_tree(equation, ["M2_S3", "M8", "M19"], max_misconceptions_per_path=1)

print(f"instance: {equation}")
print(f"{len(tree.nodes)} states, {len(tree.leaves)} terminal outcomes:\n")
for answer, used in leaf_answers(tree):
    tag = "+".join(used) if used else "correct"
    print(f"  x = {answer}   via {tag}")

print("\none path per leaf:")
for leaf in tree.leaves:
    print("  " + "  ->  ".join(leaf.equations))

# Graphviz export: correct edges solid, misconception edges dashed + labeled.
print("\ndot output (render with `dot -Tpng`):\n")
print(to_dot(enumerate_tree(equation, ["M2_S3"], 1)))
