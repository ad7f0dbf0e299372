"""Walk through parsing, classification and correct step-by-step reduction.

Run:  python demos/01_solve_and_trace.py
"""

from malgebra import classify, closed_form_solution, parse_equation, reduce

# The engine keeps equations as exact structural trees: parentheses and term
# order matter, because the problem-type taxonomy is defined on them.
equation = parse_equation("2x = 3(4x + 5)")
print(f"equation:   {equation}")
print(f"type:       {classify(equation)}")

# Two independent routes to the answer.  The closed form evaluates the sides
# at x = 0 and x = 1 and intersects the resulting line with zero; reduction
# walks the type graph one algebraic operation at a time.
print(f"closed form: x = {closed_form_solution(equation)}")

trace = reduce(equation)
print("\nreduction, one operation per line:")
for step in trace.steps:
    via = f"  [{step.via.rule_id}]" if step.via else ""
    print(f"  {str(step.label):6s} {step.equation}{via}")
print(f"\nanswer: x = {trace.answer}")

# Types with several valid orderings expose every correct edge; reduce()
# takes the first listed edge, so different shapes show different routes.
for text in ("4x + 2x = 18", "4x + 5 = 2x + 7", "2x = 3 + 4(5x + 6)"):
    e = parse_equation(text)
    t = reduce(e)
    path = " -> ".join(str(s.label) for s in t.steps)
    print(f"{text:24s} {path:34s} x = {t.answer}")
