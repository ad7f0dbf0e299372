"""Tour the misconception catalog: each rule rewrites a live example.

Run:  python demos/02_misconception_gallery.py
"""

import random

from malgebra import CATALOG, apply_misconception, parse_equation, reduce_with_misconceptions
from malgebra.datasets import sample_for_misconception
from malgebra.taxonomy import ORDERED_TYPES

print(f"{len(CATALOG)} cataloged misconceptions\n")

# One worked rewrite per rule, on the first type it applies to.  Conforming
# instances come from the same sampler the dataset generator uses (some rules
# need a particular sign or operator at the match site).
for m in CATALOG:
    t = next(t for t in ORDERED_TYPES if t in m.applicable_types)
    rng = random.Random(f"gallery:{m.id}")
    eq, _ = sample_for_misconception(m, t, rng)
    if m.at_solve:
        # these four replace the final divide-through step
        trace = reduce_with_misconceptions(eq, [m])
        before, after = trace.steps[-2].equation, trace.steps[-1].equation
    else:
        before, after = eq, apply_misconception(m, eq)[0]
    print(f"{m.id:8s} {m.description}")
    print(f"         {before}   ==>   {after}\n")

# A full malgorithm: the erroneous step replaces the correct one at its node,
# and the walk continues correctly afterwards.
trace = reduce_with_misconceptions(parse_equation("2x = 3(4x + 5)"), ["M2_S3"])
print("malgorithm for M2_S3 (ignoring distribution):")
for line in trace.equation_lines():
    print(f"  {line}")
print(f"wrong answer: x = {trace.answer} (correct would be -3/2)")

# Misconceptions combine naturally along one path.
trace = reduce_with_misconceptions(parse_equation("2x = 3(4x + 5)"), ["M2_S3", "M19"])
print(f"\nstacking M2_S3 + M19 gives: {trace.equation_lines()} -> {trace.answer}")
