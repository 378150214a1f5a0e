"""Characters of Z2 wr S_infinity, evaluated two ways.

The closed formula multiplies one bracket per orbit of the element.  The
tensor-product model computes the same number as a matrix element of an
explicit unitary representation.  Agreement between the two, together with
positive-definite Gram matrices, is what makes the formula believable.
"""

import numpy as np

from wreath_lab import evaluate, gram_psd, matrix_element, parse_element, preset
from wreath_lab.thoma import thoma_classical
from wreath_lab.wreath import conjugate, invariant, random_element

params = preset("z2-standard")   # alpha = (0.5, sign), beta = (0.25, trivial)
G = params.group
print(f"delta = {params.delta}")

print("\nA few values")
for text in ["e", "[1:g]", "(1 2)", "(1 2 3)", "(1 2 3)[1:g]", "(1 2)(3 4 5)[3:g]"]:
    g = parse_element(text, G)
    print(f"  phi({text:18s}) = {evaluate(params, g).real:+.6f}"
          f"   realization: {matrix_element(params, g).real:+.6f}")

# Pure permutations see only the repeated weight lists.
print("\nSingle cycles against the classical formula")
for l in range(2, 7):
    print(f"  l={l}: {thoma_classical(params, [l]):+.8f}")

# Class function: conjugating never changes the value, and the value depends
# only on the invariant (orbit lengths plus classes of cycle products).
rng = np.random.default_rng(0)
g = random_element(G, rng, 5)
h = random_element(G, rng, 5)
print(f"\ng = {g}, invariant {invariant(g)}")
print(f"h g h^-1 = {conjugate(h, g)}, invariant {invariant(conjugate(h, g))}")
print(f"values: {evaluate(params, g).real:+.6f} and {evaluate(params, conjugate(h, g)).real:+.6f}")

els = [random_element(G, rng, 5) for _ in range(20)]
print(f"\nsmallest Gram eigenvalue over 20 random elements: {gram_psd(params, els):.3e}")

worst = 0.0
for name in ("z3-a", "s3-b"):
    p = preset(name)
    for _ in range(100):
        x = random_element(p.group, rng, 5)
        worst = max(worst, abs(evaluate(p, x) - matrix_element(p, x)))
print(f"max |formula - realization| on Z3 and S3 samples: {worst:.2e}")
