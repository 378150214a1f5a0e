"""Double cosets of K_n(infinity) as marked diagrams, and their product.

A pair of elements of Gamma wr S_5 is drawn on two rows of vertices; pieces
outside the window |i| <= 3 are closed up with half-weight return edges and
every component shrinks to one marked edge or circle.  Pasting two diagrams
multiplies the cosets, and the result is checked against the product of
representatives separated by a block shift.
"""

from pathlib import Path

import numpy as np

from wreath_lab import cosets as C
from wreath_lab.finite_group import build_group

G = build_group("S4")
rng = np.random.default_rng(7)
g = C.fig1_pair(G, C.random_markings(G, rng), C.random_markings(G, rng))
h = C.fig2_pair(G, C.random_markings(G, rng), C.random_markings(G, rng))

d_g, d_h = C.theta(g, 3), C.theta(h, 3)
print("theta_3(g):", C.describe(d_g))
print("theta_3(h):", C.describe(d_h))

prod = C.mult_diagram(d_g, d_h)
print("\npasted product:", C.describe(prod))
print("matches the representative product:", prod == C.mult_repr(d_g, d_h))
print("circles in the product:", len(prod.circles))

# The same coset from another representative: translate by K_3(infinity).
a = C.random_window_element(G, rng, 3, 4)
b = C.random_window_element(G, rng, 3, 4)
moved = C.pair_multiply(C.pair_multiply((a, a), g), (b, b))
print("\ninvariant under K_3(infinity) translation:", C.theta(moved, 3) == d_g)

# Generators of the semigroup: a transposition leaving the window and a tuple inside it.
s = C.theta(C.fig8_transposition(G, 3, 2), 3)
t = C.theta(C.fig8_gamma(G, {2: 5}), 3)
print("transposition diagram:", C.describe(s))
print("tuple and transposition commute:", C.mult_diagram(s, t) == C.mult_diagram(t, s))

out = Path(__file__).with_name("product.dot")
out.write_text(C.to_dot(prod, "product"))
print(f"\nDOT written to {out.name} (render with: dot -Tpng {out.name} -o product.png)")
