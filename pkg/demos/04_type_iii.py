"""A product measure on {0,1}^2 per site and the state it defines.

The state phi(g) = <pi(g) 1, 1> is invariant under permutations but not
under the sign moves, so it is not a character.  Its modular operator is
conjugation by tensor powers of the left form X X^T, where X = sqrt(p).
"""

import numpy as np

from wreath_lab import typeiii as T

p = T.ProbMatrix.of(0.4, 0.1, 0.2, 0.3)
print("p =", p.p.tolist(), " det sqrt(p) =", round(p.det_X, 6))

ops = T.site_operators(p)
print("\nsite operator O0:\n", np.round(ops.O0, 4))
rep = T.iso_and_lr(p)
print("left form L:\n", np.round(rep.L, 4))
print("max residual of the left/right identities:", f"{rep.max_residual:.1e}")

for n in (1, 2):
    c = T.cyclic_separating_check(p, n)
    print(f"n={n}: left span {c.left_dim}/{c.full_dim}, right span {c.right_dim}/{c.full_dim}")
u = T.ProbMatrix.of(0.25, 0.25, 0.25, 0.25)
c = T.cyclic_separating_check(u, 1)
print(f"uniform p (det 0): left span {c.left_dim}/{c.full_dim}")

for n in (1, 2, 3):
    m = T.modular_operator(p, n)
    print(f"n={n}: modular residual {m.modular_residual:.1e}, |Delta xi - xi| {m.fixes_xi:.1e}")
m64 = T.modular_operator(T.ProbMatrix.of(0.45, 0.05, 0.44, 0.06), 3, precision=None)
print(f"ill-conditioned p in float64 at n=3: residual {m64.modular_residual:.1e}")

w = T.centrality_counterexample(p, 2)
print(f"\nphi(gh) != phi(hg) for g = {w.g}, h = {w.h}: gap {w.gap:.4f}")

sym = T.ProbMatrix.of(0.3, 0.2, 0.2, 0.3)
print(f"symmetric p: |X X^T - cI| = {T.tracial_defect(sym):.3f}, so the state is not tracial")
