"""Cesaro averages of transpositions and what they converge to.

O_k = (1/n) sum_l pi((k, l)) tends to an operator whose spectrum is read off
the parameters: alpha_k, -beta_k and 0, with weights alpha_k dim, beta_k dim
and delta.  The moments and the Ritz values below approach those targets as
n grows.  Moments converge at rate 1/n; the Ritz values and the commutator
with a local tuple only at rate 1/sqrt(n).
"""

from wreath_lab import preset
from wreath_lab.fock import (
    commutator_decay,
    factorization_check,
    moment_check,
    okounkov_commutator,
    spectral_scan,
)
from wreath_lab.wreath import GammaTuple, parse_element

params = preset("z2-standard")
G = params.group
print("spectral weights (point, mass):", params.spectral_weights())

print("\nmoments <O_1^q eta, eta>")
for q in (1, 2, 3):
    for n in (8, 16, 32):
        m = moment_check(params, 1, q, n)
        print(f"  q={q} n={n:3d}: measured {m.measured:+.6f} predicted {m.predicted:+.6f} gap {m.gap:.4f}")

print("\nRitz values of O_1 on a three-dimensional Krylov space")
for n in (16, 32, 64):
    r = spectral_scan(params, 1, n)
    print(f"  n={n:3d}: " + ", ".join(f"{x:+.4f}" for x in r.eigenvalues))

print("\nfactorization: <pi((1 2)) O_1 eta, eta> against <O_1^2 eta, eta>")
g = parse_element("(1 2)", G)
for n in (8, 16, 32):
    f = factorization_check(params, g, {1: 1}, n)
    print(f"  n={n:3d}: lhs {f.lhs.real:+.6f} rhs {f.rhs.real:+.6f} residual {f.residual:.4f}")

print("\ncommutators on eta")
gam = GammaTuple.from_dict(G, {1: 1})
for n in (16, 32, 64):
    print(f"  n={n:3d}: |[O_1, pi(g at 1)] eta| = {commutator_decay(params, 1, gam, n):.4f}"
          f"   |[O_1, O_2] eta| = {okounkov_commutator(params, 1, 2, n):.4f}")
