import functools

import numpy as np
import pytest

from conftest import GROUPS
from wreath_lab import cosets as C
from wreath_lab.finite_group import build_group
from wreath_lab.suites import fig7_reproduction
from wreath_lab.wreath import WreathElement, _classes, random_element

S3 = GROUPS["symmetric 3"]
S4 = build_group("S4")


def rand_pair(G, rng, support=5):
    return random_element(G, rng, support), random_element(G, rng, support)


def edge_map(d):
    return {(e.src, e.dst): (e.h2, e.gamma) for e in d.edges}


def test_graph_of_identity_and_fig1(rng):
    e = WreathElement.identity(S3)
    g = C.graph_of((e, e), 3)
    assert all(lo == up and h2 == 0 and x == S3.identity for lo, up, h2, x in g.edges)
    a, b = C.random_markings(S4, rng), C.random_markings(S4, rng)
    gr = C.graph_of(C.fig1_pair(S4, a, b), 5)
    # drawn: lower i to upper s2(i) with gamma''_i, lower -i to upper -s1(i) with gamma'_i
    s1 = {1: 3, 3: 4, 4: 2, 2: 5, 5: 1}
    s2 = {1: 4, 4: 3, 3: 2, 2: 5, 5: 1}
    for i in range(1, 6):
        assert gr.edge(i) == (s2[i], 0, b[i])
        assert gr.edge(-i) == (-s1[i], 0, a[i])
    with pytest.raises(C.CosetError):
        C.graph_of(C.fig1_pair(S4, a, b), 4)


def test_compose_graphs_fig3(rng):
    a, b, c, d = (C.random_markings(S4, rng) for _ in range(4))
    g, h = C.fig1_pair(S4, a, b), C.fig2_pair(S4, c, d)
    glued = C.compose_graphs(C.graph_of(g, 5), C.graph_of(h, 5))
    assert glued == C.graph_of(C.pair_multiply(g, h), 5)
    e = WreathElement.identity(S4)
    assert C.compose_graphs(C.graph_of(g, 5), C.graph_of((e, e), 5)) == C.graph_of(g, 5)


def test_identity_and_fig8_diagrams():
    for n in range(4):
        d = C.identity_diagram(S3, n)
        assert d.circles == () and not d.check()
        assert all(e.h2 == 0 and e.src[1] == e.dst[1] for e in d.edges)
        assert len(d.edges) == 2 * n
    n = 3
    for i in range(1, n + 1):
        d = C.theta(C.fig8_transposition(S3, n, i), n)
        for e in d.edges:
            assert abs(e.src[1]) == abs(e.dst[1]) and e.gamma == S3.identity
            assert e.h2 == (2 if e.src == ("u", i) else 0)
        assert C.involution(d) == d
    x = {1: S3.index_of("t12"), 3: S3.index_of("c012")}
    d = C.theta(C.fig8_gamma(S3, x), n)
    for e in d.edges:
        assert e.h2 == 0 and abs(e.src[1]) == abs(e.dst[1])
        j = abs(e.src[1])
        assert e.gamma in (x.get(j, S3.identity), int(S3.inv[x.get(j, S3.identity)]))


def test_fig8_first_factor_embedding_differs():
    # the transposition in the first factor yields a weight-1 edge on the negative side
    from wreath_lab.wreath import Permutation, pure_perm
    t = pure_perm(S3, Permutation.transposition(2, 4))
    d = C.theta(C.embed(t, side=1), 3)
    assert d.edge_between(("o", -2), ("u", -2)).h2 == 2
    diag = C.theta(C.diagonal(t), 3)
    assert {e.h2 for e in diag.edges if abs(e.src[1]) == 2} == {1}


def test_figs_5_6_7_exact(rng):
    I = lambda x: int(S4.inv[x])
    M = lambda *xs: functools.reduce(S4.mul, xs)
    cl = _classes(S4).class_of
    for _ in range(50):
        gp, gpp, dp, dpp = (C.random_markings(S4, rng) for _ in range(4))
        # half-integer parts are stored doubled: 1 means 1/2
        d5 = C.theta(C.fig1_pair(S4, gp, gpp), 3)
        d6 = C.theta(C.fig2_pair(S4, dp, dpp), 3)
        assert edge_map(d5) == {
            (("o", -1), ("o", 1)): (1, M(gpp[5], I(gp[5]))),
            (("o", -2), ("o", 3)): (1, M(gpp[4], I(gp[4]))),
            (("u", 1), ("u", -3)): (1, M(I(gp[3]), gpp[1])),
            (("u", -1), ("o", -3)): (0, gp[1]),
            (("u", 3), ("o", 2)): (0, gpp[3]),
            (("u", 2), ("u", -2)): (1, M(I(gp[2]), gpp[2])),
        }
        assert d5.circles == ()
        assert edge_map(d6) == {
            (("o", -2), ("o", 2)): (1, M(dpp[5], I(dp[5]))),
            (("o", -3), ("o", 3)): (1, M(dpp[4], I(dp[4]))),
            (("u", 1), ("u", -1)): (1, M(I(dp[1]), dpp[1])),
            (("u", -3), ("o", -1)): (0, dp[3]),
            (("u", 3), ("o", 1)): (0, dpp[3]),
            (("u", 2), ("u", -2)): (1, M(I(dp[2]), dpp[2])),
        }
        d7 = C.mult_diagram(d5, d6)
        assert d7 == C.mult_repr(d5, d6) and not d7.check()
        assert edge_map(d7) == {
            (("o", -1), ("o", 1)): (1, M(gpp[5], I(gp[5]))),
            (("o", -2), ("o", 3)): (1, M(gpp[4], I(gp[4]))),
            (("u", 1), ("u", -1)): (1, M(I(dp[1]), dpp[1])),
            (("u", 2), ("u", -2)): (1, M(I(dp[2]), dpp[2])),
            (("u", -3), ("o", -3)): (0, M(gp[1], dp[3])),
            (("u", 3), ("o", 2)): (2, M(gpp[3], dpp[4], I(dp[4]), I(gp[3]), gpp[1], dpp[3])),
        }
        # a single closed component forms when the pieces are pasted
        c = cl[M(I(gp[2]), gpp[2], dpp[5], I(dp[5]))]
        assert d7.circles == (((1, c),) if c != cl[S4.identity] else ())


def test_fig7_reproduction_helper(rng):
    d5, d6, d7 = fig7_reproduction(S4, rng)
    assert d7 == C.mult_diagram(d5, d6)
    assert len(d7.circles) <= 1


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_cross_oracle_and_admissibility(n, rng):
    for _ in range(25):
        dg, dh = C.theta(rand_pair(S3, rng), n), C.theta(rand_pair(S3, rng), n)
        assert not dg.check()
        prod = C.mult_diagram(dg, dh)
        assert prod == C.mult_repr(dg, dh) and not prod.check()


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_coset_invariance(n, rng):
    g = rand_pair(S3, rng)
    base = C.theta(g, n)
    for _ in range(100):
        a = C.random_window_element(S3, rng, n, 4)
        b = C.random_window_element(S3, rng, n, 4)
        assert C.theta(C.pair_multiply(C.pair_multiply((a, a), g), (b, b)), n) == base


def test_theta_independent_of_ambient_size(rng):
    for _ in range(20):
        g = rand_pair(S3, rng)
        assert C.theta(g, 2) == C.theta(g, 2, N=9)


def test_mult_repr_independent_of_m_and_representatives(rng):
    n = 2
    for _ in range(20):
        g, h = rand_pair(S3, rng), rand_pair(S3, rng)
        ref = C.mult_repr(g, h, n)
        assert C.mult_repr(g, h, n, m=8) == ref
        a, b = C.random_window_element(S3, rng, n, 3), C.random_window_element(S3, rng, n, 3)
        g2 = C.pair_multiply(g, (a, a))
        h2 = C.pair_multiply((b, b), h)
        assert C.mult_repr(g2, h2, n) == ref


def test_multiplication_is_associative_with_unit(rng):
    n = 2
    e = C.identity_diagram(S3, n)
    for _ in range(20):
        d1, d2, d3 = (C.theta(rand_pair(S3, rng), n) for _ in range(3))
        assert C.mult_diagram(C.mult_diagram(d1, d2), d3) == C.mult_diagram(d1, C.mult_diagram(d2, d3))
        assert C.mult_repr(e, d1) == d1 == C.mult_diagram(d1, e)


def test_involution_is_anti_automorphism(rng):
    n = 2
    assert C.involution(C.identity_diagram(S3, n)) == C.identity_diagram(S3, n)
    for _ in range(30):
        d1, d2 = C.theta(rand_pair(S3, rng), n), C.theta(rand_pair(S3, rng), n)
        lhs = C.involution(C.mult_repr(d1, d2))
        assert lhs == C.mult_repr(C.involution(d2), C.involution(d1))
        assert C.involution(C.involution(d1)) == d1


def test_fig8_commutation():
    for n in (1, 2, 3):
        for i in range(1, n + 1):
            s = C.theta(C.fig8_transposition(S3, n, i), n)
            for x in range(S3.order):
                gm = C.theta(C.fig8_gamma(S3, {i: x}), n)
                assert C.mult_diagram(gm, s) == C.mult_diagram(s, gm)


def test_level_mismatch():
    with pytest.raises(C.CosetError):
        C.mult_diagram(C.identity_diagram(S3, 1), C.identity_diagram(S3, 2))
    with pytest.raises(C.CosetError):
        C.theta(C.diagonal(WreathElement.identity(S3)), -1)


def test_dot_output(rng):
    text = C.to_dot(C.identity_diagram(S3, 2), "ident")
    assert text == (
        "digraph ident {\n"
        "  rankdir=BT;\n"
        "  node [shape=circle, fontsize=10];\n"
        '  { rank=max; "o-2"; "o-1"; "o+1"; "o+2"; }\n'
        '  { rank=min; "u-2"; "u-1"; "u+1"; "u+2"; }\n'
        '  "u-2" -> "o-2" [label="(0, e)"];\n'
        '  "u-1" -> "o-1" [label="(0, e)"];\n'
        '  "u+1" -> "o+1" [label="(0, e)"];\n'
        '  "u+2" -> "o+2" [label="(0, e)"];\n'
        "}\n"
    )
    d5, d6, d7 = fig7_reproduction(S4, np.random.default_rng(3))
    assert C.to_dot(d7) == C.to_dot(C.mult_repr(d5, d6))
    assert C.to_dot(d7).count("doublecircle") == len(d7.circles)
