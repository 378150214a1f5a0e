import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import GROUPS, elements, permutations
from wreath_lab.finite_group import build_group, conjugacy_classes
from wreath_lab.suites import brute_force_classes
from wreath_lab.wreath import (
    GammaTuple,
    ParseError,
    Permutation,
    WreathElement,
    WreathError,
    conjugate,
    cycle_decompose,
    cycle_product,
    format_element,
    in_Gn_infty,
    inverse,
    invariant,
    multiply,
    normal_form,
    omega,
    omega2,
    orbit_count,
    parse_element,
    pure_tuple,
    random_element,
    same_cycle_conjugator,
)

Z2, Z3, S3 = GROUPS["cyclic 2"], GROUPS["cyclic 3"], GROUPS["symmetric 3"]
any_group = st.sampled_from(list(GROUPS.values()))


def act(g: WreathElement, point):
    """Independent model: s.gamma sends (k, x) to (s(k), gamma_k x)."""
    k, x = point
    return g.perm(k), g.group.mul(g.entry(k), x)


def P(text, G=Z2):
    return parse_element(text, G)


def test_multiply_example():
    assert multiply(P("(1 2)[1:g]"), P("(2 3)[2:g]")) == P("(1 2 3)[1:g,2:g]")


@given(any_group.flatmap(lambda G: st.tuples(elements(G), elements(G))))
def test_multiply_matches_action_model(pair):
    g, h = pair
    gh = multiply(g, h)
    for k in range(1, 8):
        for x in range(g.group.order):
            assert act(gh, (k, x)) == act(g, act(h, (k, x)))


@given(any_group.flatmap(lambda G: st.tuples(elements(G), elements(G), elements(G))))
def test_group_axioms(triple):
    g, h, k = triple
    G = g.group
    e = WreathElement.identity(G)
    assert multiply(multiply(g, h), k) == multiply(g, multiply(h, k))
    assert multiply(g, e) == g == multiply(e, g)
    assert multiply(g, inverse(g)) == e == multiply(inverse(g), g)


def test_inverse_examples():
    assert inverse(WreathElement.identity(Z3)).is_identity()
    t = pure_tuple(Z3, GammaTuple.from_dict(Z3, {1: 1, 4: 2}))
    assert inverse(t) == pure_tuple(Z3, GammaTuple.from_dict(Z3, {1: 2, 4: 1}))
    g = P("(1 2 3)[1:g]")
    assert multiply(g, inverse(g)).is_identity() and multiply(inverse(g), g).is_identity()


def test_cycle_decompose_examples():
    assert cycle_decompose(WreathElement.identity(Z2)) == []
    parts = cycle_decompose(P("(1 2)(3 4)[3:g]"))
    assert [str(s) for s, _ in parts] == ["(1 2)", "(3 4)"]
    assert parts[0][1].is_identity() and dict(parts[1][1].entries) == {3: 1}
    G = build_group("klein4")
    parts = cycle_decompose(parse_element("[1:a,5:b]", G))
    assert len(parts) == 2 and all(s.is_identity() for s, _ in parts)


@given(any_group.flatmap(elements))
def test_cycle_factors_commute_and_recombine(g):
    G = g.group
    factors = [WreathElement(s, t, G) for s, t in cycle_decompose(g)]
    prod = WreathElement.identity(G)
    for f in factors:
        prod = multiply(prod, f)
    assert prod == g
    for a, b in itertools.combinations(factors, 2):
        assert multiply(a, b) == multiply(b, a)


def test_cycle_product_order():
    # entries a, b, c at 1, 2, 3 of the cycle 1 -> 2 -> 3: the product walks
    # backwards from the base, so the result is a.c.b (a.b.c in abelian Gamma)
    a, b, c = S3.index_of("t12"), S3.index_of("t01"), S3.index_of("c012")
    g = WreathElement.make(S3, Permutation.from_cycles([(1, 2, 3)]), {1: a, 2: b, 3: c})
    assert cycle_product(g, {1, 2, 3}) == S3.product([a, c, b])
    h = P("(1 2 3)[1:g,2:g,3:g]", Z3)
    assert cycle_product(h, {1, 2, 3}) == 0
    assert cycle_product(P("[4:g]"), {4}) == 1
    with pytest.raises(WreathError):
        cycle_product(P("(1 2 3)"), {1, 2})


@given(elements(S3))
def test_cycle_product_base_independent(g):
    cls = conjugacy_classes(S3).class_of
    for orb in g.perm.cycles():
        assert len({cls[cycle_product(g, orb, base=k)] for k in orb}) == 1


def test_invariant_examples():
    assert invariant(WreathElement.identity(Z2)).pairs == ()
    cls = conjugacy_classes(Z2).class_of
    assert invariant(P("(1 2 3)[1:g]")).pairs == ((3, cls[1]),)


@given(any_group.flatmap(lambda G: st.tuples(elements(G), elements(G))))
def test_invariant_is_conjugation_invariant(pair):
    g, h = pair
    assert invariant(conjugate(h, g)) == invariant(g)


def test_normal_form_examples():
    c, nf = normal_form(P("(1 2)"))
    assert c.is_identity() and nf == P("(1 2)")
    a, b = S3.index_of("t12"), S3.index_of("c012")
    g = WreathElement.make(S3, Permutation.from_cycles([(1, 2)]), {1: a, 2: b})
    c, nf = normal_form(g)
    assert nf == WreathElement.make(S3, Permutation.from_cycles([(1, 2)]), {2: S3.mul(b, a)})
    assert conjugate(pure_tuple(S3, c), g) == nf


@given(any_group.flatmap(elements))
def test_normal_form_properties(g):
    c, nf = normal_form(g)
    assert conjugate(pure_tuple(g.group, c), g) == nf
    assert invariant(nf) == invariant(g)
    for orb in nf.perm.cycles():
        assert sum(nf.entry(k) != g.group.identity for k in orb) <= 1


def test_normal_form_random_z35(rng):
    for _ in range(50):
        g = random_element(Z3, rng, 5)
        assert invariant(normal_form(g)[1]) == invariant(g)


def test_same_cycle_conjugator():
    g = P("(1 2 3)[1:g]", Z3)
    assert same_cycle_conjugator(g, g).is_identity()
    b, c = P("(1 2)[1:g]", Z3), P("(1 2)[2:g]", Z3)
    t = same_cycle_conjugator(b, c)
    assert t is not None and conjugate(pure_tuple(Z3, t), b) == c
    # brute force over Gamma^2 agrees that a conjugator exists
    assert any(conjugate(pure_tuple(Z3, GammaTuple.from_dict(Z3, {1: x, 2: y})), b) == c
               for x in range(3) for y in range(3))
    assert same_cycle_conjugator(P("(1 2)[1:g]"), P("(1 2)")) is None
    with pytest.raises(WreathError):
        same_cycle_conjugator(P("(1 2)"), P("(1 3)"))


@given(elements(S3, max_support=4), st.data())
def test_same_cycle_conjugator_nonabelian(g, data):
    cyc = g.perm.cycles()
    if len(cyc) != 1:
        return
    orb = cyc[0]
    entries = {k: data.draw(st.integers(0, 5)) for k in orb}
    b = WreathElement.make(S3, g.perm, {k: g.entry(k) for k in orb})
    c = WreathElement.make(S3, g.perm, entries)
    t = same_cycle_conjugator(b, c)
    assert (t is not None) == (invariant(b) == invariant(c))
    if t is not None:
        assert conjugate(pure_tuple(S3, t), b) == c


def _wreath_elements(G, k):
    return [WreathElement.make(G, Permutation.from_dict({i + 1: q + 1 for i, q in enumerate(p)}),
                               dict(zip(range(1, k + 1), xs)))
            for p in itertools.permutations(range(k)) for xs in itertools.product(range(G.order), repeat=k)]


@pytest.mark.parametrize("G,k", [(Z2, 4), (Z3, 3)], ids=["Z2wrS4", "Z3wrS3"])
def test_invariant_matches_brute_force_conjugacy(G, k):
    els = _wreath_elements(G, k)
    label = brute_force_classes(els)
    by_inv = {}
    for g in els:
        by_inv.setdefault(invariant(g), set()).add(label[g])
    assert all(len(v) == 1 for v in by_inv.values())
    assert len(by_inv) == len(set(label.values()))


def test_omega_examples():
    assert str(omega(0, 1)) == "(1 2)"
    assert str(omega(1, 2)) == "(2 4)(3 5)"
    for n in range(4):
        for m in range(1, 4):
            assert omega(n, m).compose(omega(n, m)).is_identity()


@pytest.mark.parametrize("n", range(5))
def test_omega_identity_exact(n):
    for M in range(2, 7):
        for m in range(1, M):
            lhs = omega2(n + m, m, M - m).compose(omega(n, m)).compose(omega2(n + m, M - m, M))
            assert lhs == omega(n, M)


def test_orbit_count():
    assert orbit_count(Permutation(), 5) == 5
    assert orbit_count(Permutation.from_cycles([(1, 2, 3)]), 3) == 1
    assert orbit_count(Permutation.from_cycles([(1, 2), (3, 4)]), 6) == 4
    with pytest.raises(WreathError):
        orbit_count(Permutation.from_cycles([(1, 7)]), 6)


@given(permutations(max_support=7))
def test_orbit_count_union_find(s):
    parent = list(range(8))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for i in range(1, 8):
        parent[find(i)] = find(s(i))
    assert orbit_count(s, 7) == len({find(i) for i in range(1, 8)})


def test_in_Gn_infty():
    assert in_Gn_infty(WreathElement.identity(Z2), 3)
    assert not in_Gn_infty(P("(1 2)"), 2)
    assert in_Gn_infty(P("(5 6)[7:g]"), 4)


def test_parse_examples():
    g = parse_element("(1 2 3)[1:g1,3:g2]", Z3)
    assert str(g.perm) == "(1 2 3)" and dict(g.tuple.entries) == {1: 1, 3: 2}
    assert parse_element("e", Z2).is_identity()
    assert parse_element("[2:g]", Z2) == pure_tuple(Z2, GammaTuple.from_dict(Z2, {2: 1}))
    # overlapping cycles multiply, rightmost first
    assert parse_element("(1 2)(2 3)", Z2).perm == Permutation.from_cycles([(1, 2)]).compose(
        Permutation.from_cycles([(2, 3)]))


@pytest.mark.parametrize("text,pos", [("(1 0)", 3), ("(1 2", 4), ("(1 2)[1:q]", 8), ("(1 2) x", 6),
                                      ("(1 1)", 3), ("[1:g,1:g]", 5), ("", 0)])
def test_parse_errors(text, pos):
    with pytest.raises(ParseError) as info:
        parse_element(text, Z2)
    assert info.value.position == pos


@given(any_group.flatmap(elements))
def test_format_roundtrip(g):
    assert parse_element(format_element(g), g.group) == g


def test_group_mismatch():
    with pytest.raises(WreathError):
        multiply(P("(1 2)"), parse_element("(1 2)", Z3))
