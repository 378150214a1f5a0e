import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wreath_lab.finite_group import (
    GroupValidationError,
    build_group,
    character_of,
    conjugacy_classes,
    direct_sum,
    dual_group,
    from_table,
    group_from_json,
    group_to_json,
    inner_product,
    regular_rep,
    validate_rep,
)

BUILTINS = ["cyclic 2", "cyclic 3", "cyclic 5", "symmetric 3", "klein4", "S4"]


def brute_s3():
    # independent oracle: compose permutations of {0,1,2} directly
    els = list(itertools.permutations(range(3)))
    return els, [[els.index(tuple(a[b[i]] for i in range(3))) for b in els] for a in els]


def test_cyclic_tables():
    G = build_group("cyclic 2")
    assert G.mult.tolist() == [[0, 1], [1, 0]]
    assert G.identity == 0
    assert build_group("cyclic 3").inv.tolist() == [0, 2, 1]


def test_symmetric3_matches_brute_force():
    G = build_group("symmetric 3")
    assert G.order == 6
    els, mult = brute_s3()
    H = from_table(mult, "S3 brute")
    assert sorted(conjugacy_classes(G).sizes()) == sorted(conjugacy_classes(H).sizes()) == [1, 2, 3]
    assert sorted(map(G.element_order, range(6))) == sorted(map(H.element_order, range(6)))


@pytest.mark.parametrize("name,sizes", [("cyclic 2", [1, 1]), ("symmetric 3", [1, 2, 3]),
                                        ("klein4", [1, 1, 1, 1]), ("S4", [1, 3, 6, 6, 8])])
def test_class_sizes(name, sizes):
    assert sorted(conjugacy_classes(build_group(name)).sizes()) == sizes


def test_s5_classes():
    assert conjugacy_classes(build_group("S5")).count == 7


@pytest.mark.parametrize("bad,fragment", [
    ([[0, 1], [0, 1]], "column"),
    ([[0, 1, 2], [1, 2, 0], [2, 1, 0]], "column"),
    ([[0, 1], [1, 1]], "row 1"),
])
def test_invalid_tables(bad, fragment):
    with pytest.raises(GroupValidationError, match=fragment):
        from_table(bad)


def test_non_associative_names_triple():
    # a Latin square with identity 0 that is not a group table
    L = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupValidationError, match="triple"):
        from_table(L)


def test_unknown_group():
    with pytest.raises(GroupValidationError):
        build_group("symmetric 9")


def test_characters_basic():
    G = build_group("cyclic 2")
    assert np.allclose(character_of(G.irrep("trivial")), 1)
    assert character_of(G.irrep("sign"))[1] == -1
    S = build_group("symmetric 3")
    assert character_of(S.irrep("standard"))[S.identity] == 2


def test_dual_groups():
    assert sorted(tuple(np.round(d.real).astype(int)) for d in dual_group(build_group("cyclic 2"))) == [(1, -1), (1, 1)]
    for d in dual_group(build_group("cyclic 3")):
        assert np.allclose(d ** 3, 1)
    K = dual_group(build_group("klein4"))
    assert len(K) == 4 and all(np.allclose(d.imag, 0) for d in K)
    with pytest.raises(GroupValidationError):
        dual_group(build_group("symmetric 3"))


@pytest.mark.parametrize("name", ["cyclic 2", "cyclic 3", "cyclic 6", "klein4"])
def test_dual_orthonormal(name):
    G = build_group(name)
    D = dual_group(G)
    assert len(D) == G.order
    gram = np.array([[inner_product(G, a, b) for b in D] for a in D])
    assert np.allclose(gram, np.eye(G.order), atol=1e-10)
    for d in D:  # multiplicativity, checked against the table
        assert np.allclose(d[G.mult], np.outer(d, d), atol=1e-10)


def test_validate_rep_reports():
    G = build_group("cyclic 2")
    r = validate_rep(G, G.irrep("trivial"))
    assert r.homomorphism_residual == 0 and r.irreducible
    assert abs(validate_rep(G, G.irrep("sign")).norm_sq - 1) < 1e-12
    ds = direct_sum("t+s", G.irrep("trivial"), G.irrep("sign"))
    rep = validate_rep(G, ds)
    assert abs(rep.norm_sq - 2) < 1e-12 and rep.is_representation and not rep.irreducible
    assert abs(validate_rep(G, regular_rep(G)).norm_sq - 2) < 1e-12


@pytest.mark.parametrize("name", BUILTINS)
def test_stored_reps_are_homomorphisms(name):
    G = build_group(name)
    for rep in G.irreps:
        imgs = rep.images
        for x in range(G.order):
            assert np.allclose(imgs[x] @ imgs, imgs[G.mult[x]], atol=1e-10)
        assert validate_rep(G, rep).irreducible


@pytest.mark.parametrize("name", BUILTINS)
def test_characters_are_class_functions(name):
    G = build_group(name)
    cls = conjugacy_classes(G).class_of
    for rep in G.irreps:
        chi = character_of(rep)
        for x in range(G.order):
            assert abs(chi[x] - chi[G.mult[G.mult[G.inv[1 % G.order], x], 1 % G.order]]) < 1e-12
            assert abs(chi[x] - chi[conjugacy_classes(G).representatives[cls[x]]]) < 1e-12


@given(st.sampled_from(BUILTINS), st.data())
def test_group_axioms(name, data):
    G = build_group(name)
    x, y, z = (data.draw(st.integers(0, G.order - 1)) for _ in range(3))
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, int(G.inv[x])) == G.identity
    assert G.mul(G.identity, x) == x


def test_json_roundtrip():
    G = build_group("symmetric 3")
    H = group_from_json(group_to_json(G))
    assert H == G
    assert [r.name for r in H.irreps] == [r.name for r in G.irreps]
    assert np.allclose(H.irrep("standard").images, G.irrep("standard").images)
