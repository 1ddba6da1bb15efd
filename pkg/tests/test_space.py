import pytest

from coste.context import is_admissible_by_lifting
from coste.finmodel import (
    Hom,
    ModelError,
    chain,
    diamond,
    enumerate_homs,
    is_isomorphic,
    make_zmod,
    ring_product,
)
from coste.space import (
    coequalizer_spaces,
    coproduct_spaces,
    enumerate_maps,
    equalizer_spaces,
    is_admissible_map,
    is_T_modelled,
    nonadmissible_coequalizer_example,
    product_spaces,
    pullback_spaces,
    small_probe_spaces,
    verify_coequalizer,
    verify_coproduct,
    verify_limit,
)
from coste.spectrum import (
    ModelledMap,
    discrete_space,
    empty_space,
    gamma,
    point_space,
    spaces_isomorphic,
    spec,
)

Z2, Z3, Z4 = make_zmod(2), make_zmod(3), make_zmod(4)


def test_admissible_maps():
    X = spec("zariski", make_zmod(12))
    assert is_admissible_map("zariski", ModelledMap.identity(X))
    # each point of Spec(Z/12) over the one-point space with stalk Z/12
    Y = point_space(make_zmod(12))
    counit = ModelledMap(X, Y, (0, 0), tuple(lam.hom for lam in X.arrows))
    counit.validate()
    # Z/12 -> Z/3 sends the non-unit 2 to a unit, so it does not reflect units
    assert not is_admissible_map("zariski", counit)
    assert not is_admissible_by_lifting("zariski", X.arrows[0].hom)
    bad = ModelledMap(point_space(Z2), point_space(make_zmod(6)), (0,), (enumerate_homs(make_zmod(6), Z2)[0],))
    assert not is_admissible_map("zariski", bad)


def test_T_modelled():
    assert is_T_modelled("zariski", spec("zariski", make_zmod(12)))
    assert not is_T_modelled("zariski", point_space(make_zmod(12)))
    assert is_T_modelled("zariski", empty_space("ring"))
    assert is_T_modelled("dl", spec("dl", diamond()))


def test_enumerate_maps_counts():
    # maps (pt, Z/2) -> Spec(Z/6): one per point, each comparison forced
    X = spec("zariski", make_zmod(6))
    maps = list(enumerate_maps(point_space(Z2), X))
    assert len(maps) == 1
    assert len(list(enumerate_maps(empty_space("ring"), X))) == 1
    assert list(enumerate_maps(X, empty_space("ring"))) == []


# --- coproducts -----------------------------------------------------------


def test_empty_coproduct():
    col = coproduct_spaces("zariski", [])
    assert col.apex.n == 0


def test_coproduct_z4_z9():
    X, Y = point_space(Z4), point_space(make_zmod(9))
    col = coproduct_spaces("zariski", [X, Y])
    assert col.apex.n == 2
    assert gamma(col.apex).size == 36
    assert is_isomorphic(gamma(col.apex), ring_product([Z4, make_zmod(9)]))
    assert verify_coproduct("zariski", col, [X, Y], small_probe_spaces("ring", [Z2, Z4], 2))


def test_coproduct_of_one():
    X = spec("zariski", make_zmod(12))
    col = coproduct_spaces("zariski", [X])
    assert spaces_isomorphic(col.apex, X)


# --- coequalizers ---------------------------------------------------------


def _two_points_of_z3():
    X = point_space(Z3)
    Y = discrete_space([Z3, Z3])
    ident = Hom.identity(Z3)
    return ModelledMap(X, Y, (0,), (ident,)), ModelledMap(X, Y, (1,), (ident,))


def test_coequalizer_glues_points():
    f, g = _two_points_of_z3()
    col = coequalizer_spaces("zariski", f, g)
    assert col.apex.n == 1
    assert is_isomorphic(col.apex.stalks[0], Z3)
    assert verify_coequalizer("zariski", col, f, g, small_probe_spaces("ring", [Z3], 3))


def test_coequalizer_of_equal_maps():
    f, _ = _two_points_of_z3()
    col = coequalizer_spaces("zariski", f, f)
    assert spaces_isomorphic(col.apex, f.target)


def test_nonadmissible_coequalizer_is_not_T_modelled():
    f, g = nonadmissible_coequalizer_example()
    assert not is_admissible_map("dl", f)
    col = coequalizer_spaces("dl", f, g, check=False)
    assert col.apex.n == 1
    assert is_isomorphic(col.apex.stalks[0], diamond())
    assert not is_T_modelled("dl", col.apex)


# --- limits ---------------------------------------------------------------


def test_product_of_points_z4_z9():
    # Z/4 ⊗ Z/9 is the zero ring
    lim = product_spaces("zariski", [point_space(Z4), point_space(make_zmod(9))])
    assert lim.apex.n == 1
    assert lim.apex.stalks[0].is_trivial


def test_product_with_spec_z6():
    lim = product_spaces("zariski", [point_space(Z4), spec("zariski", make_zmod(6))])
    assert sorted(P.size for P in lim.apex.stalks) == [1, 2]
    lim.apex.validate()
    for leg in lim.legs:
        leg.validate()


def test_product_with_terminal_lattice():
    X = spec("dl", diamond())
    T = product_spaces("dl", [])
    assert T.apex.n == 1 and is_isomorphic(T.apex.stalks[0], chain(2))
    lim = product_spaces("dl", [X, T.apex])
    assert spaces_isomorphic(lim.apex, X)


def test_empty_ring_product_rejected():
    # the terminal space would need the stalk Z, which is infinite
    with pytest.raises(ModelError):
        product_spaces("zariski", [])


def test_product_universal_property():
    Xs = [point_space(chain(2)), spec("dl", chain(3))]
    lim = product_spaces("dl", Xs)
    probes = small_probe_spaces("lattice", [chain(2), chain(3)], 3)
    assert verify_limit(lim, Xs, probes)


def test_equalizer_of_equal_maps():
    f, _ = _two_points_of_z3()
    lim = equalizer_spaces("zariski", f, f)
    assert spaces_isomorphic(lim.apex, f.source)


def test_equalizer_lattice():
    M, C3 = diamond(), chain(3)
    homs = enumerate_homs(M, C3)
    a, b = M.labels.index("a"), M.labels.index("b")
    h1, h2 = [h for h in homs if h.map[a] != h.map[b]][:2]
    Y, X = point_space(C3), point_space(M)
    f, g = ModelledMap(Y, X, (0,), (h1,)), ModelledMap(Y, X, (0,), (h2,))
    lim = equalizer_spaces("dl", f, g)
    assert lim.apex.n == 1
    E = lim.apex.stalks[0]
    # the quotient of the 3-chain by the congruence generated by h1(s) ~ h2(s)
    q = lim.legs[0].flat[0]
    assert all(q.map[h1.map[s]] == q.map[h2.map[s]] for s in M.elements)
    assert E.size < C3.size
    compatible = lambda cone: cone[0].then(f).same_as(cone[0].then(g))
    assert verify_limit(lim, [Y], small_probe_spaces("lattice", [chain(2), C3], 2), None, compatible)


def test_equalizer_of_product_projections_is_diagonal():
    X = discrete_space([chain(2), chain(2)])
    lim = product_spaces("dl", [X, X])
    p, q = lim.legs
    eq = equalizer_spaces("dl", p, q)
    assert eq.apex.n == 2
    assert spaces_isomorphic(eq.apex, X)


def test_pullback():
    Xb = point_space(Z4)
    Z = point_space(Z2)
    Y = point_space(ring_product([Z2, Z2]))
    g = ModelledMap(Z, Xb, (0,), (enumerate_homs(Z4, Z2)[0],))
    f = ModelledMap(Y, Xb, (0,), (enumerate_homs(Z4, Y.stalks[0])[0],))
    lim = pullback_spaces("zariski", g, f)
    assert lim.apex.n == 1
    compatible = lambda cone: cone[0].then(g).same_as(cone[1].then(f))
    probes = small_probe_spaces("ring", [Z2, ring_product([Z2, Z2])], 2)
    assert verify_limit(lim, [Z, Y], probes, None, compatible)
