from fractions import Fraction

import pytest

from chernint.exactnum import todd_number, vp
from chernint.integrality import (
    NotInLattice,
    basis_elements,
    check_chpsi,
    check_graded,
    check_integrality,
    check_lci_integrality,
    check_tdpsi,
    check_tdpsi2,
    check_tdpsi3,
    check_toddp,
    check_toddvp,
    floor_bound,
    integrality_valuations,
    random_bundle,
    random_khom,
    reduce_mod_p_lattice,
    replay_mainvp,
)
from chernint.kchow import (
    ChowElt,
    KHomElt,
    ModelVariety,
    VirtualBundle,
    adams_hom,
    all_models,
    bott_theta,
    ch_coh,
    ch_hom,
    filtration_level,
    tangent_class,
    todd_class,
    todd_tangent,
)
from chernint.report import case_rng

V = ModelVariety.parse
P1, P2, P3, P4 = (V(f"P{n}") for n in range(1, 5))


def h(X, j=0, mod=None):
    return ChowElt.hyperplane(X, j, mod)


# reduce_mod_p_lattice -----------------------------------------------------


def test_reduce_examples():
    x = h(P2).scale(3)
    assert reduce_mod_p_lattice(x, 2) == h(P2, mod=2)
    assert reduce_mod_p_lattice(x, 3).is_zero()
    half = h(P2).scale(Fraction(1, 2))
    assert reduce_mod_p_lattice(half, 3) == h(P2, mod=3).scale(2)
    with pytest.raises(NotInLattice):
        reduce_mod_p_lattice(half, 2)


# chpsi / graded -----------------------------------------------------------


def test_chpsi_example_p1():
    O = KHomElt.structure_sheaf(P1)
    assert check_chpsi(P1, 2, O).ok
    before, after = ch_hom(O), ch_hom(adams_hom(2, O))
    assert after[0] == before[0]
    assert after[1] == before[1].scale(Fraction(1, 2))
    pt = V("pt")
    for l in (2, -3, 7):
        assert check_chpsi(pt, l, KHomElt.structure_sheaf(pt)).ok


def test_chpsi_random_combination():
    X = V("P2xP1")
    rng = case_rng(0, "test-chpsi")
    for _ in range(10):
        assert check_chpsi(X, 3, random_khom(X, rng)).ok


def test_graded_examples():
    pt = KHomElt.basis(P3, (0,))
    assert adams_hom(2, pt) - pt == KHomElt.zero(P3)
    assert check_graded(P3, 2, pt).ok
    O = KHomElt.structure_sheaf(P1)
    diff = adams_hom(5, O) - O.scale(Fraction(1, 5))
    assert diff == KHomElt.basis(P1, (0,), Fraction(4, 5))
    assert filtration_level(diff) == 0
    X = V("P2xP2")
    for x in basis_elements(X):
        assert check_graded(X, 3, x).ok


def test_graded_rejects_zero():
    with pytest.raises(ValueError):
        check_graded(P2, 2, KHomElt.zero(P2))


# integrality --------------------------------------------------------------


def test_integrality_examples():
    vals = integrality_valuations(KHomElt.structure_sheaf(P2), 2)
    n, v, bound = vals[2]
    assert (n, v, bound) == (2, 0, -2)
    vals = integrality_valuations(KHomElt.structure_sheaf(P1), 3)
    assert vals[1] == (1, 0, 0)
    for X in (P1, P3, V("P2xP1")):
        pt = KHomElt.basis(X, (0,) * X.nfactors)
        assert integrality_valuations(pt, 5) == [(0, 0, 0)]


def test_integrality_n_max_bound():
    with pytest.raises(ValueError):
        check_integrality(P2, 2, KHomElt.basis(P2, (1,)), n_max=2)


def test_integrality_flags_non_integral_input():
    # the check is not vacuous: a class with a denominator p breaks the bound at n = 0
    x = KHomElt.structure_sheaf(P2).scale(Fraction(1, 3))
    report = check_integrality(P2, 3, x)
    assert not report.ok
    assert any("n=0" in f["case"] for f in report.failures)


def test_integrality_scope_labels():
    report = check_integrality(V("P4"), 2, KHomElt.structure_sheaf(P4))
    assert [r["n"] for r in report.data] == [0, 1, 2, 3, 4]
    strict = check_integrality(V("P4"), 2, KHomElt.structure_sheaf(P4), strict_paper_range=True)
    assert [r["n"] for r in strict.data] == [0, 1]


@pytest.mark.parametrize("n", range(0, 9))
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_structure_sheaf_of_pn_against_direct_valuation(n, p):
    # ch[O] = Td(T) on P^n; compare with the bound componentwise
    X = V(f"P{n}")
    td = todd_tangent(X)
    for k in range(n + 1):
        c = td.component(k).coefficient((k,))
        assert vp(c, p) >= floor_bound(k, p)
    assert check_integrality(X, p, KHomElt.structure_sheaf(X)).ok


@pytest.mark.parametrize("X", [P2, P3, V("P2xP1"), V("P1xP1xP1")], ids=str)
@pytest.mark.parametrize("p", [2, 3])
def test_replay(X, p):
    for x in basis_elements(X):
        assert replay_mainvp(X, p, x).ok
    rng = case_rng(0, "test-replay", p, X.dim)
    for _ in range(10):
        assert replay_mainvp(X, p, random_khom(X, rng)).ok


def test_replay_needs_integral_class():
    with pytest.raises(ValueError):
        replay_mainvp(P2, 2, KHomElt.structure_sheaf(P2).scale(Fraction(1, 2)))


# lci integrality ----------------------------------------------------------


def test_lci_examples():
    td = todd_tangent(P4)
    comps = [td.component(n) for n in range(5)]
    assert any(c.denominator > 1 for n in range(5) for c in comps[n].terms.values())
    for n in range(5):
        scaled = comps[n].scale(todd_number(n))
        assert all(c.denominator == 1 for c in scaled.terms.values())
    assert todd_number(4) == 720
    assert check_lci_integrality(V("pt")).ok
    assert check_lci_integrality(V("P2xP3")).ok


@pytest.mark.parametrize("X", all_models(6), ids=str)
def test_lci_sweep(X):
    assert check_lci_integrality(X).ok


# toddvp / toddp -----------------------------------------------------------


def test_toddvp_examples():
    u = -tangent_class(P4)
    report = check_toddvp(u, 2)
    assert report.ok
    td = todd_class(u)
    assert td.component(1).vp(2) >= -1 and td.component(2).vp(2) >= -2
    Z = VirtualBundle.zero(P3)
    assert todd_class(Z) == ChowElt.one(P3)
    P5 = V("P5")
    w = VirtualBundle.line(P5, (1,)) - VirtualBundle.line(P5, (2,))
    assert check_toddvp(w, 3).ok


def test_toddp_examples():
    for a in (-2, 1, 3):
        L = VirtualBundle.line(P3, (a,))
        assert check_toddp(L, 2).ok
        lhs = todd_class(-L).component(1).scale(2)
        assert reduce_mod_p_lattice(lhs, 2) == h(P3, mod=2).scale(a)
    assert check_toddp(tangent_class(P4), 3).ok


@pytest.mark.parametrize("p", [2, 3, 5])
def test_toddp_random(p):
    for X in (P4, V("P2xP2"), V("P1xP3")):
        rng = case_rng(0, "test-toddp", p, X.dim)
        for _ in range(10):
            u = random_bundle(X, rng)
            assert check_toddp(u, p).ok
            assert check_toddvp(u, p).ok


# tdpsi lemmas -------------------------------------------------------------


@pytest.mark.parametrize("l", [2, 3, 5, -2, -3])
def test_tdpsi_lemmas(l):
    for X in (P2, V("P2xP1"), V("P1xP1xP1")):
        rng = case_rng(0, "test-tdpsi", l, X.dim)
        for _ in range(10):
            u = random_bundle(X, rng)
            assert check_tdpsi(u, l).ok
            assert check_tdpsi2(u, l).ok
            assert check_tdpsi3(u.to_kcoh(), l).ok


def test_tdpsi_detects_wrong_rank_power():
    # the rank factor l^rank(u) is essential
    u = VirtualBundle.line(P2, (1,), 2)
    lhs = todd_class(-u) * ch_coh(bott_theta(3, u))
    rhs = todd_class(-u.adams(3))
    assert lhs != rhs
    assert lhs == rhs.scale(9)
