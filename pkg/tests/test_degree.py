import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chernint import degree as dg
from chernint.degree import (
    CONSISTENT,
    INCONSISTENT,
    NO_CONCLUSION,
    NO_CORRESPONDENCE,
    NOT_APPLICABLE,
    STRONGLY_INCOMPRESSIBLE,
    VIOLATES,
    MorphismRecord,
    RecordError,
    VarietyRecord,
    check_degree_formula,
    check_index_bound,
    correspondence_verdict,
    incompressibility_criterion,
    index_p_part,
    t_p_class,
)
from chernint.kchow import KHomElt, all_models, euler_characteristic

PRIMES = [2, 3, 5, 7]


def rec(name, dim, chi, index):
    return VarietyRecord(name, dim, chi, index)


def sb(p):
    return rec(f"sb{p}", p - 1, 1, p)


# index_p_part / t_p -------------------------------------------------------


def test_index_p_part_examples():
    assert index_p_part(rec("a", 1, 1, 12), 2) == 4
    for p in PRIMES:
        assert index_p_part(rec("a", 1, 1, 1), p) == 1
        assert index_p_part(sb(p), p) == p


def test_t_p_examples():
    for p in PRIMES:
        tp = t_p_class(sb(p), p)
        assert (tp.residue, tp.modulus, tp.i) == (1, p, 1)
    tp = t_p_class(rec("b", 2, 2, 4), 3)
    assert (tp.residue, tp.modulus, tp.i) == (0, 1, 1)
    tp = t_p_class(rec("c", 4, 1, 8), 2)
    assert (tp.residue, tp.modulus, tp.i, tp.certified) == (0, 8, 4, False)


def test_t_p_rejects_bad_dim():
    with pytest.raises(ValueError):
        t_p_class(rec("d", 3, 1, 3), 3)
    with pytest.raises(ValueError):
        t_p_class(rec("e", 0, 1, 1), 2)


@settings(max_examples=200, deadline=None)
@given(
    p=st.sampled_from(PRIMES),
    i=st.integers(1, 6),
    chi=st.integers(-10**6, 10**6),
    e=st.integers(0, 8),
    cofactor=st.integers(1, 50),
    n=st.integers(-100, 100),
)
def test_t_p_invariant_under_chi_shift(p, i, chi, e, cofactor, n):
    r = rec("x", i * (p - 1), chi, p**e * cofactor)
    shifted = rec("x", r.dim, chi + index_p_part(r, p) * n, r.index)
    assert t_p_class(r, p) == t_p_class(shifted, p)


# index bound --------------------------------------------------------------


def test_index_bound_examples():
    assert check_index_bound(rec("conic", 1, 1, 2), 2)["verdict"] == CONSISTENT
    v = check_index_bound(rec("bad", 1, 1, 4), 2)
    assert v["verdict"] == VIOLATES and (v["lhs"], v["rhs"]) == (2, 1)
    assert check_index_bound(rec("z", 1, 0, 2**40), 2)["verdict"] == CONSISTENT
    assert check_index_bound(rec("big", 2, 1, 1), 2)["verdict"] == NOT_APPLICABLE


@settings(max_examples=300, deadline=None)
@given(p=st.sampled_from(PRIMES), dim=st.integers(0, 60), chi=st.integers(-1000, 1000), e=st.integers(0, 12))
def test_index_bound_matches_formula(p, dim, chi, e):
    r = rec("x", dim, chi, p**e)
    v = check_index_bound(r, p)["verdict"]
    if dim >= p * (p - 1):
        assert v == NOT_APPLICABLE
    elif chi == 0:
        assert v == CONSISTENT
    else:
        vchi = 0
        while chi % p**(vchi + 1) == 0:
            vchi += 1
        assert (v == CONSISTENT) == (e <= dim // (p - 1) + vchi)


# degree formula -----------------------------------------------------------


def test_degree_formula_examples():
    for p in (2, 3, 5):
        X, Y = sb(p), rec("Y", p - 1, 1, p)
        recs = {X.name: X, Y.name: Y}
        for d in (1, p + 1, 2 * p + 1):
            assert check_degree_formula(MorphismRecord("Y", X.name, d), recs, p)["verdict"] == CONSISTENT
        assert check_degree_formula(MorphismRecord("Y", X.name, 0), recs, p)["verdict"] == VIOLATES
        T = rec("T", p - 1, 5, 1)
        recs["T"] = T
        for d in range(5):
            assert check_degree_formula(MorphismRecord("Y", "T", d), recs, p)["verdict"] == CONSISTENT


def test_degree_formula_orientation():
    # f: Y -> X, modulus taken from the target X
    X = rec("X", 2, 1, 9)
    Y = rec("Y", 2, 2, 1)
    recs = {"X": X, "Y": Y}
    v = check_degree_formula(MorphismRecord("Y", "X", 2), recs, 3)
    assert v["modulus"] == 9 and v["verdict"] == CONSISTENT
    v = check_degree_formula(MorphismRecord("X", "Y", 2), recs, 3)
    assert v["modulus"] == 1


def test_degree_formula_errors():
    recs = {"a": rec("a", 2, 1, 3), "b": rec("b", 4, 1, 3), "c": rec("c", 8, 1, 3)}
    with pytest.raises(ValueError):
        check_degree_formula(MorphismRecord("a", "b", 1), recs, 3)
    with pytest.raises(ValueError):
        check_degree_formula(MorphismRecord("c", "c", 1), recs, 3)
    with pytest.raises(ValueError):
        check_degree_formula(MorphismRecord("a", "missing", 1), recs, 3)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_model_records_are_consistent(p):
    # auto records (dim, chi(O), index 1) of cellular models pass both checks
    for X in all_models(min(8, p * (p - 1))):
        i = X.dim // (p - 1)
        if X.dim == 0 or X.dim % (p - 1) or i > p:
            continue
        chi = int(euler_characteristic(KHomElt.structure_sheaf(X)))
        r = rec(X.name, X.dim, chi, 1)
        assert check_index_bound(r, p)["verdict"] in (CONSISTENT, NOT_APPLICABLE)
        ident = MorphismRecord(X.name, X.name, 1)
        assert check_degree_formula(ident, {X.name: r}, p)["verdict"] == CONSISTENT


# incompressibility --------------------------------------------------------


def test_incompressibility_examples():
    for p in PRIMES:
        assert incompressibility_criterion(sb(p), p, 1)["verdict"] == STRONGLY_INCOMPRESSIBLE
    assert incompressibility_criterion(rec("b", 1, 1, 4), 2, 2)["verdict"] == INCONSISTENT
    assert incompressibility_criterion(rec("c", 3, 1, 2), 2, 1)["verdict"] == NO_CONCLUSION


def test_incompressibility_not_applicable():
    assert incompressibility_criterion(rec("a", 2, 3, 9), 3, 1)["verdict"] == NOT_APPLICABLE
    assert incompressibility_criterion(rec("a", 2, 1, 3), 3, 2)["verdict"] == NOT_APPLICABLE
    assert incompressibility_criterion(rec("a", 2, 1, 3), 3, 4)["verdict"] == NOT_APPLICABLE
    assert incompressibility_criterion(rec("a", 2, 1, 1), 3)["verdict"] == NOT_APPLICABLE


# correspondences ----------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(
    p=st.sampled_from([2, 3, 5]),
    dx=st.integers(1, 8),
    ex=st.integers(0, 5),
    ey=st.integers(0, 5),
    cx=st.integers(-50, 50),
    cy=st.integers(-50, 50),
)
def test_correspondence_implies_degree_violation(p, dx, ex, ey, cx, cy):
    X = rec("X", dx, cx, p**ex)
    Y = rec("Y", dx, cy, p**ey)
    v = correspondence_verdict(X, Y, p)
    if v["verdict"] != NO_CORRESPONDENCE:
        return
    i = dx // (p - 1)
    if dx % (p - 1) or not 0 < i <= p:
        return
    recs = {"X": X, "Y": Y}
    for d in range(1, 4 * p):
        if d % p:
            # a map X -> Y of degree prime to p is refuted by the degree formula
            m = MorphismRecord("X", "Y", d)
            assert check_degree_formula(m, recs, p)["verdict"] == VIOLATES


def test_correspondence_example():
    p = 3
    X = rec("X", 2, 1, 3)
    Y = rec("Y", 2, 3, 9)
    assert correspondence_verdict(X, Y, p)["verdict"] == NO_CORRESPONDENCE
    assert correspondence_verdict(Y, X, p)["verdict"] == NO_CONCLUSION


# records and JSON ---------------------------------------------------------


def test_sample_file_verdicts():
    varieties, morphisms = dg.load_records(dg.sample_records_path())
    verdicts = dg.evaluate(varieties, morphisms, 3)
    assert [v["verdict"] for v in verdicts] == [STRONGLY_INCOMPRESSIBLE, CONSISTENT, VIOLATES]
    assert all("paper_ref" in c for v in verdicts for c in v["checks"])


def test_parse_records_errors():
    with pytest.raises(RecordError) as err:
        dg.parse_records({"varieties": [{"name": "a", "dim": 1, "chi": 1}]})
    assert err.value.path == "$.varieties[0].index"
    with pytest.raises(RecordError) as err:
        dg.parse_records({"varieties": [{"name": "a", "dim": "x", "chi": 1, "index": 1}]})
    assert err.value.path == "$.varieties[0].dim"
    with pytest.raises(RecordError) as err:
        dg.parse_records({"varieties": [{"name": "a", "dim": 1, "chi": 1, "index": 0}]})
    assert err.value.path == "$.varieties[0]"
    with pytest.raises(RecordError):
        dg.parse_records({"varieties": [], "morphisms": [{"source": "a", "target": "b", "deg": 1}]})
    with pytest.raises(RecordError):
        dg.parse_records([1, 2])
    with pytest.raises(RecordError):
        dg.parse_records({"varieties": [{"name": "a", "dim": True, "chi": 1, "index": 1}]})


def test_big_integers(tmp_path):
    big = 3**80
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"varieties": [{"name": "a", "dim": 2, "chi": "1", "index": str(big)}]}))
    (r,), _ = dg.load_records(path)
    assert r.index == big
    out = dg.json_safe(dg.evaluate([r], [], 3))
    assert out[0]["t_p"]["modulus"] == str(big)
    assert dg.json_safe(2**53 - 1) == 2**53 - 1


def test_empty_and_malformed_files(tmp_path):
    empty = tmp_path / "e.json"
    empty.write_text("")
    assert dg.load_records(empty) == ([], [])
    bad = tmp_path / "b.json"
    bad.write_text("{ nope")
    with pytest.raises(RecordError) as err:
        dg.load_records(bad)
    assert str(bad) in err.value.path


def test_failure_classification():
    assert dg.is_failure({"verdict": VIOLATES})
    assert dg.is_failure({"verdict": INCONSISTENT})
    assert not dg.is_failure({"verdict": STRONGLY_INCOMPRESSIBLE})
