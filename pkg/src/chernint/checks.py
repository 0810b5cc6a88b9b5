"""Registry of named checks with typed parameters and acceptance-scale defaults."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import degree, integrality, steenrod
from .exactnum import (
    factorial_vp_bruteforce,
    is_prime,
    legendre_factorial_vp,
    primes_up_to,
    todd_number,
    todd_number_recursive,
    vp,
)
from .kchow import ChowElt, ModelVariety, all_models, euler_characteristic, KHomElt, supported_morphisms
from .render import render_poly
from .report import CheckReport, case_rng, rand_int
from .series import TruncSeries, render_series, r_series, series_comp_inverse, series_compose, todd_series, w_series

CORPUS = ("P1", "P2", "P3", "P4", "P2xP1", "P2xP3")


class UnknownCheck(KeyError):
    pass


class BadParams(ValueError):
    pass


# parameter parsing ----------------------------------------------------------------


def _as_list(value) -> list:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _int(value, name: str) -> int:
    try:
        if isinstance(value, bool):
            raise ValueError
        return int(value)
    except (TypeError, ValueError):
        raise BadParams(f"{name}: expected an integer, got {value!r}") from None


def primes_param(value, name="p") -> list[int]:
    out = [_int(v, name) for v in _as_list(value)]
    for q in out:
        if not is_prime(q):
            raise BadParams(f"{name}: {q} is not prime")
    if not out:
        raise BadParams(f"{name}: empty list")
    return out


def ints_param(value, name: str, nonzero=False, minimum=None) -> list[int]:
    out = [_int(v, name) for v in _as_list(value)]
    for v in out:
        if nonzero and v == 0:
            raise BadParams(f"{name}: 0 is not allowed")
        if minimum is not None and v < minimum:
            raise BadParams(f"{name}: {v} < {minimum}")
    if not out:
        raise BadParams(f"{name}: empty list")
    return out


def int_param(value, name: str, minimum: int = 0) -> int:
    v = _int(value, name)
    if v < minimum:
        raise BadParams(f"{name}: {v} < {minimum}")
    return v


def varieties_param(value, name="variety") -> list[ModelVariety]:
    try:
        return [v if isinstance(v, ModelVariety) else ModelVariety.parse(v) for v in _as_list(value)]
    except ValueError as exc:
        raise BadParams(f"{name}: {exc}") from None


def _models(params, default_max: int) -> list[ModelVariety]:
    if "variety" in params:
        return params["variety"]
    return all_models(params.get("max_dim", default_max))


@dataclass(frozen=True)
class CheckSpec:
    run: Callable
    params: dict  # name -> (parser, default)
    doc: str


REGISTRY: dict[str, CheckSpec] = {}

_P = lambda v: primes_param(v)  # noqa: E731
_VAR = lambda v: varieties_param(v)  # noqa: E731
_NAT = lambda name, lo=0: (lambda v: int_param(v, name, lo))  # noqa: E731


def register(name: str, doc: str, **params):
    def deco(fn):
        REGISTRY[name] = CheckSpec(fn, params, doc)
        return fn

    return deco


def resolve_params(check_id: str, raw: dict) -> dict:
    spec = REGISTRY[check_id]
    out = {}
    for key, value in raw.items():
        if value is None:
            continue
        key = key.replace("-", "_")
        if key not in spec.params:
            allowed = ", ".join(sorted(spec.params)) or "none"
            raise BadParams(f"check {check_id!r} has no parameter {key!r} (allowed: {allowed})")
        out[key] = spec.params[key][0](value)
    for key, (_, default) in spec.params.items():
        if key not in out and default is not None:
            out[key] = default
    return out


def run_check(check_id: str, params: dict | None = None, seed: int = 0) -> CheckReport:
    if check_id not in REGISTRY:
        raise UnknownCheck(check_id)
    resolved = resolve_params(check_id, params or {})
    start = time.perf_counter()
    report = REGISTRY[check_id].run(resolved, seed)
    report.check = check_id
    report.seed = seed
    report.params = {k: _show(v) for k, v in sorted(resolved.items())}
    report.elapsed_ms = round((time.perf_counter() - start) * 1000, 3)
    return report


def _show(v):
    if isinstance(v, ModelVariety):
        return v.name
    if isinstance(v, (list, tuple)):
        return [_show(x) for x in v]
    return v


# integrality ----------------------------------------------------------------------


@register(
    "chpsi",
    "ch_n(psi_l x) = l^-n ch_n(x) on the K'_0 basis",
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS]),
    l=(lambda v: ints_param(v, "l", nonzero=True), [2, 3, 5, 7]),
)
def _chpsi(params, seed):
    return integrality.chpsi_sweep(params["variety"], params["l"], "chpsi")


@register(
    "graded",
    "psi_l(x) - l^-d x drops filtration",
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS]),
    l=(lambda v: ints_param(v, "l", nonzero=True), [2, 3, 5, 7]),
)
def _graded(params, seed):
    return integrality.chpsi_sweep(params["variety"], params["l"], "graded")


@register(
    "mainvp",
    "v_p(ch_{d-n}(x)) >= -[n/(p-1)] on basis and random classes",
    p=(_P, [2, 3, 5]),
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 8),
    samples=(_NAT("samples"), 100),
)
def _mainvp(params, seed):
    return integrality.mainvp_sweep(_models(params, 8), params["p"], params["samples"], seed)


@register(
    "mainvp-replay",
    "valuation bound re-derived through psi_l with l a primitive root mod p^2",
    p=(_P, [2, 3, 5]),
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 4),
)
def _replay(params, seed):
    report = CheckReport("mainvp-replay")
    for X in _models(params, 4):
        for x in integrality.basis_elements(X):
            for p in params["p"]:
                integrality.replay_mainvp(X, p, x, report)
    return report


@register(
    "lci-integrality",
    "tau_n Td_n(T_X) is integral",
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 8),
)
def _lci(params, seed):
    report = CheckReport("lci-integrality")
    for X in _models(params, 8):
        integrality.check_lci_integrality(X, report=report)
    return report


def _bundle_sweep(name, params, seed, fn, per_prime=True):
    report = CheckReport(name)
    for X in params["variety"]:
        for s in range(params["samples"]):
            rng = case_rng(seed, name, *X.dims, s)
            u = integrality.random_bundle(X, rng)
            for p in params["p"]:
                fn(u, p, X, report)
    return report


@register(
    "toddvp",
    "v_p(Td^n(u)) >= -[n/(p-1)] for random virtual bundles",
    p=(_P, [2, 3, 5]),
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS + ("P8", "P4xP4")]),
    samples=(_NAT("samples"), 50),
)
def _toddvp(params, seed):
    return _bundle_sweep("toddvp", params, seed, integrality.check_toddvp)


@register(
    "toddp",
    "p^j Td^{j(p-1)}(-u) = r_j(u) mod p for random virtual bundles",
    p=(_P, [2, 3, 5]),
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS + ("P8", "P4xP4")]),
    samples=(_NAT("samples"), 50),
)
def _toddp(params, seed):
    return _bundle_sweep("toddp", params, seed, integrality.check_toddp)


@register(
    "tdpsi",
    "Todd class against Bott and Adams operations (three identities)",
    l=(lambda v: ints_param(v, "l", nonzero=True), [2, 3, 5]),
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS]),
    samples=(_NAT("samples"), 50),
)
def _tdpsi(params, seed):
    return integrality.tdpsi_sweep(params["variety"], params["l"], params["samples"], seed)


# series and arithmetic --------------------------------------------------------------


def check_inv_series(p: int, N: int, report: CheckReport | None = None) -> CheckReport:
    """(x R)(x W) = x and the compositional inverse of x W is x R, over Z/p."""
    report = report or CheckReport("inv-series")
    x = TruncSeries.variable(N, p)
    xr = x * r_series(p, N)
    xw = x * w_series(p, N)
    lhs = series_compose(xr, xw)
    report.case(lhs == x, f"p={p} N={N} (xR)o(xW)", render_series(lhs), render_series(x))
    inv = series_comp_inverse(xw)
    report.case(inv == xr, f"p={p} N={N} inverse of xW", render_series(inv), render_series(xr))
    return report


@register("inv-series", "(x R^(p)) o (x W^(p)) = x over Z/p", p=(_P, [2, 3, 5]), N=(_NAT("N", 1), None))
def _inv(params, seed):
    report = CheckReport("inv-series")
    for p in params["p"]:
        check_inv_series(p, params.get("N", p**4), report)
    return report


@register(
    "legendre",
    "Legendre's formula against direct factorial valuations",
    p=(_P, primes_up_to(11)),
    n_max=(_NAT("n_max"), 10**4),
)
def _legendre(params, seed):
    report = CheckReport("legendre")
    for p in params["p"]:
        # running valuation of n! doubles as the brute-force oracle
        acc = 0
        for n in range(params["n_max"] + 1):
            if n:
                acc += vp(n, p)
            a = legendre_factorial_vp(n, p)
            report.case(a == acc, f"p={p} n={n}", a, acc)
        spot = min(params["n_max"], 500)
        report.case(legendre_factorial_vp(spot, p) == factorial_vp_bruteforce(spot, p), f"p={p} n={spot} factorial")
    return report


WILSON_PAIRS = ((2, 4), (3, 3), (5, 2))


@register("wilson-pp", "(p^i)! p^-((p^i-1)/(p-1)) = (-1)^i mod p", p=(_P, None), i_max=(_NAT("i_max"), None))
def _wilson(params, seed):
    from .exactnum import wilson_pp_residue

    report = CheckReport("wilson-pp")
    if "p" in params:
        pairs = [(p, params.get("i_max", 2)) for p in params["p"]]
    else:
        pairs = [(p, params.get("i_max", i)) for p, i in WILSON_PAIRS]
    for p, imax in pairs:
        for i in range(imax + 1):
            key = f"p={p} i={i}"
            try:
                res = wilson_pp_residue(p, i)
            except ArithmeticError as exc:
                report.case(False, key, str(exc))
            except OverflowError as exc:
                raise BadParams(str(exc)) from None
            else:
                report.case(res == (-1) ** i % p, key, res, (-1) ** i % p)
    return report


@register("todd-numbers", "Todd numbers two ways and the Todd series denominators", d_max=(_NAT("d_max"), 10))
def _todd_numbers(params, seed):
    report = CheckReport("todd-numbers")
    td = todd_series(params["d_max"])
    for d in range(params["d_max"] + 1):
        a, b = todd_number(d), todd_number_recursive(d)
        report.case(a == b, f"d={d} product vs recursion", a, b)
        scaled = Fraction(td[d]) * a
        report.case(scaled.denominator == 1, f"d={d} tau_d * todd coefficient", scaled)
        report.data.append({"d": d, "tau": a, "coefficient": str(td[d])})
    return report


# Steenrod ---------------------------------------------------------------------------


@register(
    "pipelines-agree",
    "T_i from the Chern character equals the genus construction on every basis cycle",
    p=(_P, [2, 3]),
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 6),
)
def _pipelines(params, seed):
    report = CheckReport("pipelines-agree")
    for X in _models(params, 6):
        for p in params["p"]:
            steenrod.check_pipelines(X, p, report)
    P2 = ModelVariety((2,))
    spot = [steenrod.T_construct(1, ChowElt.one(P2, 2), 2), steenrod.T_via_genus(1, (2,), P2, 2)]
    line = ChowElt.hyperplane(P2, 0, 2)
    report.case(all(v == line for v in spot), "spot T_1[P2] = [line] mod 2", *map(render_poly, spot))
    return report


@register(
    "well-defined",
    "T_i does not depend on the lift (perturbations in lower filtration)",
    p=(_P, [2, 3]),
    variety=(_VAR, [ModelVariety.parse(s) for s in ("P2", "P3", "P4", "P2xP1", "P2xP2")]),
    samples=(_NAT("samples"), 100),
)
def _well_defined(params, seed):
    report = CheckReport("well-defined")
    for X in params["variety"]:
        for p in params["p"]:
            steenrod.check_well_defined(X, p, params["samples"], seed, report)
    return report


@register(
    "prop-coh",
    "T^0 = id, T^i[X] = 0, T^1(h) = -h^p",
    p=(_P, [2, 3, 5]),
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 6),
)
def _prop_coh(params, seed):
    report = CheckReport("prop-coh")
    for X in _models(params, 6):
        for p in params["p"]:
            steenrod.check_prop_coh_basic(X, p, report)
    return report


CARTAN_MODELS = ("P1", "P2", "P3", "P1xP1", "P2xP1")


@register(
    "cartan",
    "Cartan formulas for T_i and T^i on random pairs",
    p=(_P, [2, 3]),
    samples=(_NAT("samples"), 50),
)
def _cartan(params, seed):
    report = CheckReport("cartan")
    models = [ModelVariety.parse(s) for s in CARTAN_MODELS]
    for p in params["p"]:
        for s in range(params["samples"]):
            rng = case_rng(seed, "cartan", p, s)
            X = models[rand_int(rng, 0, len(models) - 1)]
            Y = models[rand_int(rng, 0, len(models) - 1)]
            x = steenrod.random_mod_p_class(X, p, rng)
            y = steenrod.random_mod_p_class(Y, p, rng)
            imax = (X.dim + Y.dim) // (p - 1)
            i = rand_int(rng, 0, imax)
            steenrod.check_cartan(x, y, i, p, report)
            # product formula on a single variety
            y2 = steenrod.random_mod_p_class(X, p, rng)
            steenrod.check_cartan(x, y2, rand_int(rng, 0, X.dim // (p - 1)), p, report)
    return report


@register(
    "rr-T",
    "pullback and pushforward formulas for T_i and T^i on supported morphisms",
    p=(_P, [2, 3]),
    variety=(_VAR, [ModelVariety.parse(s) for s in CORPUS]),
    samples=(_NAT("samples"), 3),
)
def _rr(params, seed):
    report = CheckReport("rr-T")
    for X in params["variety"]:
        for f in supported_morphisms(X):
            for p in params["p"]:
                extra = []
                for s in range(params["samples"]):
                    rng = case_rng(seed, "rr-T", p, *X.dims, *f.source.dims, s)
                    extra.append(steenrod.random_mod_p_class(f.target, p, rng, homogeneous=False))
                    extra.append(steenrod.random_mod_p_class(f.source, p, rng, homogeneous=False))
                top = max(f.source.dim, f.target.dim) // (p - 1)
                for i in range(top + 1):
                    steenrod.check_riemann_roch_T(f, i, p, extra, report)
    return report


@register(
    "prop-st",
    "T'_i = (-1)^i S_i for i <= p on all monomials of P^n",
    p=(_P, [2, 3]),
    n_max=(_NAT("n_max"), 8),
    variety=(_VAR, None),
)
def _prop_st(params, seed):
    report = CheckReport("prop-st")
    models = params.get("variety") or [ModelVariety((n,)) for n in range(params["n_max"] + 1)]
    for X in models:
        for p in params["p"]:
            steenrod.check_prop_st(X, p, report=report)
    if 2 in params["p"]:
        P4 = ModelVariety((4,))
        h = ChowElt.hyperplane(P4, 0, 2)
        tp, s3 = steenrod.T_prime_component(3, h, 2), steenrod.S_component(3, h, 2)
        ok = tp == h**4 and not s3
        report.case(ok, "witness P4 p=2: T'_3(h) = h^4, S_3(h) = 0", render_poly(tp), render_poly(s3))
    return report


@register(
    "prop-tr",
    "T'[X] = r(-T_X)[X] and T_i equals the homological T'_i",
    p=(_P, [2, 3]),
    variety=(_VAR, None),
    max_dim=(_NAT("max_dim"), 6),
)
def _prop_tr(params, seed):
    report = CheckReport("prop-tr")
    for X in _models(params, 6):
        for p in params["p"]:
            steenrod.check_prop_tr_smooth(X, p, report)
    return report


# degree -------------------------------------------------------------------------


@register(
    "degf",
    "degree formula, index bound and correspondence verdicts on records",
    p=(_P, [2, 3, 5]),
    max_dim=(_NAT("max_dim"), 8),
    records=(str, None),
)
def _degf(params, seed):
    report = CheckReport("degf")
    for p in params["p"]:
        for X in all_models(min(params["max_dim"], p * (p - 1))):
            if X.dim == 0 or X.dim % (p - 1):
                continue
            r = degree.VarietyRecord(X.name, X.dim, int(euler_characteristic(KHomElt.structure_sheaf(X))), 1)
            v = degree.check_index_bound(r, p)
            report.case(v["verdict"] != degree.VIOLATES, f"{r.name} p={p} index bound", v["verdict"])
            m = degree.MorphismRecord(r.name, r.name, 1)
            v = degree.check_degree_formula(m, {r.name: r}, p)
            report.case(v["verdict"] == degree.CONSISTENT, f"{r.name} p={p} identity degree formula", v["verdict"])
        for s in range(20):
            rng = case_rng(seed, "degf", p, s)
            i = rand_int(rng, 1, p)
            dim = i * (p - 1)
            r = degree.VarietyRecord("X", dim, rand_int(rng, -50, 50), p ** rand_int(rng, 0, 3) * rand_int(rng, 1, 4))
            base = degree.t_p_class(r, p)
            mod = degree.index_p_part(r, p)
            shifted = degree.t_p_class(degree.VarietyRecord("X", dim, r.chi + mod * rand_int(rng, -5, 5), r.index), p)
            report.case(base == shifted, f"p={p} s={s} t_p invariant under chi -> chi + n_X(p) k")
            # ruled-out correspondences contradict the degree formula for every degree prime to p
            Y = degree.VarietyRecord("Y", dim, p * rand_int(rng, 1, 9), p ** rand_int(rng, i, i + 2))
            chi_x = p * rand_int(rng, 0, 9) + rand_int(rng, 1, p - 1)
            Xr = degree.VarietyRecord("X", dim, chi_x, p ** rand_int(rng, i, vp(Y.index, p)))
            if degree.correspondence_verdict(Xr, Y, p)["verdict"] == degree.NO_CORRESPONDENCE:
                recs = {"X": Xr, "Y": Y}
                for deg in (d for d in range(1, 3 * p) if d % p):
                    v = degree.check_degree_formula(degree.MorphismRecord("X", "Y", deg), recs, p)
                    report.case(v["verdict"] == degree.VIOLATES, f"p={p} s={s} deg={deg} correspondence", v["verdict"])
        if "records" in params:
            varieties, morphisms = degree.load_records(params["records"])
            for v in degree.evaluate(varieties, morphisms, p):
                report.case(not degree.is_failure(v), f"p={p} {v['subject']}", v["verdict"])
                report.data.append(v)
    return report
