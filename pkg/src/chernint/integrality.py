"""Valuation and integrality checks for the Chern character on model varieties."""

from __future__ import annotations

from fractions import Fraction

from .exactnum import INFINITY, a_p, check_prime, primitive_root_mod_p2, to_mod
from .kchow import (
    ChowElt,
    KCohElt,
    KHomElt,
    ModelVariety,
    VirtualBundle,
    adams_coh,
    adams_hom,
    bott_theta,
    ch_coh,
    ch_hom,
    filtration_level,
    todd_class,
    todd_tangent,
)
from .report import CheckReport, case_rng, rand_int
from .render import render_khom, render_poly
from .series import r_series
from .kchow.ops import genus_apply


class NotInLattice(ValueError):
    """Raised when a class has negative p-adic valuation."""


def reduce_mod_p_lattice(x: ChowElt, p: int) -> ChowElt:
    """Image of a p-integral rational class in CH (x) Z/p (Chow groups here are free)."""
    check_prime(p)
    if x.mod is not None:
        raise ValueError("expected a rational class")
    v = x.vp(p)
    if v < 0:
        raise NotInLattice(f"v_{p} = {v} < 0: class is not in the Z_({p}) lattice")
    return ChowElt(x.variety, {e: to_mod(c, p) for e, c in x.terms.items()}, p)


def floor_bound(n: int, p: int) -> int:
    """-[n/(p-1)]"""
    return -(n // (p - 1))


# Adams operations vs Chern character ------------------------------------------


def check_chpsi(X: ModelVariety, l: int, x: KHomElt, report: CheckReport | None = None) -> CheckReport:
    """ch_n(psi_l x) = l^-n ch_n(x) for every n."""
    report = report or CheckReport("chpsi", {"variety": X.name, "l": l})
    lhs = ch_hom(adams_hom(l, x))
    rhs = ch_hom(x)
    for n in range(X.dim + 1):
        want = rhs[n].scale(Fraction(1, l) ** n)
        report.case(
            lhs[n] == want,
            f"{X.name} l={l} x={render_khom(x)} n={n}",
            render_poly(lhs[n]),
            render_poly(want),
        )
    return report


def check_graded(X: ModelVariety, l: int, x: KHomElt, report: CheckReport | None = None) -> CheckReport:
    """psi_l(x) - l^-d x lies in filtration d - 1."""
    report = report or CheckReport("graded", {"variety": X.name, "l": l})
    d = filtration_level(x)
    diff = adams_hom(l, x) - x.scale(Fraction(1, l) ** d)
    level = filtration_level(diff) if diff else -1
    report.case(level <= d - 1, f"{X.name} l={l} x={render_khom(x)}", f"level {level}", f"<= {d - 1}")
    return report


def integrality_valuations(x: KHomElt, p: int, n_max: int | None = None) -> list[tuple[int, object, int]]:
    """(n, v_p(ch_{d-n}(x)), -[n/(p-1)]) for n = 0..n_max."""
    d = filtration_level(x)
    if n_max is None:
        n_max = d
    if n_max > d:
        raise ValueError(f"n_max = {n_max} exceeds filtration level {d}")
    comps = ch_hom(x)
    return [(n, comps[d - n].vp(p), floor_bound(n, p)) for n in range(n_max + 1)]


def check_integrality(
    X: ModelVariety,
    p: int,
    x: KHomElt,
    n_max: int | None = None,
    strict_paper_range: bool = False,
    report: CheckReport | None = None,
    label: str = "",
) -> CheckReport:
    """v_p(ch_{d-n}(x)) >= -[n/(p-1)] for n <= n_max.

    With ``strict_paper_range`` only n < p(p-1) is examined; otherwise all
    n <= d, which holds on these l.c.i. models.
    """
    check_prime(p)
    report = report or CheckReport("mainvp", {"variety": X.name, "p": p, "strict_paper_range": strict_paper_range})
    for n, v, bound in integrality_valuations(x, p, n_max):
        if strict_paper_range and n >= p * (p - 1):
            continue
        report.data.append({"case": label, "n": n, "vp": "inf" if v == INFINITY else v, "bound": bound})
        scope = "certified" if n < p * (p - 1) else "lci"
        key = f"{X.name} p={p} {label or render_khom(x)} n={n} [{scope}]"
        report.case(v >= bound, key, f"vp={v}", f">= {bound}")
    return report


def replay_mainvp(X: ModelVariety, p: int, x: KHomElt, report: CheckReport | None = None) -> CheckReport:
    """Re-derive the valuation bound through psi_l(x) = l^-d x + l^(-d-m) alpha.

    Uses l = primitive root mod p^2 and checks, for 0 < n < p(p-1) and n <= d,
    l^m (l^n - 1) ch_{d-n}(x) = ch_{d-n}(alpha) and
    v_p(ch_{d-n}(alpha)) = v_p(ch_{d-n}(x)) + a_p(n).
    """
    report = report or CheckReport("mainvp-replay", {"variety": X.name, "p": p})
    if not x.is_integral():
        raise ValueError("replay needs an integral class")
    l = primitive_root_mod_p2(p)
    d = filtration_level(x)
    diff = adams_hom(l, x) - x.scale(Fraction(1, l) ** d)
    # smallest m >= 0 with l^(d+m) diff integral
    m = 0
    while not diff.scale(l ** (d + m)).is_integral():
        m += 1
    alpha = diff.scale(l ** (d + m))
    key = f"{X.name} p={p} l={l} x={render_khom(x)}"
    report.case(not alpha or filtration_level(alpha) <= d - 1, key + " alpha-level")
    cx, ca = ch_hom(x), ch_hom(alpha) if alpha else None
    for n in range(1, min(d, p * (p - 1) - 1) + 1):
        lhs = cx[d - n].scale(l**m * (l**n - 1))
        rhs = ca[d - n] if ca else ChowElt.zero(X)
        report.case(lhs == rhs, key + f" n={n} relation", render_poly(lhs), render_poly(rhs))
        vx, va = cx[d - n].vp(p), rhs.vp(p)
        report.case(va == vx + a_p(n, p), key + f" n={n} valuation", va, f"{vx} + {a_p(n, p)}")
    return report


def check_lci_integrality(X: ModelVariety, p: int | None = None, report: CheckReport | None = None) -> CheckReport:
    """tau_n times the dimension-(dim - n) part of Td(T_X) is integral."""
    from .exactnum import todd_number

    report = report or CheckReport("lci-integrality", {"variety": X.name})
    td = todd_tangent(X)
    for n in range(X.dim + 1):
        scaled = td.component(n).scale(todd_number(n))
        integral = all(Fraction(c).denominator == 1 for c in scaled.terms.values())
        if p is not None:
            integral = integral and scaled.vp(p) >= 0
        report.case(integral, f"{X.name} n={n}", render_poly(scaled))
    return report


def check_toddvp(u: VirtualBundle, p: int, X: ModelVariety | None = None, report: CheckReport | None = None) -> CheckReport:
    """v_p(Td^n(u)) >= -[n/(p-1)]."""
    X = X or u.variety
    report = report or CheckReport("toddvp", {"variety": X.name, "p": p})
    td = todd_class(u)
    for n in range(X.dim + 1):
        v = td.component(n).vp(p)
        report.case(v >= floor_bound(n, p), f"{X.name} p={p} u={u!r} n={n}", f"vp={v}", f">= {floor_bound(n, p)}")
    return report


def r_class(u: VirtualBundle, p: int) -> ChowElt:
    """Total mod-p class r^(p)(u) (genus of sum (-1)^i x^(p^i - 1))."""
    return genus_apply(r_series(p, u.variety.dim), u)


def r_component(u: VirtualBundle, j: int, p: int) -> ChowElt:
    return r_class(u, p).component(j * (p - 1))


def check_toddp(u: VirtualBundle, p: int, X: ModelVariety | None = None, report: CheckReport | None = None) -> CheckReport:
    """p^j Td^{j(p-1)}(-u) and r_j^(p)(u) agree in CH (x) Z/p."""
    X = X or u.variety
    report = report or CheckReport("toddp", {"variety": X.name, "p": p})
    td = todd_class(-u)
    r = r_class(u, p)
    j = 0
    while j * (p - 1) <= X.dim:
        lhs_q = td.component(j * (p - 1)).scale(p**j)
        key = f"{X.name} p={p} u={u!r} j={j}"
        try:
            lhs = reduce_mod_p_lattice(lhs_q, p)
        except NotInLattice as exc:
            report.case(False, key, "not p-integral", str(exc))
        else:
            rhs = r.component(j * (p - 1))
            report.case(lhs == rhs, key, render_poly(lhs), render_poly(rhs))
        j += 1
    return report


# Todd class vs Adams and Bott operations ---------------------------------------


def check_tdpsi(u: VirtualBundle, l: int, report: CheckReport | None = None) -> CheckReport:
    """Td(-u) ch(theta^l(u)) = l^rank(u) Td(-psi^l(u))."""
    report = report or CheckReport("tdpsi", {"l": l})
    lhs = todd_class(-u) * ch_coh(bott_theta(l, u))
    rhs = todd_class(-u.adams(l)).scale(Fraction(l) ** u.rank)
    report.case(lhs == rhs, f"{u.variety.name} l={l} u={u!r}", render_poly(lhs), render_poly(rhs))
    return report


def check_tdpsi2(u: VirtualBundle, l: int, report: CheckReport | None = None) -> CheckReport:
    """Td(psi^l(-u)) = sum_i l^i Td^i(-u)."""
    report = report or CheckReport("tdpsi2", {"l": l})
    lhs = todd_class((-u).adams(l))
    rhs = todd_class(-u).shift_scale(lambda c: l**c)
    report.case(lhs == rhs, f"{u.variety.name} l={l} u={u!r}", render_poly(lhs), render_poly(rhs))
    return report


def check_tdpsi3(x: KCohElt, l: int, report: CheckReport | None = None) -> CheckReport:
    """ch(psi^l x) = sum_j l^j ch^j(x)."""
    report = report or CheckReport("tdpsi3", {"l": l})
    lhs = ch_coh(adams_coh(l, x))
    rhs = ch_coh(x).shift_scale(lambda c: l**c)
    report.case(lhs == rhs, f"{x.variety.name} l={l} x={render_poly(x)}", render_poly(lhs), render_poly(rhs))
    return report


def tdpsi_sweep(models, ls, samples: int = 50, seed: int = 0) -> CheckReport:
    report = CheckReport("tdpsi", {"models": [X.name for X in models], "l": list(ls), "samples": samples}, seed=seed)
    for X in models:
        for s in range(samples):
            rng = case_rng(seed, "tdpsi", *X.dims, s)
            u = random_bundle(X, rng)
            for l in ls:
                check_tdpsi(u, l, report)
                check_tdpsi2(u, l, report)
                check_tdpsi3(u.to_kcoh(), l, report)
    return report


# random inputs ----------------------------------------------------------------


def random_khom(X: ModelVariety, rng, max_terms: int = 6, coeff: int = 9) -> KHomElt:
    basis = list(X.monomials)
    k = rand_int(rng, 1, min(max_terms, len(basis)))
    picks = rng.choice(len(basis), size=k, replace=False)
    terms = {}
    for i in picks:
        c = 0
        while c == 0:
            c = rand_int(rng, -coeff, coeff)
        terms[basis[int(i)]] = c
    return KHomElt(X, terms)


def random_bundle(X: ModelVariety, rng, max_parts: int = 4, twist: int = 3, mult: int = 3) -> VirtualBundle:
    parts = {}
    for _ in range(rand_int(rng, 1, max_parts)):
        a = tuple(rand_int(rng, -twist, twist) for _ in range(X.nfactors))
        m = rand_int(rng, -mult, mult)
        parts[a] = parts.get(a, 0) + m
    return VirtualBundle(X, parts)


def basis_elements(X: ModelVariety) -> list[KHomElt]:
    return [KHomElt.basis(X, idx) for idx in X.monomials]


# sweeps -----------------------------------------------------------------------


def mainvp_sweep(models, primes, samples: int = 100, seed: int = 0) -> CheckReport:
    report = CheckReport(
        "mainvp", {"models": [X.name for X in models], "primes": list(primes), "samples": samples}, seed=seed
    )
    for X in models:
        elements = [(render_khom(b), b) for b in basis_elements(X)]
        for s in range(samples):
            rng = case_rng(seed, "mainvp", *X.dims, s) if X.dims else case_rng(seed, "mainvp", s)
            elements.append((f"random#{s}", random_khom(X, rng)))
        for label, x in elements:
            if not x:
                continue
            for p in primes:
                sub = check_integrality(X, p, x, label=label)
                report.cases += sub.cases
                report.failures.extend(sub.failures)
    return report


def chpsi_sweep(models, ls, report_id: str = "chpsi") -> CheckReport:
    report = CheckReport(report_id, {"models": [X.name for X in models], "l": list(ls)})
    for X in models:
        for x in basis_elements(X):
            for l in ls:
                if report_id == "chpsi":
                    check_chpsi(X, l, x, report)
                else:
                    check_graded(X, l, x, report)
    return report
