"""Mod-p operations T_i, T^i and the Steenrod action on model Chow rings.

Homological T_i is built two ways: from p^i ch_{q-i(p-1)} of a K'_0 lift,
and from the r^(p) genus of the normal data of linear cycles pushed
forward. The reference Steenrod action is the ring endomorphism
S(h) = h + h^p; its homological version on CH_*(X) twists by the genus of
W(x) = 1 + x^(p-1) evaluated on -T_X.
"""

from __future__ import annotations

from functools import lru_cache

from .exactnum import check_prime
from .integrality import r_class, reduce_mod_p_lattice
from .kchow import (
    ChowElt,
    KHomElt,
    ModelVariety,
    Morphism,
    VirtualBundle,
    ch_hom_total,
    external_product,
    genus_apply,
    tangent_class,
)
from .render import render_poly
from .report import CheckReport, case_rng, rand_int
from .series import w_series


def _as_mod_p(x: ChowElt, p: int) -> ChowElt:
    return x.reduce_mod(p) if x.mod is None else x


def _lift(x: ChowElt, p: int) -> KHomElt:
    """K'_0 lift of a cycle: [L_I] -> [[I]] on integer representatives."""
    x = _as_mod_p(x, p)
    dims = x.variety.dims
    return KHomElt(x.variety, {tuple(n - e for n, e in zip(dims, exp)): c for exp, c in x.terms.items()})


def _homogeneous(x: ChowElt) -> int:
    cs = x.codims()
    if len(cs) > 1:
        raise ValueError("T_i is defined on homogeneous cycles; split the class first")
    return x.variety.dim - cs[0]


def T_construct(i: int, x: ChowElt, p: int) -> ChowElt:
    """T_i(x) = p^i ch_{q-i(p-1)}(lift of x), reduced mod p."""
    check_prime(p)
    X = x.variety
    x = _as_mod_p(x, p)
    if i < 0:
        raise ValueError("i must be >= 0")
    if not x:
        return ChowElt.zero(X, p)
    q = _homogeneous(x)
    if i == 0:
        return x
    target = q - i * (p - 1)
    if target < 0:
        return ChowElt.zero(X, p)
    comp = ch_hom_total(_lift(x, p)).component_dim(target)
    return reduce_mod_p_lattice(comp.scale(p**i), p)


def T_construct_lift(i: int, lift: KHomElt, q: int, p: int) -> ChowElt:
    """Same map evaluated on an arbitrary element of K'_0 filtration q."""
    X = lift.variety
    target = q - i * (p - 1)
    if target < 0:
        return ChowElt.zero(X, p)
    return reduce_mod_p_lattice(ch_hom_total(lift).component_dim(target).scale(p**i), p)


@lru_cache(maxsize=None)
def _r_total(variety: ModelVariety, p: int, sign: int) -> ChowElt:
    return r_class(tangent_class(variety) * sign, p)


def T_via_genus(i: int, dims, X: ModelVariety, p: int) -> ChowElt:
    """Push forward r_i^(p)(-T_L) . [L] along the linear cycle L = prod P^{i_j}."""
    check_prime(p)
    f = Morphism.linear_embedding(dims, X)
    L = f.source
    on_L = _r_total(L, p, -1).component(i * (p - 1))
    return f.push_chow(on_L)


def T_via_genus_linear(i: int, x: ChowElt, p: int) -> ChowElt:
    X = x.variety
    x = _as_mod_p(x, p)
    acc = ChowElt.zero(X, p)
    for e, c in x.terms.items():
        dims = tuple(n - a for n, a in zip(X.dims, e))
        acc = acc + T_via_genus(i, dims, X, p).scale(c)
    return acc


def T_hom(i: int, x: ChowElt, p: int) -> ChowElt:
    """Homological T_i on an arbitrary (possibly inhomogeneous) class."""
    x = _as_mod_p(x, p)
    acc = ChowElt.zero(x.variety, p)
    for _, part in x.homogeneous_parts():
        acc = acc + T_construct(i, part, p)
    return acc


def r_component_mod(u: VirtualBundle, j: int, p: int) -> ChowElt:
    return r_class(u, p).component(j * (p - 1))


def T_coh(i: int, x: ChowElt, p: int) -> ChowElt:
    """Cohomological T^i = sum_j r_j^(p)(T_X) . T_{i-j}."""
    X = x.variety
    x = _as_mod_p(x, p)
    r = _r_total(X, p, 1)
    acc = ChowElt.zero(X, p)
    for j in range(i + 1):
        rj = r.component(j * (p - 1))
        if rj:
            acc = acc + rj * T_hom(i - j, x, p)
    return acc


# Steenrod action ----------------------------------------------------------------


def total_S(x: ChowElt, p: int) -> ChowElt:
    """Ring endomorphism with h_j -> h_j + h_j^p."""
    x = _as_mod_p(x, p)
    X = x.variety
    images = [ChowElt.hyperplane(X, j, p) + ChowElt.hyperplane(X, j, p) ** p for j in range(X.nfactors)]
    return x.map_monomials(images)


@lru_cache(maxsize=None)
def _wu_class(X: ModelVariety, p: int) -> ChowElt:
    return genus_apply(w_series(p, X.dim), -tangent_class(X))


def total_S_hom(x: ChowElt, p: int) -> ChowElt:
    """Homological action: S(a . [X]) = S(a) . w(-T_X) . [X]."""
    x = _as_mod_p(x, p)
    return total_S(x, p) * _wu_class(x.variety, p)


def _graded_piece(total_fn, i: int, x: ChowElt, p: int) -> ChowElt:
    acc = ChowElt.zero(x.variety, p)
    for c, part in x.homogeneous_parts():
        acc = acc + total_fn(part, p).component(c + i * (p - 1))
    return acc


def S_component(i: int, x: ChowElt, p: int, homological: bool = False) -> ChowElt:
    return _graded_piece(total_S_hom if homological else total_S, i, _as_mod_p(x, p), p)


@lru_cache(maxsize=None)
def _Tprime_monomial(X: ModelVariety, p: int, i: int, exp: tuple, homological: bool) -> ChowElt:
    # T'_i = -sum_{j=1}^i T'_{i-j} o S_j, T'_0 = id
    x = ChowElt.monomial(X, exp, 1, p)
    if i == 0:
        return x
    acc = ChowElt.zero(X, p)
    for j in range(1, i + 1):
        sj = S_component(j, x, p, homological)
        for e, c in sj.terms.items():
            acc = acc - _Tprime_monomial(X, p, i - j, e, homological).scale(c)
    return acc


def T_prime_component(i: int, x: ChowElt, p: int, homological: bool = False) -> ChowElt:
    x = _as_mod_p(x, p)
    acc = ChowElt.zero(x.variety, p)
    for e, c in x.terms.items():
        acc = acc + _Tprime_monomial(x.variety, p, i, e, homological).scale(c)
    return acc


def total_T_prime(x: ChowElt, p: int, homological: bool = False) -> ChowElt:
    """Left inverse of the total Steenrod operation, via the T'_i recursion."""
    x = _as_mod_p(x, p)
    X = x.variety
    acc = ChowElt.zero(X, p)
    for i in range(X.dim // (p - 1) + 1):
        acc = acc + T_prime_component(i, x, p, homological)
    return acc


def reduced_steenrod(n: int, x: ChowElt, p: int, homological: bool = False) -> ChowElt:
    """S_n = -sum_{i=1}^n T_i o S_{n-i}, S_0 = id.

    Uses T^i (cohomological) by default and T_i for ``homological``.
    """
    x = _as_mod_p(x, p)
    T = T_hom if homological else T_coh
    levels = [x]
    for m in range(1, n + 1):
        acc = ChowElt.zero(x.variety, p)
        for i in range(1, m + 1):
            acc = acc - T(i, levels[m - i], p)
        levels.append(acc)
    return levels[n]


# checks ---------------------------------------------------------------------------


def paper_certified(i: int, p: int) -> bool:
    """i lies in the range where integrality is known in every characteristic."""
    return i * (p - 1) <= p * (p - 1) - 1


def basis_cycles(X: ModelVariety, p: int | None = None) -> list[ChowElt]:
    return [ChowElt.monomial(X, e, 1, p) for e in X.monomials]


def valid_indices(q: int, p: int) -> range:
    return range(q // (p - 1) + 1)


def check_pipelines(X: ModelVariety, p: int, report: CheckReport | None = None) -> CheckReport:
    report = report or CheckReport("pipelines-agree", {"variety": X.name, "p": p})
    for x in basis_cycles(X, p):
        q = _homogeneous(x)
        dims = tuple(n - e for n, e in zip(X.dims, next(iter(x.terms))))
        for i in valid_indices(q, p):
            a = T_construct(i, x, p)
            b = T_via_genus(i, dims, X, p)
            report.case(a == b, f"{X.name} p={p} [L{dims}] i={i}", render_poly(a), render_poly(b))
    return report


def check_well_defined(X: ModelVariety, p: int, samples: int = 100, seed: int = 0, report=None) -> CheckReport:
    """Perturbing the lift by filtration q-1 does not change T_i mod p."""
    from .integrality import random_khom

    report = report or CheckReport("well-defined", {"variety": X.name, "p": p}, seed=seed)
    cycles = [x for x in basis_cycles(X, p) if _homogeneous(x) > 0]
    for s in range(samples):
        if not cycles:
            break
        rng = case_rng(seed, "well-defined", p, *X.dims, s)
        x = cycles[rand_int(rng, 0, len(cycles) - 1)]
        q = _homogeneous(x)
        lower = [idx for idx in X.monomials if sum(idx) <= q - 1]
        delta = random_khom(X, rng)
        delta = KHomElt(X, {idx: c for idx, c in delta.terms.items() if sum(idx) <= q - 1})
        if not delta and lower:
            delta = KHomElt.basis(X, lower[0], 1)
        lift = _lift(x, p)
        for i in range(1, q // (p - 1) + 1):
            a = T_construct_lift(i, lift, q, p)
            b = T_construct_lift(i, lift + delta, q, p)
            report.case(a == b, f"{X.name} p={p} s={s} i={i}", render_poly(a), render_poly(b))
    return report


def check_prop_coh_basic(X: ModelVariety, p: int, report: CheckReport | None = None) -> CheckReport:
    """T^0 = id, T^i[X] = 0 for i > 0, T^1(h) = -h^p and T^i(h) = 0 for i > 1."""
    report = report or CheckReport("prop-coh", {"variety": X.name, "p": p})
    imax = X.dim // (p - 1) + 1
    for x in basis_cycles(X, p):
        report.case(T_coh(0, x, p) == x, f"{X.name} p={p} T^0({render_poly(x)})")
    one = ChowElt.one(X, p)
    for i in range(1, imax + 1):
        v = T_coh(i, one, p)
        report.case(not v, f"{X.name} p={p} T^{i}[X]", render_poly(v), "0")
    divisors = [ChowElt.hyperplane(X, j, p) for j, n in enumerate(X.dims) if n > 0]
    if X.nfactors > 1 and all(n > 0 for n in X.dims):
        divisors.append(sum(divisors[1:], divisors[0]))
    for h in divisors:
        for i in range(1, imax + 1):
            v = T_coh(i, h, p)
            want = -(h**p) if i == 1 else ChowElt.zero(X, p)
            key = f"{X.name} p={p} T^{i}({render_poly(h)})"
            if i <= p:
                report.case(v == want, key, render_poly(v), render_poly(want))
            elif v != want:
                # r^(p) of a line bundle next contributes x^(p^2-1), i.e. at i = p+1
                report.data.append({"case": key, "value": render_poly(v)})
    return report


def check_cartan(x: ChowElt, y: ChowElt, i: int, p: int, report: CheckReport | None = None) -> CheckReport:
    """External Cartan formula for T_i and T^i; product formula for T^i when x, y share a variety."""
    report = report or CheckReport("cartan", {"p": p})
    x, y = _as_mod_p(x, p), _as_mod_p(y, p)
    key = f"p={p} i={i} x={render_poly(x)} on {x.variety} y={render_poly(y)} on {y.variety}"
    xy = external_product(x, y)
    Z = xy.variety
    for name, op in (("T", T_hom), ("Tc", T_coh)):
        lhs = op(i, xy, p)
        rhs = ChowElt.zero(Z, p)
        for j in range(i + 1):
            rhs = rhs + external_product(op(j, x, p), op(i - j, y, p))
        report.case(lhs == rhs, f"{name} external {key}", render_poly(lhs), render_poly(rhs))
    if x.variety == y.variety:
        lhs = T_coh(i, x * y, p)
        rhs = ChowElt.zero(x.variety, p)
        for j in range(i + 1):
            rhs = rhs + T_coh(j, x, p) * T_coh(i - j, y, p)
        report.case(lhs == rhs, f"Tc product {key}", render_poly(lhs), render_poly(rhs))
    return report


def check_riemann_roch_T(f: Morphism, i: int, p: int, extra=(), report: CheckReport | None = None) -> CheckReport:
    """Pullback/pushforward formulas for T_i and T^i along a supported morphism."""
    report = report or CheckReport("rr-T", {"morphism": str(f), "p": p, "i": i})
    X, Y = f.target, f.source
    Tf = f.relative_tangent()
    r_minus = r_class(-Tf, p)
    key = f"{f} p={p} i={i}"
    for x in basis_cycles(X, p) + [_as_mod_p(e, p) for e in extra if e.variety == X]:
        for part_c, part in x.homogeneous_parts():
            pulled = f.pull_chow(part)
            # homological: T_i f^* = sum_j r_j(-T_f) f^* T_{i-j}
            lhs = T_hom(i, pulled, p)
            rhs = ChowElt.zero(Y, p)
            for j in range(i + 1):
                rhs = rhs + r_minus.component(j * (p - 1)) * f.pull_chow(T_hom(i - j, part, p))
            report.case(lhs == rhs, f"{key} T_i f^* {render_poly(part)}", render_poly(lhs), render_poly(rhs))
            lhs = T_coh(i, pulled, p)
            rhs = f.pull_chow(T_coh(i, part, p))
            report.case(lhs == rhs, f"{key} T^i f^* {render_poly(part)}", render_poly(lhs), render_poly(rhs))
    for y in basis_cycles(Y, p) + [_as_mod_p(e, p) for e in extra if e.variety == Y]:
        lhs = T_coh(i, f.push_chow(y), p)
        inner = ChowElt.zero(Y, p)
        for j in range(i + 1):
            inner = inner + r_minus.component(j * (p - 1)) * T_coh(i - j, y, p)
        rhs = f.push_chow(inner)
        report.case(lhs == rhs, f"{key} T^i f_* {render_poly(y)}", render_poly(lhs), render_poly(rhs))
        lhs, rhs = T_hom(i, f.push_chow(y), p), f.push_chow(T_hom(i, y, p))
        report.case(lhs == rhs, f"{key} T_i f_* {render_poly(y)}", render_poly(lhs), render_poly(rhs))
    return report


def check_prop_st(X: ModelVariety, p: int, homological: bool = False, report=None) -> CheckReport:
    """T'_i = (-1)^i S_i for i <= p on every monomial; i = p + 1 recorded only."""
    report = report or CheckReport("prop-st", {"variety": X.name, "p": p, "homological": homological})
    for x in basis_cycles(X, p):
        for i in range(p + 2):
            lhs = T_prime_component(i, x, p, homological)
            rhs = S_component(i, x, p, homological).scale((-1) ** i)
            key = f"{X.name} p={p} {'hom' if homological else 'coh'} i={i} x={render_poly(x)}"
            if i <= p:
                report.case(lhs == rhs, key, render_poly(lhs), render_poly(rhs))
            elif lhs != rhs:
                note = f"outside range: {key}: T'={render_poly(lhs)} vs (-1)^i S={render_poly(rhs)}"
                report.data.append({"case": key, "Tprime": render_poly(lhs), "signed_S": render_poly(rhs)})
                if len(report.notes) < 20:
                    report.notes.append(note)
    return report


def check_prop_tr_smooth(X: ModelVariety, p: int, report=None) -> CheckReport:
    """T'[X] = r^(p)(-T_X)[X]; T_i agrees with homological T'_i on every cycle."""
    report = report or CheckReport("prop-tr", {"variety": X.name, "p": p})
    lhs = total_T_prime(ChowElt.one(X, p), p, homological=True)
    rhs = _r_total(X, p, -1)
    report.case(lhs == rhs, f"{X.name} p={p} T'[X]", render_poly(lhs), render_poly(rhs))
    for x in basis_cycles(X, p):
        for i in valid_indices(_homogeneous(x), p):
            a, b = T_construct(i, x, p), T_prime_component(i, x, p, homological=True)
            report.case(a == b, f"{X.name} p={p} i={i} x={render_poly(x)}", render_poly(a), render_poly(b))
    return report


def random_mod_p_class(X: ModelVariety, p: int, rng, homogeneous: bool = True) -> ChowElt:
    if homogeneous:
        c = rand_int(rng, 0, X.dim)
        monos = X.monomials_of_codim(c)
    else:
        monos = list(X.monomials)
    terms = {}
    for e in monos:
        if rand_int(rng, 0, 2):
            terms[e] = rand_int(rng, 1, p - 1)
    if not terms:
        terms[monos[rand_int(rng, 0, len(monos) - 1)]] = 1
    return ChowElt(X, terms, p)
