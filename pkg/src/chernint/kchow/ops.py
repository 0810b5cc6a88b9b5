"""Chern character, genera, Adams and Bott operations on model varieties."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from ..exactnum import binomial
from ..series import TruncSeries, todd_series
from .elements import ChowElt, KCohElt, KHomElt, VirtualBundle
from .variety import ModelVariety


def hom_to_coh(x: KHomElt) -> KCohElt:
    """[[I]] -> prod_j (1 - t_j)^(n_j - i_j) (Koszul resolution)."""
    dims = x.variety.dims
    return KCohElt(x.variety, {tuple(n - i for n, i in zip(dims, idx)): c for idx, c in x.terms.items()})


def coh_to_hom(y: KCohElt) -> KHomElt:
    if y.mod is not None:
        raise ValueError("K'_0 elements carry rational coefficients")
    dims = y.variety.dims
    return KHomElt(y.variety, {tuple(n - m for n, m in zip(dims, e)): c for e, c in y.terms.items()})


def filtration_level(x: KHomElt) -> int:
    if not x.terms:
        raise ValueError("filtration level of zero is undefined")
    return max(sum(idx) for idx in x.terms)


def tangent_class(variety: ModelVariety) -> VirtualBundle:
    """Euler-sequence tangent class sum_j ((n_j + 1) O_j(1) - O)."""
    k = variety.nfactors
    out = VirtualBundle.zero(variety)
    for j, n in enumerate(variety.dims):
        e = tuple(1 if i == j else 0 for i in range(k))
        out = out + VirtualBundle.line(variety, e, n + 1) - VirtualBundle.trivial(variety)
    return out


@lru_cache(maxsize=None)
def _one_minus_exp_power(n: int, m: int) -> tuple:
    """Coefficients of (1 - e^(-h))^m modulo h^(n+1)."""
    base = TruncSeries([0] + [Fraction((-1) ** (k + 1), factorial(k)) for k in range(1, n + 1)])
    return (base**m).coeffs


def ch_coh(x: KCohElt) -> ChowElt:
    """Ring map K_0 -> CH_Q with t_j -> e^(-h_j)."""
    if x.mod is not None:
        raise ValueError("the Chern character needs rational coefficients")
    X = x.variety
    acc = ChowElt.zero(X)
    for e, c in x.terms.items():
        factors = [_one_minus_exp_power(n, m) for n, m in zip(X.dims, e)]
        acc = acc + ChowElt.from_factors(X, factors).scale(c)
    return acc


def first_chern(variety: ModelVariety, twist, mod=None) -> ChowElt:
    return ChowElt(
        variety,
        {tuple(1 if i == j else 0 for i in range(variety.nfactors)): a for j, a in enumerate(twist)},
        mod,
    )


def genus_apply(Q: TruncSeries, u: VirtualBundle) -> ChowElt:
    """Multiplicative class with value Q(c_1(L)) on line bundles."""
    X = u.variety
    if Q[0] != 1:
        raise ValueError("genus series must have constant term 1")
    if Q.order < X.dim:
        raise ValueError(f"series truncated at {Q.order} but dim {X} = {X.dim}")
    one = ChowElt.one(X, Q.mod)
    result = one
    Qt = Q.truncate(X.dim)
    for a, m in u.parts.items():
        if not any(a):
            continue
        result = result * (Qt**m).evaluate(first_chern(X, a, Q.mod), one)
    return result


def todd_class(u: VirtualBundle) -> ChowElt:
    return genus_apply(todd_series(u.variety.dim), u)


@lru_cache(maxsize=None)
def todd_tangent(variety: ModelVariety) -> ChowElt:
    return todd_class(tangent_class(variety))


def adams_coh(l: int, x: KCohElt) -> KCohElt:
    """Ring endomorphism sending each line bundle to its l-th power."""
    if l == 0:
        raise ValueError("Adams operation needs l != 0")
    X = x.variety
    k = X.nfactors
    images = []
    for j in range(k):
        e = tuple(-l if i == j else 0 for i in range(k))
        # u_j = 1 - t_j goes to 1 - t_j^l, and t_j^l = O(-l e_j)
        images.append(KCohElt.one(X, x.mod) - KCohElt.line_bundle(X, e, x.mod))
    return x.map_monomials(images)


def _theta_line(X, twist, l) -> KCohElt:
    if l > 0:
        terms = [KCohElt.line_bundle(X, tuple(-m * a for a in twist)) for m in range(l)]
        sign = 1
    else:
        # t^l(x) = (1 - x^l)/(1 - x) = -(x^-1 + ... + x^l) for l < 0, x = [O(-a)]
        terms = [KCohElt.line_bundle(X, tuple(m * a for a in twist)) for m in range(1, -l + 1)]
        sign = -1
    acc = KCohElt.zero(X)
    for t in terms:
        acc = acc + t
    return acc.scale(sign)


def bott_theta(l: int, u: VirtualBundle) -> KCohElt:
    """Bott's class: theta^l(L) = t^l([L^dual]), multiplicative."""
    if l == 0:
        raise ValueError("Bott class needs l != 0")
    X = u.variety
    result = KCohElt.one(X)
    for a, m in u.parts.items():
        result = result * _theta_line(X, a, l) ** m
    return result


@lru_cache(maxsize=None)
def _ch_hom_basis(variety: ModelVariety, idx: tuple) -> ChowElt:
    return todd_tangent(variety) * ch_coh(hom_to_coh(KHomElt.basis(variety, idx)))


def ch_hom_total(x: KHomElt) -> ChowElt:
    """Td(T_X) . ch(x) as a single (inhomogeneous) class."""
    acc = ChowElt.zero(x.variety)
    for idx, c in x.terms.items():
        acc = acc + _ch_hom_basis(x.variety, idx).scale(c)
    return acc


def ch_hom(x: KHomElt) -> list[ChowElt]:
    """Homological Chern character; entry i is the dimension-i component."""
    total = ch_hom_total(x)
    return [total.component_dim(i) for i in range(x.variety.dim + 1)]


def adams_hom(l: int, x: KHomElt) -> KHomElt:
    """psi_l(x) = theta^l(-T_X) . psi^l(x)."""
    if l == 0:
        raise ValueError("Adams operation needs l != 0")
    X = x.variety
    return coh_to_hom(bott_theta(l, -tangent_class(X)) * adams_coh(l, hom_to_coh(x)))


def euler_characteristic(x: KHomElt) -> Fraction:
    return ch_hom_total(x).degree()


def chi_line_bundle_projective(n: int, a: int) -> int:
    """chi(P^n, O(a)) = C(n + a, n), valid for every integer a."""
    return binomial(n + a, n)


def euler_characteristic_binomial(x: KHomElt) -> Fraction:
    """Euler characteristic from the binomial formula; no Chern character."""
    X = x.variety
    total = Fraction(0)
    for e, c in hom_to_coh(x).terms.items():
        term = Fraction(c)
        for n, m in zip(X.dims, e):
            # (1 - t)^m = sum_k C(m, k) (-1)^k O(-k)
            term *= sum(binomial(m, k) * (-1) ** k * chi_line_bundle_projective(n, -k) for k in range(m + 1))
        total += term
    return total


def external_product(x, y):
    """x (on X) times y (on Y) on X x Y; exponents/indices concatenate."""
    if type(x) is not type(y):
        raise TypeError(f"cannot take external product of {type(x).__name__} and {type(y).__name__}")
    Z = x.variety * y.variety
    if isinstance(x, KHomElt):
        return KHomElt(Z, {a + b: c * d for a, c in x.terms.items() for b, d in y.terms.items()})
    if isinstance(x, VirtualBundle):
        raise TypeError("use pullbacks for bundles on products")
    if x.mod != y.mod:
        raise ValueError("coefficient rings differ")
    return type(x)(Z, {a + b: c * d for a, c in x.terms.items() for b, d in y.terms.items()}, x.mod)
