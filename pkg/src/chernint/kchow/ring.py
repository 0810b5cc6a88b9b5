"""Truncated polynomial ring Z[y_1..y_k]/(y_j^(n_j+1)) shared by Chow and K_0."""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from ..exactnum import check_prime, to_mod, vp_module
from .variety import ModelVariety


def _norm_coeff(c, mod):
    if mod is None:
        return Fraction(c)
    return to_mod(c, mod)


class GradedPoly:
    """Element of the truncated polynomial ring attached to a model variety.

    ``terms`` maps exponent tuples to nonzero coefficients, rationals when
    ``mod`` is None and integers in [0, p) otherwise. Subclasses fix the
    meaning of the generators; elements of different subclasses never mix.
    """

    __slots__ = ("variety", "terms", "mod")

    def __init__(self, variety: ModelVariety, terms: Mapping | Iterable = (), mod: int | None = None):
        if mod is not None:
            check_prime(mod)
        _set = object.__setattr__
        _set(self, "variety", variety)
        _set(self, "mod", mod)
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        dims = variety.dims
        for e, c in items:
            e = tuple(e)
            if len(e) != len(dims):
                raise ValueError(f"exponent {e} does not match {variety}")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent {e}")
            if any(x > n for x, n in zip(e, dims)):
                continue
            out[e] = out.get(e, 0) + c
        norm = ((e, _norm_coeff(c, mod)) for e, c in out.items())
        _set(self, "terms", MappingProxyType({e: c for e, c in norm if c}))

    @classmethod
    def _raw(cls, variety, terms, mod):
        obj = object.__new__(cls)
        _set = object.__setattr__
        _set(obj, "variety", variety)
        _set(obj, "mod", mod)
        if mod is None:
            kept = {e: c for e, c in terms.items() if c}
        else:
            kept = {e: c % mod for e, c in terms.items() if c % mod}
        _set(obj, "terms", MappingProxyType(kept))
        return obj

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, variety, mod=None):
        return cls._raw(variety, {}, mod)

    @classmethod
    def one(cls, variety, mod=None):
        return cls(variety, {(0,) * variety.nfactors: 1}, mod)

    @classmethod
    def monomial(cls, variety, exp, coeff=1, mod=None):
        return cls(variety, {tuple(exp): coeff}, mod)

    @classmethod
    def generator(cls, variety, j, mod=None):
        e = [0] * variety.nfactors
        e[j] = 1
        return cls(variety, {tuple(e): 1}, mod)

    @classmethod
    def from_factors(cls, variety, factors, mod=None):
        """Tensor product of univariate coefficient lists, one per factor."""
        terms = {(): Fraction(1) if mod is None else 1}
        for poly in factors:
            new = {}
            for e, c in terms.items():
                for k, a in enumerate(poly):
                    if a:
                        new[e + (k,)] = c * a
            terms = new
        return cls(variety, terms, mod)

    # basic protocol -------------------------------------------------------

    def _compat(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.variety != self.variety:
            raise ValueError(f"varieties differ: {self.variety} vs {other.variety}")
        if other.mod != self.mod:
            raise ValueError(f"coefficient rings differ: {self.mod} vs {other.mod}")

    def _scalar(self, c):
        return self.one(self.variety, self.mod).scale(c)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._scalar(other)
        if type(other) is not type(self):
            return NotImplemented
        return self.variety == other.variety and self.mod == other.mod and self.terms == other.terms

    def __hash__(self):
        return hash((type(self).__name__, self.variety, self.mod, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._scalar(other)
        self._compat(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return self._raw(self.variety, out, self.mod)

    __radd__ = __add__

    def __neg__(self):
        return self._raw(self.variety, {e: -c for e, c in self.terms.items()}, self.mod)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _norm_coeff(c, self.mod)
        return self._raw(self.variety, {e: c * a for e, a in self.terms.items()}, self.mod)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._compat(other)
        dims = self.variety.dims
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x > n for x, n in zip(e, dims)):
                    continue
                out[e] = out.get(e, 0) + c1 * c2
        return self._raw(self.variety, out, self.mod)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.one(self.variety, self.mod)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # grading --------------------------------------------------------------

    def constant_term(self):
        return self.terms.get((0,) * self.variety.nfactors, 0)

    def component(self, codim: int):
        return self._raw(self.variety, {e: c for e, c in self.terms.items() if sum(e) == codim}, self.mod)

    def codims(self) -> list[int]:
        return sorted({sum(e) for e in self.terms})

    def homogeneous_parts(self):
        return [(c, self.component(c)) for c in self.codims()]

    def is_homogeneous(self) -> bool:
        return len(self.codims()) <= 1

    def shift_scale(self, weight):
        """Multiply the codim-c component by weight(c)."""
        return self._raw(
            self.variety, {e: c * weight(sum(e)) for e, c in self.terms.items()}, self.mod
        )

    def inverse(self):
        """Inverse of a unit: invertible constant term plus nilpotent rest."""
        c0 = self.constant_term()
        if not c0:
            raise ZeroDivisionError("constant term is not invertible")
        inv0 = Fraction(1) / c0 if self.mod is None else pow(c0, -1, self.mod)
        nil = self.scale(inv0) - 1
        result = self.one(self.variety, self.mod)
        power = result
        for _ in range(self.variety.dim):
            power = power * (-nil)
            if not power:
                break
            result = result + power
        return result.scale(inv0)

    def vp(self, p: int):
        return vp_module(self.terms.values(), p)

    def map_monomials(self, images, target_variety=None):
        """Ring map sending y_j to images[j] (elements of the target ring)."""
        target = target_variety or self.variety
        cls = type(self)
        acc = cls.zero(target, self.mod)
        cache: dict = {}
        for e, c in self.terms.items():
            term = cls.one(target, self.mod)
            for j, k in enumerate(e):
                if k:
                    key = (j, k)
                    if key not in cache:
                        cache[key] = images[j] ** k
                    term = term * cache[key]
            acc = acc + term.scale(c)
        return acc

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(t[0])))

    def __repr__(self):
        from ..render import render_poly

        return f"{type(self).__name__}[{self.variety}]({render_poly(self)})"
