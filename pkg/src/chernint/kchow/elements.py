"""Chow ring, K_0 and K'_0 elements of model varieties, and virtual bundles."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from ..exactnum import binomial
from .ring import GradedPoly
from .variety import ModelVariety


class ChowElt(GradedPoly):
    """Polynomial in hyperplane classes h_j with h_j^(n_j+1) = 0.

    The monomial h^e has codimension |e|; it is the class of the product of
    linear subspaces of dimensions n_j - e_j.
    """

    __slots__ = ()

    @classmethod
    def hyperplane(cls, variety, j, mod=None):
        return cls.generator(variety, j, mod)

    @classmethod
    def cycle(cls, variety, dims, coeff=1, mod=None):
        """Class [L_I] of a product of linear subspaces with dimensions I."""
        dims = tuple(dims)
        if len(dims) != variety.nfactors or any(not 0 <= i <= n for i, n in zip(dims, variety.dims)):
            raise ValueError(f"cycle dimensions {dims} do not fit {variety}")
        return cls.monomial(variety, tuple(n - i for n, i in zip(variety.dims, dims)), coeff, mod)

    @classmethod
    def point(cls, variety, mod=None):
        return cls.monomial(variety, variety.dims, 1, mod)

    @classmethod
    def fundamental(cls, variety, mod=None):
        return cls.one(variety, mod)

    def degree(self):
        """Degree of the dimension-0 component."""
        return self.terms.get(self.variety.dims, 0)

    def component_dim(self, i: int) -> "ChowElt":
        return self.component(self.variety.dim - i)

    def homological_dim(self) -> int:
        cs = self.codims()
        if len(cs) != 1:
            raise ValueError("element is not homogeneous (or is zero)")
        return self.variety.dim - cs[0]

    def reduce_mod(self, p: int) -> "ChowElt":
        if self.mod is not None:
            if self.mod != p:
                raise ValueError("cannot change the prime of a mod-p element")
            return self
        return ChowElt(self.variety, self.terms, p)

    def lift(self) -> "ChowElt":
        """Integer representatives of a mod-p element (identity over Q)."""
        if self.mod is None:
            return self
        return ChowElt(self.variety, self.terms, None)


class KCohElt(GradedPoly):
    """Element of K_0 in the basis prod_j (1 - t_j)^m_j, t_j = [O_j(-1)]."""

    __slots__ = ()

    @classmethod
    def line_bundle(cls, variety, twist, mod=None):
        """Class of O(a_1, ..., a_k) = prod_j t_j^(-a_j)."""
        twist = tuple(twist)
        if len(twist) != variety.nfactors:
            raise ValueError(f"twist {twist} does not match {variety}")
        factors = [
            [(-1) ** m * binomial(-a, m) for m in range(n + 1)] for a, n in zip(twist, variety.dims)
        ]
        return cls.from_factors(variety, factors, mod)

    @classmethod
    def t(cls, variety, j, mod=None):
        return cls.one(variety, mod) - cls.generator(variety, j, mod)

    def rank(self):
        return self.constant_term()


class KHomElt:
    """Element of K'_0 in the basis [[I]] = [O_{L_I}] of linear subspaces.

    The filtration level of [[I]] is |I|. Coefficients are rationals so that
    Z[1/l]-valued results fit.
    """

    __slots__ = ("variety", "terms")

    def __init__(self, variety: ModelVariety, terms: Mapping = ()):
        object.__setattr__(self, "variety", variety)
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict = {}
        for idx, c in items:
            idx = tuple(idx)
            if len(idx) != variety.nfactors or any(not 0 <= i <= n for i, n in zip(idx, variety.dims)):
                raise ValueError(f"index {idx} does not fit {variety}")
            out[idx] = out.get(idx, 0) + Fraction(c)
        object.__setattr__(self, "terms", MappingProxyType({k: v for k, v in out.items() if v}))

    def __setattr__(self, name, value):
        raise AttributeError("KHomElt is immutable")

    @classmethod
    def basis(cls, variety, idx, coeff=1):
        return cls(variety, {tuple(idx): coeff})

    @classmethod
    def structure_sheaf(cls, variety):
        return cls.basis(variety, variety.dims)

    @classmethod
    def zero(cls, variety):
        return cls(variety, {})

    def _compat(self, other):
        if not isinstance(other, KHomElt):
            raise TypeError(f"cannot combine KHomElt with {type(other).__name__}")
        if other.variety != self.variety:
            raise ValueError(f"varieties differ: {self.variety} vs {other.variety}")

    def __add__(self, other):
        self._compat(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return KHomElt(self.variety, out)

    def __neg__(self):
        return KHomElt(self.variety, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return KHomElt(self.variety, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, KHomElt):
            return NotImplemented
        return self.variety == other.variety and self.terms == other.terms

    def __hash__(self):
        return hash((self.variety, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.terms.values())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))

    def __repr__(self):
        from ..render import render_khom

        return f"KHomElt[{self.variety}]({render_khom(self)})"


class VirtualBundle:
    """Formal Z-combination of line bundles O(a), a a twist vector."""

    __slots__ = ("variety", "parts")

    def __init__(self, variety: ModelVariety, parts: Mapping = ()):
        object.__setattr__(self, "variety", variety)
        c: Counter = Counter()
        items = parts.items() if isinstance(parts, Mapping) else parts
        for a, m in items:
            a = tuple(int(x) for x in a)
            if len(a) != variety.nfactors:
                raise ValueError(f"twist {a} does not match {variety}")
            # O(a) restricted to a P^0 factor is trivial
            a = tuple(0 if n == 0 else x for x, n in zip(a, variety.dims))
            c[a] += int(m)
        object.__setattr__(self, "parts", MappingProxyType({a: m for a, m in c.items() if m}))

    def __setattr__(self, name, value):
        raise AttributeError("VirtualBundle is immutable")

    @classmethod
    def line(cls, variety, twist, mult=1):
        return cls(variety, {tuple(twist): mult})

    @classmethod
    def trivial(cls, variety, rank=1):
        return cls(variety, {(0,) * variety.nfactors: rank})

    @classmethod
    def zero(cls, variety):
        return cls(variety, {})

    @property
    def rank(self) -> int:
        return sum(self.parts.values())

    def _compat(self, other):
        if not isinstance(other, VirtualBundle):
            raise TypeError(f"cannot combine VirtualBundle with {type(other).__name__}")
        if other.variety != self.variety:
            raise ValueError(f"varieties differ: {self.variety} vs {other.variety}")

    def __add__(self, other):
        if isinstance(other, int):
            other = VirtualBundle.trivial(self.variety, other)
        self._compat(other)
        c = Counter(self.parts)
        c.update(other.parts)
        return VirtualBundle(self.variety, c)

    __radd__ = __add__

    def __neg__(self):
        return VirtualBundle(self.variety, {a: -m for a, m in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Integer multiple or tensor product."""
        if isinstance(other, int):
            return VirtualBundle(self.variety, {a: m * other for a, m in self.parts.items()})
        self._compat(other)
        c: Counter = Counter()
        for a, m in self.parts.items():
            for b, n in other.parts.items():
                c[tuple(x + y for x, y in zip(a, b))] += m * n
        return VirtualBundle(self.variety, c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative tensor powers of virtual bundles are not defined")
        out = VirtualBundle.trivial(self.variety)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, VirtualBundle):
            return NotImplemented
        return self.variety == other.variety and self.parts == other.parts

    def __hash__(self):
        return hash((self.variety, frozenset(self.parts.items())))

    def adams(self, l: int) -> "VirtualBundle":
        """psi^l: O(a) -> O(l a)."""
        if l == 0:
            raise ValueError("Adams operation needs l != 0")
        c: Counter = Counter()
        for a, m in self.parts.items():
            c[tuple(l * x for x in a)] += m
        return VirtualBundle(self.variety, c)

    def to_kcoh(self) -> KCohElt:
        acc = KCohElt.zero(self.variety)
        for a, m in self.parts.items():
            acc = acc + KCohElt.line_bundle(self.variety, a).scale(m)
        return acc

    def sorted_parts(self):
        return sorted(self.parts.items())

    def __repr__(self):
        from ..render import render_bundle

        return f"VirtualBundle[{self.variety}]({render_bundle(self)})"
