"""Truncated univariate power series over Q or Z/p."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .exactnum import check_prime, to_mod


class FieldMismatch(ValueError):
    pass


def _norm(c, mod):
    if mod is None:
        return Fraction(c)
    return to_mod(c, mod)


class TruncSeries:
    """Power series c0 + c1 x + ... + cN x^N + O(x^(N+1)).

    ``mod`` is ``None`` for rational coefficients or a prime p for Z/p.
    Values are treated as immutable.
    """

    __slots__ = ("coeffs", "mod")

    def __init__(self, coeffs: Sequence, mod: int | None = None):
        if not coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        if mod is not None:
            check_prime(mod)
        object.__setattr__(self, "mod", mod)
        object.__setattr__(self, "coeffs", tuple(_norm(c, mod) for c in coeffs))

    @classmethod
    def _raw(cls, coeffs, mod):
        s = object.__new__(cls)
        object.__setattr__(s, "coeffs", tuple(coeffs))
        object.__setattr__(s, "mod", mod)
        return s

    def __setattr__(self, name, value):
        raise AttributeError("TruncSeries is immutable")

    @classmethod
    def variable(cls, order: int, mod: int | None = None) -> "TruncSeries":
        return cls([0, 1] + [0] * (order - 1), mod) if order >= 1 else cls([0], mod)

    @classmethod
    def constant(cls, c, order: int, mod: int | None = None) -> "TruncSeries":
        return cls([c] + [0] * order, mod)

    @classmethod
    def from_function(cls, f: Callable[[int], object], order: int, mod=None):
        return cls([f(k) for k in range(order + 1)], mod)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        if k > self.order:
            raise IndexError(f"coefficient {k} lies beyond truncation order {self.order}")
        return self._zero()

    def _zero(self):
        return Fraction(0) if self.mod is None else 0

    def _fix(self, xs):
        if self.mod is None:
            return xs
        p = self.mod
        return [x % p for x in xs]

    def _check(self, other: "TruncSeries"):
        if not isinstance(other, TruncSeries):
            raise TypeError(f"cannot combine series with {type(other).__name__}")
        if other.mod != self.mod:
            raise FieldMismatch(f"coefficient fields differ: {self.mod} vs {other.mod}")

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            self._check(other)
            return other
        return TruncSeries.constant(other, self.order, self.mod)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries._raw(self.coeffs[: order + 1], self.mod)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order) + 1
        return TruncSeries._raw(self._fix([a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])]), self.mod)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._raw(self._fix([-a for a in self.coeffs]), self.mod)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncSeries":
        c = _norm(c, self.mod)
        return TruncSeries._raw(self._fix([c * a for a in self.coeffs]), self.mod)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._check(other)
        n = min(self.order, other.order)
        out = [0] * (n + 1)
        nz = [(j, b) for j, b in enumerate(other.coeffs[: n + 1]) if b]
        for i, a in enumerate(self.coeffs[: n + 1]):
            if not a:
                continue
            for j, b in nz:
                if i + j > n:
                    break
                out[i + j] += a * b
        if self.mod is None:
            out = [Fraction(c) for c in out]
        return TruncSeries._raw(self._fix(out), self.mod)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries.constant(1, self.order, self.mod)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.mod == other.mod and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.mod))

    def agrees_with(self, other: "TruncSeries") -> bool:
        """Equality up to the smaller of the two truncation orders."""
        self._check(other)
        n = min(self.order, other.order) + 1
        return self.coeffs[:n] == other.coeffs[:n]

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; the constant term must be a unit."""
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("constant term is not invertible")
        inv0 = 1 / c0 if self.mod is None else pow(c0, -1, self.mod)
        n = self.order
        out = [inv0]
        for k in range(1, n + 1):
            s = sum(self.coeffs[j] * out[k - j] for j in range(1, k + 1) if self.coeffs[j])
            s = -s * inv0
            out.append(s % self.mod if self.mod else Fraction(s))
        return TruncSeries._raw(out, self.mod)

    def compose(self, g: "TruncSeries") -> "TruncSeries":
        """self(g(x)); g must have zero constant term."""
        self._check(g)
        if g.coeffs[0]:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, g.order)
        g = g.truncate(n)
        acc = TruncSeries.constant(self.coeffs[n], n, self.mod)
        for k in range(n - 1, -1, -1):
            acc = acc * g + self.coeffs[k]
        return acc

    def comp_inverse(self) -> "TruncSeries":
        """Series g with g(self(x)) = x up to truncation."""
        if self.coeffs[0]:
            raise ValueError("series must have zero constant term")
        if self.order < 1 or self.coeffs[1] != 1:
            raise ValueError("linear coefficient must be 1")
        n = self.order
        # powers[k][m] = [x^m] self^k; [x^k] self^k = 1 so g solves triangularly
        powers = [None, self]
        for k in range(2, n + 1):
            powers.append(powers[-1] * self)
        g = [self._zero(), 1 if self.mod else Fraction(1)]
        for m in range(2, n + 1):
            s = sum(g[k] * powers[k].coeffs[m] for k in range(1, m) if g[k])
            g.append((-s) % self.mod if self.mod else Fraction(-s))
        return TruncSeries._raw(g, self.mod)

    def evaluate(self, value, one):
        """Horner evaluation at an element of any ring with the given unit.

        Used for nilpotent arguments, so the truncation must reach their
        nilpotency order.
        """
        acc = one * self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * value + one * c
        return acc

    def __repr__(self):
        return f"TruncSeries({render_series(self)})"


def render_series(s: TruncSeries, var: str = "x") -> str:
    out = ""
    for k, c in enumerate(s.coeffs):
        if not c:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        neg = c < 0 and s.mod is None
        a = -c if neg else c
        body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
        if not out:
            out = f"-{body}" if neg else body
        else:
            out += f" - {body}" if neg else f" + {body}"
    return f"{out or '0'} + O({var}^{s.order + 1})"


def series_to_json(s: TruncSeries) -> dict:
    return {
        "field": "Q" if s.mod is None else f"Z/{s.mod}",
        "order": s.order,
        "coeffs": [str(c) for c in s.coeffs],
    }


# named series ---------------------------------------------------------------


def exp_series(order: int, mod: int | None = None) -> TruncSeries:
    return TruncSeries.from_function(lambda k: Fraction(1, factorial(k)), order, mod)


def todd_series(order: int) -> TruncSeries:
    """x / (1 - e^(-x)), as the inverse of sum (-x)^n / (n+1)!."""
    base = TruncSeries.from_function(lambda n: Fraction((-1) ** n, factorial(n + 1)), order)
    return base.inverse()


def r_series(p: int, order: int, mod: int | None = -1) -> TruncSeries:
    """sum_i (-1)^i x^(p^i - 1). Defaults to Z/p coefficients."""
    check_prime(p)
    mod = p if mod == -1 else mod
    coeffs = [0] * (order + 1)
    i, e = 0, 0
    while e <= order:
        coeffs[e] = (-1) ** i
        i += 1
        e = p**i - 1
    return TruncSeries(coeffs, mod)


def w_series(p: int, order: int, mod: int | None = -1) -> TruncSeries:
    """1 + x^(p-1). Defaults to Z/p coefficients."""
    check_prime(p)
    mod = p if mod == -1 else mod
    coeffs = [0] * (order + 1)
    coeffs[0] = 1
    if p - 1 <= order:
        coeffs[p - 1] += 1
    return TruncSeries(coeffs, mod)


def series_mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    return f * g


def series_inverse(f: TruncSeries) -> TruncSeries:
    return f.inverse()


def series_compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    return f.compose(g)


def series_comp_inverse(f: TruncSeries) -> TruncSeries:
    return f.comp_inverse()
