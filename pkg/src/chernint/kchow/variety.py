from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class ModelVariety:
    """Product P^n1 x ... x P^nk of projective spaces; k = 0 is Spec k."""

    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        if any(n < 0 for n in self.dims):
            raise ValueError(f"negative factor dimension in {self.dims}")

    @classmethod
    def parse(cls, text: str) -> "ModelVariety":
        """Parse 'P2', 'P2xP3xP1' (case-insensitive); 'pt' is Spec k."""
        s = text.strip().lower()
        if s in ("pt", "point", "spec k", ""):
            return cls(())
        parts = s.split("x")
        dims = []
        for part in parts:
            m = re.fullmatch(r"\s*p(\d+)\s*", part)
            if not m:
                raise ValueError(f"bad variety spec {text!r}: expected factors like P2xP3")
            dims.append(int(m.group(1)))
        return cls(tuple(dims))

    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def nfactors(self) -> int:
        return len(self.dims)

    @property
    def name(self) -> str:
        return "x".join(f"P{n}" for n in self.dims) if self.dims else "pt"

    def __str__(self):
        return self.name

    def __mul__(self, other: "ModelVariety") -> "ModelVariety":
        return ModelVariety(self.dims + other.dims)

    @cached_property
    def monomials(self) -> tuple[tuple[int, ...], ...]:
        """All exponent tuples e with 0 <= e_j <= n_j."""
        return tuple(itertools.product(*(range(n + 1) for n in self.dims)))

    def monomials_of_codim(self, c: int) -> list[tuple[int, ...]]:
        return [e for e in self.monomials if sum(e) == c]

    @property
    def rank(self) -> int:
        out = 1
        for n in self.dims:
            out *= n + 1
        return out


def all_models(max_dim: int, min_dim: int = 0) -> list[ModelVariety]:
    """One model per partition of d (factors in decreasing order), min_dim <= d <= max_dim."""

    def partitions(d, largest):
        if d == 0:
            yield ()
            return
        for first in range(min(d, largest), 0, -1):
            for rest in partitions(d - first, first):
                yield (first,) + rest

    out = []
    for d in range(min_dim, max_dim + 1):
        for part in partitions(d, d):
            out.append(ModelVariety(part))
    return out
