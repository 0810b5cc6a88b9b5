"""Products of linear embeddings and projections between model varieties."""

from __future__ import annotations

from dataclasses import dataclass

from .elements import ChowElt, KCohElt, KHomElt, VirtualBundle
from .ops import coh_to_hom, hom_to_coh, tangent_class
from .variety import ModelVariety


class UnsupportedMorphism(ValueError):
    pass


@dataclass(frozen=True)
class Morphism:
    """Map source -> target built factor by factor.

    ``assign[j]`` is the target factor receiving source factor j through a
    linear embedding P^m in P^n (m <= n), or None when factor j is projected
    away. Every target factor receives exactly one source factor.
    """

    source: ModelVariety
    target: ModelVariety
    assign: tuple

    def __post_init__(self):
        if len(self.assign) != self.source.nfactors:
            raise UnsupportedMorphism("assignment length must match the source factors")
        hit = [a for a in self.assign if a is not None]
        if sorted(hit) != list(range(self.target.nfactors)):
            raise UnsupportedMorphism(f"each target factor must be hit exactly once: {self.assign}")
        for j, k in enumerate(self.assign):
            if k is not None and self.source.dims[j] > self.target.dims[k]:
                raise UnsupportedMorphism(
                    f"P{self.source.dims[j]} does not embed linearly in P{self.target.dims[k]}"
                )

    # constructors ---------------------------------------------------------

    @classmethod
    def identity(cls, X: ModelVariety) -> "Morphism":
        return cls(X, X, tuple(range(X.nfactors)))

    @classmethod
    def projection(cls, X: ModelVariety, keep) -> "Morphism":
        """Projection of X onto the product of the factors listed in ``keep``."""
        keep = list(keep)
        target = ModelVariety(tuple(X.dims[j] for j in keep))
        assign = tuple(keep.index(j) if j in keep else None for j in range(X.nfactors))
        return cls(X, target, assign)

    @classmethod
    def linear_embedding(cls, sub_dims, X: ModelVariety) -> "Morphism":
        """Embedding of a product of linear subspaces, factor by factor."""
        return cls(ModelVariety(tuple(sub_dims)), X, tuple(range(X.nfactors)))

    @property
    def relative_dim(self) -> int:
        return self.source.dim - self.target.dim

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.assign == tuple(range(self.source.nfactors))

    def _source_index(self, k):
        return self.assign.index(k)

    # pullbacks ------------------------------------------------------------

    def _pull_exp(self, e):
        return tuple(0 if k is None else e[k] for k in self.assign)

    def pull_chow(self, x: ChowElt) -> ChowElt:
        if x.variety != self.target:
            raise ValueError("class does not live on the target")
        return ChowElt(self.source, {self._pull_exp(e): c for e, c in x.terms.items()}, x.mod)

    def pull_kcoh(self, x: KCohElt) -> KCohElt:
        # u_k -> u_j for k = assign[j]: restriction of O(-1) is O(-1)
        if x.variety != self.target:
            raise ValueError("class does not live on the target")
        return KCohElt(self.source, {self._pull_exp(e): c for e, c in x.terms.items()}, x.mod)

    def pull_khom(self, x: KHomElt) -> KHomElt:
        return coh_to_hom(self.pull_kcoh(hom_to_coh(x)))

    def pull_bundle(self, u: VirtualBundle) -> VirtualBundle:
        return VirtualBundle(self.source, {self._pull_exp(a): m for a, m in u.parts.items()})

    def relative_tangent(self) -> VirtualBundle:
        """T_f = T_source - f^* T_target."""
        return tangent_class(self.source) - self.pull_bundle(tangent_class(self.target))

    # pushforwards ---------------------------------------------------------

    def _push_dims(self, dims):
        """Cycle dimensions on the target, or None if the image is degenerate."""
        out = [0] * self.target.nfactors
        for j, k in enumerate(self.assign):
            if k is None:
                if dims[j] > 0:
                    return None
            else:
                out[k] = dims[j]
        return tuple(out)

    def push_chow(self, x: ChowElt) -> ChowElt:
        if x.variety != self.source:
            raise ValueError("class does not live on the source")
        terms = {}
        for e, c in x.terms.items():
            dims = tuple(n - a for n, a in zip(self.source.dims, e))
            img = self._push_dims(dims)
            if img is None:
                continue
            key = tuple(n - i for n, i in zip(self.target.dims, img))
            terms[key] = terms.get(key, 0) + c
        return ChowElt(self.target, terms, x.mod)

    def push_khom(self, x: KHomElt) -> KHomElt:
        # chi(O_{P^i}) = 1, so projecting a linear factor away keeps coefficient 1
        if x.variety != self.source:
            raise ValueError("class does not live on the source")
        terms = {}
        for idx, c in x.terms.items():
            key = tuple(idx[self._source_index(k)] for k in range(self.target.nfactors))
            terms[key] = terms.get(key, 0) + c
        return KHomElt(self.target, terms)

    def __str__(self):
        return f"{self.source} -> {self.target} {list(self.assign)}"


def supported_morphisms(X: ModelVariety) -> list[Morphism]:
    """Identity, projections dropping one factor, and codimension-one linear
    embeddings into X (one per factor of positive dimension)."""
    out = [Morphism.identity(X)]
    if X.nfactors > 1:
        for drop in range(X.nfactors):
            keep = [j for j in range(X.nfactors) if j != drop]
            out.append(Morphism.projection(X, keep))
    for j, n in enumerate(X.dims):
        if n > 0:
            sub = list(X.dims)
            sub[j] -= 1
            out.append(Morphism.linear_embedding(sub, X))
    return out
