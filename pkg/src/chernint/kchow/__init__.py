"""Model varieties (products of projective spaces), their Chow rings and K-groups."""

from .elements import ChowElt, KCohElt, KHomElt, VirtualBundle
from .morphisms import Morphism, UnsupportedMorphism, supported_morphisms
from .ops import (
    adams_coh,
    adams_hom,
    bott_theta,
    ch_coh,
    ch_hom,
    ch_hom_total,
    coh_to_hom,
    euler_characteristic,
    euler_characteristic_binomial,
    external_product,
    filtration_level,
    first_chern,
    genus_apply,
    hom_to_coh,
    tangent_class,
    todd_class,
    todd_tangent,
)
from .variety import ModelVariety, all_models

__all__ = [
    "ChowElt",
    "KCohElt",
    "KHomElt",
    "VirtualBundle",
    "Morphism",
    "UnsupportedMorphism",
    "supported_morphisms",
    "ModelVariety",
    "all_models",
    "adams_coh",
    "adams_hom",
    "bott_theta",
    "ch_coh",
    "ch_hom",
    "ch_hom_total",
    "coh_to_hom",
    "euler_characteristic",
    "euler_characteristic_binomial",
    "external_product",
    "filtration_level",
    "first_chern",
    "genus_apply",
    "hom_to_coh",
    "tangent_class",
    "todd_class",
    "todd_tangent",
]
