"""Ramified lifts of Baumslag-Solitar actions on the circle.

Signatures and their dihedral symmetries (:mod:`ramlift.signatures`), the
groups BS(1,n) (:mod:`ramlift.bsgroup`), exact polynomials and rational maps
(:mod:`ramlift.polynomial`), certified rational ramified covers
(:mod:`ramlift.covers`), numerical lifts of affine maps
(:mod:`ramlift.lifts`) and the classification tables
(:mod:`ramlift.classify`).
"""

from .bsgroup import AffineMap, BSElement, word_to_element
from .circle import INF, CirclePoint
from .classify import ClassDescriptor, cross_check, enumerate_classes, enumerate_homs, hom_classes
from .covers import RamifiedCover, adjust_cover, build_cover, load_fixture, signature_of
from .lifts import (
    LiftedMap,
    LiftedRep,
    admissible,
    compose_check,
    inner_spectral_radius,
    lift_derivative,
    lift_eval,
    local_flow_eval,
    relation_residual,
    rotation_number,
    schwarzian_check,
)
from .polynomial import Polynomial, RationalMap
from .signatures import (
    DihedralElement,
    SignatureVector,
    act,
    act_hash,
    delta,
    enumerate_canonical,
    stabilizer,
    stabilizer_report,
    validate_signature,
)

__version__ = "0.1.0"
