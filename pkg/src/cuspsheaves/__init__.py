"""Torsion-free sheaves over a curve with ordinary cusps, computed locally."""
from .cusp import CuspRingContext, DEFAULT_PRECISION
from .errors import (CuspError, InvariantError, MathPreconditionError, ParseError,
                     PrecisionError, RankDeficiencyError, TorsionError)
from .extension import (PhiMap, PushoutPresentation, WSpace, classify_semirank, extract_phi,
                        is_injective, lift_class_normalize, mu, pushout, semirank_from_jets,
                        torsion_search)
from .field import Field
from .lattice import (Decomposition, Lattice, contains, decompose, lattice_iso_check,
                      min_generators, nakayama_basis, semirank, standard_form)
from .linalg import KMatrix
from .series import PSeries
from .triples import (BundleData, CuspTriple, LatticeMorphism, SheafModel, Triple,
                      TripleMorphism, degree_ledger, from_triple, functor_on_morphism,
                      model_from_lattices, morphism_from_triple, roundtrip_object, to_triple)

__all__ = [
    "BundleData",
    "CuspError",
    "CuspRingContext",
    "CuspTriple",
    "DEFAULT_PRECISION",
    "Decomposition",
    "Field",
    "InvariantError",
    "KMatrix",
    "Lattice",
    "LatticeMorphism",
    "MathPreconditionError",
    "PSeries",
    "ParseError",
    "PhiMap",
    "PrecisionError",
    "PushoutPresentation",
    "RankDeficiencyError",
    "SheafModel",
    "TorsionError",
    "Triple",
    "TripleMorphism",
    "WSpace",
    "classify_semirank",
    "contains",
    "decompose",
    "degree_ledger",
    "extract_phi",
    "from_triple",
    "functor_on_morphism",
    "is_injective",
    "lattice_iso_check",
    "lift_class_normalize",
    "min_generators",
    "model_from_lattices",
    "morphism_from_triple",
    "mu",
    "nakayama_basis",
    "pushout",
    "roundtrip_object",
    "semirank",
    "semirank_from_jets",
    "standard_form",
    "to_triple",
    "torsion_search",
]

__version__ = "0.1.0"
