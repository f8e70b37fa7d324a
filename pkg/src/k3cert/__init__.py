"""Exact lattice certificates for rational curves on K3 surfaces."""

__version__ = "0.1.0"

from .classifier import Certificate, Verdict, classify, corpus, corpus_entry
from .conditions import (Condition, ConditionWitness, big_nef_sum, check_A1, check_A2,
                         check_A3, check_rank4, fibration_index, genus1_bound_holds,
                         genus_reduction_plan, hodge_index_validate, regeneration_degree_bound)
from .exceptions import (DimensionError, HodgeIndexError, InvalidAmpleError, InvalidInputError,
                         InvalidLatticeError, InvalidRankError, K3CertError, NotK3LatticeError,
                         PreconditionError, UnsupportedRankError)
from .lattice import (DivisorClass, Lattice, discriminant, divisibility_violations,
                      is_primitive, lattice_isomorphic, pair, signature)
from .positivity import (RootSet, is_big_nef, is_effective, is_minimal_nef, is_nef,
                         minimal_nef_decompose, prec_compare)
from .qform import enumerate_norm_vectors, isotropic_exists, project_orthogonal, represents

__all__ = [
    "Certificate", "Verdict", "classify", "corpus", "corpus_entry",
    "Condition", "ConditionWitness", "big_nef_sum", "check_A1", "check_A2", "check_A3",
    "check_rank4", "fibration_index", "genus1_bound_holds", "genus_reduction_plan",
    "hodge_index_validate", "regeneration_degree_bound",
    "DimensionError", "HodgeIndexError", "InvalidAmpleError", "InvalidInputError",
    "InvalidLatticeError", "InvalidRankError", "K3CertError", "NotK3LatticeError",
    "PreconditionError", "UnsupportedRankError",
    "DivisorClass", "Lattice", "discriminant", "divisibility_violations", "is_primitive",
    "lattice_isomorphic", "pair", "signature",
    "RootSet", "is_big_nef", "is_effective", "is_minimal_nef", "is_nef",
    "minimal_nef_decompose", "prec_compare",
    "enumerate_norm_vectors", "isotropic_exists", "project_orthogonal", "represents",
]
