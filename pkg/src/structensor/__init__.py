"""Structured symmetric tensors: cones, certificates and Hankel decompositions.

The most used entry points are re-exported here; the submodules hold the rest.
"""
from .cones import (
    MembershipReport,
    check_cd_hankel,
    check_cp_witness,
    check_sos,
    check_sos_star,
    check_ssos,
    cone_chain_harness,
    precondition,
)
from .decomposition import GeneratingVector, VandermondeDecomposition, inherit_reshape, prony_decompose
from .spectral import copositive_min, min_h_eigenvalue, numeric_pd_check
from .tensor import DecompositionList, SymmetricTensor, eval_tensor, hadamard, inner_coeff, inner_full

__all__ = [
    "DecompositionList",
    "GeneratingVector",
    "MembershipReport",
    "SymmetricTensor",
    "VandermondeDecomposition",
    "check_cd_hankel",
    "check_cp_witness",
    "check_sos",
    "check_sos_star",
    "check_ssos",
    "cone_chain_harness",
    "copositive_min",
    "eval_tensor",
    "hadamard",
    "inherit_reshape",
    "inner_coeff",
    "inner_full",
    "min_h_eigenvalue",
    "numeric_pd_check",
    "precondition",
    "prony_decompose",
]
