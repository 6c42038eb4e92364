"""Exact homological algebra over finitely generated abelian groups."""

from .abgroup import FgAbGroup, GroupHom, ext_group, hom_group, snf, tensor_group, tor_group
from .complex import ChainComplex, ChainMap, TwoTermComplex, derived_hom_group, homology
from .bicomplex import Bicomplex, check_conditions, total_complex
from .resolution import canonical_resolution, check_partial_resolution, tensor_resolution
from .psi import psi0, psi1, spectral_report
from .pairing import (
    biext_geometric,
    biext_homological,
    derived_tensor,
    les_check,
    verify_main_theorem,
)

__all__ = [
    "Bicomplex",
    "ChainComplex",
    "ChainMap",
    "FgAbGroup",
    "GroupHom",
    "TwoTermComplex",
    "biext_geometric",
    "biext_homological",
    "canonical_resolution",
    "check_conditions",
    "check_partial_resolution",
    "derived_hom_group",
    "derived_tensor",
    "ext_group",
    "hom_group",
    "homology",
    "les_check",
    "psi0",
    "psi1",
    "snf",
    "spectral_report",
    "tensor_group",
    "tensor_resolution",
    "tor_group",
    "total_complex",
    "verify_main_theorem",
]
