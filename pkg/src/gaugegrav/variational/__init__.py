"""Variational calculus on jets of metrics and world connections."""
from .api import (
    LagrangianOrderError,
    VariationalDerivatives,
    energy_momentum_current,
    euler_lagrange,
    field_equations_HE,
    invariance_identities,
    komar_report,
    komar_superpotential,
    levi_civita_komar,
    levi_civita_substitution,
    minkowski_point,
    noether_identities,
    total_derivative,
    weak_conservation,
)
from .backend import SeriesJets, SymbolicJets, check_identity, exact_zero
from .jets import JetContext, JetOrderError, JetVar, multiplicity, parse_name
from .lagrangians import (
    JetVariableError,
    LagrangianDensity,
    curvature_array,
    from_text,
    hilbert_einstein,
    scalar_curvature_jet,
    yang_mills,
)

__all__ = [
    "LagrangianOrderError", "VariationalDerivatives", "energy_momentum_current", "euler_lagrange",
    "field_equations_HE", "invariance_identities", "komar_report", "komar_superpotential",
    "levi_civita_komar", "levi_civita_substitution", "minkowski_point", "noether_identities",
    "total_derivative", "weak_conservation", "SeriesJets", "SymbolicJets", "check_identity",
    "exact_zero", "JetContext", "JetOrderError", "JetVar", "multiplicity", "parse_name",
    "JetVariableError", "LagrangianDensity", "curvature_array", "from_text", "hilbert_einstein",
    "scalar_curvature_jet", "yang_mills",
]
