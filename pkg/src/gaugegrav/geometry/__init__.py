"""Charts, tensors, metrics, tetrads and connection calculus."""
from .chart import Chart
from .connection import (
    AffineWorldConnection,
    LorentzConnection,
    Ricci,
    Splitting,
    WorldConnection,
    cartan_connection,
    christoffel,
    christoffel_first_kind,
    connection_from_lorentz,
    contorsion,
    curvature,
    decompose,
    decompose_affine,
    holonomic_form_printed,
    lorentz_coefficients,
    lorentz_connection,
    lower_torsion,
    metric_connection,
    nonmetricity,
    recompose,
    ricci,
    scalar_curvature,
    splitting_residual,
    symmetric_part,
    textbook_riemann,
    to_textbook,
    torsion,
)
from .metric import (
    LORENTZIAN,
    RIEMANNIAN,
    MetricField,
    SingularMetricError,
    TetradField,
    determinant,
    euclidean,
    inverse,
    matmul,
    minkowski,
    signature_at,
)
from .spacetime import (
    IntegrabilityVerdict,
    SpacetimeSplit,
    exterior_derivative,
    integrability_check,
    metric_from_tetrad,
    orthonormality_residual,
    riemannian_from_tetrad,
    spacetime_metric,
    three_form_dw_wedge_w,
    unit_norm_residual,
)
from .tensor import ANTISYMMETRIC, SYMMETRIC, SymmetryError, TensorField, expr_array, identity_tensor, zeros
