"""Numerical differential geometry of constant angle surfaces in the
Heisenberg group Nil3 and the wider family of BCV spaces M(kappa, tau).

Every closed-form quantity shipped here has an independent
finite-difference or ODE oracle next to it, and the test suite
cross-validates the two.
"""

from .ambient import (
    AmbientParams,
    commutator_closed_form,
    commutator_oracle,
    conformal_factor,
    connection_apply,
    connection_frame,
    connection_oracle,
    coord_to_frame,
    curvature_oracle,
    curvature_tensor,
    frame_at,
    frame_matrix,
    frame_to_coord,
    hopf_project,
    metric_at,
    sectional_curvature,
)
from .bcv import (
    RemarkFields,
    bcv_lambda_a_b,
    constrained_d,
    integrate_bcv_system,
    lemma4_residuals,
    r_squared,
    remark_closed_form,
)
from .constant_angle import (
    ConstantAngleSpec,
    ProofFields,
    ab_closed_form,
    check_theta,
    hopf_cylinder,
    integrate_distribution,
    lambda_closed_form,
    matched_fields,
    phi_of_u,
    theorem1_surface,
)
from .errors import (
    BCVGeomError,
    DegenerateAngleError,
    DomainError,
    ImmersionError,
    InvalidSpecError,
    NonIntegrableError,
    PoleError,
    StencilError,
    UnsolvedBranchError,
)
from .export import read_csv_grid, write_csv, write_obj
from .surface import (
    Immersion,
    SurfaceGeometry,
    angle_and_projections,
    compatibility_residuals,
    first_fundamental_form,
    gaussian_curvature_extrinsic,
    gaussian_curvature_intrinsic,
    geometry_at,
    immersion_from_grid,
    shape_operator,
)

__version__ = "0.1.0"
