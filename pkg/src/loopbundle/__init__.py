"""Polynomial loop groups, weighted mode spaces and holonomy fibre bases.

The package is organised in five layers:

* laurent: matrix-valued trigonometric (Laurent) polynomials, sampling,
  Fourier projection and polynomiality residuals;
* modes: weighted sequence models of loop vectors, the mode derivative,
  cosh weights, the polarization and Hilbert-Schmidt diagnostics;
* spectral: branch/central logarithms, skew exponentials, unitary
  structures and the polynomial pairing of matched logs;
* sections: quasi-periodic path elements over the classical groups with
  explicit local sections and polynomiality certificates;
* holonomy: parallel transport in model geometries, Floquet data,
  eigen-section bases and the weighted inner product.
"""

from .laurent import (
    MatrixLoop,
    SampledLoop,
    identity_loop,
    laurent_mul,
    laurent_eval,
    sample_loop,
    group_residual,
    fourier_coefficients,
    fourier_project,
    polynomiality_residual,
)
from .modes import (
    LoopVector,
    ShiftData,
    trivial_shift_data,
    basis_vector,
    l2_norm,
    l2r_norm,
    apply_mode_derivative,
    apply_cosh_weight,
    apply_cosh_weight_inverse,
    apply_polarization,
    apply_loop,
    hs_commutator_norm,
    hs_commutator_norm_truncated,
    conjugated_hs_tail,
)
from .spectral import (
    EigenDecomp,
    clustered_eig,
    spectral_radius,
    exp_skew,
    one_parameter_path,
    log_branch,
    central_log,
    exp_pair_loop,
    unitary_structure,
    log0_decompose,
    so_log,
    torus_path_factor,
    centralizer_element,
    block_structure,
    real_eigenspace,
)
from .sections import (
    PathElement,
    eval_path,
    project_path,
    act_group,
    path_group_residual,
    smooth_section,
    junction_mismatch,
    un_section,
    su_section,
    so_spectral_split,
    so_section,
    path_fiber_quotient,
    fiber_certificate,
)
from .holonomy import (
    ConnectionModel,
    BaseLoop,
    Reparam,
    MonodromyData,
    FiberBasis,
    FiberSection,
    torus_model,
    sphere_model,
    su2_model,
    transport,
    transport_defect,
    transport_frame,
    holonomy,
    floquet,
    monodromy,
    eigen_sections,
    dhat_residuals,
    project_section,
    loop_recognition_residual,
    cos_inner_product,
    cos_gram,
    condiff_residual,
    reparam_actions,
    subbundle_counterexample,
    direct_sum_union_residual,
    complexification_residual,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
