"""Numerical workbench for sigma models on the irrational rotation algebra."""

from .algebra import (
    CompositionError,
    Tolerance,
    TorusElement,
    add,
    adjoint,
    delta,
    exp_i,
    from_json,
    gns_norm,
    is_scalar,
    l1_norm,
    laplacian,
    monomial,
    mul,
    mul_reference,
    norms,
    one,
    prune,
    random_selfadjoint,
    scale,
    sub,
    to_json,
    trace,
    truncate,
    zero,
)
from .heisenberg import (
    Gaussian,
    InstantonRun,
    NotInvertibleError,
    Sampled,
    SchwartzVector,
    act_left,
    act_right,
    build_instanton,
    dual_theta,
    gaussian_ode_residual,
    gaussian_vector,
    inner_A,
    inner_B,
    instanton,
    invert_positive,
)
from .models import (
    CoerciveQuadruple,
    ConstraintError,
    ConstraintPair,
    EndoPair,
    chern_number,
    chiral_energy,
    chiral_residual,
    duality_residuals,
    endo_constraint_residual,
    endo_el_pairing,
    endo_from_matrix,
    energy_descent,
    first_variation_check,
    harmonic_from_projection,
    ising_el_residual,
    ising_energy,
    self_duality_residual,
    solve_constraint_for_B,
    solve_su2_constraint_for_B,
    su2_constraint_residuals,
    su2_el_pairing,
    su2_energy,
    su2_from_matrix,
)
from .symmetry import ad, ad_on_coercive, ad_on_endo, monomial_detector, projective_equal

__all__ = [name for name in dir() if not name.startswith("_")]
