//! Affine-invariant midrange statistics on the cone of real symmetric
//! positive definite (SPD) matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`spd`]: validated [`SymMatrix`] / [`SpdMatrix`] types, the cyclic
//!   Jacobi eigensolver, matrix functions and generalized eigenvalues.
//! * [`metrics`]: the affine-invariant distances `d_p(A, B) = ‖log A^{-1/2} B A^{-1/2}‖_p`,
//!   in particular the Thompson metric `d∞`.
//! * [`midpoints`]: geodesics and two-point means: the geometric mean `A#B`,
//!   the Nussbaum-geodesic midpoint `A*B` and the diamond midpoint `A◇B`.
//! * [`vector`]: closed-form scalar and vector midranges in `R₊ⁿ`.
//! * [`midrange`]: the N-point matrix midrange: bounds, Dykstra feasibility,
//!   bisection, a brute-force 2×2 oracle and the gap-instance search.
//! * [`random`]: reproducible random SPD generators.

// `!(x > 0.0)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod metrics;
pub mod midpoints;
pub mod midrange;
pub mod random;
pub mod spd;
pub mod vector;

pub use error::{Error, Result};
pub use metrics::{diameter, dist, gauge_m, riemannian_inner, MetricKind};
pub use midpoints::{
    check_midpoint, diamond_midpoint, geodesic_point, geometric_mean, star_eigenvalues_identity,
    star_midpoint, GeodesicKind, MidpointCheck,
};
pub use midrange::{
    bounds, certificate_cost, contact_lower_bound, examine_gap_candidate, feasibility,
    find_gap_instance, gap_trial_ensemble, oracle_min_cost_2x2, project_onto_lower,
    project_onto_upper, solve, trial_seed, Bounds, FeasibilityReport, GapInstance,
    GapSearchOptions, MidrangeProblem, MidrangeSolution, OracleResult, SolverOptions, Verdict,
};
pub use spd::{
    cholesky, eig_sym, gen_eig_all, gen_eig_extremes, matrix_function, EigDecomposition, MatrixFn,
    SpdMatrix, SymMatrix,
};
pub use vector::{scalar_midrange, vector_midrange, PositiveVector, VectorMidrange};

/// Relative positive-definiteness gate applied when an [`SpdMatrix`] is built:
/// `λ_min > EPS_PD · λ_max`.
pub const EPS_PD: f64 = 1e-10;
/// Relative reconstruction tolerance for decompositions.
pub const TOL_RECON: f64 = 1e-9;
/// Eigenvalue agreement tolerance.
pub const TOL_EIG: f64 = 1e-8;
/// Tolerance for invariance checks that compound two decompositions.
pub const TOL_METRIC: f64 = 1e-7;
