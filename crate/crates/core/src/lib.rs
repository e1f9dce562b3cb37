//! Compound matrices of integer and real order, matrix measures, and
//! contraction / Hausdorff-dimension analysis of nonlinear systems.

pub mod alpha;
pub mod compound;
pub mod contraction;
pub mod error;
pub mod functions;
pub mod kron;
pub mod linalg;
pub mod matrix;
pub mod measure;
pub mod ode;
pub mod system;
pub mod systems;

pub use alpha::{
    alpha_add_compound, alpha_add_compound_oracle, alpha_eigs, alpha_mult_compound,
    alpha_mult_compound_alt, alpha_mult_compound_detailed, alpha_spectral_abscissa,
    transform_add_compound, AlphaIndex, AlphaMultCompound, CompoundKind,
};
pub use compound::{add_compound, binomial, lex_tuples, minor, mult_compound, wedge, KSelector, LexTuple};
pub use error::{Error, Result};
pub use functions::{matrix_exp, matrix_real_power, principal_power, RealPower};
pub use kron::{kron_product, kron_sum};
pub use linalg::{eig, eigenvalues, hermitian_eigenvalues, singular_values, EigenDecomposition};
pub use matrix::{Matrix, C64};
pub use measure::{
    alpha_measure, compound_measure, induced_norm, matrix_measure, measure_chain, vector_norm,
    weighted_measure, MeasureNorm,
};
pub use contraction::{
    certify_alpha_contraction, contraction_integral, contraction_profile, douady_oesterle_check,
    flow_dimension_bound, generalized_jacobian, minimal_alpha, omega_bound, omega_bound_via_gram,
    sample_measures, AlphaProbe, AlphaSearch, ContractionCertificate, DimensionBound,
    FlowDimensionBound, SamplePoint, Verdict,
};
pub use ode::{
    integrate, integrate_variational, reached_equilibrium, terminal_residual, IntegrationFailure,
    IntegratorConfig, Method, Trajectory, VariationalSolution,
};
pub use system::{Domain, FnSystem, SampleSet, System};
pub use systems::{lti_system, laplacian_system, path3_laplacian, thomas_closed_loop, thomas_system};
