//! Compliance measures of weighted l1 regularizers for k-sparse recovery.
//!
//! Given weights `w` defining `||z||_w = sum_i w_i |z_i|`, this crate
//! quantifies how well that norm suits recovery of k-sparse vectors and
//! maximizes the measures over the weights:
//!
//! - exact descent-cone solid angles on the sphere in R^3, with the uniform
//!   and non-uniform compliance measures ([`geometry`]);
//! - Monte Carlo cone volumes in any dimension, with deterministic
//!   counter-based sampling ([`sampler`]);
//! - RIP-based measures: the necessary-side supremum B and restricted
//!   conditioning, and the sufficient-side supremum D with its RIP constant
//!   `1/sqrt(D+1)` ([`rip`]), built on the k-support norm ([`ksupport`]);
//! - weight optimization and optimality certificates ([`search`]);
//! - brute-force oracles arbitrating every closed form ([`oracle`]);
//! - the run configuration and reporting layer behind the CLI ([`cli`]).
//!
//! Start from the `examples/` directory: each file is a runnable tour of one
//! capability (`cargo run --release --example sufficient_rip`).

pub mod cli;
pub mod error;
pub mod geometry;
pub mod ksupport;
pub mod model;
mod numerics;
pub mod oracle;
pub mod rip;
pub mod sampler;
pub mod search;

pub use error::{Error, Result};
pub use geometry::{
    compliance_nonuniform_3d, compliance_uniform_3d, descent_cone_area_3d, tetra_solid_angle,
    Mu3, SolidAngle,
};
pub use ksupport::{ksupport_norm, ksupport_norm_oracle, ksupport_norm_squared, KSupportNorm};
pub use model::{
    model_descent_set_contains, signed_descent_cone_contains, SignedSupport, SortedMagnitudeView,
    SparsityModel, WeightVector,
};
pub use rip::{
    b_sigma, b_value, d_value, delta_from_gamma, delta_suff, gamma_projector, gamma_sigma,
    ComplianceReport, Measure, Method, NecessaryCompliance, SufficientCompliance,
};
pub use sampler::{
    estimate_cone_fraction, mc_compliance, sample_sphere, EstimateWithError, McMode, McOptions,
    SphereSampler,
};
pub use search::{
    measure_value, optimality_certificate, optimize_weights, CertificateReport, MeasureKind,
    OptimizationTrace, SearchConfig,
};
