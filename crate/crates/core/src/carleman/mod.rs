//! Carleman lifting of U' = F1 U + b U^{.M} and its truncation at order N.

mod evolve;
mod radii;
mod symmetric;
mod system;

pub use evolve::{
    evolve_truncated, truncation_error, write_truncation_csv, BoundInputs, EvolveOptions, Integrator,
    LiftedTrajectory, LinearFlow, SpectrumBounds, TruncationReport, WeightedSymmetric,
    TRUNCATION_CSV_HEADER,
};
pub use radii::{
    bound_exponent, c1_upper_bound, c_lambda_with, compute_C_lambda, compute_R, compute_RD, compute_radii,
    optimize_C, optimize_c_with, Breakpoint, C1Bound, COptimum, ConvergenceRadii, LambdaPolicy,
};
pub use symmetric::SymmetricCarleman;
pub use system::{build_blocks, carleman_dimension, lift_initial, CarlemanSystem, PowerMap, EVOLVE_CAP};
