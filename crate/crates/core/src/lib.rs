//! Maximal quantum leakage of classical-to-quantum encodings.
//!
//! The crate is organized bottom-up:
//!
//! * [`operator`]: Hermitian algebra, states, measurements, ensembles.
//! * [`random`]: seeded Haar sampling.
//! * [`leakage`]: the leakage solver, its dual certificate and closed-form
//!   oracles.
//! * [`encoder`]: projected subgradient ascent for optimal universal
//!   encoders, basis encodings and qubit sweeps.
//! * [`inference`]: exact inference pipelines and accuracy-bound audits.
//! * [`io`]: JSON and CSV formats.

pub mod encoder;
pub mod error;
pub mod inference;
pub mod io;
pub mod leakage;
pub mod operator;
pub mod random;

pub use encoder::{
    ascent_step, basis_encoding, optimize_encoding, optimize_from, project_rank_one, subgradient, sweep_qubits,
    EncodingProblem, OptimizationRun, OptimizerConfig, SweepPoint, TraceSummary,
};
pub use error::{Error, Result, Violation};
pub use inference::{
    apply_channel, audit_bounds, audit_sweep, data_processing_check, perfect_discrimination, pipeline_accuracy,
    AuditLimits, AuditRow, BoundReport, JointPmf, Pipeline, PostProcessor, QuantumChannel,
};
pub use leakage::{
    assignment_update, compute_leakage, compute_leakage_from, dual_certificate, leakage_bounds,
    povm_fixed_point_step, povm_objective, two_state_oracle, LeakageBounds, LeakageResult, SolverConfig,
};
pub use operator::{
    eig_hermitian, sqrt_pinv, trace_distance, trace_inner, validate_density, validate_povm, CMatrix, CVector,
    DensityOperator, Eigen, Ensemble, Hermitian, Povm, PureState,
};
