//! Trust-region first-order optimizers over pluggable norm geometries.
//!
//! The crate is organized around a small vector-space layer ([`point`]), the
//! norm triples that define each geometry ([`geometry`]), the closed-form
//! trust-region subproblem solver ([`trstep`]), parameter schedules derived
//! from target accuracies ([`schedule`]), synthetic test problems
//! ([`problems`]), the optimizer family itself ([`optim`]), a run harness
//! that records per-iterate diagnostics ([`harness`]), and an empirical
//! verification layer that rechecks the closed forms and convergence bounds
//! against independent oracles ([`verify`]).

pub mod error;
pub mod geometry;
pub mod harness;
pub mod optim;
pub mod point;
pub mod problems;
pub mod schedule;
pub mod trstep;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{NormGeometry, NormKind, OrthConfig, OrthMethod};
pub use harness::{
    check_bound, momentum_error_check, muon_vs_osgdm, run, BoundConstants, BoundId, BoundReport,
    ComparisonTable, IterationRow, RunRecord, RunSummary,
};
pub use optim::{OptimizerConfig, OptimizerState, Variant};
pub use point::{axpby, euclid_norm, inner, ParamPoint, Shape};
pub use problems::{
    make_matrix_layer, make_quadratic, noisy_oracle, LossKind, NoiseModel, Problem,
};
pub use schedule::{schedule, Schedule, ScheduleInputs, SchedulePreset};
pub use trstep::{Regularizer, TrustRegionSpec};
pub use verify::{run_suite, CheckLine, Suite, SuiteReport};
