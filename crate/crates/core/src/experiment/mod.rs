//! Scenarios, collapse policies and the execution engine.

mod engine;
pub mod format;
mod fr;
mod policy;
mod query;
mod sampling;
mod scenario;

use thiserror::Error;

use crate::hilbert::HilbertError;
use crate::measurement::MeasurementError;
use crate::numerics::NumericsError;

pub use engine::{Distribution, Entry, OutcomeRecord, OutcomeTree, TreeNode};
pub use format::{ScenarioFile, SCHEMA_VERSION};
pub use fr::{build_fr_scenario, fr_scenario_file, FrVariant};
pub use policy::{CollapsePolicy, Mode, Schedule, Scheduled};
pub use query::{fold_label, Expect, Query, TimeRef, VarRef};
pub use sampling::{
    first_success_trials, run_sampled, run_sampled_with, stream_rng, SampleReport, Sampler, DEFAULT_WORKERS, RNG_NAME,
};
pub use scenario::{Followup, MeasureSpec, ResolvedVar, Scenario, Step, StepKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unknown step {0:?}")]
    UnknownStep(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {variable:?} has no outcome {outcome:?}")]
    UnknownOutcome { variable: String, outcome: String },
    #[error("no step at time {0}")]
    UnknownTime(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
    #[error("step {0} collapses under this policy, so there is no single global state")]
    PolicyNotUnitary(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("scenario file: {0}")]
    Format(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
}

impl ExperimentError {
    /// `module::Variant` of the module the error originated in.
    pub fn qualified_name(&self) -> String {
        let local = match self {
            ExperimentError::InvalidScenario(_) => "InvalidScenario",
            ExperimentError::UnknownStep(_) => "UnknownStep",
            ExperimentError::UnknownVariable(_) => "UnknownVariable",
            ExperimentError::UnknownOutcome { .. } => "UnknownOutcome",
            ExperimentError::UnknownTime(_) => "UnknownTime",
            ExperimentError::InvalidPolicy(_) => "InvalidPolicy",
            ExperimentError::PolicyNotUnitary(_) => "PolicyNotUnitary",
            ExperimentError::InvalidArgument(_) => "InvalidArgument",
            ExperimentError::Parse(_) => "Parse",
            ExperimentError::Format(_) => "Format",
            ExperimentError::Numerics(e) => return format!("numerics::{}", e.name()),
            ExperimentError::Hilbert(e) => return format!("hilbert::{}", e.name()),
            ExperimentError::Measurement(MeasurementError::Hilbert(e)) => return format!("hilbert::{}", e.name()),
            ExperimentError::Measurement(e) => return format!("measurement::{}", e.name()),
        };
        format!("experiment::{local}")
    }
}
