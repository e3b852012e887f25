//! Labeled composite state spaces, sparse state vectors and local maps.

mod isometry;
mod layout;
mod state;

use thiserror::Error;

pub use isometry::{apply_partial_isometry, PartialIsometry};
pub(crate) use isometry::project_onto;
pub use layout::{Role, SpaceLayout, Subsystem};
pub use state::{check_orthonormal, BasisKey, LocalVector, StateVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("unknown subsystem {0:?}")]
    UnknownSubsystem(String),
    #[error("subsystem {subsystem:?} has no label {label:?}")]
    UnknownLabel { subsystem: String, label: String },
    #[error("duplicate subsystem {0:?}")]
    DuplicateName(String),
    #[error("subsystem {subsystem:?} repeats label {label:?}")]
    DuplicateLabel { subsystem: String, label: String },
    #[error("subsystem {0:?} has no basis states")]
    EmptySubsystem(String),
    #[error("expected {expected} labels, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("states live on different layouts")]
    LayoutMismatch,
    #[error("vectors do not act on the declared targets")]
    TargetMismatch,
    #[error("superposition of no terms")]
    EmptySuperposition,
    #[error("state has support outside the map's domain near {0}")]
    SupportOutsideDomain(String),
    #[error("map is not isometric: {0}")]
    NonIsometric(String),
}

impl HilbertError {
    pub fn name(&self) -> &'static str {
        match self {
            HilbertError::UnknownSubsystem(_) => "UnknownSubsystem",
            HilbertError::UnknownLabel { .. } => "UnknownLabel",
            HilbertError::DuplicateName(_) => "DuplicateName",
            HilbertError::DuplicateLabel { .. } => "DuplicateLabel",
            HilbertError::EmptySubsystem(_) => "EmptySubsystem",
            HilbertError::ArityMismatch { .. } => "ArityMismatch",
            HilbertError::LayoutMismatch => "LayoutMismatch",
            HilbertError::TargetMismatch => "TargetMismatch",
            HilbertError::EmptySuperposition => "EmptySuperposition",
            HilbertError::SupportOutsideDomain(_) => "SupportOutsideDomain",
            HilbertError::NonIsometric(_) => "NonIsometric",
        }
    }
}
