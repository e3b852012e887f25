//! Branch decomposition, genealogy, chain weights and the implication
//! checker.

mod genealogy;
mod history;
mod implication;
pub mod json;
mod records;
mod suite;

use thiserror::Error;

use crate::experiment::ExperimentError;

pub use genealogy::{
    build_genealogy, build_world_genealogy, decompose, group_branches, interference_report, Branch, Edge,
    GenealogyDag, Interference, InterferenceEvent, Node, FLOAT_CANCELLATION, FLOAT_CONTRIBUTION_FLOOR,
};
pub use history::{chain_weight, chain_weight_of, readout_insertion, two_time_table, HistoryQuery, Insertion};
pub use implication::{
    ancestry_table, check_chain_implication, check_implication, check_implication_in, ChainImplication, Implication,
    ValueWeight, Verdict,
};
pub use records::{record_change_report, RecordChange};
pub use suite::{inference_suite, inference_suite_with, QueryResult, SuiteReport, SuiteRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("antecedent and consequent both refer to {0}")]
    SameTime(String),
    #[error("insertions are not in chronological order or lie past the last step")]
    Unordered,
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

impl AnalysisError {
    pub fn qualified_name(&self) -> String {
        match self {
            AnalysisError::SameTime(_) => "analysis::SameTime".into(),
            AnalysisError::Unordered => "analysis::Unordered".into(),
            AnalysisError::Experiment(e) => e.qualified_name(),
        }
    }
}
