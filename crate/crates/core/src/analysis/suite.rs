use super::history::chain_weight_of;
use super::implication::{check_chain_implication, check_implication_in, ChainImplication, Implication, Verdict};
use super::{build_world_genealogy, AnalysisError};
use crate::experiment::{CollapsePolicy, Expect, Query, Scenario};
use crate::numerics::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum QueryResult<S> {
    Implication {
        ancestry: Implication<S>,
        chain: ChainImplication<S>,
    },
    Probability {
        weight: S,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRow<S> {
    pub id: String,
    pub statement: String,
    pub result: QueryResult<S>,
    pub expected: Option<Expect>,
}

impl<S: Scalar> SuiteRow<S> {
    /// The computed value in the vocabulary of [`Expect`].
    pub fn computed(&self) -> Expect {
        match &self.result {
            QueryResult::Implication { ancestry, .. } => match ancestry.verdict {
                Verdict::Holds => Expect::Holds,
                Verdict::Fails => Expect::Fails,
            },
            QueryResult::Probability { weight } => {
                if weight.is_negligible() {
                    Expect::Zero
                } else {
                    Expect::Positive
                }
            }
        }
    }

    pub fn matches(&self) -> Option<bool> {
        self.expected.map(|e| e == self.computed())
    }
}

/// Validity table of a scenario's queries under one policy, with the
/// stopping-rule probability and the joint readout table.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport<S> {
    pub scenario: String,
    pub policy: String,
    pub rows: Vec<SuiteRow<S>>,
    pub p_stop: Option<S>,
    pub joint: Vec<(Vec<String>, S)>,
    /// Rows whose computed value differs from the expected one.
    pub divergences: Vec<String>,
    /// Implications on which the chain-weight reading disagrees with the
    /// genealogy reading.
    pub readings_differ: Vec<String>,
}

impl<S: Scalar> SuiteReport<S> {
    pub fn row(&self, id: &str) -> Option<&SuiteRow<S>> {
        self.rows.iter().find(|r| r.id == id)
    }
}

pub fn inference_suite<S: Scalar>(scenario: &Scenario<S>) -> Result<SuiteReport<S>, AnalysisError> {
    inference_suite_with(scenario, scenario.default_policy())
}

pub fn inference_suite_with<S: Scalar>(scenario: &Scenario<S>, policy: &CollapsePolicy) -> Result<SuiteReport<S>, AnalysisError> {
    let dag = build_world_genealogy(scenario, policy)?;
    let mut rows = Vec::new();
    let mut divergences = Vec::new();
    let mut readings_differ = Vec::new();
    for q in scenario.queries() {
        let result = match q {
            Query::Implication {
                antecedent, consequent, ..
            } => {
                let ancestry = check_implication_in(scenario, policy, &dag, antecedent, consequent)?;
                let chain = check_chain_implication(scenario, policy, antecedent, consequent)?;
                if ancestry.verdict != chain.verdict {
                    readings_differ.push(format!(
                        "{}: genealogy {}, chain weights {}",
                        q.id(),
                        ancestry.verdict,
                        chain.verdict
                    ));
                }
                QueryResult::Implication { ancestry, chain }
            }
            Query::Probability { event, .. } => QueryResult::Probability {
                weight: chain_weight_of(scenario, policy, event)?,
            },
        };
        let row = SuiteRow {
            id: q.id().to_string(),
            statement: q.statement(),
            result,
            expected: q.expect(),
        };
        if row.matches() == Some(false) {
            divergences.push(format!(
                "{}: expected {}, computed {}",
                row.id,
                row.expected.expect("checked"),
                row.computed()
            ));
        }
        rows.push(row);
    }
    let p_stop = if scenario.stop_when().is_empty() {
        None
    } else {
        Some(chain_weight_of(scenario, policy, scenario.stop_when())?)
    };
    let readout: Vec<&str> = scenario.readout().iter().map(String::as_str).collect();
    let joint = scenario.run_exact(policy)?.by_labels(&readout).into_iter().collect();
    Ok(SuiteReport {
        scenario: scenario.name().to_string(),
        policy: policy.describe(),
        rows,
        p_stop,
        joint,
        divergences,
        readings_differ,
    })
}
