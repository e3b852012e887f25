use super::history::{chain_weight, HistoryQuery, Insertion};
use super::AnalysisError;
use crate::experiment::{CollapsePolicy, Scenario};
use crate::hilbert::Role;
use crate::measurement::MeasurementBasis;
use crate::numerics::Scalar;

/// Two-time table of one register between the layer it is first written
/// and a later layer.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordChange<S> {
    pub subsystem: String,
    pub written: usize,
    pub later: usize,
    pub table: Vec<(String, String, S)>,
    pub off_diagonal: S,
}

impl<S: Scalar> RecordChange<S> {
    pub fn changed(&self) -> bool {
        !self.off_diagonal.is_negligible()
    }

    pub fn weight(&self, early: &str, late: &str) -> S {
        self.table
            .iter()
            .find(|(a, b, _)| a == early && b == late)
            .map_or_else(S::zero, |(_, _, w)| w.clone())
    }
}

/// For every record and environment register, the chain-weight table of
/// its label at first write against its label after each later step.
pub fn record_change_report<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
) -> Result<Vec<RecordChange<S>>, AnalysisError> {
    let snaps = scenario.snapshots(policy)?;
    let layout = scenario.layout();
    let mut out = Vec::new();
    for (r, sub) in layout.subsystems().iter().enumerate() {
        if sub.role() == Role::System {
            continue;
        }
        let initial: Vec<usize> = snaps[0].entries().map(|(k, _)| k[r]).collect();
        let Some(written) = snaps
            .iter()
            .position(|s| s.entries().any(|(k, _)| !initial.contains(&k[r])))
        else {
            continue;
        };
        let basis = MeasurementBasis::<S>::computational(layout, r);
        for later in written + 1..snaps.len() {
            let mut table = Vec::new();
            let mut off = S::zero();
            for (i, x) in sub.labels().iter().enumerate() {
                for (j, y) in sub.labels().iter().enumerate() {
                    let q = HistoryQuery::new(vec![
                        Insertion {
                            layer: written,
                            basis: basis.clone(),
                            outcome: Some(x.clone()),
                        },
                        Insertion {
                            layer: later,
                            basis: basis.clone(),
                            outcome: Some(y.clone()),
                        },
                    ])?;
                    let w = chain_weight(scenario, policy, &q)?;
                    if w.is_negligible() {
                        continue;
                    }
                    if i != j {
                        off = off + w.clone();
                    }
                    table.push((x.clone(), y.clone(), w));
                }
            }
            out.push(RecordChange {
                subsystem: sub.name().to_string(),
                written,
                later,
                table,
                off_diagonal: off,
            });
        }
    }
    Ok(out)
}
