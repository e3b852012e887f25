use super::AnalysisError;
use crate::experiment::{CollapsePolicy, ResolvedVar, Scenario, VarRef};
use crate::hilbert::StateVector;
use crate::measurement::{project, MeasurementBasis, NULL_OUTCOME};
use crate::numerics::Scalar;

/// A projector placed right after a layer; `None` leaves the state alone.
#[derive(Clone, Debug)]
pub struct Insertion<S> {
    pub layer: usize,
    pub basis: MeasurementBasis<S>,
    pub outcome: Option<String>,
}

/// Projector insertions in chronological order.
#[derive(Clone, Debug)]
pub struct HistoryQuery<S> {
    insertions: Vec<Insertion<S>>,
}

impl<S: Scalar> HistoryQuery<S> {
    pub fn new(insertions: Vec<Insertion<S>>) -> Result<Self, AnalysisError> {
        if insertions.windows(2).any(|w| w[1].layer < w[0].layer) {
            return Err(AnalysisError::Unordered);
        }
        Ok(HistoryQuery { insertions })
    }

    /// Insertions reading each variable's device at its layer, sorted by
    /// layer (stable for equal layers).
    pub fn from_vars(scenario: &Scenario<S>, vars: &[ResolvedVar]) -> Self {
        let mut insertions: Vec<Insertion<S>> = vars.iter().map(|v| readout_insertion(scenario, v, Some(&v.outcome))).collect();
        insertions.sort_by_key(|i| i.layer);
        HistoryQuery { insertions }
    }

    pub fn insertions(&self) -> &[Insertion<S>] {
        &self.insertions
    }
}

/// Projector onto a variable's pointer (or the null outcome) at its layer.
pub fn readout_insertion<S: Scalar>(scenario: &Scenario<S>, v: &ResolvedVar, outcome: Option<&str>) -> Insertion<S> {
    Insertion {
        layer: v.layer,
        basis: scenario.measure_of(v.step).device.readout_basis(scenario.layout()),
        outcome: outcome.map(str::to_string),
    }
}

/// `Σ_worlds ‖P_k U … P_1 U |ψ₀⟩‖²`: evolve under `policy`, project at each
/// insertion, and sum the squared norms of the surviving branches.
pub fn chain_weight<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    query: &HistoryQuery<S>,
) -> Result<S, AnalysisError> {
    let schedule = scenario.schedule(policy)?;
    let last = query.insertions.last().map_or(0, |i| i.layer);
    if last > schedule.len() {
        return Err(AnalysisError::Unordered);
    }
    let insert = |layer: usize, worlds: Vec<StateVector<S>>| -> Result<Vec<StateVector<S>>, AnalysisError> {
        let mut worlds = worlds;
        for ins in query.insertions.iter().filter(|i| i.layer == layer) {
            if let Some(outcome) = &ins.outcome {
                worlds = worlds
                    .iter()
                    .map(|w| project(w, &ins.basis, outcome).map(|(s, _)| s))
                    .collect::<Result<_, _>>()
                    .map_err(crate::experiment::ExperimentError::from)?;
            }
        }
        worlds.retain(|w| !w.is_empty());
        Ok(worlds)
    };
    let mut worlds = insert(0, vec![scenario.initial().clone()])?;
    for (pos, sched) in schedule.entries().iter().enumerate().take(last) {
        let mut next = Vec::new();
        for w in &worlds {
            next.extend(scenario.apply_step(sched, policy, w)?.into_iter().map(|(_, s)| s));
        }
        worlds = insert(pos + 1, next)?;
    }
    Ok(worlds.iter().fold(S::zero(), |a, w| a + w.norm_sq()))
}

/// Chain weight of a conjunction of variable readings.
pub fn chain_weight_of<S: Scalar>(scenario: &Scenario<S>, policy: &CollapsePolicy, vars: &[VarRef]) -> Result<S, AnalysisError> {
    let schedule = scenario.schedule(policy)?;
    let resolved = vars
        .iter()
        .map(|v| scenario.resolve(v, &schedule))
        .collect::<Result<Vec<_>, _>>()?;
    chain_weight(scenario, policy, &HistoryQuery::from_vars(scenario, &resolved))
}

/// Two-time joint table of two variables: every pair of pointer outcomes,
/// plus the null outcome where it carries weight.
pub fn two_time_table<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    a: &ResolvedVar,
    b: &ResolvedVar,
) -> Result<Vec<(String, String, S)>, AnalysisError> {
    let values = |v: &ResolvedVar| -> Vec<String> {
        let mut out: Vec<String> = scenario
            .measure_of(v.step)
            .device
            .pointers()
            .iter()
            .map(|(o, _)| o.clone())
            .collect();
        out.push(NULL_OUTCOME.to_string());
        out
    };
    let mut out = Vec::new();
    for x in values(a) {
        for y in values(b) {
            let mut ins = vec![readout_insertion(scenario, a, Some(&x)), readout_insertion(scenario, b, Some(&y))];
            ins.sort_by_key(|i| i.layer);
            let w = chain_weight(scenario, policy, &HistoryQuery::new(ins)?)?;
            if (x == NULL_OUTCOME || y == NULL_OUTCOME) && w.is_negligible() {
                continue;
            }
            out.push((x.clone(), y, w));
        }
    }
    Ok(out)
}
