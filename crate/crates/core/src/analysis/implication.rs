use std::fmt;

use super::history::{chain_weight, readout_insertion, HistoryQuery};
use super::{build_world_genealogy, AnalysisError, GenealogyDag};
use crate::experiment::{CollapsePolicy, ResolvedVar, Scenario, VarRef};
use crate::measurement::NULL_OUTCOME;
use crate::numerics::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        })
    }
}

/// Weight of antecedent branches whose related branches read `value`:
/// `exclusive` counts branches related only to that value, `shared`
/// branches related to it among others.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueWeight<S> {
    pub value: String,
    pub exclusive: S,
    pub shared: S,
}

/// Implication judged on the branch genealogy: it holds iff every
/// antecedent branch is linked at the consequent time only to branches
/// carrying the consequent outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Implication<S> {
    pub antecedent: ResolvedVar,
    pub consequent: ResolvedVar,
    pub antecedent_weight: S,
    pub verdict: Verdict,
    pub witness: Option<ValueWeight<S>>,
    pub values: Vec<ValueWeight<S>>,
}

/// Implication judged on chain weights with projectors at the two times:
/// it holds iff no other consequent outcome has positive weight.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainImplication<S> {
    pub antecedent: ResolvedVar,
    pub consequent: ResolvedVar,
    pub antecedent_weight: S,
    pub verdict: Verdict,
    pub witness: Option<(String, S)>,
    pub weights: Vec<(String, S)>,
}

fn resolve_pair<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    antecedent: &VarRef,
    consequent: &VarRef,
) -> Result<(ResolvedVar, ResolvedVar), AnalysisError> {
    let schedule = scenario.schedule(policy)?;
    let a = scenario.resolve(antecedent, &schedule)?;
    let c = scenario.resolve(consequent, &schedule)?;
    if a.layer == c.layer {
        return Err(AnalysisError::SameTime(schedule.layer_name(a.layer)));
    }
    Ok((a, c))
}

/// Outcome labels of a variable in basis order, then the null outcome.
fn value_order<S: Scalar>(scenario: &Scenario<S>, v: &ResolvedVar) -> Vec<String> {
    let mut out: Vec<String> = scenario
        .measure_of(v.step)
        .device
        .pointers()
        .iter()
        .map(|(o, _)| o.clone())
        .collect();
    out.push(NULL_OUTCOME.to_string());
    out
}

/// The value a variable's device shows on a branch, or the null outcome
/// if it shows no pointer label.
fn reading<S: Scalar>(scenario: &Scenario<S>, v: &ResolvedVar, key: &[usize]) -> String {
    let device = &scenario.measure_of(v.step).device;
    device
        .outcome_for(key[device.device()])
        .unwrap_or(NULL_OUTCOME)
        .to_string()
}

pub fn check_implication<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    antecedent: &VarRef,
    consequent: &VarRef,
) -> Result<Implication<S>, AnalysisError> {
    let dag = build_world_genealogy(scenario, policy)?;
    check_implication_in(scenario, policy, &dag, antecedent, consequent)
}

/// [`check_implication`] on a prebuilt genealogy of the same policy.
pub fn check_implication_in<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    dag: &GenealogyDag<S>,
    antecedent: &VarRef,
    consequent: &VarRef,
) -> Result<Implication<S>, AnalysisError> {
    let (a, c) = resolve_pair(scenario, policy, antecedent, consequent)?;
    let order = value_order(scenario, &c);
    let mut values: Vec<ValueWeight<S>> = order
        .iter()
        .map(|v| ValueWeight {
            value: v.clone(),
            exclusive: S::zero(),
            shared: S::zero(),
        })
        .collect();
    let mut antecedent_weight = S::zero();
    let mut holds = true;
    for &n in dag.layer(a.layer) {
        let node = dag.node(n);
        if node.amplitude.is_negligible() || reading(scenario, &a, &node.key) != a.outcome {
            continue;
        }
        let w = node.amplitude.norm_sq();
        antecedent_weight = antecedent_weight + w.clone();
        let mut seen: Vec<String> = dag
            .related(n, c.layer)
            .into_iter()
            .map(|m| reading(scenario, &c, &dag.node(m).key))
            .collect();
        seen.sort();
        seen.dedup();
        if seen.iter().any(|v| *v != c.outcome) {
            holds = false;
        }
        for slot in values.iter_mut() {
            if seen.contains(&slot.value) {
                slot.shared = slot.shared.clone() + w.clone();
                if seen.len() == 1 {
                    slot.exclusive = slot.exclusive.clone() + w.clone();
                }
            }
        }
    }
    let witness = if holds {
        None
    } else {
        let mut best: Option<&ValueWeight<S>> = None;
        for v in values.iter().filter(|v| v.value != c.outcome && !v.shared.is_negligible()) {
            let better = match best {
                None => true,
                Some(b) => v
                    .exclusive
                    .compare(&b.exclusive)
                    .then(v.shared.compare(&b.shared))
                    .is_gt(),
            };
            if better {
                best = Some(v);
            }
        }
        best.cloned()
    };
    values.retain(|v| v.value != NULL_OUTCOME || !v.shared.is_negligible());
    Ok(Implication {
        antecedent: a,
        consequent: c,
        antecedent_weight,
        verdict: if holds { Verdict::Holds } else { Verdict::Fails },
        witness,
        values,
    })
}

pub fn check_chain_implication<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    antecedent: &VarRef,
    consequent: &VarRef,
) -> Result<ChainImplication<S>, AnalysisError> {
    let (a, c) = resolve_pair(scenario, policy, antecedent, consequent)?;
    let weight_with = |y: Option<&str>| -> Result<S, AnalysisError> {
        let mut ins = vec![
            readout_insertion(scenario, &a, Some(&a.outcome)),
            readout_insertion(scenario, &c, y),
        ];
        ins.sort_by_key(|i| i.layer);
        chain_weight(scenario, policy, &HistoryQuery::new(ins)?)
    };
    let antecedent_weight = weight_with(None)?;
    let mut weights = Vec::new();
    for y in value_order(scenario, &c) {
        let w = weight_with(Some(&y))?;
        if y == NULL_OUTCOME && w.is_negligible() {
            continue;
        }
        weights.push((y, w));
    }
    let mut witness: Option<(String, S)> = None;
    for (y, w) in weights.iter().filter(|(y, w)| *y != c.outcome && !w.is_negligible()) {
        if witness.as_ref().is_none_or(|(_, b)| w.compare(b).is_gt()) {
            witness = Some((y.clone(), w.clone()));
        }
    }
    Ok(ChainImplication {
        antecedent: a,
        consequent: c,
        antecedent_weight,
        verdict: if witness.is_none() { Verdict::Holds } else { Verdict::Fails },
        witness,
        weights,
    })
}

/// Two-time table read off the genealogy: for each later branch, its
/// reading of `late` against the reading of `early` shared by all its
/// related branches at the earlier time (`mixed` when they disagree).
pub fn ancestry_table<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    early: &VarRef,
    late: &VarRef,
) -> Result<Vec<(String, String, S)>, AnalysisError> {
    let dag = build_world_genealogy(scenario, policy)?;
    let (e, l) = resolve_pair(scenario, policy, early, late)?;
    let (e, l) = if e.layer < l.layer { (e, l) } else { (l, e) };
    let mut rows: Vec<(String, String, S)> = Vec::new();
    for &n in dag.layer(l.layer) {
        let node = dag.node(n);
        if node.amplitude.is_negligible() {
            continue;
        }
        let mut seen: Vec<String> = dag
            .related(n, e.layer)
            .into_iter()
            .map(|m| reading(scenario, &e, &dag.node(m).key))
            .collect();
        seen.sort();
        seen.dedup();
        let ev = if seen.len() == 1 { seen.remove(0) } else { "mixed".to_string() };
        let lv = reading(scenario, &l, &node.key);
        let w = node.amplitude.norm_sq();
        match rows.iter_mut().find(|(x, y, _)| *x == ev && *y == lv) {
            Some(row) => row.2 = row.2.clone() + w,
            None => rows.push((ev, lv, w)),
        }
    }
    let eo = value_order(scenario, &e);
    let lo = value_order(scenario, &l);
    let rank = |order: &[String], v: &str| order.iter().position(|x| x == v).unwrap_or(order.len());
    rows.sort_by_key(|(x, y, _)| (rank(&eo, x), rank(&lo, y)));
    Ok(rows)
}
