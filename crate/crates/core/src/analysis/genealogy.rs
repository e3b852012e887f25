//! Branch genealogy: which product-basis branches feed amplitude into which
//! across the steps of a run. The DAG is a modeling stand-in for the
//! branches that "guide" histories; it is not a Bohmian trajectory model.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use super::AnalysisError;
use crate::experiment::{CollapsePolicy, Entry, Mode, OutcomeRecord, Scenario, Schedule, Scheduled, StepKind};
use crate::hilbert::{BasisKey, SpaceLayout, StateVector};
use crate::measurement::NULL_OUTCOME;
use crate::numerics::{Amplitude, Scalar};

/// One nonzero entry of a state in the product label basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<S> {
    pub key: BasisKey,
    pub labels: Vec<String>,
    pub amplitude: Amplitude<S>,
}

impl<S: Scalar> Branch<S> {
    pub fn weight(&self) -> S {
        self.amplitude.norm_sq()
    }
}

/// Branches of `s` in canonical key order.
pub fn decompose<S: Scalar>(s: &StateVector<S>) -> Vec<Branch<S>> {
    let all: Vec<usize> = (0..s.layout().len()).collect();
    s.entries()
        .map(|(k, a)| Branch {
            key: k.clone(),
            labels: s.layout().labels_of(&all, k),
            amplitude: a.clone(),
        })
        .collect()
}

/// Coarse branches: total weight per assignment of the `keep` subsystems.
pub fn group_branches<S: Scalar>(branches: &[Branch<S>], keep: &[usize]) -> Vec<(Vec<String>, S)> {
    let mut groups: BTreeMap<Vec<usize>, (Vec<String>, S)> = BTreeMap::new();
    for b in branches {
        let k: Vec<usize> = keep.iter().map(|&i| b.key[i]).collect();
        let labels: Vec<String> = keep.iter().map(|&i| b.labels[i].clone()).collect();
        let slot = groups.entry(k).or_insert_with(|| (labels, S::zero()));
        slot.1 = slot.1.clone() + b.weight();
    }
    groups.into_values().collect()
}

/// A branch at one layer. `world` lists the outcomes of collapsing steps
/// on its history; it is empty under unitary policies.
#[derive(Clone, Debug, PartialEq)]
pub struct Node<S> {
    pub layer: usize,
    pub world: OutcomeRecord,
    pub key: BasisKey,
    pub amplitude: Amplitude<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub parent: usize,
    pub child: usize,
    pub contribution: Amplitude<S>,
}

/// Step-by-step record of which branches feed amplitude into which.
/// Children whose contributions cancel exactly are kept with amplitude
/// zero so that cancellations can be reported.
#[derive(Clone, Debug)]
pub struct GenealogyDag<S> {
    layout: Arc<SpaceLayout>,
    schedule: Schedule,
    step_names: Vec<String>,
    nodes: Vec<Node<S>>,
    layers: Vec<Vec<usize>>,
    edges: Vec<Edge<S>>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

/// How the contributions into a multi-parent child combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interference {
    Constructive,
    Destructive,
    Cancellation,
}

impl Interference {
    pub fn as_str(self) -> &'static str {
        match self {
            Interference::Constructive => "constructive",
            Interference::Destructive => "destructive",
            Interference::Cancellation => "cancellation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceEvent<S> {
    pub child: usize,
    pub contributions: Vec<(usize, Amplitude<S>)>,
    pub net: Amplitude<S>,
    pub class: Interference,
}

/// Float-mode cancellation: net amplitude below this while some
/// contribution exceeds [`FLOAT_CONTRIBUTION_FLOOR`].
pub const FLOAT_CANCELLATION: f64 = 1e-10;
pub const FLOAT_CONTRIBUTION_FLOOR: f64 = 1e-6;

fn step_image<S: Scalar>(
    scenario: &Scenario<S>,
    sched: &Scheduled,
    policy: &CollapsePolicy,
    s: &StateVector<S>,
) -> Result<StateVector<S>, AnalysisError> {
    let step = &scenario.steps()[sched.step];
    let mut out = match &step.kind {
        StepKind::Isometry(map) => map.apply_extended(s),
        StepKind::Measure(m) => m
            .device
            .coupling(&m.basis)
            .map_err(crate::experiment::ExperimentError::from)?
            .apply_extended(s),
    };
    for f in &step.then {
        if f.environment && !policy.external_record {
            continue;
        }
        out = f.map.apply_extended(&out);
    }
    Ok(out)
}

/// Genealogy for unitary policies.
pub fn build_genealogy<S: Scalar>(scenario: &Scenario<S>, policy: &CollapsePolicy) -> Result<GenealogyDag<S>, AnalysisError> {
    if let Some(name) = policy.modes.iter().find(|(_, m)| **m == Mode::Projective).map(|(n, _)| n) {
        return Err(crate::experiment::ExperimentError::PolicyNotUnitary(name.clone()).into());
    }
    build_world_genealogy(scenario, policy)
}

/// Genealogy for any policy: a collapsing step sends each child into the
/// world of the pointer label it carries, so branches in different worlds
/// never share a child.
pub fn build_world_genealogy<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
) -> Result<GenealogyDag<S>, AnalysisError> {
    let schedule = scenario.schedule(policy)?;
    let layout = scenario.layout().clone();
    let mut dag = GenealogyDag {
        layout: layout.clone(),
        step_names: schedule
            .entries()
            .iter()
            .map(|e| scenario.steps()[e.step].name.clone())
            .collect(),
        schedule: schedule.clone(),
        nodes: Vec::new(),
        layers: Vec::new(),
        edges: Vec::new(),
        incoming: Vec::new(),
        outgoing: Vec::new(),
    };
    let first: Vec<usize> = scenario
        .initial()
        .entries()
        .map(|(k, a)| {
            dag.push_node(Node {
                layer: 0,
                world: OutcomeRecord::default(),
                key: k.clone(),
                amplitude: a.clone(),
            })
        })
        .collect();
    dag.layers.push(first);

    for (pos, sched) in schedule.entries().iter().enumerate() {
        let layer = pos + 1;
        let mut children: BTreeMap<(OutcomeRecord, BasisKey), Vec<(usize, Amplitude<S>)>> = BTreeMap::new();
        let step = &scenario.steps()[sched.step];
        for &p in &dag.layers[pos] {
            let parent = &dag.nodes[p];
            if parent.amplitude.is_negligible() {
                continue;
            }
            let ket = StateVector::basis(layout.clone(), parent.key.clone());
            let image = step_image(scenario, sched, policy, &ket)?;
            for (k, m) in image.entries() {
                let world = match (&step.kind, sched.mode) {
                    (StepKind::Measure(ms), Mode::Projective) => {
                        let label = k[ms.device.device()];
                        let (outcome, pointer) = match ms.device.outcome_for(label) {
                            Some(o) => (o.to_string(), layout.label(ms.device.device(), label).to_string()),
                            None => (NULL_OUTCOME.to_string(), NULL_OUTCOME.to_string()),
                        };
                        let mut entries = parent.world.entries().to_vec();
                        entries.push(Entry {
                            time: sched.time,
                            step: step.name.clone(),
                            outcome,
                            pointer,
                        });
                        OutcomeRecord::new(entries)
                    }
                    _ => parent.world.clone(),
                };
                children
                    .entry((world, k.clone()))
                    .or_default()
                    .push((p, parent.amplitude.clone() * m.clone()));
            }
        }
        let mut ids = Vec::new();
        for ((world, key), contributions) in children {
            let net = contributions
                .iter()
                .fold(Amplitude::zero(), |acc, (_, c)| acc + c.clone());
            let id = dag.push_node(Node {
                layer,
                world,
                key,
                amplitude: net,
            });
            for (p, c) in contributions {
                if c.is_negligible() {
                    continue;
                }
                dag.edges.push(Edge {
                    parent: p,
                    child: id,
                    contribution: c,
                });
                let e = dag.edges.len() - 1;
                dag.incoming[id].push(e);
                dag.outgoing[p].push(e);
            }
            ids.push(id);
        }
        dag.layers.push(ids);
    }
    Ok(dag)
}

impl<S: Scalar> GenealogyDag<S> {
    fn push_node(&mut self, n: Node<S>) -> usize {
        self.nodes.push(n);
        self.incoming.push(Vec::new());
        self.outgoing.push(Vec::new());
        self.nodes.len() - 1
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Name of the step that produced `layer`, `None` for the initial layer.
    pub fn step_name(&self, layer: usize) -> Option<&str> {
        layer.checked_sub(1).map(|p| self.step_names[p].as_str())
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, layer: usize) -> &[usize] {
        &self.layers[layer]
    }

    pub fn node(&self, id: usize) -> &Node<S> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }

    pub fn parents(&self, id: usize) -> impl Iterator<Item = &Edge<S>> {
        self.incoming[id].iter().map(|&e| &self.edges[e])
    }

    pub fn children(&self, id: usize) -> impl Iterator<Item = &Edge<S>> {
        self.outgoing[id].iter().map(|&e| &self.edges[e])
    }

    pub fn render_node(&self, id: usize) -> String {
        let n = &self.nodes[id];
        if n.world.entries().is_empty() {
            self.layout.render_key(&n.key)
        } else {
            format!("[{}] {}", n.world, self.layout.render_key(&n.key))
        }
    }

    /// Sum of the nonzero branches of a layer over all worlds.
    pub fn layer_state(&self, layer: usize) -> StateVector<S> {
        StateVector::from_entries(
            self.layout.clone(),
            self.layers[layer]
                .iter()
                .map(|&i| (self.nodes[i].key.clone(), self.nodes[i].amplitude.clone())),
        )
    }

    /// Nodes at `target` linked to `from` through edges (ancestors if
    /// `target` is earlier, descendants if later). Zero-amplitude nodes are
    /// passed through but not returned.
    pub fn related(&self, from: usize, target: usize) -> Vec<usize> {
        let start = self.nodes[from].layer;
        let mut frontier = vec![from];
        let mut layer = start;
        while layer != target {
            let mut next: Vec<usize> = Vec::new();
            for &n in &frontier {
                let linked: Vec<usize> = if target < start {
                    self.parents(n).map(|e| e.parent).collect()
                } else {
                    self.children(n).map(|e| e.child).collect()
                };
                for m in linked {
                    if !next.contains(&m) {
                        next.push(m);
                    }
                }
            }
            next.sort_unstable();
            frontier = next;
            layer = if target < start { layer - 1 } else { layer + 1 };
        }
        frontier.retain(|&n| !self.nodes[n].amplitude.is_negligible());
        frontier
    }
}

/// Every child of `layer` with at least two incoming contributions.
pub fn interference_report<S: Scalar>(dag: &GenealogyDag<S>, layer: usize) -> Vec<InterferenceEvent<S>> {
    let mut out = Vec::new();
    for &c in dag.layer(layer) {
        let contributions: Vec<(usize, Amplitude<S>)> =
            dag.parents(c).map(|e| (e.parent, e.contribution.clone())).collect();
        if contributions.len() < 2 {
            continue;
        }
        let net = dag.node(c).amplitude.clone();
        let incoherent = contributions.iter().fold(S::zero(), |a, (_, x)| a + x.norm_sq());
        let cancelled = if S::EXACT {
            net.is_zero()
        } else {
            let biggest = contributions
                .iter()
                .map(|(_, x)| x.norm_sq().to_f64().sqrt())
                .fold(0.0, f64::max);
            net.norm_sq().to_f64().sqrt() < FLOAT_CANCELLATION && biggest > FLOAT_CONTRIBUTION_FLOOR
        };
        let class = if cancelled {
            Interference::Cancellation
        } else if net.norm_sq().compare(&incoherent).is_lt() {
            Interference::Destructive
        } else {
            Interference::Constructive
        };
        out.push(InterferenceEvent {
            child: c,
            contributions,
            net,
            class,
        });
    }
    out
}
