use std::collections::BTreeMap;
use std::fmt;

use super::{CollapsePolicy, ExperimentError, Mode, Scenario, Schedule, Scheduled, StepKind, TimeRef};
use crate::hilbert::StateVector;
use crate::measurement::{premeasure, project, NULL_OUTCOME};
use crate::numerics::Scalar;

/// One recorded outcome: when, which step, which basis outcome and the
/// pointer label it left on the device.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub time: usize,
    pub step: String,
    pub outcome: String,
    pub pointer: String,
}

/// Outcomes of one run, sorted by time.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct OutcomeRecord {
    entries: Vec<Entry>,
}

impl OutcomeRecord {
    pub fn new(mut entries: Vec<Entry>) -> Self {
        entries.sort();
        OutcomeRecord { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, step: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.step == step)
    }

    pub fn restrict(&self, steps: &[&str]) -> OutcomeRecord {
        OutcomeRecord {
            entries: self
                .entries
                .iter()
                .filter(|e| steps.contains(&e.step.as_str()))
                .cloned()
                .collect(),
        }
    }

    /// Pointer labels of `steps`, in the order given; `None` if a step is
    /// missing from the record.
    pub fn labels(&self, steps: &[&str]) -> Option<Vec<String>> {
        steps.iter().map(|s| self.get(s).map(|e| e.pointer.clone())).collect()
    }
}

impl fmt::Display for OutcomeRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.entries.iter().map(|e| e.pointer.as_str()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Exact weights over outcome records.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    entries: BTreeMap<OutcomeRecord, S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn from_entries<I: IntoIterator<Item = (OutcomeRecord, S)>>(items: I) -> Self {
        let mut entries: BTreeMap<OutcomeRecord, S> = BTreeMap::new();
        for (r, w) in items {
            let slot = entries.entry(r).or_insert_with(S::zero);
            *slot = slot.clone() + w;
        }
        Distribution { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OutcomeRecord, &S)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, record: &OutcomeRecord) -> S {
        self.entries.get(record).cloned().unwrap_or_else(S::zero)
    }

    pub fn total(&self) -> S {
        self.entries.values().fold(S::zero(), |a, w| a + w.clone())
    }

    pub fn marginal(&self, steps: &[&str]) -> Distribution<S> {
        Self::from_entries(self.entries.iter().map(|(r, w)| (r.restrict(steps), w.clone())))
    }

    /// Total weight of records satisfying `pred`.
    pub fn probability(&self, pred: impl Fn(&OutcomeRecord) -> bool) -> S {
        self.entries
            .iter()
            .filter(|(r, _)| pred(r))
            .fold(S::zero(), |a, (_, w)| a + w.clone())
    }

    /// Weights keyed by the pointer labels of `steps`, ignoring times;
    /// records lacking a step are dropped.
    pub fn by_labels(&self, steps: &[&str]) -> BTreeMap<Vec<String>, S> {
        let mut out: BTreeMap<Vec<String>, S> = BTreeMap::new();
        for (r, w) in &self.entries {
            if let Some(k) = r.labels(steps) {
                let slot = out.entry(k).or_insert_with(S::zero);
                *slot = slot.clone() + w.clone();
            }
        }
        out
    }
}

/// Node of the enumerated outcome tree. The root has no entry.
#[derive(Clone, Debug)]
pub struct TreeNode<S> {
    pub entry: Option<Entry>,
    pub weight: S,
    pub children: Vec<usize>,
}

/// Every branch of a run: projective steps split worlds, and a final joint
/// readout splits the leaves over premeasured readout devices.
#[derive(Clone, Debug)]
pub struct OutcomeTree<S> {
    nodes: Vec<TreeNode<S>>,
}

impl<S: Scalar> OutcomeTree<S> {
    pub fn nodes(&self) -> &[TreeNode<S>] {
        &self.nodes
    }

    /// Leaves with their records, in depth-first order.
    pub fn leaves(&self) -> Vec<(usize, OutcomeRecord)> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((id, path)) = stack.pop() {
            let node = &self.nodes[id];
            let mut path: Vec<Entry> = path;
            if let Some(e) = &node.entry {
                path.push(e.clone());
            }
            if node.children.is_empty() {
                out.push((id, OutcomeRecord::new(path)));
            } else {
                for &c in node.children.iter().rev() {
                    stack.push((c, path.clone()));
                }
            }
        }
        out
    }

    pub fn distribution(&self) -> Distribution<S> {
        Distribution::from_entries(
            self.leaves()
                .into_iter()
                .map(|(id, r)| (r, self.nodes[id].weight.clone())),
        )
    }
}

impl<S: Scalar> Scenario<S> {
    fn followups(&self, step: usize, policy: &CollapsePolicy, s: StateVector<S>) -> Result<StateVector<S>, ExperimentError> {
        let mut s = s;
        for f in &self.steps()[step].then {
            if f.environment && !policy.external_record {
                continue;
            }
            s = f.map.apply(&s)?;
        }
        Ok(s)
    }

    /// Runs one scheduled step. A projective step returns one unnormalized
    /// branch per pointer outcome, plus the null outcome if it carries
    /// weight; anything else returns a single branch without an entry.
    pub fn apply_step(
        &self,
        sched: &Scheduled,
        policy: &CollapsePolicy,
        s: &StateVector<S>,
    ) -> Result<Vec<(Option<Entry>, StateVector<S>)>, ExperimentError> {
        let step = &self.steps()[sched.step];
        match &step.kind {
            StepKind::Isometry(map) => Ok(vec![(None, self.followups(sched.step, policy, map.apply(s)?)?)]),
            StepKind::Measure(m) => {
                let coupled = premeasure(s, &m.basis, &m.device)?;
                if sched.mode == Mode::Premeasure {
                    return Ok(vec![(None, self.followups(sched.step, policy, coupled)?)]);
                }
                let readout = m.device.readout_basis::<S>(self.layout());
                let mut out = Vec::new();
                for (outcome, pointer) in m.device.pointers() {
                    let (branch, _) = project(&coupled, &readout, outcome)?;
                    let entry = Entry {
                        time: sched.time,
                        step: step.name.clone(),
                        outcome: outcome.clone(),
                        pointer: self.layout().label(m.device.device(), *pointer).to_string(),
                    };
                    out.push((Some(entry), self.followups(sched.step, policy, branch)?));
                }
                let (rest, w) = project(&coupled, &readout, NULL_OUTCOME)?;
                if !w.is_negligible() {
                    let entry = Entry {
                        time: sched.time,
                        step: step.name.clone(),
                        outcome: NULL_OUTCOME.to_string(),
                        pointer: NULL_OUTCOME.to_string(),
                    };
                    out.push((Some(entry), self.followups(sched.step, policy, rest)?));
                }
                Ok(out)
            }
        }
    }

    /// Global state after each layer; fails if any step collapses.
    pub fn snapshots(&self, policy: &CollapsePolicy) -> Result<Vec<StateVector<S>>, ExperimentError> {
        let schedule = self.schedule(policy)?;
        self.snapshots_until(policy, &schedule, schedule.len() + 1)
    }

    fn snapshots_until(
        &self,
        policy: &CollapsePolicy,
        schedule: &Schedule,
        layers: usize,
    ) -> Result<Vec<StateVector<S>>, ExperimentError> {
        let mut out = vec![self.initial().clone()];
        for sched in schedule.entries().iter().take(layers - 1) {
            if sched.mode == Mode::Projective {
                return Err(ExperimentError::PolicyNotUnitary(self.steps()[sched.step].name.clone()));
            }
            let mut next = self.apply_step(sched, policy, out.last().expect("nonempty"))?;
            out.push(next.pop().expect("one branch").1);
        }
        Ok(out)
    }

    /// Exact global state after the step at `time`.
    pub fn state_at(&self, policy: &CollapsePolicy, time: &TimeRef) -> Result<StateVector<S>, ExperimentError> {
        let schedule = self.schedule(policy)?;
        let layer = self.layer(time, &schedule)?;
        let mut snaps = self.snapshots_until(policy, &schedule, layer + 1)?;
        Ok(snaps.pop().expect("nonempty"))
    }

    /// Readout steps left in superposition by `schedule`, in time order.
    fn final_readout<'a>(&self, schedule: &'a Schedule) -> Vec<&'a Scheduled> {
        schedule
            .entries()
            .iter()
            .filter(|e| e.mode == Mode::Premeasure && self.readout().contains(&self.steps()[e.step].name))
            .collect()
    }

    pub fn outcome_tree(&self, policy: &CollapsePolicy) -> Result<OutcomeTree<S>, ExperimentError> {
        let schedule = self.schedule(policy)?;
        let mut nodes = vec![TreeNode {
            entry: None,
            weight: self.initial().norm_sq(),
            children: Vec::new(),
        }];
        self.grow(&schedule, policy, self.initial().clone(), 0, 0, &mut nodes)?;
        Ok(OutcomeTree { nodes })
    }

    fn grow(
        &self,
        schedule: &Schedule,
        policy: &CollapsePolicy,
        state: StateVector<S>,
        pos: usize,
        parent: usize,
        nodes: &mut Vec<TreeNode<S>>,
    ) -> Result<(), ExperimentError> {
        let mut state = state;
        let mut pos = pos;
        while pos < schedule.len() {
            let mut branches = self.apply_step(&schedule.entries()[pos], policy, &state)?;
            if branches.len() == 1 && branches[0].0.is_none() {
                state = branches.pop().expect("one branch").1;
                pos += 1;
                continue;
            }
            for (entry, branch) in branches {
                let id = push(nodes, parent, entry, branch.norm_sq());
                self.grow(schedule, policy, branch, pos + 1, id, nodes)?;
            }
            return Ok(());
        }
        let readout = self.final_readout(schedule);
        self.read(&readout, &state, parent, nodes)
    }

    fn read(&self, readout: &[&Scheduled], state: &StateVector<S>, parent: usize, nodes: &mut Vec<TreeNode<S>>) -> Result<(), ExperimentError> {
        let Some((first, rest)) = readout.split_first() else {
            return Ok(());
        };
        let step = &self.steps()[first.step];
        let m = self.measure_of(first.step);
        let basis = m.device.readout_basis::<S>(self.layout());
        let labels = m
            .device
            .pointers()
            .iter()
            .map(|(o, p)| (o.clone(), self.layout().label(m.device.device(), *p).to_string()))
            .chain(std::iter::once((NULL_OUTCOME.to_string(), NULL_OUTCOME.to_string())));
        for (outcome, pointer) in labels {
            let (branch, w) = project(state, &basis, &outcome)?;
            if outcome == NULL_OUTCOME && w.is_negligible() {
                continue;
            }
            let entry = Entry {
                time: first.time,
                step: step.name.clone(),
                outcome,
                pointer,
            };
            let id = push(nodes, parent, Some(entry), w);
            self.read(rest, &branch, id, nodes)?;
        }
        Ok(())
    }

    /// Exact distribution over outcome records, zero-weight records included.
    pub fn run_exact(&self, policy: &CollapsePolicy) -> Result<Distribution<S>, ExperimentError> {
        Ok(self.outcome_tree(policy)?.distribution())
    }
}

fn push<S>(nodes: &mut Vec<TreeNode<S>>, parent: usize, entry: Option<Entry>, weight: S) -> usize {
    nodes.push(TreeNode {
        entry,
        weight,
        children: Vec::new(),
    });
    let id = nodes.len() - 1;
    nodes[parent].children.push(id);
    id
}
