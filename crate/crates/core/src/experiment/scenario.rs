use std::cmp::Ordering;
use std::path::Path;
use std::sync::Arc;

use super::format::{local_vector, vector_on, FollowupSpec, PairSpec, ScenarioFile, StepKindSpec};
use super::query::fold_label;
use super::{CollapsePolicy, ExperimentError, Mode, Query, Schedule, Scheduled, TimeRef, VarRef};
use crate::hilbert::{PartialIsometry, SpaceLayout, StateVector, Subsystem};
use crate::measurement::{MeasurementBasis, PointerDevice};
use crate::numerics::Scalar;

/// An isometry that runs after a step in the same time slot.
#[derive(Clone, Debug)]
pub struct Followup<S> {
    pub name: String,
    pub map: PartialIsometry<S>,
    pub environment: bool,
}

#[derive(Clone, Debug)]
pub struct MeasureSpec<S> {
    pub variable: String,
    pub basis: MeasurementBasis<S>,
    pub device: PointerDevice,
}

#[derive(Clone, Debug)]
pub enum StepKind<S> {
    Isometry(PartialIsometry<S>),
    Measure(MeasureSpec<S>),
}

#[derive(Clone, Debug)]
pub struct Step<S> {
    pub name: String,
    pub time: usize,
    pub kind: StepKind<S>,
    pub then: Vec<Followup<S>>,
}

impl<S> Step<S> {
    pub fn measure(&self) -> Option<&MeasureSpec<S>> {
        match &self.kind {
            StepKind::Measure(m) => Some(m),
            StepKind::Isometry(_) => None,
        }
    }
}

/// A variable pinned to an outcome and a layer of the schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedVar {
    pub step: usize,
    pub variable: String,
    pub outcome: String,
    pub pointer: usize,
    pub layer: usize,
}

/// A compiled protocol: layout, initial state, steps and the queries and
/// defaults carried by its file.
#[derive(Clone, Debug)]
pub struct Scenario<S> {
    spec: ScenarioFile,
    layout: Arc<SpaceLayout>,
    initial: StateVector<S>,
    steps: Vec<Step<S>>,
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::InvalidScenario(msg.into())
}

fn isometry<S: Scalar>(layout: &SpaceLayout, targets: &[String], pairs: &[PairSpec]) -> Result<PartialIsometry<S>, ExperimentError> {
    let t = layout.indices_of(targets)?;
    let pairs = pairs
        .iter()
        .map(|p| Ok((local_vector(layout, &t, &p.input)?, local_vector(layout, &t, &p.output)?)))
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(PartialIsometry::new(t, pairs)?)
}

fn followup<S: Scalar>(layout: &SpaceLayout, f: &FollowupSpec) -> Result<Followup<S>, ExperimentError> {
    Ok(Followup {
        name: f.name.clone(),
        map: isometry(layout, &f.targets, &f.pairs)?,
        environment: f.environment,
    })
}

impl<S: Scalar> Scenario<S> {
    pub fn from_file(spec: ScenarioFile) -> Result<Self, ExperimentError> {
        let subsystems = spec
            .layout
            .iter()
            .map(|s| Subsystem::new(&s.name, s.labels.iter().cloned(), s.role))
            .collect::<Result<Vec<_>, _>>()?;
        let layout = Arc::new(SpaceLayout::new(subsystems)?);
        let all: Vec<usize> = (0..layout.len()).collect();
        let initial: StateVector<S> = StateVector::from_entries(layout.clone(), vector_on(&layout, &all, &spec.initial)?);
        if initial.norm_sq().compare(&S::one()) != Ordering::Equal {
            return Err(invalid(format!("initial state has norm² {}", initial.norm_sq())));
        }

        let mut steps: Vec<Step<S>> = Vec::new();
        for st in &spec.steps {
            if let Some(prev) = steps.last() {
                if st.time <= prev.time {
                    return Err(invalid(format!("step {} does not come after {}", st.name, prev.name)));
                }
            }
            if steps.iter().any(|s| s.name == st.name) {
                return Err(invalid(format!("duplicate step {}", st.name)));
            }
            let kind = match &st.kind {
                StepKindSpec::Isometry { targets, pairs } => StepKind::Isometry(isometry(&layout, targets, pairs)?),
                StepKindSpec::Measure {
                    variable,
                    targets,
                    outcomes,
                    device,
                } => {
                    if steps.iter().filter_map(Step::measure).any(|m| &m.variable == variable) {
                        return Err(invalid(format!("duplicate variable {variable}")));
                    }
                    let t = layout.indices_of(targets)?;
                    let outcomes = outcomes
                        .iter()
                        .map(|o| Ok((o.label.clone(), local_vector(&layout, &t, &o.vector)?)))
                        .collect::<Result<Vec<_>, ExperimentError>>()?;
                    let basis = MeasurementBasis::new(&st.name, t, outcomes)?;
                    let pointers: Vec<(&str, &str)> =
                        device.pointers.iter().map(|(o, p)| (o.as_str(), p.as_str())).collect();
                    let device = PointerDevice::new(&layout, &device.subsystem, &device.ready, &pointers)?;
                    device.coupling(&basis)?;
                    StepKind::Measure(MeasureSpec {
                        variable: variable.clone(),
                        basis,
                        device,
                    })
                }
            };
            let then = st.then.iter().map(|f| followup(&layout, f)).collect::<Result<_, _>>()?;
            steps.push(Step {
                name: st.name.clone(),
                time: st.time,
                kind,
                then,
            });
        }

        let scenario = Scenario {
            spec,
            layout,
            initial,
            steps,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        for (a, b) in &self.spec.swappable {
            for n in [a, b] {
                self.measure_step(n)?;
            }
            if a == b {
                return Err(invalid(format!("step {a} cannot swap with itself")));
            }
        }
        for n in &self.spec.readout {
            self.measure_step(n)?;
        }
        let schedule = self.schedule(&self.spec.policy)?;
        for v in &self.spec.stop_when {
            self.resolve(v, &schedule)?;
        }
        for q in &self.spec.queries {
            for v in q.variables() {
                self.resolve(v, &schedule)?;
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        Self::from_file(ScenarioFile::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Format(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn spec(&self) -> &ScenarioFile {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn notes(&self) -> &[String] {
        &self.spec.notes
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn initial(&self) -> &StateVector<S> {
        &self.initial
    }

    pub fn steps(&self) -> &[Step<S>] {
        &self.steps
    }

    pub fn swappable(&self) -> &[(String, String)] {
        &self.spec.swappable
    }

    pub fn readout(&self) -> &[String] {
        &self.spec.readout
    }

    pub fn stop_when(&self) -> &[VarRef] {
        &self.spec.stop_when
    }

    pub fn default_policy(&self) -> &CollapsePolicy {
        &self.spec.policy
    }

    pub fn queries(&self) -> &[Query] {
        &self.spec.queries
    }

    pub fn step_index(&self, name: &str) -> Result<usize, ExperimentError> {
        self.steps
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| ExperimentError::UnknownStep(name.to_string()))
    }

    fn measure_step(&self, name: &str) -> Result<(usize, &MeasureSpec<S>), ExperimentError> {
        let i = self.step_index(name)?;
        match self.steps[i].measure() {
            Some(m) => Ok((i, m)),
            None => Err(invalid(format!("step {name} is not a measurement"))),
        }
    }

    /// Index of the measurement step recording `variable`.
    pub fn variable_step(&self, variable: &str) -> Result<usize, ExperimentError> {
        self.steps
            .iter()
            .position(|s| s.measure().is_some_and(|m| m.variable == variable))
            .ok_or_else(|| ExperimentError::UnknownVariable(variable.to_string()))
    }

    pub fn measure_of(&self, step: usize) -> &MeasureSpec<S> {
        self.steps[step].measure().expect("step is a measurement")
    }

    /// Places every step in its time slot under `policy`. Swapped steps
    /// exchange slots.
    pub fn schedule(&self, policy: &CollapsePolicy) -> Result<Schedule, ExperimentError> {
        for name in policy.modes.keys() {
            self.measure_step(name)
                .map_err(|_| ExperimentError::InvalidPolicy(format!("{name} is not a measurement step")))?;
        }
        let mut times: Vec<usize> = self.steps.iter().map(|s| s.time).collect();
        let mut used: Vec<usize> = Vec::new();
        for (a, b) in &policy.swaps {
            let declared = self
                .spec
                .swappable
                .iter()
                .any(|(x, y)| (x == a && y == b) || (x == b && y == a));
            if !declared {
                return Err(ExperimentError::InvalidPolicy(format!("{a} and {b} are not declared swappable")));
            }
            let (i, j) = (self.step_index(a)?, self.step_index(b)?);
            if used.contains(&i) || used.contains(&j) {
                return Err(ExperimentError::InvalidPolicy(format!("{a} or {b} is swapped twice")));
            }
            used.extend([i, j]);
            times.swap(i, j);
        }
        Ok(Schedule::new(
            self.steps
                .iter()
                .enumerate()
                .map(|(i, s)| Scheduled {
                    step: i,
                    time: times[i],
                    mode: policy.mode_of(&s.name),
                })
                .collect(),
        ))
    }

    /// Layer of a time reference under `schedule`.
    pub fn layer(&self, time: &TimeRef, schedule: &Schedule) -> Result<usize, ExperimentError> {
        match time {
            TimeRef::Init => Ok(0),
            TimeRef::Index(t) => schedule
                .layer_of_time(*t)
                .ok_or_else(|| ExperimentError::UnknownTime(time.to_string())),
            TimeRef::Step(name) => {
                let i = self.step_index(name).map_err(|_| ExperimentError::UnknownTime(name.clone()))?;
                Ok(schedule.layer_of_step(i).expect("every step is scheduled"))
            }
        }
    }

    /// Resolves variable, outcome (matched case-insensitively against
    /// outcome labels, then pointer labels) and layer. Without an explicit time the
    /// variable is read right after its own step.
    pub fn resolve(&self, v: &VarRef, schedule: &Schedule) -> Result<ResolvedVar, ExperimentError> {
        let step = self.variable_step(&v.variable)?;
        let m = self.measure_of(step);
        let want = fold_label(&v.outcome);
        let dev = m.device.device();
        let pointers = m.device.pointers();
        let (outcome, pointer) = pointers
            .iter()
            .find(|(o, _)| fold_label(o) == want)
            .or_else(|| pointers.iter().find(|(_, p)| fold_label(self.layout.label(dev, *p)) == want))
            .ok_or_else(|| ExperimentError::UnknownOutcome {
                variable: v.variable.clone(),
                outcome: v.outcome.clone(),
            })?;
        let layer = match &v.time {
            Some(t) => self.layer(t, schedule)?,
            None => schedule.layer_of_step(step).expect("every step is scheduled"),
        };
        Ok(ResolvedVar {
            step,
            variable: v.variable.clone(),
            outcome: outcome.clone(),
            pointer: *pointer,
            layer,
        })
    }

    /// Parses `all-premeasure`, `all-projective` or
    /// `custom:<step>=<mode>,...`. Swaps and the external-record flag are
    /// taken from `base`.
    pub fn parse_policy(&self, text: &str, base: &CollapsePolicy) -> Result<CollapsePolicy, ExperimentError> {
        let mut policy = CollapsePolicy {
            modes: Default::default(),
            swaps: base.swaps.clone(),
            external_record: base.external_record,
        };
        match text.trim() {
            "all-premeasure" => {}
            "all-projective" => {
                for s in self.steps.iter().filter(|s| s.measure().is_some()) {
                    policy = policy.with_mode(&s.name, Mode::Projective);
                }
            }
            other => {
                let body = other
                    .strip_prefix("custom:")
                    .ok_or_else(|| ExperimentError::InvalidPolicy(other.to_string()))?;
                for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let (step, mode) = part
                        .split_once('=')
                        .ok_or_else(|| ExperimentError::InvalidPolicy(part.to_string()))?;
                    let mode = match mode.trim() {
                        "premeasure" => Mode::Premeasure,
                        "projective" => Mode::Projective,
                        m => return Err(ExperimentError::InvalidPolicy(format!("unknown mode {m}"))),
                    };
                    let step = step.trim();
                    self.measure_step(step)
                        .map_err(|_| ExperimentError::InvalidPolicy(format!("{step} is not a measurement step")))?;
                    policy = policy.with_mode(step, mode);
                }
            }
        }
        Ok(policy)
    }

    /// Same scenario with one step removed, together with every reference
    /// to it.
    pub fn without_step(&self, name: &str) -> Result<Self, ExperimentError> {
        let i = self.step_index(name)?;
        let mut spec = self.spec.clone();
        let var = self.steps[i].measure().map(|m| m.variable.clone());
        spec.steps.retain(|s| s.name != name);
        spec.readout.retain(|s| s != name);
        spec.swappable.retain(|(a, b)| a != name && b != name);
        spec.policy.modes.remove(name);
        spec.policy.swaps.retain(|(a, b)| a != name && b != name);
        if let Some(var) = var {
            spec.stop_when.retain(|v| v.variable != var);
            spec.queries.retain(|q| q.variables().iter().all(|v| v.variable != var));
        }
        spec.name = format!("{}-without-{name}", spec.name);
        Self::from_file(spec)
    }
}
