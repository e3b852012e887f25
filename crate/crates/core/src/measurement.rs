//! Measurement as premeasurement (unitary pointer coupling), as projection
//! with Born weights, and as seeded random collapse.

use rand::Rng;
use thiserror::Error;

use crate::hilbert::{
    check_orthonormal, project_onto, HilbertError, LocalVector, PartialIsometry, SpaceLayout, StateVector,
};
use crate::numerics::{Amplitude, Scalar};

/// Reserved outcome carrying the weight outside the span of a partial basis.
pub const NULL_OUTCOME: &str = "∅";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasurementError {
    #[error("basis has no outcome {0:?}")]
    UnknownOutcome(String),
    #[error("outcome label {0:?} is repeated or reserved")]
    BadOutcomeLabel(String),
    #[error("basis {0:?} is not orthonormal")]
    NonOrthonormal(String),
    #[error("bases act on overlapping subsystems")]
    OverlappingTargets,
    #[error("invalid pointer device: {0}")]
    InvalidDevice(String),
    #[error("device is not in its ready state at {0}")]
    DeviceNotReady(String),
    #[error("cannot collapse a state of zero norm")]
    ZeroNorm,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

impl MeasurementError {
    pub fn name(&self) -> &'static str {
        match self {
            MeasurementError::UnknownOutcome(_) => "UnknownOutcome",
            MeasurementError::BadOutcomeLabel(_) => "BadOutcomeLabel",
            MeasurementError::NonOrthonormal(_) => "NonOrthonormal",
            MeasurementError::OverlappingTargets => "OverlappingTargets",
            MeasurementError::InvalidDevice(_) => "InvalidDevice",
            MeasurementError::DeviceNotReady(_) => "DeviceNotReady",
            MeasurementError::ZeroNorm => "ZeroNorm",
            MeasurementError::Hilbert(e) => e.name(),
        }
    }
}

/// Orthonormal outcome vectors on a set of target subsystems. The vectors
/// may span a proper subspace of the targets.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis<S> {
    name: String,
    targets: Vec<usize>,
    outcomes: Vec<(String, LocalVector<S>)>,
}

impl<S: Scalar> MeasurementBasis<S> {
    pub fn new(name: &str, targets: Vec<usize>, outcomes: Vec<(String, LocalVector<S>)>) -> Result<Self, MeasurementError> {
        for (i, (label, v)) in outcomes.iter().enumerate() {
            if label == NULL_OUTCOME || outcomes[..i].iter().any(|(l, _)| l == label) {
                return Err(MeasurementError::BadOutcomeLabel(label.clone()));
            }
            if v.targets() != targets.as_slice() {
                return Err(HilbertError::TargetMismatch.into());
            }
        }
        let vectors: Vec<_> = outcomes.iter().map(|(_, v)| v).collect();
        check_orthonormal(&vectors).map_err(|_| MeasurementError::NonOrthonormal(name.to_string()))?;
        Ok(MeasurementBasis {
            name: name.to_string(),
            targets,
            outcomes,
        })
    }

    /// The label basis of a single subsystem, restricted to `labels`.
    pub fn labels_of(layout: &SpaceLayout, name: &str, subsystem: usize, labels: &[(String, usize)]) -> Result<Self, MeasurementError> {
        let _ = layout.subsystem(subsystem);
        let outcomes = labels
            .iter()
            .map(|(l, idx)| (l.clone(), LocalVector::basis(vec![subsystem], vec![*idx])))
            .collect();
        Self::new(name, vec![subsystem], outcomes)
    }

    /// The complete label basis of one subsystem, outcome labels equal to
    /// the subsystem's labels.
    pub fn computational(layout: &SpaceLayout, subsystem: usize) -> Self {
        let sub = layout.subsystem(subsystem);
        let labels: Vec<(String, usize)> = sub.labels().iter().cloned().zip(0..).collect();
        Self::labels_of(layout, sub.name(), subsystem, &labels).expect("label kets are orthonormal")
    }

    /// Joint basis on disjoint targets; outcome labels are `a,b`.
    pub fn product(&self, other: &Self) -> Result<Self, MeasurementError> {
        if self.targets.iter().any(|t| other.targets.contains(t)) {
            return Err(MeasurementError::OverlappingTargets);
        }
        let mut targets = self.targets.clone();
        targets.extend_from_slice(&other.targets);
        let mut outcomes = Vec::new();
        for (la, va) in &self.outcomes {
            for (lb, vb) in &other.outcomes {
                outcomes.push((format!("{la},{lb}"), va.tensor(vb)));
            }
        }
        Self::new(&format!("{}*{}", self.name, other.name), targets, outcomes)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn outcomes(&self) -> &[(String, LocalVector<S>)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn outcome(&self, label: &str) -> Option<&LocalVector<S>> {
        self.outcomes.iter().find(|(l, _)| l == label).map(|(_, v)| v)
    }
}

/// A register that moves from `ready` to the pointer label of the outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointerDevice {
    device: usize,
    ready: usize,
    pointers: Vec<(String, usize)>,
}

impl PointerDevice {
    pub fn new(layout: &SpaceLayout, device: &str, ready: &str, pointers: &[(&str, &str)]) -> Result<Self, MeasurementError> {
        let d = layout.index_of(device)?;
        let sub = layout.subsystem(d);
        let ready_idx = sub.label_index(ready)?;
        let mut resolved: Vec<(String, usize)> = Vec::new();
        for (outcome, label) in pointers {
            let idx = sub.label_index(label)?;
            if idx == ready_idx || resolved.iter().any(|(o, i)| *i == idx || o == outcome) {
                return Err(MeasurementError::InvalidDevice(format!(
                    "pointer labels of {device} must be distinct from each other and from {ready}"
                )));
            }
            resolved.push((outcome.to_string(), idx));
        }
        Ok(PointerDevice {
            device: d,
            ready: ready_idx,
            pointers: resolved,
        })
    }

    pub fn device(&self) -> usize {
        self.device
    }

    pub fn ready(&self) -> usize {
        self.ready
    }

    pub fn pointers(&self) -> &[(String, usize)] {
        &self.pointers
    }

    pub fn pointer_for(&self, outcome: &str) -> Option<usize> {
        self.pointers.iter().find(|(o, _)| o == outcome).map(|(_, i)| *i)
    }

    pub fn outcome_for(&self, label: usize) -> Option<&str> {
        self.pointers.iter().find(|(_, i)| *i == label).map(|(o, _)| o.as_str())
    }

    /// Reading the device: outcome `k` is the pointer ket `|pointer_k⟩`.
    pub fn readout_basis<S: Scalar>(&self, layout: &SpaceLayout) -> MeasurementBasis<S> {
        let name = format!("{}-readout", layout.subsystem(self.device).name());
        MeasurementBasis::labels_of(layout, &name, self.device, &self.pointers).expect("pointer kets are orthonormal")
    }

    /// The coupling `b_k ⊗ |ready⟩ ↦ b_k ⊗ |pointer_k⟩` as a partial isometry.
    pub fn coupling<S: Scalar>(&self, basis: &MeasurementBasis<S>) -> Result<PartialIsometry<S>, MeasurementError> {
        if basis.targets().contains(&self.device) {
            return Err(MeasurementError::InvalidDevice("device is among the measured subsystems".into()));
        }
        let mut targets = basis.targets().to_vec();
        targets.push(self.device);
        let mut pairs = Vec::new();
        for (label, v) in basis.outcomes() {
            let pointer = self
                .pointer_for(label)
                .ok_or_else(|| MeasurementError::InvalidDevice(format!("no pointer for outcome {label:?}")))?;
            let ready = LocalVector::basis(vec![self.device], vec![self.ready]);
            let moved = LocalVector::basis(vec![self.device], vec![pointer]);
            pairs.push((v.tensor(&ready), v.tensor(&moved)));
        }
        Ok(PartialIsometry::new(targets, pairs)?)
    }
}

/// Couples the device to the measured subsystems without collapse:
/// `Σ_k P_k s ⊗ |pointer_k⟩`.
pub fn premeasure<S: Scalar>(
    s: &StateVector<S>,
    basis: &MeasurementBasis<S>,
    device: &PointerDevice,
) -> Result<StateVector<S>, MeasurementError> {
    if let Some((k, _)) = s.entries().find(|(k, _)| k[device.device] != device.ready) {
        return Err(MeasurementError::DeviceNotReady(s.layout().render_key(k)));
    }
    Ok(device.coupling(basis)?.apply(s)?)
}

/// Component of `s` along an outcome (or along the complement, for
/// [`NULL_OUTCOME`]) and its squared norm.
pub fn project<S: Scalar>(
    s: &StateVector<S>,
    basis: &MeasurementBasis<S>,
    outcome: &str,
) -> Result<(StateVector<S>, S), MeasurementError> {
    let family: Vec<&LocalVector<S>> = if outcome == NULL_OUTCOME {
        basis.outcomes().iter().map(|(_, v)| v).collect()
    } else {
        vec![basis.outcome(outcome).ok_or_else(|| MeasurementError::UnknownOutcome(outcome.to_string()))?]
    };
    let mut out = StateVector::zero(s.layout().clone());
    for (rest, local) in s.split(basis.targets()) {
        let projected = project_onto(&local, &family);
        if outcome == NULL_OUTCOME {
            let mut residual = local.clone();
            residual.add_scaled(&-Amplitude::real(S::one()), &projected);
            out.embed(&rest, &residual);
        } else {
            out.embed(&rest, &projected);
        }
    }
    let weight = out.norm_sq();
    Ok((out, weight))
}

/// Born weights per outcome, in basis order, followed by [`NULL_OUTCOME`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeWeights<S> {
    entries: Vec<(String, S)>,
}

impl<S: Scalar> OutcomeWeights<S> {
    pub fn get(&self, label: &str) -> Option<&S> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, w)| w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &S)> {
        self.entries.iter().map(|(l, w)| (l.as_str(), w))
    }

    pub fn total(&self) -> S {
        self.entries.iter().fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn born_distribution<S: Scalar>(s: &StateVector<S>, basis: &MeasurementBasis<S>) -> OutcomeWeights<S> {
    let mut entries = Vec::with_capacity(basis.outcomes().len() + 1);
    for label in basis.labels().chain(std::iter::once(NULL_OUTCOME)) {
        let (_, w) = project(s, basis, label).expect("label taken from the basis");
        entries.push((label.to_string(), w));
    }
    OutcomeWeights { entries }
}

/// Result of a sampled collapse.
#[derive(Clone, Debug)]
pub struct Collapse<S> {
    pub outcome: String,
    /// Normalized when the weight has a representable square root,
    /// otherwise the unnormalized projection.
    pub state: StateVector<S>,
    pub weight: S,
    pub normalized: bool,
}

impl<S: Scalar> PartialEq for Collapse<S> {
    fn eq(&self, other: &Self) -> bool {
        self.outcome == other.outcome
            && self.state == other.state
            && self.weight == other.weight
            && self.normalized == other.normalized
    }
}

/// Draws an outcome with Born probability and returns the collapsed state.
pub fn sample_collapse<S: Scalar, R: Rng + ?Sized>(
    s: &StateVector<S>,
    basis: &MeasurementBasis<S>,
    rng: &mut R,
) -> Result<Collapse<S>, MeasurementError> {
    let total = s.norm_sq();
    if total.is_negligible() {
        return Err(MeasurementError::ZeroNorm);
    }
    let weights = born_distribution(s, basis);
    let u: f64 = rng.random::<f64>() * total.to_f64();
    let mut acc = 0.0;
    let mut chosen = None;
    for (label, w) in weights.iter() {
        let p = w.to_f64();
        if p <= 0.0 {
            continue;
        }
        chosen = Some(label.to_string());
        acc += p;
        if u < acc {
            break;
        }
    }
    let outcome = chosen.ok_or(MeasurementError::ZeroNorm)?;
    let (projected, weight) = project(s, basis, &outcome)?;
    let scale = weight.try_sqrt().and_then(|r| r.try_recip());
    let (state, normalized) = match scale {
        Some(k) => (projected.scale(&Amplitude::real(k)), true),
        None => (projected, false),
    };
    Ok(Collapse {
        outcome,
        state,
        weight,
        normalized,
    })
}
