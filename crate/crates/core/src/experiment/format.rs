//! JSON scenario documents.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CollapsePolicy, ExperimentError, Query, VarRef};
use crate::hilbert::{BasisKey, LocalVector, Role, SpaceLayout};
use crate::numerics::{Amplitude, Rational, Scalar};

/// Version tag written into every exported document.
pub const SCHEMA_VERSION: &str = "wignerlab/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub layout: Vec<SubsystemSpec>,
    pub initial: Vec<EntrySpec>,
    pub steps: Vec<StepSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub swappable: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub readout: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stop_when: Vec<VarRef>,
    #[serde(default)]
    pub policy: CollapsePolicy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub queries: Vec<Query>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario files serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsystemSpec {
    pub name: String,
    pub labels: Vec<String>,
    #[serde(default)]
    pub role: Role,
}

/// One term of a vector: amplitude times the ket of `labels`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    pub amplitude: AmplitudeSpec,
    pub labels: Vec<String>,
}

/// `rational · √radicand`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub rational: String,
    #[serde(default = "one")]
    pub radicand: u64,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Term(TermSpec),
    Sum(Vec<TermSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmplitudeSpec {
    Complex { re: RealSpec, im: RealSpec },
    Real(RealSpec),
}

impl TermSpec {
    pub fn new(rational: &str, radicand: u64) -> Self {
        TermSpec {
            rational: rational.to_string(),
            radicand,
        }
    }

    pub fn value<S: Scalar>(&self) -> Result<S, ExperimentError> {
        let r = Rational::from_str(self.rational.trim())
            .map_err(|_| ExperimentError::Format(format!("bad rational {:?}", self.rational)))?;
        let root = S::sqrt_rational(&Rational::from_integer(self.radicand.into()))?;
        Ok(S::from_rational(&r) * root)
    }
}

impl RealSpec {
    pub fn value<S: Scalar>(&self) -> Result<S, ExperimentError> {
        match self {
            RealSpec::Term(t) => t.value(),
            RealSpec::Sum(ts) => ts.iter().try_fold(S::zero(), |acc, t| Ok(acc + t.value::<S>()?)),
        }
    }
}

impl AmplitudeSpec {
    /// `rational · √radicand` as a real amplitude.
    pub fn term(rational: &str, radicand: u64) -> Self {
        AmplitudeSpec::Real(RealSpec::Term(TermSpec::new(rational, radicand)))
    }

    pub fn value<S: Scalar>(&self) -> Result<Amplitude<S>, ExperimentError> {
        match self {
            AmplitudeSpec::Real(r) => Ok(Amplitude::real(r.value()?)),
            AmplitudeSpec::Complex { re, im } => Ok(Amplitude::new(re.value()?, im.value()?)),
        }
    }
}

impl EntrySpec {
    pub fn new(amplitude: AmplitudeSpec, labels: &[&str]) -> Self {
        EntrySpec {
            amplitude,
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub input: Vec<EntrySpec>,
    pub output: Vec<EntrySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub label: String,
    pub vector: Vec<EntrySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub subsystem: String,
    pub ready: String,
    /// `(outcome label, device label)` in basis order.
    pub pointers: Vec<(String, String)>,
}

/// An isometry run right after a step, in the same time slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FollowupSpec {
    pub name: String,
    pub targets: Vec<String>,
    pub pairs: Vec<PairSpec>,
    /// Runs only under policies with the external record switched on.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub environment: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StepKindSpec {
    Isometry {
        targets: Vec<String>,
        pairs: Vec<PairSpec>,
    },
    Measure {
        variable: String,
        targets: Vec<String>,
        outcomes: Vec<OutcomeSpec>,
        device: DeviceSpec,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    pub name: String,
    pub time: usize,
    #[serde(flatten)]
    pub kind: StepKindSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub then: Vec<FollowupSpec>,
}

pub(crate) fn vector_on<S: Scalar>(
    layout: &SpaceLayout,
    targets: &[usize],
    entries: &[EntrySpec],
) -> Result<Vec<(BasisKey, Amplitude<S>)>, ExperimentError> {
    entries
        .iter()
        .map(|e| Ok((layout.key_for(targets, &e.labels)?, e.amplitude.value()?)))
        .collect()
}

pub(crate) fn local_vector<S: Scalar>(
    layout: &SpaceLayout,
    targets: &[usize],
    entries: &[EntrySpec],
) -> Result<LocalVector<S>, ExperimentError> {
    Ok(LocalVector::from_entries(targets.to_vec(), vector_on(layout, targets, entries)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::FieldScalar;

    #[test]
    fn amplitude_forms() {
        let a: AmplitudeSpec = serde_json::from_str(r#"{"rational":"1/3","radicand":6}"#).unwrap();
        assert_eq!(a.value::<FieldScalar>().unwrap().re.to_string(), "1/3*sqrt6");
        let b: AmplitudeSpec =
            serde_json::from_str(r#"[{"rational":"1/2"},{"rational":"-1/4","radicand":12}]"#).unwrap();
        assert_eq!(b.value::<FieldScalar>().unwrap().re.to_string(), "1/2 - 1/2*sqrt3");
        let c: AmplitudeSpec =
            serde_json::from_str(r#"{"re":{"rational":"0"},"im":{"rational":"1","radicand":2}}"#).unwrap();
        let v = c.value::<f64>().unwrap();
        assert_eq!(v.re, 0.0);
        assert!((v.im - 2f64.sqrt()).abs() < 1e-15);
        let bad = AmplitudeSpec::term("1", 5);
        assert!(matches!(bad.value::<FieldScalar>(), Err(ExperimentError::Numerics(_))));
        assert!((bad.value::<f64>().unwrap().re - 5f64.sqrt()).abs() < 1e-15);
    }
}
