use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;

/// A point in the protocol: before the first step, a time index, or the
/// time slot a named step occupies under the active schedule.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TimeRef {
    Init,
    Index(usize),
    Step(String),
}

impl FromStr for TimeRef {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ExperimentError::Parse(s.to_string()));
        }
        if s.eq_ignore_ascii_case("init") {
            return Ok(TimeRef::Init);
        }
        if let Some(rest) = s.strip_prefix('t').or_else(|| s.strip_prefix('T')) {
            if let Ok(i) = rest.parse::<usize>() {
                return Ok(TimeRef::Index(i));
            }
        }
        Ok(TimeRef::Step(s.to_string()))
    }
}

impl fmt::Display for TimeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeRef::Init => f.write_str("init"),
            TimeRef::Index(i) => write!(f, "t{i}"),
            TimeRef::Step(s) => f.write_str(s),
        }
    }
}

/// `variable=outcome[@time]`, e.g. `w=OK@t4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct VarRef {
    pub variable: String,
    pub outcome: String,
    pub time: Option<TimeRef>,
}

impl VarRef {
    pub fn new(variable: &str, outcome: &str) -> Self {
        VarRef {
            variable: variable.to_string(),
            outcome: outcome.to_string(),
            time: None,
        }
    }

    pub fn at(mut self, time: TimeRef) -> Self {
        self.time = Some(time);
        self
    }
}

impl FromStr for VarRef {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Parse(s.to_string());
        let (variable, rest) = s.split_once('=').ok_or_else(bad)?;
        let (outcome, time) = match rest.rsplit_once('@') {
            Some((o, t)) => (o, Some(t.parse()?)),
            None => (rest, None),
        };
        let (variable, outcome) = (variable.trim(), outcome.trim());
        if variable.is_empty() || outcome.is_empty() {
            return Err(bad());
        }
        Ok(VarRef {
            variable: variable.to_string(),
            outcome: outcome.to_string(),
            time,
        })
    }
}

impl TryFrom<String> for VarRef {
    type Error = ExperimentError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<VarRef> for String {
    fn from(v: VarRef) -> String {
        v.to_string()
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.outcome)?;
        if let Some(t) = &self.time {
            write!(f, "@{t}")?;
        }
        Ok(())
    }
}

/// Case-insensitive key for matching outcome and pointer labels; a
/// combining macron is spelled `bar`.
pub fn fold_label(s: &str) -> String {
    s.trim().to_lowercase().replace('\u{0304}', "bar")
}

/// What the paper says a query should evaluate to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Holds,
    Fails,
    Positive,
    Zero,
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expect::Holds => "holds",
            Expect::Fails => "fails",
            Expect::Positive => "positive",
            Expect::Zero => "zero",
        })
    }
}

/// A named analysis request carried by a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Query {
    Implication {
        id: String,
        antecedent: VarRef,
        consequent: VarRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Expect>,
    },
    Probability {
        id: String,
        event: Vec<VarRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<Expect>,
    },
}

impl Query {
    pub fn id(&self) -> &str {
        match self {
            Query::Implication { id, .. } | Query::Probability { id, .. } => id,
        }
    }

    pub fn expect(&self) -> Option<Expect> {
        match self {
            Query::Implication { expect, .. } | Query::Probability { expect, .. } => *expect,
        }
    }

    pub fn variables(&self) -> Vec<&VarRef> {
        match self {
            Query::Implication {
                antecedent, consequent, ..
            } => vec![antecedent, consequent],
            Query::Probability { event, .. } => event.iter().collect(),
        }
    }

    pub fn statement(&self) -> String {
        match self {
            Query::Implication {
                antecedent, consequent, ..
            } => format!("{antecedent} => {consequent}"),
            Query::Probability { event, .. } => {
                let parts: Vec<String> = event.iter().map(ToString::to_string).collect();
                format!("P({})", parts.join(" & "))
            }
        }
    }
}
