use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// How a measurement step acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Unitary pointer coupling, all branches kept.
    #[default]
    Premeasure,
    /// Coupling followed by a split into one world per pointer outcome.
    Projective,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Premeasure => "premeasure",
            Mode::Projective => "projective",
        })
    }
}

/// Per-step modes (missing steps premeasure), swapped step pairs and the
/// environment-record toggle.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CollapsePolicy {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modes: BTreeMap<String, Mode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub swaps: Vec<(String, String)>,
    #[serde(default)]
    pub external_record: bool,
}

impl CollapsePolicy {
    pub fn all_premeasure() -> Self {
        Self::default()
    }

    pub fn mode_of(&self, step: &str) -> Mode {
        self.modes.get(step).copied().unwrap_or_default()
    }

    pub fn with_mode(mut self, step: &str, mode: Mode) -> Self {
        if mode == Mode::Premeasure {
            self.modes.remove(step);
        } else {
            self.modes.insert(step.to_string(), mode);
        }
        self
    }

    pub fn with_swap(mut self, a: &str, b: &str) -> Self {
        self.swaps.push((a.to_string(), b.to_string()));
        self
    }

    pub fn with_external_record(mut self, on: bool) -> Self {
        self.external_record = on;
        self
    }

    pub fn is_unitary(&self) -> bool {
        self.modes.values().all(|m| *m == Mode::Premeasure)
    }

    /// Short text form, e.g. `custom:fbar=projective; swap wbar<->w`.
    pub fn describe(&self) -> String {
        let mut out = if self.is_unitary() {
            "all-premeasure".to_string()
        } else {
            let parts: Vec<String> = self
                .modes
                .iter()
                .filter(|(_, m)| **m == Mode::Projective)
                .map(|(s, m)| format!("{s}={m}"))
                .collect();
            format!("custom:{}", parts.join(","))
        };
        for (a, b) in &self.swaps {
            out.push_str(&format!("; swap {a}<->{b}"));
        }
        if self.external_record {
            out.push_str("; external-record");
        }
        out
    }
}

/// A step placed in its time slot with its resolved mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scheduled {
    pub step: usize,
    pub time: usize,
    pub mode: Mode,
}

/// Steps in execution order. Layer 0 is the initial state, layer `k + 1`
/// the state after the `k`-th scheduled step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    entries: Vec<Scheduled>,
}

impl Schedule {
    pub(crate) fn new(mut entries: Vec<Scheduled>) -> Self {
        entries.sort_by_key(|e| e.time);
        Schedule { entries }
    }

    pub fn entries(&self) -> &[Scheduled] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn layers(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn layer_of_time(&self, time: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.time == time).map(|p| p + 1)
    }

    pub fn layer_of_step(&self, step: usize) -> Option<usize> {
        self.entries.iter().position(|e| e.step == step).map(|p| p + 1)
    }

    /// Time index of a layer, `None` for the initial layer.
    pub fn time_of_layer(&self, layer: usize) -> Option<usize> {
        layer.checked_sub(1).map(|p| self.entries[p].time)
    }

    pub fn layer_name(&self, layer: usize) -> String {
        match self.time_of_layer(layer) {
            None => "init".to_string(),
            Some(t) => format!("t{t}"),
        }
    }
}
