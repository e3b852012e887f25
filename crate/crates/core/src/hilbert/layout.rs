use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::HilbertError;

/// What a subsystem stands for; used to pick the registers that analyses
/// treat as records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    System,
    Record,
    Environment,
}

/// A named tensor factor with labeled basis states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    name: String,
    labels: Vec<String>,
    role: Role,
}

impl Subsystem {
    pub fn new<I, L>(name: &str, labels: I, role: Role) -> Result<Self, HilbertError>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(HilbertError::EmptySubsystem(name.to_string()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(HilbertError::DuplicateLabel {
                    subsystem: name.to_string(),
                    label: l.clone(),
                });
            }
        }
        Ok(Subsystem {
            name: name.to_string(),
            labels,
            role,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, label: &str) -> Result<usize, HilbertError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| HilbertError::UnknownLabel {
                subsystem: self.name.clone(),
                label: label.to_string(),
            })
    }
}

/// Ordered list of subsystems; a basis state is one label index per factor.
#[derive(Clone, Debug)]
pub struct SpaceLayout {
    subsystems: Vec<Subsystem>,
    index: HashMap<String, usize>,
}

impl PartialEq for SpaceLayout {
    fn eq(&self, other: &Self) -> bool {
        self.subsystems == other.subsystems
    }
}

impl Eq for SpaceLayout {}

impl SpaceLayout {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self, HilbertError> {
        let mut index = HashMap::new();
        for (i, s) in subsystems.iter().enumerate() {
            if index.insert(s.name.clone(), i).is_some() {
                return Err(HilbertError::DuplicateName(s.name.clone()));
            }
        }
        Ok(SpaceLayout { subsystems, index })
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn subsystem(&self, i: usize) -> &Subsystem {
        &self.subsystems[i]
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    /// Total dimension, the product of the factor dimensions.
    pub fn dimension(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, HilbertError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| HilbertError::UnknownSubsystem(name.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, HilbertError> {
        let out: Vec<usize> = names
            .iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<_, _>>()?;
        for (i, t) in out.iter().enumerate() {
            if out[..i].contains(t) {
                return Err(HilbertError::DuplicateName(self.subsystems[*t].name.clone()));
            }
        }
        Ok(out)
    }

    /// Resolves one label per listed subsystem.
    pub fn key_for<S: AsRef<str>>(&self, targets: &[usize], labels: &[S]) -> Result<Vec<usize>, HilbertError> {
        if targets.len() != labels.len() {
            return Err(HilbertError::ArityMismatch {
                expected: targets.len(),
                got: labels.len(),
            });
        }
        targets
            .iter()
            .zip(labels)
            .map(|(&t, l)| self.subsystems[t].label_index(l.as_ref()))
            .collect()
    }

    /// Resolves a full label tuple.
    pub fn key<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>, HilbertError> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.key_for(&all, labels)
    }

    pub fn label(&self, subsystem: usize, index: usize) -> &str {
        &self.subsystems[subsystem].labels[index]
    }

    pub fn labels_of(&self, targets: &[usize], key: &[usize]) -> Vec<String> {
        targets
            .iter()
            .zip(key)
            .map(|(&t, &k)| self.label(t, k).to_string())
            .collect()
    }

    /// `(l1,l2,...)` for a full key.
    pub fn render_key(&self, key: &[usize]) -> String {
        let all: Vec<usize> = (0..self.len()).collect();
        format!("({})", self.labels_of(&all, key).join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_labels_and_names_rejected() {
        assert!(matches!(
            Subsystem::new("C", ["heads", "heads"], Role::System),
            Err(HilbertError::DuplicateLabel { .. })
        ));
        let c = Subsystem::new("C", ["heads", "tails"], Role::System).unwrap();
        assert!(matches!(
            SpaceLayout::new(vec![c.clone(), c]),
            Err(HilbertError::DuplicateName(_))
        ));
    }

    #[test]
    fn key_resolution() {
        let layout = SpaceLayout::new(vec![
            Subsystem::new("C", ["heads", "tails"], Role::System).unwrap(),
            Subsystem::new("R", ["BLANK", "HEADS", "TAILS"], Role::Record).unwrap(),
        ])
        .unwrap();
        assert_eq!(layout.dimension(), 6);
        assert_eq!(layout.key(&["tails", "HEADS"]).unwrap(), vec![1, 1]);
        assert!(matches!(
            layout.key(&["tails", "BANANA"]),
            Err(HilbertError::UnknownLabel { .. })
        ));
        assert_eq!(layout.render_key(&[0, 2]), "(heads,TAILS)");
    }
}
