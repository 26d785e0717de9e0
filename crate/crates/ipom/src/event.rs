//! Events, labels and concurrency lists.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A name for an event, unique within one ipomset.
///
/// Event ids appear in the JSON formats and in witness bijections; they never
/// occur in loset notation, which speaks about labels only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(String);

impl EventId {
    /// Creates an event id.  Any non-empty string is allowed.
    pub fn new(id: impl Into<String>) -> Result<Self, EventError> {
        let id = id.into();
        if id.is_empty() {
            return Err(EventError::EmptyEventId);
        }
        Ok(EventId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An action label.
///
/// Labels are restricted to identifier syntax (`[A-Za-z_][A-Za-z0-9_]*`) so
/// that every label can round-trip through the loset notation, where `.` and
/// `|` and `[` `]` are structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(label: impl Into<String>) -> Result<Self, EventError> {
        let label = label.into();
        let mut chars = label.chars();
        let head_ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        if !head_ok || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(EventError::BadLabel(label));
        }
        Ok(Label(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Label::new(raw).map_err(serde::de::Error::custom)
    }
}

/// A concurrency list: the labels of a set of concurrent events, listed in
/// event order.  Conclists are discrete ipomsets with full interfaces, but we
/// keep them as plain label sequences because that is all that starters,
/// terminators, HDA cells and ST-automaton states need.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conclist(Vec<Label>);

impl Conclist {
    pub fn new(labels: Vec<Label>) -> Self {
        Conclist(labels)
    }

    /// The empty conclist (no events running).
    pub fn empty() -> Self {
        Conclist(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn label(&self, pos: usize) -> &Label {
        &self.0[pos]
    }

    /// The conclist left after removing the positions in `remove`
    /// (a bitmask over `0..self.len()`).
    pub fn without(&self, remove: u64) -> Conclist {
        Conclist(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| remove & (1 << i) == 0)
                .map(|(_, l)| l.clone())
                .collect(),
        )
    }

    /// Checks whether `sub` occurs as the subsequence of `self` obtained by
    /// deleting exactly the positions in `removed`.
    pub fn is_without(&self, removed: u64, sub: &Conclist) -> bool {
        self.without(removed) == *sub
    }
}

impl FromIterator<Label> for Conclist {
    fn from_iter<T: IntoIterator<Item = Label>>(iter: T) -> Self {
        Conclist(iter.into_iter().collect())
    }
}

impl fmt::Display for Conclist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Errors in event or label construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("event id must be a non-empty string")]
    EmptyEventId,
    #[error("label {0:?} is not an identifier ([A-Za-z_][A-Za-z0-9_]*)")]
    BadLabel(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_syntax() {
        assert!(Label::new("a").is_ok());
        assert!(Label::new("x_1").is_ok());
        assert!(Label::new("_tmp").is_ok());
        assert!(Label::new("").is_err());
        assert!(Label::new("a b").is_err());
        assert!(Label::new("1a").is_err());
        assert!(Label::new("a.").is_err());
    }

    #[test]
    fn conclist_without() {
        let u: Conclist = ["a", "b", "c"]
            .iter()
            .map(|s| Label::new(*s).unwrap())
            .collect();
        assert_eq!(u.without(0b010).labels().len(), 2);
        assert_eq!(u.without(0b010).label(0).as_str(), "a");
        assert_eq!(u.without(0b010).label(1).as_str(), "c");
        assert!(u.is_without(0b101, &u.without(0b101)));
        assert!(!u.is_without(0b001, &u.without(0b100)));
    }
}
