use serde::{Deserialize, Serialize};

use crate::vector::QVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CounterexampleKind {
    Point,
    Direction,
}

/// An exact witness that an inclusion or equality fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: CounterexampleKind,
    pub vector: QVector,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_certificate: Option<QVector>,
}

impl Counterexample {
    pub fn point(vector: QVector, reason: impl Into<String>) -> Self {
        Counterexample { kind: CounterexampleKind::Point, vector, reason: reason.into(), lp_certificate: None }
    }

    pub fn direction(vector: QVector, reason: impl Into<String>) -> Self {
        Counterexample { kind: CounterexampleKind::Direction, vector, reason: reason.into(), lp_certificate: None }
    }

    pub fn with_reason(mut self, prefix: &str) -> Self {
        self.reason = format!("{prefix}: {}", self.reason);
        self
    }
}

/// Outcome of an exact inclusion test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    Violated(Counterexample),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }

    pub fn counterexample(self) -> Option<Counterexample> {
        match self {
            Inclusion::Holds => None,
            Inclusion::Violated(c) => Some(c),
        }
    }
}
