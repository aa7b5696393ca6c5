//! Machine-readable check outcomes.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::certificate::{Counterexample, Inclusion};
use crate::function::EpiPointedCertificate;
use crate::sup::DecompositionWitness;
use crate::vector::QVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    HypothesesNotMet,
    TrivialPass,
}

impl CheckStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::HypothesesNotMet => "hypotheses-not-met",
            CheckStatus::TrivialPass => "trivial-pass",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Decomposition(DecompositionWitness),
    Decompositions { witnesses: Vec<DecompositionWitness> },
    Point { point: QVector },
    EpiPointed(EpiPointedCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub identity: String,
    pub instance_digest: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time; kept out of the serialized form so reports are reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn is_fail(&self) -> bool {
        self.status == CheckStatus::Fail
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn digest_of<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("value serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Accumulates sub-check outcomes into one report; the first failure wins.
pub struct Checker {
    identity: String,
    digest: String,
    notes: Vec<String>,
    failure: Option<Counterexample>,
    witness: Option<Witness>,
    start: Instant,
}

impl Checker {
    pub fn new(identity: impl Into<String>, digest: impl Into<String>) -> Self {
        Checker {
            identity: identity.into(),
            digest: digest.into(),
            notes: Vec::new(),
            failure: None,
            witness: None,
            start: Instant::now(),
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn set_witness(&mut self, w: Witness) {
        self.witness = Some(w);
    }

    pub fn require(&mut self, what: &str, inc: Inclusion) {
        if let Inclusion::Violated(cx) = inc {
            self.fail(cx.with_reason(what));
        }
    }

    pub fn require_that(&mut self, what: &str, ok: bool, cx: impl FnOnce() -> Counterexample) {
        if !ok {
            self.fail(cx().with_reason(what));
        }
    }

    pub fn fail(&mut self, cx: Counterexample) {
        if self.failure.is_none() {
            self.failure = Some(cx);
        }
    }

    fn build(self, status: CheckStatus) -> CheckReport {
        CheckReport {
            identity: self.identity,
            instance_digest: self.digest,
            status,
            witness: self.witness,
            counterexample: self.failure,
            notes: self.notes,
            elapsed: self.start.elapsed(),
        }
    }

    pub fn finish(self) -> CheckReport {
        let status = if self.failure.is_some() { CheckStatus::Fail } else { CheckStatus::Pass };
        self.build(status)
    }

    pub fn hypotheses_not_met(mut self, reason: impl Into<String>) -> CheckReport {
        self.notes.push(reason.into());
        self.failure = None;
        self.build(CheckStatus::HypothesesNotMet)
    }

    pub fn trivial(mut self, reason: impl Into<String>) -> CheckReport {
        self.notes.push(reason.into());
        if self.failure.is_some() {
            return self.build(CheckStatus::Fail);
        }
        self.build(CheckStatus::TrivialPass)
    }
}
