use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ScaleProfile;

/// Which construction produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuaranteeKind {
    OstrandBound,
    AnnulusMult2,
    BoundedRefine,
    Paracompact,
    Inward,
    Gromov,
    Extension,
    Merge,
    Paste,
    Retraction,
}

/// One inequality (or containment) checked against the output by direct
/// computation. `guaranteed` separates claims the construction must satisfy
/// from measurements reported alongside them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckedInequality {
    pub name: String,
    pub holds: bool,
    pub guaranteed: bool,
    /// A point where the inequality is tight or fails, if meaningful.
    pub witness: Option<usize>,
    #[serde(with = "crate::ext::real")]
    pub lhs: f64,
    #[serde(with = "crate::ext::real")]
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementCertificate {
    pub kind: GuaranteeKind,
    pub input_id: String,
    pub output_id: String,
    pub checks: Vec<CheckedInequality>,
    pub notes: Vec<String>,
    /// Named profiles recorded alongside the checks.
    pub profiles: Vec<(String, ScaleProfile)>,
}

impl RefinementCertificate {
    pub fn new(kind: GuaranteeKind, input_id: String, output_id: String) -> Self {
        RefinementCertificate { kind, input_id, output_id, checks: Vec::new(), notes: Vec::new(), profiles: Vec::new() }
    }

    /// Records `lhs ≤ rhs`.
    pub fn check_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, witness: Option<usize>) {
        self.checks.push(CheckedInequality {
            name: name.into(),
            holds: lhs <= rhs,
            guaranteed: true,
            witness,
            lhs,
            rhs,
        });
    }

    /// Records a boolean property; `lhs`/`rhs` are 1/0 placeholders.
    pub fn check(&mut self, name: impl Into<String>, holds: bool, witness: Option<usize>) {
        self.checks.push(CheckedInequality {
            name: name.into(),
            holds,
            guaranteed: true,
            witness,
            lhs: if holds { 1.0 } else { 0.0 },
            rhs: 1.0,
        });
    }

    /// Records a measured `lhs ≤ rhs` that the construction does not promise.
    pub fn measure_le(&mut self, name: impl Into<String>, lhs: f64, rhs: f64, witness: Option<usize>) {
        self.checks.push(CheckedInequality {
            name: name.into(),
            holds: lhs <= rhs,
            guaranteed: false,
            witness,
            lhs,
            rhs,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// True when every guaranteed check holds.
    pub fn verified(&self) -> bool {
        self.checks.iter().filter(|c| c.guaranteed).all(|c| c.holds)
    }

    pub fn into_verified(self) -> Result<Self> {
        match self.checks.iter().find(|c| c.guaranteed && !c.holds) {
            None => Ok(self),
            Some(c) => Err(Error::Certificate(format!("{}: {} vs {} (witness {:?})", c.name, c.lhs, c.rhs, c.witness))),
        }
    }
}
