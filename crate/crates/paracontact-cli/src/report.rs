//! JSON report emitted by `classify`, `verify` and `deform`.
//!
//! The layout is described by `report.schema.json` next to this crate's manifest.

use paracontact::{Flavor, KappaMuReport, MetricParams, ParacontactStructure, StructureClass};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Diagnostic,
    InvariantFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Diagnostic => 2,
            Status::InvariantFailure => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn measured(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let status = if residual <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name: name.into(),
            residual: Some(residual),
            tolerance,
            status,
            note: None,
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, note: String) -> Self {
        Check {
            name: name.into(),
            residual: None,
            tolerance,
            status: CheckStatus::Fail,
            note: Some(note),
        }
    }

    pub fn skipped(name: impl Into<String>, tolerance: f64, note: String) -> Self {
        Check {
            name: name.into(),
            residual: None,
            tolerance,
            status: CheckStatus::Skipped,
            note: Some(note),
        }
    }
}

/// Echo of the command line.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Inputs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    pub flavor: String,
    pub model: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dhom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureSummary {
    pub flavor: Flavor,
    pub params: MetricParams,
    pub rho: f64,
    pub alpha: f64,
    pub phi: f64,
}

impl From<&ParacontactStructure> for StructureSummary {
    fn from(s: &ParacontactStructure) -> Self {
        StructureSummary {
            flavor: s.flavor(),
            params: *s.params(),
            rho: s.rho(),
            alpha: s.alpha(),
            phi: s.params().phi(),
        }
    }
}

/// A structure together with its classification.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub structure: StructureSummary,
    pub classification: Option<StructureClass>,
    pub kappa_mu: Option<KappaMuReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    pub kind: String,
    /// The deformed structure; the original is the report's `subject`.
    pub after: Snapshot,
    /// `(kappa, mu)` predicted for the deformed structure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_kappa_mu: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Inputs,
    pub subject: Snapshot,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deformation: Option<Deformation>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    /// Fills `status` from the checks and the classification diagnostics.
    pub fn settle(&mut self) {
        let failed = self.checks.iter().any(|c| c.status == CheckStatus::Fail);
        let diagnostic = std::iter::once(&self.subject)
            .chain(self.deformation.iter().map(|d| &d.after))
            .filter_map(|s| s.classification.as_ref())
            .any(|c| !c.diagnostics.is_empty());
        self.status = if failed {
            Status::InvariantFailure
        } else if diagnostic {
            Status::Diagnostic
        } else {
            Status::Ok
        };
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }
}
