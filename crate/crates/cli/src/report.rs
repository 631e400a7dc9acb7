//! Report records and their human rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use momsep::criteria::Provenance;
use momsep::regression::RegressionReport;
use momsep::{CMatrix64, Verdict64};

use crate::config::Complex;

pub const REPORT_SCHEMA: &str = "momsep.report/1";

pub const OUTCOME_ERROR: &str = "ERROR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tol: f64,
    pub states: Vec<StateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub name: String,
    pub source: String,
    pub cutoffs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdicts: Vec<VerdictRecord>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
}

impl From<&Provenance> for ProvenanceRecord {
    fn from(p: &Provenance) -> Self {
        Self {
            class: p.class.clone(),
            r: p.r.clone(),
            map: p.map.clone(),
            side: p.side.map(|s| s.to_string()),
        }
    }
}

/// One criterion outcome, or the error that prevented it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub criterion: String,
    /// `ENTANGLED`, `INCONCLUSIVE`, `SEPARABLE` or `ERROR`.
    pub outcome: String,
    pub witness: Vec<WitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub boundary: bool,
    #[serde(default)]
    pub provenance: ProvenanceRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn matrix_rows(m: &CMatrix64) -> Vec<Vec<Complex>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl VerdictRecord {
    pub fn from_verdict(v: &Verdict64, embed_matrix: bool) -> Self {
        Self {
            criterion: v.criterion.clone(),
            outcome: v.outcome.to_string(),
            witness: v.witness.iter().map(|(n, x)| WitnessEntry { name: n.clone(), value: *x }).collect(),
            threshold: Some(v.threshold),
            tol: Some(v.tol),
            boundary: v.boundary,
            provenance: (&v.provenance).into(),
            matrix: v.matrix.as_ref().filter(|_| embed_matrix).map(matrix_rows),
            error: None,
        }
    }

    pub fn failed(criterion: &str, message: String) -> Self {
        Self {
            criterion: criterion.to_string(),
            outcome: OUTCOME_ERROR.into(),
            witness: Vec::new(),
            threshold: None,
            tol: None,
            boundary: false,
            provenance: ProvenanceRecord::default(),
            matrix: None,
            error: Some(message),
        }
    }

    pub fn is_entangled(&self) -> bool {
        self.outcome == "ENTANGLED"
    }

    pub fn is_error(&self) -> bool {
        self.outcome == OUTCOME_ERROR
    }
}

impl StateReport {
    pub fn summarize(&mut self) {
        self.summary = if let Some(e) = &self.error {
            format!("{}: state not built ({e})", self.name)
        } else {
            let hits: Vec<&str> =
                self.verdicts.iter().filter(|v| v.is_entangled()).map(|v| v.criterion.as_str()).collect();
            let errors = self.verdicts.iter().filter(|v| v.is_error()).count();
            let n = self.verdicts.len();
            let mut s = if hits.is_empty() {
                format!("{}: not detected ({n} criteria)", self.name)
            } else {
                format!("{}: ENTANGLED by {} ({} of {n} criteria)", self.name, hits.join(", "), hits.len())
            };
            if errors > 0 {
                let _ = write!(s, ", {errors} failed");
            }
            s
        };
    }
}

impl Report {
    pub fn any_entangled(&self) -> bool {
        self.states.iter().flat_map(|s| &s.verdicts).any(|v| v.is_entangled())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for s in &self.states {
            let dims: Vec<String> = s.cutoffs.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(out, "state {} [{}; cutoffs {}]", s.name, s.source, dims.join("x"));
            for v in &s.verdicts {
                let _ = write!(out, "  {:<24} {:<12}", v.criterion, v.outcome);
                if let Some(e) = &v.error {
                    let _ = write!(out, " {e}");
                }
                for w in &v.witness {
                    let _ = write!(out, " {}={:.9}", w.name, w.value);
                }
                if let (Some(t), Some(tol)) = (v.threshold, v.tol) {
                    let _ = write!(out, " (threshold {t}, tol {tol:e})");
                }
                if v.boundary {
                    out.push_str(" boundary");
                }
                let p = &v.provenance;
                let mut where_ = Vec::new();
                if let Some(c) = &p.class {
                    where_.push(format!("class {c}"));
                }
                if let Some(r) = &p.r {
                    where_.push(format!("r {r:?}"));
                }
                if let Some(m) = &p.map {
                    where_.push(format!("map {m}"));
                }
                if let Some(side) = &p.side {
                    where_.push(format!("side {side}"));
                }
                if !where_.is_empty() {
                    let _ = write!(out, " [{}]", where_.join(", "));
                }
                out.push('\n');
            }
            let _ = writeln!(out, "  summary: {}", s.summary);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRecord {
    pub name: String,
    pub expected: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub schema: String,
    pub passed: usize,
    pub failed: usize,
    pub fixtures: Vec<RegressionRecord>,
}

impl From<&RegressionReport> for RegressionSummary {
    fn from(r: &RegressionReport) -> Self {
        Self {
            schema: REPORT_SCHEMA.into(),
            passed: r.passed(),
            failed: r.failed(),
            fixtures: r
                .results
                .iter()
                .map(|f| RegressionRecord {
                    name: f.name.into(),
                    expected: f.expect.to_string(),
                    actual: f.actual.as_ref().ok().copied(),
                    error: f.actual.as_ref().err().cloned(),
                    pass: f.pass,
                })
                .collect(),
        }
    }
}

impl RegressionSummary {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for f in &self.fixtures {
            let got = match (&f.actual, &f.error) {
                (Some(a), _) => format!("{a:.12}"),
                (None, Some(e)) => e.clone(),
                _ => String::new(),
            };
            let _ = writeln!(out, "{} {:<44} expected {:<24} got {got}", if f.pass { "PASS" } else { "FAIL" }, f.name, f.expected);
        }
        let _ = writeln!(out, "{} passed, {} failed", self.passed, self.failed);
        out
    }
}
