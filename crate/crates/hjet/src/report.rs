//! Report format: schema-versioned, machine-readable command output with
//! a deterministic field order and a plain-text rendering.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{HjetError, Result};
use crate::exactalg::Rational;

pub const REPORT_SCHEMA: &str = "hjet-report/1";

/// Exact rational as "a" or "a/b" for the wire format.
pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagReport {
    pub growth: Vec<usize>,
    pub step: usize,
    pub rank: usize,
    pub corank: usize,
    pub dimension: usize,
    pub bracket_generating: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityReport {
    pub q: usize,
    pub regular: bool,
    pub rank: usize,
    pub required_rank: usize,
    pub first_derivative_nonzero: bool,
    pub probabilistic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_probability: Option<String>,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WAlphaReport {
    pub alpha: usize,
    pub member: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failed_clause: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InversionReport {
    pub q: usize,
    pub order: usize,
    pub test_degree: usize,
    pub monomials_checked: usize,
    pub residuals_zero: bool,
    /// Open interval around t0 where the inverse's coefficients have no
    /// poles.
    pub working_interval: (String, String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauEntry {
    pub level: usize,
    pub s: usize,
    pub j: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub growth: Vec<usize>,
    pub passes: usize,
    pub q0: usize,
    pub q_values: Vec<usize>,
    pub q_final: usize,
    /// Consecutive blocks with the same frame collapsed to one line.
    pub label_table: Vec<String>,
    /// Nonzero free directions, level by level.
    pub tau_table: Vec<TauEntry>,
    pub fresh_levels: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignatedReport {
    pub row: usize,
    pub col: usize,
    pub level: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateReport {
    pub pass: usize,
    pub q: usize,
    pub minor_size: usize,
    pub core_size: usize,
    pub designated: Vec<DesignatedReport>,
    pub column_order: Vec<usize>,
    pub diagonal_integral: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessReport {
    pub passes: usize,
    pub q_values: Vec<usize>,
    /// Nonzero entries of the assignment, as (level, value).
    pub assignment: Vec<(usize, String)>,
    pub minor_values: Vec<String>,
    pub fresh_levels: Vec<Vec<usize>>,
    pub attempts: usize,
    pub regular: bool,
    pub rank: usize,
    pub required_rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    pub growth: Vec<usize>,
    pub passes: usize,
    pub certificates: Vec<CertificateReport>,
    pub witness: WitnessReport,
}

/// Top-level command report. Deterministic given the seed: only
/// timing_ms varies between runs on identical inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub arguments: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<FlagReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<RegularityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_alpha: Option<WAlphaReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inversion: Option<InversionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifyReport>,
    #[serde(default)]
    pub timing_ms: u128,
}

impl Report {
    pub fn new(command: &str, arguments: BTreeMap<String, String>) -> Report {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            command: command.to_string(),
            arguments,
            seed: None,
            verdict: None,
            notes: Vec::new(),
            flag: None,
            regularity: None,
            w_alpha: None,
            inversion: None,
            schedule: None,
            certify: None,
            timing_ms: 0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| HjetError::Internal(format!("report serialization: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Report> {
        let r: Report =
            serde_json::from_str(text).map_err(|e| HjetError::Parse(format!("report: {e}")))?;
        if r.schema != REPORT_SCHEMA {
            return Err(HjetError::Parse(format!(
                "unsupported report schema {:?}",
                r.schema
            )));
        }
        Ok(r)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("command: {}", self.command));
        for (k, v) in &self.arguments {
            line(format!("  {k}: {v}"));
        }
        if let Some(seed) = self.seed {
            line(format!("seed: {seed}"));
        }
        if let Some(v) = self.verdict {
            line(format!("verdict: {}", if v { "pass" } else { "fail" }));
        }
        for n in &self.notes {
            line(format!("note: {n}"));
        }
        if let Some(f) = &self.flag {
            line(format!(
                "growth vector: ({})",
                f.growth
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            line(format!(
                "step {}, rank {}, corank {}, dimension {}",
                f.step, f.rank, f.corank, f.dimension
            ));
            line(format!("bracket generating: {}", f.bracket_generating));
            if let Some(n) = &f.note {
                line(format!("  {n}"));
            }
        }
        if let Some(r) = &self.regularity {
            line(format!(
                "regular at q = {}: {} (rank {} of {}, matrix {}x{})",
                r.q, r.regular, r.rank, r.required_rank, r.matrix_rows, r.matrix_cols
            ));
            if !r.first_derivative_nonzero {
                line("first derivative vanishes".to_string());
            }
        }
        if let Some(w) = &self.w_alpha {
            match &w.failed_clause {
                None => line(format!("order-{} class member: {}", w.alpha, w.member)),
                Some(c) => line(format!(
                    "order-{} class member: {} (failed clause: {c})",
                    w.alpha, w.member
                )),
            }
        }
        if let Some(i) = &self.inversion {
            line(format!(
                "right inverse of order {} at q = {}: residuals zero = {} on {} monomials through degree {}",
                i.order, i.q, i.residuals_zero, i.monomials_checked, i.test_degree
            ));
            line(format!(
                "working interval: ({}, {})",
                i.working_interval.0, i.working_interval.1
            ));
        }
        if let Some(s) = &self.schedule {
            line(format!(
                "q values: {:?} (q0 = {}, {} passes)",
                s.q_values, s.q0, s.passes
            ));
            line("block labels:".to_string());
            for l in &s.label_table {
                line(format!("  {l}"));
            }
            line("nonzero free directions:".to_string());
            for t in &s.tau_table {
                line(format!("  tau^{} = tau^{{{},{}}}", t.level, t.s, t.j));
            }
        }
        if let Some(c) = &self.certify {
            for cert in &c.certificates {
                line(format!(
                    "pass {}: minor {}x{} reduces to core {}x{}, triangular certificate ok (integral diagonal: {})",
                    cert.pass,
                    cert.minor_size,
                    cert.minor_size,
                    cert.core_size,
                    cert.core_size,
                    cert.diagonal_integral
                ));
            }
            let w = &c.witness;
            line(format!(
                "witness found in {} attempt(s); q values {:?}; regular: {} (rank {} of {})",
                w.attempts, w.q_values, w.regular, w.rank, w.required_rank
            ));
            for (i, f) in w.fresh_levels.iter().enumerate() {
                line(format!("  pass {} fresh levels: {f:?}", i + 1));
            }
        }
        line(format!("timing: {} ms", self.timing_ms));
        out
    }
}
