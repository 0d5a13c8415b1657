//! Structured verification reports.

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

/// One named assertion with the values it compared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub observed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Check {
    pub fn flag(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, observed: None, expected: None, tolerance: None, detail: detail.into() }
    }

    /// `|observed − expected| ≤ tolerance`.
    pub fn close(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: (observed - expected).abs() <= tolerance,
            observed: Some(observed),
            expected: Some(expected),
            tolerance: Some(tolerance),
            detail: String::new(),
        }
    }

    /// `observed ≤ bound`.
    pub fn at_most(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            pass: observed <= bound,
            observed: Some(observed),
            expected: None,
            tolerance: Some(bound),
            detail: String::new(),
        }
    }

    /// `observed ≥ bound`.
    pub fn at_least(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            pass: observed >= bound,
            observed: Some(observed),
            expected: None,
            tolerance: Some(bound),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trial: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub report_version: u32,
    pub theorem: String,
    pub algebra: String,
    pub families: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hypothesis: Option<String>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Trials whose premises were certified and that entered pass/fail.
    pub conclusive: usize,
    /// Trials excluded because the premise could not be certified.
    pub inconclusive: usize,
    pub max_commutator_norm: f64,
    /// Largest trace-inequality gap over pairs where strong commutation
    /// was asserted.
    pub max_strong_gap: f64,
    /// Largest gap over pairs where strong commutation was not asserted.
    pub max_unasserted_gap: f64,
    pub strong_asserted: usize,
    pub checks: Vec<Check>,
    pub failures: Vec<Failure>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    pub fn new(theorem: &str, algebra: impl Into<String>, trials: usize, seed: u64, tol: f64) -> Self {
        Self {
            report_version: REPORT_VERSION,
            theorem: theorem.into(),
            algebra: algebra.into(),
            families: Vec::new(),
            hypothesis: None,
            trials,
            seed,
            tol,
            conclusive: 0,
            inconclusive: 0,
            max_commutator_norm: 0.0,
            max_strong_gap: 0.0,
            max_unasserted_gap: 0.0,
            strong_asserted: 0,
            checks: Vec::new(),
            failures: Vec::new(),
            pass: false,
            elapsed_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn fail(&mut self, trial: Option<usize>, message: impl Into<String>) {
        self.failures.push(Failure { trial, message: message.into() });
    }

    /// Recomputes `pass`: no recorded failures and every check passed.
    /// Failed checks are mirrored into `failures`.
    pub fn finish(&mut self) {
        for c in &self.checks {
            if !c.pass {
                let mut msg = format!("check failed: {}", c.name);
                if let Some(o) = c.observed {
                    msg.push_str(&format!(" (observed {o:e})"));
                }
                if !c.detail.is_empty() {
                    msg.push_str(&format!(": {}", c.detail));
                }
                self.failures.push(Failure { trial: None, message: msg });
            }
        }
        self.pass = self.failures.is_empty();
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    /// Human-readable summary; numbers use exponent form when tiny or huge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{} [{}] {}\n", self.theorem, self.algebra, verdict));
        if !self.families.is_empty() {
            out.push_str(&format!("  families: {}\n", self.families.join(", ")));
        }
        if let Some(h) = &self.hypothesis {
            out.push_str(&format!("  hypothesis: {h}\n"));
        }
        out.push_str(&format!(
            "  trials: {} (conclusive {}, inconclusive {}), seed {}, tol {:e}\n",
            self.trials, self.conclusive, self.inconclusive, self.seed, self.tol
        ));
        out.push_str(&format!(
            "  max commutator norm: {:e}\n  max strong gap: {:e} ({} asserted)\n  max unasserted gap: {:e}\n",
            self.max_commutator_norm, self.max_strong_gap, self.strong_asserted, self.max_unasserted_gap
        ));
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {}", c.name));
            if let Some(o) = c.observed {
                out.push_str(&format!(" = {}", short(o)));
            }
            if let Some(e) = c.expected {
                out.push_str(&format!(" (expected {}", short(e)));
                if let Some(t) = c.tolerance {
                    out.push_str(&format!(" ± {t:e}"));
                }
                out.push(')');
            } else if let Some(t) = c.tolerance {
                out.push_str(&format!(" (bound {t:e})"));
            }
            if !c.detail.is_empty() {
                out.push_str(&format!(" {}", c.detail));
            }
            out.push('\n');
        }
        for f in self.failures.iter().take(20) {
            match f.trial {
                Some(t) => out.push_str(&format!("  failure (trial {t}): {}\n", f.message)),
                None => out.push_str(&format!("  failure: {}\n", f.message)),
            }
        }
        if self.failures.len() > 20 {
            out.push_str(&format!("  ... {} more failures\n", self.failures.len() - 20));
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("  elapsed: {ms} ms\n"));
        }
        out
    }
}

fn short(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e6).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}
