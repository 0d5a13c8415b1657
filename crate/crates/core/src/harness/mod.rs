//! Randomized verification suites and the worked examples.
//!
//! Every trial draws from its own stream `(salted(seed, suite), trial)`, so
//! reports do not depend on the evaluation order or the worker count.

mod cones_suite;
mod examples;
mod geometric;
mod optimization;
mod report;
mod subgradient;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use cones_suite::verify_normal_cone_idempotents;
pub use examples::{run_example, run_local_maximizer_example, run_product_orbit_example, ExampleId};
pub use geometric::{verify_geometric_principle, Family};
pub use optimization::{verify_optimization_principle, PhiHypothesis};
pub use report::{Check, Failure, VerificationReport, REPORT_VERSION};
pub use subgradient::{verify_subgradient_commutation, SpectralFunction};

use crate::algebra::Algebra;
use crate::error::{EjaError, Result};
use crate::par::{map_indexed, Parallelism};
use crate::random::{rng_for, salted, TrialRng};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub algebra: Algebra,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub parallelism: Parallelism,
    /// Points sampled per normal-cone or subgradient certificate.
    pub cert_budget: usize,
    /// Sampler budget for the idempotent agreement checks.
    pub idempotent_budget: usize,
    pub phi: PhiHypothesis,
}

impl SuiteConfig {
    pub fn new(algebra: Algebra, trials: usize, seed: u64) -> Self {
        Self {
            algebra,
            trials,
            seed,
            tol: crate::commute::DEFAULT_TOL,
            parallelism: Parallelism::default(),
            cert_budget: 64,
            idempotent_budget: 1000,
            phi: PhiHypothesis::Spectral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(EjaError::InvalidArgument("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(EjaError::InvalidArgument("tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteId {
    /// Spectral sets: cone, eigenvalue box, eigenvalue orbit.
    Thm31a,
    /// Automorphism orbits.
    Thm31b,
    Cor32,
    Cor33,
    Thm34,
}

impl SuiteId {
    pub const ALL: [SuiteId; 5] = [SuiteId::Thm31a, SuiteId::Thm31b, SuiteId::Cor32, SuiteId::Cor33, SuiteId::Thm34];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::Thm31a => "thm31a",
            SuiteId::Thm31b => "thm31b",
            SuiteId::Cor32 => "cor32",
            SuiteId::Cor33 => "cor33",
            SuiteId::Thm34 => "thm34",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = EjaError;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| EjaError::InvalidArgument(format!("unknown suite '{s}'")))
    }
}

/// Runs a suite and stamps the elapsed time (clear it for byte-stable output).
pub fn run_suite(id: SuiteId, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut report = match id {
        SuiteId::Thm31a => {
            verify_geometric_principle(cfg, &[Family::SymmetricCone, Family::EigenvalueBox, Family::EigenvalueOrbit])?
        }
        SuiteId::Thm31b => verify_geometric_principle(cfg, &[Family::AutomorphismOrbit])?,
        SuiteId::Cor32 => verify_normal_cone_idempotents(cfg)?,
        SuiteId::Cor33 => verify_subgradient_commutation(cfg, &SpectralFunction::ALL)?,
        SuiteId::Thm34 => verify_optimization_principle(cfg)?,
    };
    report.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    Ok(report)
}

/// Result of one randomized trial.
#[derive(Debug, Default)]
pub(crate) struct TrialOutcome {
    pub conclusive: bool,
    pub commutator: f64,
    pub strong_gap: Option<f64>,
    pub unasserted_gap: Option<f64>,
    pub failures: Vec<String>,
    /// Suite-specific maxima, merged by `max`.
    pub maxima: Vec<(&'static str, f64)>,
    /// Suite-specific counters, merged by sum.
    pub counts: Vec<(&'static str, usize)>,
}

impl TrialOutcome {
    pub fn inconclusive() -> Self {
        Self::default()
    }

    pub fn max(&mut self, key: &'static str, v: f64) {
        self.maxima.push((key, v));
    }

    pub fn count(&mut self, key: &'static str, n: usize) {
        self.counts.push((key, n));
    }
}

/// Merged per-suite statistics, in first-seen key order.
#[derive(Debug, Default)]
pub(crate) struct Totals {
    pub maxima: Vec<(&'static str, f64)>,
    pub counts: Vec<(&'static str, usize)>,
}

impl Totals {
    pub fn max_of(&self, key: &str) -> f64 {
        self.maxima.iter().find(|(k, _)| *k == key).map_or(0.0, |(_, v)| *v)
    }

    pub fn count_of(&self, key: &str) -> usize {
        self.counts.iter().find(|(k, _)| *k == key).map_or(0, |(_, v)| *v)
    }
}

pub(crate) fn trial_rng(cfg: &SuiteConfig, suite: &str, trial: usize) -> TrialRng {
    rng_for(salted(cfg.seed, suite), trial as u64)
}

/// Sub-seed for certificate samplers inside a trial.
pub(crate) fn trial_seed(cfg: &SuiteConfig, suite: &str, trial: usize) -> u64 {
    salted(salted(cfg.seed, suite), &trial.to_string())
}

/// Runs `trial` for every index and folds the outcomes into `report`.
pub(crate) fn run_trials<F>(cfg: &SuiteConfig, report: &mut VerificationReport, trial: F) -> Totals
where
    F: Fn(usize) -> TrialOutcome + Sync + Send,
{
    let outcomes = map_indexed(cfg.trials, cfg.parallelism, trial);
    let mut totals = Totals::default();
    for (i, o) in outcomes.into_iter().enumerate() {
        if o.conclusive {
            report.conclusive += 1;
            report.max_commutator_norm = report.max_commutator_norm.max(o.commutator);
            if let Some(g) = o.strong_gap {
                report.strong_asserted += 1;
                report.max_strong_gap = report.max_strong_gap.max(g);
            }
            if let Some(g) = o.unasserted_gap {
                report.max_unasserted_gap = report.max_unasserted_gap.max(g);
            }
        } else {
            report.inconclusive += 1;
        }
        for m in o.failures {
            report.fail(Some(i), m);
        }
        for (k, v) in o.maxima {
            match totals.maxima.iter_mut().find(|(key, _)| *key == k) {
                Some((_, cur)) => *cur = cur.max(v),
                None => totals.maxima.push((k, v)),
            }
        }
        for (k, n) in o.counts {
            match totals.counts.iter_mut().find(|(key, _)| *key == k) {
                Some((_, cur)) => *cur += n,
                None => totals.counts.push((k, n)),
            }
        }
    }
    totals
}

/// Requires at least 90% of trials to be conclusive, so a suite cannot pass
/// by excluding most of its instances.
pub(crate) fn conclusive_fraction_check(report: &VerificationReport) -> Check {
    let frac = report.conclusive as f64 / report.trials.max(1) as f64;
    Check::at_least("conclusive_fraction", frac, 0.9)
}
