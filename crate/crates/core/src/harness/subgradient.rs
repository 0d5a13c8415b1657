//! Subgradients of spectral functions strongly commute with the point.

use std::fmt;

use crate::algebra::{rel_tol, Element};
use crate::commute::commutator_norm;
use crate::cones::subgradient_test;
use crate::error::Result;
use crate::random::random_element;
use crate::sets::{EigenvalueRegion, SetSpec};
use crate::spectral::{eigenvalue_map, spectral_decompose, trace_inequality_gap};

use super::{
    conclusive_fraction_check, run_trials, trial_rng, trial_seed, Check, SuiteConfig, TrialOutcome, VerificationReport,
};

/// Convex spectral functions `F = f∘λ` with closed-form subgradients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFunction {
    Trace,
    /// Largest eigenvalue; only sampled where it is simple.
    MaxEigenvalue,
    LogSumExp,
}

impl SpectralFunction {
    pub const ALL: [SpectralFunction; 3] =
        [SpectralFunction::Trace, SpectralFunction::MaxEigenvalue, SpectralFunction::LogSumExp];

    pub fn is_smooth(self) -> bool {
        !matches!(self, SpectralFunction::MaxEigenvalue)
    }

    pub fn value(self, x: &Element) -> f64 {
        let l = eigenvalue_map(x);
        match self {
            SpectralFunction::Trace => l.iter().sum(),
            SpectralFunction::MaxEigenvalue => l[0],
            SpectralFunction::LogSumExp => log_sum_exp(&l),
        }
    }

    /// `Σ gᵢ eᵢ` with `g ∈ ∂f(λ(x))` placed on the frame of `x`.
    pub fn subgradient(self, x: &Element) -> Element {
        let dec = spectral_decompose(x);
        let r = dec.eigenvalues.len();
        let g: Vec<f64> = match self {
            SpectralFunction::Trace => vec![1.0; r],
            SpectralFunction::MaxEigenvalue => (0..r).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            SpectralFunction::LogSumExp => {
                let m = dec.eigenvalues[0];
                let w: Vec<f64> = dec.eigenvalues.iter().map(|l| (l - m).exp()).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|v| v / s).collect()
            }
        };
        dec.combine(&g)
    }

    fn name(self) -> &'static str {
        match self {
            SpectralFunction::Trace => "trace",
            SpectralFunction::MaxEigenvalue => "max_eigenvalue",
            SpectralFunction::LogSumExp => "log_sum_exp",
        }
    }
}

impl fmt::Display for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn log_sum_exp(l: &[f64]) -> f64 {
    let m = l.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + l.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

const SUITE: &str = "subgradient";
const FD_STEP: f64 = 1e-6;
const FD_TOL: f64 = 1e-5;

/// Largest deviation between central differences of `F` along the
/// canonical basis and `⟨d, b_k⟩`.
fn finite_difference_error(f: SpectralFunction, a: &Element, d: &Element) -> f64 {
    let alg = a.algebra();
    (0..alg.dim())
        .map(|k| {
            let b = Element::basis(alg, k);
            let fd = (f.value(&a.axpy(FD_STEP, &b)) - f.value(&a.axpy(-FD_STEP, &b))) / (2.0 * FD_STEP);
            (fd - d.inner_unchecked(&b)).abs()
        })
        .fold(0.0, f64::max)
}

/// For random `a`, the spectral-formula subgradient `d ∈ ∂F(a)` is
/// validated by sampling over the whole space and must strongly commute
/// with `a`. Smooth cases are also compared against finite differences.
pub fn verify_subgradient_commutation(cfg: &SuiteConfig, functions: &[SpectralFunction]) -> Result<VerificationReport> {
    cfg.validate()?;
    let alg = &cfg.algebra;
    let mut report = VerificationReport::new("cor33", alg.to_string(), cfg.trials, cfg.seed, cfg.tol);
    report.families = functions.iter().map(|f| f.to_string()).collect();
    if functions.is_empty() {
        report.fail(None, "no functions requested");
        report.finish();
        return Ok(report);
    }
    let whole = SetSpec::EigenvalueRegion(EigenvalueRegion::whole(alg));

    let totals = run_trials(cfg, &mut report, |i| {
        let f = functions[i % functions.len()];
        let mut rng = trial_rng(cfg, SUITE, i);
        let seed = trial_seed(cfg, SUITE, i);

        let mut a = random_element(alg, &mut rng);
        if f == SpectralFunction::MaxEigenvalue {
            let simple = |x: &Element| {
                let l = eigenvalue_map(x);
                l.len() < 2 || l[0] - l[1] >= 1e-3 * (1.0 + x.norm())
            };
            let mut tries = 0;
            while !simple(&a) && tries < 20 {
                a = random_element(alg, &mut rng);
                tries += 1;
            }
            if !simple(&a) {
                return TrialOutcome::inconclusive();
            }
        }
        let d = f.subgradient(&a);
        let mut out = TrialOutcome { conclusive: true, ..Default::default() };

        match subgradient_test(|x| f.value(x), &whole, &a, &d, cfg.cert_budget, seed, cfg.tol) {
            Ok(cert) => {
                out.max("subgradient_violation", cert.max_violation);
                if !cert.pass {
                    out.failures.push(format!("{f}: subgradient rejected (violation {:e})", cert.max_violation));
                }
            }
            Err(e) => out.failures.push(format!("{f}: subgradient test error: {e}")),
        }

        let comm = commutator_norm(&a, &d).expect("same algebra");
        let gap = trace_inequality_gap(&a, &d).expect("same algebra");
        let bound = rel_tol(cfg.tol, a.norm() * d.norm());
        out.commutator = comm;
        out.strong_gap = Some(gap);
        if comm > bound {
            out.failures.push(format!("{f}: commutator norm {comm:e} exceeds {bound:e}"));
        }
        if gap > bound {
            out.failures.push(format!("{f}: strong gap {gap:e} exceeds {bound:e}"));
        }
        if f.is_smooth() {
            let err = finite_difference_error(f, &a, &d);
            out.max("finite_difference_error", err);
            if err > FD_TOL {
                out.failures.push(format!("{f}: finite-difference mismatch {err:e}"));
            }
        }
        out
    });

    report.push(conclusive_fraction_check(&report));
    if functions.iter().any(|f| f.is_smooth()) {
        report.push(Check::at_most("finite_difference_error", totals.max_of("finite_difference_error"), FD_TOL));
    }
    report.push(Check::flag(
        "subgradient_certificates",
        true,
        format!("max violation {:e}", totals.max_of("subgradient_violation")),
    ));
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Parallelism;

    #[test]
    fn closed_forms() {
        let x = Element::from_sym_rows(&[&[3.0, 1.0], &[1.0, 3.0]]).unwrap();
        let e = Element::unit(x.algebra());
        assert!(SpectralFunction::Trace.subgradient(&x).distance(&e) < 1e-12);
        let top = SpectralFunction::MaxEigenvalue.subgradient(&x);
        let f1 = Element::from_sym_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(top.distance(&f1) < 1e-12);
        assert!((SpectralFunction::LogSumExp.value(&x) - (4f64.exp() + 2f64.exp()).ln()).abs() < 1e-12);
        let g = SpectralFunction::LogSumExp.subgradient(&x);
        assert!((g.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_runs_pass() {
        for alg in ["sym:3", "spin:4", "rn:5", "prod(spin:3,sym:2)"] {
            let mut cfg = SuiteConfig::new(alg.parse().unwrap(), 30, 5);
            cfg.parallelism = Parallelism::Sequential;
            let r = verify_subgradient_commutation(&cfg, &SpectralFunction::ALL).unwrap();
            assert!(r.pass, "{alg}: {}", r.to_text());
            assert!(r.max_strong_gap < 1e-9);
        }
    }
}
