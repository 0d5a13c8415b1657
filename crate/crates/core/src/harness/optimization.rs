//! Maximizers of `F + Φ` over weakly spectral sets commute with the
//! `E`-subgradients of `F`.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{rel_tol, Element};
use crate::commute::commutator_norm;
use crate::components::{unit_eigenvalues, units, Unit};
use crate::cones::{sample_points, subgradient_test};
use crate::error::{EjaError, Result};
use crate::orbits::{discrete_automorphisms, random_automorphism, DerivationBasis};
use crate::random::{random_element, salted};
use crate::search::{maximize_on_orbit, Linear, Objective, OrbitKind, Quadratic, SearchOptions};
use crate::sets::SetSpec;
use crate::spectral::{eigenvalue_map, trace_inequality_gap};

use super::{
    conclusive_fraction_check, run_trials, trial_rng, trial_seed, Check, SuiteConfig, TrialOutcome, VerificationReport,
};

/// Which invariance the added term `Φ` is assumed to have.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhiHypothesis {
    /// `Φ = φ∘λ`; cycles through `0`, trace and `Σ λᵢ²`.
    #[default]
    Spectral,
    /// Automorphism invariant only: per-component sums of squared
    /// eigenvalues weighted by the component's type.
    WeaklySpectral,
}

impl PhiHypothesis {
    pub fn as_str(self) -> &'static str {
        match self {
            PhiHypothesis::Spectral => "spectral",
            PhiHypothesis::WeaklySpectral => "weakly_spectral",
        }
    }
}

impl fmt::Display for PhiHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhiHypothesis {
    type Err = EjaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(PhiHypothesis::Spectral),
            "weakly_spectral" | "weakly-spectral" => Ok(PhiHypothesis::WeaklySpectral),
            other => Err(EjaError::InvalidArgument(format!("unknown phi hypothesis '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Problem {
    /// `max ⟨c, x⟩`, subgradient `c`.
    LinearMax,
    /// `min ⟨c, x⟩`, subgradient of `−F` is `−c`.
    LinearMin,
    /// `max ½‖x − m‖²`, subgradient `a − m`.
    QuadraticMax,
    /// `min ½‖x − m‖²`; on an orbit `−F(x) + F(a) = ⟨m, x − a⟩`, so `m` is
    /// an `E`-subgradient of `−F`.
    QuadraticMin,
}

const PROBLEMS: [Problem; 4] = [Problem::LinearMax, Problem::LinearMin, Problem::QuadraticMax, Problem::QuadraticMin];

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::LinearMax => "linear_max",
            Problem::LinearMin => "linear_min",
            Problem::QuadraticMax => "quadratic_max",
            Problem::QuadraticMin => "quadratic_min",
        })
    }
}

fn phi(hypothesis: PhiHypothesis, variant: usize, x: &Element, comps: &[Unit]) -> f64 {
    match hypothesis {
        PhiHypothesis::Spectral => {
            let l = eigenvalue_map(x);
            match variant % 3 {
                0 => 0.0,
                1 => l.iter().sum(),
                _ => l.iter().map(|v| v * v).sum(),
            }
        }
        PhiHypothesis::WeaklySpectral => comps
            .iter()
            .map(|u| {
                let (r, d) = u.class();
                (1 + r + d) as f64 * unit_eigenvalues(x, u).iter().map(|v| v * v).sum::<f64>()
            })
            .sum(),
    }
}

type Scalar<'a> = dyn Fn(&Element) -> f64 + 'a;

const SUITE: &str = "optimization";
const MAX_STARTS: usize = 3;

/// Runs orbit local search on `max F + Φ` over `E ∈ {[a], ⟨a⟩}` for linear
/// and quadratic `F`, in both maximization and minimization form. At a
/// converged maximizer the known `E`-subgradient `d` is validated by
/// sampling and must operator commute with the maximizer.
///
/// Strong commutation is asserted on eigenvalue orbits and, in essentially
/// simple algebras, on automorphism orbits; in both cases only at points
/// that no sampled orbit point improves on. Eigenvalue-orbit trials whose
/// maximizer is beaten by a sample, and non-converged searches, are
/// inconclusive.
pub fn verify_optimization_principle(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let alg = &cfg.algebra;
    let mut report = VerificationReport::new("thm34", alg.to_string(), cfg.trials, cfg.seed, cfg.tol);
    report.hypothesis = Some(format!("phi: {}", cfg.phi));
    let kinds: &[OrbitKind] = match cfg.phi {
        PhiHypothesis::Spectral => &[OrbitKind::Eigenvalue, OrbitKind::Automorphism],
        // A weakly spectral Φ need not be constant on eigenvalue orbits.
        PhiHypothesis::WeaklySpectral => &[OrbitKind::Automorphism],
    };
    report.families = kinds
        .iter()
        .map(|k| match k {
            OrbitKind::Eigenvalue => "eigenvalue_orbit".to_string(),
            OrbitKind::Automorphism => "automorphism_orbit".to_string(),
        })
        .collect();

    let basis = DerivationBasis::new(alg);
    let discrete = discrete_automorphisms(alg);
    let comps = units(alg);
    let essentially_simple = alg.is_essentially_simple();

    let totals = run_trials(cfg, &mut report, |i| {
        let kind = kinds[i % kinds.len()];
        let problem = PROBLEMS[(i / kinds.len()) % PROBLEMS.len()];
        let variant = i / (kinds.len() * PROBLEMS.len());
        let mut rng = trial_rng(cfg, SUITE, i);
        let seed = trial_seed(cfg, SUITE, i);

        let anchor = random_element(alg, &mut rng);
        let data = random_element(alg, &mut rng);
        let obj: Box<dyn Objective + Send + Sync> = match problem {
            Problem::LinearMax => Box::new(Linear { c: data.clone() }),
            Problem::LinearMin => Box::new(Linear { c: -&data }),
            Problem::QuadraticMax => Box::new(Quadratic { center: data.clone(), sign: 1.0 }),
            Problem::QuadraticMin => Box::new(Quadratic { center: data.clone(), sign: -1.0 }),
        };

        let mut found = None;
        for _ in 0..MAX_STARTS {
            let start = random_automorphism(alg, &mut rng, 2, &discrete).apply_unchecked(&anchor);
            let res = maximize_on_orbit(obj.as_ref(), &start, kind, &basis, &SearchOptions::default());
            if res.converged {
                found = Some(res);
                break;
            }
        }
        let Some(res) = found else {
            let mut o = TrialOutcome::inconclusive();
            o.count("not_converged", 1);
            return o;
        };
        let a = res.point;
        let set = match kind {
            OrbitKind::Eigenvalue => SetSpec::EigenvalueOrbit(anchor.clone()),
            OrbitKind::Automorphism => SetSpec::AutomorphismOrbit(anchor.clone()),
        };

        let mut out = TrialOutcome::default();
        // Φ is constant on the orbit, so the search never needs its value.
        let phi_start = phi(cfg.phi, variant, &anchor, &comps);
        let drift = (phi(cfg.phi, variant, &a, &comps) - phi_start).abs();
        out.max("phi_drift", drift / (1.0 + phi_start.abs()));

        let (d, sub): (Element, Box<Scalar<'_>>) = match problem {
            Problem::LinearMax => (data.clone(), Box::new(|x: &Element| data.inner_unchecked(x))),
            Problem::LinearMin => (-&data, Box::new(|x: &Element| -data.inner_unchecked(x))),
            Problem::QuadraticMax => {
                let m = data.clone();
                (&a - &data, Box::new(move |x: &Element| 0.5 * (x - &m).inner_unchecked(&(x - &m))))
            }
            Problem::QuadraticMin => {
                let m = data.clone();
                (data.clone(), Box::new(move |x: &Element| -0.5 * (x - &m).inner_unchecked(&(x - &m))))
            }
        };

        match subgradient_test(sub, &set, &a, &d, cfg.cert_budget, seed, cfg.tol) {
            Ok(cert) => {
                out.max("subgradient_violation", cert.max_violation);
                if !cert.pass {
                    out.failures
                        .push(format!("{problem}: E-subgradient rejected (violation {:e})", cert.max_violation));
                    return out;
                }
            }
            Err(e) => {
                out.failures.push(format!("{problem}: {e}"));
                return out;
            }
        }

        let (pts, _) = sample_points(&set, &a, &[], cfg.cert_budget, salted(seed, "global"));
        let best = pts.iter().map(|x| obj.value(x)).fold(f64::NEG_INFINITY, f64::max);
        let global = best <= res.value + rel_tol(cfg.tol, res.value.abs());
        if !global {
            out.count("beaten_by_sample", 1);
            if kind == OrbitKind::Eigenvalue {
                return out;
            }
        }
        out.conclusive = true;

        let comm = commutator_norm(&a, &d).expect("same algebra");
        let gap = trace_inequality_gap(&a, &d).expect("same algebra");
        let bound = rel_tol(cfg.tol, a.norm() * d.norm());
        out.commutator = comm;
        if comm > bound {
            out.failures.push(format!("{problem} on {kind:?} orbit: commutator norm {comm:e} exceeds {bound:e}"));
        }
        let strong = kind == OrbitKind::Eigenvalue || (essentially_simple && global);
        if strong {
            out.strong_gap = Some(gap);
            if gap > bound {
                out.failures.push(format!("{problem} on {kind:?} orbit: strong gap {gap:e} exceeds {bound:e}"));
            }
        } else {
            out.unasserted_gap = Some(gap);
        }
        out
    });

    report.push(conclusive_fraction_check(&report));
    report.push(Check::at_most("phi_constant_on_orbit", totals.max_of("phi_drift"), 1e-8));
    report.push(Check::flag(
        "optimizer",
        true,
        format!(
            "{} not converged, {} beaten by an orbit sample; max subgradient violation {:e}",
            totals.count_of("not_converged"),
            totals.count_of("beaten_by_sample"),
            totals.max_of("subgradient_violation")
        ),
    ));
    report.finish();
    Ok(report)
}
