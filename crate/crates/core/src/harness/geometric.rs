//! Normal directions `d ∈ N_E(a)` commute with `a`.

use std::fmt;

use crate::algebra::{rel_tol, Element};
use crate::commute::commutator_norm;
use crate::cones::{normal_cone_sample_convex, normal_cone_test};
use crate::error::Result;
use crate::orbits::{discrete_automorphisms, random_automorphism, DerivationBasis};
use crate::random::{random_direction, random_element};
use crate::search::{maximize_on_orbit, Linear, OrbitKind, SearchOptions};
use crate::sets::{EigenvalueRegion, SetSpec};
use crate::spectral::trace_inequality_gap;

use super::{
    conclusive_fraction_check, run_trials, trial_rng, trial_seed, Check, SuiteConfig, TrialOutcome, VerificationReport,
};

/// Constraint-set families for the geometric principle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    SymmetricCone,
    /// `{x : −1 ≤ λᵢ(x) ≤ 1}`.
    EigenvalueBox,
    EigenvalueOrbit,
    AutomorphismOrbit,
}

impl Family {
    pub fn is_spectral(self) -> bool {
        !matches!(self, Family::AutomorphismOrbit)
    }

    fn name(self) -> &'static str {
        match self {
            Family::SymmetricCone => "symmetric_cone",
            Family::EigenvalueBox => "eigenvalue_box",
            Family::EigenvalueOrbit => "eigenvalue_orbit",
            Family::AutomorphismOrbit => "automorphism_orbit",
        }
    }
}

impl Family {
    fn rejected_key(self) -> &'static str {
        match self {
            Family::SymmetricCone => "rejected_symmetric_cone",
            Family::EigenvalueBox => "rejected_eigenvalue_box",
            Family::EigenvalueOrbit => "rejected_eigenvalue_orbit",
            Family::AutomorphismOrbit => "rejected_automorphism_orbit",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const SUITE: &str = "geometric";

/// For each trial builds `a ∈ E` and a unit `d ∈ N_E(a)`, certifies the
/// normal-cone membership by sampling, then asserts that `a` and `d`
/// operator commute. Strong commutation is asserted when `E` is spectral or
/// the algebra is essentially simple; otherwise the gap is only recorded.
///
/// Convex families get `(a, d)` from a projection. Orbit families maximize
/// `⟨d, ·⟩` over the orbit from a random start; a converged maximizer `a`
/// has `d ∈ N_E(a)`. Trials whose optimizer does not converge, or whose
/// certificate finds a better orbit point, are inconclusive.
pub fn verify_geometric_principle(cfg: &SuiteConfig, families: &[Family]) -> Result<VerificationReport> {
    cfg.validate()?;
    let alg = &cfg.algebra;
    let name = if families.iter().all(|f| f.is_spectral()) { "thm31a" } else { "thm31b" };
    let mut report = VerificationReport::new(name, alg.to_string(), cfg.trials, cfg.seed, cfg.tol);
    report.families = families.iter().map(|f| f.to_string()).collect();
    if families.is_empty() {
        report.fail(None, "no families requested");
        report.finish();
        return Ok(report);
    }

    let basis = DerivationBasis::new(alg);
    let discrete = discrete_automorphisms(alg);
    let boxed = SetSpec::EigenvalueRegion(EigenvalueRegion::eigenvalue_box(alg, -1.0, 1.0)?);
    let essentially_simple = alg.is_essentially_simple();

    let totals = run_trials(cfg, &mut report, |i| {
        let family = families[i % families.len()];
        let mut rng = trial_rng(cfg, SUITE, i);
        let seed = trial_seed(cfg, SUITE, i);
        // The first trial of each family uses the unit element.
        let trivial = i < families.len();

        let (set, a, d) = match family {
            Family::SymmetricCone | Family::EigenvalueBox => {
                let set =
                    if family == Family::SymmetricCone { SetSpec::SymmetricCone(alg.clone()) } else { boxed.clone() };
                let mut p =
                    if trivial { Element::unit(alg).scale(2.0) } else { random_element(alg, &mut rng).scale(1.5) };
                let (mut a, mut d) = normal_cone_sample_convex(&set, &p).expect("convex family");
                let negligible = |d: &Element, p: &Element| d.norm() <= 1e-10 * (1.0 + p.norm());
                // Redraw points that already lie in E so most trials get a
                // nonzero normal.
                for _ in 0..8 {
                    if trivial || !negligible(&d, &p) {
                        break;
                    }
                    p = random_element(alg, &mut rng).scale(1.5);
                    (a, d) = normal_cone_sample_convex(&set, &p).expect("convex family");
                }
                // Rounding residue must not be normalized into a direction;
                // d = 0 is a valid normal.
                let d = if negligible(&d, &p) { Element::zeros(alg) } else { d.scale(1.0 / d.norm()) };
                (set, a, d)
            }
            Family::EigenvalueOrbit | Family::AutomorphismOrbit => {
                let anchor = if trivial { Element::unit(alg) } else { random_element(alg, &mut rng) };
                let d = random_direction(alg, &mut rng);
                let start = random_automorphism(alg, &mut rng, 2, &discrete).apply_unchecked(&anchor);
                let kind =
                    if family == Family::EigenvalueOrbit { OrbitKind::Eigenvalue } else { OrbitKind::Automorphism };
                let res = maximize_on_orbit(&Linear { c: d.clone() }, &start, kind, &basis, &SearchOptions::default());
                if !res.converged {
                    let mut o = TrialOutcome::inconclusive();
                    o.count("not_converged", 1);
                    return o;
                }
                let set = if kind == OrbitKind::Eigenvalue {
                    SetSpec::EigenvalueOrbit(anchor)
                } else {
                    SetSpec::AutomorphismOrbit(anchor)
                };
                (set, res.point, d)
            }
        };

        let cert = match normal_cone_test(&set, &a, &d, cfg.cert_budget, seed, cfg.tol) {
            Ok(c) => c,
            Err(e) => {
                let mut o = TrialOutcome::inconclusive();
                o.failures.push(format!("{family}: certificate error: {e}"));
                return o;
            }
        };
        let mut out = TrialOutcome::default();
        out.max("certificate_violation", cert.max_violation);
        if !cert.pass {
            out.count("certificate_rejected", 1);
            out.count(family.rejected_key(), 1);
            return out;
        }
        out.conclusive = true;

        let comm = commutator_norm(&a, &d).expect("same algebra");
        let gap = trace_inequality_gap(&a, &d).expect("same algebra");
        let bound = rel_tol(cfg.tol, a.norm() * d.norm());
        out.commutator = comm;
        if comm > bound {
            out.failures.push(format!("{family}: commutator norm {comm:e} exceeds {bound:e}"));
        }
        if family.is_spectral() || essentially_simple {
            out.strong_gap = Some(gap);
            if gap > bound {
                out.failures.push(format!("{family}: strong gap {gap:e} exceeds {bound:e}"));
            }
        } else {
            out.unasserted_gap = Some(gap);
        }
        out
    });

    report.push(conclusive_fraction_check(&report));
    let by_family: Vec<String> =
        families.iter().map(|f| format!("{f} {}", totals.count_of(f.rejected_key()))).collect();
    report.push(Check::flag(
        "certificates",
        true,
        format!(
            "max violation {:e}; {} rejected ({}), {} not converged",
            totals.max_of("certificate_violation"),
            totals.count_of("certificate_rejected"),
            by_family.join(", "),
            totals.count_of("not_converged")
        ),
    ));
    report.finish();
    Ok(report)
}
