//! Normal cone of the symmetric cone at idempotents, and Moreau
//! decompositions.

use rand::Rng;

use crate::algebra::{lmap, Element};
use crate::commute::commutator_norm;
use crate::cones::{idempotent_normal_cone_check, normal_cone_sample_convex, normal_cone_test};
use crate::error::Result;
use crate::random::{random_element, salted, TrialRng};
use crate::sets::SetSpec;
use crate::spectral::{eigenvalue_map, spectral_decompose};

use super::{run_trials, trial_rng, trial_seed, Check, SuiteConfig, TrialOutcome, VerificationReport};

const SUITE: &str = "idempotent";

/// Every tenth trial also draws a random idempotent.
const IDEMPOTENT_EVERY: usize = 10;

/// `U_p(z) = 2 p∘(p∘z) − p²∘z`.
fn quadratic_rep(p: &Element, z: &Element) -> Element {
    let l = lmap(p);
    let pz = l.apply_unchecked(z);
    let two_ppz = l.apply_unchecked(&pz).scale(2.0);
    &two_ppz - &lmap(&p.square()).apply_unchecked(z)
}

/// Candidates `y` at the idempotent `c = Σ_{i∈S} fᵢ`: two constructed
/// members of `N_{𝒱₊}(c)` and two non-members.
fn candidates(frame: &[Element], in_s: &[bool], c: &Element, rng: &mut TrialRng) -> Vec<Element> {
    let alg = c.algebra();
    let mut member = Element::zeros(alg);
    for (f, &s) in frame.iter().zip(in_s) {
        if !s {
            member = member.axpy(-rng.random_range(0.1..2.0), f);
        }
    }
    let w = random_element(alg, rng);
    let peirce = quadratic_rep(&(&Element::unit(alg) - c), &w.square()).scale(-1.0);

    // Positive weight on a frame element: outside −𝒱₊ if it is off S,
    // or not orthogonal to c if it is in S.
    let j = rng.random_range(0..frame.len());
    let pushed = member.axpy(rng.random_range(2.5..4.0), &frame[j]);
    vec![member, peirce, pushed, random_element(alg, rng)]
}

/// Moreau decompositions `p = a + d` with `a = Π_{𝒱₊}(p)` satisfy
/// `−d ∈ 𝒱₊`, `⟨d, a⟩ = 0` and `d ∈ N_{𝒱₊}(a)`; and at random idempotents
/// `c` the characterization `y ∈ N_{𝒱₊}(c) ⟺ −y ∈ 𝒱₊, ⟨y, c⟩ = 0` agrees
/// with the sampled normal-cone test.
pub fn verify_normal_cone_idempotents(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let alg = &cfg.algebra;
    let mut report = VerificationReport::new("cor32", alg.to_string(), cfg.trials, cfg.seed, cfg.tol);
    report.families = vec!["symmetric_cone".into()];
    let cone = SetSpec::SymmetricCone(alg.clone());

    let totals = run_trials(cfg, &mut report, |i| {
        let mut rng = trial_rng(cfg, SUITE, i);
        let seed = trial_seed(cfg, SUITE, i);
        let mut out = TrialOutcome { conclusive: true, ..Default::default() };

        let p = random_element(alg, &mut rng);
        let (a, d) = normal_cone_sample_convex(&cone, &p).expect("cone has a projector");
        let polar = eigenvalue_map(&d)[0].max(0.0);
        let orth = d.inner_unchecked(&a).abs();
        out.max("moreau_polar_violation", polar);
        out.max("moreau_orthogonality", orth);
        out.commutator = commutator_norm(&a, &d).expect("same algebra");
        match normal_cone_test(&cone, &a, &d, cfg.cert_budget, seed, cfg.tol) {
            Ok(cert) => out.max("moreau_certificate_violation", cert.max_violation),
            Err(e) => out.failures.push(format!("moreau certificate error: {e}")),
        }

        if i % IDEMPOTENT_EVERY == 0 {
            let frame = spectral_decompose(&random_element(alg, &mut rng)).frame;
            let in_s: Vec<bool> = frame.iter().map(|_| rng.random_bool(0.5)).collect();
            let mut c = Element::zeros(alg);
            for (f, &s) in frame.iter().zip(&in_s) {
                if s {
                    c = &c + f;
                }
            }
            out.count("idempotents", 1);
            let sub = salted(seed, "idempotent");
            for (k, y) in candidates(&frame, &in_s, &c, &mut rng).into_iter().enumerate() {
                let check = match idempotent_normal_cone_check(&c, &y, cfg.tol) {
                    Ok(v) => v,
                    Err(e) => {
                        out.failures.push(format!("idempotent check error: {e}"));
                        continue;
                    }
                };
                let sampled = match normal_cone_test(&cone, &c, &y, cfg.idempotent_budget, sub ^ k as u64, cfg.tol) {
                    Ok(cert) => cert.pass,
                    Err(e) => {
                        out.failures.push(format!("sampled test error: {e}"));
                        continue;
                    }
                };
                out.count(if check { "members" } else { "non_members" }, 1);
                if check != sampled {
                    out.count("disagreements", 1);
                    out.failures
                        .push(format!("candidate {k}: characterization says {check}, sampled test says {sampled}"));
                }
                // Constructed members must be recognized as such.
                if k < 2 && !check {
                    out.failures.push(format!("constructed member {k} rejected"));
                }
            }
        }
        out
    });

    let tight = 1e-7;
    report.push(Check::at_most("moreau_polar_violation", totals.max_of("moreau_polar_violation"), tight));
    report.push(Check::at_most("moreau_orthogonality", totals.max_of("moreau_orthogonality"), tight));
    report.push(Check::at_most("moreau_certificate_violation", totals.max_of("moreau_certificate_violation"), tight));
    report.push(Check::at_most("moreau_commutator_norm", report.max_commutator_norm, tight));
    report.push(
        Check::close("idempotent_disagreements", totals.count_of("disagreements") as f64, 0.0, 0.0).with_detail(
            format!(
                "{} idempotents, {} members, {} non-members",
                totals.count_of("idempotents"),
                totals.count_of("members"),
                totals.count_of("non_members")
            ),
        ),
    );
    report.finish();
    Ok(report)
}
