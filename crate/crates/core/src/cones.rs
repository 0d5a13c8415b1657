//! Normal cones `N_S(a)` and relative subdifferentials `∂_S F(a)`.
//!
//! For continuous sets both membership tests are sampled: they report the
//! largest violation seen over points drawn from the set, which is one-sided
//! evidence. Finite sets are checked exhaustively.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{rel_tol, Element};
use crate::commute::common_frame;
use crate::error::{EjaError, Result};
use crate::orbits::{discrete_automorphisms, random_automorphism, restricted_step};
use crate::random::{random_element, rng_for, TrialRng};
use crate::sets::{permutations, RegionKind, SetSpec};
use crate::spectral::{eigenvalue_map, in_symmetric_cone, project_symmetric_cone, spectral_decompose};

fn coords<S: serde::Serializer>(x: &Element, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.as_slice())
}

/// Outcome of a sampled (or exhaustive) normal-cone / subgradient test.
#[derive(Clone, Debug, Serialize)]
pub struct SubgradientCertificate {
    pub set: SetSpec,
    #[serde(serialize_with = "coords")]
    pub point: Element,
    #[serde(serialize_with = "coords")]
    pub candidate: Element,
    pub budget: usize,
    /// Number of points of the set actually evaluated.
    pub evaluated: usize,
    /// Largest `⟨d, x − a⟩ − [F(x) − F(a)]` seen; the `F` terms are zero
    /// for normal-cone tests. Never below zero since `x = a` is included.
    pub max_violation: f64,
    pub threshold: f64,
    /// True when every point of the set was evaluated.
    pub exact: bool,
    pub pass: bool,
}

/// Points of `set` used to probe normal-cone and subgradient inequalities at
/// `a`. Always contains `a` itself. `hints` contribute their Jordan frames
/// as probe directions for the symmetric cone.
pub(crate) fn sample_points(
    set: &SetSpec,
    a: &Element,
    hints: &[&Element],
    budget: usize,
    seed: u64,
) -> (Vec<Element>, bool) {
    let mut rng = rng_for(seed, 0x5e7);
    let mut pts = vec![a.clone()];
    match set {
        SetSpec::FiniteSet(all) => {
            pts.extend(all.iter().cloned());
            return (pts, true);
        }
        SetSpec::SymmetricCone(_) => cone_points(a, hints, budget, &mut rng, &mut pts),
        SetSpec::EigenvalueOrbit(anchor) => eigen_orbit_points(anchor, a, budget, &mut rng, &mut pts),
        SetSpec::AutomorphismOrbit(_) => automorphism_orbit_points(a, budget, &mut rng, &mut pts),
        SetSpec::EigenvalueRegion(region) => {
            let scale = 1.0 + a.norm();
            if matches!(region.kind, RegionKind::Whole) {
                let frame = spectral_decompose(a).frame;
                for f in &frame {
                    pts.push(a + f);
                    pts.push(a - f);
                }
                while pts.len() < budget {
                    let r = scale * 10f64.powf(rng.random_range(-4.0..1.0));
                    let g = random_element(a.algebra(), &mut rng);
                    pts.push(a.axpy(r / g.norm().max(1e-12), &g));
                }
            } else if region.has_projector() {
                while pts.len() < budget {
                    let r = scale * 10f64.powf(rng.random_range(-3.0..1.0));
                    let g = random_element(a.algebra(), &mut rng);
                    if let Ok(x) = set.project(&a.axpy(r / g.norm().max(1e-12), &g)) {
                        pts.push(x);
                    }
                }
            } else {
                let mut tries = 0;
                while pts.len() < budget && tries < 8 * budget {
                    tries += 1;
                    let r = scale * 10f64.powf(rng.random_range(-2.0..1.0));
                    let x = random_element(a.algebra(), &mut rng).scale(r);
                    if set.contains(&x, 0.0) {
                        pts.push(x);
                    }
                }
            }
        }
    }
    (pts, false)
}

fn cone_points(a: &Element, hints: &[&Element], budget: usize, rng: &mut TrialRng, pts: &mut Vec<Element>) {
    let alg = a.algebra();
    pts.push(Element::zeros(alg));
    pts.push(a.scale(2.0));
    let mut frames = spectral_decompose(a).frame;
    for h in hints {
        frames.extend(spectral_decompose(h).frame);
        if let Some(common) = common_frame(a, h, 1e-6) {
            frames.extend(common);
        }
    }
    for f in &frames {
        pts.push(a + f);
    }
    let scale = 1.0 + a.norm();
    let mut k = 0usize;
    while pts.len() < budget {
        let g = random_element(alg, rng);
        let x = if k.is_multiple_of(2) {
            let r = scale * 2.0 * rng.random::<f64>();
            project_symmetric_cone(&g).scale(r / g.norm().max(1e-12))
        } else {
            let s = [1e-3, 1e-1, 1.0][(k / 2) % 3];
            project_symmetric_cone(&a.axpy(s * scale / g.norm().max(1e-12), &g))
        };
        pts.push(x);
        k += 1;
    }
}

fn eigen_orbit_points(anchor: &Element, a: &Element, budget: usize, rng: &mut TrialRng, pts: &mut Vec<Element>) {
    let alg = a.algebra();
    let lambda = eigenvalue_map(anchor);
    let rank = lambda.len();
    let own = spectral_decompose(a);
    let third = (budget / 3).max(1);

    // Rearrangements of the spectrum over a's own frame.
    if rank <= 5 {
        for perm in permutations(rank).into_iter().take(third) {
            let coeffs: Vec<f64> = perm.iter().map(|&i| lambda[i]).collect();
            pts.push(own.combine(&coeffs));
        }
    } else {
        let mut perm: Vec<usize> = (0..rank).collect();
        for _ in 0..third {
            perm.shuffle(rng);
            let coeffs: Vec<f64> = perm.iter().map(|&i| lambda[i]).collect();
            pts.push(own.combine(&coeffs));
        }
    }
    // Random frames with random arrangements.
    let mut perm: Vec<usize> = (0..rank).collect();
    for _ in 0..third {
        let frame = spectral_decompose(&random_element(alg, rng));
        perm.shuffle(rng);
        let coeffs: Vec<f64> = perm.iter().map(|&i| lambda[i]).collect();
        pts.push(frame.combine(&coeffs));
    }
    local_points(a, budget, rng, pts);
}

fn automorphism_orbit_points(a: &Element, budget: usize, rng: &mut TrialRng, pts: &mut Vec<Element>) {
    let discrete = discrete_automorphisms(a.algebra());
    for m in &discrete {
        pts.push(m.apply_unchecked(a));
    }
    let half = pts.len() + budget.saturating_sub(pts.len()) / 2;
    while pts.len() < half {
        pts.push(random_automorphism(a.algebra(), rng, 1, &discrete).apply_unchecked(a));
    }
    local_points(a, budget, rng, pts);
}

/// Small automorphic moves of `a`, covering several radii.
fn local_points(a: &Element, budget: usize, rng: &mut TrialRng, pts: &mut Vec<Element>) {
    let mut k = 0usize;
    while pts.len() < budget {
        let eps = [1e-1, 1e-2, 1e-4][k % 3];
        pts.push(restricted_step(a, eps, rng));
        k += 1;
    }
}

fn membership_tol(tol: f64, a: &Element) -> f64 {
    rel_tol(tol.max(1e-9), a.norm())
}

fn certificate_threshold(tol: f64, a: &Element, d: &Element) -> f64 {
    tol * (1.0 + d.norm() * (1.0 + a.norm()))
}

/// Sampled test of `d ∈ N_E(a)`: `⟨d, x − a⟩ ≤ 0` for `x ∈ E`.
pub fn normal_cone_test(
    set: &SetSpec,
    a: &Element,
    d: &Element,
    sampler_budget: usize,
    seed: u64,
    tol: f64,
) -> Result<SubgradientCertificate> {
    a.algebra().ensure_same(d.algebra())?;
    if !set.contains(a, membership_tol(tol, a)) {
        return Err(EjaError::NotMember);
    }
    let (pts, exact) = sample_points(set, a, &[d], sampler_budget, seed);
    let max_violation = pts.iter().map(|x| d.inner_unchecked(&(x - a))).fold(0.0, f64::max);
    let threshold = certificate_threshold(tol, a, d);
    Ok(SubgradientCertificate {
        set: set.clone(),
        point: a.clone(),
        candidate: d.clone(),
        budget: sampler_budget,
        evaluated: pts.len(),
        max_violation,
        threshold,
        exact,
        pass: max_violation <= threshold,
    })
}

/// Sampled test of `d ∈ ∂_S F(a)`: `F(x) − F(a) ≥ ⟨d, x − a⟩` for `x ∈ S`.
pub fn subgradient_test(
    f: impl Fn(&Element) -> f64,
    set: &SetSpec,
    a: &Element,
    d: &Element,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Result<SubgradientCertificate> {
    a.algebra().ensure_same(d.algebra())?;
    if !set.contains(a, membership_tol(tol, a)) {
        return Err(EjaError::NotMember);
    }
    let fa = f(a);
    if !fa.is_finite() {
        return Err(EjaError::InvalidArgument("F is not finite at the point".into()));
    }
    let (pts, exact) = sample_points(set, a, &[d], budget, seed);
    let max_violation = pts.iter().map(|x| d.inner_unchecked(&(x - a)) - (f(x) - fa)).fold(0.0, f64::max);
    let threshold = certificate_threshold(tol, a, d);
    Ok(SubgradientCertificate {
        set: set.clone(),
        point: a.clone(),
        candidate: d.clone(),
        budget,
        evaluated: pts.len(),
        max_violation,
        threshold,
        exact,
        pass: max_violation <= threshold,
    })
}

/// For a convex spectral set with a projector: `a = Π_E(p)` and
/// `d = p − a ∈ N_E(a)`.
pub fn normal_cone_sample_convex(set: &SetSpec, p: &Element) -> Result<(Element, Element)> {
    match set {
        SetSpec::SymmetricCone(_) | SetSpec::EigenvalueRegion(_) => {
            let a = set.project(p)?;
            let d = p - &a;
            Ok((a, d))
        }
        other => Err(EjaError::UnsupportedSet(other.variant_name().into())),
    }
}

/// Right-hand side of the idempotent characterization
/// `y ∈ N_{𝒱₊}(c) ⟺ −y ∈ 𝒱₊ and ⟨y, c⟩ = 0`, with tolerances scaled by
/// `1 + ‖y‖‖c‖`.
pub fn idempotent_normal_cone_check(c: &Element, y: &Element, tol: f64) -> Result<bool> {
    c.algebra().ensure_same(y.algebra())?;
    let residual = c.square().distance(c);
    if residual > rel_tol(tol, c.norm()) {
        return Err(EjaError::NotIdempotent { residual });
    }
    let scaled = rel_tol(tol, y.norm() * c.norm());
    Ok(in_symmetric_cone(&-y, rel_tol(tol, y.norm())) && y.inner_unchecked(c).abs() <= scaled)
}

/// `{d : ⟨d, normal⟩ ≤ offset}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Halfspace {
    #[serde(serialize_with = "coords")]
    pub normal: Element,
    pub offset: f64,
}

impl Halfspace {
    pub fn contains(&self, d: &Element, tol: f64) -> bool {
        d.inner_unchecked(&self.normal) <= self.offset + tol
    }

    /// Coefficients `w` with `⟨d, normal⟩ = Σ wₖ dₖ` in canonical coordinates.
    pub fn coefficients(&self) -> Vec<f64> {
        let alg = self.normal.algebra();
        (0..alg.dim()).map(|k| Element::basis(alg, k).inner_unchecked(&self.normal)).collect()
    }
}

/// Exact `∂_S F(a)` for finite `S`: one halfspace
/// `{d : ⟨d, x − a⟩ ≤ F(x) − F(a)}` per `x ∈ S \ {a}`.
pub fn finite_set_subdifferential(
    f: impl Fn(&Element) -> f64,
    points: &[Element],
    a: &Element,
) -> Result<Vec<Halfspace>> {
    let same = |p: &Element| p.algebra() == a.algebra() && p.distance(a) <= 1e-12 * (1.0 + a.norm());
    if !points.iter().any(same) {
        return Err(EjaError::NotMember);
    }
    let fa = f(a);
    Ok(points.iter().filter(|p| !same(p)).map(|x| Halfspace { normal: x - a, offset: f(x) - fa }).collect())
}
