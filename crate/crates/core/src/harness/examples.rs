//! The two worked examples: a local maximizer in ℝ² whose subgradient does
//! not strongly commute, and an orbit maximizer in `𝒮¹ × 𝒮²` that operator
//! commutes but does not strongly commute.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::algebra::{Algebra, Element};
use crate::commute::{commutator_norm, operator_commute, strongly_operator_commute, DEFAULT_TOL};
use crate::cones::{finite_set_subdifferential, normal_cone_test, subgradient_test};
use crate::error::{EjaError, Result};
use crate::orbits::{sample_orbit, DerivationBasis};
use crate::random::rng_for;
use crate::search::{maximize_on_orbit, Linear, Objective, OrbitKind, SearchOptions};
use crate::sets::SetSpec;
use crate::spectral::{eigenvalue_map, trace_inequality_gap};

use super::{Check, VerificationReport};

const EXACT: f64 = 1e-12;
const DERIVED: f64 = 1e-9;
const SEED: u64 = 41;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleId {
    LocalMaximizer,
    ProductOrbit,
}

impl ExampleId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::LocalMaximizer => "4.1",
            ExampleId::ProductOrbit => "4.2",
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = EjaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "4.1" => Ok(ExampleId::LocalMaximizer),
            "4.2" => Ok(ExampleId::ProductOrbit),
            other => Err(EjaError::InvalidArgument(format!("unknown example '{other}'"))),
        }
    }
}

pub fn run_example(id: ExampleId) -> VerificationReport {
    match id {
        ExampleId::LocalMaximizer => run_local_maximizer_example(),
        ExampleId::ProductOrbit => run_product_orbit_example(),
    }
}

fn r2(x: f64, y: f64) -> Element {
    Element::new(Algebra::real_vector(2).expect("rn:2"), vec![x, y]).expect("finite")
}

fn f41(p: &Element) -> f64 {
    let s = p.as_slice();
    (s[0] - 1.0).powi(2) + (s[1] - 2.0).powi(2)
}

/// `F(x, y) = (x − 1)² + (y − 2)²` on `E = {x, y ≥ 0, x + y = 3}`.
pub fn run_local_maximizer_example() -> VerificationReport {
    let mut r = VerificationReport::new("ex41", "rn:2", 1, SEED, DEFAULT_TOL);
    r.families = vec!["finite_set".into()];
    let local = r2(0.0, 3.0);
    let global = r2(3.0, 0.0);

    r.push(Check::close("F(3,0)", f41(&global), 8.0, EXACT));
    r.push(Check::close("F(0,3)", f41(&local), 2.0, EXACT));

    // E and its maximizers, on a fine grid of the segment.
    let n = 30_000;
    let grid: Vec<Element> = (0..=n)
        .map(|k| {
            let x = 3.0 * k as f64 / n as f64;
            r2(x, 3.0 - x)
        })
        .collect();
    let (arg, best) =
        grid.iter().map(|p| (p, f41(p))).fold(
            (&grid[0], f64::NEG_INFINITY),
            |acc, (p, v)| {
                if v > acc.1 {
                    (p, v)
                } else {
                    acc
                }
            },
        );
    r.push(Check::flag(
        "global_maximizer_on_E",
        arg.distance(&global) <= EXACT && (best - 8.0).abs() <= EXACT,
        format!("grid argmax {:?}", arg.as_slice()),
    ));
    let near_local = grid.iter().filter(|p| p.distance(&local) <= 0.5);
    let local_ok = near_local.map(f41).all(|v| v <= 2.0 + EXACT);
    r.push(Check::flag("local_maximizer_on_E", local_ok, "F ≤ 2 within distance 0.5 of (0,3)"));

    // The eigenvalue orbit of (0,3) in ℝ² is {(0,3), (3,0)}.
    let orbit = SetSpec::EigenvalueOrbit(local.clone()).enumerate().unwrap_or_default();
    let expected = [local.clone(), global.clone()];
    let orbit_ok = orbit.len() == 2 && expected.iter().all(|e| orbit.iter().any(|p| p.distance(e) <= EXACT));
    r.push(Check::flag("orbit_of_(0,3)", orbit_ok, format!("{} points", orbit.len())));

    let set = SetSpec::FiniteSet(expected.to_vec());
    match finite_set_subdifferential(f41, &expected, &local) {
        Ok(hs) if hs.len() == 1 => {
            let w = hs[0].coefficients();
            r.push(Check::flag(
                "halfspace_at_(0,3)",
                w == vec![3.0, -3.0] && hs[0].offset == 6.0,
                format!("{:?}·d ≤ {} (d1 ≤ d2 + 2)", w, hs[0].offset),
            ));
        }
        other => r.push(Check::flag("halfspace_at_(0,3)", false, format!("{other:?}"))),
    }
    let at_global = finite_set_subdifferential(f41, &expected, &global);
    match &at_global {
        Ok(hs) if hs.len() == 1 => {
            let w = hs[0].coefficients();
            r.push(Check::flag(
                "halfspace_at_(3,0)",
                w == vec![-3.0, 3.0] && hs[0].offset == -6.0,
                format!("{:?}·d ≤ {} (d1 ≥ d2 + 2)", w, hs[0].offset),
            ));
        }
        other => r.push(Check::flag("halfspace_at_(3,0)", false, format!("{other:?}"))),
    }

    let d = r2(2.0, 0.0);
    match subgradient_test(f41, &set, &local, &d, 2, SEED, EXACT) {
        Ok(c) => r.push(Check::flag(
            "(2,0)_is_subgradient_at_(0,3)",
            c.pass && c.exact,
            format!("max violation {}", c.max_violation),
        )),
        Err(e) => r.push(Check::flag("(2,0)_is_subgradient_at_(0,3)", false, e.to_string())),
    }
    match subgradient_test(f41, &set, &local, &r2(5.0, 0.0), 2, SEED, EXACT) {
        Ok(c) => r.push(Check::close("(5,0)_violation_at_(0,3)", c.max_violation, 9.0, EXACT)),
        Err(e) => r.push(Check::flag("(5,0)_violation_at_(0,3)", false, e.to_string())),
    }
    r.push(Check::flag("operator_commute((0,3),(2,0))", operator_commute(&local, &d, DEFAULT_TOL), ""));
    r.push(Check::flag("not_strongly_commute((0,3),(2,0))", !strongly_operator_commute(&local, &d, DEFAULT_TOL), ""));
    let gap = trace_inequality_gap(&local, &d).expect("rn:2");
    r.push(Check::close("gap((0,3),(2,0))", gap, 6.0, EXACT));
    r.max_unasserted_gap = gap;

    // Subgradients at the global maximizer strongly commute with it.
    let mut rng = rng_for(SEED, 0);
    let mut all_strong = true;
    let mut in_halfspace = true;
    let mut worst = 0.0f64;
    if let Ok(hs) = &at_global {
        for _ in 0..1000 {
            let d2: f64 = rng.random_range(-10.0..10.0);
            let s: f64 = rng.random_range(0.0..10.0);
            let d = r2(d2 + 2.0 + s, d2);
            in_halfspace &= hs.iter().all(|h| h.contains(&d, EXACT));
            let g = trace_inequality_gap(&global, &d).expect("rn:2");
            worst = worst.max(g.abs());
            all_strong &= strongly_operator_commute(&global, &d, DEFAULT_TOL);
        }
    }
    r.push(Check::flag("sampled_subgradients_at_(3,0)_in_halfspace", in_halfspace, "1000 samples"));
    r.push(Check::flag("sampled_subgradients_at_(3,0)_strongly_commute", all_strong, format!("max |gap| {worst:e}")));
    r.max_strong_gap = worst;
    r.strong_asserted = 1000;
    r.conclusive = 1;
    r.finish();
    r
}

fn product_algebra() -> Algebra {
    "prod(sym:1,sym:2)".parse().expect("valid descriptor")
}

/// `[s | [[p, q], [q, r]]]` in `𝒮¹ × 𝒮²`.
fn block(s: f64, p: f64, q: f64, r: f64) -> Element {
    Element::new(product_algebra(), vec![s, p, r, SQRT_2 * q]).expect("finite")
}

/// `⟨C, X⟩` over the automorphism orbit of `B` in `𝒮¹ × 𝒮²`.
pub fn run_product_orbit_example() -> VerificationReport {
    let mut r = VerificationReport::new("ex42", "prod(sym:1,sym:2)", 1, SEED, DEFAULT_TOL);
    r.families = vec!["automorphism_orbit".into()];
    let a = block(2.0, 2.0, 1.0, 2.0);
    let b = block(2.0, 2.0, -1.0, 2.0);
    let c = block(4.0, 2.0, 1.0, 2.0);

    let spectrum = |name: &str, x: &Element, want: [f64; 3], r: &mut VerificationReport| {
        let l = eigenvalue_map(x);
        let err = l.iter().zip(want).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        r.push(Check::at_most(format!("eigenvalues({name})"), err, DERIVED).with_detail(format!("want {want:?}")));
    };
    spectrum("A", &a, [3.0, 2.0, 1.0], &mut r);
    spectrum("B", &b, [3.0, 2.0, 1.0], &mut r);
    spectrum("C", &c, [4.0, 3.0, 1.0], &mut r);
    let orbit = SetSpec::AutomorphismOrbit(b.clone());
    r.push(Check::flag("A_in_orbit_of_B", orbit.contains(&a, DERIVED), ""));

    let ac = a.inner_unchecked(&c);
    r.push(Check::close("<A,C>", ac, 18.0, DERIVED));
    let lam: f64 = eigenvalue_map(&a).iter().zip(eigenvalue_map(&c)).map(|(p, q)| p * q).sum();
    r.push(Check::close("<lambda(A),lambda(C)>", lam, 19.0, DERIVED));
    let gap = trace_inequality_gap(&a, &c).expect("same algebra");
    r.push(Check::close("gap(A,C)", gap, 1.0, DERIVED));
    let comm = commutator_norm(&a, &c).expect("same algebra");
    r.push(Check::at_most("commutator_norm(A,C)", comm, 1e-10));
    r.push(Check::flag("operator_commute(A,C)", operator_commute(&a, &c, DEFAULT_TOL), ""));
    r.push(Check::flag("not_strongly_commute(A,C)", !strongly_operator_commute(&a, &c, DEFAULT_TOL), ""));
    r.max_commutator_norm = comm;
    r.max_unasserted_gap = gap;

    // C is a normal direction to ⟨B⟩ at A.
    match normal_cone_test(&orbit, &a, &c, 1000, SEED, DEFAULT_TOL) {
        Ok(cert) => r.push(Check::at_most("C_in_normal_cone_of_orbit_at_A", cert.max_violation, cert.threshold)),
        Err(e) => r.push(Check::flag("C_in_normal_cone_of_orbit_at_A", false, e.to_string())),
    }

    // Maximize ⟨C, ·⟩ over ⟨B⟩: best of 10³ orbit samples, then local search.
    let obj = Linear { c: c.clone() };
    let basis = DerivationBasis::new(&product_algebra());
    let mut samples = sample_orbit(&b, 1000, SEED, 2);
    samples.sort_by(|x, y| obj.value(y).total_cmp(&obj.value(x)));
    let best_sample = obj.value(&samples[0]);
    let opt = samples
        .iter()
        .take(3)
        .map(|s| maximize_on_orbit(&obj, s, OrbitKind::Automorphism, &basis, &SearchOptions::default()))
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .expect("three starts");
    r.push(Check::at_most("best_orbit_sample", best_sample, 18.0 + DERIVED));
    r.push(Check::close("orbit_maximum", opt.value, 18.0, 1e-6).with_detail(format!("converged: {}", opt.converged)));
    let opt_comm = commutator_norm(&opt.point, &c).expect("same algebra");
    r.push(Check::at_most("commutator_norm(optimizer,C)", opt_comm, 1e-6));
    r.push(Check::flag("optimizer_in_orbit_of_B", orbit.contains(&opt.point, 1e-8), ""));
    r.push(Check::flag("optimizer_not_strongly_commute", !strongly_operator_commute(&opt.point, &c, DEFAULT_TOL), ""));
    r.max_commutator_norm = r.max_commutator_norm.max(opt_comm);

    // Independent check: rotate the 𝒮² block of B through a 10⁴-point grid.
    let n = 10_000;
    let grid_max = (0..n)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / n as f64;
            let (s, co) = t.sin_cos();
            // R(t) [[2, −1], [−1, 2]] R(t)ᵀ
            let p = 2.0 + 2.0 * s * co;
            let rr = 2.0 - 2.0 * s * co;
            let q = -(co * co - s * s);
            obj.value(&block(2.0, p, q, rr))
        })
        .fold(f64::NEG_INFINITY, f64::max);
    r.push(Check::close("rotation_grid_maximum", grid_max, 18.0, 1e-6));

    // [B] is strictly larger than ⟨B⟩.
    let x = block(3.0, 2.0, 0.0, 1.0);
    spectrum("X", &x, [3.0, 2.0, 1.0], &mut r);
    r.push(Check::flag("X_in_eigenvalue_orbit_of_B", SetSpec::EigenvalueOrbit(b.clone()).contains(&x, DERIVED), ""));
    r.push(Check::flag("X_not_in_orbit_of_B", !orbit.contains(&x, DERIVED), "S1 part 3 vs 2"));
    let eig = maximize_on_orbit(&obj, &b, OrbitKind::Eigenvalue, &basis, &SearchOptions::default());
    r.push(Check::close("eigenvalue_orbit_maximum", eig.value, 19.0, 1e-6));

    r.conclusive = 1;
    r.finish();
    r
}
