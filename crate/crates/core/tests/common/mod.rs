//! Independent reference computations and seeded sample suites shared by the
//! integration tests and the acceptance runner. The oracles avoid the
//! library's spectral machinery: they work on plain matrices and coordinate
//! vectors.
#![allow(dead_code)]

use eja_core::random::{random_element, rng_for, salted};
use eja_core::{
    derivation_from_pair, eigenvalue_map, exp_derivation, jordan_product, operator_commute, spectral_decompose,
    strongly_operator_commute, trace_inequality_gap, Algebra, Element,
};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ACCEPTANCE_ALGEBRAS: [&str; 13] = [
    "rn:6",
    "sym:2",
    "sym:3",
    "sym:4",
    "sym:5",
    "spin:3",
    "spin:4",
    "spin:5",
    "spin:6",
    "spin:7",
    "spin:8",
    "prod(sym:1,sym:2)",
    "prod(spin:3,sym:2)",
];

/// Algebras cycled through by the structural suites.
pub const STRUCTURAL_ALGEBRAS: [&str; 8] =
    ["rn:4", "sym:2", "sym:3", "sym:4", "spin:3", "spin:5", "prod(sym:1,sym:2)", "prod(spin:3,sym:2)"];

pub fn alg(s: &str) -> Algebra {
    s.parse().expect("valid descriptor")
}

// ---------------------------------------------------------------------------
// Permutation search

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// In ℝⁿ, `a` and `b` strongly commute iff one ordering of the coordinates
/// makes both non-increasing.
pub fn brute_force_strong_rn(a: &[f64], b: &[f64]) -> bool {
    permutations(a.len()).into_iter().any(|p| p.windows(2).all(|w| a[w[0]] >= a[w[1]] && b[w[0]] >= b[w[1]]))
}

// ---------------------------------------------------------------------------
// Characteristic polynomial

/// Coefficients `c[0..=n]` of `det(tI − A) = Σ c_k t^{n−k}` by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * c[k - 1];
        let am = a * &m;
        c.push(-am.trace() / k as f64);
    }
    c
}

fn horner(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut d1, mut d2) = (c[0], 0.0, 0.0);
    for &ck in &c[1..] {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + p;
        p = p * x + ck;
    }
    (p, d1, d2)
}

fn laguerre(c: &[f64], mut x: f64) -> f64 {
    let n = (c.len() - 1) as f64;
    for _ in 0..500 {
        let (p, d1, d2) = horner(c, x);
        // Stop once p(x) is indistinguishable from rounding noise.
        let noise = c.iter().fold(0.0, |acc, ck| acc * x.abs() + ck.abs()) * 8.0 * f64::EPSILON;
        if p.abs() <= noise {
            return x;
        }
        let g = d1 / p;
        let h = g * g - d2 / p;
        let s = ((n - 1.0) * (n * h - g * g)).max(0.0).sqrt();
        let den = if g >= 0.0 { g + s } else { g - s };
        if den == 0.0 {
            return x;
        }
        let step = n / den;
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Real roots of a real-rooted monic polynomial, descending. Each root is
/// found by Laguerre iteration on the deflated polynomial and polished on
/// the original unless polishing lands on a different root.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let mut q = c.to_vec();
    let mut roots = Vec::new();
    while q.len() > 1 {
        if q.len() == 3 {
            let (b, c0) = (q[1] / q[0], q[2] / q[0]);
            let disc = (0.25 * b * b - c0).max(0.0).sqrt();
            roots.extend([-0.5 * b + disc, -0.5 * b - disc]);
            break;
        }
        let r0 = laguerre(&q, 0.0);
        let r1 = laguerre(c, r0);
        let r = if (r1 - r0).abs() <= 1e-6 * (1.0 + r0.abs()) { r1 } else { r0 };
        roots.push(r);
        let mut next = vec![q[0]];
        for &qk in &q[1..q.len() - 1] {
            let v = qk + r * next.last().unwrap();
            next.push(v);
        }
        q = next;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

// ---------------------------------------------------------------------------
// Matrix exponential and differences

/// `e^M` by Taylor series after scaling `M` below norm 1/2, then squaring.
pub fn taylor_expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.norm();
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let a = m / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn central_difference(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

pub fn matrix_commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * b - b * a).norm()
}

/// Haar-ish orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut q = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut v = DVector::<f64>::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        for _ in 0..2 {
            for k in 0..j {
                let c = q.column(k).dot(&v);
                v -= q.column(k) * c;
            }
        }
        q.set_column(j, &(&v / v.norm()));
    }
    q
}

pub fn sym_from_eigen(q: &DMatrix<f64>, eig: &[f64]) -> DMatrix<f64> {
    q * DMatrix::from_diagonal(&DVector::from_column_slice(eig)) * q.transpose()
}

// ---------------------------------------------------------------------------
// Oracle agreement runs

#[derive(Debug, Default, Clone, Copy)]
pub struct Agreement {
    pub instances: usize,
    pub disagreements: usize,
    /// Instances where the oracle verdict was positive.
    pub positives: usize,
}

impl Agreement {
    fn record(&mut self, oracle: bool, library: bool) {
        self.instances += 1;
        self.positives += oracle as usize;
        self.disagreements += (oracle != library) as usize;
    }
}

/// Strong commutation in `rn:2..=6` against permutation search. Integer
/// coordinates give exact ties; every other pair is built to share an
/// ordering.
pub fn strong_commutation_rn_agreement(instances: usize, seed: u64) -> Agreement {
    let mut out = Agreement::default();
    for i in 0..instances {
        let mut rng = rng_for(salted(seed, "rn-strong"), i as u64);
        let n = 2 + i % 5;
        let draw = |rng: &mut eja_core::random::TrialRng| -> Vec<f64> {
            (0..n).map(|_| rng.random_range(-2i32..=2) as f64).collect()
        };
        let mut a = draw(&mut rng);
        let mut b = draw(&mut rng);
        if i % 2 == 1 {
            a.sort_by(|x, y| y.total_cmp(x));
            b.sort_by(|x, y| y.total_cmp(x));
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            a = perm.iter().map(|&k| a[k]).collect();
            b = perm.iter().map(|&k| b[k]).collect();
        }
        let al = Algebra::real_vector(n).unwrap();
        let x = Element::new(al.clone(), a.clone()).unwrap();
        let y = Element::new(al, b.clone()).unwrap();
        out.record(brute_force_strong_rn(&a, &b), strongly_operator_commute(&x, &y, 1e-9));
        // ℝⁿ is associative: every pair operator commutes.
        if !operator_commute(&x, &y, 1e-9) {
            out.disagreements += 1;
        }
    }
    out
}

/// Eigenvalues on `sym:1..=4` against characteristic-polynomial roots,
/// relative to `1 + max|λ|`. Every fifth instance has a repeated eigenvalue;
/// polynomial roots of multiplicity two are only accurate to about `√ε`, so
/// those use `repeated_tol` and the rest `tol`. Returns the agreement and
/// the worst generic and repeated deviations.
pub fn sym_eigenvalue_agreement(instances: usize, seed: u64, tol: f64, repeated_tol: f64) -> (Agreement, f64, f64) {
    let mut out = Agreement::default();
    let (mut worst, mut worst_repeated) = (0.0f64, 0.0f64);
    for i in 0..instances {
        let mut rng = rng_for(salted(seed, "sym-eig"), i as u64);
        let n = 1 + i % 4;
        let repeated = i % 5 == 0 && n >= 2;
        let m = if repeated {
            let q = random_orthogonal(n, &mut rng);
            let mut eig: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            eig[1] = eig[0];
            sym_from_eigen(&q, &eig)
        } else {
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            (&g + g.transpose()) * 0.5
        };
        let roots = real_roots(&char_poly(&m));
        let lib = eigenvalue_map(&Element::from_sym_matrix(&m).unwrap());
        let scale = 1.0 + roots.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
        let err = roots.iter().zip(&lib).map(|(r, l)| (r - l).abs()).fold(0.0, f64::max) / scale;
        let bound = if repeated {
            worst_repeated = worst_repeated.max(err);
            repeated_tol
        } else {
            worst = worst.max(err);
            tol
        };
        out.record(true, lib.len() == n && err <= bound);
    }
    (out, worst, worst_repeated)
}

/// Operator commutation on `sym:1..=3` against `AB = BA`. Half of the pairs
/// share an eigenbasis; the rest are independent draws.
pub fn sym_commutator_agreement(instances: usize, seed: u64) -> Agreement {
    let mut out = Agreement::default();
    for i in 0..instances {
        let mut rng = rng_for(salted(seed, "sym-comm"), i as u64);
        let n = 1 + i % 3;
        let (a, b) = if i % 2 == 0 {
            let q = random_orthogonal(n, &mut rng);
            let ea: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let eb: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            (sym_from_eigen(&q, &ea), sym_from_eigen(&q, &eb))
        } else {
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let h = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            ((&g + g.transpose()) * 0.5, (&h + h.transpose()) * 0.5)
        };
        let oracle = matrix_commutator_norm(&a, &b) <= 1e-9 * (1.0 + a.norm() * b.norm());
        let x = Element::from_sym_matrix(&a).unwrap();
        let y = Element::from_sym_matrix(&b).unwrap();
        out.record(oracle, operator_commute(&x, &y, 1e-8));
    }
    out
}

/// `exp(tD)` for random inner derivations against the Taylor oracle.
/// Returns the agreement at `tol` (relative) and the worst deviation.
pub fn expm_agreement(instances: usize, seed: u64, tol: f64) -> (Agreement, f64) {
    let mut out = Agreement::default();
    let mut worst = 0.0f64;
    for i in 0..instances {
        let a = alg(STRUCTURAL_ALGEBRAS[i % STRUCTURAL_ALGEBRAS.len()]);
        let mut rng = rng_for(salted(seed, "expm"), i as u64);
        let u = random_element(&a, &mut rng);
        let v = random_element(&a, &mut rng);
        let d = derivation_from_pair(&u, &v).unwrap();
        let t = rng.random_range(-2.0..2.0);
        let lib = exp_derivation(&d, t);
        let reference = taylor_expm(&(d.map().matrix() * t));
        let err = (lib.matrix() - &reference).norm() / (1.0 + reference.norm());
        worst = worst.max(err);
        out.record(true, err <= tol);
    }
    (out, worst)
}

/// Orbit derivatives `⟨D_k x, g⟩` and simple-eigenvalue derivatives
/// `⟨e₁, h⟩` against central differences. Returns the worst deviation.
pub fn finite_difference_agreement(instances: usize, seed: u64, tol: f64) -> (Agreement, f64) {
    let mut out = Agreement::default();
    let mut worst = 0.0f64;
    for i in 0..instances {
        let a = alg(STRUCTURAL_ALGEBRAS[i % STRUCTURAL_ALGEBRAS.len()]);
        let mut rng = rng_for(salted(seed, "fd"), i as u64);
        let x = random_element(&a, &mut rng);
        let g = random_element(&a, &mut rng);
        let basis = eja_core::orbits::DerivationBasis::new(&a);
        let analytic = basis.directional_derivatives(&x, &g);
        let mut err = 0.0f64;
        for (k, gen) in basis.generators().iter().enumerate() {
            let along = |t: f64| {
                let y = Element::from_vector(a.clone(), taylor_expm(&(gen * t)) * x.coords()).unwrap();
                y.inner(&g).unwrap()
            };
            err = err.max((central_difference(along, 1e-5) - analytic[k]).abs());
        }

        let dec = spectral_decompose(&x);
        let lam = &dec.eigenvalues;
        if lam.len() >= 2 && lam[0] - lam[1] > 1e-2 {
            let h = random_element(&a, &mut rng);
            let top = |t: f64| eigenvalue_map(&x.axpy(t, &h))[0];
            let fd = central_difference(top, 1e-6);
            err = err.max((fd - dec.frame[0].inner(&h).unwrap()).abs());
        }
        let rel = err / (1.0 + x.norm() * g.norm());
        worst = worst.max(rel);
        out.record(true, rel <= tol);
    }
    (out, worst)
}

// ---------------------------------------------------------------------------
// Structural sample suites

#[derive(Debug, Clone, Copy)]
pub struct Structural {
    pub name: &'static str,
    pub samples: usize,
    /// Worst value of the monitored quantity.
    pub worst: f64,
    pub bound: f64,
    /// `true` when `worst` must be at least `bound` rather than at most.
    pub lower: bool,
}

impl Structural {
    pub fn pass(&self) -> bool {
        if self.lower {
            self.worst >= self.bound
        } else {
            self.worst <= self.bound
        }
    }
}

fn sample_pair(i: usize, seed: u64, label: &str) -> (Algebra, Element, Element, eja_core::random::TrialRng) {
    let a = alg(STRUCTURAL_ALGEBRAS[i % STRUCTURAL_ALGEBRAS.len()]);
    let mut rng = rng_for(salted(seed, label), i as u64);
    let x = random_element(&a, &mut rng);
    let y = random_element(&a, &mut rng);
    (a, x, y, rng)
}

/// `‖Σ λᵢ eᵢ − x‖` together with the frame identities `eᵢ∘eⱼ = δᵢⱼ eᵢ` and
/// `Σ eᵢ = e`.
pub fn frame_reconstruction(samples: usize, seed: u64) -> Structural {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let (a, x, _, _) = sample_pair(i, seed, "frame");
        let dec = spectral_decompose(&x);
        worst = worst.max(dec.reconstruct().distance(&x));
        let mut sum = Element::zeros(&a);
        for (p, ep) in dec.frame.iter().enumerate() {
            sum = &sum + ep;
            for (q, eq) in dec.frame.iter().enumerate() {
                let prod = jordan_product(ep, eq).unwrap();
                let want = if p == q { ep.clone() } else { Element::zeros(&a) };
                worst = worst.max(prod.distance(&want));
            }
        }
        worst = worst.max(sum.distance(&Element::unit(&a)));
    }
    Structural { name: "frame reconstruction", samples, worst, bound: 1e-8, lower: false }
}

/// Minimum of `⟨λ(x), λ(y)⟩ − ⟨x, y⟩`.
pub fn trace_inequality(samples: usize, seed: u64) -> Structural {
    let mut worst = f64::INFINITY;
    for i in 0..samples {
        let (_, x, y, _) = sample_pair(i, seed, "trace");
        worst = worst.min(trace_inequality_gap(&x, &y).unwrap());
    }
    Structural { name: "trace inequality gap", samples, worst, bound: -1e-8, lower: true }
}

/// `‖D(x∘y) − Dx∘y − x∘Dy‖` for `D = [L_u, L_v]`.
pub fn derivation_identity(samples: usize, seed: u64) -> Structural {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let (a, x, y, mut rng) = sample_pair(i, seed, "derivation");
        let d = derivation_from_pair(&random_element(&a, &mut rng), &random_element(&a, &mut rng)).unwrap();
        worst = worst.max(d.identity_residual(&x, &y).unwrap());
    }
    Structural { name: "derivation identity", samples, worst, bound: 1e-8, lower: false }
}

fn random_flow(a: &Algebra, rng: &mut eja_core::random::TrialRng) -> eja_core::LinearMap {
    let d = derivation_from_pair(&random_element(a, rng), &random_element(a, rng)).unwrap();
    let n = d.map().frobenius_norm().max(1e-12);
    exp_derivation(&d.scale(1.0 / n), rng.random_range(-3.0..3.0))
}

/// `‖A(x∘y) − Ax∘Ay‖` for `A = exp(tD)`.
pub fn automorphism_product(samples: usize, seed: u64) -> Structural {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let (a, x, y, mut rng) = sample_pair(i, seed, "automorphism");
        let m = random_flow(&a, &mut rng);
        let lhs = m.apply(&jordan_product(&x, &y).unwrap()).unwrap();
        let rhs = jordan_product(&m.apply(&x).unwrap(), &m.apply(&y).unwrap()).unwrap();
        worst = worst.max(lhs.distance(&rhs));
    }
    Structural { name: "automorphism product preservation", samples, worst, bound: 1e-7, lower: false }
}

/// `max |λ(exp(tD)x) − λ(x)|`.
pub fn eigenvalue_invariance(samples: usize, seed: u64) -> Structural {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let (a, x, _, mut rng) = sample_pair(i, seed, "invariance");
        let m = random_flow(&a, &mut rng);
        let before = eigenvalue_map(&x);
        let after = eigenvalue_map(&m.apply(&x).unwrap());
        worst = worst.max(before.iter().zip(&after).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
    }
    Structural { name: "eigenvalue invariance under exp(tD)", samples, worst, bound: 1e-7, lower: false }
}

pub fn structural_suites(samples: usize, seed: u64) -> Vec<Structural> {
    vec![
        frame_reconstruction(samples, seed),
        trace_inequality(samples, seed),
        derivation_identity(samples, seed),
        automorphism_product(samples, seed),
        eigenvalue_invariance(samples, seed),
    ]
}
