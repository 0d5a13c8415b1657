//! Local maximization over automorphism and eigenvalue orbits.
//!
//! Continuous moves are `x ← e^{D} x` with `D` an inner derivation, chosen
//! either as a Newton step in the coordinates of a [`DerivationBasis`] or as
//! a backtracking gradient step. Discrete moves (component swaps and
//! reflections, or eigenvalue transpositions within the current frame) let
//! the search leave a connected component.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};

use crate::algebra::{Element, LinearMap};
use crate::components::units;
use crate::orbits::{discrete_automorphisms, exp_generator, DerivationBasis};
use crate::spectral::spectral_decompose;

/// Smooth objective on the ambient space.
pub trait Objective {
    fn value(&self, x: &Element) -> f64;
    /// Euclidean gradient.
    fn gradient(&self, x: &Element) -> Element;
    /// Euclidean Hessian applied to `v`. Zero for linear objectives.
    fn hessian_apply(&self, _x: &Element, v: &Element) -> Element {
        Element::zeros(v.algebra())
    }
}

/// `x ↦ ⟨c, x⟩`.
#[derive(Clone, Debug)]
pub struct Linear {
    pub c: Element,
}

impl Objective for Linear {
    fn value(&self, x: &Element) -> f64 {
        self.c.inner_unchecked(x)
    }
    fn gradient(&self, _x: &Element) -> Element {
        self.c.clone()
    }
}

/// `x ↦ s·½‖x − m‖²`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub center: Element,
    pub sign: f64,
}

impl Objective for Quadratic {
    fn value(&self, x: &Element) -> f64 {
        let r = x - &self.center;
        0.5 * self.sign * r.inner_unchecked(&r)
    }
    fn gradient(&self, x: &Element) -> Element {
        (x - &self.center).scale(self.sign)
    }
    fn hessian_apply(&self, _x: &Element, v: &Element) -> Element {
        v.scale(self.sign)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    /// `⟨a⟩`: images of `a` under automorphisms.
    Automorphism,
    /// `[a]`: elements with the same eigenvalues as `a`.
    Eigenvalue,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_iterations: usize,
    /// Smallest gradient step tried before giving up on the current point.
    pub min_step: f64,
    /// Relative stationarity threshold on the orbit gradient.
    pub grad_tol: f64,
    pub discrete_moves: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_iterations: 400, min_step: 1e-10, grad_tol: 1e-12, discrete_moves: true }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub point: Element,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Norm of the orbit gradient at `point`.
    pub gradient_norm: f64,
}

struct Local {
    /// `D_k x`.
    tangents: Vec<Element>,
    gradient: Element,
    coeffs: DVector<f64>,
}

fn local(obj: &dyn Objective, basis: &DerivationBasis, x: &Element) -> Local {
    let gradient = obj.gradient(x);
    let tangents: Vec<Element> =
        basis.generators().iter().map(|d| Element::from_raw(x.algebra().clone(), d * x.coords())).collect();
    let coeffs = DVector::from_iterator(tangents.len(), tangents.iter().map(|t| t.inner_unchecked(&gradient)));
    Local { tangents, gradient, coeffs }
}

fn stationary(opts: &SearchOptions, x: &Element, l: &Local) -> bool {
    l.coeffs.norm() <= opts.grad_tol * (1.0 + x.norm()) * (1.0 + l.gradient.norm())
}

/// Second derivatives of `s ↦ F(e^{Σ s_k D_k} x)` at zero.
fn hessian(obj: &dyn Objective, basis: &DerivationBasis, x: &Element, l: &Local) -> DMatrix<f64> {
    let n = l.tangents.len();
    let alg = x.algebra();
    let mut h = DMatrix::zeros(n, n);
    for k in 0..n {
        let hk = obj.hessian_apply(x, &l.tangents[k]);
        for j in k..n {
            let dk_tj = Element::from_raw(alg.clone(), &basis.generators()[k] * l.tangents[j].coords());
            let dj_tk = Element::from_raw(alg.clone(), &basis.generators()[j] * l.tangents[k].coords());
            let v = 0.5 * (dk_tj.inner_unchecked(&l.gradient) + dj_tk.inner_unchecked(&l.gradient))
                + hk.inner_unchecked(&l.tangents[j]);
            h[(k, j)] = v;
            h[(j, k)] = v;
        }
    }
    h
}

/// Newton step restricted to directions of negative curvature, or `None`
/// when the model has significant positive curvature (away from a maximum).
fn newton_step(h: &SymmetricEigen<f64, Dyn>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let top = h.eigenvalues.amax();
    if top <= 0.0 || h.eigenvalues.max() > 1e-9 * top {
        return None;
    }
    let mut step = DVector::zeros(g.len());
    for (k, mu) in h.eigenvalues.iter().enumerate() {
        if *mu < -1e-9 * top {
            let v = h.eigenvectors.column(k);
            step -= v * (v.dot(g) / mu);
        }
    }
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Uphill move along the most positive curvature direction, used at
/// stationary points that are not maxima.
fn escape_saddle(
    obj: &dyn Objective,
    basis: &DerivationBasis,
    h: &SymmetricEigen<f64, Dyn>,
    x: &Element,
    v: f64,
    scale: f64,
) -> Option<(Element, f64)> {
    let (k, mu) = h.eigenvalues.argmax();
    if mu <= 1e-8 * scale {
        return None;
    }
    let dir: DVector<f64> = h.eigenvectors.column(k).into();
    let mut t = 1.0;
    while t >= 1e-6 {
        for s in [t, -t] {
            let y = apply_generator(basis, x, &(&dir * s));
            let fy = obj.value(&y);
            if fy > v + 1e-12 * (1.0 + v.abs()) {
                return Some((y, fy));
            }
        }
        t *= 0.5;
    }
    None
}

fn apply_generator(basis: &DerivationBasis, x: &Element, coeffs: &DVector<f64>) -> Element {
    exp_generator(x.algebra(), &basis.combine(coeffs)).apply_unchecked(x)
}

/// Images of `x` under the discrete moves: the given automorphisms, or
/// eigenvalue transpositions within the frame of `x`.
fn discrete_images(kind: OrbitKind, maps: &[LinearMap], x: &Element) -> Vec<Element> {
    match kind {
        OrbitKind::Automorphism => maps.iter().map(|m| m.apply_unchecked(x)).collect(),
        OrbitKind::Eigenvalue => {
            let dec = spectral_decompose(x);
            let r = dec.eigenvalues.len();
            let mut out = Vec::new();
            for i in 0..r {
                for j in (i + 1)..r {
                    let delta = dec.eigenvalues[j] - dec.eigenvalues[i];
                    if delta != 0.0 {
                        out.push(x.axpy(delta, &(&dec.frame[i] - &dec.frame[j])));
                    }
                }
            }
            out
        }
    }
}

fn improves(fy: f64, v: f64) -> bool {
    fy > v + 1e-12 * (1.0 + v.abs())
}

/// Best strictly improving discrete move, if any.
fn discrete_move(obj: &dyn Objective, images: Vec<Element>, v: f64) -> Option<(Element, f64)> {
    images
        .into_iter()
        .map(|y| {
            let fy = obj.value(&y);
            (y, fy)
        })
        .filter(|(_, fy)| improves(*fy, v))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// In products the orbit has several connected pieces; a discrete image
/// can be worse than `x` while its piece holds a better local maximum.
/// Runs a continuous search from each image and returns the best result
/// that beats `v`.
fn branch_move(
    obj: &dyn Objective,
    images: Vec<Element>,
    kind: OrbitKind,
    basis: &DerivationBasis,
    opts: &SearchOptions,
    v: f64,
) -> Option<(Element, f64)> {
    let inner = SearchOptions { discrete_moves: false, ..opts.clone() };
    images
        .into_iter()
        .map(|y| {
            let r = maximize_on_orbit(obj, &y, kind, basis, &inner);
            (r.point, r.value)
        })
        .filter(|(_, fy)| improves(*fy, v))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// Locally maximizes `obj` over the orbit of `start`.
///
/// `converged` means the orbit gradient vanished to working precision and
/// no discrete move improves the value.
pub fn maximize_on_orbit(
    obj: &dyn Objective,
    start: &Element,
    kind: OrbitKind,
    basis: &DerivationBasis,
    opts: &SearchOptions,
) -> SearchResult {
    let maps = if opts.discrete_moves && kind == OrbitKind::Automorphism {
        discrete_automorphisms(start.algebra())
    } else {
        Vec::new()
    };
    let mut x = start.clone();
    let mut v = obj.value(&x);
    let mut step = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut l = local(obj, basis, &x);
    // Only products have disconnected orbits.
    let branched = opts.discrete_moves && !basis.is_empty() && units(start.algebra()).len() > 1;

    while iterations < opts.max_iterations {
        iterations += 1;
        let gn = l.coeffs.norm();
        let mut stuck = basis.is_empty() || stationary(opts, &x, &l);

        if !stuck {
            let mut moved = false;
            // Newton in derivation coordinates; accepted only if it improves
            // both the value (up to rounding) and stationarity.
            let h = SymmetricEigen::new(hessian(obj, basis, &x, &l));
            if let Some(s) = newton_step(&h, &l.coeffs) {
                let y = apply_generator(basis, &x, &s);
                let fy = obj.value(&y);
                if fy >= v - 1e-14 * (1.0 + v.abs()) {
                    let ly = local(obj, basis, &y);
                    if ly.coeffs.norm() < 0.5 * gn {
                        x = y;
                        v = v.max(fy);
                        l = ly;
                        moved = true;
                    }
                }
            }
            if !moved {
                let dir = &l.coeffs / gn;
                let mut t = (2.0 * step).min(1.0);
                while t >= opts.min_step {
                    let y = apply_generator(basis, &x, &(&dir * t));
                    let fy = obj.value(&y);
                    if fy >= v + 1e-4 * t * gn {
                        x = y;
                        v = fy;
                        l = local(obj, basis, &x);
                        moved = true;
                        step = t;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if !moved {
                // No representable ascent left: stationary up to rounding
                // if the gradient is tiny, otherwise a genuine failure.
                if gn <= 1e-9 * (1.0 + x.norm()) * (1.0 + l.gradient.norm()) {
                    stuck = true;
                } else {
                    break;
                }
            }
        }

        if stuck {
            if !basis.is_empty() {
                let h = SymmetricEigen::new(hessian(obj, basis, &x, &l));
                let scale = (1.0 + x.norm()) * (1.0 + l.gradient.norm());
                if let Some((y, fy)) = escape_saddle(obj, basis, &h, &x, v, scale) {
                    x = y;
                    v = fy;
                    l = local(obj, basis, &x);
                    step = 1.0;
                    continue;
                }
            }
            if opts.discrete_moves {
                let images = discrete_images(kind, &maps, &x);
                let found = match discrete_move(obj, images.clone(), v) {
                    Some(m) => Some(m),
                    None if branched => branch_move(obj, images, kind, basis, opts, v),
                    None => None,
                };
                if let Some((y, fy)) = found {
                    x = y;
                    v = fy;
                    l = local(obj, basis, &x);
                    step = 1.0;
                    continue;
                }
            }
            converged = true;
            break;
        }
    }
    let gradient_norm = l.coeffs.norm();
    SearchResult { point: x, value: v, converged, iterations, gradient_norm }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::commute::{commutator_norm, strongly_operator_commute};
    use crate::orbits::sample_orbit;
    use crate::spectral::eigenvalue_map;

    fn alg(s: &str) -> Algebra {
        s.parse().unwrap()
    }

    fn el(a: &str, v: &[f64]) -> Element {
        Element::new(alg(a), v.to_vec()).unwrap()
    }

    #[test]
    fn linear_maximizer_on_sym_orbit() {
        let a = alg("sym:3");
        let basis = DerivationBasis::new(&a);
        let x = Element::from_sym_rows(&[&[1.0, 0.3, 0.0], &[0.3, -2.0, 0.5], &[0.0, 0.5, 0.4]]).unwrap();
        let c = Element::from_sym_rows(&[&[0.2, 1.0, -0.4], &[1.0, 0.1, 0.0], &[-0.4, 0.0, -1.0]]).unwrap();
        let res =
            maximize_on_orbit(&Linear { c: c.clone() }, &x, OrbitKind::Automorphism, &basis, &SearchOptions::default());
        assert!(res.converged);
        let best: f64 = eigenvalue_map(&x).iter().zip(eigenvalue_map(&c)).map(|(p, q)| p * q).sum();
        assert!((res.value - best).abs() < 1e-10, "{} vs {best}", res.value);
        assert!(commutator_norm(&res.point, &c).unwrap() < 1e-9);
        assert!(strongly_operator_commute(&res.point, &c, 1e-8));
    }

    #[test]
    fn real_vectors_sort_by_transpositions() {
        let a = alg("rn:5");
        let basis = DerivationBasis::new(&a);
        let x = el("rn:5", &[3.0, -1.0, 2.0, 0.5, 4.0]);
        let c = el("rn:5", &[0.1, 0.7, -0.3, 0.2, 0.0]);
        for kind in [OrbitKind::Automorphism, OrbitKind::Eigenvalue] {
            let res = maximize_on_orbit(&Linear { c: c.clone() }, &x, kind, &basis, &SearchOptions::default());
            assert!(res.converged);
            assert_eq!(res.point.as_slice(), &[2.0, 4.0, -1.0, 3.0, 0.5]);
        }
    }

    #[test]
    fn product_orbits_differ() {
        let a = alg("prod(sym:1,sym:2)");
        let basis = DerivationBasis::new(&a);
        let r = std::f64::consts::SQRT_2;
        let b = el("prod(sym:1,sym:2)", &[2.0, 2.0, 2.0, -r]);
        let c = el("prod(sym:1,sym:2)", &[4.0, 2.0, 2.0, r]);
        let obj = Linear { c };
        let aut = maximize_on_orbit(&obj, &b, OrbitKind::Automorphism, &basis, &SearchOptions::default());
        assert!(aut.converged);
        assert!((aut.value - 18.0).abs() < 1e-9);
        let eig = maximize_on_orbit(&obj, &b, OrbitKind::Eigenvalue, &basis, &SearchOptions::default());
        assert!(eig.converged);
        assert!((eig.value - 19.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_maximizer_moves_away_from_center() {
        let a = alg("spin:4");
        let basis = DerivationBasis::new(&a);
        let x = el("spin:4", &[1.0, 0.5, -0.5, 1.0]);
        let m = el("spin:4", &[0.0, 1.0, 1.0, 0.0]);
        let res = maximize_on_orbit(
            &Quadratic { center: m.clone(), sign: 1.0 },
            &x,
            OrbitKind::Automorphism,
            &basis,
            &SearchOptions::default(),
        );
        assert!(res.converged);
        assert!(commutator_norm(&res.point, &m).unwrap() < 1e-9);
        // The vector part points away from m's.
        let p = res.point.as_slice();
        assert!(p[1] < 0.0 && p[2] < 0.0);
    }

    #[test]
    fn random_starts_reach_the_same_value() {
        let a = alg("sym:4");
        let basis = DerivationBasis::new(&a);
        let x = el("sym:4", &[1.0, 2.0, -1.0, 0.5, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let c = el("sym:4", &[0.3, -0.2, 0.9, 0.1, 0.7, 0.0, -0.5, 0.2, 0.1, 0.0]);
        let best: f64 = eigenvalue_map(&x).iter().zip(eigenvalue_map(&c)).map(|(p, q)| p * q).sum();
        for s in sample_orbit(&x, 5, 9, 2) {
            let res = maximize_on_orbit(
                &Linear { c: c.clone() },
                &s,
                OrbitKind::Automorphism,
                &basis,
                &SearchOptions::default(),
            );
            assert!(res.converged);
            assert!((res.value - best).abs() < 1e-9);
        }
    }
}
