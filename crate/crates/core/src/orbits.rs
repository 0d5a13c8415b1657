//! Derivations, automorphisms `e^{tD}`, and sampling of automorphism orbits.
//!
//! Orbit sampling uses inner derivations `D = L_u L_v − L_v L_u` and their
//! exponentials, which generate the identity component of `Aut(𝒱)` for the
//! covered algebras, composed with the discrete automorphisms that exchange
//! isomorphic simple components or reflect inside a factor.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::algebra::{lmap, Algebra, Element, LinearMap};
use crate::components;
use crate::error::{EjaError, Result};
use crate::random::{random_element, rng_for, TrialRng};

/// A derivation of the algebra: `D(x∘y) = D(x)∘y + x∘D(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    map: LinearMap,
}

impl Derivation {
    /// Wraps a map without checking the derivation identity; see
    /// [`Derivation::identity_residual`].
    pub fn from_map(map: LinearMap) -> Self {
        Self { map }
    }

    pub fn map(&self) -> &LinearMap {
        &self.map
    }

    pub fn algebra(&self) -> &Algebra {
        self.map.algebra()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.map.apply(x)
    }

    /// `‖D(x∘y) − D(x)∘y − x∘D(y)‖`.
    pub fn identity_residual(&self, x: &Element, y: &Element) -> Result<f64> {
        let lhs = self.map.apply(&x.jordan(y)?)?;
        let dx = self.map.apply(x)?;
        let dy = self.map.apply(y)?;
        let rhs = &dx.jordan(y)? + &x.jordan(&dy)?;
        Ok(lhs.distance(&rhs))
    }

    /// `‖D + Dᵀ‖_F`; zero for derivations of these algebras.
    pub fn skew_residual(&self) -> f64 {
        let m = self.map.matrix();
        (m + m.transpose()).norm()
    }

    pub fn scale(&self, s: f64) -> Derivation {
        Derivation { map: self.map.scale(s) }
    }
}

/// `D = L_u L_v − L_v L_u`.
pub fn derivation_from_pair(u: &Element, v: &Element) -> Result<Derivation> {
    u.algebra().ensure_same(v.algebra())?;
    Ok(Derivation { map: lmap(u).commutator(&lmap(v)) })
}

/// `e^{tD}` by scaling and squaring with a Padé approximant.
pub fn exp_derivation(d: &Derivation, t: f64) -> LinearMap {
    if t == 0.0 {
        return LinearMap::identity(d.algebra());
    }
    exp_generator(d.algebra(), &(d.map.matrix() * t))
}

pub(crate) fn exp_generator(algebra: &Algebra, generator: &DMatrix<f64>) -> LinearMap {
    LinearMap::from_raw(algebra.clone(), generator.exp())
}

/// Randomized check that `a` is invertible and multiplicative on
/// `n_samples` seeded pairs, within `tol·(1 + ‖A‖²‖x‖‖y‖)`.
pub fn is_automorphism(a: &LinearMap, tol: f64, n_samples: usize, seed: u64) -> bool {
    let sv = a.matrix().clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if smin.is_nan() || smin <= 0.0 || smax / smin > 1e10 {
        return false;
    }
    let alg = a.algebra();
    let mut rng = rng_for(seed, 0);
    (0..n_samples.max(1)).all(|_| {
        let x = random_element(alg, &mut rng);
        let y = random_element(alg, &mut rng);
        let lhs = a.apply_unchecked(&x.jordan_unchecked(&y));
        let rhs = a.apply_unchecked(&x).jordan_unchecked(&a.apply_unchecked(&y));
        lhs.distance(&rhs) <= tol * (1.0 + smax * smax * x.norm() * y.norm())
    })
}

/// An inner derivation from a random pair, scaled to unit Frobenius norm.
/// Returns `None` when the pair commutes (always, for associative algebras).
pub fn random_unit_derivation<R: Rng + ?Sized>(algebra: &Algebra, rng: &mut R) -> Option<Derivation> {
    let u = random_element(algebra, rng);
    let v = random_element(algebra, rng);
    let d = derivation_from_pair(&u, &v).ok()?;
    let n = d.map.frobenius_norm();
    (n > 1e-12).then(|| d.scale(1.0 / n))
}

/// Discrete automorphisms: component swaps and in-factor reflections.
pub fn discrete_automorphisms(algebra: &Algebra) -> Vec<LinearMap> {
    let mut maps = components::swap_maps(algebra);
    maps.extend(components::reflection_maps(algebra));
    maps
}

/// Random automorphism: a product of `n_factors` exponentials of random
/// inner derivations with angles uniform in `[−π, π]`, optionally composed
/// with a random subset of the discrete automorphisms.
pub fn random_automorphism(
    algebra: &Algebra,
    rng: &mut TrialRng,
    n_factors: usize,
    discrete: &[LinearMap],
) -> LinearMap {
    let mut acc = DMatrix::identity(algebra.dim(), algebra.dim());
    for _ in 0..n_factors {
        if let Some(d) = random_unit_derivation(algebra, rng) {
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            acc = exp_derivation(&d, t).matrix() * acc;
        }
    }
    for m in discrete {
        if rng.random_bool(0.5) {
            acc = m.matrix() * acc;
        }
    }
    LinearMap::from_raw(algebra.clone(), acc)
}

/// `n` points of the automorphism orbit `⟨a⟩`. Sample `i` uses its own
/// stream of `seed`.
pub fn sample_orbit(a: &Element, n: usize, seed: u64, n_factors: usize) -> Vec<Element> {
    let discrete = discrete_automorphisms(a.algebra());
    (0..n)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            random_automorphism(a.algebra(), &mut rng, n_factors, &discrete).apply_unchecked(a)
        })
        .collect()
}

/// `n` points `e^{tD} a` with `‖D‖_op = 1` and `|t| < eps`.
pub fn sample_restricted_orbit(a: &Element, eps: f64, n: usize, seed: u64) -> Result<Vec<Element>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(EjaError::InvalidArgument("eps must be positive".into()));
    }
    Ok((0..n)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            restricted_step(a, eps, &mut rng)
        })
        .collect())
}

pub(crate) fn restricted_step(a: &Element, eps: f64, rng: &mut TrialRng) -> Element {
    let Some(d) = random_unit_derivation(a.algebra(), rng) else {
        return a.clone();
    };
    let op = d.map.operator_norm();
    let t = rng.random_range(-eps..eps);
    exp_derivation(&d, t / op).apply_unchecked(a)
}

/// Orthonormal (Frobenius) basis of the span of the inner derivations
/// `[L_{bᵢ}, L_{bⱼ}]` of canonical basis pairs.
#[derive(Clone, Debug)]
pub struct DerivationBasis {
    algebra: Algebra,
    generators: Vec<DMatrix<f64>>,
}

impl DerivationBasis {
    pub fn new(algebra: &Algebra) -> Self {
        let mut generators: Vec<DMatrix<f64>> = Vec::new();
        for (offset, f) in algebra.blocks() {
            let basis: Vec<Element> = (0..f.dim()).map(|j| Element::basis(algebra, offset + j)).collect();
            let maps: Vec<LinearMap> = basis.iter().map(lmap).collect();
            for i in 0..maps.len() {
                for j in (i + 1)..maps.len() {
                    let mut m = maps[i].commutator(&maps[j]).matrix().clone();
                    for g in &generators {
                        let c = m.dot(g);
                        m -= g * c;
                    }
                    // Second pass for numerical orthogonality.
                    for g in &generators {
                        let c = m.dot(g);
                        m -= g * c;
                    }
                    let n = m.norm();
                    if n > 1e-9 {
                        generators.push(m / n);
                    }
                }
            }
        }
        Self { algebra: algebra.clone(), generators }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    /// Dimension of the spanned space of derivations.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    /// `(⟨D_k x, g⟩)_k`: derivatives of `t ↦ ⟨e^{tD_k} x, g⟩` at zero.
    pub fn directional_derivatives(&self, x: &Element, g: &Element) -> DVector<f64> {
        let gram = components::gram_diagonal(x.algebra());
        let weighted = g.coords().component_mul(&gram);
        DVector::from_iterator(self.generators.len(), self.generators.iter().map(|d| (d * x.coords()).dot(&weighted)))
    }

    /// `Σ c_k D_k`.
    pub fn combine(&self, coeffs: &DVector<f64>) -> DMatrix<f64> {
        let d = self.algebra.dim();
        let mut acc = DMatrix::zeros(d, d);
        for (c, g) in coeffs.iter().zip(&self.generators) {
            acc += g * *c;
        }
        acc
    }
}

/// Rank of `n_pairs` stacked, vectorized random inner derivations.
pub fn derivation_span_rank(algebra: &Algebra, n_pairs: usize, seed: u64) -> usize {
    let d = algebra.dim();
    let mut rng = rng_for(seed, 0);
    let mut stacked = DMatrix::zeros(d * d, n_pairs);
    for k in 0..n_pairs {
        let u = random_element(algebra, &mut rng);
        let v = random_element(algebra, &mut rng);
        let m = lmap(&u).commutator(&lmap(&v));
        let n = m.frobenius_norm().max(1e-300);
        stacked.column_mut(k).copy_from(&DVector::from_column_slice((m.matrix() / n).as_slice()));
    }
    let sv = stacked.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-9 * top).count()
}
