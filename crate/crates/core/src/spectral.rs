//! Spectral decompositions `x = Σ λᵢ(x) eᵢ`, the eigenvalue map, the
//! symmetric cone and spectral functions.

use nalgebra::{DVector, SymmetricEigen};

use crate::algebra::{sym_coords_to_matrix, sym_offdiag_index, Algebra, AlgebraKind, Element};
use crate::error::Result;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Descending eigenvalues together with a Jordan frame.
///
/// Frames are not unique when eigenvalues repeat; any valid frame may be
/// returned.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub frame: Vec<Element>,
}

impl SpectralDecomposition {
    /// `Σ coeffs[i] · frame[i]`.
    pub fn combine(&self, coeffs: &[f64]) -> Element {
        assert_eq!(coeffs.len(), self.frame.len());
        let alg = self.frame[0].algebra();
        let mut acc = DVector::zeros(alg.dim());
        for (c, f) in coeffs.iter().zip(&self.frame) {
            acc.axpy(*c, f.coords(), 1.0);
        }
        Element::from_raw(alg.clone(), acc)
    }

    pub fn reconstruct(&self) -> Element {
        self.combine(&self.eigenvalues)
    }

    /// `Σ g(λᵢ) eᵢ`.
    pub fn map_eigenvalues(&self, g: impl Fn(f64) -> f64) -> Element {
        let coeffs: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        self.combine(&coeffs)
    }
}

/// Eigenpairs of one simple factor, as (eigenvalue, frame coords within the block).
fn block_pairs(factor: &Algebra, x: &[f64]) -> Vec<(f64, DVector<f64>)> {
    let d = factor.dim();
    match factor.kind() {
        AlgebraKind::RealVector(n) => (0..*n)
            .map(|i| {
                let mut c = DVector::zeros(d);
                c[i] = 1.0;
                (x[i], c)
            })
            .collect(),
        AlgebraKind::SymMatrix(n) => {
            let n = *n;
            let eig = SymmetricEigen::new(sym_coords_to_matrix(n, x));
            (0..n)
                .map(|k| {
                    let q = eig.eigenvectors.column(k);
                    let mut c = DVector::zeros(d);
                    for i in 0..n {
                        c[i] = q[i] * q[i];
                        for j in (i + 1)..n {
                            c[sym_offdiag_index(n, i, j)] = SQRT_2 * q[i] * q[j];
                        }
                    }
                    (eig.eigenvalues[k], c)
                })
                .collect()
        }
        AlgebraKind::SpinFactor(n) => {
            let bar = &x[1..];
            let r = bar.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut w = vec![0.0; n - 1];
            if r > 0.0 {
                for (wi, bi) in w.iter_mut().zip(bar) {
                    *wi = bi / r;
                }
            } else {
                w[0] = 1.0;
            }
            [1.0, -1.0]
                .into_iter()
                .map(|s| {
                    let mut c = DVector::zeros(d);
                    c[0] = 0.5;
                    for (k, wk) in w.iter().enumerate() {
                        c[k + 1] = 0.5 * s * wk;
                    }
                    (x[0] + s * r, c)
                })
                .collect()
        }
        AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
    }
}

/// Descending eigenvalues of a simple factor's coordinates.
pub(crate) fn block_eigenvalues(factor: &Algebra, x: &[f64]) -> Vec<f64> {
    let mut vals = match factor.kind() {
        AlgebraKind::RealVector(_) => x.to_vec(),
        AlgebraKind::SymMatrix(n) => sym_coords_to_matrix(*n, x).symmetric_eigenvalues().iter().copied().collect(),
        AlgebraKind::SpinFactor(_) => {
            let r = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            vec![x[0] + r, x[0] - r]
        }
        AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
    };
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

pub fn spectral_decompose(x: &Element) -> SpectralDecomposition {
    let alg = x.algebra();
    let mut pairs: Vec<(f64, Element)> = Vec::with_capacity(alg.rank());
    for (offset, f) in alg.blocks() {
        for (lambda, block) in block_pairs(f, &x.as_slice()[offset..offset + f.dim()]) {
            let mut c = DVector::zeros(alg.dim());
            c.rows_mut(offset, f.dim()).copy_from(&block);
            pairs.push((lambda, Element::from_raw(alg.clone(), c)));
        }
    }
    // Stable: ties keep factor order.
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (eigenvalues, frame) = pairs.into_iter().unzip();
    SpectralDecomposition { eigenvalues, frame }
}

/// `λ(x)`, sorted in decreasing order.
pub fn eigenvalue_map(x: &Element) -> Vec<f64> {
    let mut vals = Vec::with_capacity(x.algebra().rank());
    for (offset, f) in x.algebra().blocks() {
        vals.extend(block_eigenvalues(f, &x.as_slice()[offset..offset + f.dim()]));
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

pub fn min_eigenvalue(x: &Element) -> f64 {
    eigenvalue_map(x).last().copied().unwrap_or(0.0)
}

/// Membership in the symmetric cone: `λ_min(x) ≥ −tol`.
pub fn in_symmetric_cone(x: &Element, tol: f64) -> bool {
    min_eigenvalue(x) >= -tol
}

/// Nearest point of the symmetric cone: `Σ max(λᵢ, 0) eᵢ`.
pub fn project_symmetric_cone(p: &Element) -> Element {
    spectral_decompose(p).map_eigenvalues(|l| l.max(0.0))
}

/// `⟨λ(x), λ(y)⟩ − ⟨x, y⟩`, which is never negative.
pub fn trace_inequality_gap(x: &Element, y: &Element) -> Result<f64> {
    let ip = x.inner(y)?;
    let lx = eigenvalue_map(x);
    let ly = eigenvalue_map(y);
    let dot: f64 = lx.iter().zip(&ly).map(|(a, b)| a * b).sum();
    Ok(dot - ip)
}

/// Evaluates `f(λ(x))`. Whatever `f` returns is passed through, so a
/// fallible `f` propagates its own errors.
pub fn eval_spectral_function<T>(f: impl FnOnce(&[f64]) -> T, x: &Element) -> T {
    f(&eigenvalue_map(x))
}
