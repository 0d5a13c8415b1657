//! Decomposition of an algebra into simple components ("units").
//!
//! Every covered algebra is a product of simple ideals. A `rn:n` factor
//! contributes `n` copies of ℝ, `sym:1` one copy, and `spin:2` two (it is
//! isomorphic to ℝ²). `sym:n` for `n ≥ 2` and `spin:n` for `n ≥ 3` are simple.
//! Simple components are isomorphic exactly when they share `(rank, dim)`:
//! the only coincidence is `sym:2 ≅ spin:3`.
//!
//! Automorphisms of a product are generated by automorphisms of the simple
//! components and permutations of isomorphic components.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{sym_offdiag_index, Algebra, AlgebraKind, Element, LinearMap};
use crate::spectral::block_eigenvalues;

/// Isomorphism class of a simple component: `(rank, dim)`.
pub(crate) type UnitClass = (usize, usize);

pub(crate) const REAL_LINE: UnitClass = (1, 1);

#[derive(Clone, Debug)]
pub(crate) enum Unit {
    /// A copy of ℝ spanned by a central primitive idempotent (full coordinates).
    RealLine { idempotent: DVector<f64> },
    /// A whole simple factor occupying `offset..offset + dim`.
    Block { offset: usize, factor: Algebra },
}

impl Unit {
    pub(crate) fn class(&self) -> UnitClass {
        match self {
            Unit::RealLine { .. } => REAL_LINE,
            Unit::Block { factor, .. } => (factor.rank(), factor.dim()),
        }
    }

    pub(crate) fn is_real_line(&self) -> bool {
        matches!(self, Unit::RealLine { .. })
    }
}

pub(crate) fn units(algebra: &Algebra) -> Vec<Unit> {
    let dim = algebra.dim();
    let mut out = Vec::new();
    for (offset, f) in algebra.blocks() {
        match f.kind() {
            AlgebraKind::RealVector(n) => {
                for i in 0..*n {
                    let mut p = DVector::zeros(dim);
                    p[offset + i] = 1.0;
                    out.push(Unit::RealLine { idempotent: p });
                }
            }
            AlgebraKind::SymMatrix(1) => {
                let mut p = DVector::zeros(dim);
                p[offset] = 1.0;
                out.push(Unit::RealLine { idempotent: p });
            }
            AlgebraKind::SpinFactor(2) => {
                for sign in [1.0, -1.0] {
                    let mut p = DVector::zeros(dim);
                    p[offset] = 0.5;
                    p[offset + 1] = 0.5 * sign;
                    out.push(Unit::RealLine { idempotent: p });
                }
            }
            _ => out.push(Unit::Block { offset, factor: f.clone() }),
        }
    }
    out
}

/// Diagonal of the Gram matrix of the canonical basis.
pub(crate) fn gram_diagonal(algebra: &Algebra) -> DVector<f64> {
    let mut g = DVector::from_element(algebra.dim(), 1.0);
    for (offset, f) in algebra.blocks() {
        if let AlgebraKind::SpinFactor(n) = f.kind() {
            g.rows_mut(offset, *n).fill(2.0);
        }
    }
    g
}

/// Descending eigenvalues of `x` restricted to `unit`.
pub(crate) fn unit_eigenvalues(x: &Element, unit: &Unit) -> Vec<f64> {
    match unit {
        Unit::RealLine { idempotent } => {
            let g = gram_diagonal(x.algebra());
            vec![x.coords().iter().zip(idempotent.iter()).zip(g.iter()).map(|((a, b), w)| a * b * w).sum()]
        }
        Unit::Block { offset, factor } => block_eigenvalues(factor, &x.as_slice()[*offset..*offset + factor.dim()]),
    }
}

/// Linear isomorphism from a block's coordinates to the canonical
/// coordinates of its class. `sym:2` is sent to `spin:3` via
/// `[[p, q], [q, r]] ↦ ((p + r)/2, (p − r)/2, q)`; all others are the identity.
fn to_canonical(factor: &Algebra) -> DMatrix<f64> {
    match factor.kind() {
        AlgebraKind::SymMatrix(2) => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.5, -0.5, 0.0, 0.0, 0.0, h])
        }
        _ => DMatrix::identity(factor.dim(), factor.dim()),
    }
}

fn from_canonical(factor: &Algebra) -> DMatrix<f64> {
    match factor.kind() {
        AlgebraKind::SymMatrix(2) => {
            let s = std::f64::consts::SQRT_2;
            DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, s])
        }
        _ => DMatrix::identity(factor.dim(), factor.dim()),
    }
}

/// Automorphism exchanging two isomorphic simple components.
pub(crate) fn swap_map(algebra: &Algebra, a: &Unit, b: &Unit) -> LinearMap {
    debug_assert_eq!(a.class(), b.class());
    let dim = algebra.dim();
    let mut m = DMatrix::identity(dim, dim);
    match (a, b) {
        (Unit::RealLine { idempotent: p }, Unit::RealLine { idempotent: q }) => {
            // x ↦ x − ⟨x,p⟩p − ⟨x,q⟩q + ⟨x,p⟩q + ⟨x,q⟩p
            let g = DMatrix::from_diagonal(&gram_diagonal(algebra));
            let diff = p - q;
            m -= &diff * (diff.transpose() * g);
        }
        (Unit::Block { offset: oa, factor: fa }, Unit::Block { offset: ob, factor: fb }) => {
            let d = fa.dim();
            m.view_mut((*oa, *oa), (d, d)).fill(0.0);
            m.view_mut((*ob, *ob), (d, d)).fill(0.0);
            let a_from_b = from_canonical(fa) * to_canonical(fb);
            let b_from_a = from_canonical(fb) * to_canonical(fa);
            m.view_mut((*oa, *ob), (d, d)).copy_from(&a_from_b);
            m.view_mut((*ob, *oa), (d, d)).copy_from(&b_from_a);
        }
        _ => unreachable!("units of one class share a representation"),
    }
    LinearMap::from_raw(algebra.clone(), m)
}

/// Automorphisms outside the identity component that act inside a single
/// factor: `(x₀, x̄) ↦ (x₀, R x̄)` with `R` a coordinate reflection for spin
/// factors, and `X ↦ S X S` with `S = diag(−1, 1, …, 1)` for `sym:n`.
pub(crate) fn reflection_maps(algebra: &Algebra) -> Vec<LinearMap> {
    let dim = algebra.dim();
    let mut out = Vec::new();
    for (offset, f) in algebra.blocks() {
        match f.kind() {
            AlgebraKind::SpinFactor(n) => {
                let mut m = DMatrix::identity(dim, dim);
                m[(offset + n - 1, offset + n - 1)] = -1.0;
                out.push(LinearMap::from_raw(algebra.clone(), m));
            }
            AlgebraKind::SymMatrix(n) if *n >= 2 => {
                let mut m = DMatrix::identity(dim, dim);
                for j in 1..*n {
                    let k = offset + sym_offdiag_index(*n, 0, j);
                    m[(k, k)] = -1.0;
                }
                out.push(LinearMap::from_raw(algebra.clone(), m));
            }
            _ => {}
        }
    }
    out
}

/// All automorphisms that swap one pair of isomorphic components.
pub(crate) fn swap_maps(algebra: &Algebra) -> Vec<LinearMap> {
    let us = units(algebra);
    let mut out = Vec::new();
    for i in 0..us.len() {
        for j in (i + 1)..us.len() {
            if us[i].class() == us[j].class() {
                out.push(swap_map(algebra, &us[i], &us[j]));
            }
        }
    }
    out
}

/// Whether `x` and `y` lie in the same automorphism orbit: their
/// components' spectra must agree up to a permutation of isomorphic
/// components, entrywise within `tol`.
pub(crate) fn same_automorphism_orbit(x: &Element, y: &Element, tol: f64) -> bool {
    if x.algebra() != y.algebra() {
        return false;
    }
    let us = units(x.algebra());
    let spectra_x: Vec<Vec<f64>> = us.iter().map(|u| unit_eigenvalues(x, u)).collect();
    let spectra_y: Vec<Vec<f64>> = us.iter().map(|u| unit_eigenvalues(y, u)).collect();

    let mut classes: Vec<UnitClass> = us.iter().map(Unit::class).collect();
    classes.sort_unstable();
    classes.dedup();
    classes.into_iter().all(|class| {
        let members: Vec<usize> = (0..us.len()).filter(|&i| us[i].class() == class).collect();
        let left: Vec<&[f64]> = members.iter().map(|&i| spectra_x[i].as_slice()).collect();
        let right: Vec<&[f64]> = members.iter().map(|&i| spectra_y[i].as_slice()).collect();
        if class == REAL_LINE {
            // Scalars match up to permutation iff their sorted lists match.
            let mut l: Vec<f64> = left.iter().map(|v| v[0]).collect();
            let mut r: Vec<f64> = right.iter().map(|v| v[0]).collect();
            l.sort_by(|a, b| b.total_cmp(a));
            r.sort_by(|a, b| b.total_cmp(a));
            l.iter().zip(&r).all(|(a, b)| (a - b).abs() <= tol)
        } else {
            let mut used = vec![false; right.len()];
            perfect_match(&left, &right, &mut used, tol)
        }
    })
}

fn perfect_match(left: &[&[f64]], right: &[&[f64]], used: &mut [bool], tol: f64) -> bool {
    let Some((first, rest)) = left.split_first() else {
        return true;
    };
    for j in 0..right.len() {
        if used[j] {
            continue;
        }
        let close = first.iter().zip(right[j]).all(|(a, b)| (a - b).abs() <= tol);
        if close {
            used[j] = true;
            if perfect_match(rest, right, used, tol) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}
