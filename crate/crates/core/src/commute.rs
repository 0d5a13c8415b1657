//! Operator and strong operator commutativity.
//!
//! `a` and `b` operator commute when `L_a L_b = L_b L_a`. They strongly
//! operator commute when some Jordan frame diagonalizes both with their
//! eigenvalues in decreasing order; this is certified by the equality case
//! `⟨a, b⟩ = ⟨λ(a), λ(b)⟩` of the trace inequality.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{lmap, rel_tol, sym_coords_to_matrix, sym_offdiag_index, Algebra, AlgebraKind, Element};
use crate::error::Result;
use crate::spectral::{spectral_decompose, trace_inequality_gap};

pub const DEFAULT_TOL: f64 = 1e-8;

/// `‖L_a L_b − L_b L_a‖_F` in canonical coordinates.
pub fn commutator_norm(a: &Element, b: &Element) -> Result<f64> {
    a.algebra().ensure_same(b.algebra())?;
    Ok(lmap(a).commutator(&lmap(b)).frobenius_norm())
}

/// Commutator norm within `tol·(1 + ‖a‖‖b‖)`. Elements of different
/// algebras never commute.
pub fn operator_commute(a: &Element, b: &Element, tol: f64) -> bool {
    match commutator_norm(a, b) {
        Ok(n) => n <= rel_tol(tol, a.norm() * b.norm()),
        Err(_) => false,
    }
}

pub fn strongly_operator_commute(a: &Element, b: &Element, tol: f64) -> bool {
    if !operator_commute(a, b, tol) {
        return false;
    }
    match trace_inequality_gap(a, b) {
        Ok(gap) => gap <= rel_tol(tol, a.norm() * b.norm()),
        Err(_) => false,
    }
}

/// One entry of a common frame: coefficients of `a` and `b` on `frame`.
struct Shared {
    a: f64,
    b: f64,
    block: DVector<f64>,
}

fn sym_frame_coords(n: usize, q: nalgebra::DVectorView<'_, f64>) -> DVector<f64> {
    let mut c = DVector::zeros(n * (n + 1) / 2);
    for i in 0..n {
        c[i] = q[i] * q[i];
        for j in (i + 1)..n {
            c[sym_offdiag_index(n, i, j)] = std::f64::consts::SQRT_2 * q[i] * q[j];
        }
    }
    c
}

fn common_sym(n: usize, a: &[f64], b: &[f64], cluster_tol: f64) -> Vec<Shared> {
    let am = sym_coords_to_matrix(n, a);
    let bm = sym_coords_to_matrix(n, b);
    let eig = SymmetricEigen::new(am);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]] <= cluster_tol {
            end += 1;
        }
        // Orthonormal basis of a's (numerical) eigenspace, then diagonalize b on it.
        let basis = DMatrix::from_fn(n, end - start, |r, c| eig.eigenvectors[(r, order[start + c])]);
        let a_value = (start..end).map(|k| eig.eigenvalues[order[k]]).sum::<f64>() / (end - start) as f64;
        let compressed = basis.transpose() * &bm * &basis;
        let inner = SymmetricEigen::new(compressed);
        for k in 0..(end - start) {
            let q = &basis * inner.eigenvectors.column(k);
            out.push(Shared { a: a_value, b: inner.eigenvalues[k], block: sym_frame_coords(n, q.column(0)) });
        }
        start = end;
    }
    out
}

fn block_frame(factor: &Algebra, x: &[f64]) -> Vec<(f64, DVector<f64>)> {
    let dec = spectral_decompose(&Element::from_raw(factor.clone(), DVector::from_column_slice(x)));
    dec.eigenvalues.into_iter().zip(dec.frame.into_iter().map(Element::into_coords)).collect()
}

fn coefficient(kind: &AlgebraKind, x: &[f64], f: &DVector<f64>) -> f64 {
    let dot: f64 = x.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
    match kind {
        AlgebraKind::SpinFactor(_) => 2.0 * dot,
        _ => dot,
    }
}

/// A Jordan frame diagonalizing both `a` and `b`, or `None` if they do not
/// operator commute within `tol`. Built by decomposing `a` and then `b`
/// inside each eigenspace of `a`. Entries are ordered by the coefficient of
/// `a`, then of `b`, both decreasing.
pub fn common_frame(a: &Element, b: &Element, tol: f64) -> Option<Vec<Element>> {
    if !operator_commute(a, b, tol) {
        return None;
    }
    let alg = a.algebra();
    let cluster_tol = rel_tol(tol, a.norm()).max(1e-12);
    let mut shared: Vec<(f64, f64, DVector<f64>)> = Vec::with_capacity(alg.rank());
    for (offset, f) in alg.blocks() {
        let r = offset..offset + f.dim();
        let (xa, xb) = (&a.as_slice()[r.clone()], &b.as_slice()[r]);
        let entries: Vec<Shared> = match f.kind() {
            AlgebraKind::SymMatrix(n) => common_sym(*n, xa, xb, cluster_tol),
            AlgebraKind::SpinFactor(_) => {
                let bar_a = xa[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
                // A multiple of the unit commutes with everything: use b's frame.
                let source = if bar_a <= cluster_tol { xb } else { xa };
                block_frame(f, source)
                    .into_iter()
                    .map(|(_, block)| Shared {
                        a: coefficient(f.kind(), xa, &block),
                        b: coefficient(f.kind(), xb, &block),
                        block,
                    })
                    .collect()
            }
            AlgebraKind::RealVector(_) => block_frame(f, xa)
                .into_iter()
                .map(|(_, block)| Shared {
                    a: coefficient(f.kind(), xa, &block),
                    b: coefficient(f.kind(), xb, &block),
                    block,
                })
                .collect(),
            AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
        };
        for s in entries {
            let mut c = DVector::zeros(alg.dim());
            c.rows_mut(offset, f.dim()).copy_from(&s.block);
            shared.push((s.a, s.b, c));
        }
    }
    shared.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));
    Some(shared.into_iter().map(|(_, _, c)| Element::from_raw(alg.clone(), c)).collect())
}
