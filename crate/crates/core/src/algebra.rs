//! Algebra descriptors, elements in canonical coordinates, the Jordan
//! product, the trace inner product and left-multiplication operators.
//!
//! Canonical bases:
//!
//! * `rn:n` uses the standard basis of ℝⁿ.
//! * `sym:n` lists the diagonal units `E_ii` first, followed by the
//!   off-diagonal units `(E_ij + E_ji)/√2` for `i < j` in row-major order.
//!   Coordinates are orthonormal for `⟨X, Y⟩ = tr(XY)`.
//! * `spin:n` uses `(x₀, x̄) ∈ ℝ × ℝⁿ⁻¹`.
//! * products concatenate the factor coordinates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{EjaError, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    RealVector(usize),
    SymMatrix(usize),
    SpinFactor(usize),
    /// Always flattened: no factor is itself a product.
    Product(Arc<[Algebra]>),
}

/// Identifies a Euclidean Jordan algebra and fixes its dimension and rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Algebra {
    kind: AlgebraKind,
    dim: usize,
    rank: usize,
}

impl Algebra {
    pub fn real_vector(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(EjaError::InvalidAlgebra("rn:n requires n >= 1".into()));
        }
        Ok(Self { kind: AlgebraKind::RealVector(n), dim: n, rank: n })
    }

    pub fn sym_matrix(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(EjaError::InvalidAlgebra("sym:n requires n >= 1".into()));
        }
        Ok(Self { kind: AlgebraKind::SymMatrix(n), dim: n * (n + 1) / 2, rank: n })
    }

    pub fn spin_factor(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(EjaError::InvalidAlgebra("spin:n requires n >= 2".into()));
        }
        Ok(Self { kind: AlgebraKind::SpinFactor(n), dim: n, rank: 2 })
    }

    /// Direct product. Nested products are flattened; at least two factors
    /// must remain afterwards.
    pub fn product(factors: Vec<Algebra>) -> Result<Self> {
        let mut flat = Vec::with_capacity(factors.len());
        for f in factors {
            match f.kind {
                AlgebraKind::Product(inner) => flat.extend(inner.iter().cloned()),
                _ => flat.push(f),
            }
        }
        if flat.len() < 2 {
            return Err(EjaError::InvalidAlgebra("a product needs at least two factors".into()));
        }
        let dim = flat.iter().map(|f| f.dim).sum();
        let rank = flat.iter().map(|f| f.rank).sum();
        Ok(Self { kind: AlgebraKind::Product(flat.into()), dim, rank })
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_product(&self) -> bool {
        matches!(self.kind, AlgebraKind::Product(_))
    }

    /// The non-product factors; a single-element slice for a non-product.
    pub fn factors(&self) -> &[Algebra] {
        match &self.kind {
            AlgebraKind::Product(fs) => fs,
            _ => std::slice::from_ref(self),
        }
    }

    /// `(coordinate offset, factor)` pairs.
    pub fn blocks(&self) -> Vec<(usize, &Algebra)> {
        let mut offset = 0;
        self.factors()
            .iter()
            .map(|f| {
                let b = (offset, f);
                offset += f.dim;
                b
            })
            .collect()
    }

    /// Simple, or isomorphic to ℝⁿ.
    pub fn is_essentially_simple(&self) -> bool {
        let units = crate::components::units(self);
        units.len() == 1 || units.iter().all(|u| u.is_real_line())
    }

    pub(crate) fn ensure_same(&self, other: &Algebra) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(EjaError::AlgebraMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AlgebraKind::RealVector(n) => write!(f, "rn:{n}"),
            AlgebraKind::SymMatrix(n) => write!(f, "sym:{n}"),
            AlgebraKind::SpinFactor(n) => write!(f, "spin:{n}"),
            AlgebraKind::Product(fs) => {
                f.write_str("prod(")?;
                for (i, a) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for Algebra {
    type Err = EjaError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = DescriptorParser { input: &compact, pos: 0 };
        let alg = parser.algebra().map_err(|reason| EjaError::Parse { input: s.to_string(), reason })?;
        if parser.pos != compact.len() {
            return Err(EjaError::Parse {
                input: s.to_string(),
                reason: format!("trailing input at offset {}", parser.pos),
            });
        }
        Ok(alg)
    }
}

struct DescriptorParser<'a> {
    input: &'a str,
    pos: usize,
}

impl DescriptorParser<'_> {
    fn rest(&self) -> &str {
        &self.input[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> std::result::Result<usize, String> {
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(format!("expected a number at offset {}", self.pos));
        }
        self.pos += digits.len();
        digits.parse().map_err(|e| format!("{e}"))
    }

    fn algebra(&mut self) -> std::result::Result<Algebra, String> {
        let simple = |r: Result<Algebra>| r.map_err(|e| e.to_string());
        if self.eat("prod(") {
            let mut factors = vec![self.algebra()?];
            while self.eat(",") {
                factors.push(self.algebra()?);
            }
            if !self.eat(")") {
                return Err(format!("expected ')' at offset {}", self.pos));
            }
            simple(Algebra::product(factors))
        } else if self.eat("rn:") {
            simple(Algebra::real_vector(self.number()?))
        } else if self.eat("sym:") {
            simple(Algebra::sym_matrix(self.number()?))
        } else if self.eat("spin:") {
            simple(Algebra::spin_factor(self.number()?))
        } else {
            Err(format!("unknown algebra family at offset {}", self.pos))
        }
    }
}

impl Serialize for Algebra {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algebra {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index of the `(E_ij + E_ji)/√2` coordinate, `i < j`, in `sym:n`.
pub(crate) fn sym_offdiag_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    n + i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub(crate) fn sym_coords_to_matrix(n: usize, coords: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = coords[i];
        for j in (i + 1)..n {
            let v = coords[sym_offdiag_index(n, i, j)] * FRAC_1_SQRT_2;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Coordinates of the symmetric part of `m`.
pub(crate) fn sym_matrix_to_coords(m: &DMatrix<f64>, out: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        out[i] = m[(i, i)];
        for j in (i + 1)..n {
            out[sym_offdiag_index(n, i, j)] = (m[(i, j)] + m[(j, i)]) * FRAC_1_SQRT_2;
        }
    }
}

fn jordan_block(kind: &AlgebraKind, x: &[f64], y: &[f64], out: &mut [f64]) {
    match kind {
        AlgebraKind::RealVector(_) => {
            for ((o, a), b) in out.iter_mut().zip(x).zip(y) {
                *o = a * b;
            }
        }
        AlgebraKind::SymMatrix(n) => {
            let xm = sym_coords_to_matrix(*n, x);
            let ym = sym_coords_to_matrix(*n, y);
            let s = (&xm * &ym + &ym * &xm) * 0.5;
            sym_matrix_to_coords(&s, out);
        }
        AlgebraKind::SpinFactor(_) => {
            let bar: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
            out[0] = x[0] * y[0] + bar;
            for k in 1..x.len() {
                out[k] = x[0] * y[k] + y[0] * x[k];
            }
        }
        AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
    }
}

fn inner_block(kind: &AlgebraKind, x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    match kind {
        AlgebraKind::SpinFactor(_) => 2.0 * dot,
        _ => dot,
    }
}

fn trace_block(kind: &AlgebraKind, x: &[f64]) -> f64 {
    match kind {
        AlgebraKind::RealVector(_) => x.iter().sum(),
        AlgebraKind::SymMatrix(n) => x[..*n].iter().sum(),
        AlgebraKind::SpinFactor(_) => 2.0 * x[0],
        AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
    }
}

/// A point of an algebra, stored as canonical coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    algebra: Algebra,
    coords: DVector<f64>,
}

impl Element {
    pub fn new(algebra: Algebra, coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(algebra, DVector::from_vec(coords))
    }

    pub fn from_vector(algebra: Algebra, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(EjaError::DimensionMismatch { expected: algebra.dim(), got: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(EjaError::NonFinite);
        }
        Ok(Self { algebra, coords })
    }

    /// Caller guarantees the length matches.
    pub(crate) fn from_raw(algebra: Algebra, coords: DVector<f64>) -> Self {
        debug_assert_eq!(coords.len(), algebra.dim());
        Self { algebra, coords }
    }

    pub fn zeros(algebra: &Algebra) -> Self {
        Self::from_raw(algebra.clone(), DVector::zeros(algebra.dim()))
    }

    pub fn unit(algebra: &Algebra) -> Self {
        let mut coords = DVector::zeros(algebra.dim());
        for (offset, f) in algebra.blocks() {
            match f.kind() {
                AlgebraKind::RealVector(n) | AlgebraKind::SymMatrix(n) => {
                    coords.rows_mut(offset, *n).fill(1.0);
                }
                AlgebraKind::SpinFactor(_) => coords[offset] = 1.0,
                AlgebraKind::Product(_) => unreachable!(),
            }
        }
        Self::from_raw(algebra.clone(), coords)
    }

    /// The `j`-th canonical basis vector.
    pub fn basis(algebra: &Algebra, j: usize) -> Self {
        let mut coords = DVector::zeros(algebra.dim());
        coords[j] = 1.0;
        Self::from_raw(algebra.clone(), coords)
    }

    /// Embeds a symmetric matrix into `sym:n`. The matrix must be symmetric.
    pub fn from_sym_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(EjaError::InvalidArgument("matrix must be square".into()));
        }
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * (1.0 + m.amax()) {
            return Err(EjaError::InvalidArgument("matrix must be symmetric".into()));
        }
        let algebra = Algebra::sym_matrix(n)?;
        let mut coords = vec![0.0; algebra.dim()];
        sym_matrix_to_coords(m, &mut coords);
        Self::new(algebra, coords)
    }

    /// Builds a `sym:n` element from row-major nested rows.
    pub fn from_sym_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(EjaError::InvalidArgument("rows must form a square matrix".into()));
        }
        Self::from_sym_matrix(&DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Matrix form of a `sym:n` element.
    pub fn to_sym_matrix(&self) -> Option<DMatrix<f64>> {
        match self.algebra.kind() {
            AlgebraKind::SymMatrix(n) => Some(sym_coords_to_matrix(*n, self.coords.as_slice())),
            _ => None,
        }
    }

    /// Concatenates factor elements into an element of `algebra`.
    pub fn from_factors(algebra: &Algebra, parts: &[Element]) -> Result<Self> {
        let factors = algebra.factors();
        if parts.len() != factors.len() {
            return Err(EjaError::InvalidArgument(format!(
                "expected {} factor elements, got {}",
                factors.len(),
                parts.len()
            )));
        }
        let mut coords = Vec::with_capacity(algebra.dim());
        for (p, f) in parts.iter().zip(factors) {
            p.algebra.ensure_same(f)?;
            coords.extend(p.coords.iter());
        }
        Self::new(algebra.clone(), coords)
    }

    /// Component of `self` in factor `i`.
    pub fn factor(&self, i: usize) -> Element {
        let (offset, f) = self.algebra.blocks()[i];
        Self::from_raw(f.clone(), self.coords.rows(offset, f.dim()).into_owned())
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn jordan(&self, other: &Element) -> Result<Element> {
        self.algebra.ensure_same(&other.algebra)?;
        Ok(self.jordan_unchecked(other))
    }

    pub(crate) fn jordan_unchecked(&self, other: &Element) -> Element {
        let mut out = DVector::zeros(self.algebra.dim());
        for (offset, f) in self.algebra.blocks() {
            let r = offset..offset + f.dim();
            jordan_block(
                f.kind(),
                &self.coords.as_slice()[r.clone()],
                &other.coords.as_slice()[r.clone()],
                &mut out.as_mut_slice()[r],
            );
        }
        Element::from_raw(self.algebra.clone(), out)
    }

    pub fn square(&self) -> Element {
        self.jordan_unchecked(self)
    }

    pub fn inner(&self, other: &Element) -> Result<f64> {
        self.algebra.ensure_same(&other.algebra)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Element) -> f64 {
        self.algebra
            .blocks()
            .into_iter()
            .map(|(offset, f)| {
                let r = offset..offset + f.dim();
                inner_block(f.kind(), &self.coords.as_slice()[r.clone()], &other.coords.as_slice()[r])
            })
            .sum()
    }

    pub fn trace(&self) -> f64 {
        self.algebra
            .blocks()
            .into_iter()
            .map(|(offset, f)| trace_block(f.kind(), &self.coords.as_slice()[offset..offset + f.dim()]))
            .sum()
    }

    /// Norm induced by the trace inner product.
    pub fn norm(&self) -> f64 {
        self.inner_unchecked(self).max(0.0).sqrt()
    }

    pub fn distance(&self, other: &Element) -> f64 {
        (self - other).norm()
    }

    pub fn scale(&self, s: f64) -> Element {
        Element::from_raw(self.algebra.clone(), &self.coords * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Element) -> Element {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        Element::from_raw(self.algebra.clone(), &self.coords + &other.coords * s)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        Element::from_raw(self.algebra.clone(), &self.coords + &rhs.coords)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch");
        Element::from_raw(self.algebra.clone(), &self.coords - &rhs.coords)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::from_raw(self.algebra.clone(), -&self.coords)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

/// `x ∘ y`.
pub fn jordan_product(x: &Element, y: &Element) -> Result<Element> {
    x.jordan(y)
}

/// `⟨x, y⟩ = tr(x ∘ y)`.
pub fn inner(x: &Element, y: &Element) -> Result<f64> {
    x.inner(y)
}

pub fn unit(algebra: &Algebra) -> Element {
    Element::unit(algebra)
}

/// A real `dim × dim` matrix acting on canonical coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    algebra: Algebra,
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(algebra: Algebra, matrix: DMatrix<f64>) -> Result<Self> {
        let d = algebra.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(EjaError::DimensionMismatch { expected: d, got: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { algebra, matrix })
    }

    pub(crate) fn from_raw(algebra: Algebra, matrix: DMatrix<f64>) -> Self {
        debug_assert_eq!(matrix.nrows(), algebra.dim());
        Self { algebra, matrix }
    }

    pub fn identity(algebra: &Algebra) -> Self {
        Self::from_raw(algebra.clone(), DMatrix::identity(algebra.dim(), algebra.dim()))
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Self::from_raw(algebra.clone(), DMatrix::zeros(algebra.dim(), algebra.dim()))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.algebra.ensure_same(x.algebra())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Element) -> Element {
        Element::from_raw(self.algebra.clone(), &self.matrix * &x.coords)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        Self::from_raw(self.algebra.clone(), &self.matrix * &other.matrix)
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        Self::from_raw(self.algebra.clone(), &self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    pub fn scale(&self, s: f64) -> LinearMap {
        Self::from_raw(self.algebra.clone(), &self.matrix * s)
    }

    pub fn transpose(&self) -> LinearMap {
        Self::from_raw(self.algebra.clone(), self.matrix.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix.clone().singular_values().max()
    }
}

fn lmap_block(kind: &AlgebraKind, x: &[f64], mut out: nalgebra::DMatrixViewMut<'_, f64>) {
    match kind {
        AlgebraKind::RealVector(_) => {
            for (i, v) in x.iter().enumerate() {
                out[(i, i)] = *v;
            }
        }
        AlgebraKind::SpinFactor(n) => {
            for i in 0..*n {
                out[(i, i)] = x[0];
                if i > 0 {
                    out[(0, i)] = x[i];
                    out[(i, 0)] = x[i];
                }
            }
        }
        AlgebraKind::SymMatrix(n) => {
            let d = x.len();
            let mut basis = vec![0.0; d];
            let mut col = vec![0.0; d];
            for j in 0..d {
                basis[j] = 1.0;
                jordan_block(&AlgebraKind::SymMatrix(*n), x, &basis, &mut col);
                basis[j] = 0.0;
                for i in 0..d {
                    out[(i, j)] = col[i];
                }
            }
        }
        AlgebraKind::Product(_) => unreachable!("product factors are flattened"),
    }
}

/// `L_x : y ↦ x ∘ y`. Column `j` holds the coordinates of `x ∘ basis_j`.
pub fn lmap(x: &Element) -> LinearMap {
    let alg = x.algebra();
    let mut m = DMatrix::zeros(alg.dim(), alg.dim());
    for (offset, f) in alg.blocks() {
        let d = f.dim();
        lmap_block(f.kind(), &x.as_slice()[offset..offset + d], m.view_mut((offset, offset), (d, d)));
    }
    LinearMap::from_raw(alg.clone(), m)
}

/// Scales an absolute tolerance by `1 + scale`.
pub fn rel_tol(tol: f64, scale: f64) -> f64 {
    tol * (1.0 + scale.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> Element {
        Element::from_sym_rows(rows).unwrap()
    }

    #[test]
    fn parses_and_prints_descriptors() {
        for s in ["rn:5", "sym:3", "spin:4", "prod(sym:1,sym:2)", "prod(spin:3,sym:2,rn:2)"] {
            let a: Algebra = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        let nested: Algebra = "prod(sym:1, prod(sym:2, rn:3))".parse().unwrap();
        assert_eq!(nested.to_string(), "prod(sym:1,sym:2,rn:3)");
        assert_eq!(nested.dim(), 1 + 3 + 3);
        assert_eq!(nested.rank(), 1 + 2 + 3);
    }

    #[test]
    fn rejects_bad_descriptors() {
        for s in ["", "rn:0", "spin:1", "sym:", "foo:3", "prod(sym:2)", "prod(sym:1,sym:2", "rn:3x"] {
            assert!(s.parse::<Algebra>().is_err(), "{s} should not parse");
        }
    }

    #[test]
    fn dims_and_ranks() {
        let s = Algebra::sym_matrix(4).unwrap();
        assert_eq!((s.dim(), s.rank()), (10, 4));
        let p = Algebra::spin_factor(7).unwrap();
        assert_eq!((p.dim(), p.rank()), (7, 2));
    }

    #[test]
    fn sym_product_of_commuting_pair() {
        let x = sym(&[&[3.0, 1.0], &[1.0, 3.0]]);
        let y = sym(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let p = x.jordan(&y).unwrap();
        let m = p.to_sym_matrix().unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[5.0, -1.0, -1.0, 5.0]);
        assert!((m - expected).amax() < 1e-14);
        assert!((x.inner(&y).unwrap() - 10.0).abs() < 1e-14);
        assert_eq!(p, y.jordan(&x).unwrap());
    }

    #[test]
    fn real_vector_product_is_componentwise() {
        let a = Algebra::real_vector(2).unwrap();
        let x = Element::new(a.clone(), vec![1.0, 2.0]).unwrap();
        let y = Element::new(a, vec![3.0, 4.0]).unwrap();
        assert_eq!(x.jordan(&y).unwrap().as_slice(), &[3.0, 8.0]);
    }

    #[test]
    fn units() {
        let a = Algebra::real_vector(3).unwrap();
        assert_eq!(Element::unit(&a).as_slice(), &[1.0, 1.0, 1.0]);
        let s = Algebra::spin_factor(4).unwrap();
        assert_eq!(Element::unit(&s).as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        let m = Algebra::sym_matrix(3).unwrap();
        let e = Element::unit(&m).to_sym_matrix().unwrap();
        assert_eq!(e, DMatrix::identity(3, 3));
        for alg in [a, s, m] {
            let e = Element::unit(&alg);
            assert!((e.inner(&e).unwrap() - alg.rank() as f64).abs() < 1e-15);
            let id = DMatrix::identity(alg.dim(), alg.dim());
            assert!((lmap(&e).matrix() - id).amax() < 1e-15);
        }
    }

    #[test]
    fn product_inner_matches_block_arithmetic() {
        let alg: Algebra = "prod(sym:1,sym:2)".parse().unwrap();
        let a = Element::new(alg.clone(), vec![2.0, 2.0, 2.0, std::f64::consts::SQRT_2]).unwrap();
        let c = Element::new(alg, vec![4.0, 2.0, 2.0, std::f64::consts::SQRT_2]).unwrap();
        assert!((a.inner(&c).unwrap() - 18.0).abs() < 1e-12);
    }

    #[test]
    fn lmap_examples() {
        let a = Algebra::real_vector(2).unwrap();
        let x = Element::new(a, vec![2.0, 3.0]).unwrap();
        assert_eq!(lmap(&x).matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])));

        let s = Algebra::spin_factor(3).unwrap();
        let x = Element::new(s.clone(), vec![0.0, 1.0, 0.0]).unwrap();
        let lx = lmap(&x);
        assert_eq!(lx.apply(&Element::unit(&s)).unwrap(), x);
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let x = Element::unit(&Algebra::real_vector(2).unwrap());
        let y = Element::unit(&Algebra::spin_factor(2).unwrap());
        assert!(matches!(x.jordan(&y), Err(EjaError::AlgebraMismatch { .. })));
        assert!(x.inner(&y).is_err());
    }

    #[test]
    fn element_validation() {
        let a = Algebra::sym_matrix(2).unwrap();
        assert!(matches!(Element::new(a.clone(), vec![1.0]), Err(EjaError::DimensionMismatch { .. })));
        assert!(matches!(Element::new(a, vec![1.0, f64::NAN, 0.0]), Err(EjaError::NonFinite)));
    }

    #[test]
    fn offdiag_indexing_is_a_bijection() {
        let n = 5;
        let mut seen = vec![false; n * (n + 1) / 2];
        for i in 0..n {
            seen[i] = true;
            for j in (i + 1)..n {
                let k = sym_offdiag_index(n, i, j);
                assert!(!seen[k]);
                seen[k] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }
}
