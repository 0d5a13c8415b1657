//! Descriptions of constraint sets and membership tests.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{rel_tol, Algebra, Element};
use crate::components;
use crate::error::{EjaError, Result};
use crate::spectral::{eigenvalue_map, in_symmetric_cone, project_symmetric_cone, spectral_decompose};

pub type EigenvaluePredicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
pub type EigenvalueProjector = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A permutation-invariant region `Q ⊆ ℝ^rank`; the set is `λ⁻¹(Q)`.
#[derive(Clone)]
pub enum RegionKind {
    /// `Q = ℝ^rank`, i.e. the whole algebra.
    Whole,
    /// `Q = [lower, upper]^rank`.
    Box { lower: f64, upper: f64 },
    /// User-supplied predicate on sorted eigenvalues, with an optional
    /// projector onto `Q`. Not serializable.
    Custom { name: String, contains: EigenvaluePredicate, projector: Option<EigenvalueProjector> },
}

impl fmt::Debug for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionKind::Whole => f.write_str("Whole"),
            RegionKind::Box { lower, upper } => write!(f, "Box[{lower}, {upper}]"),
            RegionKind::Custom { name, projector, .. } => {
                write!(f, "Custom({name}, projector: {})", projector.is_some())
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenvalueRegion {
    pub algebra: Algebra,
    pub kind: RegionKind,
}

impl EigenvalueRegion {
    pub fn whole(algebra: &Algebra) -> Self {
        Self { algebra: algebra.clone(), kind: RegionKind::Whole }
    }

    pub fn eigenvalue_box(algebra: &Algebra, lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(EjaError::InvalidSet(format!("empty box [{lower}, {upper}]")));
        }
        Ok(Self { algebra: algebra.clone(), kind: RegionKind::Box { lower, upper } })
    }

    pub fn custom(
        algebra: &Algebra,
        name: impl Into<String>,
        contains: EigenvaluePredicate,
        projector: Option<EigenvalueProjector>,
    ) -> Self {
        Self { algebra: algebra.clone(), kind: RegionKind::Custom { name: name.into(), contains, projector } }
    }

    pub fn contains_eigenvalues(&self, lambda: &[f64], tol: f64) -> bool {
        match &self.kind {
            RegionKind::Whole => true,
            RegionKind::Box { lower, upper } => lambda.iter().all(|l| *l >= lower - tol && *l <= upper + tol),
            RegionKind::Custom { contains, .. } => contains(lambda),
        }
    }

    pub fn has_projector(&self) -> bool {
        match &self.kind {
            RegionKind::Custom { projector, .. } => projector.is_some(),
            _ => true,
        }
    }

    /// Projects sorted eigenvalues onto `Q`.
    pub fn project_eigenvalues(&self, lambda: &[f64]) -> Option<Vec<f64>> {
        match &self.kind {
            RegionKind::Whole => Some(lambda.to_vec()),
            RegionKind::Box { lower, upper } => Some(lambda.iter().map(|l| l.clamp(*lower, *upper)).collect()),
            RegionKind::Custom { projector, .. } => projector.as_ref().map(|p| p(lambda)),
        }
    }
}

/// A constraint set `E`.
#[derive(Clone, Debug)]
pub enum SetSpec {
    SymmetricCone(Algebra),
    /// `[a] = {x : λ(x) = λ(a)}`.
    EigenvalueOrbit(Element),
    /// `⟨a⟩ = {Aa : A ∈ Aut(𝒱)}`.
    AutomorphismOrbit(Element),
    FiniteSet(Vec<Element>),
    EigenvalueRegion(EigenvalueRegion),
}

impl SetSpec {
    pub fn finite(points: Vec<Element>) -> Result<Self> {
        let first = points.first().ok_or_else(|| EjaError::InvalidSet("finite set must be nonempty".into()))?;
        for p in &points[1..] {
            first.algebra().ensure_same(p.algebra())?;
        }
        Ok(SetSpec::FiniteSet(points))
    }

    pub fn algebra(&self) -> &Algebra {
        match self {
            SetSpec::SymmetricCone(a) => a,
            SetSpec::EigenvalueOrbit(x) | SetSpec::AutomorphismOrbit(x) => x.algebra(),
            SetSpec::FiniteSet(pts) => pts[0].algebra(),
            SetSpec::EigenvalueRegion(r) => &r.algebra,
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            SetSpec::SymmetricCone(_) => "symmetric_cone",
            SetSpec::EigenvalueOrbit(_) => "eigenvalue_orbit",
            SetSpec::AutomorphismOrbit(_) => "automorphism_orbit",
            SetSpec::FiniteSet(_) => "finite_set",
            SetSpec::EigenvalueRegion(_) => "eigenvalue_region",
        }
    }

    /// Whether the set is of the form `λ⁻¹(Q)` by construction.
    pub fn is_spectral(&self) -> bool {
        match self {
            SetSpec::SymmetricCone(_) | SetSpec::EigenvalueOrbit(_) | SetSpec::EigenvalueRegion(_) => true,
            SetSpec::AutomorphismOrbit(x) => x.algebra().is_essentially_simple(),
            SetSpec::FiniteSet(_) => false,
        }
    }

    /// Whether the set is invariant under every automorphism by construction.
    pub fn is_weakly_spectral(&self) -> bool {
        !matches!(self, SetSpec::FiniteSet(_))
    }

    pub fn contains(&self, x: &Element, tol: f64) -> bool {
        set_contains(self, x, tol)
    }

    /// Nearest point, for the variants that carry a projector.
    pub fn project(&self, p: &Element) -> Result<Element> {
        self.algebra().ensure_same(p.algebra())?;
        match self {
            SetSpec::SymmetricCone(_) => Ok(project_symmetric_cone(p)),
            SetSpec::EigenvalueRegion(r) => {
                let dec = spectral_decompose(p);
                let projected = r
                    .project_eigenvalues(&dec.eigenvalues)
                    .ok_or_else(|| EjaError::UnsupportedSet("eigenvalue_region without projector".into()))?;
                if projected.len() != dec.eigenvalues.len() {
                    return Err(EjaError::InvalidSet("projector changed the eigenvalue count".into()));
                }
                Ok(dec.combine(&projected))
            }
            other => Err(EjaError::UnsupportedSet(other.variant_name().into())),
        }
    }

    /// Lists the points of a finite set. Eigenvalue orbits are finite when
    /// the algebra is isomorphic to ℝⁿ; they are enumerated as well.
    pub fn enumerate(&self) -> Option<Vec<Element>> {
        match self {
            SetSpec::FiniteSet(pts) => Some(pts.clone()),
            SetSpec::EigenvalueOrbit(anchor) | SetSpec::AutomorphismOrbit(anchor) => {
                let units = components::units(anchor.algebra());
                if !units.iter().all(|u| u.is_real_line()) || units.len() > 8 {
                    return None;
                }
                let values: Vec<f64> = units.iter().map(|u| components::unit_eigenvalues(anchor, u)[0]).collect();
                let mut out: Vec<Element> = Vec::new();
                for perm in permutations(values.len()) {
                    let mut coords = nalgebra::DVector::zeros(anchor.algebra().dim());
                    for (slot, &src) in perm.iter().enumerate() {
                        if let components::Unit::RealLine { idempotent } = &units[slot] {
                            coords.axpy(values[src], idempotent, 1.0);
                        }
                    }
                    let x = Element::from_raw(anchor.algebra().clone(), coords);
                    if !out.iter().any(|y| y.as_slice() == x.as_slice()) {
                        out.push(x);
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Membership of `x` in `set`, with eigenvalue comparisons done within `tol`.
pub fn set_contains(set: &SetSpec, x: &Element, tol: f64) -> bool {
    if set.algebra() != x.algebra() {
        return false;
    }
    match set {
        SetSpec::SymmetricCone(_) => in_symmetric_cone(x, tol),
        SetSpec::EigenvalueOrbit(anchor) => {
            let lx = eigenvalue_map(x);
            let la = eigenvalue_map(anchor);
            let dist = lx.iter().zip(&la).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            dist <= tol
        }
        SetSpec::AutomorphismOrbit(anchor) => components::same_automorphism_orbit(x, anchor, tol),
        SetSpec::FiniteSet(pts) => pts.iter().any(|p| p.distance(x) <= rel_tol(tol, p.norm())),
        SetSpec::EigenvalueRegion(r) => r.contains_eigenvalues(&eigenvalue_map(x), tol),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RegionRepr {
    Whole,
    Box { lower: f64, upper: f64 },
    Custom { name: String },
}

#[derive(Serialize, Deserialize)]
struct SetSpecRepr {
    variant: String,
    algebra: Algebra,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    anchor: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    region: Option<RegionRepr>,
}

impl From<&SetSpec> for SetSpecRepr {
    fn from(set: &SetSpec) -> Self {
        let mut repr = SetSpecRepr {
            variant: set.variant_name().to_string(),
            algebra: set.algebra().clone(),
            anchor: None,
            points: None,
            region: None,
        };
        match set {
            SetSpec::SymmetricCone(_) => {}
            SetSpec::EigenvalueOrbit(a) | SetSpec::AutomorphismOrbit(a) => repr.anchor = Some(a.as_slice().to_vec()),
            SetSpec::FiniteSet(pts) => repr.points = Some(pts.iter().map(|p| p.as_slice().to_vec()).collect()),
            SetSpec::EigenvalueRegion(r) => {
                repr.region = Some(match &r.kind {
                    RegionKind::Whole => RegionRepr::Whole,
                    RegionKind::Box { lower, upper } => RegionRepr::Box { lower: *lower, upper: *upper },
                    RegionKind::Custom { name, .. } => RegionRepr::Custom { name: name.clone() },
                })
            }
        }
        repr
    }
}

impl TryFrom<SetSpecRepr> for SetSpec {
    type Error = EjaError;

    fn try_from(repr: SetSpecRepr) -> Result<Self> {
        let alg = repr.algebra;
        let anchor = |a: Option<Vec<f64>>| -> Result<Element> {
            let coords = a.ok_or_else(|| EjaError::InvalidSet("missing \"anchor\"".into()))?;
            Element::new(alg.clone(), coords)
        };
        match repr.variant.as_str() {
            "symmetric_cone" => Ok(SetSpec::SymmetricCone(alg)),
            "eigenvalue_orbit" => Ok(SetSpec::EigenvalueOrbit(anchor(repr.anchor)?)),
            "automorphism_orbit" => Ok(SetSpec::AutomorphismOrbit(anchor(repr.anchor)?)),
            "finite_set" => {
                let pts = repr.points.ok_or_else(|| EjaError::InvalidSet("missing \"points\"".into()))?;
                let pts = pts.into_iter().map(|p| Element::new(alg.clone(), p)).collect::<Result<Vec<_>>>()?;
                SetSpec::finite(pts)
            }
            "eigenvalue_region" => match repr.region {
                Some(RegionRepr::Whole) => Ok(SetSpec::EigenvalueRegion(EigenvalueRegion::whole(&alg))),
                Some(RegionRepr::Box { lower, upper }) => {
                    Ok(SetSpec::EigenvalueRegion(EigenvalueRegion::eigenvalue_box(&alg, lower, upper)?))
                }
                Some(RegionRepr::Custom { name }) => {
                    Err(EjaError::InvalidSet(format!("custom region {name:?} cannot be reconstructed from JSON")))
                }
                None => Err(EjaError::InvalidSet("missing \"region\"".into())),
            },
            other => Err(EjaError::InvalidSet(format!("unknown variant {other:?}"))),
        }
    }
}

impl Serialize for SetSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetSpecRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SetSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SetSpecRepr::deserialize(d)?;
        SetSpec::try_from(repr).map_err(serde::de::Error::custom)
    }
}
