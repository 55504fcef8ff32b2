//! Compact differences, path components, isolated points, separation
//! bounds and numeric profiles of the connecting paths.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::criteria::{symbolic_profile, CriteriaError};
use crate::fock::{fock_norm, kernel, polar_grid};
use crate::operator::{
    empirical_norm, f2_compression, matrix_sigma_max, Combination, Family, LinearOperator, OperatorError,
    WeightedCompositionOperator,
};
use crate::quadrature::{QuadratureError, QuadratureSpec};
use crate::symbol::{AffineMap, EntireFunction, FockIndex};

/// Tolerance on `(a, b)` when deciding `φ₁ = φ₂`.
pub const PHI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("operator is not bounded between the given spaces")]
    NotBounded,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    /// Every bounded operator, when `q < p`.
    AllConnected,
    /// The compact operators, when `p ≤ q`.
    CompactBulk,
    /// Operators sharing a unit-modulus `φ = az + b`, when `p ≤ q`.
    UnitModulusLeaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentId {
    pub kind: ComponentKind,
    pub leaf_key: Option<(Complex64, Complex64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DifferenceReason {
    BothCompact,
    SameSymbolVanishing,
    NotCompact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceVerdict {
    pub compact: bool,
    pub reason: DifferenceReason,
    pub detail: String,
}

/// Boundedness decided from the symbols alone.
pub fn is_bounded(w: &WeightedCompositionOperator) -> bool {
    let phi = w.phi();
    if phi.is_constant() {
        return true;
    }
    if w.q().get() < w.p().get() {
        return !phi.is_unit_modulus();
    }
    symbolic_profile(w.psi(), phi).sup.is_finite()
}

fn is_compact(w: &WeightedCompositionOperator) -> bool {
    is_bounded(w) && !w.phi().is_unit_modulus()
}

/// Decides whether `W₁ − W₂` is compact, for bounded operators and `p ≤ q`.
pub fn compact_difference(
    w1: &WeightedCompositionOperator,
    w2: &WeightedCompositionOperator,
) -> Result<DifferenceVerdict, TopologyError> {
    let (p, q) = (w1.p().get(), w1.q().get());
    if w2.p() != w1.p() || w2.q() != w1.q() {
        return Err(TopologyError::HypothesisViolated(
            "both operators must act between the same spaces".into(),
        ));
    }
    if q < p {
        return Err(TopologyError::HypothesisViolated(format!(
            "the compact-difference criterion needs p <= q (got p = {p}, q = {q}); \
             for q < p boundedness and compactness coincide, so classify each operator"
        )));
    }
    if !is_bounded(w1) || !is_bounded(w2) {
        return Err(TopologyError::NotBounded);
    }
    let same_phi = w1.phi().approx_eq(w2.phi(), PHI_TOL);
    if same_phi && w1.psi().sub(w2.psi()).is_zero() {
        return Ok(DifferenceVerdict {
            compact: true,
            reason: DifferenceReason::SameSymbolVanishing,
            detail: "the operators coincide, so their difference is zero".into(),
        });
    }
    if is_compact(w1) && is_compact(w2) {
        return Ok(DifferenceVerdict {
            compact: true,
            reason: DifferenceReason::BothCompact,
            detail: "both operators are compact".into(),
        });
    }
    if same_phi {
        let diff = w1.psi().sub(w2.psi());
        let prof = symbolic_profile(&diff, w1.phi());
        if prof.limsup_exact_zero {
            return Ok(DifferenceVerdict {
                compact: true,
                reason: DifferenceReason::SameSymbolVanishing,
                detail: "equal φ and m_z(ψ₁−ψ₂, φ) → 0".into(),
            });
        }
        return Ok(DifferenceVerdict {
            compact: false,
            reason: DifferenceReason::NotCompact,
            detail: format!("equal φ but limsup m_z(ψ₁−ψ₂, φ) = {}", prof.limsup),
        });
    }
    Ok(DifferenceVerdict {
        compact: false,
        reason: DifferenceReason::NotCompact,
        detail: "φ₁ ≠ φ₂ and at least one operator is not compact".into(),
    })
}

/// Path component of a bounded `W` in the space of bounded weighted
/// composition operators `F^p → F^q`.
pub fn component_id(w: &WeightedCompositionOperator) -> Result<ComponentId, TopologyError> {
    if !is_bounded(w) {
        return Err(TopologyError::NotBounded);
    }
    let phi = w.phi();
    if w.q().get() < w.p().get() {
        return Ok(ComponentId {
            kind: ComponentKind::AllConnected,
            leaf_key: None,
        });
    }
    if phi.is_unit_modulus() {
        return Ok(ComponentId {
            kind: ComponentKind::UnitModulusLeaf,
            leaf_key: Some((phi.a(), phi.b())),
        });
    }
    Ok(ComponentId {
        kind: ComponentKind::CompactBulk,
        leaf_key: None,
    })
}

/// Whether `C_φ` is an isolated point among composition operators
/// `F^p → F^q`, `p ≤ q`.
pub fn is_isolated(phi: &AffineMap, p: FockIndex, q: FockIndex) -> Result<bool, TopologyError> {
    if q.get() < p.get() {
        return Err(TopologyError::HypothesisViolated(
            "for q < p the composition operators form a path connected set with no isolated points".into(),
        ));
    }
    if phi.is_unit_modulus() && phi.b().norm() > PHI_TOL {
        return Err(TopologyError::NotBounded);
    }
    Ok(phi.is_unit_modulus())
}

/// `sup_w ‖(C_φ − C_φ′) k_w‖_q` over a polar grid of `w`; a lower bound
/// for `‖C_φ − C_φ′‖`.
pub fn distance_lower_bound(
    phi: &AffineMap,
    phi2: &AffineMap,
    p: FockIndex,
    q: FockIndex,
    grid: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<f64, TopologyError> {
    if phi.approx_eq(phi2, PHI_TOL) {
        return Err(TopologyError::HypothesisViolated("φ = φ′".into()));
    }
    let c1 = WeightedCompositionOperator::composition(*phi, p, q);
    let c2 = WeightedCompositionOperator::composition(*phi2, p, q);
    if !is_bounded(&c1) || !is_bounded(&c2) {
        return Err(TopologyError::NotBounded);
    }
    let diff = Combination::difference(&c1, &c2);
    let mut best: f64 = 0.0;
    for &w in grid {
        best = best.max(fock_norm(&diff.apply(&kernel(w)), q, spec)?.value);
    }
    Ok(best)
}

/// The default separation grid: 12 × 16 points up to the given radius.
pub fn separation_grid(radius: f64) -> Vec<Complex64> {
    polar_grid(radius, 12, 16)
}

/// How operator distances along a path are measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSettings {
    pub spec: QuadratureSpec,
    pub matrix_order: usize,
    pub family: Family,
}

impl Default for PathSettings {
    fn default() -> Self {
        Self {
            spec: QuadratureSpec::default(),
            matrix_order: 64,
            family: Family::default(),
        }
    }
}

/// A lower bound for `‖L‖`: the truncated-matrix norm on `F²`, else the
/// kernel and monomial family.
pub fn operator_distance(l: &dyn LinearOperator, settings: &PathSettings) -> Result<f64, TopologyError> {
    if l.domain().get() == 2.0 && l.codomain().get() == 2.0 {
        let m = f2_compression(l, settings.matrix_order)?;
        Ok(matrix_sigma_max(&m)?)
    } else {
        Ok(empirical_norm(l, &settings.family, &settings.spec)?.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    /// `s ↦ W_{ψ, φ_s}`, `φ_s(z) = φ(sz)`, from `W_{ψ, φ(0)}` to a compact `W`.
    Dilate(WeightedCompositionOperator),
    /// `s ↦ C_{β_s}`, `β_s = (1−s)b₁ + s b₂`.
    Translate {
        b1: Complex64,
        b2: Complex64,
        p: FockIndex,
        q: FockIndex,
    },
    /// `t ↦ W_{u_t, φ}`, `u_t = (1−α(t))ψ₁ + α(t)ψ₂`.
    Weight {
        psi1: EntireFunction,
        psi2: EntireFunction,
        phi: AffineMap,
        p: FockIndex,
        q: FockIndex,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub t: f64,
    /// Distance from the operator at the previous grid point.
    pub distance: f64,
    /// Proven upper bound for this increment, where one is known.
    pub bound: Option<f64>,
}

/// The parameter `α(t)`: `t`, or `t + (i/2) sin(πt)` when `ψ₂ = λψ₁` with
/// real `λ ≤ 0`, so that `u_t` never vanishes.
pub fn weight_alpha(psi1: &EntireFunction, psi2: &EntireFunction, t: f64) -> Complex64 {
    match psi1.proportionality(psi2) {
        Some(l) if l.im.abs() <= PHI_TOL && l.re <= 0.0 => Complex64::new(t, 0.5 * (PI * t).sin()),
        _ => Complex64::new(t, 0.0),
    }
}

/// `u_t = (1−α(t))ψ₁ + α(t)ψ₂`.
pub fn weight_path_symbol(psi1: &EntireFunction, psi2: &EntireFunction, t: f64) -> EntireFunction {
    let alpha = weight_alpha(psi1, psi2, t);
    psi1.scale(Complex64::new(1.0, 0.0) - alpha).add(&psi2.scale(alpha))
}

/// `‖1‖_q e² |B₁| (1 + B₂) e^{B₂²/2}` with `B₁ = b₂ − b₁`, `B₂ = |b₁| + |b₂|`.
pub fn translate_lipschitz_bound(b1: Complex64, b2: Complex64) -> f64 {
    let big1 = (b2 - b1).norm();
    let big2 = b1.norm() + b2.norm();
    // ‖1‖_q = 1 for every q
    E * E * big1 * (1.0 + big2) * (0.5 * big2 * big2).exp()
}

/// Distances between consecutive operators on a uniform grid of `steps`
/// intervals in `[0, 1]`.
pub fn path_profile(kind: &PathKind, steps: usize, settings: &PathSettings) -> Result<Vec<PathPoint>, TopologyError> {
    if steps == 0 {
        return Err(TopologyError::HypothesisViolated("steps must be positive".into()));
    }
    let ts: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    let mut out = Vec::with_capacity(steps);
    match kind {
        PathKind::Dilate(w) => {
            if !is_compact(w) {
                return Err(TopologyError::HypothesisViolated(
                    "the dilation path needs a compact operator".into(),
                ));
            }
            let at = |s: f64| {
                let phi = AffineMap::new(w.phi().a() * s, w.phi().b()).unwrap_or(*w.phi());
                WeightedCompositionOperator::new(w.psi().clone(), phi, w.p(), w.q())
            };
            for pair in ts.windows(2) {
                let diff = Combination::difference(&at(pair[1])?, &at(pair[0])?);
                out.push(PathPoint {
                    t: pair[1],
                    distance: operator_distance(&diff, settings)?,
                    bound: None,
                });
            }
        }
        PathKind::Translate { b1, b2, p, q } => {
            let at = |s: f64| {
                let beta = *b1 * (1.0 - s) + *b2 * s;
                AffineMap::constant(beta).map(|phi| WeightedCompositionOperator::composition(phi, *p, *q))
            };
            let m = translate_lipschitz_bound(*b1, *b2);
            for pair in ts.windows(2) {
                let (w0, w1) = (at(pair[0]), at(pair[1]));
                let (w0, w1) = match (w0, w1) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => return Err(TopologyError::HypothesisViolated("non-finite endpoint".into())),
                };
                let diff = Combination::difference(&w1, &w0);
                out.push(PathPoint {
                    t: pair[1],
                    distance: operator_distance(&diff, settings)?,
                    bound: Some(m * (pair[1] - pair[0])),
                });
            }
        }
        PathKind::Weight { psi1, psi2, phi, p, q } => {
            let w1 = WeightedCompositionOperator::new(psi1.clone(), *phi, *p, *q)?;
            let w2 = WeightedCompositionOperator::new(psi2.clone(), *phi, *p, *q)?;
            if !is_bounded(&w1) || !is_bounded(&w2) {
                return Err(TopologyError::NotBounded);
            }
            let at = |t: f64| WeightedCompositionOperator::new(weight_path_symbol(psi1, psi2, t), *phi, *p, *q);
            for pair in ts.windows(2) {
                let diff = Combination::difference(&at(pair[1])?, &at(pair[0])?);
                out.push(PathPoint {
                    t: pair[1],
                    distance: operator_distance(&diff, settings)?,
                    bound: None,
                });
            }
        }
    }
    Ok(out)
}
