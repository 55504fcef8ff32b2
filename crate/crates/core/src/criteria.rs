//! The quantity `m_z(ψ,φ) = |ψ(z)| e^{(|φ(z)|² − |z|²)/2}`, its supremum,
//! limit at infinity and `L^s` norm, and the resulting classification of
//! `W_{ψ,φ}` with norm and essential norm brackets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::fock::fock_norm;
use crate::maximize::{ascend, maximize, multistart, reach, scan_candidates};
use crate::operator::{empirical_norm, Family, OperatorError, WeightedCompositionOperator};
use crate::quadrature::{plane_integral, FnIntegrand, Oscillation, QuadratureError, QuadratureSpec};
use crate::symbol::{AffineMap, EntireFunction, FockIndex};

/// Annulus radii `2^k`, `k = 1..=10`, used for the numeric limit profile.
pub fn default_annulus_radii() -> Vec<f64> {
    (1..=10).map(|k| 2f64.powi(k)).collect()
}

/// Annulus suprema above this are divergence evidence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriteriaError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("the weight ψ is identically zero")]
    ZeroSymbol,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// `ln m_z(ψ,φ) = ln|ψ(z)| + ((|a|²−1)|z|² + 2 Re(b̄az) + |b|²)/2`.
pub fn ln_m_at(psi: &EntireFunction, phi: &AffineMap, z: Complex64) -> f64 {
    let (a, b) = (phi.a(), phi.b());
    psi.ln_abs(z) + 0.5 * ((a.norm_sqr() - 1.0) * z.norm_sqr() + 2.0 * (b.conj() * a * z).re + b.norm_sqr())
}

pub fn m_at(psi: &EntireFunction, phi: &AffineMap, z: Complex64) -> f64 {
    ln_m_at(psi, phi, z).exp()
}

/// Radial upper bound for `ln m_z` on `|z| = r`.
fn ln_m_upper(psi: &EntireFunction, phi: &AffineMap, r: f64) -> f64 {
    let (a, b) = (phi.a().norm(), phi.b().norm());
    psi.ln_growth_envelope(r) + 0.5 * ((a * a - 1.0) * r * r + 2.0 * a * b * r + b * b)
}

/// How `φ` shapes the profile of `m_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Regime {
    /// `a = 0`: `φ` is constant.
    Constant,
    /// `0 < |a| < 1`.
    Contraction,
    /// `|a| = 1`, with `g = ψ e^{b̄az}` constant (`Some(g)`) or not.
    UnitModulus { g: Option<Complex64> },
}

pub fn regime(psi: &EntireFunction, phi: &AffineMap) -> Regime {
    if phi.is_constant() {
        Regime::Constant
    } else if phi.is_unit_modulus() {
        let rate = phi.b().conj() * phi.a();
        let g = match EntireFunction::exp_linear(Complex64::new(1.0, 0.0), rate) {
            Ok(e) => psi.mul(&e).constant_value(),
            Err(_) => None,
        };
        Regime::UnitModulus { g }
    } else {
        Regime::Contraction
    }
}

/// Exact (for the symbol class) supremum and limit of `m_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolicProfile {
    pub regime: Regime,
    pub sup: f64,
    pub limsup: f64,
    pub limsup_exact_zero: bool,
    /// A maximiser of `m_z` when the supremum is attained.
    pub argmax: Option<Complex64>,
}

pub fn symbolic_profile(psi: &EntireFunction, phi: &AffineMap) -> SymbolicProfile {
    let regime = regime(psi, phi);
    let b2 = phi.b().norm_sqr();
    match regime {
        Regime::UnitModulus { g: Some(g) } => SymbolicProfile {
            regime,
            sup: g.norm() * (0.5 * b2).exp(),
            limsup: g.norm() * (0.5 * b2).exp(),
            limsup_exact_zero: g.norm() == 0.0,
            argmax: Some(Complex64::new(0.0, 0.0)),
        },
        Regime::UnitModulus { g: None } => SymbolicProfile {
            regime,
            sup: f64::INFINITY,
            limsup: f64::INFINITY,
            limsup_exact_zero: false,
            argmax: None,
        },
        Regime::Constant | Regime::Contraction => {
            if psi.is_zero() {
                return SymbolicProfile {
                    regime,
                    sup: 0.0,
                    limsup: 0.0,
                    limsup_exact_zero: true,
                    argmax: None,
                };
            }
            let a2 = phi.a().norm_sqr();
            let base = 4.0 / (1.0 - a2) + psi.max_rate_modulus() + phi.b().norm();
            let f = |z: Complex64| ln_m_at(psi, phi, z);
            let u = |r: f64| ln_m_upper(psi, phi, r);
            let best = maximize(&f, &u, base);
            SymbolicProfile {
                regime,
                sup: best.ln_value.exp(),
                limsup: 0.0,
                limsup_exact_zero: true,
                argmax: Some(best.z),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MProfile {
    pub symbolic_sup: f64,
    pub symbolic_limsup: f64,
    pub limsup_exact_zero: bool,
    pub numeric_sup: f64,
    pub numeric_annulus_sups: Vec<(f64, f64)>,
    pub regime: Regime,
}

impl MProfile {
    /// The annulus supremum at the largest radius.
    pub fn numeric_limsup(&self) -> f64 {
        self.numeric_annulus_sups.last().map(|x| x.1).unwrap_or(f64::NAN)
    }

    pub fn numeric_diverges(&self) -> bool {
        self.numeric_annulus_sups.iter().any(|&(_, s)| s > DIVERGENCE_THRESHOLD)
    }
}

/// Symbolic decisions plus numeric cross-checks: a polar grid scan with
/// ascent for the supremum, and circle suprema at the given radii.
pub fn m_profile(psi: &EntireFunction, phi: &AffineMap, radii: &[f64]) -> MProfile {
    let sym = symbolic_profile(psi, phi);
    let annulus: Vec<(f64, f64)> = radii.iter().map(|&r| (r, circle_sup(psi, phi, r).1.exp())).collect();
    let numeric_sup = if sym.sup.is_finite() {
        numeric_sup(psi, phi)
    } else {
        annulus.iter().map(|x| x.1).fold(0.0, f64::max)
    };
    MProfile {
        symbolic_sup: sym.sup,
        symbolic_limsup: sym.limsup,
        limsup_exact_zero: sym.limsup_exact_zero,
        numeric_sup,
        numeric_annulus_sups: annulus,
        regime: sym.regime,
    }
}

/// `m(ψ,φ) = sup m_z` as an [`MProfile`] with the default radii.
pub fn m_sup(psi: &EntireFunction, phi: &AffineMap) -> MProfile {
    m_profile(psi, phi, &default_annulus_radii())
}

/// `limsup_{|z|→∞} m_z`, exact; the numeric circle profile is in
/// [`m_profile`].
pub fn m_limsup(psi: &EntireFunction, phi: &AffineMap) -> (f64, bool) {
    let s = symbolic_profile(psi, phi);
    (s.limsup, s.limsup_exact_zero)
}

fn numeric_sup(psi: &EntireFunction, phi: &AffineMap) -> f64 {
    let f = |z: Complex64| ln_m_at(psi, phi, z);
    let u = |r: f64| ln_m_upper(psi, phi, r);
    let inner = 2.0 + psi.max_rate_modulus() + phi.b().norm();
    let first = multistart(&f, &scan_candidates(&f, inner, 24, 24, 6), inner / 48.0);
    let radius = reach(&u, first.ln_value, 1e4).max(inner);
    let seeds = scan_candidates(&f, radius, 40, 32, 8);
    let best = multistart(&f, &seeds, radius / 80.0);
    best.ln_value.max(first.ln_value).exp()
}

/// `(θ*, ln max_{|z|=r} m_z)` by dense angular sampling and refinement.
pub fn circle_sup(psi: &EntireFunction, phi: &AffineMap, r: f64) -> (f64, f64) {
    let rate = psi.max_rate_modulus() + phi.a().norm() * phi.b().norm() + phi.b().norm();
    let n = ((8 * psi.degree()) as f64 + 8.0 * rate * r)
        .ceil()
        .clamp(256.0, 16384.0) as usize;
    let g = |t: f64| ln_m_at(psi, phi, Complex64::from_polar(r, t));
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let t = TAU * k as f64 / n as f64;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let mut h = TAU / n as f64;
    while h > 1e-14 {
        let (l, rr) = (g(best_t - h), g(best_t + h));
        if l > best && l >= rr {
            best = l;
            best_t -= h;
        } else if rr > best {
            best = rr;
            best_t += h;
        } else {
            h *= 0.5;
        }
    }
    (best_t.rem_euclid(TAU), best)
}

/// `(∫ m_z^s dA)^{1/s}` with `s = pq/(p−q)`, for `q < p` and `a ≠ 0`;
/// infinite when `m_z ∉ L^s`.
pub fn ls_norm_of_m(
    psi: &EntireFunction,
    phi: &AffineMap,
    p: FockIndex,
    q: FockIndex,
    spec: &QuadratureSpec,
) -> Result<f64, CriteriaError> {
    let (p, q) = (p.get(), q.get());
    if q >= p {
        return Err(CriteriaError::HypothesisViolated(format!(
            "the L^s norm of m_z needs q < p, got p = {p}, q = {q}"
        )));
    }
    if phi.is_constant() {
        return Err(CriteriaError::HypothesisViolated(
            "a = 0 is the rank-one case; use its exact norm".into(),
        ));
    }
    if psi.is_zero() {
        return Ok(0.0);
    }
    if phi.is_unit_modulus() {
        return Ok(f64::INFINITY);
    }
    let s = p * q / (p - q);
    let sharpen = (s / 4.0).max(1.0);
    let osc = Oscillation {
        degree: psi.degree() as f64 * sharpen,
        rate: (psi.max_rate_modulus() + phi.a().norm() * phi.b().norm()) * sharpen,
    };
    let g = FnIntegrand::new(
        |z: Complex64| s * ln_m_at(psi, phi, z),
        |r: f64| s * ln_m_upper(psi, phi, r),
        osc,
    );
    match plane_integral(&g, spec) {
        Ok(r) => Ok((r.ln_value / s).exp()),
        Err(QuadratureError::TailNotDominated { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Unbounded,
    BoundedNonCompact,
    Compact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Unit direction along which `m_z` diverges, when it does.
    pub witness: Option<Complex64>,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub ess_lower: f64,
    pub ess_upper: f64,
    /// `‖m_z‖_{L^{pq/(p−q)}}` when `q < p`.
    pub ls_norm: Option<f64>,
    pub m_sup: f64,
    pub m_limsup: f64,
    pub regime: Regime,
    /// Whether the essential norm bracket comes from a theorem (needs
    /// `1 < p ≤ q` for non-compact operators).
    pub ess_from_theorem: bool,
}

/// `(q/(p|a|²))^{1/q}`.
pub fn bracket_constant(p: FockIndex, q: FockIndex, phi: &AffineMap) -> f64 {
    (q.get() / (p.get() * phi.a().norm_sqr())).powf(1.0 / q.get())
}

/// `(q/2π)^{1/q} (2π/(p|a|²))^{1/p}`.
pub fn ls_bound_constant(p: FockIndex, q: FockIndex, phi: &AffineMap) -> f64 {
    let (p, q) = (p.get(), q.get());
    (q / TAU).powf(1.0 / q) * (TAU / (p * phi.a().norm_sqr())).powf(1.0 / p)
}

pub fn classify(w: &WeightedCompositionOperator, spec: &QuadratureSpec) -> Result<Classification, CriteriaError> {
    classify_with(w, spec, &Family::default())
}

/// [`classify`] with an explicit test family for the empirical lower bound
/// used when `q < p`.
pub fn classify_with(
    w: &WeightedCompositionOperator,
    spec: &QuadratureSpec,
    family: &Family,
) -> Result<Classification, CriteriaError> {
    let (psi, phi, p, q) = (w.psi(), w.phi(), w.p(), w.q());
    if psi.is_zero() {
        return Err(CriteriaError::ZeroSymbol);
    }
    let sym = symbolic_profile(psi, phi);
    let unbounded = |witness| Classification {
        verdict: Verdict::Unbounded,
        witness,
        norm_lower: f64::INFINITY,
        norm_upper: f64::INFINITY,
        ess_lower: f64::INFINITY,
        ess_upper: f64::INFINITY,
        ls_norm: None,
        m_sup: sym.sup,
        m_limsup: sym.limsup,
        regime: sym.regime,
        ess_from_theorem: false,
    };
    let compact = |lower: f64, upper: f64, ls_norm| Classification {
        verdict: Verdict::Compact,
        witness: None,
        norm_lower: lower,
        norm_upper: upper,
        ess_lower: 0.0,
        ess_upper: 0.0,
        ls_norm,
        m_sup: sym.sup,
        m_limsup: 0.0,
        regime: sym.regime,
        ess_from_theorem: true,
    };

    if let Regime::Constant = sym.regime {
        let n = fock_norm(psi, q, spec)?.value * (0.5 * phi.b().norm_sqr()).exp();
        return Ok(compact(n, n, None));
    }

    if q.get() < p.get() {
        let ls = ls_norm_of_m(psi, phi, p, q, spec)?;
        if !ls.is_finite() {
            let witness = (!sym.sup.is_finite()).then(|| divergence_direction(psi, phi));
            let mut c = unbounded(witness);
            c.ls_norm = Some(ls);
            return Ok(c);
        }
        let upper = ls_bound_constant(p, q, phi) * ls;
        let mut fam = family.clone();
        if let Some(z) = sym.argmax {
            fam.extra_kernels.push(phi.apply(z));
        }
        let empirical = empirical_norm(w, &fam, spec)?.value;
        let lower = sym.sup.max(empirical);
        return Ok(compact(lower, upper, Some(ls)));
    }

    if !sym.sup.is_finite() {
        return Ok(unbounded(Some(divergence_direction(psi, phi))));
    }
    let k = bracket_constant(p, q, phi);
    let (lower, upper) = (sym.sup, k * sym.sup);
    if sym.limsup_exact_zero {
        return Ok(compact(lower, upper, None));
    }
    let theorem = p.get() > 1.0;
    let (ess_lower, ess_upper) = if theorem {
        (sym.limsup, (2.0 * k * sym.limsup).min(upper))
    } else {
        (0.0, upper)
    };
    Ok(Classification {
        verdict: Verdict::BoundedNonCompact,
        witness: None,
        norm_lower: lower,
        norm_upper: upper,
        ess_lower,
        ess_upper,
        ls_norm: None,
        m_sup: sym.sup,
        m_limsup: sym.limsup,
        regime: sym.regime,
        ess_from_theorem: theorem,
    })
}

/// Direction of fastest growth of `m_z` on a far circle.
fn divergence_direction(psi: &EntireFunction, phi: &AffineMap) -> Complex64 {
    let r = default_annulus_radii().last().copied().unwrap_or(1024.0);
    let (t, _) = circle_sup(psi, phi, r);
    Complex64::from_polar(1.0, t)
}

/// `(L, 2(q/(p|a|²))^{1/q} L)` with `L = limsup m_z`, for bounded `W` and
/// `1 < p ≤ q`.
pub fn essential_norm_bracket(w: &WeightedCompositionOperator) -> Result<(f64, f64), CriteriaError> {
    let (p, q) = (w.p().get(), w.q().get());
    if p <= 1.0 || p > q {
        return Err(CriteriaError::HypothesisViolated(format!(
            "the essential norm bracket needs 1 < p <= q, got p = {p}, q = {q}"
        )));
    }
    if w.psi().is_zero() {
        return Err(CriteriaError::ZeroSymbol);
    }
    let sym = symbolic_profile(w.psi(), w.phi());
    if !sym.sup.is_finite() {
        return Err(CriteriaError::HypothesisViolated("the operator is unbounded".into()));
    }
    if sym.limsup_exact_zero {
        return Ok((0.0, 0.0));
    }
    let k = bracket_constant(w.p(), w.q(), w.phi());
    Ok((sym.limsup, 2.0 * k * sym.limsup))
}

/// `W ∘ U_r`, i.e. `f ↦ ψ·(f∘φ_r)` with `φ_r(z) = φ(rz)`.
pub fn dilation_compose(w: &WeightedCompositionOperator, r: f64) -> Result<WeightedCompositionOperator, CriteriaError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CriteriaError::HypothesisViolated(format!(
            "dilation radius must lie in (0, 1), got {r}"
        )));
    }
    Ok(w.dilate(r))
}

/// Single-start ascent on `ln m_z`, exposed for numeric witnesses.
pub fn ascend_m(psi: &EntireFunction, phi: &AffineMap, start: Complex64) -> (Complex64, f64) {
    let f = |z: Complex64| ln_m_at(psi, phi, z);
    let m = ascend(&f, start, 0.5);
    (m.z, m.ln_value.exp())
}
