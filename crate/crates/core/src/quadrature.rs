//! Polar quadrature over ℂ against the Gaussian weight `(s/2π) e^{−s|z|²/2}`
//! or plain area measure.
//!
//! Radial integration uses composite Gauss–Legendre panels (error estimated
//! from the half-order rule, panels bisected adaptively); the angular integral
//! is a periodic trapezoid whose node count follows the oscillation bound of
//! the integrand and is doubled until two consecutive levels agree. All
//! accumulation is done relative to a log-domain shift.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::symbol::{ln_sum_exp, EntireFunction};

const MAX_ANGULAR_NODES: usize = 1 << 14;
const MAX_PANELS: usize = 4096;
const MAX_BISECTION_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_radius: f64,
    pub radial_panel_order: usize,
    pub angular_min_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_radius: 40.0,
            radial_panel_order: 32,
            angular_min_nodes: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(QuadratureError::InvalidSpec("tolerances must be positive".into()));
        }
        if !positive(self.max_radius) {
            return Err(QuadratureError::InvalidSpec("max_radius must be positive".into()));
        }
        if self.radial_panel_order < 4 || self.angular_min_nodes < 4 {
            return Err(QuadratureError::InvalidSpec("orders must be at least 4".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub truncation_radius: f64,
    /// `ln value`, usable when `value` itself overflows.
    pub ln_value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand envelope is not dominated by the weight within radius {max_radius}")]
    TailNotDominated { max_radius: f64 },
    #[error("adaptive refinement exhausted its budget (error {error:e}, target {target:e})")]
    ToleranceNotMet { error: f64, target: f64 },
    #[error("integrand overflowed the log domain")]
    Overflow,
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
}

/// Bound on the angular oscillation of an integrand on `|z| = r`: roughly a
/// polynomial of the given degree times `e^{rate·r}` in Fourier content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub degree: f64,
    pub rate: f64,
}

/// A nonnegative integrand given in log form, with a radial envelope.
pub trait Integrand: Sync {
    /// `ln g(z)`; `-∞` where `g` vanishes.
    fn ln_value(&self, z: Complex64) -> f64;
    /// `ln` of an upper bound for `max_{|z|=r} g(z)`.
    fn ln_envelope(&self, r: f64) -> f64;
    fn oscillation(&self) -> Oscillation;
}

/// `|f|^p`.
pub struct PowerIntegrand<'a> {
    f: &'a EntireFunction,
    p: f64,
}

impl<'a> PowerIntegrand<'a> {
    pub fn new(f: &'a EntireFunction, p: f64) -> Self {
        Self { f, p }
    }
}

impl Integrand for PowerIntegrand<'_> {
    fn ln_value(&self, z: Complex64) -> f64 {
        self.p * self.f.ln_abs(z)
    }

    fn ln_envelope(&self, r: f64) -> f64 {
        self.p * self.f.ln_growth_envelope(r)
    }

    fn oscillation(&self) -> Oscillation {
        let sharpen = (self.p / 4.0).max(1.0);
        Oscillation {
            degree: self.f.degree() as f64 * sharpen,
            rate: self.f.max_rate_modulus() * sharpen,
        }
    }
}

/// An integrand assembled from closures.
pub struct FnIntegrand<V, E> {
    value: V,
    envelope: E,
    oscillation: Oscillation,
}

impl<V, E> FnIntegrand<V, E>
where
    V: Fn(Complex64) -> f64 + Sync,
    E: Fn(f64) -> f64 + Sync,
{
    pub fn new(ln_value: V, ln_envelope: E, oscillation: Oscillation) -> Self {
        Self {
            value: ln_value,
            envelope: ln_envelope,
            oscillation,
        }
    }
}

impl<V, E> Integrand for FnIntegrand<V, E>
where
    V: Fn(Complex64) -> f64 + Sync,
    E: Fn(f64) -> f64 + Sync,
{
    fn ln_value(&self, z: Complex64) -> f64 {
        (self.value)(z)
    }

    fn ln_envelope(&self, r: f64) -> f64 {
        (self.envelope)(r)
    }

    fn oscillation(&self) -> Oscillation {
        self.oscillation
    }
}

/// `(s/2π) ∫_ℂ g(z) e^{−s|z|²/2} dA(z)`.
pub fn gaussian_integral(g: &dyn Integrand, s: f64, spec: &QuadratureSpec) -> Result<IntegralResult, QuadratureError> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(QuadratureError::InvalidSpec(format!(
            "weight exponent {s} must be positive"
        )));
    }
    // (s/2π)·2π r e^{−s r²/2}
    let ln_weight = move |r: f64| (s * r).ln() - 0.5 * s * r * r;
    integrate(g, &ln_weight, spec)
}

/// `∫_ℂ g(z) dA(z)`; the envelope of `g` must itself decay.
pub fn plane_integral(g: &dyn Integrand, spec: &QuadratureSpec) -> Result<IntegralResult, QuadratureError> {
    let ln_weight = |r: f64| (TAU * r).ln();
    integrate(g, &ln_weight, spec)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

struct Ctx<'a> {
    g: &'a dyn Integrand,
    ln_weight: &'a (dyn Fn(f64) -> f64 + Sync),
    spec: &'a QuadratureSpec,
    shift: f64,
    ln_abs_floor: f64,
}

fn integrate(
    g: &dyn Integrand,
    ln_weight: &(dyn Fn(f64) -> f64 + Sync),
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadratureError> {
    spec.validate()?;
    let ln_density = |r: f64| ln_weight(r) + g.ln_envelope(r);
    let ln_target = (spec.abs_tol / 2.0)
        .ln()
        .max((1e-3 * spec.rel_tol).ln() + ln_rough_value(g, ln_weight, spec.max_radius));
    let radius = truncation_radius(&ln_density, ln_target, spec.max_radius)?;
    let ln_tail_mass = ln_tail(&ln_density, radius);

    let initial = radius.ceil().max(1.0) as usize;
    let shift = (0..=4 * initial)
        .map(|k| ln_density(radius * k as f64 / (4 * initial) as f64))
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Ok(IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            truncation_radius: radius,
            ln_value: f64::NEG_INFINITY,
        });
    }
    if !shift.is_finite() {
        return Err(QuadratureError::Overflow);
    }
    let ctx = Ctx {
        g,
        ln_weight,
        spec,
        shift,
        ln_abs_floor: (1e-2 * spec.abs_tol / radius).ln(),
    };

    let mut panels: Vec<Panel> = (0..initial)
        .into_par_iter()
        .map(|k| {
            let a = k as f64;
            let b = (a + 1.0).min(radius);
            ctx.panel(a, b, 0)
        })
        .collect();

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let tail_shifted = (ln_tail_mass - shift).exp();
        let target = (spec.abs_tol.ln() - shift).exp().max(0.5 * spec.rel_tol * total.abs());
        if !total.is_finite() || !(error + tail_shifted).is_finite() {
            return Err(QuadratureError::Overflow);
        }
        if error + tail_shifted <= target {
            return finish(total, error, ln_tail_mass, shift, radius);
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < MAX_BISECTION_DEPTH)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let worst = match worst {
            Some(i) if panels.len() < MAX_PANELS && panels[i].error > 0.0 => i,
            _ => {
                let result = finish(total, error, ln_tail_mass, shift, radius)?;
                let goal = spec.abs_tol.max(spec.rel_tol * result.value);
                if result.error_estimate <= goal {
                    return Ok(result);
                }
                return Err(QuadratureError::ToleranceNotMet {
                    error: result.error_estimate,
                    target: goal,
                });
            }
        };
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let (left, right) = rayon::join(|| ctx.panel(p.a, mid, p.depth + 1), || ctx.panel(mid, p.b, p.depth + 1));
        panels.push(left);
        panels.push(right);
    }
}

fn finish(
    total: f64,
    error: f64,
    ln_tail_mass: f64,
    shift: f64,
    radius: f64,
) -> Result<IntegralResult, QuadratureError> {
    let ln_value = if total > 0.0 {
        total.ln() + shift
    } else {
        f64::NEG_INFINITY
    };
    let value = ln_value.exp();
    let error_estimate = (error.ln() + shift).exp() + ln_tail_mass.exp();
    if ln_value.is_nan() {
        return Err(QuadratureError::Overflow);
    }
    Ok(IntegralResult {
        value,
        error_estimate,
        truncation_radius: radius,
        ln_value,
    })
}

impl Ctx<'_> {
    /// Gauss–Legendre estimate on `[a, b]` in shifted units, with the
    /// larger of the half- and three-quarter-order discrepancies plus
    /// angular uncertainty as error.
    fn panel(&self, a: f64, b: f64, depth: u32) -> Panel {
        let n = self.spec.radial_panel_order;
        let (full, full_err) = self.rule(a, b, n);
        let (half, _) = self.rule(a, b, (n / 2).max(2));
        let (three_quarter, _) = self.rule(a, b, (3 * n / 4).max(3));
        Panel {
            a,
            b,
            value: full,
            error: (full - half).abs().max((full - three_quarter).abs()) + full_err,
            depth,
        }
    }

    fn rule(&self, a: f64, b: f64, n: usize) -> (f64, f64) {
        let rule = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let centre = 0.5 * (a + b);
        let samples: Vec<(f64, f64)> = rule
            .iter()
            .map(|&(x, w)| (centre + half * x, half * w))
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(r, w)| {
                let ln_w = (self.ln_weight)(r);
                let (ln_mean, rel_err) = self.angular_mean(r, ln_w);
                let v = (ln_w + ln_mean - self.shift).exp();
                (w * v, w * v * rel_err)
            })
            .collect();
        samples.iter().fold((0.0, 0.0), |(s, e), (v, err)| (s + v, e + err))
    }

    /// `ln` of the angular mean of `g` on `|z| = r`, with its relative error.
    fn angular_mean(&self, r: f64, ln_w: f64) -> (f64, f64) {
        let osc = self.g.oscillation();
        let wanted = 8.0 * osc.degree + (8.0 * osc.rate * r).ceil();
        let mut n = (self.spec.angular_min_nodes.max(wanted as usize) + 1) & !1;
        let mut values: Vec<f64> = (0..n).map(|k| self.ln_at(r, k, n)).collect();
        loop {
            let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
            let fine_mean = ln_sum_exp(&values) - (n as f64).ln();
            let coarse_mean = ln_sum_exp(&coarse) - ((n / 2) as f64).ln();
            if fine_mean == f64::NEG_INFINITY {
                return (fine_mean, 0.0);
            }
            let rel = (1.0 - (coarse_mean - fine_mean).exp()).abs();
            let negligible = ln_w + fine_mean + rel.ln() < self.ln_abs_floor;
            if rel <= 0.1 * self.spec.rel_tol || negligible || 2 * n > MAX_ANGULAR_NODES {
                return (fine_mean, rel);
            }
            let mut refined = Vec::with_capacity(2 * n);
            for (k, v) in values.iter().enumerate() {
                refined.push(*v);
                refined.push(self.ln_at(r, 2 * k + 1, 2 * n));
            }
            values = refined;
            n *= 2;
        }
    }

    fn ln_at(&self, r: f64, k: usize, n: usize) -> f64 {
        let theta = TAU * k as f64 / n as f64;
        self.g.ln_value(Complex64::from_polar(r, theta))
    }
}

/// Coarse trapezoid estimate of `ln ∫`, used only to scale the tail target.
fn ln_rough_value(g: &dyn Integrand, ln_weight: &(dyn Fn(f64) -> f64 + Sync), max_radius: f64) -> f64 {
    let step = 0.25;
    let count = (max_radius / step).ceil() as usize;
    let logs: Vec<f64> = (1..=count)
        .into_par_iter()
        .map(|i| {
            let r = i as f64 * step;
            let ring: Vec<f64> = (0..16)
                .map(|k| g.ln_value(Complex64::from_polar(r, TAU * k as f64 / 16.0)))
                .collect();
            ln_weight(r) + ln_sum_exp(&ring) - 16f64.ln() + step.ln()
        })
        .collect();
    let v = ln_sum_exp(&logs);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Smallest radius (to bisection accuracy) whose envelope tail falls below
/// the target, searched by doubling up to `max_radius`.
fn truncation_radius(ln_density: &dyn Fn(f64) -> f64, ln_target: f64, max_radius: f64) -> Result<f64, QuadratureError> {
    let mut lo = 0.0;
    let mut hi = 1.0_f64.min(max_radius);
    loop {
        if ln_tail(ln_density, hi) < ln_target {
            break;
        }
        if hi >= max_radius {
            return Err(QuadratureError::TailNotDominated { max_radius });
        }
        lo = hi;
        hi = (2.0 * hi).min(max_radius);
    }
    for _ in 0..40 {
        if hi - lo <= 1e-3 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ln_tail(ln_density, mid) < ln_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `ln ∫_R^∞ e^{ℓ(r)} dr` for the envelope density `ℓ`, integrated panel by
/// panel until the contributions are negligible and decreasing. `+∞` when
/// the density never turns over.
fn ln_tail(ln_density: &dyn Fn(f64) -> f64, start: f64) -> f64 {
    let rule = gauss_legendre(16);
    let width = 0.5;
    let mut parts: Vec<f64> = Vec::new();
    let mut a = start;
    for _ in 0..4000 {
        let b = a + width;
        let logs: Vec<f64> = rule
            .iter()
            .map(|&(x, w)| ln_density(a + 0.5 * width * (x + 1.0)) + (0.5 * width * w).ln())
            .collect();
        let piece = ln_sum_exp(&logs);
        if piece.is_nan() || piece == f64::INFINITY {
            return f64::INFINITY;
        }
        parts.push(piece);
        let acc = ln_sum_exp(&parts);
        let end = ln_density(b);
        let falling = end < ln_density(a) || end == f64::NEG_INFINITY;
        if falling && (piece < acc - 40.0 || piece == f64::NEG_INFINITY) {
            // What remains past b is dominated by a geometric series of
            // still smaller pieces; one more copy is a generous bound.
            parts.push(piece);
            return ln_sum_exp(&parts);
        }
        a = b;
    }
    f64::INFINITY
}

type Rule = std::sync::Arc<Vec<(f64, f64)>>;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per order.
pub(crate) fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| std::sync::Arc::new(legendre_rule(n)))
        .clone()
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

/// `(P_n(x), P_n′(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
