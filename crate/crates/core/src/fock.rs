//! Fock norms, kernels and the pointwise, derivative and embedding
//! inequalities.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::maximize::maximize;
use crate::quadrature::{gaussian_integral, IntegralResult, PowerIntegrand, QuadratureError, QuadratureSpec};
use crate::symbol::{EntireFunction, FockIndex};

/// Relative slack allowed on inequality checks.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("bound violated at z = {witness} (ratio {ratio})")]
    BoundViolated { witness: Complex64, ratio: f64 },
    #[error("embedding needs p < q, got p = {p}, q = {q}")]
    InvalidIndices { p: f64, q: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// `‖f‖_p = ((p/2π) ∫ |f|^p e^{−p|z|²/2} dA)^{1/p}`; a quasi-norm for `p < 1`.
pub fn fock_norm(f: &EntireFunction, p: FockIndex, spec: &QuadratureSpec) -> Result<NormValue, QuadratureError> {
    Ok(fock_norm_detailed(f, p, spec)?.0)
}

/// [`fock_norm`] together with the underlying integral (absent for `f ≡ 0`).
pub fn fock_norm_detailed(
    f: &EntireFunction,
    p: FockIndex,
    spec: &QuadratureSpec,
) -> Result<(NormValue, Option<IntegralResult>), QuadratureError> {
    if f.is_zero() {
        let zero = NormValue {
            value: 0.0,
            error_estimate: 0.0,
        };
        return Ok((zero, None));
    }
    let p = p.get();
    let integral = gaussian_integral(&PowerIntegrand::new(f, p), p, spec)?;
    let value = (integral.ln_value / p).exp();
    let relative = if integral.value > 0.0 {
        integral.error_estimate / integral.value
    } else {
        0.0
    };
    let norm = NormValue {
        value,
        error_estimate: value * relative / p,
    };
    Ok((norm, Some(integral)))
}

/// `d(f, g) = ‖f − g‖_p^p`, the metric used when `p < 1`.
pub fn metric_distance(
    f: &EntireFunction,
    g: &EntireFunction,
    p: FockIndex,
    spec: &QuadratureSpec,
) -> Result<f64, QuadratureError> {
    Ok(fock_norm(&f.sub(g), p, spec)?.value.powf(p.get()))
}

/// `‖f‖_∞ = sup |f(z)| e^{−|z|²/2}`.
pub fn sup_norm(f: &EntireFunction) -> NormValue {
    if f.is_zero() {
        return NormValue {
            value: 0.0,
            error_estimate: 0.0,
        };
    }
    let objective = |z: Complex64| f.ln_abs(z) - 0.5 * z.norm_sqr();
    let upper = |r: f64| f.ln_growth_envelope(r) - 0.5 * r * r;
    let base = 2.0 + f.max_rate_modulus() + (f.degree() as f64).sqrt();
    let best = maximize(&objective, &upper, base);
    let value = best.ln_value.exp();
    NormValue {
        value,
        error_estimate: value * 1e-12,
    }
}

/// `k_w(z) = e^{w̄z − |w|²/2}`.
pub fn kernel(w: Complex64) -> EntireFunction {
    EntireFunction::exp_linear(Complex64::new((-0.5 * w.norm_sqr()).exp(), 0.0), w.conj())
        .unwrap_or_else(|_| EntireFunction::zero())
}

/// The origin followed by `n_r × n_theta` points on rings of radius
/// `radius·k/n_r`, `k = 1..=n_r`.
pub fn polar_grid(radius: f64, n_r: usize, n_theta: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(1 + n_r * n_theta);
    out.push(Complex64::new(0.0, 0.0));
    for i in 1..=n_r {
        let r = radius * i as f64 / n_r as f64;
        for j in 0..n_theta {
            out.push(Complex64::from_polar(r, TAU * j as f64 / n_theta as f64));
        }
    }
    out
}

/// The grid used by default for the inequality checks: 30 × 16 up to radius 6.
pub fn default_check_grid() -> Vec<Complex64> {
    polar_grid(6.0, 30, 16)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub max_ratio: f64,
    pub argmax: Complex64,
    pub norm: NormValue,
}

/// `|f(z)| e^{−|z|²/2} ≤ ‖f‖_p` on the sample.
pub fn check_pointwise_bound(
    f: &EntireFunction,
    p: FockIndex,
    sample: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<BoundReport, FockError> {
    let norm = fock_norm(f, p, spec)?;
    check_ratio(sample, norm, |z| f.ln_abs(z) - 0.5 * z.norm_sqr(), |_| 0.0)
}

/// `|f′(z)| ≤ e²(1 + |z|) e^{|z|²/2} ‖f‖_p` on the sample.
pub fn check_derivative_bound(
    f: &EntireFunction,
    p: FockIndex,
    sample: &[Complex64],
    spec: &QuadratureSpec,
) -> Result<BoundReport, FockError> {
    let norm = fock_norm(f, p, spec)?;
    let df = f.differentiate();
    check_ratio(
        sample,
        norm,
        |z| df.ln_abs(z) - 0.5 * z.norm_sqr(),
        |z| 2.0 + (1.0 + z.norm()).ln(),
    )
}

fn check_ratio(
    sample: &[Complex64],
    norm: NormValue,
    ln_lhs: impl Fn(Complex64) -> f64,
    ln_factor: impl Fn(Complex64) -> f64,
) -> Result<BoundReport, FockError> {
    let mut report = BoundReport {
        max_ratio: 0.0,
        argmax: sample.first().copied().unwrap_or_default(),
        norm,
    };
    if norm.value == 0.0 {
        return Ok(report);
    }
    let ln_norm = norm.value.ln();
    for &z in sample {
        let ratio = (ln_lhs(z) - ln_factor(z) - ln_norm).exp();
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.argmax = z;
        }
    }
    if report.max_ratio > 1.0 + BOUND_SLACK {
        return Err(FockError::BoundViolated {
            witness: report.argmax,
            ratio: report.max_ratio,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// `‖f‖_q`.
    pub lhs: NormValue,
    /// `(q/p)^{1/q} ‖f‖_p`.
    pub rhs: f64,
    pub ratio: f64,
}

/// `‖f‖_q ≤ (q/p)^{1/q} ‖f‖_p` for `p < q`.
pub fn check_embedding(
    f: &EntireFunction,
    p: FockIndex,
    q: FockIndex,
    spec: &QuadratureSpec,
) -> Result<EmbeddingReport, FockError> {
    if p.get() >= q.get() {
        return Err(FockError::InvalidIndices { p: p.get(), q: q.get() });
    }
    let lhs = fock_norm(f, q, spec)?;
    let norm_p = fock_norm(f, p, spec)?;
    let rhs = (q.get() / p.get()).powf(1.0 / q.get()) * norm_p.value;
    let ratio = if rhs > 0.0 { lhs.value / rhs } else { 0.0 };
    if ratio > 1.0 + BOUND_SLACK {
        return Err(FockError::BoundViolated {
            witness: Complex64::new(0.0, 0.0),
            ratio,
        });
    }
    Ok(EmbeddingReport { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    fn fi(p: f64) -> FockIndex {
        FockIndex::new(p).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kernel_shapes() {
        assert!(kernel(Complex64::new(0.0, 0.0)).approx_eq(&EntireFunction::one(), 0.0));
        let k = kernel(Complex64::new(0.0, 1.0));
        let t = &k.terms()[0];
        assert_eq!(t.rate(), Complex64::new(0.0, -1.0));
        assert!((t.coeffs()[0].re - (-0.5f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn kernel_norms_are_one() {
        let k = kernel(Complex64::new(3.0, -2.0));
        for p in [0.5, 1.0, 2.0, 3.7] {
            let n = fock_norm(&k, fi(p), &spec()).unwrap();
            assert!((n.value - 1.0).abs() < 1e-8, "p={p}: {n:?}");
        }
    }

    #[test]
    fn monomial_norms() {
        for n in 0..=12 {
            let v = fock_norm(&EntireFunction::monomial(n), fi(2.0), &spec()).unwrap().value;
            let want = gamma(n as f64 + 1.0).sqrt();
            assert!((v / want - 1.0).abs() < 1e-8, "n={n}");
        }
        for p in [0.5, 1.0, 3.0] {
            let v = fock_norm(&EntireFunction::z(), fi(p), &spec()).unwrap().value;
            let want = (2.0 / p).sqrt() * gamma(p / 2.0 + 1.0).powf(1.0 / p);
            assert!((v / want - 1.0).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn sup_norms() {
        assert!((sup_norm(&EntireFunction::one()).value - 1.0).abs() < 1e-12);
        assert!((sup_norm(&kernel(Complex64::new(1.5, -0.5))).value - 1.0).abs() < 1e-10);
        assert!((sup_norm(&EntireFunction::z()).value - (-0.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn pointwise_equality_case() {
        let w = Complex64::new(1.0, 2.0);
        let mut grid = default_check_grid();
        grid.push(w);
        let r = check_pointwise_bound(&kernel(w), fi(1.5), &grid, &spec()).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-8);
        let r = check_pointwise_bound(&EntireFunction::z(), fi(2.0), &polar_grid(5.0, 50, 16), &spec()).unwrap();
        assert!((r.max_ratio - (-0.5f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn derivative_bound_cases() {
        let grid = default_check_grid();
        let r = check_derivative_bound(&EntireFunction::one(), fi(2.0), &grid, &spec()).unwrap();
        assert_eq!(r.max_ratio, 0.0);
        let r = check_derivative_bound(&EntireFunction::z(), fi(2.0), &grid, &spec()).unwrap();
        assert!((r.max_ratio - (-2.0f64).exp()).abs() < 1e-10);
        let r = check_derivative_bound(&kernel(Complex64::new(2.0, 0.0)), fi(2.0), &grid, &spec()).unwrap();
        assert!(r.max_ratio <= 1.0);
    }

    #[test]
    fn embedding_cases() {
        let r = check_embedding(&EntireFunction::one(), fi(1.0), fi(2.0), &spec()).unwrap();
        assert!((r.rhs - 2f64.sqrt()).abs() < 1e-9);
        check_embedding(&EntireFunction::monomial(2), fi(1.0), fi(3.0), &spec()).unwrap();
        assert!(matches!(
            check_embedding(&EntireFunction::one(), fi(2.0), fi(1.0), &spec()),
            Err(FockError::InvalidIndices { .. })
        ));
    }

    #[test]
    fn zero_norm() {
        assert_eq!(fock_norm(&EntireFunction::zero(), fi(2.0), &spec()).unwrap().value, 0.0);
        assert!(
            fock_norm(&EntireFunction::constant(Complex64::new(1e-3, 0.0)), fi(2.0), &spec())
                .unwrap()
                .value
                > 0.0
        );
    }
}
