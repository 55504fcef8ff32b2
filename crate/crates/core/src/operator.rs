//! The operators `W_{ψ,φ} f = ψ·(f∘φ)`, their Berezin transforms, truncated
//! matrices in the monomial basis of `F²`, and empirical norm lower bounds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fock::{fock_norm, kernel, polar_grid};
use crate::quadrature::{QuadratureError, QuadratureSpec};
use crate::symbol::{AffineMap, EntireFunction, FockIndex};

/// Largest acceptable ratio of truncated tail mass to squared column norm.
pub const TAIL_TOLERANCE: f64 = 1e-6;
/// Relative Rayleigh-quotient change at which power iteration stops.
pub const POWER_TOLERANCE: f64 = 1e-12;
const POWER_ITERATIONS: usize = 50_000;
const POWER_RESIDUAL: f64 = 1e-9;
const MAX_TAIL_DEGREE: usize = 8192;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("the weight ψ is identically zero")]
    ZeroSymbol,
    #[error("column {column} loses {ratio:e} of its squared norm to truncation")]
    TailLoss { column: usize, ratio: f64 },
    #[error("power iteration did not converge in {iterations} steps")]
    NonConvergence { iterations: usize },
    #[error("matrix order must be at least 8, got {0}")]
    InvalidOrder(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Anything that maps the symbol class into itself linearly, between two
/// Fock spaces.
pub trait LinearOperator: Sync {
    fn apply(&self, f: &EntireFunction) -> EntireFunction;
    fn domain(&self) -> FockIndex;
    fn codomain(&self) -> FockIndex;

    /// Coefficients `⟨W eⱼ, eₘ⟩` for `j < order`, `m < len`, when the
    /// operator can produce them directly.
    fn f2_columns(&self, _order: usize, _len: usize) -> Option<Vec<Vec<Complex64>>> {
        None
    }

    /// Length of the coefficient vectors needed to see the tail beyond `order`.
    fn f2_horizon(&self, _order: usize) -> Option<usize> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedCompositionOperator {
    psi: EntireFunction,
    phi: AffineMap,
    p: FockIndex,
    q: FockIndex,
}

impl WeightedCompositionOperator {
    pub fn new(psi: EntireFunction, phi: AffineMap, p: FockIndex, q: FockIndex) -> Result<Self, OperatorError> {
        if psi.is_zero() {
            return Err(OperatorError::ZeroSymbol);
        }
        Ok(Self { psi, phi, p, q })
    }

    /// The composition operator `C_φ`.
    pub fn composition(phi: AffineMap, p: FockIndex, q: FockIndex) -> Self {
        Self {
            psi: EntireFunction::one(),
            phi,
            p,
            q,
        }
    }

    pub fn psi(&self) -> &EntireFunction {
        &self.psi
    }

    pub fn phi(&self) -> &AffineMap {
        &self.phi
    }

    pub fn p(&self) -> FockIndex {
        self.p
    }

    pub fn q(&self) -> FockIndex {
        self.q
    }

    /// `f ↦ ψ·(f∘φ_r)` with `φ_r(z) = φ(rz)`.
    pub fn dilate(&self, r: f64) -> Self {
        let phi = self.phi.dilate(r).unwrap_or(self.phi);
        Self { phi, ..self.clone() }
    }

    pub fn with_spaces(&self, p: FockIndex, q: FockIndex) -> Self {
        Self { p, q, ..self.clone() }
    }

    /// `‖W k_w‖_q^q`.
    pub fn berezin(&self, w: Complex64, spec: &QuadratureSpec) -> Result<f64, QuadratureError> {
        let n = fock_norm(&self.apply(&kernel(w)), self.q, spec)?;
        Ok(n.value.powf(self.q.get()))
    }
}

impl LinearOperator for WeightedCompositionOperator {
    fn apply(&self, f: &EntireFunction) -> EntireFunction {
        self.psi.mul(&f.compose_affine(&self.phi))
    }

    fn domain(&self) -> FockIndex {
        self.p
    }

    fn codomain(&self) -> FockIndex {
        self.q
    }

    /// `W e₀ = ψ` and `W eⱼ = (az + b)·W eⱼ₋₁/√j`, with `z eₘ = √(m+1) eₘ₊₁`.
    fn f2_columns(&self, order: usize, len: usize) -> Option<Vec<Vec<Complex64>>> {
        let (a, b) = (self.phi.a(), self.phi.b());
        let mut v = f2_coefficients(&self.psi, len);
        let mut out = Vec::with_capacity(order);
        for j in 0..order {
            if j > 0 {
                let inv = 1.0 / (j as f64).sqrt();
                let mut next = vec![Complex64::new(0.0, 0.0); len];
                for m in 0..len {
                    let shifted = if m > 0 {
                        a * v[m - 1] * (m as f64).sqrt()
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    next[m] = (shifted + b * v[m]) * inv;
                }
                v = next;
            }
            out.push(v.clone());
        }
        Some(out)
    }

    fn f2_horizon(&self, order: usize) -> Option<usize> {
        let rate = self.psi.max_rate_modulus();
        let spread = (8.0 * (rate + self.phi.b().norm()).powi(2)).ceil() as usize;
        Some((order + self.psi.degree() + spread + 64).min(MAX_TAIL_DEGREE))
    }
}

/// A finite linear combination `Σ cᵢ Wᵢ` of operators sharing their spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    parts: Vec<(Complex64, WeightedCompositionOperator)>,
    p: FockIndex,
    q: FockIndex,
}

impl Combination {
    pub fn new(parts: Vec<(Complex64, WeightedCompositionOperator)>, p: FockIndex, q: FockIndex) -> Self {
        Self { parts, p, q }
    }

    /// `W₁ − W₂`.
    pub fn difference(w1: &WeightedCompositionOperator, w2: &WeightedCompositionOperator) -> Self {
        Self::new(
            vec![
                (Complex64::new(1.0, 0.0), w1.clone()),
                (Complex64::new(-1.0, 0.0), w2.clone()),
            ],
            w1.p,
            w1.q,
        )
    }
}

impl LinearOperator for Combination {
    fn apply(&self, f: &EntireFunction) -> EntireFunction {
        self.parts
            .iter()
            .fold(EntireFunction::zero(), |acc, (c, w)| acc.add(&w.apply(f).scale(*c)))
    }

    fn domain(&self) -> FockIndex {
        self.p
    }

    fn codomain(&self) -> FockIndex {
        self.q
    }

    fn f2_columns(&self, order: usize, len: usize) -> Option<Vec<Vec<Complex64>>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); len]; order];
        for (c, w) in &self.parts {
            for (col, part) in out.iter_mut().zip(w.f2_columns(order, len)?) {
                for (x, y) in col.iter_mut().zip(part) {
                    *x += c * y;
                }
            }
        }
        Some(out)
    }

    fn f2_horizon(&self, order: usize) -> Option<usize> {
        self.parts
            .iter()
            .map(|(_, w)| w.f2_horizon(order))
            .try_fold(order, |acc, h| h.map(|h| acc.max(h)))
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        out.push(out[k - 1] + (k as f64).ln());
    }
    out
}

/// Coefficients of `f` in the orthonormal basis `zᵐ/√(m!)` of `F²`, for
/// `m < count`.
pub fn f2_coefficients(f: &EntireFunction, count: usize) -> Vec<Complex64> {
    let lf = ln_factorials(count);
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    for t in f.terms() {
        let c = t.rate();
        let (ln_c, arg_c) = (c.norm().ln(), c.arg());
        for (j, pj) in t.coeffs().iter().enumerate() {
            if pj.norm() == 0.0 {
                continue;
            }
            let (ln_p, arg_p) = (pj.norm().ln(), pj.arg());
            for (m, slot) in out.iter_mut().enumerate().skip(j) {
                let k = m - j;
                let ln_mag = if k == 0 {
                    ln_p - lf[k] + 0.5 * lf[m]
                } else if c.norm() == 0.0 {
                    continue;
                } else {
                    ln_p + k as f64 * ln_c - lf[k] + 0.5 * lf[m]
                };
                *slot += Complex64::from_polar(ln_mag.exp(), arg_p + k as f64 * arg_c);
            }
        }
    }
    out
}

/// `Σ_{m ≥ from} |⟨f, e_m⟩|²`, summed until the terms die out.
fn f2_tail_mass(f: &EntireFunction, from: usize) -> f64 {
    let rate = f.max_rate_modulus();
    let degree = f.degree();
    let horizon = (from.max(degree + 1) + (8.0 * rate * rate).ceil() as usize + 64).min(MAX_TAIL_DEGREE);
    f2_coefficients(f, horizon)
        .iter()
        .skip(from)
        .map(|c| c.norm_sqr())
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMatrix {
    pub order: usize,
    /// Column `j` holds the first `order` coefficients of `W(zʲ/√(j!))`.
    pub entries: DMatrix<Complex64>,
    /// Per column: truncated tail mass over squared column norm.
    pub column_tail: Vec<f64>,
}

impl TruncatedMatrix {
    pub fn max_tail(&self) -> f64 {
        self.column_tail.iter().copied().fold(0.0, f64::max)
    }
}

/// `P_N W P_N` in the normalised monomial basis, with tail diagnostics.
pub fn f2_compression(w: &dyn LinearOperator, order: usize) -> Result<TruncatedMatrix, OperatorError> {
    if order < 8 {
        return Err(OperatorError::InvalidOrder(order));
    }
    let direct = w.f2_horizon(order).and_then(|len| w.f2_columns(order, len.max(order)));
    let lf = ln_factorials(order);
    let columns: Vec<(Vec<Complex64>, f64)> = match direct {
        Some(cols) => cols
            .into_iter()
            .map(|mut col| {
                let tail: f64 = col[order..].iter().map(|c| c.norm_sqr()).sum();
                col.truncate(order);
                let head_mass: f64 = col.iter().map(|c| c.norm_sqr()).sum();
                let total = head_mass + tail;
                (col, if total > 0.0 { tail / total } else { 0.0 })
            })
            .collect(),
        None => (0..order)
            .into_par_iter()
            .map(|j| {
                let basis = EntireFunction::monomial(j).scale(Complex64::new((-0.5 * lf[j]).exp(), 0.0));
                let image = w.apply(&basis);
                let head = f2_coefficients(&image, order);
                let head_mass: f64 = head.iter().map(|c| c.norm_sqr()).sum();
                let tail = f2_tail_mass(&image, order);
                let total = head_mass + tail;
                let ratio = if total > 0.0 { tail / total } else { 0.0 };
                (head, ratio)
            })
            .collect(),
    };
    let mut entries = DMatrix::from_element(order, order, Complex64::new(0.0, 0.0));
    let mut column_tail = Vec::with_capacity(order);
    for (j, (col, ratio)) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            entries[(i, j)] = v;
        }
        column_tail.push(ratio);
    }
    Ok(TruncatedMatrix {
        order,
        entries,
        column_tail,
    })
}

/// As [`f2_compression`], but fails with `TailLoss` when any column loses
/// more than [`TAIL_TOLERANCE`] of its squared norm.
pub fn f2_matrix(w: &dyn LinearOperator, order: usize) -> Result<TruncatedMatrix, OperatorError> {
    let m = f2_compression(w, order)?;
    if let Some((column, &ratio)) = m.column_tail.iter().enumerate().find(|(_, r)| **r > TAIL_TOLERANCE) {
        return Err(OperatorError::TailLoss { column, ratio });
    }
    Ok(m)
}

/// Largest singular value by power iteration on `M*M`, falling back to a
/// dense SVD when the top of the spectrum is too clustered to converge.
pub fn matrix_sigma_max(m: &TruncatedMatrix) -> Result<f64, OperatorError> {
    match sigma_max(&m.entries) {
        Err(OperatorError::NonConvergence { .. }) => Ok(dense_sigma_max(&m.entries)),
        r => r,
    }
}

fn dense_sigma_max(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub(crate) fn sigma_max(m: &DMatrix<Complex64>) -> Result<f64, OperatorError> {
    let n = m.ncols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.01 * i as f64 / n as f64, 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    let adjoint = m.adjoint();
    let mut lambda = 0.0;
    for k in 0..POWER_ITERATIONS {
        let mv = m * &v;
        let next_lambda = mv.norm_squared();
        let w = &adjoint * mv;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if (next_lambda - lambda).abs() <= POWER_TOLERANCE * next_lambda {
            let residual = (&w - &v * Complex64::new(next_lambda, 0.0)).norm();
            if residual <= POWER_RESIDUAL * next_lambda {
                return Ok(next_lambda.sqrt());
            }
            return Err(OperatorError::NonConvergence { iterations: k + 1 });
        }
        v = w / Complex64::new(norm, 0.0);
        lambda = next_lambda;
    }
    Err(OperatorError::NonConvergence {
        iterations: POWER_ITERATIONS,
    })
}

/// Test functions for [`empirical_norm`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Family {
    pub kernel_radius: f64,
    pub kernel_radii: usize,
    pub kernel_angles: usize,
    pub max_monomial_degree: usize,
    pub extra_kernels: Vec<Complex64>,
}

impl Default for Family {
    fn default() -> Self {
        Self {
            kernel_radius: 6.0,
            kernel_radii: 12,
            kernel_angles: 16,
            max_monomial_degree: 20,
            extra_kernels: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Witness {
    Kernel(Complex64),
    Monomial(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalNorm {
    pub value: f64,
    pub witness: Witness,
}

/// `max ‖Wf‖_q / ‖f‖_p` over kernels and normalised monomials; always a
/// lower bound for `‖W‖`.
pub fn empirical_norm(
    w: &dyn LinearOperator,
    family: &Family,
    spec: &QuadratureSpec,
) -> Result<EmpiricalNorm, QuadratureError> {
    let mut probes: Vec<Witness> = polar_grid(family.kernel_radius, family.kernel_radii, family.kernel_angles)
        .into_iter()
        .chain(family.extra_kernels.iter().copied())
        .map(Witness::Kernel)
        .collect();
    probes.extend((0..=family.max_monomial_degree).map(Witness::Monomial));
    let (p, q) = (w.domain(), w.codomain());
    let ratios: Vec<Result<f64, QuadratureError>> = probes
        .par_iter()
        .map(|probe| {
            let (f, norm) = match *probe {
                // ‖k_w‖_p = 1 exactly
                Witness::Kernel(z) => (kernel(z), 1.0),
                Witness::Monomial(n) => {
                    let f = EntireFunction::monomial(n);
                    let norm = fock_norm(&f, p, spec)?.value;
                    (f, norm)
                }
            };
            Ok(fock_norm(&w.apply(&f), q, spec)?.value / norm)
        })
        .collect();
    let mut best = EmpiricalNorm {
        value: 0.0,
        witness: probes[0],
    };
    for (probe, r) in probes.into_iter().zip(ratios) {
        let r = r?;
        if r > best.value {
            best = EmpiricalNorm {
                value: r,
                witness: probe,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fi(p: f64) -> FockIndex {
        FockIndex::new(p).unwrap()
    }

    fn op(psi: EntireFunction, a: Complex64, b: Complex64) -> WeightedCompositionOperator {
        WeightedCompositionOperator::new(psi, AffineMap::new(a, b).unwrap(), fi(2.0), fi(2.0)).unwrap()
    }

    #[test]
    fn zero_weight_rejected() {
        let e = WeightedCompositionOperator::new(EntireFunction::zero(), AffineMap::identity(), fi(2.0), fi(2.0));
        assert_eq!(e.unwrap_err(), OperatorError::ZeroSymbol);
    }

    #[test]
    fn apply_examples() {
        let f = EntireFunction::monomial(3).add(&EntireFunction::one());
        assert!(op(EntireFunction::one(), c(1.0, 0.0), c(0.0, 0.0))
            .apply(&f)
            .approx_eq(&f, 1e-15));
        let a = c(0.3, 0.4);
        let got = op(EntireFunction::one(), a, c(0.0, 0.0)).apply(&EntireFunction::monomial(4));
        assert!(got.approx_eq(&EntireFunction::monomial(4).scale(a.powu(4)), 1e-14));
        let got = op(EntireFunction::z(), c(1.0, 0.0), c(1.0, 0.0)).apply(&EntireFunction::z());
        let want = EntireFunction::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(got.approx_eq(&want, 1e-15));
    }

    #[test]
    fn coefficients_of_kernel() {
        // k_w = e^{−|w|²/2} Σ (w̄ᵐ/√m!) e_m
        let w = c(0.7, -1.1);
        let coef = f2_coefficients(&kernel(w), 30);
        for (m, v) in coef.iter().enumerate() {
            let lf: f64 = (1..=m).map(|k| (k as f64).ln()).sum();
            let want = w.conj().powu(m as u32) * (-0.5 * w.norm_sqr() - 0.5 * lf).exp();
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn diagonal_and_identity_matrices() {
        let a = c(0.0, 0.7);
        let m = f2_matrix(&op(EntireFunction::one(), a, c(0.0, 0.0)), 16).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { a.powu(i as u32) } else { c(0.0, 0.0) };
                assert!((m.entries[(i, j)] - want).norm() < 1e-14);
            }
        }
        let id = f2_matrix(&op(EntireFunction::one(), c(1.0, 0.0), c(0.0, 0.0)), 16).unwrap();
        assert!((id.entries.clone() - DMatrix::identity(16, 16)).norm() < 1e-13);
        assert!((matrix_sigma_max(&id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subdiagonal_weights() {
        let w = op(EntireFunction::z(), c(1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            f2_matrix(&w, 64),
            Err(OperatorError::TailLoss { column: 63, .. })
        ));
        let m = f2_compression(&w, 64).unwrap();
        for n in 0..63 {
            assert!((m.entries[(n + 1, n)].re - ((n + 1) as f64).sqrt()).abs() < 1e-12);
        }
        assert!((matrix_sigma_max(&m).unwrap() - 63f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let psi = EntireFunction::exp_linear(c(0.5, 0.2), c(0.3, -0.1))
            .unwrap()
            .add(&EntireFunction::z());
        let m = f2_compression(&op(psi, c(0.4, 0.3), c(-0.2, 0.5)), 24).unwrap();
        let svd = m.entries.clone().svd(false, false);
        let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
        assert!((matrix_sigma_max(&m).unwrap() - top).abs() < 1e-9 * top);
    }

    #[test]
    fn berezin_examples() {
        let spec = QuadratureSpec::default();
        let w = c(1.0, 0.5);
        let id = op(EntireFunction::one(), c(1.0, 0.0), c(0.0, 0.0));
        assert!((id.berezin(w, &spec).unwrap() - 1.0).abs() < 1e-8);
        let b = c(0.5, -0.5);
        let q = 3.0;
        let rank_one = op(EntireFunction::one(), c(0.0, 0.0), b).with_spaces(fi(2.0), fi(q));
        let want = (q * ((w.conj() * b).re - 0.5 * w.norm_sqr())).exp();
        assert!((rank_one.berezin(w, &spec).unwrap() / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn empirical_norm_examples() {
        let spec = QuadratureSpec::default();
        let family = Family {
            kernel_radii: 3,
            kernel_angles: 4,
            max_monomial_degree: 5,
            ..Family::default()
        };
        let half = op(EntireFunction::one(), c(0.5, 0.0), c(0.0, 0.0));
        let e = empirical_norm(&half, &family, &spec).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8);
        let b = c(0.6, 0.8);
        let rank_one = op(EntireFunction::one(), c(0.0, 0.0), b);
        let fam = Family {
            extra_kernels: vec![b],
            ..family
        };
        let e = empirical_norm(&rank_one, &fam, &spec).unwrap();
        assert!((e.value / (0.5 * b.norm_sqr()).exp() - 1.0).abs() < 1e-8);
        assert_eq!(e.witness, Witness::Kernel(b));
    }

    #[test]
    fn recurrence_columns_match_expansion() {
        let psi = EntireFunction::exp_linear(c(0.7, -0.2), c(0.3, 0.4))
            .unwrap()
            .add(&EntireFunction::z());
        let w = WeightedCompositionOperator::new(
            psi,
            AffineMap::new(c(0.5, 0.3), c(-0.4, 0.2)).unwrap(),
            fi(2.0),
            fi(2.0),
        )
        .unwrap();
        let cols = w.f2_columns(12, 24).unwrap();
        let lf = ln_factorials(12);
        for (j, col) in cols.iter().enumerate() {
            let basis = EntireFunction::monomial(j).scale(c((-0.5 * lf[j]).exp(), 0.0));
            let direct = f2_coefficients(&w.apply(&basis), 24);
            for (x, y) in col.iter().zip(&direct) {
                assert!((x - y).norm() < 1e-12, "column {j}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn leaf_compression_stays_bounded_at_high_order() {
        // ‖W‖ = |c|·e^{|b|²/2} for ψ = c·e^{−b̄az}, |a| = 1
        let phi = AffineMap::new(Complex64::from_polar(1.0, 0.8), c(0.6, 0.7)).unwrap();
        let psi = EntireFunction::exp_linear(c(1.5, 0.0), -phi.b().conj() * phi.a()).unwrap();
        let w = WeightedCompositionOperator::new(psi, phi, fi(2.0), fi(2.0)).unwrap();
        let norm = 1.5 * (0.5 * phi.b().norm_sqr()).exp();
        for (order, tol) in [(64, 1e-10), (128, 1e-7)] {
            let sigma = matrix_sigma_max(&f2_compression(&w, order).unwrap()).unwrap();
            assert!((sigma / norm - 1.0).abs() < tol, "order {order}: {sigma} vs {norm}");
        }
    }
}
