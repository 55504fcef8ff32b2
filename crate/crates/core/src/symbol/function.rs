use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::affine::AffineMap;
use super::SymbolError;

/// Tolerance used when merging exponential rates and when deciding that a
/// coefficient cancelled to zero.
pub const TOL_SYM: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One summand `P(z) e^{rate z}` with `P` stored by ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpTerm {
    coeffs: Vec<Complex64>,
    rate: Complex64,
}

impl PolyExpTerm {
    pub fn new(coeffs: Vec<Complex64>, rate: Complex64) -> Result<Self, SymbolError> {
        if !is_finite(rate) || coeffs.iter().any(|c| !is_finite(*c)) {
            return Err(SymbolError::NonFinite);
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Ok(Self { coeffs, rate })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn rate(&self) -> Complex64 {
        self.rate
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    fn poly_at(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    fn modulus_poly_at(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.poly_at(z) * (self.rate * z).exp()
    }
}

/// A finite sum of polynomial times exponential-of-linear terms.
///
/// Canonical form: rates pairwise distinct (up to [`TOL_SYM`]), no zero
/// terms, terms ordered by rate. The zero function has no terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntireFunction {
    terms: Vec<PolyExpTerm>,
}

/// Accumulates coefficient slots per rate while tracking the magnitude of
/// every contribution, so cancellations can be detected relative to the
/// size of what was summed.
#[derive(Default)]
struct Builder {
    groups: Vec<Group>,
}

struct Group {
    rate: Complex64,
    sums: Vec<Complex64>,
    mags: Vec<f64>,
}

impl Builder {
    fn group(&mut self, rate: Complex64) -> &mut Group {
        let idx = match self.groups.iter().position(|g| (g.rate - rate).norm() <= TOL_SYM) {
            Some(i) => i,
            None => {
                self.groups.push(Group {
                    rate,
                    sums: Vec::new(),
                    mags: Vec::new(),
                });
                self.groups.len() - 1
            }
        };
        &mut self.groups[idx]
    }

    fn push(&mut self, rate: Complex64, degree: usize, value: Complex64, magnitude: f64) {
        let g = self.group(rate);
        if g.sums.len() <= degree {
            g.sums.resize(degree + 1, ZERO);
            g.mags.resize(degree + 1, 0.0);
        }
        g.sums[degree] += value;
        g.mags[degree] += magnitude;
    }

    fn push_term(&mut self, term: &PolyExpTerm, scale: Complex64) {
        for (k, c) in term.coeffs.iter().enumerate() {
            let v = c * scale;
            self.push(term.rate, k, v, v.norm());
        }
    }

    fn finish(self) -> EntireFunction {
        let mut terms: Vec<PolyExpTerm> = self
            .groups
            .into_iter()
            .filter_map(|g| {
                let mut coeffs: Vec<Complex64> = g
                    .sums
                    .iter()
                    .zip(&g.mags)
                    .map(|(s, m)| {
                        if m.is_finite() && s.norm() <= TOL_SYM * m {
                            ZERO
                        } else {
                            *s
                        }
                    })
                    .collect();
                while coeffs.last() == Some(&ZERO) {
                    coeffs.pop();
                }
                if coeffs.is_empty() {
                    None
                } else {
                    Some(PolyExpTerm { coeffs, rate: g.rate })
                }
            })
            .collect();
        terms.sort_by(|a, b| a.rate.re.total_cmp(&b.rate.re).then(a.rate.im.total_cmp(&b.rate.im)));
        EntireFunction { terms }
    }
}

impl EntireFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms(vec![PolyExpTerm {
            coeffs: vec![c],
            rate: ZERO,
        }])
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// The identity function `z`.
    pub fn z() -> Self {
        Self::monomial(1)
    }

    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        Self::from_terms(vec![PolyExpTerm { coeffs, rate: ZERO }])
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self, SymbolError> {
        Ok(Self::from_terms(vec![PolyExpTerm::new(coeffs, ZERO)?]))
    }

    /// `coeff * e^{rate z}`.
    pub fn exp_linear(coeff: Complex64, rate: Complex64) -> Result<Self, SymbolError> {
        Ok(Self::from_terms(vec![PolyExpTerm::new(vec![coeff], rate)?]))
    }

    /// Canonicalises an arbitrary list of terms.
    pub fn from_terms(terms: Vec<PolyExpTerm>) -> Self {
        let mut b = Builder::default();
        for t in &terms {
            b.push_term(t, ONE);
        }
        b.finish()
    }

    pub fn terms(&self) -> &[PolyExpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the function is the constant `c` (rates within tolerance of zero).
    pub fn constant_value(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(ZERO),
            [t] if t.degree() == 0 && t.rate.norm() <= TOL_SYM => Some(t.coeffs[0]),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// Highest polynomial degree over all terms.
    pub fn degree(&self) -> usize {
        self.terms.iter().map(PolyExpTerm::degree).max().unwrap_or(0)
    }

    pub fn max_rate_modulus(&self) -> f64 {
        self.terms.iter().map(|t| t.rate.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.evaluate(z)).sum()
    }

    /// `ln |f(z)|`, computed with the exponentials shifted by their largest
    /// real part so that values far beyond `f64` range stay representable.
    pub fn ln_abs(&self, z: Complex64) -> f64 {
        if self.terms.is_empty() {
            return f64::NEG_INFINITY;
        }
        let shift = self
            .terms
            .iter()
            .map(|t| (t.rate * z).re)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|t| t.poly_at(z) * (t.rate * z - shift).exp())
            .sum();
        sum.norm().ln() + shift
    }

    /// `Σ p̂ᵢ(r) e^{|cᵢ| r}`, an upper bound for `max_{|z|=r} |f(z)|`.
    pub fn growth_envelope(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.modulus_poly_at(r) * (t.rate.norm() * r).exp())
            .sum()
    }

    /// Logarithm of [`growth_envelope`](Self::growth_envelope), overflow free.
    pub fn ln_growth_envelope(&self, r: f64) -> f64 {
        let parts: Vec<f64> = self
            .terms
            .iter()
            .map(|t| t.modulus_poly_at(r).ln() + t.rate.norm() * r)
            .collect();
        ln_sum_exp(&parts)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut b = Builder::default();
        for t in &self.terms {
            b.push_term(t, c);
        }
        b.finish()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut b = Builder::default();
        for t in self.terms.iter().chain(&other.terms) {
            b.push_term(t, ONE);
        }
        b.finish()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut b = Builder::default();
        for t in &self.terms {
            b.push_term(t, ONE);
        }
        for t in &other.terms {
            b.push_term(t, -ONE);
        }
        b.finish()
    }

    /// Product; rates combine additively.
    pub fn mul(&self, other: &Self) -> Self {
        let mut b = Builder::default();
        for s in &self.terms {
            for t in &other.terms {
                let rate = s.rate + t.rate;
                for (i, x) in s.coeffs.iter().enumerate() {
                    for (j, y) in t.coeffs.iter().enumerate() {
                        let v = x * y;
                        b.push(rate, i + j, v, x.norm() * y.norm());
                    }
                }
            }
        }
        b.finish()
    }

    /// `P e^{cz} ↦ (P′ + cP) e^{cz}` termwise.
    pub fn differentiate(&self) -> Self {
        let mut b = Builder::default();
        for t in &self.terms {
            for (k, c) in t.coeffs.iter().enumerate() {
                let v = c * t.rate;
                b.push(t.rate, k, v, v.norm());
                if k > 0 {
                    let d = c * k as f64;
                    b.push(t.rate, k - 1, d, d.norm());
                }
            }
        }
        b.finish()
    }

    /// `f ∘ φ`, re-expanded into the class.
    pub fn compose_affine(&self, phi: &AffineMap) -> Self {
        let (a, bb) = (phi.a(), phi.b());
        let mut b = Builder::default();
        for t in &self.terms {
            let rate = t.rate * a;
            let factor = (t.rate * bb).exp();
            for (k, c) in t.coeffs.iter().enumerate() {
                // c (az + b)^k = c Σ_j C(k,j) a^j b^{k-j} z^j
                let mut binom = 1.0;
                for j in 0..=k {
                    let v = c * binom * a.powu(j as u32) * bb.powu((k - j) as u32) * factor;
                    b.push(rate, j, v, v.norm());
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
            }
        }
        b.finish()
    }

    /// Canonical-form comparison: rates matched within `tol`, coefficients
    /// within `tol` relative to their size (absolute below 1).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let close = |x: Complex64, y: Complex64| (x - y).norm() <= tol * x.norm().max(y.norm()).max(1.0);
        let matches = |lhs: &Self, rhs: &Self| {
            lhs.terms.iter().all(|t| {
                let partner = rhs.terms.iter().find(|u| (u.rate - t.rate).norm() <= tol);
                let n = t.coeffs.len();
                match partner {
                    Some(u) => (0..n.max(u.coeffs.len())).all(|k| {
                        close(
                            t.coeffs.get(k).copied().unwrap_or(ZERO),
                            u.coeffs.get(k).copied().unwrap_or(ZERO),
                        )
                    }),
                    None => t.coeffs.iter().all(|c| close(*c, ZERO)),
                }
            })
        };
        matches(self, other) && matches(other, self)
    }

    /// `Some(λ)` when `other ≈ λ·self` with `λ ≠ 0`.
    pub fn proportionality(&self, other: &Self) -> Option<Complex64> {
        let t = self.terms.first()?;
        let (k, c) = t
            .coeffs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
        let u = other.terms.iter().find(|u| (u.rate - t.rate).norm() <= TOL_SYM)?;
        let lambda = u.coeffs.get(k).copied().unwrap_or(ZERO) / c;
        if lambda.norm() == 0.0 || !is_finite(lambda) {
            return None;
        }
        self.scale(lambda).approx_eq(other, 1e-10).then_some(lambda)
    }

    /// Text form accepted by [`parse_symbol`](super::parse_symbol).
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = Vec::new();
        for t in &self.terms {
            for (k, c) in t.coeffs.iter().enumerate() {
                if *c == ZERO {
                    continue;
                }
                let mut piece = render_complex(*c);
                match k {
                    0 => {}
                    1 => piece.push_str("*z"),
                    _ => piece.push_str(&format!("*z^{k}")),
                }
                if t.rate != ZERO {
                    piece.push_str(&format!("*exp({}*z)", render_complex(t.rate)));
                }
                out.push(piece);
            }
        }
        out.join(" + ")
    }
}

fn render_complex(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("({:?}{}{:?}i)", c.re, sign, c.im.abs())
}

impl fmt::Display for EntireFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for EntireFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl Add for &EntireFunction {
    type Output = EntireFunction;
    fn add(self, rhs: Self) -> EntireFunction {
        EntireFunction::add(self, rhs)
    }
}

impl Sub for &EntireFunction {
    type Output = EntireFunction;
    fn sub(self, rhs: Self) -> EntireFunction {
        EntireFunction::sub(self, rhs)
    }
}

impl Mul for &EntireFunction {
    type Output = EntireFunction;
    fn mul(self, rhs: Self) -> EntireFunction {
        EntireFunction::mul(self, rhs)
    }
}

impl Neg for &EntireFunction {
    type Output = EntireFunction;
    fn neg(self) -> EntireFunction {
        self.scale(-ONE)
    }
}

pub(crate) fn is_finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// `ln Σ e^{xᵢ}`; `-∞` for an empty or all `-∞` input.
pub(crate) fn ln_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
