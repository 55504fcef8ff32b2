//! Exact arithmetic on finite sums of polynomial × exponential-of-linear
//! terms, the affine composition symbols, and the Fock exponent type.

mod affine;
mod function;
mod parse;

use serde::Serialize;
use thiserror::Error;

pub use affine::{AffineMap, UNIT_TOL};
pub use function::{EntireFunction, PolyExpTerm, TOL_SYM};
pub use parse::{
    parse_affine, parse_complex, parse_radii, parse_symbol, ParseError, ParseErrorKind, MAX_DEGREE, MAX_POWER,
    MAX_TERMS,
};

pub(crate) use function::ln_sum_exp;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolError {
    #[error("non-finite coefficient or rate")]
    NonFinite,
    #[error("affine symbol must satisfy |a| <= 1, got |a| = {modulus}")]
    NotAContraction { modulus: f64 },
    #[error("Fock exponent must be positive and finite, got {0}")]
    BadExponent(f64),
}

/// Exponent `p ∈ (0, ∞)` naming the space `F^p(ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FockIndex(f64);

impl FockIndex {
    pub fn new(p: f64) -> Result<Self, SymbolError> {
        if p.is_finite() && p > 0.0 {
            Ok(Self(p))
        } else {
            Err(SymbolError::BadExponent(p))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for FockIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
