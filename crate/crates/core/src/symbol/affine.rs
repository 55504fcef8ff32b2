use num_complex::Complex64;
use serde::Serialize;

use super::function::is_finite;
use super::SymbolError;

/// Slack allowed above `|a| = 1`, so unit-modulus literals such as
/// `cos θ + i sin θ` survive rounding.
pub const UNIT_TOL: f64 = 1e-12;

/// `φ(z) = a z + b` with `|a| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    a: Complex64,
    b: Complex64,
}

impl AffineMap {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, SymbolError> {
        if !is_finite(a) || !is_finite(b) {
            return Err(SymbolError::NonFinite);
        }
        if a.norm() > 1.0 + UNIT_TOL {
            return Err(SymbolError::NotAContraction { modulus: a.norm() });
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// The constant map `z ↦ b`.
    pub fn constant(b: Complex64) -> Result<Self, SymbolError> {
        Self::new(Complex64::new(0.0, 0.0), b)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    /// `(self ∘ inner)(z) = a₁(a₂ z + b₂) + b₁`.
    pub fn compose(&self, inner: &AffineMap) -> Result<Self, SymbolError> {
        Self::new(self.a * inner.a, self.a * inner.b + self.b)
    }

    /// `z ↦ φ(r z)`.
    pub fn dilate(&self, r: f64) -> Result<Self, SymbolError> {
        Self::new(self.a * r, self.b)
    }

    pub fn is_constant(&self) -> bool {
        self.a.norm() == 0.0
    }

    pub fn is_unit_modulus(&self) -> bool {
        (self.a.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Equality of both coefficients within `tol`.
    pub fn approx_eq(&self, other: &AffineMap, tol: f64) -> bool {
        (self.a - other.a).norm() <= tol && (self.b - other.b).norm() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_expanding_maps() {
        let err = AffineMap::new(Complex64::new(1.1, 0.0), Complex64::new(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, SymbolError::NotAContraction { .. }));
    }

    #[test]
    fn accepts_rounded_unit_modulus() {
        let t: f64 = 0.4;
        let a = Complex64::new(t.cos(), t.sin());
        let phi = AffineMap::new(a, Complex64::new(0.0, 0.0)).unwrap();
        assert!(phi.is_unit_modulus());
    }

    #[test]
    fn composition_order() {
        let outer = AffineMap::new(Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let inner = AffineMap::new(Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0)).unwrap();
        let z = Complex64::new(0.3, -0.8);
        let both = outer.compose(&inner).unwrap();
        assert!((both.apply(z) - outer.apply(inner.apply(z))).norm() < 1e-15);
    }
}
