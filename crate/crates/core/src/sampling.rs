//! Seeded random symbols and operators for the property suites.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::WeightedCompositionOperator;
use crate::symbol::{AffineMap, EntireFunction, FockIndex, PolyExpTerm};

/// Deterministic generator of class members.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform on the disc `|z| < radius`.
    pub fn disc(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.rng.random::<f64>().sqrt();
        Complex64::from_polar(r, TAU * self.rng.random::<f64>())
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.rng.random::<f64>())
    }

    /// One or two terms `p(z)e^{cz}` with `deg p ≤ 3`, `|coefficients| < 1`
    /// and `|c| < 1`; never zero.
    pub fn function(&mut self) -> EntireFunction {
        loop {
            let n_terms = self.rng.random_range(1..=2);
            let mut terms = Vec::with_capacity(n_terms);
            for k in 0..n_terms {
                let deg = self.rng.random_range(0..=3);
                let coeffs: Vec<Complex64> = (0..=deg).map(|_| self.disc(1.0)).collect();
                let rate = if k == 0 && self.rng.random_bool(0.5) {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.disc(1.0)
                };
                if let Ok(t) = PolyExpTerm::new(coeffs, rate) {
                    terms.push(t);
                }
            }
            let f = EntireFunction::from_terms(terms);
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// `φ(z) = az + b` with `0.1 ≤ |a| ≤ 0.9` and `|b| < 1`.
    pub fn contraction(&mut self) -> AffineMap {
        let a = Complex64::from_polar(self.uniform(0.1, 0.9), TAU * self.rng.random::<f64>());
        AffineMap::new(a, self.disc(1.0)).expect("finite coefficients")
    }

    /// `φ(z) = az + b` with `|a| = 1`, `|b| < 1`.
    pub fn unit_map(&mut self) -> AffineMap {
        let a = self.unimodular();
        AffineMap::new(a, self.disc(1.0)).expect("finite coefficients")
    }

    /// A compact operator: class weight and a contraction.
    pub fn compact_operator(&mut self, p: FockIndex, q: FockIndex) -> WeightedCompositionOperator {
        let psi = self.function();
        let phi = self.contraction();
        WeightedCompositionOperator::new(psi, phi, p, q).expect("nonzero weight")
    }

    /// `W_{ψ,φ}` with `|a| = 1` and `ψ = c·e^{−b̄az}`, `0.2 ≤ |c| ≤ 2`.
    pub fn leaf_operator(&mut self, p: FockIndex, q: FockIndex) -> WeightedCompositionOperator {
        let phi = self.unit_map();
        self.leaf_operator_on(phi, p, q)
    }

    pub fn leaf_operator_on(&mut self, phi: AffineMap, p: FockIndex, q: FockIndex) -> WeightedCompositionOperator {
        let c = self.unimodular() * self.uniform(0.2, 2.0);
        let psi = EntireFunction::exp_linear(c, -phi.b().conj() * phi.a()).expect("finite");
        WeightedCompositionOperator::new(psi, phi, p, q).expect("nonzero weight")
    }

    /// A bounded operator `F^p → F^q`: a leaf operator with probability
    /// one quarter when `p ≤ q`, otherwise compact.
    pub fn bounded_operator(&mut self, p: FockIndex, q: FockIndex) -> WeightedCompositionOperator {
        if p.get() <= q.get() && self.rng.random_bool(0.25) {
            self.leaf_operator(p, q)
        } else {
            self.compact_operator(p, q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_deterministic() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.function(), b.function());
            assert_eq!(a.contraction(), b.contraction());
        }
    }

    #[test]
    fn ranges() {
        let mut s = Sampler::new(1);
        for _ in 0..200 {
            let phi = s.contraction();
            assert!((0.1..=0.9).contains(&phi.a().norm()));
            assert!(s.unit_map().is_unit_modulus());
            assert!(s.disc(2.0).norm() < 2.0);
        }
    }
}
