//! Weighted composition operators `W_{ψ,φ} f = ψ·(f∘φ)` between Fock spaces
//! `F^p(ℂ)`: norms, boundedness and compactness decisions, operator and
//! essential norm brackets, compact differences and path components.

pub mod criteria;
pub mod fock;
mod maximize;
pub mod operator;
pub mod quadrature;
pub mod sampling;
pub mod symbol;
pub mod topology;
pub mod verify;

pub use criteria::{classify, Classification, CriteriaError, Verdict};
pub use fock::{fock_norm, kernel, sup_norm, FockError, NormValue};
pub use operator::{OperatorError, WeightedCompositionOperator};
pub use quadrature::{IntegralResult, QuadratureError, QuadratureSpec};
pub use symbol::{AffineMap, EntireFunction, FockIndex, ParseError, SymbolError};
pub use topology::TopologyError;

use thiserror::Error;

/// Any error surfaced by the library, with a stable module-qualified code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Broad failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Hypothesis,
    Numeric,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "symbol.parse",
            Error::Symbol(_) => "symbol.invalid",
            Error::Quadrature(e) => quadrature_code(e),
            Error::Fock(FockError::BoundViolated { .. }) => "fock.bound_violated",
            Error::Fock(FockError::InvalidIndices { .. }) => "fock.invalid_indices",
            Error::Fock(FockError::Quadrature(e)) => quadrature_code(e),
            Error::Operator(e) => operator_code(e),
            Error::Criteria(CriteriaError::HypothesisViolated(_)) => "criteria.hypothesis_violated",
            Error::Criteria(CriteriaError::ZeroSymbol) => "criteria.zero_symbol",
            Error::Criteria(CriteriaError::Quadrature(e)) => quadrature_code(e),
            Error::Criteria(CriteriaError::Operator(e)) => operator_code(e),
            Error::Topology(TopologyError::NotBounded) => "topology.not_bounded",
            Error::Topology(TopologyError::HypothesisViolated(_)) => "topology.hypothesis_violated",
            Error::Topology(TopologyError::Criteria(e)) => Error::Criteria(e.clone()).code(),
            Error::Topology(TopologyError::Operator(e)) => operator_code(e),
            Error::Topology(TopologyError::Quadrature(e)) => quadrature_code(e),
        }
    }

    pub fn class(&self) -> ErrorClass {
        let code = self.code();
        if code.starts_with("symbol.")
            || code.ends_with("invalid_spec")
            || code.ends_with("zero_symbol")
            || code.ends_with("invalid_order")
        {
            ErrorClass::Input
        } else if code.ends_with("hypothesis_violated")
            || code.ends_with("not_bounded")
            || code.ends_with("invalid_indices")
        {
            ErrorClass::Hypothesis
        } else {
            ErrorClass::Numeric
        }
    }
}

fn quadrature_code(e: &QuadratureError) -> &'static str {
    match e {
        QuadratureError::TailNotDominated { .. } => "quadrature.tail_not_dominated",
        QuadratureError::ToleranceNotMet { .. } => "quadrature.tolerance_not_met",
        QuadratureError::Overflow => "quadrature.overflow",
        QuadratureError::InvalidSpec(_) => "quadrature.invalid_spec",
    }
}

fn operator_code(e: &OperatorError) -> &'static str {
    match e {
        OperatorError::ZeroSymbol => "operator.zero_symbol",
        OperatorError::TailLoss { .. } => "operator.tail_loss",
        OperatorError::NonConvergence { .. } => "operator.non_convergence",
        OperatorError::InvalidOrder(_) => "operator.invalid_order",
        OperatorError::Quadrature(e) => quadrature_code(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_qualified() {
        let e: Error = TopologyError::NotBounded.into();
        assert_eq!(e.code(), "topology.not_bounded");
        assert_eq!(e.class(), ErrorClass::Hypothesis);
        let e: Error = OperatorError::Quadrature(QuadratureError::Overflow).into();
        assert_eq!(e.code(), "quadrature.overflow");
        assert_eq!(e.class(), ErrorClass::Numeric);
        let e: Error = symbol::parse_symbol("z^").unwrap_err().into();
        assert_eq!(e.class(), ErrorClass::Input);
    }
}
