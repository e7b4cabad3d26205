//! Gröbner bases, elimination and the projection data of a variety.

mod groebner;
mod order;
mod variety;

use thiserror::Error;

use crate::poly::PolyError;

pub use groebner::{eliminate, groebner_basis, groebner_basis_in, reduce_mod, s_polynomial, IdealBasis};
pub use order::MonomialOrder;
pub use variety::{
    coordinate_form, generic_fiber_count, optimal_polynomial, projection_eliminant, properness_check, properness_order, Properness,
    VarietyJson, VarietySpec, BASE_POINT_BOUND, DEFAULT_FIBER_RETRIES,
};
pub(crate) use variety::optimal_polynomial_unchecked;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElimError {
    #[error("empty generator list")]
    EmptyInput,
    #[error("expected {expected} variables, found {found}")]
    VarCount { expected: usize, found: usize },
    #[error("invalid monomial order: {0}")]
    BadOrder(String),
    #[error("order does not eliminate exactly the variables {0:?}")]
    OrderMismatch(Vec<usize>),
    #[error("projection is not certified proper (fiber variable {fiber} has no monic witness)")]
    NotProper { fiber: usize },
    #[error("no eliminant monic in z was found")]
    NoMonicEliminant,
    #[error("the variety is empty")]
    EmptyVariety,
    #[error("no admissible base point after {0} tries")]
    RetriesExhausted(usize),
    #[error("linear form has {found} coefficients, expected {expected}")]
    FormLength { expected: usize, found: usize },
    #[error("invalid variety: {0}")]
    Spec(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
