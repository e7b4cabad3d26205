//! Exact polynomial arithmetic over the Gaussian rationals.

mod gauss;
mod linear;
mod multi;
mod text;
mod univar;

pub use gauss::GaussRat;
pub(crate) use gauss::parse_rational;
pub use linear::{
    identity_matrix, int_matrix_inverse, int_matrix_to_rat, mat_mul_int, rat_matrix_inverse,
    substitute_linear, substitute_linear_rat, RatMatrix,
};
pub(crate) use linear::rat_mat_mul;
pub use multi::{Monomial, MultiPoly};
pub use text::{format_poly, parse_poly};
pub use univar::{
    discriminant, divmod_in_var, is_squarefree_in, poly_gcd, pseudo_remainder, resultant, squarefree_part,
    UniOverPoly,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("variable index {var} out of range for {nvars} variables")]
    VarOutOfRange { var: usize, nvars: usize },
    #[error("divisor is not monic in variable {0}")]
    NotMonic(usize),
    #[error("both polynomials are constant in variable {0}")]
    ConstantInVar(usize),
    #[error("polynomial has degree 0 in its distinguished variable")]
    DegreeZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("matrix shape {rows}x{cols} does not match {nvars} variables")]
    MatrixShape { rows: usize, cols: usize, nvars: usize },
    #[error("parse error: {0}")]
    Parse(String),
}
