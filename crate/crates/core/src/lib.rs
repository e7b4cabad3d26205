//! Nash approximation of holomorphic solutions of polynomial systems.
//!
//! Given a polynomial system `Q(x, y) = 0` (or an algebraic variety `V`) and the
//! truncated power series of a holomorphic solution at the origin, the crate
//! produces, for each approximation index `ν`, algebraic (Nash) mappings that
//! still satisfy the system, each component paired with a unitary annihilating
//! polynomial over `C[x]`.
//!
//! Layout:
//!
//! * [`poly`]: exact sparse polynomials over the Gaussian rationals, resultants,
//!   discriminants, squarefree parts and linear changes of variables.
//! * [`number`] and [`jet`]: truncated power series with approximate complex
//!   coefficients, Weierstrass preparation/division, the root-correction step and
//!   Newton lifting.
//! * [`elim`]: Gröbner bases, elimination, properness certificates, optimal
//!   polynomials and generic fiber counts.
//! * [`genericity`]: seeded coordinate changes and linear-form selection.
//! * [`approx`]: the recursive approximation pipeline.
//! * [`verify`]: independent recomputation of every reported property.

pub mod approx;
pub mod elim;
pub mod genericity;
pub mod jet;
pub mod number;
pub mod poly;
pub mod verify;

pub use approx::{
    approximate_into_variety, approximate_solution, ApproxConfig, ApproxError, ApproxProblem,
    ApproxResult, NashFunction,
};
pub use elim::{IdealBasis, MonomialOrder, VarietySpec};
pub use jet::{Jet, JetCtx, JetPoly};
pub use number::Cx;
pub use poly::{GaussRat, MultiPoly, UniOverPoly};
pub use verify::{verify_result, Report};
