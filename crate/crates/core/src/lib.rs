//! Exact symbolic computation with integro-differential operators.
//!
//! The crate solves, composes and factors linear ordinary boundary
//! problems whose number of boundary conditions may exceed the order of
//! the differential operator. Solution operators of such problems are
//! generalized inverses; the library computes them exactly, together
//! with compatibility conditions on the forcing function, decides when
//! products of solution operators solve the composite problem, and
//! splits problems along factorizations of the differential operator.
//!
//! All arithmetic is exact: scalars live in the field generated by
//! rational multiples of `exp(r)` with rational `r`, coefficient
//! functions are fractions of exponential polynomials.

pub mod algorithms;
pub mod constants;
pub mod error;
pub mod funcalg;
pub mod idop;
pub mod linalg;
pub mod problems;

pub use algorithms::{
    check_reverse_order_law, compose, default_candidate_pool, factor_left_regular,
    factor_right_regular, funcspace_intersect, inverse_image, is_outer_inverse,
    rref_conditions,
};
pub use constants::{rat, rat_int, ExpConstant, ExpSum, Rat};
pub use error::{Error, Result};
pub use funcalg::{ExpPolynomial, FunctionExpr, Monomial, XPoly};
pub use idop::{
    fundamental_right_inverse, wronskian_matrix, BndOp, BndTerm, BoundaryCondition, IdOperator,
    Kernel,
};
pub use linalg::KMatrix;
pub use problems::{
    auto_fundamental_system, combine_conditions, combine_functions, compatibility_conditions,
    cond_coordinates, evaluation_matrix, func_coordinates, intersect_dual, intersect_primal,
    BoundaryProblem, CondKey, CondSpace, FuncSpace,
};
