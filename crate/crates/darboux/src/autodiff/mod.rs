//! Forward-mode automatic differentiation for scalar fields.
//!
//! Derivatives are computed with dual numbers, one seeded direction at a
//! time; the phase spaces here are small (dimension `2n + 1` with modest
//! `n`), so forward mode is the right trade. Mixed second derivatives come
//! from nesting dual numbers rather than a separate Hessian path.

mod dual;
mod field;

pub use dual::{Dual, Scalar, D1, D2, D3};
pub use field::{
    fd_check, gradient, jacobian, EvalError, EvalScalar, FdFailure, FdReport, FieldFn,
    Polynomial, ScalarField, VectorField,
};

#[allow(unused_imports)]
pub(crate) use field::DynField;
