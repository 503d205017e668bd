//! Symbolic pullbacks of smooth functions along superfields.
//!
//! A superfield is a tuple of even elements of a Grassmann algebra with
//! coefficients. Pulling a function back along it is a finite Taylor
//! expansion around the body. This crate computes that expansion exactly,
//! through several equivalent routes, and checks it numerically.

pub mod djops;
pub mod error;
pub mod expr;
pub mod grassmann;
pub mod oracle;
pub mod scalar;
pub mod supercalc;

pub use error::{Error, Result};
pub use grassmann::{concat_sign, epsilon, GeneratorSet, MultiIndex, ParityClass, SignedIndex};
pub use scalar::{FuncDeriv, Function, Poly, Rational, SPolynomial, SuperScalar};
pub use supercalc::{exp_xi_apply, pullback_taylor, reconstruct_xi, ProductForm, Superfield, XiField};
