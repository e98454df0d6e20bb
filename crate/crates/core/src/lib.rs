//! Frobenius-type series solutions for second-order linear PDEs in two
//! variables with a regular singularity at the origin,
//!
//! ```text
//! A x^2 z_xx + B xy z_xy + C y^2 z_yy + x a(x,y) z_x + y b(x,y) z_y + c(x,y) z = 0,
//! ```
//!
//! where the exponents `(r0, s0)` of `x^r0 y^s0 sum D_Q x^q1 y^q2` lie on the
//! indicial conic `P(r, s) = 0`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod euler;
pub mod expr_parser;
pub mod frobenius;
pub mod indicial;
pub mod multiseries;
pub mod verify;

pub use multiseries::{CSeries2, Complex, MultiIndex};
