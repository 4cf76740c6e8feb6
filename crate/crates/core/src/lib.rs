//! Joint densities of partial sums of ordered i.i.d. non-negative random
//! variables.
//!
//! The library evaluates the joint probability density of partial sums of
//! the order statistics `g_{1:K} >= g_{2:K} >= ... >= g_{K:K}` through the
//! truncated moment-generating kernels `c`, `e` and `mu`. Closed forms are
//! available for exponential variables ([`exact_exp`]); any distribution with
//! a closed-form cdf can be handled through numerical Laplace inversion
//! ([`generic_joint`]). A Monte Carlo oracle ([`mc_oracle`]) and a set of
//! verification suites ([`verify`]) check the two against each other.

pub mod apps;
pub mod density;
pub mod distributions;
pub mod error;
pub mod exact_exp;
pub mod generic_joint;
pub mod ilt;
pub mod kernels;
pub mod mc_oracle;
pub mod laplace_terms;
pub mod numeric;
pub mod partition;
pub mod qmc;
pub mod quadrature;
pub mod reduction;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
