//! Numerics for the log-Gamma directed polymer.
//!
//! The crate evaluates the Laplace transform `E[exp(-u Z(n, N))]` of the
//! polymer partition function along four independent routes (Monte Carlo,
//! the N-fold Sklyanin contour integral, the Nyström discretization of the
//! Fredholm determinant `det(I + K_u)`, and its N x N finite-rank reduction),
//! together with the steepest-descent machinery behind the GUE Tracy-Widom
//! fluctuation limit.
//!
//! Everything here is pure computation. The crate is `no_std` (with `alloc`)
//! when built without the default `std` feature; `std` adds rayon-backed
//! parallel assembly and sampling, which never changes results.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is the idiom used for rejecting NaN along with bad values;
// reference constants keep the digits they were computed with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod asymptotics;
pub mod contour;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod polymer;
pub mod quadrature;
pub mod specfun;

mod parallel;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for the crate-wide complex scalar.
pub type C64 = Complex64;

pub(crate) mod prelude {
    pub use alloc::{format, vec, vec::Vec};
    #[cfg(not(feature = "std"))]
    pub use num_traits::Float;

    pub use crate::{Error, Result, C64};

    pub const I: crate::C64 = crate::C64::new(0.0, 1.0);
    /// `1 / (2 pi i)`, the path-measure normalization used throughout.
    pub const INV_TWO_PI_I: crate::C64 = crate::C64::new(0.0, -1.0 / core::f64::consts::TAU);
}
