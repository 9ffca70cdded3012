//! Almost periodic Gevrey pseudodifferential calculus at desk scale.
//!
//! The crate works on finite trigonometric polynomials with exact rational
//! frequencies. Everything that can be done exactly (operator action,
//! symbol products, amplitude reduction, transposes) is done exactly; the
//! remaining checks (symbol class estimates, hypoellipticity exponents,
//! coefficient decay) are sample based and report fitted constants.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line interface live in the `apcalc` crate.

#![cfg_attr(not(test), no_std)]
// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bohr;
pub mod calculus;
pub mod counterexample;
pub mod error;
pub mod freq;
pub mod hypoell;
pub mod operators;
pub mod regularity;
pub mod sampling;
pub mod scalar;
pub mod solve;
pub mod symexpr;
pub mod trigpoly;

pub use error::{Error, Result};
pub use freq::{Basis, BasisElem, Frequency, MultiIndex};
pub use scalar::{Coeff, Exact, Rational};
pub use symexpr::SymbolExpr;
pub use trigpoly::{NormParams, TrigPoly};

pub use num_complex::Complex64;
