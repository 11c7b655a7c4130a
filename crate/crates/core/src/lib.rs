//! Finite-basis spectra of the radial Dirac operator (κ = −1) and the
//! detection of spurious eigenvalues in the spectral gap.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod config;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod free;
pub mod model;
pub mod quadrature;
pub mod radial;
pub mod run;
pub mod scenario;

pub use error::{Error, Result};
