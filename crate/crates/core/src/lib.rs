//! Certified enclosures for large real zeros of cylinder functions and Airy
//! combinations, built from enveloping asymptotic expansions, together with
//! an independent high-precision oracle used to check them.

pub mod coeffs;
pub mod error;
pub mod exact;
pub mod specfun;
pub mod asymp;
pub mod report;
pub mod quadcheck;
pub mod zeros;

pub use error::{Error, Result};
