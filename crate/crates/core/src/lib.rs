//! Exact and fixed-precision tools for the roots of random p-adic
//! polynomials in finite extensions of Q_p.

pub mod asymptotics;
pub mod catalog;
pub mod census;
pub mod density;
pub mod error;
pub mod padic;

pub use error::{Error, Result};
