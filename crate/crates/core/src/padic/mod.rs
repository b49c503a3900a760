//! Fixed-precision arithmetic in Q_p and its cataloged extensions.

pub mod ext;
pub mod linalg;
pub mod number;
pub mod poly;
pub mod ring;
pub mod zp;

pub use ext::{Distance, ExtElement, IndexValue};
pub use linalg::PadicMatrix;
pub use number::PadicNumber;
pub use poly::{reverse_poly, PadicPolynomial};
pub use ring::OkRing;
pub use zp::{default_precision, max_precision, Zp};

/// Digits kept below the working precision before any zero or rank
/// decision is treated as certified.
pub const SAFETY_MARGIN: i64 = 8;
