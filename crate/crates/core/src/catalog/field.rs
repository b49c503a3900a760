use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ramification {
    Base,
    Unramified,
    TotallyRamified,
}

/// A finite extension K/Q_p given by a monic defining polynomial whose
/// power basis is an integral basis (unramified lift or Eisenstein).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionField {
    pub id: String,
    pub p: u64,
    pub r: u32,
    pub e: u32,
    pub f: u32,
    /// Coefficients `g_0, …, g_{r-1}, 1`.
    pub poly: Vec<i64>,
    pub disc_valuation: u32,
    pub aut_count: u32,
    pub galois: bool,
}

impl ExtensionField {
    pub fn base(p: u64) -> Self {
        ExtensionField {
            id: format!("Q{p}"),
            p,
            r: 1,
            e: 1,
            f: 1,
            poly: vec![0, 1],
            disc_valuation: 0,
            aut_count: 1,
            galois: true,
        }
    }

    pub fn ramification(&self) -> Ramification {
        if self.r == 1 {
            Ramification::Base
        } else if self.e == 1 {
            Ramification::Unramified
        } else {
            Ramification::TotallyRamified
        }
    }

    pub fn is_unramified(&self) -> bool {
        self.e == 1
    }

    /// Number of embedded copies of K in an algebraic closure.
    pub fn embedded_multiplicity(&self) -> u32 {
        self.r / self.aut_count
    }

    /// ‖D_K‖ = p^{-disc_valuation}.
    pub fn disc_norm(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(self.p), self.disc_valuation as usize),
        )
    }

    pub fn q(&self) -> u64 {
        self.p
    }
}
