//! Uniform sampling of polynomials of degree at most n over Z/p^N.

use padic_roots::padic::PadicPolynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream index of sample `index` of the degree-n batch.
pub fn stream_index(n: u32, index: u64) -> u64 {
    ((n as u64) << 48) | (index & ((1 << 48) - 1))
}

/// Coefficient residues, constant term first, for the given stream.
pub fn sample_residues(p: u64, n: u32, precision: u32, seed: u64, stream: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let m = p.pow(precision);
    (0..=n).map(|_| rng.gen_range(0..m)).collect()
}

pub fn sample_polynomial(
    p: u64,
    n: u32,
    precision: u32,
    seed: u64,
    stream: u64,
) -> PadicPolynomial {
    PadicPolynomial::from_residues(
        p,
        &sample_residues(p, n, precision, seed, stream),
        precision,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = sample_residues(2, 5, 48, 11, stream_index(5, 3));
        assert_eq!(a, sample_residues(2, 5, 48, 11, stream_index(5, 3)));
        assert_ne!(a, sample_residues(2, 5, 48, 11, stream_index(5, 4)));
        assert_ne!(a, sample_residues(2, 5, 48, 12, stream_index(5, 3)));
        assert_eq!(a.len(), 6);
    }

    #[test]
    fn leading_coefficient_is_random() {
        let zeros = (0..2000)
            .filter(|&i| sample_residues(3, 2, 1, 5, i)[2] == 0)
            .count();
        assert!((500..850).contains(&zeros), "{zeros}");
    }
}
