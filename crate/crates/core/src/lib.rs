//! Numerical engine for the p-adic Whittaker transform on `GL(n, Q_p)`.
//!
//! The geometric side lives on the valuation lattice `Z_{>=0}^{n-1}` (torus
//! cosets indexed by `v_k = -log_p |t_k|_p`), the spectral side on Satake
//! parameter tuples `alpha` with unit determinant. The crate provides:
//!
//! - [`laurent`]: exact multivariate Laurent arithmetic with constant-term
//!   extraction (the normalized torus integral).
//! - [`schur`]: Schur polynomial evaluation by bialternant, Jacobi-Trudi and
//!   tableau enumeration, plus the Cauchy identities.
//! - [`whittaker`]: Shintani's formula `W_alpha(t) = delta^{1/2}(t)
//!   s_{-log|t|_p}(alpha)` in valuation coordinates.
//! - [`transform`]: the forward transform (lattice sum against `W_alpha`),
//!   the inverse transform (constant term / torus quadrature), the
//!   regularized product pairing and the Plancherel pairings.
//! - [`lfactors`]: symmetric-power local L-factors for GL(2), their flat
//!   (inverse-transformed) closed forms for degree 1..4, and the contour
//!   quadrature oracle for any degree.
//! - [`verify`]: seeded property suites certifying the identities.

pub mod error;
pub mod laurent;
pub mod lfactors;
pub mod schur;
pub mod transform;
pub mod verify;
pub mod whittaker;

pub use error::{Result, WhittakerError};
pub use laurent::{Exponent, LaurentPoly};
pub use num_complex::Complex64;
pub use schur::{LatticeIndex, Partition, SpectralParams};
pub use transform::{CompactFunction, SeriesSum, SpectralFunction};
pub use whittaker::{PrimeContext, ValuationVector};

/// Deterministic pairwise (tree) reduction of a complex accumulation stream.
///
/// Keeps one partial sum per binary level, so the reduction tree depends only
/// on the number of pushed terms, never on chunking or thread count.
#[derive(Debug, Default, Clone)]
pub struct PairwiseSum {
    levels: Vec<Option<Complex64>>,
    count: u64,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, term: Complex64) {
        let mut carry = term;
        let mut level = 0usize;
        loop {
            if level == self.levels.len() {
                self.levels.push(Some(carry));
                break;
            }
            match self.levels[level].take() {
                None => {
                    self.levels[level] = Some(carry);
                    break;
                }
                Some(existing) => {
                    carry += existing;
                    level += 1;
                }
            }
        }
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn total(&self) -> Complex64 {
        self.levels
            .iter()
            .filter_map(|slot| *slot)
            .fold(Complex64::new(0.0, 0.0), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_sequential() {
        let mut tree = PairwiseSum::new();
        let mut seq = Complex64::new(0.0, 0.0);
        for k in 0..1000 {
            let term = Complex64::new(1.0 / (k as f64 + 1.0), (k as f64).sin());
            tree.push(term);
            seq += term;
        }
        assert!((tree.total() - seq).norm() < 1e-10);
        assert_eq!(tree.count(), 1000);
    }

    #[test]
    fn pairwise_sum_empty_is_zero() {
        assert_eq!(PairwiseSum::new().total(), Complex64::new(0.0, 0.0));
    }
}
