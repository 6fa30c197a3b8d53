//! The unramified Whittaker function in valuation coordinates.
//!
//! A torus coset is identified with its valuation vector
//! `v_k = -log_p |t_k|_p`; unit parts are invisible to every function
//! implemented here, so the state space is the integer lattice. Shintani's
//! formula evaluates
//!
//! `W_alpha(v) = delta^{1/2}(v) s_v(alpha)` for `v` in the nonnegative cone,
//! and 0 otherwise, with `delta(v) = p^{-sum_k v_k k(n-k)}`.
//!
//! `delta^{1/2}` is an exact half-integer power of `p`, computed as
//! `p^{-S/2}` from the integer exponent `S` rather than by a floating square
//! root, so golden values reproduce bit-for-bit.

use num_complex::Complex64;

use crate::error::{Result, WhittakerError};
use crate::laurent::LaurentPoly;
use crate::schur::{schur_jacobi_trudi, schur_laurent, LatticeIndex, SpectralParams};

/// Prime and rank of the working group `GL(n, Q_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    n: usize,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeContext {
    pub fn new(p: u64, n: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(WhittakerError::NotPrime(p));
        }
        if n < 2 {
            return Err(WhittakerError::InvalidRank(n));
        }
        Ok(PrimeContext { p, n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p^e` for a possibly half-integer exponent given as `2e`.
    pub(crate) fn power_half(&self, twice_exponent: i64) -> f64 {
        (self.p as f64).powf(twice_exponent as f64 / 2.0)
    }
}

/// Integer vector `v` with `v_k = -log_p |t_k|_p`; entries may be negative
/// (off the Whittaker support cone).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValuationVector(Vec<i64>);

impl ValuationVector {
    pub fn new(v: Vec<i64>) -> Self {
        ValuationVector(v)
    }

    pub fn zero(rank: usize) -> Self {
        assert!(rank >= 2);
        ValuationVector(vec![0; rank - 1])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len() + 1
    }

    /// True when every entry is nonnegative (`t_i` integral).
    pub fn in_cone(&self) -> bool {
        self.0.iter().all(|&v| v >= 0)
    }

    /// Reinterpret as a transform lattice index; fails off the cone.
    pub fn to_lattice_index(&self) -> Result<LatticeIndex> {
        if !self.in_cone() {
            return Err(WhittakerError::NegativeValuation);
        }
        Ok(LatticeIndex::new(
            self.0.iter().map(|&v| v as u32).collect(),
        ))
    }
}

impl From<&LatticeIndex> for ValuationVector {
    fn from(m: &LatticeIndex) -> Self {
        ValuationVector(m.as_slice().iter().map(|&x| x as i64).collect())
    }
}

/// `S = sum_k v_k k(n-k)`, the integer exponent with `delta(v) = p^{-S}`.
pub fn delta_exponent(v: &ValuationVector, ctx: &PrimeContext) -> i64 {
    assert_eq!(
        v.rank(),
        ctx.n(),
        "valuation vector rank must match context"
    );
    let n = ctx.n() as i64;
    v.as_slice()
        .iter()
        .enumerate()
        .map(|(i, &vk)| {
            let k = i as i64 + 1;
            vk * k * (n - k)
        })
        .sum()
}

/// Modular factor `delta(v) = prod_k |t_k|_p^{k(n-k)} = p^{-sum v_k k(n-k)}`.
pub fn delta(v: &ValuationVector, ctx: &PrimeContext) -> f64 {
    ctx.power_half(-2 * delta_exponent(v, ctx))
}

/// `delta^{1/2}(v) = p^{-S/2}` with integer `S`.
pub fn delta_sqrt(v: &ValuationVector, ctx: &PrimeContext) -> f64 {
    ctx.power_half(-delta_exponent(v, ctx))
}

/// Shintani's formula: `delta^{1/2}(v) s_v(alpha)` on the cone, 0 off it.
/// Normalized so that the value at the identity coset (`v = 0`) is 1.
pub fn whittaker_eval(a: &SpectralParams, v: &ValuationVector, ctx: &PrimeContext) -> Complex64 {
    assert_eq!(a.n(), ctx.n(), "parameter count must match context rank");
    let m = match v.to_lattice_index() {
        Ok(m) => m,
        Err(_) => return Complex64::new(0.0, 0.0),
    };
    schur_jacobi_trudi(&m, a) * delta_sqrt(v, ctx)
}

/// Exact symbolic Whittaker value `delta^{1/2}(v) s_v(beta)` (reciprocal
/// alphabet with `inverted = true`) on the unit-determinant torus.
///
/// Off-cone valuations are an error here; callers branch to the zero
/// function instead.
pub fn whittaker_laurent(
    v: &ValuationVector,
    inverted: bool,
    ctx: &PrimeContext,
) -> Result<LaurentPoly> {
    let m = v.to_lattice_index()?;
    let poly = schur_laurent(&m, inverted, ctx.n())?;
    Ok(poly.scaled(Complex64::new(delta_sqrt(v, ctx), 0.0)))
}
