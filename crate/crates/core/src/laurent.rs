//! Multivariate Laurent polynomials over complex coefficients.
//!
//! A rank-`n` spectral function, after the substitution
//! `beta_n = 1/(beta_1 ... beta_{n-1})`, is a finitely supported map from
//! integer exponent vectors of length `n-1` to complex coefficients. The
//! constant-term functional realizes the normalized torus integral
//! `(1/(2 pi i))^{n-1} \oint ... d beta / beta`: it reads the coefficient of
//! the zero exponent.
//!
//! The substitution itself is performed by the callers (see
//! [`crate::schur::schur_laurent`]); this module is a plain Laurent ring in
//! `n-1` variables. Exponent bookkeeping is exact; coefficients are
//! double-precision complex, with magnitudes below `1e-15` of the working
//! scale pruned after every ring operation.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Result, WhittakerError};

const PRUNE_REL: f64 = 1e-15;

/// Integer exponent vector of length `rank - 1`; entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Box<[i32]>);

impl Exponent {
    pub fn new(e: Vec<i32>) -> Self {
        Exponent(e.into_boxed_slice())
    }

    pub fn zero(vars: usize) -> Self {
        Exponent(vec![0; vars].into_boxed_slice())
    }

    /// Standard basis vector: exponent 1 on variable `index`, 0 elsewhere.
    pub fn unit(vars: usize, index: usize) -> Self {
        let mut e = vec![0; vars];
        e[index] = 1;
        Exponent(e.into_boxed_slice())
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    fn negated(&self) -> Exponent {
        Exponent(self.0.iter().map(|e| -e).collect())
    }
}

/// Finitely supported map `Z^{n-1} -> C` in the torus variables
/// `beta_1, ..., beta_{n-1}` of a rank-`n` spectral context.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    terms: BTreeMap<Exponent, Complex64>,
    rank: usize,
}

impl LaurentPoly {
    /// The zero polynomial in a rank-`n` context (`n - 1` variables).
    pub fn zero(rank: usize) -> Self {
        assert!(rank >= 2, "rank must be at least 2");
        LaurentPoly {
            terms: BTreeMap::new(),
            rank,
        }
    }

    pub fn constant(rank: usize, c: Complex64) -> Self {
        Self::monomial(rank, Exponent::zero(rank - 1), c)
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(rank: usize, exponent: Exponent, coeff: Complex64) -> Self {
        assert!(rank >= 2, "rank must be at least 2");
        assert_eq!(exponent.len(), rank - 1, "exponent length must be rank - 1");
        let mut terms = BTreeMap::new();
        if coeff.norm() != 0.0 {
            terms.insert(exponent, coeff);
        }
        LaurentPoly { terms, rank }
    }

    /// The variable `beta_{index+1}` for `index < rank - 1`.
    pub fn variable(rank: usize, index: usize) -> Self {
        Self::monomial(
            rank,
            Exponent::unit(rank - 1, index),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn from_terms<I>(rank: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Complex64)>,
    {
        let mut out = Self::zero(rank);
        for (e, c) in terms {
            assert_eq!(e.len(), rank - 1, "exponent length must be rank - 1");
            let entry = out.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
        }
        out.terms.retain(|_, c| c.norm() != 0.0);
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of torus variables, `rank - 1`.
    pub fn vars(&self) -> usize {
        self.rank - 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Complex64 {
        self.terms
            .get(e)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn max_coeff_mag(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, c| c.norm() > threshold);
    }

    fn check_rank(&self, other: &LaurentPoly) -> Result<()> {
        if self.rank != other.rank {
            return Err(WhittakerError::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        Ok(())
    }

    /// Termwise sum. Coefficients below `1e-15` of the largest input
    /// coefficient magnitude are pruned.
    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &LaurentPoly) -> LaurentPoly {
        debug_assert_eq!(self.rank, other.rank);
        let scale = self.max_coeff_mag().max(other.max_coeff_mag());
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
        }
        let mut out = LaurentPoly {
            terms,
            rank: self.rank,
        };
        out.prune(PRUNE_REL * scale);
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Distributive product; the support is the Minkowski sum of supports.
    pub fn mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_rank(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &LaurentPoly) -> LaurentPoly {
        debug_assert_eq!(self.rank, other.rank);
        let mut terms: BTreeMap<Exponent, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.add(eb);
                let entry = terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
                *entry += ca * cb;
            }
        }
        let mut out = LaurentPoly {
            terms,
            rank: self.rank,
        };
        let scale = out.max_coeff_mag();
        out.prune(PRUNE_REL * scale);
        out
    }

    pub fn scaled(&self, c: Complex64) -> LaurentPoly {
        if c.norm() == 0.0 {
            return LaurentPoly::zero(self.rank);
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
            rank: self.rank,
        }
    }

    /// Coefficient of the zero exponent: the normalized integral of the
    /// polynomial over the unit torus.
    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&Exponent::zero(self.vars()))
    }

    /// Direct evaluation `sum_e c_e prod_i point_i^{e_i}`.
    ///
    /// Fails if a coordinate is zero while a negative exponent on that axis
    /// is present.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.vars() {
            return Err(WhittakerError::RankMismatch {
                expected: self.vars(),
                got: point.len(),
            });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = *c;
            for (x, &k) in point.iter().zip(e.as_slice()) {
                if x.norm() == 0.0 && k < 0 {
                    return Err(WhittakerError::ZeroCoordinate);
                }
                term *= x.powi(k);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Complex conjugation on the unit torus: conjugate each coefficient and
    /// negate each exponent (since `conj(beta^e) = beta^{-e}` for `|beta|=1`).
    pub fn conj_invert(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.negated(), c.conj()))
                .collect(),
            rank: self.rank,
        }
    }

    /// Largest absolute exponent present on any axis (0 for the zero
    /// polynomial). A torus quadrature with more than this many nodes per
    /// circle resolves every mode exactly.
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.as_slice().iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn b1(rank: usize) -> LaurentPoly {
        LaurentPoly::variable(rank, 0)
    }

    fn b1_inv(rank: usize) -> LaurentPoly {
        LaurentPoly::monomial(rank, Exponent::new(vec![-1]), c(1.0, 0.0))
    }

    #[test]
    fn add_cancels_to_empty() {
        let sum = b1(2).add(&b1(2).scaled(c(-1.0, 0.0))).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn add_disjoint_supports() {
        let p = LaurentPoly::one(2).add(&b1(2)).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.constant_term(), c(1.0, 0.0));
        assert_eq!(p.coeff(&Exponent::new(vec![1])), c(1.0, 0.0));
    }

    #[test]
    fn add_merges_coefficients() {
        // (b + 1/b) + (1/b) = b + 2/b
        let p = b1(2).add(&b1_inv(2)).unwrap().add(&b1_inv(2)).unwrap();
        assert_eq!(p.coeff(&Exponent::new(vec![1])), c(1.0, 0.0));
        assert_eq!(p.coeff(&Exponent::new(vec![-1])), c(2.0, 0.0));
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn add_rank_mismatch_rejected() {
        let err = LaurentPoly::one(2).add(&LaurentPoly::one(3)).unwrap_err();
        assert!(matches!(err, WhittakerError::RankMismatch { .. }));
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = b1(2).sub(&b1_inv(2)).unwrap();
        let b = b1(2).add(&b1_inv(2)).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeff(&Exponent::new(vec![2])), c(1.0, 0.0));
        assert_eq!(p.coeff(&Exponent::new(vec![-2])), c(-1.0, 0.0));
        assert_eq!(p.num_terms(), 2, "middle terms must cancel");
    }

    #[test]
    fn mul_by_scalar_constant() {
        let p = LaurentPoly::constant(2, c(7.0, 0.0))
            .mul(&LaurentPoly::one(2))
            .unwrap();
        assert_eq!(p.constant_term(), c(7.0, 0.0));
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn mul_binomial_square() {
        let p = LaurentPoly::one(2).add(&b1(2)).unwrap();
        let sq = p.mul(&p).unwrap();
        assert_eq!(sq.constant_term(), c(1.0, 0.0));
        assert_eq!(sq.coeff(&Exponent::new(vec![1])), c(2.0, 0.0));
        assert_eq!(sq.coeff(&Exponent::new(vec![2])), c(1.0, 0.0));
    }

    #[test]
    fn constant_term_reads_zero_exponent() {
        let p = b1(2)
            .add(&LaurentPoly::constant(2, c(3.0, 0.0)))
            .unwrap()
            .add(&b1_inv(2))
            .unwrap();
        assert_eq!(p.constant_term(), c(3.0, 0.0));
    }

    #[test]
    fn constant_term_absent_is_zero() {
        let p = LaurentPoly::monomial(3, Exponent::new(vec![1, -1]), c(1.0, 0.0));
        assert_eq!(p.constant_term(), c(0.0, 0.0));
    }

    #[test]
    fn eval_square() {
        let p = LaurentPoly::monomial(2, Exponent::new(vec![2]), c(1.0, 0.0));
        assert_eq!(p.eval(&[c(2.0, 0.0)]).unwrap(), c(4.0, 0.0));
    }

    #[test]
    fn eval_empty_is_zero() {
        assert_eq!(
            LaurentPoly::zero(3)
                .eval(&[c(1.0, 2.0), c(-5.0, 0.1)])
                .unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn eval_at_i_cancels() {
        // 1 + b + 1/b at b = i is 1 since i + 1/i = 0.
        let p = LaurentPoly::one(2)
            .add(&b1(2))
            .unwrap()
            .add(&b1_inv(2))
            .unwrap();
        let v = p.eval(&[c(0.0, 1.0)]).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_zero_coordinate_with_negative_exponent_errors() {
        let err = b1_inv(2).eval(&[c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, WhittakerError::ZeroCoordinate));
    }

    #[test]
    fn conj_invert_matches_pointwise_conjugation_on_torus() {
        let p = LaurentPoly::from_terms(
            2,
            [
                (Exponent::new(vec![2]), c(1.0, -0.5)),
                (Exponent::new(vec![-1]), c(0.25, 3.0)),
            ],
        );
        let q = p.conj_invert();
        for k in 0..7 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 7.0;
            let z = Complex64::from_polar(1.0, theta);
            let lhs = q.eval(&[z]).unwrap();
            let rhs = p.eval(&[z]).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(((-6i32..=6), (-2.0f64..2.0), (-2.0f64..2.0)), 0..6).prop_map(
            |terms| {
                LaurentPoly::from_terms(
                    2,
                    terms
                        .into_iter()
                        .map(|(e, re, im)| (Exponent::new(vec![e]), c(re, im))),
                )
            },
        )
    }

    proptest! {
        // Trapezoid averaging over the torus is exact on trigonometric
        // polynomials once the grid outresolves the exponent spread.
        #[test]
        fn torus_average_equals_constant_term(p in small_poly()) {
            let n = (2 * p.max_abs_exponent() + 2).max(4) as usize;
            let mut avg = c(0.0, 0.0);
            for k in 0..n {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                avg += p.eval(&[Complex64::from_polar(1.0, theta)]).unwrap();
            }
            avg /= n as f64;
            let ct = p.constant_term();
            let scale = p.iter().map(|(_, c)| c.norm()).sum::<f64>().max(1.0);
            prop_assert!((avg - ct).norm() <= 1e-12 * scale);
        }

        #[test]
        fn mul_commutes(a in small_poly(), b in small_poly()) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            prop_assert_eq!(ab.num_terms(), ba.num_terms());
            let scale = ab.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
            for (e, cab) in ab.iter() {
                prop_assert!((cab - ba.coeff(e)).norm() <= 1e-13 * scale);
            }
        }

        #[test]
        fn mul_associates(a in small_poly(), b in small_poly(), q in small_poly()) {
            let left = a.mul(&b).unwrap().mul(&q).unwrap();
            let right = a.mul(&b.mul(&q).unwrap()).unwrap();
            let scale = left.iter().map(|(_, c)| c.norm()).fold(1.0, f64::max);
            for (e, cl) in left.iter() {
                prop_assert!((cl - right.coeff(e)).norm() <= 1e-13 * scale);
            }
            for (e, cr) in right.iter() {
                prop_assert!((cr - left.coeff(e)).norm() <= 1e-13 * scale);
            }
        }

        #[test]
        fn constant_term_is_linear(a in small_poly(), b in small_poly(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let k = c(re, im);
            let lhs = a.add(&b.scaled(k)).unwrap().constant_term();
            let rhs = a.constant_term() + k * b.constant_term();
            let scale = (a.constant_term().norm() + (k * b.constant_term()).norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() <= 1e-13 * scale);
        }
    }
}
