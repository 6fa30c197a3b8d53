//! The Whittaker transform and its inverse.
//!
//! Forward: `h^#(alpha) = sum_v h(v) W_alpha(v) weight(v)`, a lattice sum in
//! which the measure weight `1/delta(v)` cancels half the modular factor, so
//! each term is `h(v) delta^{-1/2}(v) s_v(alpha)`. The multiplicative shell
//! of valuation `v` carries mass 1.
//!
//! Inverse: `H^b(v)` is the normalized torus integral of
//! `H(beta) W_{1/beta}(v) prod_{i != j} (beta_i - beta_j)`, divided by `n!`.
//! For exact Laurent data the integral is a constant-term read; for black-box
//! evaluators it is a tensor-product trapezoid rule, which converges
//! geometrically for analytic integrands and is exact once the node count
//! outresolves the exponent spread.
//!
//! All lattice and grid accumulations run through [`crate::PairwiseSum`], so
//! results are reproducible to well below the advertised tolerances.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Result, WhittakerError};
use crate::laurent::LaurentPoly;
use crate::schur::{
    cauchy_tail_bound, complete_homogeneous, jacobi_trudi_from_h, schur_jacobi_trudi,
    schur_laurent, weyl_dimension, LatticeIndex, SpectralParams,
};
use crate::whittaker::{delta_exponent, whittaker_laurent, PrimeContext, ValuationVector};

pub use crate::schur::SeriesSum;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Finitely supported geometric-side function on the valuation lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactFunction {
    support: BTreeMap<LatticeIndex, Complex64>,
    ctx: PrimeContext,
}

impl CompactFunction {
    pub fn new(ctx: PrimeContext) -> Self {
        CompactFunction {
            support: BTreeMap::new(),
            ctx,
        }
    }

    /// Indicator of a single lattice point.
    pub fn indicator(ctx: PrimeContext, m: LatticeIndex) -> Self {
        let mut f = Self::new(ctx);
        f.set(m, ONE);
        f
    }

    pub fn set(&mut self, m: LatticeIndex, value: Complex64) {
        assert_eq!(
            m.rank(),
            self.ctx.n(),
            "lattice index rank must match context"
        );
        if value.norm() == 0.0 {
            self.support.remove(&m);
        } else {
            self.support.insert(m, value);
        }
    }

    pub fn get(&self, m: &LatticeIndex) -> Complex64 {
        self.support.get(m).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticeIndex, &Complex64)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }
}

/// Spectral-side function: either an exact Laurent representative (validated
/// symmetric) or a black-box torus evaluator whose continuity and symmetry
/// are the caller's contract.
pub struct SpectralFunction {
    kind: SpectralKind,
    ctx: PrimeContext,
}

type TorusEvaluator = Box<dyn Fn(&[Complex64]) -> Complex64 + Send + Sync>;

enum SpectralKind {
    Exact(LaurentPoly),
    Evaluator(TorusEvaluator),
}

impl std::fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            SpectralKind::Exact(poly) => f
                .debug_struct("SpectralFunction")
                .field("exact_terms", &poly.num_terms())
                .field("ctx", &self.ctx)
                .finish(),
            SpectralKind::Evaluator(_) => f
                .debug_struct("SpectralFunction")
                .field("evaluator", &"<fn>")
                .field("ctx", &self.ctx)
                .finish(),
        }
    }
}

/// Symmetry is validated by sampling: random torus points, random
/// permutations of the full alphabet. Failures in practice are gross, so a
/// small deterministic sample suffices.
const SYMMETRY_POINTS: usize = 20;
const SYMMETRY_PERMS: usize = 10;
const SYMMETRY_TOL: f64 = 1e-10;
const SYMMETRY_SEED: u64 = 0x5742_7472_616e_7366;

impl SpectralFunction {
    /// Wrap an exact Laurent representative, validating rank and symmetry
    /// under the `S_n` action on `(beta_1, ..., beta_{n-1}, 1/(beta_1...))`.
    pub fn exact(poly: LaurentPoly, ctx: PrimeContext) -> Result<Self> {
        if poly.rank() != ctx.n() {
            return Err(WhittakerError::RankMismatch {
                expected: ctx.n(),
                got: poly.rank(),
            });
        }
        let deviation = symmetry_deviation(&poly, ctx.n())?;
        if deviation > SYMMETRY_TOL {
            return Err(WhittakerError::NotSymmetric(deviation));
        }
        Ok(SpectralFunction {
            kind: SpectralKind::Exact(poly),
            ctx,
        })
    }

    pub fn evaluator<F>(f: F, ctx: PrimeContext) -> Self
    where
        F: Fn(&[Complex64]) -> Complex64 + Send + Sync + 'static,
    {
        SpectralFunction {
            kind: SpectralKind::Evaluator(Box::new(f)),
            ctx,
        }
    }

    pub fn exact_poly(&self) -> Option<&LaurentPoly> {
        match &self.kind {
            SpectralKind::Exact(poly) => Some(poly),
            SpectralKind::Evaluator(_) => None,
        }
    }

    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    /// Evaluate at a torus point `(beta_1, ..., beta_{n-1})`.
    pub fn eval_torus(&self, point: &[Complex64]) -> Result<Complex64> {
        match &self.kind {
            SpectralKind::Exact(poly) => poly.eval(point),
            SpectralKind::Evaluator(f) => Ok(f(point)),
        }
    }
}

fn symmetry_deviation(poly: &LaurentPoly, rank: usize) -> Result<f64> {
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SYMMETRY_SEED);
    let vars = rank - 1;
    let mut worst: f64 = 0.0;
    for _ in 0..SYMMETRY_POINTS {
        let mut full: Vec<Complex64> = (0..vars)
            .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
            .collect();
        let closing = full.iter().fold(ONE, |acc, b| acc * b).inv();
        full.push(closing);
        let reference = poly.eval(&full[..vars])?;
        let scale = reference.norm().max(1.0);
        for _ in 0..SYMMETRY_PERMS {
            let mut permuted = full.clone();
            permuted.shuffle(&mut rng);
            let value = poly.eval(&permuted[..vars])?;
            worst = worst.max((value - reference).norm() / scale);
        }
    }
    Ok(worst)
}

/// Default lattice truncation cube side for series without a caller-chosen
/// budget.
pub const DEFAULT_TRUNCATION: u32 = 40;

/// Regularization exponent and lattice truncation of the product pairing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedPairingParams {
    pub epsilon: f64,
    pub truncation: u32,
}

impl RegularizedPairingParams {
    pub fn new(epsilon: f64, truncation: u32) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(WhittakerError::InvalidParameter(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(RegularizedPairingParams {
            epsilon,
            truncation,
        })
    }
}

/// Declared decay of a geometric-side evaluator:
/// `|h(v)| <= constant * delta^{1/2}(v) * p^{-(eta + eps0) w(v)}` with
/// `w(v) = sum_k (n-k) v_k`, valid for spectral parameters inside the
/// annulus `|alpha_i| <= p^eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub constant: f64,
    pub eta: f64,
    pub eps0: f64,
}

/// Density of `d^x t` on the shell of valuation `v`, normalized so each shell
/// has mass 1: `prod_k |t_k|_p^{-k(n-k)} = p^{+sum v_k k(n-k)} = 1/delta(v)`.
pub fn measure_weight(v: &ValuationVector, ctx: &PrimeContext) -> f64 {
    ctx_power(ctx, 2 * delta_exponent(v, ctx))
}

fn ctx_power(ctx: &PrimeContext, twice_exponent: i64) -> f64 {
    (ctx.p() as f64).powf(twice_exponent as f64 / 2.0)
}

fn inv_delta_sqrt(m: &LatticeIndex, ctx: &PrimeContext) -> f64 {
    ctx_power(ctx, delta_exponent(&ValuationVector::from(m), ctx))
}

/// Forward transform of a finitely supported function:
/// `sum_v h(v) delta^{-1/2}(v) s_v(alpha)`.
pub fn forward_transform(h: &CompactFunction, a: &SpectralParams) -> Complex64 {
    assert_eq!(
        a.n(),
        h.ctx().n(),
        "parameter count must match context rank"
    );
    let mut sum = crate::PairwiseSum::new();
    for (m, &value) in h.iter() {
        sum.push(value * schur_jacobi_trudi(m, a) * inv_delta_sqrt(m, h.ctx()));
    }
    sum.total()
}

/// Forward transform of an evaluator with declared decay, truncated to the
/// cube `[0, M]^{n-1}`. Returns the partial sum, a geometric truncation tail
/// bound derived from the declared constants, and a roundoff allowance.
pub fn forward_transform_series<F>(
    hval: F,
    a: &SpectralParams,
    decay: &DecayBound,
    m_max: u32,
    ctx: &PrimeContext,
) -> Result<SeriesSum>
where
    F: Fn(&LatticeIndex) -> Complex64,
{
    let n = ctx.n();
    assert_eq!(a.n(), n, "parameter count must match context rank");
    if decay.eps0 <= 0.0 || decay.eps0.is_nan() {
        return Err(WhittakerError::DecayContract(format!(
            "declared decay margin eps0 must be positive, got {}",
            decay.eps0
        )));
    }
    if !(decay.constant >= 0.0 && decay.constant.is_finite()) {
        return Err(WhittakerError::DecayContract(format!(
            "declared constant must be finite and nonnegative, got {}",
            decay.constant
        )));
    }
    let annulus = (ctx.p() as f64).powf(decay.eta);
    if a.max_abs() > annulus * (1.0 + 1e-9) {
        return Err(WhittakerError::DecayContract(format!(
            "max |alpha_i| = {} exceeds the declared annulus p^eta = {}",
            a.max_abs(),
            annulus
        )));
    }

    let dims = n - 1;
    let kmax = dims * m_max as usize + n;
    let h_table = complete_homogeneous(a.alpha(), kmax);

    let mut sum = crate::PairwiseSum::new();
    let mut abs_sum = 0.0;
    let mut m = vec![0u32; dims];
    let mut mu_buf = vec![0u64; dims];
    loop {
        let index = LatticeIndex::new(m.clone());
        // mu_buf[i] = m_1 + ... + m_{n-1-i}
        let mut acc = 0u64;
        for j in 0..dims {
            acc += m[j] as u64;
            mu_buf[dims - 1 - j] = acc;
        }
        let end = mu_buf.iter().rposition(|&p| p > 0).map_or(0, |i| i + 1);
        let schur = jacobi_trudi_from_h(&h_table, &mu_buf[..end]);
        let term = hval(&index) * schur * inv_delta_sqrt(&index, ctx);
        abs_sum += term.norm();
        sum.push(term);

        let mut axis = 0;
        loop {
            if axis == dims {
                return Ok(SeriesSum {
                    value: sum.total(),
                    tail_bound: series_tail_bound(decay, a, ctx, m_max),
                    roundoff_bound: 1e-13 * abs_sum,
                });
            }
            if m[axis] < m_max {
                m[axis] += 1;
                break;
            }
            m[axis] = 0;
            axis += 1;
        }
    }
}

/// Truncation tail of the forward series outside `[0, M]^{n-1}`.
///
/// Each term is bounded by `constant * N_v * r^{w(v)}` with
/// `r = p^{-(eta+eps0)} max(1, max|alpha_i|)` and `N_v` the Weyl dimension,
/// itself at most `(w+1)^{n(n-1)/2}`; the lattice has at most `(w+1)^{n-2}`
/// points of weight `w`. The resulting one-dimensional series in `w` is
/// summed numerically with a geometric cap.
fn series_tail_bound(
    decay: &DecayBound,
    a: &SpectralParams,
    ctx: &PrimeContext,
    m_max: u32,
) -> f64 {
    let n = ctx.n();
    let r = (ctx.p() as f64).powf(-(decay.eta + decay.eps0)) * a.max_abs().max(1.0);
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let poly_power = (n * (n - 1) / 2 + n - 2) as i32;
    let mut w = m_max as u64 + 1;
    let mut r_pow = r.powi(w as i32);
    let mut total = 0.0;
    for _ in 0..1_000_000 {
        let term = (w as f64 + 1.0).powi(poly_power) * r_pow;
        total += term;
        if term < 1e-300 || (total > 0.0 && term < total * 1e-18) {
            return decay.constant * total;
        }
        w += 1;
        r_pow *= r;
    }
    // Remainder after the cap, bounded geometrically.
    let ratio = r * ((w as f64 + 2.0) / (w as f64 + 1.0)).powi(poly_power);
    if ratio < 1.0 {
        total += (w as f64 + 1.0).powi(poly_power) * r_pow * ratio / (1.0 - ratio);
        decay.constant * total
    } else {
        f64::INFINITY
    }
}

/// `prod_{i != j} (beta_i - beta_j) = prod_{i < j} -(beta_i - beta_j)^2`
/// over the full substituted alphabet, as an exact Laurent polynomial.
pub fn vandermonde_product(rank: usize) -> LaurentPoly {
    let alphabet = crate::schur::substituted_alphabet(rank, false);
    let mut product = LaurentPoly::one(rank);
    for i in 0..rank {
        for j in i + 1..rank {
            let diff = alphabet[i].add_unchecked(&alphabet[j].scaled(-ONE));
            let square = diff.mul_unchecked(&diff);
            product = product.mul_unchecked(&square.scaled(-ONE));
        }
    }
    product
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Inverse transform of an exact spectral function at a single valuation:
/// the constant term of `H * W_{1/beta}(v) * prod_{i!=j}(beta_i - beta_j)`
/// divided by `n!`. Zero off the support cone.
pub fn inverse_transform_exact(
    h_spec: &SpectralFunction,
    v: &ValuationVector,
) -> Result<Complex64> {
    let poly = h_spec.exact_poly().ok_or(WhittakerError::ExactRequired)?;
    let ctx = h_spec.ctx();
    assert_eq!(v.rank(), ctx.n(), "valuation rank must match context");
    if !v.in_cone() {
        return Ok(ZERO);
    }
    let whittaker = whittaker_laurent(v, true, ctx)?;
    let integrand = poly
        .mul_unchecked(&whittaker)
        .mul_unchecked(&vandermonde_product(ctx.n()));
    Ok(integrand.constant_term() / factorial(ctx.n()))
}

/// Inverse transform by tensor-product trapezoid quadrature with `nodes`
/// points per circle. Exact (to roundoff) once `nodes` exceeds the integrand
/// exponent spread; geometrically convergent for analytic evaluators.
pub fn inverse_transform_quadrature(
    h_spec: &SpectralFunction,
    v: &ValuationVector,
    nodes: usize,
) -> Result<Complex64> {
    if nodes < 4 {
        return Err(WhittakerError::InvalidParameter(format!(
            "quadrature needs at least 4 nodes per circle, got {nodes}"
        )));
    }
    let ctx = h_spec.ctx();
    let n = ctx.n();
    assert_eq!(v.rank(), n, "valuation rank must match context");
    if !v.in_cone() {
        return Ok(ZERO);
    }
    let m = v.to_lattice_index()?;
    let mu = m.to_partition();
    let mu_trimmed: Vec<u64> = mu.trimmed().to_vec();
    let kmax = mu_trimmed.first().map_or(0, |&p| p as usize) + mu_trimmed.len();
    let delta_half = crate::whittaker::delta_sqrt(v, ctx);

    let dims = n - 1;
    let mut sum = crate::PairwiseSum::new();
    let mut grid = vec![0usize; dims];
    let mut point = vec![ONE; dims];
    let mut recip = vec![ONE; n];
    loop {
        for (i, &g) in grid.iter().enumerate() {
            point[i] = Complex64::from_polar(1.0, std::f64::consts::TAU * g as f64 / nodes as f64);
        }
        let mut prod = ONE;
        for (i, &b) in point.iter().enumerate() {
            recip[i] = b.inv();
            prod *= b;
        }
        recip[n - 1] = prod; // 1/beta_n = beta_1 ... beta_{n-1}

        // W_{1/beta}(v) = delta^{1/2}(v) s_v(1/beta), pole-free via Jacobi-Trudi.
        let h_table = complete_homogeneous(&recip, kmax);
        let schur = jacobi_trudi_from_h(&h_table, &mu_trimmed);

        let mut vandermonde = ONE;
        let mut full = point.clone();
        full.push(prod.inv());
        for i in 0..n {
            for j in i + 1..n {
                let diff = full[i] - full[j];
                vandermonde *= -(diff * diff);
            }
        }

        sum.push(h_spec.eval_torus(&point)? * schur * vandermonde);

        let mut axis = 0;
        loop {
            if axis == dims {
                let cells = (nodes as f64).powi(dims as i32);
                return Ok(sum.total() * delta_half / (factorial(n) * cells));
            }
            if grid[axis] + 1 < nodes {
                grid[axis] += 1;
                break;
            }
            grid[axis] = 0;
            axis += 1;
        }
    }
}

/// Regularized pairing of two Whittaker functions as a truncated lattice sum:
/// `sum_{m in [0,M]^{n-1}} s_m(alpha) s_m(beta) p^{-eps w(m)}`, which is the
/// Cauchy sum at `alpha / p^eps`. Reported with its geometric tail bound.
pub fn whittaker_pairing(
    a: &SpectralParams,
    b: &SpectralParams,
    params: &RegularizedPairingParams,
    ctx: &PrimeContext,
) -> Result<SeriesSum> {
    let n = ctx.n();
    assert_eq!(a.n(), n, "parameter count must match context rank");
    assert_eq!(b.n(), n, "parameter count must match context rank");
    let q0 = a.max_abs() * b.max_abs();
    if q0 > 1.0 + 1e-9 || (params.epsilon == 0.0 && q0 >= 1.0 - 1e-15) {
        return Err(WhittakerError::DivergentDomain(q0));
    }
    let damping = (ctx.p() as f64).powf(-params.epsilon);
    let scaled = a.scaled(Complex64::new(damping, 0.0));
    let (value, abs_sum) =
        crate::schur::schur_cube_sum_with_abs(scaled.alpha(), b.alpha(), params.truncation);
    Ok(SeriesSum {
        value,
        tail_bound: cauchy_tail_bound(q0 * damping, n, params.truncation),
        roundoff_bound: 1e-13 * abs_sum,
    })
}

/// Closed form of the regularized pairing:
/// `(1 - alpha_1...alpha_n beta_1...beta_n / p^{eps n})
///  / prod_{i,j} (1 - alpha_i beta_j / p^eps)`.
pub fn stade_rhs(
    a: &SpectralParams,
    b: &SpectralParams,
    epsilon: f64,
    ctx: &PrimeContext,
) -> Result<Complex64> {
    let n = ctx.n();
    assert_eq!(a.n(), n, "parameter count must match context rank");
    assert_eq!(b.n(), n, "parameter count must match context rank");
    let damping = (ctx.p() as f64).powf(-epsilon);
    let mut denom = ONE;
    for &x in a.alpha() {
        for &y in b.alpha() {
            let factor = ONE - x * y * damping;
            if factor.norm() < 1e-14 {
                return Err(WhittakerError::Pole);
            }
            denom *= factor;
        }
    }
    let numerator = ONE - a.product() * b.product() * damping.powi(n as i32);
    Ok(numerator / denom)
}

/// Geometric-side Plancherel pairing:
/// `sum_v h1(v) conj(h2(v)) weight(v)`.
pub fn plancherel_geometric(h1: &CompactFunction, h2: &CompactFunction) -> Complex64 {
    assert_eq!(h1.ctx(), h2.ctx(), "pairing requires a common context");
    let mut sum = crate::PairwiseSum::new();
    for (m, &value) in h1.iter() {
        let other = h2.get(m);
        if other.norm() == 0.0 {
            continue;
        }
        let weight = measure_weight(&ValuationVector::from(m), h1.ctx());
        sum.push(value * other.conj() * weight);
    }
    sum.total()
}

/// Spectral-side Plancherel pairing of two exact transforms: the constant
/// term of `H1 * conj_invert(H2) * prod_{i!=j}(beta_i - beta_j)` over `n!`,
/// where `conj_invert` realizes unit-torus conjugation exactly.
pub fn plancherel_spectral(h1: &SpectralFunction, h2: &SpectralFunction) -> Result<Complex64> {
    let p1 = h1.exact_poly().ok_or(WhittakerError::ExactRequired)?;
    let p2 = h2.exact_poly().ok_or(WhittakerError::ExactRequired)?;
    assert_eq!(h1.ctx(), h2.ctx(), "pairing requires a common context");
    let n = h1.ctx().n();
    let integrand = p1
        .mul_unchecked(&p2.conj_invert())
        .mul_unchecked(&vandermonde_product(n));
    Ok(integrand.constant_term() / factorial(n))
}

/// Exact symbolic image of the forward transform:
/// `sum_v h(v) delta^{-1/2}(v) s_v(beta)` as a validated spectral function.
pub fn forward_transform_laurent(h: &CompactFunction) -> Result<SpectralFunction> {
    let ctx = *h.ctx();
    let n = ctx.n();
    let mut poly = LaurentPoly::zero(n);
    for (m, &value) in h.iter() {
        let schur = schur_laurent(m, false, n)?;
        poly = poly.add_unchecked(&schur.scaled(value * inv_delta_sqrt(m, &ctx)));
    }
    SpectralFunction::exact(poly, ctx)
}

/// Largest Weyl dimension on the truncation cube; useful when sizing
/// quadrature grids against exact data.
pub fn max_dimension_on_cube(n: usize, m_max: u32) -> f64 {
    let m = LatticeIndex::new(vec![m_max; n - 1]);
    weyl_dimension(&m.to_partition())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Exponent;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx(p: u64, n: usize) -> PrimeContext {
        PrimeContext::new(p, n).unwrap()
    }

    fn unit_torus_params(phases: &[f64]) -> SpectralParams {
        let mut alpha: Vec<Complex64> = phases
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect();
        let closing = alpha.iter().fold(ONE, |acc, b| acc * b).inv();
        alpha.push(closing);
        SpectralParams::unit_determinant(alpha).unwrap()
    }

    #[test]
    fn measure_weight_examples() {
        assert_eq!(measure_weight(&ValuationVector::zero(2), &ctx(2, 2)), 1.0);
        assert_eq!(
            measure_weight(&ValuationVector::new(vec![1]), &ctx(2, 2)),
            2.0
        );
        assert_eq!(
            measure_weight(&ValuationVector::new(vec![1, 2]), &ctx(5, 3)),
            5.0_f64.powi(6)
        );
    }

    #[test]
    fn forward_of_identity_indicator_is_one() {
        let h = CompactFunction::indicator(ctx(3, 3), LatticeIndex::zero(3));
        for phases in [[0.4, 1.3], [2.2, 0.1]] {
            let a = unit_torus_params(&phases);
            assert!((forward_transform(&h, &a) - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn forward_of_weighted_indicator_is_schur() {
        let context = ctx(2, 3);
        let m = LatticeIndex::new(vec![2, 1]);
        let v = ValuationVector::from(&m);
        let mut h = CompactFunction::new(context);
        h.set(
            m.clone(),
            c(crate::whittaker::delta_sqrt(&v, &context), 0.0),
        );
        let a = unit_torus_params(&[0.9, 2.4]);
        let expected = crate::schur::schur_tableau_oracle(&m, &a).unwrap();
        assert!((forward_transform(&h, &a) - expected).norm() < 1e-12);
    }

    #[test]
    fn series_of_zero_evaluator() {
        let context = ctx(2, 2);
        let a = unit_torus_params(&[0.7]);
        let decay = DecayBound {
            constant: 0.0,
            eta: 0.0,
            eps0: 1.0,
        };
        let s = forward_transform_series(|_| ZERO, &a, &decay, 10, &context).unwrap();
        assert_eq!(s.value, ZERO);
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn series_reproduces_standard_l_factor() {
        // h(v) = delta^{1/2} p^{-v s} sums to prod_i (1 - alpha_i p^{-s})^{-1}.
        let context = ctx(2, 2);
        let s = 1.0;
        let a = unit_torus_params(&[std::f64::consts::PI / 7.0]);
        let decay = DecayBound {
            constant: 1.0,
            eta: 0.0,
            eps0: s,
        };
        let hval = |m: &LatticeIndex| {
            let v = ValuationVector::from(m);
            let lam = m.as_slice()[0] as f64;
            c(
                crate::whittaker::delta_sqrt(&v, &context) * 2.0_f64.powf(-lam * s),
                0.0,
            )
        };
        let result = forward_transform_series(hval, &a, &decay, 60, &context).unwrap();
        let x = c(2.0_f64.powf(-s), 0.0);
        let closed = ((ONE - a.alpha()[0] * x) * (ONE - a.alpha()[1] * x)).inv();
        assert!((result.value - closed).norm() < 1e-12);
        assert!((result.value - closed).norm() <= result.tail_bound + result.roundoff_bound);
    }

    #[test]
    fn series_tail_bound_shrinks_at_declared_rate() {
        let context = ctx(2, 2);
        let a = unit_torus_params(&[1.1]);
        let decay = DecayBound {
            constant: 1.0,
            eta: 0.25,
            eps0: 0.5,
        };
        let hval = |_: &LatticeIndex| ZERO;
        let expected_ratio = 2.0_f64.powf(-(decay.eta + decay.eps0));
        let mut prev = f64::NAN;
        for m_max in [20u32, 21, 22, 23] {
            let s = forward_transform_series(hval, &a, &decay, m_max, &context).unwrap();
            if prev.is_finite() {
                let ratio = s.tail_bound / prev;
                assert!(
                    (ratio - expected_ratio).abs() < 0.15 * expected_ratio,
                    "tail ratio {ratio} vs declared rate {expected_ratio}"
                );
            }
            prev = s.tail_bound;
        }
    }

    #[test]
    fn series_rejects_missing_decay_margin() {
        let context = ctx(2, 2);
        let a = unit_torus_params(&[0.4]);
        let decay = DecayBound {
            constant: 1.0,
            eta: 0.0,
            eps0: 0.0,
        };
        let err = forward_transform_series(|_| ONE, &a, &decay, 5, &context).unwrap_err();
        assert!(matches!(err, WhittakerError::DecayContract(_)));
    }

    #[test]
    fn series_rejects_parameters_outside_annulus() {
        let context = ctx(2, 2);
        let a = SpectralParams::new(vec![c(4.0, 0.0), c(0.25, 0.0)]).unwrap();
        let decay = DecayBound {
            constant: 1.0,
            eta: 0.5,
            eps0: 1.0,
        };
        let err = forward_transform_series(|_| ONE, &a, &decay, 5, &context).unwrap_err();
        assert!(matches!(err, WhittakerError::DecayContract(_)));
    }

    #[test]
    fn inverse_of_constant_is_identity_indicator() {
        let context = ctx(2, 2);
        let h = SpectralFunction::exact(LaurentPoly::one(2), context).unwrap();
        let at_zero = inverse_transform_exact(&h, &ValuationVector::zero(2)).unwrap();
        assert!((at_zero - ONE).norm() < 1e-14);
        for v in [vec![1], vec![2], vec![5]] {
            let value = inverse_transform_exact(&h, &ValuationVector::new(v)).unwrap();
            assert!(value.norm() < 1e-14);
        }
        let off = inverse_transform_exact(&h, &ValuationVector::new(vec![-2])).unwrap();
        assert_eq!(off, ZERO);
    }

    #[test]
    fn inverse_of_schur_is_orthogonality() {
        // H = s_m picks out v = m with value delta^{1/2}(m).
        let context = ctx(3, 2);
        let m = LatticeIndex::new(vec![2]);
        let poly = schur_laurent(&m, false, 2).unwrap();
        let h = SpectralFunction::exact(poly, context).unwrap();
        for v_entry in 0..5i64 {
            let v = ValuationVector::new(vec![v_entry]);
            let value = inverse_transform_exact(&h, &v).unwrap();
            let expected = if v_entry == 2 {
                crate::whittaker::delta_sqrt(&v, &context)
            } else {
                0.0
            };
            assert!(
                (value - c(expected, 0.0)).norm() < 1e-12,
                "at v = {v_entry}: {value} vs {expected}"
            );
        }
    }

    #[test]
    fn quadrature_constant_at_origin() {
        let context = ctx(2, 2);
        let h = SpectralFunction::exact(LaurentPoly::one(2), context).unwrap();
        let value = inverse_transform_quadrature(&h, &ValuationVector::zero(2), 8).unwrap();
        assert!((value - ONE).norm() < 1e-12);
    }

    #[test]
    fn quadrature_matches_exact_above_spread() {
        let context = ctx(2, 3);
        let m = LatticeIndex::new(vec![1, 2]);
        let poly = schur_laurent(&m, false, 3).unwrap();
        let spread = poly.max_abs_exponent();
        let h = SpectralFunction::exact(poly, context).unwrap();
        for v in [vec![0, 0], vec![1, 2], vec![2, 1]] {
            let v = ValuationVector::new(v);
            let exact = inverse_transform_exact(&h, &v).unwrap();
            let nodes = (2 * spread + 2 * v.as_slice().iter().sum::<i64>() as i32 + 8) as usize;
            let quad = inverse_transform_quadrature(&h, &v, nodes).unwrap();
            assert!(
                (exact - quad).norm() < 1e-11,
                "v = {v:?}: exact {exact} vs quadrature {quad}"
            );
        }
    }

    #[test]
    fn quadrature_rejects_tiny_grids() {
        let context = ctx(2, 2);
        let h = SpectralFunction::exact(LaurentPoly::one(2), context).unwrap();
        let err = inverse_transform_quadrature(&h, &ValuationVector::zero(2), 3).unwrap_err();
        assert!(matches!(err, WhittakerError::InvalidParameter(_)));
    }

    #[test]
    fn pairing_truncation_zero_keeps_leading_term() {
        let context = ctx(2, 2);
        let a = unit_torus_params(&[0.8]);
        let b = unit_torus_params(&[1.9]);
        let params = RegularizedPairingParams::new(0.3, 0).unwrap();
        let s = whittaker_pairing(&a, &b, &params, &context).unwrap();
        assert!((s.value - ONE).norm() < 1e-14);
    }

    #[test]
    fn pairing_rejects_divergent_domain() {
        let context = ctx(2, 2);
        let a = SpectralParams::new(vec![c(2.0, 0.0), c(0.5, 0.0)]).unwrap();
        let b = SpectralParams::new(vec![c(2.0, 0.0), c(0.5, 0.0)]).unwrap();
        let params = RegularizedPairingParams::new(0.1, 4).unwrap();
        let err = whittaker_pairing(&a, &b, &params, &context).unwrap_err();
        assert!(matches!(err, WhittakerError::DivergentDomain(_)));
    }

    #[test]
    fn pairing_interior_parameters_approach_closed_form() {
        // |alpha_i beta_j| = 0.25 < 1 allows eps = 0.
        let context = ctx(2, 2);
        let a = SpectralParams::new(vec![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let params = RegularizedPairingParams::new(0.0, 60).unwrap();
        let s = whittaker_pairing(&a, &a, &params, &context).unwrap();
        let rhs = stade_rhs(&a, &a, 0.0, &context).unwrap();
        assert!((s.value - rhs).norm() < 1e-12);
        assert!((s.value - rhs).norm() <= s.tail_bound + s.roundoff_bound);
    }

    #[test]
    fn stade_rhs_limits() {
        let context = ctx(2, 2);
        let a = unit_torus_params(&[0.5]);
        let b = unit_torus_params(&[2.5]);
        // Large regularization sends every fraction to zero.
        let far = stade_rhs(&a, &b, 60.0, &context).unwrap();
        assert!((far - ONE).norm() < 1e-12);
        // At eps = 0 the unit-determinant numerator degenerates to zero.
        let a2 = SpectralParams::new(vec![c(0.4, 0.0), c(2.5, 0.0)]).unwrap();
        let b2 = SpectralParams::new(vec![c(1.0 / 3.0, 0.0), c(3.0, 0.0)]).unwrap();
        let zero = stade_rhs(&a2, &b2, 0.0, &context).unwrap();
        assert!(zero.norm() < 1e-12);
    }

    #[test]
    fn plancherel_geometric_examples() {
        let context = ctx(2, 2);
        let origin = CompactFunction::indicator(context, LatticeIndex::zero(2));
        assert!((plancherel_geometric(&origin, &origin) - ONE).norm() < 1e-15);

        let other = CompactFunction::indicator(context, LatticeIndex::new(vec![3]));
        assert_eq!(plancherel_geometric(&origin, &other), ZERO);

        // delta^{1/2} indicators are unit vectors for the pairing.
        let m = LatticeIndex::new(vec![2]);
        let v = ValuationVector::from(&m);
        let mut h = CompactFunction::new(context);
        h.set(m, c(crate::whittaker::delta_sqrt(&v, &context), 0.0));
        assert!((plancherel_geometric(&h, &h) - ONE).norm() < 1e-15);
    }

    #[test]
    fn plancherel_spectral_constants() {
        let context = ctx(2, 2);
        let h = SpectralFunction::exact(LaurentPoly::one(2), context).unwrap();
        let g = SpectralFunction::exact(LaurentPoly::one(2), context).unwrap();
        assert!((plancherel_spectral(&h, &g).unwrap() - ONE).norm() < 1e-14);
    }

    #[test]
    fn plancherel_spectral_schur_orthogonality() {
        let context = ctx(2, 3);
        let s1 = SpectralFunction::exact(
            schur_laurent(&LatticeIndex::new(vec![1, 0]), false, 3).unwrap(),
            context,
        )
        .unwrap();
        let s2 = SpectralFunction::exact(
            schur_laurent(&LatticeIndex::new(vec![0, 1]), false, 3).unwrap(),
            context,
        )
        .unwrap();
        assert!(plancherel_spectral(&s1, &s2).unwrap().norm() < 1e-13);
        assert!((plancherel_spectral(&s1, &s1).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn forward_laurent_examples() {
        let context = ctx(2, 2);
        let origin = CompactFunction::indicator(context, LatticeIndex::zero(2));
        let spec = forward_transform_laurent(&origin).unwrap();
        let poly = spec.exact_poly().unwrap();
        assert_eq!(poly.num_terms(), 1);
        assert_eq!(poly.constant_term(), ONE);

        let m = LatticeIndex::new(vec![1]);
        let v = ValuationVector::from(&m);
        let mut h = CompactFunction::new(context);
        h.set(m, c(crate::whittaker::delta_sqrt(&v, &context), 0.0));
        let spec = forward_transform_laurent(&h).unwrap();
        let poly = spec.exact_poly().unwrap();
        assert!((poly.coeff(&Exponent::new(vec![1])) - ONE).norm() < 1e-15);
        assert!((poly.coeff(&Exponent::new(vec![-1])) - ONE).norm() < 1e-15);
        assert_eq!(poly.num_terms(), 2);
    }

    #[test]
    fn round_trip_small_cube() {
        let context = ctx(2, 3);
        let mut h = CompactFunction::new(context);
        h.set(LatticeIndex::new(vec![0, 0]), c(0.5, -1.0));
        h.set(LatticeIndex::new(vec![1, 2]), c(-0.25, 0.75));
        h.set(LatticeIndex::new(vec![2, 0]), c(2.0, 0.125));
        let spec = forward_transform_laurent(&h).unwrap();
        for m1 in 0..4u32 {
            for m2 in 0..4u32 {
                let m = LatticeIndex::new(vec![m1, m2]);
                let v = ValuationVector::from(&m);
                let back = inverse_transform_exact(&spec, &v).unwrap();
                assert!(
                    (back - h.get(&m)).norm() < 1e-10,
                    "round trip at {m:?}: {back} vs {}",
                    h.get(&m)
                );
            }
        }
    }

    #[test]
    fn exact_constructor_rejects_asymmetric_poly() {
        let context = ctx(2, 2);
        let poly = LaurentPoly::variable(2, 0); // beta_1 alone breaks the swap symmetry
        let err = SpectralFunction::exact(poly, context).unwrap_err();
        assert!(matches!(err, WhittakerError::NotSymmetric(_)));
    }
}
