//! Schur polynomial evaluation and the Cauchy identities.
//!
//! Transforms on the geometric side are indexed by
//! `m = (m_1, ..., m_{n-1})` with nonnegative entries; the associated
//! partition is the cumulative-sum staircase
//! `mu = (m_1 + ... + m_{n-1}, ..., m_1 + m_2, m_1, 0)`.
//!
//! Three independent evaluators are provided:
//!
//! - [`schur_bialternant`]: the alternant determinant ratio. Degenerates at
//!   repeated parameters, so it is guarded by a pairwise-separation check.
//! - [`schur_jacobi_trudi`]: determinant in complete homogeneous polynomials.
//!   Pole-free, the default everywhere.
//! - [`schur_tableau_oracle`]: monomial sum over semistandard Young tableaux.
//!   Exact ground truth, guarded against combinatorial blowup.
//!
//! [`schur_laurent`] produces the exact symbolic value on the unit-determinant
//! torus, after the substitution `beta_n = 1/(beta_1 ... beta_{n-1})`.

use num_complex::Complex64;

use crate::error::{Result, WhittakerError};
use crate::laurent::{Exponent, LaurentPoly};

/// Pairwise-separation floor below which the alternant ratio is rejected.
pub const BIALTERNANT_MIN_SEPARATION: f64 = 1e-6;

const TABLEAU_MAX_WEIGHT: u64 = 12;
const TABLEAU_MAX_RANK: usize = 5;
const LAURENT_MAX_WEIGHT: u64 = 40;

/// Index `m` of the transform lattice: `n-1` nonnegative integers for a
/// rank-`n` context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeIndex(Vec<u32>);

impl LatticeIndex {
    pub fn new(m: Vec<u32>) -> Self {
        LatticeIndex(m)
    }

    pub fn zero(rank: usize) -> Self {
        assert!(rank >= 2);
        LatticeIndex(vec![0; rank - 1])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Rank of the owning context (`len + 1`).
    pub fn rank(&self) -> usize {
        self.0.len() + 1
    }

    /// `sum_k (n - k) m_k`: the size of the associated partition, and the
    /// decay exponent of the geometric-side lattice.
    pub fn weight(&self) -> u64 {
        let n = self.rank() as u64;
        self.0
            .iter()
            .enumerate()
            .map(|(i, &m)| (n - (i as u64 + 1)) * m as u64)
            .sum()
    }

    pub fn to_partition(&self) -> Partition {
        m_to_partition(self)
    }
}

/// Weakly decreasing vector of `n` nonnegative integers with last part 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// Number of variables of the owning context.
    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// Parts with trailing zeros removed.
    pub fn trimmed(&self) -> &[u64] {
        let end = self.parts.iter().rposition(|&p| p > 0).map_or(0, |i| i + 1);
        &self.parts[..end]
    }
}

/// Cumulative exponent pattern of the alternant numerator:
/// `parts[j] = m_1 + ... + m_{n-1-j}`, so `parts = (|m|, ..., m_1+m_2, m_1, 0)`.
pub fn m_to_partition(m: &LatticeIndex) -> Partition {
    let n = m.rank();
    let parts = (0..n)
        .map(|j| m.as_slice()[..n - 1 - j].iter().map(|&x| x as u64).sum())
        .collect();
    Partition { parts }
}

/// Satake / Langlands parameter tuple: `n` nonzero complex numbers, with an
/// optional certified unit-determinant constraint `alpha_1 ... alpha_n = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParams {
    alpha: Vec<Complex64>,
    unit_determinant: bool,
}

impl SpectralParams {
    pub fn new(alpha: Vec<Complex64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(WhittakerError::InvalidRank(alpha.len()));
        }
        if alpha.iter().any(|a| a.norm() == 0.0) {
            return Err(WhittakerError::ZeroSpectralParam);
        }
        Ok(SpectralParams {
            alpha,
            unit_determinant: false,
        })
    }

    /// As [`SpectralParams::new`], additionally certifying
    /// `|alpha_1 ... alpha_n - 1| <= 1e-10`.
    pub fn unit_determinant(alpha: Vec<Complex64>) -> Result<Self> {
        let mut params = Self::new(alpha)?;
        let dev = (params.product() - Complex64::new(1.0, 0.0)).norm();
        if dev > 1e-10 {
            return Err(WhittakerError::NotUnitDeterminant(dev));
        }
        params.unit_determinant = true;
        Ok(params)
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_unit_determinant(&self) -> bool {
        self.unit_determinant
    }

    pub fn product(&self) -> Complex64 {
        self.alpha
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, a| acc * a)
    }

    pub fn max_abs(&self) -> f64 {
        self.alpha.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn min_pairwise_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.alpha.len() {
            for j in i + 1..self.alpha.len() {
                min = min.min((self.alpha[i] - self.alpha[j]).norm());
            }
        }
        min
    }

    /// Entrywise scaling `alpha -> c * alpha`. The unit-determinant flag is
    /// re-derived from the scaled product.
    pub fn scaled(&self, c: Complex64) -> SpectralParams {
        let alpha: Vec<Complex64> = self.alpha.iter().map(|a| a * c).collect();
        let prod = alpha
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, a| acc * a);
        SpectralParams {
            alpha,
            unit_determinant: (prod - Complex64::new(1.0, 0.0)).norm() <= 1e-10,
        }
    }
}

/// Truncated series value together with its reported error budget: a
/// geometric truncation tail and a floating-point roundoff allowance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub tail_bound: f64,
    pub roundoff_bound: f64,
}

impl SeriesSum {
    /// Truncation tail plus roundoff allowance.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.roundoff_bound
    }
}

/// Complete homogeneous symmetric polynomials `h_0, ..., h_kmax` of the given
/// alphabet, by the one-variable-at-a-time generating-function recurrence
/// `h_k <- h_k + a_j h_{k-1}` (cost `O(n kmax)`, division-free).
pub fn complete_homogeneous(alpha: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); kmax + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &a in alpha {
        for k in 1..=kmax {
            let prev = h[k - 1];
            h[k] += a * prev;
        }
    }
    h
}

fn h_at(h: &[Complex64], idx: i64) -> Complex64 {
    if idx < 0 {
        Complex64::new(0.0, 0.0)
    } else {
        h[idx as usize]
    }
}

/// Jacobi-Trudi determinant `det(h_{mu_i - i + j})` read off a precomputed
/// table of complete homogeneous values; `mu` must be trimmed of trailing
/// zeros and the table must reach `mu_1 + len(mu) - 1`.
pub(crate) fn jacobi_trudi_from_h(h: &[Complex64], mu: &[u64]) -> Complex64 {
    match mu.len() {
        0 => Complex64::new(1.0, 0.0),
        1 => h_at(h, mu[0] as i64),
        2 => {
            let a = mu[0] as i64;
            let b = mu[1] as i64;
            h_at(h, a) * h_at(h, b) - h_at(h, a + 1) * h_at(h, b - 1)
        }
        3 => {
            let e = |i: usize, j: usize| h_at(h, mu[i] as i64 - i as i64 + j as i64);
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        l => {
            let mat: Vec<Vec<Complex64>> = (0..l)
                .map(|i| {
                    (0..l)
                        .map(|j| h_at(h, mu[i] as i64 - i as i64 + j as i64))
                        .collect()
                })
                .collect();
            det_complex(mat)
        }
    }
}

/// Determinant by partial-pivoted Gaussian elimination.
pub(crate) fn det_complex(mut mat: Vec<Vec<Complex64>>) -> Complex64 {
    let n = mat.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| mat[a][col].norm().partial_cmp(&mat[b][col].norm()).unwrap())
            .unwrap();
        if mat[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            mat.swap(pivot, col);
            det = -det;
        }
        det *= mat[col][col];
        let (upper, lower) = mat.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower {
            let factor = row[col] / pivot_row[col];
            for (entry, &pivot_entry) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= factor * pivot_entry;
            }
        }
    }
    det
}

/// Schur value as the ratio of two alternants (Shintani's display).
///
/// Rejected when the parameters come closer than
/// [`BIALTERNANT_MIN_SEPARATION`]; the caller should fall back to
/// [`schur_jacobi_trudi`], which is defined for repeated parameters.
pub fn schur_bialternant(m: &LatticeIndex, a: &SpectralParams) -> Result<Complex64> {
    let n = a.n();
    assert_eq!(m.rank(), n, "lattice index rank must match parameter count");
    let sep = a.min_pairwise_separation();
    if sep <= BIALTERNANT_MIN_SEPARATION {
        return Err(WhittakerError::IllConditioned(sep));
    }
    let parts = m.to_partition();
    let numerator: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            let exp = parts.parts()[i] as i64 + (n - 1 - i) as i64;
            a.alpha().iter().map(|&x| powi64(x, exp)).collect()
        })
        .collect();
    let mut vandermonde = Complex64::new(1.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            vandermonde *= a.alpha()[i] - a.alpha()[j];
        }
    }
    Ok(det_complex(numerator) / vandermonde)
}

fn powi64(x: Complex64, e: i64) -> Complex64 {
    if e >= 0 {
        x.powu(e as u32)
    } else {
        x.powu((-e) as u32).inv()
    }
}

/// Schur value by the Jacobi-Trudi determinant in complete homogeneous
/// polynomials. Defined for arbitrary (including repeated) parameters.
pub fn schur_jacobi_trudi(m: &LatticeIndex, a: &SpectralParams) -> Complex64 {
    assert_eq!(
        m.rank(),
        a.n(),
        "lattice index rank must match parameter count"
    );
    let parts = m.to_partition();
    let mu = parts.trimmed();
    if mu.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let kmax = mu[0] as usize + mu.len() - 1;
    let h = complete_homogeneous(a.alpha(), kmax);
    jacobi_trudi_from_h(&h, mu)
}

/// Independent oracle: the monomial sum over semistandard Young tableaux of
/// shape `m_to_partition(m)` with entries in `1..=n`.
pub fn schur_tableau_oracle(m: &LatticeIndex, a: &SpectralParams) -> Result<Complex64> {
    let n = a.n();
    assert_eq!(m.rank(), n, "lattice index rank must match parameter count");
    let parts = m.to_partition();
    let weight = parts.size();
    if weight > TABLEAU_MAX_WEIGHT || n > TABLEAU_MAX_RANK {
        return Err(WhittakerError::OracleTooLarge { weight, rank: n });
    }
    let shape: Vec<usize> = parts.trimmed().iter().map(|&p| p as usize).collect();
    if shape.is_empty() {
        return Ok(Complex64::new(1.0, 0.0));
    }

    struct Dfs<'a> {
        shape: &'a [usize],
        n: usize,
        alpha: &'a [Complex64],
        tableau: Vec<Vec<u8>>,
        counts: Vec<u32>,
        acc: Complex64,
    }

    impl Dfs<'_> {
        fn fill(&mut self, row: usize, col: usize) {
            if row == self.shape.len() {
                let mut term = Complex64::new(1.0, 0.0);
                for (i, &count) in self.counts.iter().enumerate() {
                    term *= self.alpha[i].powu(count);
                }
                self.acc += term;
                return;
            }
            let (next_row, next_col) = if col + 1 < self.shape[row] {
                (row, col + 1)
            } else {
                (row + 1, 0)
            };
            // Weakly increasing along rows, strictly increasing down columns.
            let min = {
                let left = if col > 0 {
                    self.tableau[row][col - 1]
                } else {
                    1
                };
                let above = if row > 0 && col < self.shape[row - 1] {
                    self.tableau[row - 1][col] + 1
                } else {
                    1
                };
                left.max(above)
            };
            for value in min..=(self.n as u8) {
                self.tableau[row][col] = value;
                self.counts[value as usize - 1] += 1;
                self.fill(next_row, next_col);
                self.counts[value as usize - 1] -= 1;
            }
        }
    }

    let tableau: Vec<Vec<u8>> = shape.iter().map(|&len| vec![0; len]).collect();
    let mut dfs = Dfs {
        shape: &shape,
        n,
        alpha: a.alpha(),
        tableau,
        counts: vec![0; n],
        acc: Complex64::new(0.0, 0.0),
    };
    dfs.fill(0, 0);
    Ok(dfs.acc)
}

/// Weyl dimension of the GL(n) representation with highest weight `p`:
/// the number of semistandard tableaux of that shape with `n` letters.
pub fn weyl_dimension(p: &Partition) -> f64 {
    let n = p.rank();
    let mut dim = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            let num = p.parts()[i] as f64 - p.parts()[j] as f64 + (j - i) as f64;
            dim *= num / (j - i) as f64;
        }
    }
    dim
}

/// The alphabet `(beta_1, ..., beta_{n-1}, 1/(beta_1...beta_{n-1}))` (or its
/// entrywise reciprocal) as monomials of the substituted Laurent ring.
pub(crate) fn substituted_alphabet(rank: usize, inverted: bool) -> Vec<LaurentPoly> {
    let vars = rank - 1;
    let one = Complex64::new(1.0, 0.0);
    let mut alphabet = Vec::with_capacity(rank);
    for i in 0..vars {
        let mut e = vec![0i32; vars];
        e[i] = if inverted { -1 } else { 1 };
        alphabet.push(LaurentPoly::monomial(rank, Exponent::new(e), one));
    }
    let last = vec![if inverted { 1 } else { -1 }; vars];
    alphabet.push(LaurentPoly::monomial(rank, Exponent::new(last), one));
    alphabet
}

fn permutations_with_sign(l: usize) -> Vec<(Vec<usize>, f64)> {
    // Heap's algorithm; each swap flips the parity.
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..l).collect();
    let mut counters = vec![0usize; l];
    let mut sign = 1.0;
    out.push((perm.clone(), sign));
    let mut i = 0;
    while i < l {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            sign = -sign;
            out.push((perm.clone(), sign));
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    out
}

/// Exact symbolic Schur value `s_m(beta)` (or `s_m(1/beta)` with
/// `inverted = true`) on the unit-determinant torus, as a Laurent polynomial
/// in `beta_1, ..., beta_{n-1}`.
pub fn schur_laurent(m: &LatticeIndex, inverted: bool, rank: usize) -> Result<LaurentPoly> {
    assert_eq!(m.rank(), rank, "lattice index rank must match context rank");
    let parts = m.to_partition();
    let weight = parts.size();
    if weight > LAURENT_MAX_WEIGHT {
        return Err(WhittakerError::SupportGuardExceeded(weight));
    }
    let mu = parts.trimmed();
    if mu.is_empty() {
        return Ok(LaurentPoly::one(rank));
    }
    let l = mu.len();
    let kmax = mu[0] as usize + l - 1;

    // Symbolic complete homogeneous polynomials over the substituted alphabet.
    let alphabet = substituted_alphabet(rank, inverted);
    let mut hs: Vec<LaurentPoly> = (0..=kmax).map(|_| LaurentPoly::zero(rank)).collect();
    hs[0] = LaurentPoly::one(rank);
    for x in &alphabet {
        for k in 1..=kmax {
            let shifted = x.mul_unchecked(&hs[k - 1]);
            hs[k] = hs[k].add_unchecked(&shifted);
        }
    }

    let entry = |i: usize, j: usize| -> Option<&LaurentPoly> {
        let idx = mu[i] as i64 - i as i64 + j as i64;
        if idx < 0 {
            None
        } else {
            Some(&hs[idx as usize])
        }
    };

    let mut det = LaurentPoly::zero(rank);
    'perm: for (perm, sign) in permutations_with_sign(l) {
        let mut product = LaurentPoly::one(rank);
        for (i, &j) in perm.iter().enumerate() {
            match entry(i, j) {
                None => continue 'perm,
                Some(poly) => product = product.mul_unchecked(poly),
            }
        }
        det = det.add_unchecked(&product.scaled(Complex64::new(sign, 0.0)));
    }
    Ok(det)
}

/// Closed form of the Cauchy kernel:
/// `(1 - alpha_1...alpha_n beta_1...beta_n) / prod_{i,j} (1 - alpha_i beta_j)`.
pub fn cauchy_rhs(a: &SpectralParams, b: &SpectralParams) -> Result<Complex64> {
    if a.n() != b.n() {
        return Err(WhittakerError::RankMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let q = cauchy_q(a, b);
    if q >= 1.0 {
        return Err(WhittakerError::DivergentDomain(q));
    }
    let mut denom = Complex64::new(1.0, 0.0);
    for &x in a.alpha() {
        for &y in b.alpha() {
            denom *= Complex64::new(1.0, 0.0) - x * y;
        }
    }
    Ok((Complex64::new(1.0, 0.0) - a.product() * b.product()) / denom)
}

/// `max_{i,j} |alpha_i beta_j|`, the geometric ratio of the Cauchy series.
pub fn cauchy_q(a: &SpectralParams, b: &SpectralParams) -> f64 {
    a.max_abs() * b.max_abs()
}

pub(crate) fn cauchy_tail_bound(q: f64, n: usize, m_max: u32) -> f64 {
    if q >= 1.0 {
        return f64::INFINITY;
    }
    10.0 * q.powi(m_max as i32 + 1) / (1.0 - q).powi((n * n) as i32)
}

/// Partial Cauchy sum `sum_{m in [0, M]^{n-1}} s_m(alpha) s_m(beta)` with the
/// geometric tail bound `10 q^{M+1} / (1-q)^{n^2}`, `q = max |alpha_i beta_j|`.
pub fn cauchy_lhs_truncated(a: &SpectralParams, b: &SpectralParams, m_max: u32) -> SeriesSum {
    assert_eq!(a.n(), b.n(), "parameter tuples must have equal length");
    let (value, abs_sum) = schur_cube_sum_with_abs(a.alpha(), b.alpha(), m_max);
    SeriesSum {
        value,
        tail_bound: cauchy_tail_bound(cauchy_q(a, b), a.n(), m_max),
        roundoff_bound: 1e-13 * abs_sum,
    }
}

/// `sum_{m in [0, M]^{n-1}} s_m(alpha) s_m(beta)` by per-point Jacobi-Trudi
/// determinants over shared complete-homogeneous tables, accumulated with a
/// deterministic pairwise tree. Also returns the sum of term magnitudes,
/// from which callers derive a roundoff allowance.
pub(crate) fn schur_cube_sum_with_abs(
    alpha: &[Complex64],
    beta: &[Complex64],
    m_max: u32,
) -> (Complex64, f64) {
    let n = alpha.len();
    debug_assert_eq!(n, beta.len());
    let dims = n - 1;
    let kmax = dims * m_max as usize + n;
    let h_a = complete_homogeneous(alpha, kmax);
    let h_b = complete_homogeneous(beta, kmax);

    let mut sum = crate::PairwiseSum::new();
    let mut abs_sum = 0.0;
    let mut m = vec![0u32; dims];
    let mut mu_buf = vec![0u64; dims];
    loop {
        // mu_buf[i] = m_1 + ... + m_{n-1-i}; trailing zeros trimmed below.
        let mut acc = 0u64;
        for j in 0..dims {
            acc += m[j] as u64;
            mu_buf[dims - 1 - j] = acc;
        }
        let end = mu_buf.iter().rposition(|&p| p > 0).map_or(0, |i| i + 1);
        let mu = &mu_buf[..end];
        let term = jacobi_trudi_from_h(&h_a, mu) * jacobi_trudi_from_h(&h_b, mu);
        abs_sum += term.norm();
        sum.push(term);

        // Odometer increment over the cube.
        let mut axis = 0;
        loop {
            if axis == dims {
                return (sum.total(), abs_sum);
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

/// Both sides of the Cauchy determinant identity:
/// `det[1/(1 - alpha_i beta_j)]` and
/// `V(alpha) V(beta) / prod_{i,j} (1 - alpha_i beta_j)`.
pub fn cauchy_determinant_check(
    a: &SpectralParams,
    b: &SpectralParams,
) -> Result<(Complex64, Complex64)> {
    if a.n() != b.n() {
        return Err(WhittakerError::RankMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    let n = a.n();
    let one = Complex64::new(1.0, 0.0);
    let mut mat = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut denom = one;
    for (i, &x) in a.alpha().iter().enumerate() {
        for (j, &y) in b.alpha().iter().enumerate() {
            let factor = one - x * y;
            if factor.norm() < 1e-12 {
                return Err(WhittakerError::Pole);
            }
            mat[i][j] = one / factor;
            denom *= factor;
        }
    }
    let det = det_complex(mat);
    let mut vv = one;
    for i in 0..n {
        for j in i + 1..n {
            vv *= (a.alpha()[i] - a.alpha()[j]) * (b.alpha()[i] - b.alpha()[j]);
        }
    }
    Ok((det, vv / denom))
}
