//! The determinantal point process behind the particle dynamics: weights on
//! triangular arrays, the biorthogonal correlation kernel with its
//! upper-triangular overlap matrix, and Fredholm determinants for
//! multipoint probabilities.
//!
//! Public entry points take strict particle positions; the weak (shape)
//! coordinates used by the path constructions differ by the shift
//! `y_k -> y_k + k` and are handled internally.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::dynamics::{ParticleConfig, Query, Rates};
use crate::error::{Error, Result};
use crate::hitting;
use crate::linalg::{determinant, invert_upper_triangular};
use crate::operators::{q_range_entry, virtual_q_entry, OpSpec};
use crate::scalar::{product, Scalar};

/// Interlacing triangular array `x^(i)_j`, `1 <= j <= i <= N`, with
/// `x^(i+1)_{j+1} < x^(i)_j <= x^(i+1)_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularArray {
    levels: Vec<Vec<i64>>,
}

impl TriangularArray {
    pub fn new(levels: Vec<Vec<i64>>) -> Result<Self> {
        for (i, level) in levels.iter().enumerate() {
            if level.len() != i + 1 {
                return Err(Error::InvalidConfig(format!(
                    "level {} must hold {} points",
                    i + 1,
                    i + 1
                )));
            }
        }
        let arr = Self { levels };
        if !arr.is_interlacing() {
            return Err(Error::InvalidConfig(format!(
                "array violates interlacing: {:?}",
                arr.levels
            )));
        }
        Ok(arr)
    }

    fn is_interlacing(&self) -> bool {
        for i in 1..self.levels.len() {
            let upper = &self.levels[i];
            let lower = &self.levels[i - 1];
            for j in 0..lower.len() {
                if !(upper[j + 1] < lower[j] && lower[j] <= upper[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn size(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, i: usize) -> &[i64] {
        &self.levels[i - 1]
    }

    /// The left edge `(x^(i)_i)_i`, i.e. the leftmost point of each level.
    pub fn left_edge(&self) -> Vec<i64> {
        self.levels.iter().map(|l| *l.last().unwrap()).collect()
    }
}

/// `Psi^(N)_k(x) = (R*_{(r,t]} o Q^{-1}_{(k,N]})(x, Y_k)`: a Laurent
/// polynomial entry, nonzero only for
/// `Y_k - (N-k) <= x <= Y_k + (t-r)`.
pub fn psi_top<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    r: usize,
    t: usize,
    k: usize,
    x: i64,
) -> S {
    let n = y.len();
    OpSpec::rstar_range(r, t)
        .then(OpSpec::qinv_range(k + 1, n))
        .entry(rates, x, y.pos(k))
        .expect("polynomial symbol never diverges")
}

/// Support interval of `Psi^(N)_k` in its argument.
pub fn psi_top_support(y: &ParticleConfig, r: usize, t: usize, k: usize) -> (i64, i64) {
    let n = y.len() as i64;
    let yk = y.pos(k);
    (yk - (n - k as i64), yk + (t - r) as i64)
}

/// The generalized functions `Psi^(n)_k = Q_{(n,N]} o Psi^(N)_k`; the
/// convolution is a finite sum over the support of `Psi^(N)_k`.
pub fn psi<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    r: usize,
    t: usize,
    n: usize,
    k: usize,
    x: i64,
) -> S {
    let big_n = y.len();
    assert!(n <= big_n && k >= 1 && k <= big_n);
    if n == big_n {
        return psi_top(y, rates, r, t, k, x);
    }
    let (lo, hi) = psi_top_support(y, r, t, k);
    let mut acc = S::zero();
    for z in lo..=hi {
        let link = q_range_entry(&rates.q, n + 1, big_n, x, z);
        if !link.is_zero() {
            acc = acc + link * psi_top(y, rates, r, t, k, z);
        }
    }
    acc
}

/// The biorthogonal system: overlap matrix `M`, its inverse, and the
/// `Psi`/`Phi` families. Requires the ordered regime `q_1 < q_2 < ...`.
///
/// `Psi^(N)` values are tabulated over their support at construction, and
/// the `Psi^(n)` convolutions are memoized, so repeated kernel evaluation
/// (Fredholm matrix assembly) stays cheap.
pub struct BiorthSystem<S: Scalar> {
    pub y: ParticleConfig,
    pub rates: Rates<S>,
    pub r: usize,
    pub t: usize,
    m: Vec<Vec<S>>,
    m_inv: Vec<Vec<S>>,
    /// `psi_polys[k-1] = (support lo, values over the support)`.
    psi_polys: Vec<(i64, Vec<S>)>,
    qchain_memo: RefCell<HashMap<(usize, i64), S>>,
    psi_memo: RefCell<HashMap<(usize, usize, i64), S>>,
}

impl<S: Scalar> BiorthSystem<S> {
    pub fn new(y: &ParticleConfig, rates: &Rates<S>, r: usize, t: usize) -> Result<Self> {
        rates.check_ordered_q()?;
        if y.len() != rates.num_particles() {
            return Err(Error::BadConfig("y and q lengths differ".into()));
        }
        if r > t || rates.horizon() < t {
            return Err(Error::BadConfig("need r <= t <= horizon".into()));
        }
        let n = y.len();
        let psi_polys: Vec<(i64, Vec<S>)> = (1..=n)
            .map(|k| {
                let (lo, hi) = psi_top_support(y, r, t, k);
                (lo, (lo..=hi).map(|x| psi_top(y, rates, r, t, k, x)).collect())
            })
            .collect();
        let mut m = vec![vec![S::zero(); n]; n];
        for i in 1..=n {
            for j in 1..=n {
                let (lo, _) = psi_polys[j - 1];
                let mut acc = S::zero();
                for (off, v) in psi_polys[j - 1].1.iter().enumerate() {
                    acc = acc + virtual_q_entry(rates, i, n, lo + off as i64)? * v.clone();
                }
                m[i - 1][j - 1] = acc;
            }
        }
        // Below-diagonal entries are structural zeros; in the float
        // backend they come out as roundoff residue and are cleared before
        // the triangular inversion.
        let scale = m
            .iter()
            .flat_map(|row| row.iter())
            .map(Scalar::abs_f64)
            .fold(0.0f64, f64::max);
        for i in 0..n {
            for j in 0..i {
                let ok = if S::EXACT {
                    m[i][j].is_zero()
                } else {
                    m[i][j].abs_f64() <= 1e-9 * scale
                };
                if !ok {
                    return Err(Error::InvalidConfig(format!(
                        "overlap matrix not upper-triangular at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
                m[i][j] = S::zero();
            }
        }
        let m_inv = invert_upper_triangular(&m);
        Ok(Self {
            y: y.clone(),
            rates: rates.clone(),
            r,
            t,
            m,
            m_inv,
            psi_polys,
            qchain_memo: RefCell::new(HashMap::new()),
            psi_memo: RefCell::new(HashMap::new()),
        })
    }

    fn psi_top_cached(&self, k: usize, x: i64) -> S {
        let (lo, vals) = &self.psi_polys[k - 1];
        let idx = x - lo;
        if idx < 0 || idx as usize >= vals.len() {
            S::zero()
        } else {
            vals[idx as usize].clone()
        }
    }

    /// `Q_{(n,N]}` entry at argument difference `d = x - z`, memoized.
    fn qchain_cached(&self, n: usize, d: i64) -> S {
        if let Some(v) = self.qchain_memo.borrow().get(&(n, d)) {
            return v.clone();
        }
        let big_n = self.num_particles();
        let v = q_range_entry(&self.rates.q, n + 1, big_n, d, 0);
        self.qchain_memo.borrow_mut().insert((n, d), v.clone());
        v
    }

    pub fn num_particles(&self) -> usize {
        self.y.len()
    }

    /// The overlap matrix `M_ij = sum_z Q_{[i,N]}(virtual, z) Psi^(N)_j(z)`.
    pub fn m_matrix(&self) -> &[Vec<S>] {
        &self.m
    }

    pub fn m_inverse(&self) -> &[Vec<S>] {
        &self.m_inv
    }

    /// Closed form for the diagonal: `q_i^(Y_i) prod_l (1 + p_l q_i)`.
    pub fn m_diagonal_closed_form(&self, i: usize) -> S {
        let qi = self.rates.q_at(i).clone();
        qi.powi(self.y.pos(i))
            * product(
                (self.r + 1..=self.t)
                    .map(|l| S::one() + self.rates.p_at(l).clone() * qi.clone()),
            )
    }

    pub fn psi(&self, n: usize, k: usize, x: i64) -> S {
        if n == self.num_particles() {
            return self.psi_top_cached(k, x);
        }
        if let Some(v) = self.psi_memo.borrow().get(&(n, k, x)) {
            return v.clone();
        }
        let (lo, vals) = &self.psi_polys[k - 1];
        let mut acc = S::zero();
        for (off, val) in vals.iter().enumerate() {
            let z = lo + off as i64;
            let link = self.qchain_cached(n, x - z);
            if !link.is_zero() {
                acc = acc + link * val.clone();
            }
        }
        self.psi_memo.borrow_mut().insert((n, k, x), acc.clone());
        acc
    }

    /// `Phi^(n)_i(x) = sum_{j=i..=n} [M^{-1}]_{ij} Q_{[j,n]}(virtual, x)`.
    pub fn phi(&self, n: usize, i: usize, x: i64) -> S {
        let mut acc = S::zero();
        for j in i..=n {
            let v = virtual_q_entry(&self.rates, j, n, x)
                .expect("ordered q was checked at construction");
            acc = acc + self.m_inv[i - 1][j - 1].clone() * v;
        }
        acc
    }

    /// The correlation kernel
    /// `K(m, x; n, x') = -Q_{(m,n]}(x,x') 1_{n>m} + sum_i Psi^(m)_i(x) Phi^(n)_i(x')`.
    pub fn correlation_kernel(&self, m: usize, x: i64, n: usize, xp: i64) -> S {
        let mut acc = if n > m {
            -q_range_entry(&self.rates.q, m + 1, n, x, xp)
        } else {
            S::zero()
        };
        for i in 1..=n {
            acc = acc + self.psi(m, i, x) * self.phi(n, i, xp);
        }
        acc
    }

    /// The biorthogonality sum `sum_x Psi^(n)_i(x) Phi^(n)_j(x)`, evaluated
    /// directly: a finite window up to `B`, plus the exact geometric tail
    /// above `B`, where both families are pure exponential sums. This is
    /// independent of the `M`-inversion identity that defines `Phi`.
    pub fn biorthogonal_sum(&self, n: usize, i: usize, j: usize) -> S {
        let big_n = self.num_particles();
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        for k in 1..=big_n {
            let (a, b) = psi_top_support(&self.y, self.r, self.t, k);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        // Psi^(n)_i vanishes below lo, and above b_cut it equals the
        // exponential sum sum_l b_l q_l^{-x} over l in (n, N].
        let b_cut = hi + (big_n - n) as i64;
        let mut acc = S::zero();
        for x in lo..=b_cut {
            acc = acc + self.psi(n, i, x) * self.phi(n, j, x);
        }
        if n == big_n {
            return acc; // Psi^(N) has finite support: no tail.
        }
        // Tail coefficients of Psi^(n)_i from the partial fractions of the
        // pure Q chain over the distinct q_{n+1..N}:
        //   Q_{(n,N]}(x,z) = sum_l q_l^{z - x + K - 1} / E_l for x - z >= K,
        // with E_l = prod_{j != l} (q_j - q_l).
        let k_len = (big_n - n) as i64;
        let (slo, shi) = psi_top_support(&self.y, self.r, self.t, i);
        for l in n + 1..=big_n {
            let ql = self.rates.q_at(l).clone();
            let mut e_l = S::one();
            for jj in n + 1..=big_n {
                if jj != l {
                    e_l = e_l * (self.rates.q_at(jj).clone() - ql.clone());
                }
            }
            let mut b_il = S::zero();
            for z in slo..=shi {
                b_il = b_il
                    + psi_top(&self.y, &self.rates, self.r, self.t, i, z)
                        * ql.powi(z + k_len - 1);
            }
            b_il = b_il / e_l;
            // Phi^(n)_j(x) = sum_k a_k q_k^x with
            // a_k = [M^{-1}]_{jk} q_k^(n-k) / prod_{m=k+1..=n} (q_m - q_k).
            for k in j..=n {
                let qk = self.rates.q_at(k).clone();
                let denom =
                    product((k + 1..=n).map(|m| self.rates.q_at(m).clone() - qk.clone()));
                let a_jk =
                    self.m_inv[j - 1][k - 1].clone() * qk.powi(n as i64 - k as i64) / denom;
                // sum_{x > B} (q_k/q_l)^x, convergent since q_k < q_l.
                let ratio = qk.clone() / ql.clone();
                let tail = ratio.powi(b_cut + 1) / (S::one() - ratio.clone());
                acc = acc + a_jk * b_il.clone() * tail;
            }
        }
        acc
    }
}

/// Weight of a triangular array under the determinantal measure, using the
/// virtual-row convention (auxiliary points at infinity) for the first row
/// of each level determinant.
pub fn dpp_weight<S: Scalar>(
    array: &TriangularArray,
    y: &ParticleConfig,
    rates: &Rates<S>,
    r: usize,
    t: usize,
) -> Result<S> {
    rates.check_ordered_q()?;
    let n = array.size();
    assert_eq!(n, y.len());
    let mut num = S::one();
    for k in 1..=n {
        let level = array.level(k);
        let m: Vec<Vec<S>> = (1..=k)
            .map(|i| {
                (1..=k)
                    .map(|j| {
                        let dst = level[j - 1];
                        if i == 1 {
                            // Virtual row: lim q_k^x Q_k(x, dst) = q_k^dst.
                            rates.q_at(k).powi(dst)
                        } else {
                            let src = array.level(k - 1)[i - 2];
                            if dst < src {
                                rates.q_at(k).powi(dst - src)
                            } else {
                                S::zero()
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        num = num * determinant(&m);
    }
    let top = array.level(n);
    let psi_det: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| psi_top(y, rates, r, t, i, top[j - 1]))
                .collect()
        })
        .collect();
    num = num * determinant(&psi_det);
    Ok(num / dpp_normalization(y, rates, r, t))
}

/// `Zbar = (-1)^(N(N-1)/2) prod_{ij} (1 + p_i q_j) prod_j q_j^(Y_j)`.
pub fn dpp_normalization<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    r: usize,
    t: usize,
) -> S {
    let n = y.len();
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    };
    sign * rates.normalization(r, t) * product((1..=n).map(|j| rates.q_at(j).powi(y.pos(j))))
}

/// Weight with explicit finite auxiliary points `x0[k-1] = x_0^(k-1)`
/// right of each level; the measure is independent of admissible choices.
pub fn dpp_weight_finite_aux<S: Scalar>(
    array: &TriangularArray,
    x0: &[i64],
    y: &ParticleConfig,
    rates: &Rates<S>,
    r: usize,
    t: usize,
) -> Result<S> {
    let n = array.size();
    assert!(x0.len() == n && y.len() == n);
    for k in 1..=n {
        if x0[k - 1] <= array.level(k)[0] {
            return Err(Error::OutsideValidity(format!(
                "auxiliary x0^({}) = {} must exceed the rightmost point {}",
                k - 1,
                x0[k - 1],
                array.level(k)[0]
            )));
        }
    }
    let mut num = S::one();
    for k in 1..=n {
        let level = array.level(k);
        let m: Vec<Vec<S>> = (1..=k)
            .map(|i| {
                let src = if i == 1 {
                    x0[k - 1]
                } else {
                    array.level(k - 1)[i - 2]
                };
                (1..=k)
                    .map(|j| {
                        let dst = level[j - 1];
                        if dst < src {
                            rates.q_at(k).powi(dst - src)
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        num = num * determinant(&m);
    }
    let top = array.level(n);
    let psi_det: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| psi_top(y, rates, r, t, i, top[j - 1]))
                .collect()
        })
        .collect();
    num = num * determinant(&psi_det);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    };
    let norm = sign
        * rates.normalization(r, t)
        * product((1..=n).map(|j| rates.q_at(j).powi(y.pos(j) - x0[j - 1])));
    Ok(num / norm)
}

/// Enumerates all triangular arrays with the given left edge whose points
/// do not exceed `hi`.
pub fn arrays_with_left_edge(edge: &[i64], hi: i64) -> Vec<TriangularArray> {
    fn extend(
        edge: &[i64],
        hi: i64,
        levels: &mut Vec<Vec<i64>>,
        out: &mut Vec<TriangularArray>,
    ) {
        let i = levels.len();
        if i == edge.len() {
            out.push(TriangularArray::new(levels.clone()).expect("built interlacing"));
            return;
        }
        // Build level i+1 on top of level i: the leftmost point is pinned
        // to edge[i]; the rest satisfy lower[j-1] <= v_j < lower[j-2].
        let lower = levels[i - 1].clone();
        let mut slots: Vec<Vec<i64>> = vec![vec![edge[i]]];
        for j in (1..=lower.len()).rev() {
            // v at position j (1-indexed within the new level).
            let lo = lower[j - 1];
            let hi_b = if j >= 2 { (lower[j - 2] - 1).min(hi) } else { hi };
            let mut next = Vec::new();
            for partial in &slots {
                let floor = *partial.last().unwrap();
                for v in lo.max(floor + 1)..=hi_b {
                    let mut ext = partial.clone();
                    ext.push(v);
                    next.push(ext);
                }
            }
            slots = next;
        }
        for filled in slots {
            // filled holds the new level right-to-left starting from the
            // pinned left edge; check the pinned point interlaces.
            if filled.len() == lower.len() + 1 && filled[0] < lower[lower.len() - 1] {
                let mut level: Vec<i64> = filled.clone();
                level.reverse();
                levels.push(level);
                extend(edge, hi, levels, out);
                levels.pop();
            }
        }
    }
    let mut out = Vec::new();
    if edge.is_empty() {
        return out;
    }
    let mut levels = vec![vec![edge[0]]];
    if edge.len() == 1 {
        return vec![TriangularArray::new(levels).unwrap()];
    }
    extend(edge, hi, &mut levels, &mut out);
    out
}

/// Result of a truncated Fredholm determinant with stabilization
/// diagnostics.
#[derive(Clone, Debug)]
pub struct FredholmResult<S> {
    pub value: S,
    /// Lower window edge at which the determinant stabilized.
    pub window_lo: i64,
    pub stabilized: bool,
    /// Absolute change between the last two window sizes.
    pub last_change: f64,
}

/// Evaluates `det(I - chi_s K chi_s)` over `{levels} x [window_lo, s_i)`
/// for a kernel given as a closure `(m, x, n, x') -> S`.
pub fn fredholm_det_window<S: Scalar>(
    kernel: &dyn Fn(usize, i64, usize, i64) -> S,
    query: &Query,
    window_lo: i64,
) -> S {
    let mut index: Vec<(usize, i64)> = Vec::new();
    for &(k, s) in query {
        for x in window_lo..s {
            index.push((k, x));
        }
    }
    let dim = index.len();
    let mut m = vec![vec![S::zero(); dim]; dim];
    for (a, &(ka, xa)) in index.iter().enumerate() {
        for (b, &(kb, xb)) in index.iter().enumerate() {
            let delta = if a == b { S::one() } else { S::zero() };
            m[a][b] = delta - kernel(ka, xa, kb, xb);
        }
    }
    determinant(&m)
}

const WINDOW_STEP: i64 = 5;
const MAX_GROWTH_ROUNDS: usize = 24;

/// Grows the window downward from `start_lo` in steps of 5 until two
/// successive determinants agree (exactly in the rational backend, below
/// 1e-12 in floats).
pub fn fredholm_det_stabilized<S: Scalar>(
    kernel: &dyn Fn(usize, i64, usize, i64) -> S,
    query: &Query,
    start_lo: i64,
) -> Result<FredholmResult<S>> {
    if query.is_empty() {
        return Ok(FredholmResult {
            value: S::one(),
            window_lo: start_lo,
            stabilized: true,
            last_change: 0.0,
        });
    }
    // Entries are reused as the window grows.
    let memo: RefCell<HashMap<(usize, i64, usize, i64), S>> = RefCell::new(HashMap::new());
    let cached = |m: usize, x: i64, n: usize, xp: i64| -> S {
        if let Some(v) = memo.borrow().get(&(m, x, n, xp)) {
            return v.clone();
        }
        let v = kernel(m, x, n, xp);
        memo.borrow_mut().insert((m, x, n, xp), v.clone());
        v
    };
    let mut lo = start_lo;
    let mut prev = fredholm_det_window(&cached, query, lo);
    for _ in 0..MAX_GROWTH_ROUNDS {
        lo -= WINDOW_STEP;
        let next = fredholm_det_window(&cached, query, lo);
        let change = (next.clone() - prev.clone()).abs_f64();
        let settled = if S::EXACT { next == prev } else { change < 1e-12 };
        if settled {
            return Ok(FredholmResult {
                value: next,
                window_lo: lo,
                stabilized: true,
                last_change: change,
            });
        }
        prev = next;
    }
    Err(Error::NoStabilization(format!(
        "no convergence by window_lo = {lo}; last value {prev}"
    )))
}

/// Which kernel construction backs the Fredholm determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelRoute {
    /// Biorthogonal route (requires ordered q).
    Biorthogonal,
    /// Random-walk-hitting route (requires pairwise distinct q).
    Hitting,
}

/// Dense tabulation of a correlation kernel over `levels x [lo, hi]`,
/// reproducible from its inputs.
#[derive(Clone, Debug)]
pub struct KernelTable<S> {
    pub levels: Vec<usize>,
    pub lo: i64,
    pub hi: i64,
    pub backend: &'static str,
    /// Row-major over the flattened index `(level, x)`.
    pub entries: Vec<Vec<S>>,
}

impl<S: Scalar> KernelTable<S> {
    pub fn index(&self) -> Vec<(usize, i64)> {
        self.levels
            .iter()
            .flat_map(|&k| (self.lo..=self.hi).map(move |x| (k, x)))
            .collect()
    }
}

/// Tabulates the kernel over a window; rows are filled in parallel, each
/// worker holding its own evaluator so the memo caches stay thread-local.
pub fn tabulate_kernel<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    route: KernelRoute,
    levels: &[usize],
    lo: i64,
    hi: i64,
) -> Result<KernelTable<S>> {
    use rayon::prelude::*;
    // Validate up front so worker construction cannot fail.
    match route {
        KernelRoute::Biorthogonal => drop(BiorthSystem::new(y, rates, 0, t)?),
        KernelRoute::Hitting => drop(hitting::HittingKernel::new(y, rates, t)?),
    }
    let index: Vec<(usize, i64)> = levels
        .iter()
        .flat_map(|&k| (lo..=hi).map(move |x| (k, x)))
        .collect();
    let entries: Vec<Vec<S>> = index
        .par_iter()
        .map_init(
            || match route {
                KernelRoute::Biorthogonal => RowEvaluator::Biorth(
                    BiorthSystem::new(y, rates, 0, t).expect("validated above"),
                ),
                KernelRoute::Hitting => RowEvaluator::Hitting(
                    hitting::HittingKernel::new(y, rates, t).expect("validated above"),
                ),
            },
            |eval, &(m, x)| {
                index
                    .iter()
                    .map(|&(n, xp)| match eval {
                        RowEvaluator::Biorth(sys) => sys.correlation_kernel(m, x, n, xp),
                        RowEvaluator::Hitting(hk) => hk.entry(m, x, n, xp),
                    })
                    .collect()
            },
        )
        .collect();
    Ok(KernelTable {
        levels: levels.to_vec(),
        lo,
        hi,
        backend: S::NAME,
        entries,
    })
}

enum RowEvaluator<S: Scalar> {
    Biorth(BiorthSystem<S>),
    Hitting(hitting::HittingKernel<S>),
}

/// Multipoint probability `P(Y_{k_i}(t) >= s_i for all i | Y(0) = y)` via
/// the Fredholm determinant of the chosen kernel route, with the default
/// truncation window.
pub fn multipoint_prob_kernel<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    query: &Query,
    route: KernelRoute,
) -> Result<FredholmResult<S>> {
    multipoint_prob_kernel_windowed(y, rates, t, query, route, None)
}

/// As [`multipoint_prob_kernel`], with an optional override of the initial
/// window lower edge (default `y_N - N - t - 2`).
pub fn multipoint_prob_kernel_windowed<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    query: &Query,
    route: KernelRoute,
    window_lo: Option<i64>,
) -> Result<FredholmResult<S>> {
    rates.check_kernel_regime()?;
    for w in query.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::BadConfig(
                "query particle indices must be strictly increasing".into(),
            ));
        }
    }
    if query.iter().any(|&(k, _)| k == 0 || k > y.len()) {
        return Err(Error::BadConfig("query particle index out of range".into()));
    }
    let n = y.len();
    let start_lo = window_lo.unwrap_or(y.pos(n) - n as i64 - t as i64 - 2);
    match route {
        KernelRoute::Biorthogonal => {
            let system = BiorthSystem::new(y, rates, 0, t)?;
            let kernel = move |m: usize, x: i64, nn: usize, xp: i64| {
                system.correlation_kernel(m, x, nn, xp)
            };
            fredholm_det_stabilized(&kernel, query, start_lo)
        }
        KernelRoute::Hitting => {
            let hk = hitting::HittingKernel::new(y, rates, t)?;
            let kernel =
                move |m: usize, x: i64, nn: usize, xp: i64| hk.entry(m, x, nn, xp);
            fredholm_det_stabilized(&kernel, query, start_lo)
        }
    }
}
