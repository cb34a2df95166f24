//! Local Toeplitz operators and their compositions; the link kernels built
//! from non-intersecting path ensembles (as determinants of h/e entries);
//! the intertwined particle transition kernel; and the virtual-variable
//! entries used by the determinantal-process machinery.

mod symbol;

pub use symbol::{Factor, Side, Symbol};

use crate::combinatorics::{complete_h, elementary_e, schur, Partition};
use crate::dynamics::{ParticleConfig, Rates};
use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::scalar::{product, Scalar};

/// An elementary local operator, indexed into the rate vectors (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalOp {
    /// Geometric jump strictly left: `Q_i(x,y) = q_i^(y-x) 1_{y<x}`.
    Q(usize),
    /// Inverse of `Q_i`: `-1_{y=x} + q_i 1_{y=x+1}`.
    QInv(usize),
    /// Geometric jump weakly right: `Qdag_i(x,y) = q_i^(y-x) 1_{y>=x}`.
    QDag(usize),
    /// Bernoulli step right: `R_i(x,y) = 1_{y=x} + p_i 1_{y=x+1}`.
    R(usize),
    /// Adjoint Bernoulli step: `R*_i(x,y) = 1_{y=x} + p_i 1_{y=x-1}`.
    RStar(usize),
    /// Inverse adjoint step: `(R*_i)^{-1}(x,y) = (-p_i)^(y-x) 1_{y<=x}`.
    RStarInv(usize),
}

/// An ordered composition of local operators. Entries are evaluated through
/// the joint Toeplitz symbol, so a divergent composition (empty annulus of
/// joint analyticity) is rejected rather than silently mis-summed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpSpec {
    pub factors: Vec<LocalOp>,
}

impl OpSpec {
    pub fn new(factors: impl Into<Vec<LocalOp>>) -> Self {
        Self {
            factors: factors.into(),
        }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// `Q_{[m,n]} = Q_m o ... o Q_n` (empty when `m > n`).
    pub fn q_range(m: usize, n: usize) -> Self {
        Self::new((m..=n).map(LocalOp::Q).collect::<Vec<_>>())
    }

    /// `Q^{-1}_{[m,n]} = Q_n^{-1} o ... o Q_m^{-1}`.
    pub fn qinv_range(m: usize, n: usize) -> Self {
        Self::new((m..=n).rev().map(LocalOp::QInv).collect::<Vec<_>>())
    }

    /// `Qdag_{[m,n]}`.
    pub fn qdag_range(m: usize, n: usize) -> Self {
        Self::new((m..=n).map(LocalOp::QDag).collect::<Vec<_>>())
    }

    /// `R_{(r,t]} = R_{r+1} o ... o R_t`.
    pub fn r_range(r: usize, t: usize) -> Self {
        Self::new((r + 1..=t).map(LocalOp::R).collect::<Vec<_>>())
    }

    /// `R*_{(r,t]} = R*_t o ... o R*_{r+1}`.
    pub fn rstar_range(r: usize, t: usize) -> Self {
        Self::new((r + 1..=t).rev().map(LocalOp::RStar).collect::<Vec<_>>())
    }

    pub fn then(mut self, other: Self) -> Self {
        self.factors.extend(other.factors);
        self
    }

    /// The joint symbol of the composition under the given rates.
    pub fn symbol<S: Scalar>(&self, rates: &Rates<S>) -> Symbol<S> {
        let mut sym = Symbol::identity();
        for op in &self.factors {
            let factor_sym = match *op {
                LocalOp::Q(i) => Symbol {
                    constant: S::one(),
                    zpow: 1,
                    num: vec![],
                    den: vec![(Factor::QMinusZ(rates.q_at(i).clone()), Side::Inside)],
                },
                LocalOp::QInv(i) => Symbol {
                    constant: S::one(),
                    zpow: -1,
                    num: vec![Factor::QMinusZ(rates.q_at(i).clone())],
                    den: vec![],
                },
                LocalOp::QDag(i) => Symbol {
                    constant: -S::one(),
                    zpow: 1,
                    num: vec![],
                    den: vec![(Factor::QMinusZ(rates.q_at(i).clone()), Side::Outside)],
                },
                LocalOp::R(i) => {
                    let p = rates.p_at(i).clone();
                    Symbol {
                        constant: p.clone(),
                        zpow: -1,
                        num: vec![Factor::OnePlusPZ(S::one() / p)],
                        den: vec![],
                    }
                }
                LocalOp::RStar(i) => Symbol {
                    constant: S::one(),
                    zpow: 0,
                    num: vec![Factor::OnePlusPZ(rates.p_at(i).clone())],
                    den: vec![],
                },
                LocalOp::RStarInv(i) => Symbol {
                    constant: S::one(),
                    zpow: 0,
                    num: vec![],
                    den: vec![(Factor::OnePlusPZ(rates.p_at(i).clone()), Side::Inside)],
                },
            };
            sym = sym.compose(factor_sym);
        }
        sym
    }

    /// Exact entry of the composed operator.
    pub fn entry<S: Scalar>(&self, rates: &Rates<S>, x: i64, y: i64) -> Result<S> {
        self.symbol(rates).entry(x, y)
    }
}

// ---------------------------------------------------------------------------
// Closed-form entries for pure chains (valid for repeated parameters too).
// ---------------------------------------------------------------------------

/// `Qdag_{[m,n]}(x,y) = h_{y-x}(q_m..q_n)`; the empty chain is the identity.
pub fn qdag_range_entry<S: Scalar>(q: &[S], m: usize, n: usize, x: i64, y: i64) -> S {
    if m > n {
        return if x == y { S::one() } else { S::zero() };
    }
    complete_h(y - x, &q[m - 1..n])
}

/// `Q_{[m,n]}(x,y)`: with `K` factors this is
/// `prod q^{-1} * h_{x-y-K}(q_m^{-1}..q_n^{-1})`, supported on `x - y >= K`.
pub fn q_range_entry<S: Scalar>(q: &[S], m: usize, n: usize, x: i64, y: i64) -> S {
    if m > n {
        return if x == y { S::one() } else { S::zero() };
    }
    let k = (n - m + 1) as i64;
    if x - y < k {
        return S::zero();
    }
    let inv: Vec<S> = q[m - 1..n].iter().map(|v| S::one() / v.clone()).collect();
    product(inv.iter().cloned()) * complete_h(x - y - k, &inv)
}

/// `Q^{-1}_{[m,n]}(x,y) = (-1)^(y-x+K) e_{y-x}(q_m..q_n)` with `K = n-m+1`.
pub fn qinv_range_entry<S: Scalar>(q: &[S], m: usize, n: usize, x: i64, y: i64) -> S {
    if m > n {
        return if x == y { S::one() } else { S::zero() };
    }
    let k = (n - m + 1) as i64;
    let sign = if (y - x + k).rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    };
    sign * elementary_e(y - x, &q[m - 1..n])
}

/// `R_{(r,t]}(x,y) = e_{y-x}(p_{r+1}..p_t)`.
pub fn r_range_entry<S: Scalar>(p: &[S], r: usize, t: usize, x: i64, y: i64) -> S {
    elementary_e(y - x, &p[r..t])
}

/// `R*_{(r,t]}(x,y) = R_{(r,t]}(y,x)`.
pub fn rstar_range_entry<S: Scalar>(p: &[S], r: usize, t: usize, x: i64, y: i64) -> S {
    r_range_entry(p, r, t, y, x)
}

/// `Q_{[m,n]}` including the interval-reversed reading: for `m = n+1` this
/// is the identity, and for `m > n+1` the composition collapses to the pure
/// inverse chain `Q^{-1}_{[n+1,m-1]}` (an inverse-only composition, flagged
/// here so callers cannot mistake it for a genuine `Q` chain).
pub fn q_composition_entry<S: Scalar>(q: &[S], m: usize, n: usize, x: i64, y: i64) -> S {
    if m <= n {
        q_range_entry(q, m, n, x, y)
    } else if m == n + 1 {
        if x == y {
            S::one()
        } else {
            S::zero()
        }
    } else {
        qinv_range_entry(q, n + 1, m - 1, x, y)
    }
}

/// Virtual-variable entry `Q_{[j,k]}(x_0^{(j-1)}, y)` with the first
/// argument regarded as +infinity:
/// `q_j^{y+k-j} / prod_{l=j+1..=k} (q_l - q_j)`, and 0 for `k < j`.
///
/// Valid under the ordered regime `q_1 < q_2 < ...`, which makes the
/// defining sum converge.
pub fn virtual_q_entry<S: Scalar>(rates: &Rates<S>, j: usize, k: usize, y: i64) -> Result<S> {
    rates.check_ordered_q()?;
    if k < j {
        return Ok(S::zero());
    }
    let qj = rates.q_at(j).clone();
    let denom = product((j + 1..=k).map(|l| rates.q_at(l).clone() - qj.clone()));
    Ok(qj.powi(y + k as i64 - j as i64) / denom)
}

/// `Qbar_{[j,k]}(x,y)`: the two-sided extension shared by the `Q` and
/// `Qdag` chains, equal to `Q_{[j,k]}(x,y)` for `x > y` and
/// `(-1)^(k-j) Qdag_{[j,k]}(x,y)` for `x <= y`. For `j = k` this collapses
/// to `q_k^(y-x)` on all of Z.
pub fn qbar_entry<S: Scalar>(q: &[S], j: usize, k: usize, x: i64, y: i64) -> S {
    assert!(j <= k, "Qbar needs a nonempty index interval");
    if x > y {
        q_range_entry(q, j, k, x, y)
    } else {
        let sign = if (k - j).is_multiple_of(2) { S::one() } else { -S::one() };
        sign * qdag_range_entry(q, j, k, x, y)
    }
}

/// `Qhat_{[j,k]} = prod_{l=j..=k} (q_l - 1) * Qbar_{[j,k]}`.
pub fn qhat_entry<S: Scalar>(q: &[S], j: usize, k: usize, x: i64, y: i64) -> S {
    let norm = product(q[j - 1..k].iter().map(|v| v.clone() - S::one()));
    norm * qbar_entry(q, j, k, x, y)
}

// ---------------------------------------------------------------------------
// Link kernels and the intertwined transition kernel (weak coordinates).
// ---------------------------------------------------------------------------

fn check_weakly_decreasing(v: &[i64]) -> Result<()> {
    if v.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidConfig(format!(
            "vector not weakly decreasing: {v:?}"
        )));
    }
    Ok(())
}

/// The link kernel `Lambda(la, y')` as the determinant of weakly-right
/// geometric chains: `det( Qdag_{(i,N]}(y'_i - i, la_j - j) )`.
pub fn lambda_kernel<S: Scalar>(q: &[S], la: &[i64], y_prime: &[i64]) -> Result<S> {
    check_weakly_decreasing(la)?;
    check_weakly_decreasing(y_prime)?;
    let n = q.len();
    assert!(la.len() == n && y_prime.len() == n);
    let m: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    qdag_range_entry(
                        q,
                        i + 1,
                        n,
                        y_prime[i - 1] - i as i64,
                        la[j - 1] - j as i64,
                    )
                })
                .collect()
        })
        .collect();
    Ok(determinant(&m))
}

/// The inverse link kernel:
/// `Lambda^{-1}(y, mu) = det( (-1)^(N-j) Q^{-1}_{(j,N]}(mu_i - i, y_j - j) )`.
pub fn lambda_inverse_kernel<S: Scalar>(q: &[S], y: &[i64], mu: &[i64]) -> Result<S> {
    check_weakly_decreasing(y)?;
    check_weakly_decreasing(mu)?;
    let n = q.len();
    assert!(y.len() == n && mu.len() == n);
    let m: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let sign = if (n - j).is_multiple_of(2) { S::one() } else { -S::one() };
                    sign * qinv_range_entry(
                        q,
                        j + 1,
                        n,
                        mu[i - 1] - i as i64,
                        y[j - 1] - j as i64,
                    )
                })
                .collect()
        })
        .collect();
    Ok(determinant(&m))
}

/// Unnormalized diagonal-step kernel:
/// `det( R_{(r,t]}(mu_i - i, la_j - j) ) = Z_{(r,t]} * R_{(r,t]}(mu, la)`.
pub fn r_kernel_det<S: Scalar>(
    rates: &Rates<S>,
    r: usize,
    t: usize,
    mu: &[i64],
    la: &[i64],
) -> Result<S> {
    check_weakly_decreasing(mu)?;
    check_weakly_decreasing(la)?;
    let n = mu.len();
    assert_eq!(la.len(), n);
    let m: Vec<Vec<S>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    r_range_entry(&rates.p, r, t, mu[i - 1] - i as i64, la[j - 1] - j as i64)
                })
                .collect()
        })
        .collect();
    Ok(determinant(&m))
}

/// Normalized `R_{(r,t]}(mu, la)` (the shape kernel without its Doob
/// factor).
pub fn r_kernel<S: Scalar>(
    rates: &Rates<S>,
    r: usize,
    t: usize,
    mu: &[i64],
    la: &[i64],
) -> Result<S> {
    Ok(r_kernel_det(rates, r, t, mu, la)? / rates.normalization(r, t))
}

/// Doob-transformed shape transition kernel
/// `Rhat(mu, la) = s_la(q)/s_mu(q) * R_{(r,t]}(mu, la)`, a probability
/// kernel on partitions.
pub fn r_hat_kernel<S: Scalar>(
    rates: &Rates<S>,
    r: usize,
    t: usize,
    mu: &Partition,
    la: &Partition,
) -> Result<S> {
    let n = rates.num_particles();
    let mu_v: Vec<i64> = (1..=n).map(|i| mu.part(i)).collect();
    let la_v: Vec<i64> = (1..=n).map(|i| la.part(i)).collect();
    let s_mu = schur(mu, &rates.q);
    if s_mu.is_zero() {
        return Err(Error::InvalidConfig(format!("schur vanishes at {mu}")));
    }
    Ok(schur(la, &rates.q) / s_mu * r_kernel(rates, r, t, &mu_v, &la_v)?)
}

/// Enumerates weakly decreasing integer vectors `v` with
/// `lo[i] <= v[i] <= hi[i]`.
pub fn weakly_decreasing_in_ranges(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    assert_eq!(lo.len(), hi.len());
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lo.len());
    fn rec(lo: &[i64], hi: &[i64], i: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == lo.len() {
            out.push(cur.clone());
            return;
        }
        let top = if i == 0 { hi[i] } else { hi[i].min(cur[i - 1]) };
        for v in lo[i]..=top {
            cur.push(v);
            rec(lo, hi, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(lo, hi, 0, &mut cur, &mut out);
    out
}

/// dTASEP transition kernel in the weak (shape) coordinates,
/// `Q_{(r,t]}(y, y')`, assembled through the intertwining
/// `prod q_i^(y'_i - y_i) * (Lambda^{-1} R_{(r,t]} Lambda)(y, y')`.
/// The partition sums are finite: the `R` determinant vanishes unless each
/// coordinate advances by at most `t - r`, and `Lambda^{-1}` unless `mu`
/// stays within `N` of `y`.
pub fn transition_weak<S: Scalar>(
    rates: &Rates<S>,
    r: usize,
    t: usize,
    y: &[i64],
    y_prime: &[i64],
) -> Result<S> {
    check_weakly_decreasing(y)?;
    check_weakly_decreasing(y_prime)?;
    let n = rates.num_particles();
    assert!(y.len() == n && y_prime.len() == n);
    let steps = (t - r) as i64;
    let mu_lo: Vec<i64> = y.iter().map(|v| v - n as i64).collect();
    let la_hi: Vec<i64> = y.iter().map(|v| v + steps).collect();
    let mut acc = S::zero();
    for mu in weakly_decreasing_in_ranges(&mu_lo, y) {
        let left = lambda_inverse_kernel(&rates.q, y, &mu)?;
        if left.is_zero() {
            continue;
        }
        for la in weakly_decreasing_in_ranges(y_prime, &la_hi) {
            let mid = r_kernel_det(rates, r, t, &mu, &la)?;
            if mid.is_zero() {
                continue;
            }
            let right = lambda_kernel(&rates.q, &la, y_prime)?;
            acc = acc + left.clone() * mid * right;
        }
    }
    let prefactor = product(
        (0..n).map(|i| rates.q[i].powi(y_prime[i] - y[i])),
    );
    Ok(prefactor * acc / rates.normalization(r, t))
}

/// dTASEP transition probability between strict particle configurations
/// (`y_k` strictly decreasing); shifts into the weak coordinates
/// `y_k + k` at the boundary.
pub fn transition_strict<S: Scalar>(
    rates: &Rates<S>,
    r: usize,
    t: usize,
    y: &ParticleConfig,
    y_prime: &ParticleConfig,
) -> Result<S> {
    let shift = |c: &ParticleConfig| -> Vec<i64> {
        c.positions()
            .iter()
            .zip(1i64..)
            .map(|(v, k)| v + k)
            .collect()
    };
    transition_weak(rates, r, t, &shift(y), &shift(y_prime))
}

// ---------------------------------------------------------------------------
// Equality of the two determinant products over a strictly interlacing
// triangular array.
// ---------------------------------------------------------------------------

/// A triangular array `x^(i)_j` (`1 <= j <= i <= N`) together with the
/// auxiliary points below the left edge (`below[j-1] = x_j^(j-1)`) and to
/// the right of each level (`above[k-1] = x_0^(k-1)`).
#[derive(Clone, Debug)]
pub struct StrictTriangle {
    pub levels: Vec<Vec<i64>>,
    pub below: Vec<i64>,
    pub above: Vec<i64>,
}

impl StrictTriangle {
    pub fn size(&self) -> usize {
        self.levels.len()
    }

    /// Extended lookup: `j = 0` reads the `above` auxiliaries, `j = i + 1`
    /// the `below` auxiliaries.
    fn x(&self, i: usize, j: usize) -> Option<i64> {
        if j == 0 {
            return self.above.get(i).copied();
        }
        if j == i + 1 {
            return self.below.get(j - 1).copied();
        }
        self.levels.get(i - 1).and_then(|l| l.get(j - 1)).copied()
    }

    /// The strict interlacing constraints
    /// `x_j^(i) < x_{j-1}^(i-1) <= x_{j-1}^(i)` over the extended array;
    /// constraints touching auxiliaries that do not exist (top corner,
    /// below the last level) are vacuous.
    pub fn is_strictly_interlacing(&self) -> bool {
        let n = self.size();
        for i in 1..=n {
            for j in 1..=i + 1 {
                let a = self.x(i, j);
                let b = self.x(i - 1, j - 1);
                let c = self.x(i, j - 1);
                if let (Some(a), Some(b)) = (a, b) {
                    if !(a < b) {
                        return false;
                    }
                }
                if let (Some(b), Some(c)) = (b, c) {
                    if !(b <= c) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Outcome of the determinant-product identity over a strict triangle.
#[derive(Clone, Debug)]
pub struct DetEqualityOutcome<S> {
    pub lhs: S,
    pub rhs: S,
    pub interlacing: bool,
}

/// Evaluates both sides of the product-of-determinants identity relating
/// weakly-right (`Qdag`) and strictly-left (`Q`) path weights over a
/// strictly interlacing triangular array. When interlacing fails, both
/// products vanish and the outcome is flagged.
pub fn det_equality_check<S: Scalar>(q: &[S], tri: &StrictTriangle) -> DetEqualityOutcome<S> {
    let n = tri.size();
    assert!(q.len() >= n && tri.below.len() >= n && tri.above.len() >= n);
    let mut lhs = S::one();
    let mut rhs = S::one();
    for k in 1..=n {
        let qk = &q[k - 1];
        // Row sources for the Qdag side: x_i^(k-1), where i = k reads the
        // below auxiliary.
        let left_rows: Vec<i64> = (1..=k).map(|i| tri.x(k - 1, i).unwrap()).collect();
        let m_left: Vec<Vec<S>> = left_rows
            .iter()
            .map(|&src| {
                (1..=k)
                    .map(|j| {
                        let dst = tri.x(k, j).unwrap();
                        if dst >= src {
                            qk.powi(dst - src)
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        lhs = lhs * qk.powi(tri.below[k - 1]) * determinant(&m_left);

        // Row sources for the Q side: x_{i-1}^(k-1), where i = 1 reads the
        // above auxiliary.
        let right_rows: Vec<i64> = (1..=k).map(|i| tri.x(k - 1, i - 1).unwrap()).collect();
        let m_right: Vec<Vec<S>> = right_rows
            .iter()
            .map(|&src| {
                (1..=k)
                    .map(|j| {
                        let dst = tri.x(k, j).unwrap();
                        if dst < src {
                            qk.powi(dst - src)
                        } else {
                            S::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        rhs = rhs * qk.powi(tri.above[k - 1]) * determinant(&m_right);
    }
    DetEqualityOutcome {
        lhs,
        rhs,
        interlacing: tri.is_strictly_interlacing(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::enumerate_transition;
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    fn rates23() -> Rates<BigRational> {
        Rates::new(vec![rat(1, 4), rat(1, 3)], vec![rat(3, 2), rat(2, 1)]).unwrap()
    }

    #[test]
    fn spec_entry_examples() {
        let rates = rates23();
        // Q_2(3,1) with q_2 = 2.
        let e = OpSpec::new([LocalOp::Q(2)]).entry(&rates, 3, 1).unwrap();
        assert_eq!(e, rat(1, 4));
        // (Q_1^{-1} o R*_1)(x,x) = p_1 q_1 - 1.
        let e = OpSpec::new([LocalOp::QInv(1), LocalOp::RStar(1)])
            .entry(&rates, 0, 0)
            .unwrap();
        assert_eq!(e, rat(1, 4) * rat(3, 2) - rat(1, 1));
        // Q_{[1,2]}(3,0) with q = (2,3).
        let rates2 = Rates::new(vec![rat(1, 4)], vec![rat(2, 1), rat(3, 1)]).unwrap();
        let e = OpSpec::q_range(1, 2).entry(&rates2, 3, 0).unwrap();
        assert_eq!(e, rat(5, 36));
        assert_eq!(q_range_entry(&rates2.q, 1, 2, 3, 0), rat(5, 36));
    }

    #[test]
    fn chain_closed_forms_match_symbol_route() {
        let rates = Rates::new(
            vec![rat(1, 4), rat(1, 3), rat(1, 5)],
            vec![rat(3, 2), rat(2, 1), rat(3, 1)],
        )
        .unwrap();
        for x in -4..=4 {
            for y in -4..=4 {
                assert_eq!(
                    q_range_entry(&rates.q, 1, 3, x, y),
                    OpSpec::q_range(1, 3).entry(&rates, x, y).unwrap()
                );
                assert_eq!(
                    qdag_range_entry(&rates.q, 2, 3, x, y),
                    OpSpec::qdag_range(2, 3).entry(&rates, x, y).unwrap()
                );
                assert_eq!(
                    qinv_range_entry(&rates.q, 1, 3, x, y),
                    OpSpec::qinv_range(1, 3).entry(&rates, x, y).unwrap()
                );
                assert_eq!(
                    r_range_entry(&rates.p, 0, 3, x, y),
                    OpSpec::r_range(0, 3).entry(&rates, x, y).unwrap()
                );
                assert_eq!(
                    rstar_range_entry(&rates.p, 1, 3, x, y),
                    OpSpec::rstar_range(1, 3).entry(&rates, x, y).unwrap()
                );
            }
        }
    }

    #[test]
    fn toeplitz_shift_invariance() {
        let rates = rates23();
        let spec = OpSpec::new([LocalOp::QInv(2), LocalOp::RStar(1), LocalOp::Q(1)]);
        for x in -3..=3 {
            for y in -3..=3 {
                for c in [-2i64, 1, 5] {
                    assert_eq!(
                        spec.entry(&rates, x, y).unwrap(),
                        spec.entry(&rates, x + c, y + c).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn inverse_pairs_cancel_on_windows() {
        let rates = rates23();
        for i in 1..=2 {
            let spec = OpSpec::new([LocalOp::Q(i), LocalOp::QInv(i)]);
            for x in -3..=3 {
                for y in -3..=3 {
                    let expect = if x == y { rat(1, 1) } else { rat(0, 1) };
                    assert_eq!(spec.entry(&rates, x, y).unwrap(), expect);
                }
            }
        }
        let spec = OpSpec::new([LocalOp::RStar(2), LocalOp::RStarInv(2)]);
        for x in -3..=3 {
            let expect = if x == 0 { rat(1, 1) } else { rat(0, 1) };
            assert_eq!(spec.entry(&rates, x, 0).unwrap(), expect);
        }
    }

    #[test]
    fn lambda_identity_for_single_particle() {
        // With one particle the link kernel is the identity.
        let q = vec![rat(3, 2)];
        assert_eq!(lambda_kernel(&q, &[5], &[5]).unwrap(), rat(1, 1));
        assert_eq!(lambda_kernel(&q, &[5], &[4]).unwrap(), rat(0, 1));
        assert_eq!(
            lambda_inverse_kernel(&q, &[5], &[5]).unwrap(),
            rat(1, 1)
        );
    }

    #[test]
    fn lambda_times_inverse_is_identity() {
        // (Lambda o Lambda^{-1})(la, mu) = delta on a window, N = 2 and 3.
        for q in [
            vec![rat(3, 2), rat(2, 1)],
            vec![rat(3, 2), rat(2, 1), rat(3, 1)],
        ] {
            let n = q.len();
            let lo: Vec<i64> = (0..n as i64).map(|i| -1 - i).collect();
            let hi: Vec<i64> = (0..n as i64).map(|i| 2 - i).collect();
            let configs = weakly_decreasing_in_ranges(&lo, &hi);
            for la in &configs {
                for mu in &configs {
                    let mut acc = rat(0, 1);
                    // Lambda(la, y) vanishes unless y <= la coordinatewise
                    // (paths only move right), so the y-sum is finite.
                    let y_lo: Vec<i64> = lo.iter().map(|v| v - n as i64 - 1).collect();
                    for y in weakly_decreasing_in_ranges(&y_lo, la) {
                        acc += lambda_kernel(&q, la, &y).unwrap()
                                * lambda_inverse_kernel(&q, &y, mu).unwrap();
                    }
                    let expect = if la == mu { rat(1, 1) } else { rat(0, 1) };
                    assert_eq!(acc, expect, "la {la:?} mu {mu:?}");
                }
            }
        }
    }

    #[test]
    fn inverse_times_lambda_is_identity() {
        // The reverse composition (Lambda^{-1} o Lambda)(y, y'') = delta on
        // the position side; the mu-sum is supported on [y - N, y].
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        let n = q.len();
        let lo = vec![1i64, -1, -3];
        let hi = vec![3i64, 1, -1];
        let configs = weakly_decreasing_in_ranges(&lo, &hi);
        for y in &configs {
            for y2 in &configs {
                let mu_lo: Vec<i64> = y.iter().map(|v| v - n as i64).collect();
                let mut acc = rat(0, 1);
                for mu in weakly_decreasing_in_ranges(&mu_lo, y) {
                    acc += lambda_inverse_kernel(&q, y, &mu).unwrap()
                            * lambda_kernel(&q, &mu, y2).unwrap();
                }
                let expect = if y == y2 { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(acc, expect, "y {y:?} y'' {y2:?}");
            }
        }
    }

    #[test]
    fn lambda_matches_left_edge_chain_sum() {
        // The defining combinatorial form: K(la, y) sums over interlacing
        // chains with shape la and left edge y, weighted q_j^{cells added
        // at level j}; Lambda is q^{-y} K. Checked against the determinant
        // form on all shapes in a 3x3 box.
        use crate::combinatorics::{interlacing_predecessors, partitions_in_box, Partition};
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        let n = 3usize;
        fn chains(la: &Partition, k: usize) -> Vec<Vec<Partition>> {
            if k == 0 {
                return if la.is_empty() {
                    vec![vec![Partition::empty()]]
                } else {
                    vec![]
                };
            }
            let mut out = Vec::new();
            for mu in interlacing_predecessors(la, k - 1) {
                for mut chain in chains(&mu, k - 1) {
                    chain.push(la.clone());
                    out.push(chain);
                }
            }
            out
        }
        for la in partitions_in_box(n, 3) {
            if la.len() > n {
                continue;
            }
            // Group the chain weights by left edge.
            let mut by_edge: std::collections::BTreeMap<Vec<i64>, BigRational> =
                std::collections::BTreeMap::new();
            for chain in chains(&la, n) {
                let mut w = rat(1, 1);
                for j in 1..=n {
                    w *= q[j - 1].powi(chain[j].size() - chain[j - 1].size());
                }
                let edge: Vec<i64> = (1..=n).map(|k| chain[k].part(k)).collect();
                let slot = by_edge.entry(edge).or_insert_with(|| rat(0, 1));
                *slot = slot.clone() + w;
            }
            // Compare on every candidate left edge in a window.
            let la_vec: Vec<i64> = (1..=n).map(|i| la.part(i)).collect();
            for y in weakly_decreasing_in_ranges(&vec![0; n], &la_vec) {
                let expect = by_edge
                    .get(&y)
                    .cloned()
                    .unwrap_or_else(|| rat(0, 1))
                    * product((0..n).map(|i| q[i].powi(-y[i])));
                assert_eq!(
                    lambda_kernel(&q, &la_vec, &y).unwrap(),
                    expect,
                    "la {la} edge {y:?}"
                );
            }
        }
    }

    #[test]
    fn r_kernel_matches_conjugate_chain_sum() {
        // The defining form of the shape kernel: (1/Z) sum over chains
        // mu^T = nu_0 ≺ nu_1 ≺ ... ≺ nu_s = la^T of prod p_i^{step size},
        // against the determinant form.
        use crate::combinatorics::{interlaces, partitions_in_box};
        let rates = Rates::new(
            vec![rat(1, 4), rat(1, 3)],
            vec![rat(3, 2), rat(2, 1), rat(3, 1)],
        )
        .unwrap();
        let (r, t) = (0usize, 2usize);
        let n = 3usize;
        let shapes = partitions_in_box(n, 2);
        for mu in &shapes {
            for la in &shapes {
                if !mu.contained_in(la) {
                    continue;
                }
                // Middle partitions nu with mu^T ≺ nu ≺ la^T.
                let mu_t = mu.conjugate();
                let la_t = la.conjugate();
                let mut total = rat(0, 1);
                for nu in partitions_in_box(la_t.len().max(1), la_t.part(1)) {
                    if interlaces(&mu_t, &nu) && interlaces(&nu, &la_t) {
                        total += rates.p[0].powi(nu.size() - mu_t.size())
                                * rates.p[1].powi(la_t.size() - nu.size());
                    }
                }
                let mu_vec: Vec<i64> = (1..=n).map(|i| mu.part(i)).collect();
                let la_vec: Vec<i64> = (1..=n).map(|i| la.part(i)).collect();
                assert_eq!(
                    r_kernel(&rates, r, t, &mu_vec, &la_vec).unwrap(),
                    total / rates.normalization(r, t),
                    "mu {mu} la {la}"
                );
            }
        }
    }

    #[test]
    fn intertwining_relation_exact() {
        // R_{(r,t]} o Lambda = Lambda o Qhat_{(r,t]} as matrices over a
        // truncated weak-coordinate window, with Qhat built from the
        // intertwined transition kernel.
        let rates = rates23();
        let n = 2usize;
        let (r, t) = (0usize, 2usize);
        let lo = vec![0i64, -1];
        let hi = vec![2i64, 1];
        let configs = weakly_decreasing_in_ranges(&lo, &hi);
        for mu in &configs {
            for y_prime in &configs {
                // lhs: sum_la R(mu, la) Lambda(la, y').
                let la_hi: Vec<i64> = mu.iter().map(|v| v + (t - r) as i64).collect();
                let mut lhs = rat(0, 1);
                for la in weakly_decreasing_in_ranges(mu, &la_hi) {
                    lhs += r_kernel(&rates, r, t, mu, &la).unwrap()
                            * lambda_kernel(&rates.q, &la, y_prime).unwrap();
                }
                // rhs: sum_y Lambda(mu, y) Qhat(y, y') with
                // Qhat(y,y') = prod q^{y-y'} Q(y,y').
                let mut rhs = rat(0, 1);
                let y_lo: Vec<i64> = (1..=n as i64).map(|i| y_prime[(i - 1) as usize] - (t - r) as i64 - 1).collect();
                for y in weakly_decreasing_in_ranges(&y_lo, mu) {
                    let lam = lambda_kernel(&rates.q, mu, &y).unwrap();
                    if lam.is_zero() {
                        continue;
                    }
                    let qker = transition_weak(&rates, r, t, &y, y_prime).unwrap();
                    let twist = product(
                        (0..n).map(|i| rates.q[i].powi(y[i] - y_prime[i])),
                    );
                    rhs += lam * twist * qker;
                }
                assert_eq!(lhs, rhs, "mu {mu:?} y' {y_prime:?}");
            }
        }
    }

    #[test]
    fn transition_kernel_matches_exhaustive_oracle() {
        let rates = rates23();
        let y0 = ParticleConfig::new(vec![1, 0]).unwrap();
        let law = enumerate_transition(&y0, &rates, 2).unwrap();
        let mut total = rat(0, 1);
        for (cfg, prob) in &law {
            let k = transition_strict(&rates, 0, 2, &y0, cfg).unwrap();
            assert_eq!(&k, prob, "endpoint {cfg:?}");
            total += k;
        }
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn transition_kernel_rows_sum_to_one() {
        let rates = Rates::new(
            vec![rat(1, 4), rat(1, 3), rat(1, 5)],
            vec![rat(3, 2), rat(2, 1), rat(3, 1)],
        )
        .unwrap();
        let y0 = ParticleConfig::new(vec![2, 0, -1]).unwrap();
        let t = 3usize;
        let mut total = rat(0, 1);
        let lo: Vec<i64> = y0.positions().to_vec();
        let hi: Vec<i64> = y0.positions().iter().map(|v| v + t as i64).collect();
        for y1 in weakly_decreasing_in_ranges(&lo, &hi) {
            if y1.windows(2).any(|w| w[0] <= w[1]) {
                continue;
            }
            let cfg = ParticleConfig::new(y1).unwrap();
            total += transition_strict(&rates, 0, t, &y0, &cfg).unwrap();
        }
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn transition_identity_at_zero_steps() {
        let rates = rates23();
        let y = ParticleConfig::new(vec![3, -1]).unwrap();
        assert_eq!(transition_strict(&rates, 1, 1, &y, &y).unwrap(), rat(1, 1));
        let other = ParticleConfig::new(vec![4, -1]).unwrap();
        assert_eq!(
            transition_strict(&rates, 1, 1, &y, &other).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn single_particle_single_step_marginal() {
        let rates = rates23();
        let rates1 = Rates::new(rates.p.clone(), vec![rat(3, 2)]).unwrap();
        let y = ParticleConfig::new(vec![0]).unwrap();
        let up = ParticleConfig::new(vec![1]).unwrap();
        let pq = rat(1, 4) * rat(3, 2);
        assert_eq!(
            transition_strict(&rates1, 0, 1, &y, &up).unwrap(),
            pq.clone() / (rat(1, 1) + pq.clone())
        );
        assert_eq!(
            transition_strict(&rates1, 0, 1, &y, &y).unwrap(),
            rat(1, 1) / (rat(1, 1) + pq)
        );
    }

    #[test]
    fn virtual_entry_examples() {
        let rates = Rates::new(vec![rat(1, 4)], vec![rat(2, 1), rat(3, 1)]).unwrap();
        // j = k: q_k^y.
        assert_eq!(virtual_q_entry(&rates, 2, 2, 3).unwrap(), rat(27, 1));
        // k < j: 0.
        assert_eq!(virtual_q_entry(&rates, 2, 1, 3).unwrap(), rat(0, 1));
        // j=1, k=2, q=(2,3), y=0: 2/(3-2) = 2.
        assert_eq!(virtual_q_entry(&rates, 1, 2, 0).unwrap(), rat(2, 1));
        // unordered q rejected
        let bad = Rates::new(vec![rat(1, 4)], vec![rat(3, 1), rat(2, 1)]).unwrap();
        assert!(virtual_q_entry(&bad, 1, 2, 0).is_err());
    }

    #[test]
    fn virtual_entry_properties() {
        let rates = Rates::new(
            vec![rat(1, 4), rat(1, 3)],
            vec![rat(3, 2), rat(2, 1), rat(3, 1)],
        )
        .unwrap();
        // Telescoping: Q_{[j,k]} o Q_{(k,n]} = Q_{[j,n]} on virtual rows.
        for y in -3..=3 {
            let direct = virtual_q_entry(&rates, 1, 3, y).unwrap();
            // sum over intermediate x': Q_{[1,2]}(virt, x') Q_{(2,3]}(x', y):
            // Q_3(x', y) nonzero for y < x', and the virtual row decays as
            // q_1^{x'}, so the sum converges; truncate with an exact
            // geometric tail: entries are q_1^{x'+1}/(q_2-q_1) * q_3^{y-x'}.
            let q1 = rat(3, 2);
            let q3 = rat(3, 1);
            let ratio = q1.clone() / q3.clone();
            let mut acc = rat(0, 1);
            let mut term = virtual_q_entry(&rates, 1, 2, y + 1).unwrap() * q3.powi(-1);
            // term at x' = y+1; ratio per unit increase of x'.
            for _ in 0..300 {
                acc = acc.clone() + term.clone();
                term *= ratio.clone();
            }
            acc = acc.clone() + term * rat(1, 1) / (rat(1, 1) - ratio);
            assert_eq!(direct, acc, "y = {y}");
        }
    }

    #[test]
    fn virtual_entry_is_large_x_limit() {
        let rates = Rates::new(vec![rat(1, 4)], vec![rat(3, 2), rat(2, 1)]).unwrap();
        // q_j^x Q_{[j,k]}(x,y) -> Q_{[j,k]}(virtual, y) as x -> +inf; in
        // the rational backend compare at two large x and confirm the gap
        // shrinks geometrically.
        let y = 0i64;
        let target = virtual_q_entry(&rates, 1, 2, y).unwrap();
        let at = |x: i64| rates.q[0].powi(x) * q_range_entry(&rates.q, 1, 2, x, y);
        let d40 = (at(40) - target.clone()).abs_f64();
        let d60 = (at(60) - target).abs_f64();
        assert!(d60 < d40 * 0.01 && d60 < 1e-6);
    }

    #[test]
    fn qbar_collapses_for_single_index() {
        let q = vec![rat(3, 2), rat(2, 1)];
        for x in -3..=3 {
            for y in -3..=3 {
                assert_eq!(qbar_entry(&q, 2, 2, x, y), rat(2, 1).powi(y - x));
            }
        }
    }

    #[test]
    fn det_equality_small_cases() {
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        // N=1 singleton: levels [[x]], below [b], above [a] with b <= x < a.
        let tri = StrictTriangle {
            levels: vec![vec![2]],
            below: vec![1],
            above: vec![4],
        };
        assert!(tri.is_strictly_interlacing());
        let out = det_equality_check(&q, &tri);
        assert_eq!(out.lhs, out.rhs);
        assert!(!out.lhs.is_zero());

        // Violated interlacing: both sides vanish, flagged.
        let bad = StrictTriangle {
            levels: vec![vec![2], vec![5, 3]],
            below: vec![1, 0],
            above: vec![6, 7],
        };
        assert!(!bad.is_strictly_interlacing());
        let out = det_equality_check(&q, &bad);
        assert!(out.lhs.is_zero() && out.rhs.is_zero());
    }
}
