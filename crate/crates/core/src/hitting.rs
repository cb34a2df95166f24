//! The random-walk-hitting side of the correlation kernel: the S and
//! S-bar kernels (polynomial coefficient extraction and residue sums), the
//! terminal-boundary value problem for the discrete heat equation, hitting
//! laws of the left-moving geometric walk, the G-function in both its
//! operator-sum and hitting forms, and the multipoint kernel built from
//! them.
//!
//! All positions here are strict particle coordinates.

use std::cell::RefCell;
use std::collections::HashMap;

use crate::dynamics::{ParticleConfig, Rates};
use crate::error::{Error, Result};
use crate::operators::{q_range_entry, qhat_entry, OpSpec};
use crate::scalar::{product, Scalar};

/// `S_{[j,k],(r,t]}(x,y)`: the coefficient of `z^(x-y+k-j+1)` in
/// `prod_{l=j..=k}(q_l - z) * prod_{l=r+1..=t}(1 + p_l z)`, equivalently
/// the entry of `Q^{-1}_{[j,k]} o R*_{(r,t]}`.
pub fn s_kernel<S: Scalar>(
    rates: &Rates<S>,
    j: usize,
    k: usize,
    r: usize,
    t: usize,
    x: i64,
    y: i64,
) -> S {
    assert!(1 <= j && j <= k && r <= t);
    OpSpec::qinv_range(j, k)
        .then(OpSpec::rstar_range(r, t))
        .entry(rates, x, y)
        .expect("polynomial symbol never diverges")
}

/// `Sbar_{[j,k],(r,t]}(x,y)` by residues over the poles `q_j..q_k`
/// (pairwise distinct required):
/// `prod_l (q_l - 1) * sum_i q_i^(y-x+k-j) / (prod_{l != i}(q_l - q_i) prod_l (1 + p_l q_i))`.
pub fn sbar_kernel<S: Scalar>(
    rates: &Rates<S>,
    j: usize,
    k: usize,
    r: usize,
    t: usize,
    x: i64,
    y: i64,
) -> Result<S> {
    assert!(1 <= j && j <= k && r <= t);
    for a in j..=k {
        for b in a + 1..=k {
            if rates.q_at(a) == rates.q_at(b) {
                return Err(Error::RepeatedPole(format!(
                    "q_{a} = q_{b} = {}",
                    rates.q_at(a)
                )));
            }
        }
    }
    let norm = product((j..=k).map(|l| rates.q_at(l).clone() - S::one()));
    let mut acc = S::zero();
    for i in j..=k {
        let qi = rates.q_at(i).clone();
        let mut denom = S::one();
        for l in j..=k {
            if l != i {
                denom = denom * (rates.q_at(l).clone() - qi.clone());
            }
        }
        for l in r + 1..=t {
            denom = denom * (S::one() + rates.p_at(l).clone() * qi.clone());
        }
        acc = acc + qi.powi(y - x + k as i64 - j as i64) / denom;
    }
    Ok(norm * acc)
}

/// Separates coincident `q` values by a relative ladder `(1 + j * eps)`
/// with `eps = 2^-scale`, leaving already-distinct values untouched. Used
/// to evaluate the residue kernels at (or near) coincident parameters; in
/// the exact backend the perturbed evaluation is exact and the only error
/// is the `O(eps)` parameter shift itself.
pub fn perturb_equal_q<S: Scalar>(rates: &Rates<S>, scale: u32) -> Rates<S> {
    let eps = S::one() / S::from_int(2).powi(scale as i64);
    let mut q = rates.q.clone();
    for i in 0..q.len() {
        let dups = (0..i).filter(|&j| rates.q[j] == rates.q[i]).count();
        if dups > 0 {
            let bump = S::one() + S::from_int(dups as i64) * eps.clone();
            q[i] = q[i].clone() * bump;
        }
    }
    Rates { p: rates.p.clone(), q }
}

/// `Sbar_{[j,k],(r,t]}` at possibly coincident `q`: evaluates the residue
/// form at perturbations `eps` and `eps/2` (with `eps = 2^-40` relative)
/// and Richardson-extrapolates the first-order error away. Errors out if
/// the two evaluations disagree beyond first order, which would signal a
/// genuine singularity rather than a removable one.
pub fn sbar_kernel_coincident<S: Scalar>(
    rates: &Rates<S>,
    j: usize,
    k: usize,
    r: usize,
    t: usize,
    x: i64,
    y: i64,
) -> Result<S> {
    if rates.check_distinct_q().is_ok() {
        return sbar_kernel(rates, j, k, r, t, x, y);
    }
    let coarse = sbar_kernel(&perturb_equal_q(rates, 40), j, k, r, t, x, y)?;
    let fine = sbar_kernel(&perturb_equal_q(rates, 41), j, k, r, t, x, y)?;
    let drift = (fine.clone() - coarse.clone()).abs_f64();
    let scale = fine.abs_f64().max(1.0);
    if drift > 1e-6 * scale {
        return Err(Error::RepeatedPole(format!(
            "perturbed evaluations drift by {drift:.3e}; limit not removable"
        )));
    }
    // Richardson: value(eps) = L + c*eps + O(eps^2), so 2 v(eps/2) - v(eps)
    // cancels the linear term.
    Ok(fine.clone() + fine - coarse)
}

/// Joint law of the first entry of the left-moving geometric walk into the
/// strict epigraph of the initial data, restricted to hits before
/// `horizon`: atoms `(m, z, P(tau = m, S_tau = z))`, plus the total mass
/// `P(tau >= horizon)`.
#[derive(Clone, Debug)]
pub struct HittingLaw<S> {
    pub start: i64,
    pub start_time: usize,
    pub horizon: usize,
    pub atoms: Vec<(usize, i64, S)>,
    pub survive: S,
}

/// Law of `(tau^j, S_{tau^j})` for the walk started at `S_j = z1`, where
/// the step into time `m` has kernel `(q_m - 1) q_m^(y-x) 1_{y<x}` and
/// `tau^j = min{m >= j : S_m > y_{m+1}}`. Walk states that fall to or
/// below `y_horizon` can no longer hit before `horizon` and are absorbed
/// into `survive` via the exact geometric cumulative.
pub fn epigraph_hitting_law<S: Scalar>(
    z1: i64,
    start_time: usize,
    horizon: usize,
    y: &ParticleConfig,
    q: &[S],
) -> HittingLaw<S> {
    assert!(horizon <= y.len(), "horizon exceeds the boundary data");
    let mut law = HittingLaw {
        start: z1,
        start_time,
        horizon,
        atoms: Vec::new(),
        survive: S::zero(),
    };
    if start_time >= horizon {
        law.survive = S::one();
        return law;
    }
    if z1 > y.pos(start_time + 1) {
        law.atoms.push((start_time, z1, S::one()));
        return law;
    }
    let floor = y.pos(horizon);
    // alive[x] = P(S_m = x, no hit yet), kept only for x > floor.
    let mut alive: Vec<(i64, S)> = if z1 > floor { vec![(z1, S::one())] } else { vec![] };
    let mut pruned = if z1 > floor { S::zero() } else { S::one() };
    for m in start_time + 1..horizon {
        let qm = &q[m - 1];
        let boundary = y.pos(m + 1);
        let mut next: Vec<(i64, S)> = Vec::new();
        for &(x, ref w) in &alive {
            // Hits: z in (boundary, x-1].
            for z in boundary + 1..=x - 1 {
                let step = (qm.clone() - S::one()) * qm.powi(z - x);
                law.atoms.push((m, z, w.clone() * step));
            }
            // Survivors above the absorbing floor.
            for z in floor + 1..=boundary.min(x - 1) {
                let step = (qm.clone() - S::one()) * qm.powi(z - x);
                match next.iter_mut().find(|(p, _)| *p == z) {
                    Some((_, acc)) => *acc = acc.clone() + w.clone() * step,
                    None => next.push((z, w.clone() * step)),
                }
            }
            // Mass falling to or below the floor: cumulative geometric
            // sum_{z <= floor} (q-1) q^(z-x) = q^(floor - x + 1).
            if floor < x {
                pruned = pruned.clone() + w.clone() * qm.powi(floor - x + 1);
            }
        }
        alive = next;
    }
    let alive_mass = alive
        .into_iter()
        .fold(S::zero(), |acc, (_, w)| acc + w);
    law.survive = pruned + alive_mass;
    law
}

/// Law of `(tau, S_tau)` for the walk started at `S_0 = z1` with horizon
/// `n` (the form entering the epigraph kernel).
pub fn hitting_law<S: Scalar>(
    z1: i64,
    y: &ParticleConfig,
    n: usize,
    rates: &Rates<S>,
) -> HittingLaw<S> {
    epigraph_hitting_law(z1, 0, n, y, &rates.q)
}

/// The kernel encoding the initial configuration:
/// `Sbar^epi_{[1,n],(r,t]}(x, y') =
///   E[Sbar_{[tau+1,n],(r,t]}(S_tau, y') 1_{tau<n}] / prod_{l=1..=n}(q_l - 1)`.
pub fn sbar_epi<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    n: usize,
    r: usize,
    t: usize,
    x: i64,
    y_prime: i64,
) -> Result<S> {
    let law = hitting_law(x, y, n, rates);
    let mut acc = S::zero();
    for (m, z, w) in &law.atoms {
        acc = acc + sbar_kernel(rates, m + 1, n, r, t, *z, y_prime)? * w.clone();
    }
    Ok(acc / product((1..=n).map(|l| rates.q_at(l).clone() - S::one())))
}

/// The hitting-form correlation kernel of the multipoint distribution:
/// `K(m,x;n,x') = -Q_{(m,n]}(x,x') 1_{n>m}
///              + (S_{[1,m],(0,t]} o Sbar^epi_{[1,n],(0,t]})(x,x')`.
/// The intermediate sum runs over the finite band where `S` is nonzero.
pub fn try_hitting_kernel<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    m: usize,
    x: i64,
    n: usize,
    xp: i64,
) -> Result<S> {
    let mut acc = if n > m {
        -q_range_entry(&rates.q, m + 1, n, x, xp)
    } else {
        S::zero()
    };
    // S_{[1,m],(0,t]}(x,z) != 0 iff 0 <= x - z + m <= m + t.
    for z in x - t as i64..=x + m as i64 {
        let left = s_kernel(rates, 1, m, 0, t, x, z);
        if left.is_zero() {
            continue;
        }
        acc = acc + left * sbar_epi(y, rates, n, 0, t, z, xp)?;
    }
    Ok(acc)
}

/// As [`try_hitting_kernel`], for callers that have already validated the
/// rate parameters (pairwise distinct `q`).
pub fn hitting_kernel<S: Scalar>(
    y: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    m: usize,
    x: i64,
    n: usize,
    xp: i64,
) -> S {
    try_hitting_kernel(y, rates, t, m, x, n, xp)
        .expect("rates validated by caller (pairwise distinct q)")
}

/// Memoizing evaluator for the hitting-form kernel: hitting laws are
/// cached per starting point and the epigraph kernel per `(n, z, x')`,
/// which matters when assembling Fredholm matrices entry by entry.
pub struct HittingKernel<S: Scalar> {
    y: ParticleConfig,
    rates: Rates<S>,
    t: usize,
    laws: RefCell<HashMap<i64, HittingLaw<S>>>,
    epi_memo: RefCell<HashMap<(usize, i64, i64), S>>,
}

impl<S: Scalar> HittingKernel<S> {
    pub fn new(y: &ParticleConfig, rates: &Rates<S>, t: usize) -> Result<Self> {
        rates.check_distinct_q()?;
        if y.len() != rates.num_particles() {
            return Err(Error::BadConfig("y and q lengths differ".into()));
        }
        if rates.horizon() < t {
            return Err(Error::BadConfig("need t <= horizon".into()));
        }
        Ok(Self {
            y: y.clone(),
            rates: rates.clone(),
            t,
            laws: RefCell::new(HashMap::new()),
            epi_memo: RefCell::new(HashMap::new()),
        })
    }

    fn sbar_epi_cached(&self, n: usize, z: i64, xp: i64) -> S {
        if let Some(v) = self.epi_memo.borrow().get(&(n, z, xp)) {
            return v.clone();
        }
        if !self.laws.borrow().contains_key(&z) {
            let law = hitting_law(z, &self.y, self.y.len(), &self.rates);
            self.laws.borrow_mut().insert(z, law);
        }
        let laws = self.laws.borrow();
        let law = &laws[&z];
        let mut acc = S::zero();
        for (m, at, w) in &law.atoms {
            // Atoms with m >= n correspond to tau >= n for horizon n.
            if *m < n {
                acc = acc
                    + sbar_kernel(&self.rates, m + 1, n, 0, self.t, *at, xp)
                        .expect("distinct q checked at construction")
                        * w.clone();
            }
        }
        let v = acc / product((1..=n).map(|l| self.rates.q_at(l).clone() - S::one()));
        drop(laws);
        self.epi_memo.borrow_mut().insert((n, z, xp), v.clone());
        v
    }

    /// Kernel entry `K(m, x; n, x')`.
    pub fn entry(&self, m: usize, x: i64, n: usize, xp: i64) -> S {
        let mut acc = if n > m {
            -q_range_entry(&self.rates.q, m + 1, n, x, xp)
        } else {
            S::zero()
        };
        for z in x - self.t as i64..=x + m as i64 {
            let left = s_kernel(&self.rates, 1, m, 0, self.t, x, z);
            if left.is_zero() {
                continue;
            }
            acc = acc + left * self.sbar_epi_cached(n, z, xp);
        }
        acc
    }
}

/// Solved terminal-boundary value problem: `value(l, x)` for
/// `0 <= l <= k` over a window of `x`.
#[derive(Clone, Debug)]
pub struct BvpTable<S> {
    pub n: usize,
    pub k: usize,
    pub lo: i64,
    pub hi: i64,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> BvpTable<S> {
    pub fn value(&self, l: usize, x: i64) -> &S {
        assert!(l <= self.k && x >= self.lo && x <= self.hi);
        &self.rows[l][(x - self.lo) as usize]
    }
}

/// Solves the terminal-boundary value problem for `h^n_k`:
/// the terminal row `h(k,x) = q_{n-k}^(x - y_{n-k})` walked down by the
/// cumulative one-step recursion, which vanishes at the boundary points
/// `y_{n-l}`.
pub fn bvp_solve<S: Scalar>(
    y: &ParticleConfig,
    q: &[S],
    n: usize,
    k: usize,
    window: (i64, i64),
) -> BvpTable<S> {
    assert!(n <= y.len() && k < n);
    let y_min = (1..=n).map(|i| y.pos(i)).min().unwrap();
    let y_max = (1..=n).map(|i| y.pos(i)).max().unwrap();
    let lo = window.0.min(y_min - 1);
    let hi = window.1.max(y_max + 1);
    let width = (hi - lo + 1) as usize;
    let mut rows = vec![vec![S::zero(); width]; k + 1];
    let q_term = &q[n - k - 1];
    for x in lo..=hi {
        rows[k][(x - lo) as usize] = q_term.powi(x - y.pos(n - k));
    }
    for l in (0..k).rev() {
        let ql = &q[n - l - 1];
        let b = y.pos(n - l);
        for x in lo..=hi {
            let mut acc = S::zero();
            if x <= b {
                for u in x + 1..=b {
                    acc = acc + ql.powi(x - u) * rows[l + 1][(u - lo) as usize].clone();
                }
            } else {
                for u in b + 1..=x {
                    acc = acc - ql.powi(x - u) * rows[l + 1][(u - lo) as usize].clone();
                }
            }
            rows[l][(x - lo) as usize] = acc;
        }
    }
    BvpTable { n, k, lo, hi, rows }
}

/// Hitting representation of the solved boundary problem, valid left of
/// the boundary (`x <= y_{n-l}`):
/// `h^n_k(l,x) = P(tau* = k) / prod_{j=l..k-1}(q_{n-j} - 1)`
/// for the right-moving geometric walk `S*` started at `S*_{l-1} = x` with
/// `tau* = min{m >= l : S*_m > y_{n-m}}`.
pub fn bvp_hitting_rep<S: Scalar>(
    y: &ParticleConfig,
    q: &[S],
    n: usize,
    k: usize,
    l: usize,
    x: i64,
) -> Result<S> {
    assert!(n <= y.len() && l <= k && k < n);
    if x > y.pos(n - l) {
        return Err(Error::OutsideValidity(format!(
            "hitting representation needs x <= y_(n-l) = {}, got {x}",
            y.pos(n - l)
        )));
    }
    // Walk positions x_{l-1} = x < x_l < ... < x_{k-1}, constrained by
    // x_j <= y_{n-j}; the final step into time k contributes the exact
    // cumulative q_{n-k}^(x_{k-1} - y_{n-k}).
    fn rec<S: Scalar>(
        y: &ParticleConfig,
        q: &[S],
        n: usize,
        k: usize,
        j: usize,
        pos: i64,
        weight: S,
        acc: &mut S,
    ) {
        if j == k {
            *acc = acc.clone() + weight * q[n - k - 1].powi(pos - y.pos(n - k));
            return;
        }
        let qj = &q[n - j - 1];
        for next in pos + 1..=y.pos(n - j) {
            let step = (qj.clone() - S::one()) * qj.powi(pos - next);
            rec(y, q, n, k, j + 1, next, weight.clone() * step, acc);
        }
    }
    let mut acc = S::zero();
    rec(y, q, n, k, l, x, S::one(), &mut acc);
    let norm = product((l..k).map(|j| q[n - j - 1].clone() - S::one()));
    Ok(acc / norm)
}

/// Evaluation mode for the G-function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GMode {
    /// Operator sum `sum_i Q_{[j+1,i]}(z1, y_i) h^n_{n-i}(k, z2)`.
    Sum,
    /// Hitting expectation
    /// `E[Qhat_{[tau+1, n-k]}(S_tau, z2) 1_{tau < n-k}] / prod (q_l - 1)`.
    Hitting,
}

/// The generalized G-function `G^(n)_{j,k}(z1, z2)`; both evaluation modes
/// agree for all integer arguments.
pub fn g_function<S: Scalar>(
    y: &ParticleConfig,
    q: &[S],
    n: usize,
    j: usize,
    k: usize,
    z1: i64,
    z2: i64,
    mode: GMode,
) -> S {
    assert!(k < n && j + k < n, "need 0 <= k <= n-1 and 0 <= j <= n-k-1");
    match mode {
        GMode::Sum => {
            let tables: Vec<BvpTable<S>> =
                (0..n).map(|kk| bvp_solve(y, q, n, kk, (z2, z2))).collect();
            g_sum_with_tables(y, q, n, j, k, z1, z2, &tables)
        }
        GMode::Hitting => {
            let horizon = n - k;
            let law = epigraph_hitting_law(z1, j, horizon, y, q);
            let mut acc = S::zero();
            for (m, z, w) in &law.atoms {
                acc = acc + qhat_entry(q, m + 1, horizon, *z, z2) * w.clone();
            }
            acc / product((j + 1..=horizon).map(|l| q[l - 1].clone() - S::one()))
        }
    }
}

/// Sum-mode G with pre-solved boundary tables (`tables[kk]` the table for
/// `h^n_kk`); used by grid sweeps to avoid re-solving per point.
pub fn g_sum_with_tables<S: Scalar>(
    y: &ParticleConfig,
    q: &[S],
    n: usize,
    j: usize,
    k: usize,
    z1: i64,
    z2: i64,
    tables: &[BvpTable<S>],
) -> S {
    let mut acc = S::zero();
    for i in j + 1..=n - k {
        let link = q_range_entry(q, j + 1, i, z1, y.pos(i));
        if link.is_zero() {
            continue;
        }
        acc = acc + link * tables[n - i].value(k, z2).clone();
    }
    acc
}
