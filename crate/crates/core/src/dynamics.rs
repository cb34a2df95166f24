//! The dTASEP Markov chain: sequential right-to-left Bernoulli updates,
//! seeded Monte Carlo trajectories, and exhaustive transition-probability
//! oracles used to cross-check every determinantal formula.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::drsk::BitMatrix;
use crate::error::{Error, Result};
use crate::scalar::{product, Scalar};

/// Strictly decreasing particle positions `Y_1 > Y_2 > ... > Y_N`.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct ParticleConfig {
    positions: Vec<i64>,
}

impl ParticleConfig {
    pub fn new(positions: impl Into<Vec<i64>>) -> Result<Self> {
        let positions = positions.into();
        if positions.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(format!(
                "positions not strictly decreasing: {positions:?}"
            )));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Position of the k-th particle from the right, 1-indexed.
    pub fn pos(&self, k: usize) -> i64 {
        self.positions[k - 1]
    }
}

/// Jump-rate parameters: `p` indexed by time (`p[t-1]` drives step `t`) and
/// `q` indexed by particle.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates<S: Scalar> {
    pub p: Vec<S>,
    pub q: Vec<S>,
}

impl<S: Scalar> Rates<S> {
    pub fn new(p: Vec<S>, q: Vec<S>) -> Result<Self> {
        let pos = |v: &S| *v > S::zero();
        if !p.iter().all(pos) || !q.iter().all(pos) {
            return Err(Error::InvalidRates("all parameters must be positive".into()));
        }
        Ok(Self { p, q })
    }

    pub fn num_particles(&self) -> usize {
        self.q.len()
    }

    pub fn horizon(&self) -> usize {
        self.p.len()
    }

    /// `p_t` for `1 <= t <= horizon`.
    pub fn p_at(&self, t: usize) -> &S {
        &self.p[t - 1]
    }

    /// `q_k` for `1 <= k <= N`.
    pub fn q_at(&self, k: usize) -> &S {
        &self.q[k - 1]
    }

    /// Main-theorem hypotheses: `q_k p_t < 1` for all k, t and `q_k > 1`.
    pub fn check_theorem_regime(&self) -> Result<()> {
        for (k, qk) in self.q.iter().enumerate() {
            if !(*qk > S::one()) {
                return Err(Error::RegimeViolation(format!(
                    "q_{} = {} is not > 1",
                    k + 1,
                    qk
                )));
            }
            for (t, pt) in self.p.iter().enumerate() {
                if !(qk.clone() * pt.clone() < S::one()) {
                    return Err(Error::RegimeViolation(format!(
                        "q_{} p_{} = {} is not < 1",
                        k + 1,
                        t + 1,
                        qk.clone() * pt.clone()
                    )));
                }
            }
        }
        Ok(())
    }

    /// What the kernel pipelines actually require: `q_k > 1` throughout and
    /// `q_k p_t <= 1`. The strict interior of the theorem regime is needed
    /// only for the infinite-volume operator bounds; the finite-window
    /// evaluations remain valid on the boundary.
    pub fn check_kernel_regime(&self) -> Result<()> {
        for (k, qk) in self.q.iter().enumerate() {
            if !(*qk > S::one()) {
                return Err(Error::RegimeViolation(format!(
                    "q_{} = {} is not > 1",
                    k + 1,
                    qk
                )));
            }
            for (t, pt) in self.p.iter().enumerate() {
                if qk.clone() * pt.clone() > S::one() {
                    return Err(Error::RegimeViolation(format!(
                        "q_{} p_{} = {} exceeds 1",
                        k + 1,
                        t + 1,
                        qk.clone() * pt.clone()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Working assumption for the biorthogonal route: `q_1 < q_2 < ...`.
    pub fn check_ordered_q(&self) -> Result<()> {
        for w in self.q.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::RegimeViolation(format!(
                    "q parameters not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Pairwise-distinct `q`, as the residue formulas require.
    pub fn check_distinct_q(&self) -> Result<()> {
        for i in 0..self.q.len() {
            for j in i + 1..self.q.len() {
                if self.q[i] == self.q[j] {
                    return Err(Error::RegimeViolation(format!(
                        "q_{} = q_{} = {}",
                        i + 1,
                        j + 1,
                        self.q[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bernoulli success probability `p_t q_k / (1 + p_t q_k)`.
    pub fn jump_prob(&self, t: usize, k: usize) -> S {
        let pq = self.p_at(t).clone() * self.q_at(k).clone();
        pq.clone() / (S::one() + pq)
    }

    /// Normalization `Z_{(r,t]} = prod_{i=r+1..=t} prod_j (1 + p_i q_j)`.
    pub fn normalization(&self, r: usize, t: usize) -> S {
        product((r + 1..=t).flat_map(|i| {
            self.q
                .iter()
                .map(move |qj| S::one() + self.p[i - 1].clone() * qj.clone())
        }))
    }
}

/// One sequential update sweep: for `k = 1..=N` (right to left in space),
/// `Y_k <- min(Y_{k-1} - 1, Y_k + w_k)` with `Y_0 = +infinity`.
pub fn step(y: &ParticleConfig, w_row: &[bool]) -> ParticleConfig {
    assert_eq!(y.len(), w_row.len(), "driving row length mismatch");
    let mut next = Vec::with_capacity(y.len());
    for k in 0..y.len() {
        let cap = if k == 0 { i64::MAX } else { next[k - 1] - 1 };
        let moved = y.positions[k] + i64::from(w_row[k]);
        next.push(moved.min(cap));
    }
    ParticleConfig::new(next).expect("sequential update preserves exclusion")
}

/// SplitMix64 finalizer; the per-draw counter RNG below is built from it.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Counter-based substream draw: a uniform `u64` for the Bernoulli variable
/// of (replica, time, particle), independent of evaluation order.
fn draw(seed: u64, replica: u64, t: usize, k: usize) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ replica);
    h = splitmix64(h ^ (t as u64).wrapping_mul(0x517cc1b727220a95));
    splitmix64(h ^ (k as u64).wrapping_mul(0x2545f4914f6cdd1d))
}

fn uniform01(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Simulates one trajectory of `t` steps for the given replica substream.
/// The result is deterministic in `(seed, replica)`.
pub fn simulate<S: Scalar>(
    y0: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    seed: u64,
    replica: u64,
) -> Vec<ParticleConfig> {
    assert!(rates.horizon() >= t, "need p_1..p_t");
    assert_eq!(rates.num_particles(), y0.len());
    let mut traj = Vec::with_capacity(t + 1);
    traj.push(y0.clone());
    for s in 1..=t {
        let w_row: Vec<bool> = (1..=y0.len())
            .map(|k| uniform01(draw(seed, replica, s, k)) < rates.jump_prob(s, k).to_f64())
            .collect();
        traj.push(step(traj.last().unwrap(), &w_row));
    }
    traj
}

/// Exhaustive enumeration budget for the oracle, in driving-matrix bits.
pub const ENUMERATION_BUDGET: usize = 24;

/// Probability of a driving matrix under the Bernoulli field.
fn matrix_weight<S: Scalar>(w: &BitMatrix, rates: &Rates<S>) -> S {
    let mut weight = S::one();
    for i in 1..=w.rows() {
        for j in 1..=w.cols() {
            let pq = rates.p_at(i).clone() * rates.q_at(j).clone();
            let denom = S::one() + pq.clone();
            weight = weight * if w.get(i, j) { pq / denom } else { S::one() / denom };
        }
    }
    weight
}

/// Exhaustive transition-probability oracle: the exact law of `Y(t)` given
/// `Y(0) = y0`, obtained by summing over all `2^(t*N)` driving matrices.
pub fn enumerate_transition<S: Scalar>(
    y0: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
) -> Result<BTreeMap<ParticleConfig, S>> {
    let n = y0.len();
    let bits = t * n;
    if bits > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "t*N = {bits} exceeds {ENUMERATION_BUDGET}"
        )));
    }
    assert!(rates.horizon() >= t && rates.num_particles() == n);
    // Fixed-size chunks merged in index order keep the reduction
    // deterministic (bit-for-bit in the float backend) regardless of how
    // rayon schedules the work.
    const CHUNK: u64 = 1 << 12;
    let total: u64 = 1 << bits;
    let starts: Vec<u64> = (0..total).step_by(CHUNK as usize).collect();
    let chunks: Vec<BTreeMap<ParticleConfig, S>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc: BTreeMap<ParticleConfig, S> = BTreeMap::new();
            for idx in start..(start + CHUNK).min(total) {
                let w = BitMatrix::from_index(t, n, idx);
                let mut y = y0.clone();
                for s in 1..=t {
                    y = step(&y, &w.row(s));
                }
                let weight = matrix_weight(&w, rates);
                let slot = acc.entry(y).or_insert_with(S::zero);
                *slot = slot.clone() + weight;
            }
            acc
        })
        .collect();
    let mut law = BTreeMap::new();
    for chunk in chunks {
        for (y, wgt) in chunk {
            let slot = law.entry(y).or_insert_with(S::zero);
            *slot = slot.clone() + wgt;
        }
    }
    Ok(law)
}

/// A multipoint constraint: particle `k` must sit at or right of `s`.
pub type Query = Vec<(usize, i64)>;

/// Brute-force multipoint probability
/// `P(Y_{k_i}(t) >= s_i for all i | Y(0) = y0)` from the exhaustive law.
pub fn multipoint_prob_oracle<S: Scalar>(
    y0: &ParticleConfig,
    rates: &Rates<S>,
    t: usize,
    query: &Query,
) -> Result<S> {
    for w in query.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(Error::BadConfig(
                "query particle indices must be strictly increasing".into(),
            ));
        }
    }
    if query.iter().any(|&(k, _)| k == 0 || k > y0.len()) {
        return Err(Error::BadConfig("query particle index out of range".into()));
    }
    let law = enumerate_transition(y0, rates, t)?;
    let mut total = S::zero();
    for (cfg, weight) in &law {
        if query.iter().all(|&(k, s)| cfg.pos(k) >= s) {
            total = total + weight.clone();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::left_edge;
    use crate::drsk::{drsk_forward, left_edge_step};
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    fn cfg(p: &[i64]) -> ParticleConfig {
        ParticleConfig::new(p.to_vec()).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(&cfg(&[0]), &[true]), cfg(&[1]));
        // Particle 2 blocked by exclusion.
        assert_eq!(step(&cfg(&[1, 0]), &[false, true]), cfg(&[1, 0]));
        assert_eq!(step(&cfg(&[2, 0]), &[true, true]), cfg(&[3, 1]));
    }

    #[test]
    fn one_particle_transition_table() {
        let rates = Rates::new(vec![rat(1, 1)], vec![rat(1, 1)]).unwrap();
        let law = enumerate_transition(&cfg(&[0]), &rates, 1).unwrap();
        assert_eq!(law[&cfg(&[0])], rat(1, 2));
        assert_eq!(law[&cfg(&[1])], rat(1, 2));
    }

    #[test]
    fn transition_law_is_normalized() {
        let rates = Rates::new(
            vec![rat(1, 4), rat(1, 3), rat(2, 5)],
            vec![rat(3, 2), rat(2, 1)],
        )
        .unwrap();
        let law = enumerate_transition(&cfg(&[0, -1]), &rates, 3).unwrap();
        let total: BigRational = law.values().fold(Scalar::zero(), |a: BigRational, b| a + b.clone());
        assert_eq!(total, Scalar::one());
    }

    #[test]
    fn two_particle_two_step_table() {
        // p = (1/4, 1/3), q = (3/2, 2): check a couple of entries against a
        // hand count of the 16 driving matrices.
        let rates = Rates::new(vec![rat(1, 4), rat(1, 3)], vec![rat(3, 2), rat(2, 1)]).unwrap();
        let y0 = cfg(&[1, 0]);
        let law = enumerate_transition(&y0, &rates, 2).unwrap();
        let total: BigRational = law.values().fold(Scalar::zero(), |a: BigRational, b| a + b.clone());
        assert_eq!(total, Scalar::one());
        // Static endpoint (1,0): particle 1 must draw W=0 twice (stay
        // probabilities 8/11 and 2/3); particle 2 is then blocked at 0
        // whatever its W values are, so they marginalize out.
        assert_eq!(law[&cfg(&[1, 0])], rat(8, 11) * rat(2, 3));
        // Maximal endpoint (3,2): all four Bernoulli draws must be 1 and no
        // blocking occurs: jump probabilities 3/11, 1/3 for particle 1 and
        // 1/3, 2/5 for particle 2.
        let w_all = rat(3, 11) * rat(1, 3) * rat(1, 3) * rat(2, 5);
        assert_eq!(law[&cfg(&[3, 2])], w_all);
    }

    #[test]
    fn oracle_query_edges() {
        let rates = Rates::new(vec![rat(1, 4), rat(1, 3)], vec![rat(3, 2), rat(2, 1)]).unwrap();
        let y0 = cfg(&[0, -2]);
        let one: BigRational = Scalar::one();
        assert_eq!(
            multipoint_prob_oracle(&y0, &rates, 2, &vec![]).unwrap(),
            one
        );
        // Constraints at or below the start are almost sure.
        assert_eq!(
            multipoint_prob_oracle(&y0, &rates, 2, &vec![(1, 0), (2, -2)]).unwrap(),
            one
        );
    }

    #[test]
    fn zero_step_trajectory_is_the_initial_state() {
        let rates = Rates::new(vec![1.0f64], vec![1.0f64]).unwrap();
        let y0 = cfg(&[0]);
        assert_eq!(simulate(&y0, &rates, 0, 3, 0), vec![y0]);
    }

    #[test]
    fn monte_carlo_matches_bernoulli_marginal() {
        let rates = Rates::new(vec![1.0f64], vec![1.0f64]).unwrap();
        let y0 = cfg(&[0]);
        let reps = 100_000u64;
        let mut hits = 0u64;
        for r in 0..reps {
            let traj = simulate(&y0, &rates, 1, 7, r);
            if traj[1].pos(1) == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / reps as f64;
        let sigma = (0.25f64 / reps as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * sigma, "freq {freq}");
    }

    #[test]
    fn monte_carlo_matches_exhaustive_law() {
        let rates = Rates::new(vec![0.25f64, 1.0 / 3.0], vec![1.5f64, 2.0]).unwrap();
        let y0 = cfg(&[0, -1]);
        let law = enumerate_transition(&y0, &rates, 2).unwrap();
        let reps = 60_000u64;
        let mut counts: BTreeMap<ParticleConfig, u64> = BTreeMap::new();
        for r in 0..reps {
            let traj = simulate(&y0, &rates, 2, 99, r);
            *counts.entry(traj[2].clone()).or_insert(0) += 1;
        }
        for (cfg, prob) in &law {
            let freq = *counts.get(cfg).unwrap_or(&0) as f64 / reps as f64;
            let sigma = (prob * (1.0 - prob) / reps as f64).sqrt().max(1e-9);
            assert!(
                (freq - prob).abs() < 4.5 * sigma,
                "{cfg:?}: freq {freq} vs prob {prob}"
            );
        }
    }

    #[test]
    fn trajectories_stay_ordered_and_bounded() {
        let rates = Rates::new(vec![0.3f64; 5], vec![1.2, 1.7, 2.5]).unwrap();
        let y0 = cfg(&[4, 0, -3]);
        for r in 0..200 {
            let traj = simulate(&y0, &rates, 5, 1234, r);
            for (t, state) in traj.iter().enumerate() {
                for k in 1..=3 {
                    assert!(state.pos(k) >= y0.pos(k));
                    assert!(state.pos(k) <= y0.pos(k) + t as i64);
                }
            }
        }
    }

    #[test]
    fn drsk_left_edge_equals_particle_dynamics() {
        // Exhaustive over all 3x3 driving matrices: the dRSK left edge
        // (shifted by -k) runs the same recursion as the particles started
        // from y_k = -k.
        for idx in 0..(1u64 << 9) {
            let w = crate::drsk::BitMatrix::from_index(3, 3, idx);
            let (p, _) = drsk_forward(&w);
            let le = left_edge(&p).unwrap();
            let mut y = cfg(&[-1, -2, -3]);
            let mut edge = vec![0i64; 3];
            for i in 1..=3 {
                y = step(&y, &w.row(i));
                edge = left_edge_step(&edge, &w.row(i));
            }
            let from_edge: Vec<i64> = edge.iter().zip(1i64..).map(|(l, k)| l - k).collect();
            assert_eq!(from_edge, y.positions(), "matrix {idx}");
            let le_vec: Vec<i64> = (1..=3).map(|k| le.part(k) - k as i64).collect();
            assert_eq!(le_vec, y.positions(), "matrix {idx} vs tableau");
        }
    }
}
