//! Brute-force reference implementations: non-intersecting lattice path
//! ensembles enumerated vertex by vertex, plus a small deterministic
//! generator for randomized identity sweeps. These are deliberately
//! independent of the determinant/symbol code they are used to check.

use crate::scalar::Scalar;

/// Deterministic 64-bit generator for reproducible randomized checks.
#[derive(Clone, Debug)]
pub struct CheckRng {
    state: u64,
}

impl CheckRng {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `lo..=hi`.
    pub fn int_range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// A positive rational with numerator and denominator up to `max`.
    pub fn positive_rational<S: Scalar>(&mut self, max: i64) -> S {
        let num = self.int_range(1, max);
        let den = self.int_range(1, max);
        S::from_ratio(num, den)
    }
}

type Vertex = (i64, usize);

/// Weight of the ensemble of `n` vertex-disjoint h-paths (steps up or
/// right, horizontal step at level `l` weighted `q[l-1]`), where path `i`
/// runs from `starts[i]` to `ends[i]` and must take its first step
/// upwards.
pub fn h_path_ensemble_weight<S: Scalar>(
    starts: &[(i64, usize)],
    ends: &[(i64, usize)],
    q: &[S],
) -> S {
    assert_eq!(starts.len(), ends.len());
    let mut occupied: Vec<Vertex> = Vec::new();
    fn place<S: Scalar>(
        idx: usize,
        starts: &[(i64, usize)],
        ends: &[(i64, usize)],
        q: &[S],
        occupied: &mut Vec<Vertex>,
        weight: S,
        total: &mut S,
    ) {
        if idx == starts.len() {
            *total = total.clone() + weight;
            return;
        }
        let (a, la) = starts[idx];
        let (b, lb) = ends[idx];
        // Enumerate level positions c[la..=lb] with c[la] = a, c[lb] = b,
        // weakly increasing; level la holds only the start vertex.
        fn levels<S: Scalar>(
            level: usize,
            pos: i64,
            idx: usize,
            starts: &[(i64, usize)],
            ends: &[(i64, usize)],
            q: &[S],
            occupied: &mut Vec<Vertex>,
            path_claims: &mut Vec<Vertex>,
            weight: S,
            total: &mut S,
        ) {
            let (b, lb) = ends[idx];
            if level == lb {
                if pos != b {
                    return;
                }
                occupied.extend(path_claims.iter().copied());
                place(idx + 1, starts, ends, q, occupied, weight, total);
                occupied.truncate(occupied.len() - path_claims.len());
                return;
            }
            // Move up to level+1, then right from pos to next.
            for next in pos..=b {
                let claim_from = path_claims.len();
                let mut free = true;
                for x in pos..=next {
                    if occupied.contains(&(x, level + 1)) {
                        free = false;
                        break;
                    }
                    path_claims.push((x, level + 1));
                }
                if free {
                    let w = weight.clone() * q[level].powi(next - pos);
                    levels(
                        level + 1,
                        next,
                        idx,
                        starts,
                        ends,
                        q,
                        occupied,
                        path_claims,
                        w,
                        total,
                    );
                }
                path_claims.truncate(claim_from);
            }
        }
        if lb < la || (la == lb && a != b) || b < a {
            return;
        }
        if occupied.contains(&(a, la)) {
            return;
        }
        let mut claims = vec![(a, la)];
        if la == lb {
            occupied.push((a, la));
            place(idx + 1, starts, ends, q, occupied, weight, total);
            occupied.pop();
            return;
        }
        levels(
            la, a, idx, starts, ends, q, occupied, &mut claims, weight, total,
        );
    }
    let mut total = S::zero();
    place(0, starts, ends, q, &mut occupied, S::one(), &mut total);
    total
}

/// Weight of the ensemble of vertex-disjoint e-paths (steps up or
/// diagonally up-right), with the diagonal step into level `l` weighted
/// `diag(l)`.
pub fn e_path_ensemble_weight<S: Scalar>(
    starts: &[(i64, usize)],
    ends: &[(i64, usize)],
    diag: &dyn Fn(usize) -> S,
) -> S {
    assert_eq!(starts.len(), ends.len());
    fn place<S: Scalar>(
        idx: usize,
        starts: &[(i64, usize)],
        ends: &[(i64, usize)],
        diag: &dyn Fn(usize) -> S,
        occupied: &mut Vec<Vertex>,
        weight: S,
        total: &mut S,
    ) {
        if idx == starts.len() {
            *total = total.clone() + weight;
            return;
        }
        let (a, la) = starts[idx];
        let (b, lb) = ends[idx];
        if lb < la || b < a || (b - a) as usize > lb - la {
            return;
        }
        fn walk<S: Scalar>(
            level: usize,
            pos: i64,
            idx: usize,
            starts: &[(i64, usize)],
            ends: &[(i64, usize)],
            diag: &dyn Fn(usize) -> S,
            occupied: &mut Vec<Vertex>,
            weight: S,
            total: &mut S,
        ) {
            if occupied.contains(&(pos, level)) {
                return;
            }
            let (b, lb) = ends[idx];
            occupied.push((pos, level));
            if level == lb {
                if pos == b {
                    place(idx + 1, starts, ends, diag, occupied, weight, total);
                }
            } else {
                // Straight up.
                if b - pos <= (lb - level - 1) as i64 {
                    walk(
                        level + 1,
                        pos,
                        idx,
                        starts,
                        ends,
                        diag,
                        occupied,
                        weight.clone(),
                        total,
                    );
                }
                // Diagonal up-right.
                if pos < b {
                    let w = weight.clone() * diag(level + 1);
                    walk(
                        level + 1,
                        pos + 1,
                        idx,
                        starts,
                        ends,
                        diag,
                        occupied,
                        w,
                        total,
                    );
                }
            }
            occupied.pop();
        }
        walk(la, a, idx, starts, ends, diag, occupied, weight, total);
    }
    let mut total = S::zero();
    let mut occupied: Vec<Vertex> = Vec::new();
    place(0, starts, ends, diag, &mut occupied, S::one(), &mut total);
    total
}

/// Path oracle for the link kernel: vertex-disjoint h-paths from
/// `(y'_i - i, i)` to `(la_i - i, N)`, first step up.
pub fn lambda_path_oracle<S: Scalar>(q: &[S], la: &[i64], y_prime: &[i64]) -> S {
    let n = q.len();
    let starts: Vec<(i64, usize)> = (1..=n).map(|i| (y_prime[i - 1] - i as i64, i)).collect();
    let ends: Vec<(i64, usize)> = (1..=n).map(|i| (la[i - 1] - i as i64, n)).collect();
    h_path_ensemble_weight(&starts, &ends, q)
}

/// Path oracle for the inverse link kernel: e-paths from `(mu_i - i, 0)`
/// to `(y_i - i, N - i)` with diagonal weight `-q_{N-l+1}` into level `l`.
pub fn lambda_inverse_path_oracle<S: Scalar>(q: &[S], y: &[i64], mu: &[i64]) -> S {
    let n = q.len();
    let starts: Vec<(i64, usize)> = (1..=n).map(|i| (mu[i - 1] - i as i64, 0)).collect();
    let ends: Vec<(i64, usize)> = (1..=n).map(|i| (y[i - 1] - i as i64, n - i)).collect();
    let q = q.to_vec();
    e_path_ensemble_weight(&starts, &ends, &move |level| -q[q.len() - level].clone())
}

/// Path oracle for the diagonal-step kernel: e-paths from `(mu_i - i, 0)`
/// to `(la_i - i, t - r)` with diagonal weight `p_{r+l}` into level `l`.
pub fn r_path_oracle<S: Scalar>(p: &[S], r: usize, t: usize, mu: &[i64], la: &[i64]) -> S {
    let n = mu.len();
    let starts: Vec<(i64, usize)> = (1..=n).map(|i| (mu[i - 1] - i as i64, 0)).collect();
    let ends: Vec<(i64, usize)> = (1..=n).map(|i| (la[i - 1] - i as i64, t - r)).collect();
    let p = p.to_vec();
    e_path_ensemble_weight(&starts, &ends, &move |level| p[r + level - 1].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{
        lambda_inverse_kernel, lambda_kernel, r_kernel_det, weakly_decreasing_in_ranges,
    };
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    #[test]
    fn single_h_path_is_complete_polynomial() {
        // One path from (0,1) to (m,3), first step up: weight
        // h_m(q_2, q_3).
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        for m in 0..4 {
            let w = h_path_ensemble_weight(&[(0, 1)], &[(m, 3)], &q);
            assert_eq!(w, crate::combinatorics::complete_h(m, &q[1..3]));
        }
    }

    #[test]
    fn single_e_path_is_elementary_polynomial() {
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        let diag = |l: usize| q[l - 1].clone();
        for m in 0..4 {
            let w = e_path_ensemble_weight(&[(0, 0)], &[(m, 3)], &diag);
            assert_eq!(w, crate::combinatorics::elementary_e(m, &q));
        }
    }

    #[test]
    fn lambda_kernels_match_path_oracles() {
        let q = vec![rat(3, 2), rat(2, 1), rat(3, 1)];
        let p = vec![rat(1, 4), rat(1, 3)];
        let lo = vec![1i64, 0, -2];
        let hi = vec![4i64, 2, 0];
        let configs = weakly_decreasing_in_ranges(&lo, &hi);
        for a in &configs {
            for b in &configs {
                assert_eq!(
                    lambda_kernel(&q, a, b).unwrap(),
                    lambda_path_oracle(&q, a, b),
                    "Lambda({a:?},{b:?})"
                );
                assert_eq!(
                    lambda_inverse_kernel(&q, a, b).unwrap(),
                    lambda_inverse_path_oracle(&q, a, b),
                    "LambdaInv({a:?},{b:?})"
                );
                let rates = crate::dynamics::Rates::new(p.clone(), q.clone()).unwrap();
                assert_eq!(
                    r_kernel_det(&rates, 0, 2, a, b).unwrap(),
                    r_path_oracle(&p, 0, 2, a, b),
                    "R({a:?},{b:?})"
                );
            }
        }
    }
}
