//! Integer partitions, Young tableaux, interlacing chains, left edges, and
//! the symmetric polynomials (Schur, complete, elementary) entering the
//! transition kernels.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{product, Scalar};

/// An integer partition: weakly decreasing positive parts, trailing zeros
/// trimmed. Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<i64>,
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition{:?}", self.parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Partition {
    /// Builds a partition from parts, trimming trailing zeros.
    ///
    /// Returns an error if the parts are negative or not weakly decreasing.
    pub fn new(parts: impl Into<Vec<i64>>) -> Result<Self> {
        let mut parts = parts.into();
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(Error::InvalidPartition(format!(
                    "parts not weakly decreasing: {parts:?}"
                )));
            }
        }
        if parts.last().is_some_and(|&p| p < 0) {
            return Err(Error::InvalidPartition(format!("negative part: {parts:?}")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    /// The `i`-th part (1-indexed), zero beyond the length.
    pub fn part(&self, i: usize) -> i64 {
        assert!(i >= 1);
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of the parts.
    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// Conjugate (transposed Young diagram): `result_i = #{k : part_k >= i}`.
    pub fn conjugate(&self) -> Self {
        let max = self.part(1);
        let parts = (1..=max)
            .map(|i| self.parts.iter().filter(|&&p| p >= i).count() as i64)
            .collect();
        Self { parts }
    }

    /// Containment of Young diagrams: `self_i <= other_i` for all `i`.
    pub fn contained_in(&self, other: &Self) -> bool {
        (1..=self.len()).all(|i| self.part(i) <= other.part(i))
    }
}

/// Interlacing `mu ≺ la`: `la/mu` is a horizontal strip, i.e.
/// `la_i >= mu_i >= la_{i+1}` for all `i`.
pub fn interlaces(mu: &Partition, la: &Partition) -> bool {
    let n = la.len().max(mu.len());
    (1..=n).all(|i| la.part(i) >= mu.part(i) && mu.part(i) >= la.part(i + 1))
}

/// A Young tableau stored by rows. Cell `(i, j)` (1-indexed) holds
/// `rows[i-1][j-1]`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Tableau {
    rows: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        for w in rows.windows(2) {
            if w[0].len() < w[1].len() {
                return Err(Error::InvalidTableau(
                    "row lengths not weakly decreasing".into(),
                ));
            }
        }
        if rows.last().is_some_and(|r| r.is_empty()) {
            return Err(Error::InvalidTableau("empty trailing row".into()));
        }
        Ok(Self { rows })
    }

    pub fn empty() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn shape(&self) -> Partition {
        Partition::new(self.rows.iter().map(|r| r.len() as i64).collect::<Vec<_>>())
            .expect("rows are weakly decreasing by construction")
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<u32> {
        self.rows.get(i - 1).and_then(|r| r.get(j - 1)).copied()
    }

    /// Largest entry, or 0 for the empty tableau.
    pub fn max_entry(&self) -> u32 {
        self.rows
            .iter()
            .flat_map(|r| r.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Rows weakly increase, columns strictly increase.
    pub fn is_column_strict(&self) -> bool {
        for r in &self.rows {
            if r.windows(2).any(|w| w[0] > w[1]) {
                return false;
            }
        }
        for i in 1..self.rows.len() {
            for j in 0..self.rows[i].len() {
                if self.rows[i - 1][j] >= self.rows[i][j] {
                    return false;
                }
            }
        }
        true
    }

    /// Rows strictly increase, columns weakly increase.
    pub fn is_row_strict(&self) -> bool {
        for r in &self.rows {
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        for i in 1..self.rows.len() {
            for j in 0..self.rows[i].len() {
                if self.rows[i - 1][j] > self.rows[i][j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        let shape = self.shape();
        let cols = shape.part(1) as usize;
        let mut rows = Vec::with_capacity(cols);
        for j in 1..=cols {
            let col: Vec<u32> = self
                .rows
                .iter()
                .filter(|r| r.len() >= j)
                .map(|r| r[j - 1])
                .collect();
            rows.push(col);
        }
        Self { rows }
    }
}

/// The interlacing-chain view of a column-strict tableau over `{1..=alphabet}`:
/// `chain[k]` is the shape left after deleting all entries `> k`
/// (so `chain[0]` is empty and `chain[alphabet]` is the full shape).
pub fn tableau_to_chain(t: &Tableau, alphabet: u32) -> Result<Vec<Partition>> {
    if !t.is_column_strict() {
        return Err(Error::InvalidTableau("tableau is not column-strict".into()));
    }
    if t.max_entry() > alphabet {
        return Err(Error::InvalidTableau(format!(
            "entry {} exceeds alphabet {alphabet}",
            t.max_entry()
        )));
    }
    let mut chain = Vec::with_capacity(alphabet as usize + 1);
    for k in 0..=alphabet {
        let parts: Vec<i64> = t
            .rows
            .iter()
            .map(|r| r.iter().filter(|&&e| e <= k).count() as i64)
            .collect();
        chain.push(Partition::new(parts)?);
    }
    Ok(chain)
}

/// Inverse of [`tableau_to_chain`]: rebuilds the tableau whose level-`k`
/// shape is `chain[k]`.
pub fn chain_to_tableau(chain: &[Partition]) -> Result<Tableau> {
    if chain.is_empty() || !chain[0].is_empty() {
        return Err(Error::InvalidTableau(
            "chain must start from the empty partition".into(),
        ));
    }
    for w in chain.windows(2) {
        if !interlaces(&w[0], &w[1]) {
            return Err(Error::InvalidTableau(format!(
                "chain does not interlace: {} ⊀ {}",
                w[0], w[1]
            )));
        }
    }
    let last = chain.last().unwrap();
    let mut rows: Vec<Vec<u32>> = (0..last.len()).map(|_| Vec::new()).collect();
    for (k, w) in chain.windows(2).enumerate() {
        let letter = (k + 1) as u32;
        for (i, row) in rows.iter_mut().enumerate() {
            let added = w[1].part(i + 1) - w[0].part(i + 1);
            row.extend(std::iter::repeat_n(letter, added as usize));
        }
    }
    Tableau::new(rows)
}

/// Left edge of a column-strict tableau: the number of `k`'s in the `k`-th
/// row, i.e. `chain[k].part(k)`.
pub fn left_edge(t: &Tableau) -> Result<Partition> {
    let alphabet = t.max_entry().max(t.rows.len() as u32);
    let chain = tableau_to_chain(t, alphabet)?;
    let parts: Vec<i64> = (1..=alphabet as usize)
        .map(|k| chain[k].part(k))
        .collect();
    Partition::new(parts)
}

/// Complete homogeneous symmetric polynomial `h_n(vars)`; `h_0 = 1` and
/// `h_n = 0` for `n < 0`.
pub fn complete_h<S: Scalar>(n: i64, vars: &[S]) -> S {
    if n < 0 {
        return S::zero();
    }
    let n = n as usize;
    // DP over variables: coefficients of prod_i 1/(1 - x_i z) up to degree n.
    let mut coeffs = vec![S::zero(); n + 1];
    coeffs[0] = S::one();
    for x in vars {
        for d in 1..=n {
            coeffs[d] = coeffs[d].clone() + x.clone() * coeffs[d - 1].clone();
        }
    }
    coeffs[n].clone()
}

/// Elementary symmetric polynomial `e_n(vars)`; `e_0 = 1` and `e_n = 0` for
/// `n < 0` or `n > #vars`.
pub fn elementary_e<S: Scalar>(n: i64, vars: &[S]) -> S {
    if n < 0 || n as usize > vars.len() {
        return S::zero();
    }
    let n = n as usize;
    let mut coeffs = vec![S::zero(); n + 1];
    coeffs[0] = S::one();
    for x in vars {
        for d in (1..=n).rev() {
            coeffs[d] = coeffs[d].clone() + x.clone() * coeffs[d - 1].clone();
        }
    }
    coeffs[n].clone()
}

/// All partitions `mu` interlacing below `la` (`mu ≺ la`) with at most
/// `max_len` parts.
pub fn interlacing_predecessors(la: &Partition, max_len: usize) -> Vec<Partition> {
    let rows = la.len().min(max_len + 1);
    // mu_i ranges over [la_{i+1}, la_i]; mu must have at most max_len parts,
    // which forces mu_i = 0 for i > max_len (possible only if la_{i+1} = 0).
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(rows);
    fn rec(
        la: &Partition,
        i: usize,
        rows: usize,
        max_len: usize,
        current: &mut Vec<i64>,
        out: &mut Vec<Partition>,
    ) {
        if i > rows {
            out.push(Partition::new(current.clone()).expect("interlacing gives a partition"));
            return;
        }
        if i > max_len {
            // Forced zero part; valid only if nothing below demands more.
            if la.part(i + 1) == 0 {
                current.push(0);
                rec(la, i + 1, rows, max_len, current, out);
                current.pop();
            }
            return;
        }
        let lo = la.part(i + 1);
        let hi = la.part(i);
        for v in lo..=hi {
            current.push(v);
            rec(la, i + 1, rows, max_len, current, out);
            current.pop();
        }
    }
    rec(la, 1, rows, max_len, &mut current, &mut out);
    out
}

/// Schur polynomial `s_la(vars)` evaluated by summing over interlacing
/// chains (Gelfand–Tsetlin patterns). Returns 0 when `la` has more parts
/// than there are variables.
pub fn schur<S: Scalar>(la: &Partition, vars: &[S]) -> S {
    let n = vars.len();
    if la.len() > n {
        return S::zero();
    }
    fn rec<S: Scalar>(la: &Partition, k: usize, vars: &[S]) -> S {
        if k == 0 {
            return if la.is_empty() { S::one() } else { S::zero() };
        }
        let mut acc = S::zero();
        for mu in interlacing_predecessors(la, k - 1) {
            let w = vars[k - 1].powi(la.size() - mu.size());
            acc = acc + w * rec(&mu, k - 1, vars);
        }
        acc
    }
    rec(la, n, vars)
}

/// All partitions contained in a `rows x cols` box.
pub fn partitions_in_box(rows: usize, cols: i64) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    fn rec(rows: usize, cols: i64, current: &mut Vec<i64>, out: &mut Vec<Partition>) {
        out.push(Partition::new(current.clone()).unwrap());
        if current.len() == rows {
            return;
        }
        let hi = current.last().copied().unwrap_or(cols);
        for v in (1..=hi).rev() {
            current.push(v);
            rec(rows, cols, current, out);
            current.pop();
        }
    }
    rec(rows, cols, &mut current, &mut out);
    out
}

/// `sum_la s_{la^T}(p) s_la(q) - prod_{i,j} (1 + p_i q_j)`, which the dual
/// Cauchy identity says is exactly zero. The sum is finite: terms vanish
/// unless `la` fits in the `#q x #p` box.
pub fn dual_cauchy_residual<S: Scalar>(p: &[S], q: &[S]) -> S {
    let t = p.len() as i64;
    let n = q.len();
    let mut lhs = S::zero();
    for la in partitions_in_box(n, t) {
        lhs = lhs + schur(&la.conjugate(), p) * schur(&la, q);
    }
    let rhs = product(
        p.iter()
            .flat_map(|pi| q.iter().map(move |qj| S::one() + pi.clone() * qj.clone())),
    );
    lhs - rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn pt(parts: &[i64]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    /// The Figure 1 tableau of shape (6,4,2).
    fn fig1_tableau() -> Tableau {
        Tableau::new(vec![
            vec![1, 1, 1, 2, 3, 3],
            vec![2, 2, 4, 5],
            vec![4, 4],
        ])
        .unwrap()
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        assert_eq!(pt(&[3]).conjugate(), pt(&[1, 1, 1]));
        // Count parts >= i for the (6,4,2) shape directly.
        assert_eq!(pt(&[6, 4, 2]).conjugate(), pt(&[3, 3, 2, 2, 1, 1]));
    }

    #[test]
    fn conjugate_is_involution() {
        for la in partitions_in_box(12, 12) {
            if la.size() <= 12 {
                assert_eq!(la.conjugate().conjugate(), la);
            }
        }
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&pt(&[4, 2]), &pt(&[6, 2])));
        assert!(interlaces(&Partition::empty(), &pt(&[3])));
        assert!(!interlaces(&pt(&[2, 2]), &pt(&[1])));
    }

    #[test]
    fn chain_of_fig1_tableau() {
        let chain = tableau_to_chain(&fig1_tableau(), 5).unwrap();
        let expected = vec![
            Partition::empty(),
            pt(&[3]),
            pt(&[4, 2]),
            pt(&[6, 2]),
            pt(&[6, 3, 2]),
            pt(&[6, 4, 2]),
        ];
        assert_eq!(chain, expected);
        assert_eq!(chain_to_tableau(&chain).unwrap(), fig1_tableau());
    }

    #[test]
    fn chain_trivial_cases() {
        let chain = tableau_to_chain(&Tableau::empty(), 3).unwrap();
        assert!(chain.iter().all(|p| p.is_empty()));
        let single = Tableau::new(vec![vec![2]]).unwrap();
        let chain = tableau_to_chain(&single, 2).unwrap();
        assert_eq!(chain, vec![Partition::empty(), Partition::empty(), pt(&[1])]);
    }

    #[test]
    fn chain_rejects_non_column_strict() {
        let bad = Tableau::new(vec![vec![1, 1], vec![1]]).unwrap();
        assert!(tableau_to_chain(&bad, 2).is_err());
    }

    #[test]
    fn left_edge_examples() {
        assert_eq!(left_edge(&fig1_tableau()).unwrap(), pt(&[3, 2]));
        assert_eq!(left_edge(&Tableau::empty()).unwrap(), Partition::empty());
        // P(3) from the dRSK example figure: count k's in row k.
        let p3 = Tableau::new(vec![vec![1, 1, 3], vec![2, 2, 4], vec![3], vec![4]]).unwrap();
        assert_eq!(left_edge(&p3).unwrap(), pt(&[2, 2, 1, 1]));
    }

    /// Independent Schur oracle: enumerate raw fillings and keep the
    /// column-strict ones.
    fn schur_by_fillings(la: &Partition, vars: &[BigRational]) -> BigRational {
        let n = vars.len() as u32;
        let cells: Vec<(usize, usize)> = la
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (0..len as usize).map(move |j| (i, j)))
            .collect();
        let mut total = <BigRational as Scalar>::zero();
        let mut fill = vec![0u32; cells.len()];
        'outer: loop {
            let mut rows: Vec<Vec<u32>> = la
                .parts()
                .iter()
                .map(|&len| vec![0; len as usize])
                .collect();
            for (idx, &(i, j)) in cells.iter().enumerate() {
                rows[i][j] = fill[idx] + 1;
            }
            let t = Tableau::new(rows).unwrap();
            if t.is_column_strict() {
                let mut w = <BigRational as Scalar>::one();
                for k in 1..=n {
                    let count = t
                        .rows()
                        .iter()
                        .flat_map(|r| r.iter())
                        .filter(|&&e| e == k)
                        .count();
                    w *= vars[(k - 1) as usize].powi(count as i64);
                }
                total += w;
            }
            // Odometer over fillings.
            for idx in 0..fill.len() {
                fill[idx] += 1;
                if fill[idx] < n {
                    continue 'outer;
                }
                fill[idx] = 0;
            }
            break;
        }
        total
    }

    #[test]
    fn schur_small_cases() {
        let x = vec![rat(1, 2), rat(2, 3)];
        assert_eq!(schur(&pt(&[1]), &x), rat(1, 2) + rat(2, 3));
        assert_eq!(
            schur(&pt(&[1, 1, 1]), &x),
            <BigRational as Scalar>::zero()
        );
        // s_(2,1)(x1,x2) = x1^2 x2 + x1 x2^2
        let expect = rat(1, 2).powi(2) * rat(2, 3) + rat(1, 2) * rat(2, 3).powi(2);
        assert_eq!(schur(&pt(&[2, 1]), &x), expect);
    }

    #[test]
    fn schur_chain_sum_matches_filling_enumeration() {
        let varsets: Vec<Vec<BigRational>> = vec![
            vec![rat(1, 2)],
            vec![rat(2, 3), rat(3, 5)],
            vec![rat(1, 3), rat(5, 7), rat(2, 1)],
        ];
        for vars in &varsets {
            for la in partitions_in_box(3, 6) {
                if la.size() > 6 {
                    continue;
                }
                assert_eq!(
                    schur(&la, vars),
                    schur_by_fillings(&la, vars),
                    "shape {la} vars {vars:?}"
                );
            }
        }
    }

    #[test]
    fn h_and_e_conventions() {
        let x = vec![rat(1, 2), rat(1, 3)];
        assert_eq!(complete_h(0, &x), <BigRational as Scalar>::one());
        assert_eq!(elementary_e(-2, &x), <BigRational as Scalar>::zero());
        assert_eq!(elementary_e(2, &x), rat(1, 6));
        // h_2(x1,x2) = x1^2 + x1 x2 + x2^2
        assert_eq!(complete_h(2, &x), rat(1, 4) + rat(1, 6) + rat(1, 9));
        // h/e on the empty variable set: identity operator entries.
        assert_eq!(complete_h(0, &[] as &[BigRational]), <BigRational as Scalar>::one());
        assert_eq!(complete_h(3, &[] as &[BigRational]), <BigRational as Scalar>::zero());
    }

    #[test]
    fn dual_cauchy_small() {
        // t=N=1: single box.
        let z = dual_cauchy_residual(&[rat(2, 5)], &[rat(3, 7)]);
        assert!(Scalar::is_zero(&z));
        // t=2, N=1.
        let z = dual_cauchy_residual(&[rat(1, 2), rat(1, 3)], &[rat(5, 4)]);
        assert!(Scalar::is_zero(&z));
        // t=N=2.
        let z = dual_cauchy_residual(&[rat(1, 2), rat(2, 7)], &[rat(3, 2), rat(4, 3)]);
        assert!(Scalar::is_zero(&z));
    }
}
