//! Dual column Robinson–Schensted–Knuth correspondence: column insertion,
//! the bijection from {0,1}-matrices to tableau pairs (P column-strict,
//! Q row-strict), and its inverse by reverse bumping.

use crate::combinatorics::Tableau;
use crate::error::{Error, Result};

/// A {0,1} driving matrix with `n` rows (time) and `cols` columns (letters).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    n: usize,
    cols: usize,
    entries: Vec<bool>,
}

impl BitMatrix {
    pub fn zeros(n: usize, cols: usize) -> Self {
        Self {
            n,
            cols,
            entries: vec![false; n * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::BadConfig("ragged bit matrix".into()));
        }
        let mut m = Self::zeros(n, cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::BadConfig(format!("entry {v} not in {{0,1}}")));
                }
                m.set(i + 1, j + 1, v == 1);
            }
        }
        Ok(m)
    }

    /// Decodes `index` as the little-endian bit pattern of an `n x cols`
    /// matrix; used for exhaustive enumeration.
    pub fn from_index(n: usize, cols: usize, index: u64) -> Self {
        let mut m = Self::zeros(n, cols);
        for b in 0..(n * cols) {
            m.entries[b] = (index >> b) & 1 == 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// 1-indexed access.
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[(i - 1) * self.cols + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.entries[(i - 1) * self.cols + (j - 1)] = v;
    }

    pub fn row(&self, i: usize) -> Vec<bool> {
        (1..=self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn row_sum(&self, i: usize) -> i64 {
        (1..=self.cols).filter(|&j| self.get(i, j)).count() as i64
    }

    pub fn col_sum(&self, j: usize) -> i64 {
        (1..=self.n).filter(|&i| self.get(i, j)).count() as i64
    }
}

/// Result of inserting a number into a single column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionOutcome {
    pub tableau: Tableau,
    /// The bumped entry, or `None` for the stop symbol (a cell was appended).
    pub bumped: Option<u32>,
}

/// Inserts `x` into column `j` of `t`: either `x` replaces the topmost
/// entry `>= x` (which is bumped), or a new cell is appended at the bottom
/// of the column.
pub fn insert_into_column(t: &Tableau, j: usize, x: u32) -> Result<InsertionOutcome> {
    let shape = t.shape();
    if shape.part(1) < j as i64 - 1 {
        return Err(Error::InsertionRejected(format!(
            "column {j} is out of reach for shape {shape}"
        )));
    }
    let conj = shape.conjugate();
    let col_len = conj.part(j) as usize;
    if j > 1 && conj.part(j) == conj.part(j - 1) {
        let col_max = (1..=col_len).map(|i| t.entry(i, j).unwrap()).max();
        if col_max.is_some_and(|m| x > m) {
            return Err(Error::InsertionRejected(format!(
                "cannot insert {x} into full column {j}"
            )));
        }
    }
    let mut rows: Vec<Vec<u32>> = t.rows().to_vec();
    for i in 1..=col_len {
        let y = rows[i - 1][j - 1];
        if x <= y {
            rows[i - 1][j - 1] = x;
            return Ok(InsertionOutcome {
                tableau: Tableau::new(rows)?,
                bumped: Some(y),
            });
        }
    }
    if rows.len() == col_len {
        rows.push(Vec::new());
    }
    rows[col_len].push(x);
    Ok(InsertionOutcome {
        tableau: Tableau::new(rows)?,
        bumped: None,
    })
}

/// Column-inserts `x` into `t`, bumping through columns 1, 2, ... until a
/// cell is appended. Returns the new tableau and the appended cell
/// (1-indexed row, column).
pub fn column_insert(t: &Tableau, x: u32) -> Result<(Tableau, (usize, usize))> {
    let mut current = t.clone();
    let mut carry = x;
    for j in 1.. {
        let before = current.shape().conjugate().part(j);
        let out = insert_into_column(&current, j, carry)?;
        current = out.tableau;
        match out.bumped {
            Some(y) => carry = y,
            None => return Ok((current, (before as usize + 1, j))),
        }
    }
    unreachable!("column insertion always stops");
}

/// Forward dRSK: maps a {0,1}-matrix to the pair (P, Q) of equal shape,
/// where row `i` of `w` column-inserts its one-positions `j` (in increasing
/// order) into P, and Q records each added cell with the letter `i`.
pub fn drsk_forward(w: &BitMatrix) -> (Tableau, Tableau) {
    let mut p = Tableau::empty();
    let mut q_rows: Vec<Vec<u32>> = Vec::new();
    for i in 1..=w.rows() {
        for j in 1..=w.cols() {
            if !w.get(i, j) {
                continue;
            }
            let (next, (r, _c)) = column_insert(&p, j as u32).expect("insertion is total in dRSK");
            p = next;
            if q_rows.len() < r {
                q_rows.push(Vec::new());
            }
            q_rows[r - 1].push(i as u32);
            debug_assert!(Tableau::new(q_rows.clone()).unwrap().is_row_strict());
        }
    }
    let q = Tableau::new(q_rows).expect("Q follows the shape of P");
    debug_assert_eq!(p.shape(), q.shape());
    (p, q)
}

/// Reverse column bumping: removes the cell at `(row, col)` (which must be
/// a removable corner), pushes its value back through columns
/// `col-1, ..., 1`, and returns the reduced tableau plus the letter that
/// had been inserted.
fn uninsert(t: &Tableau, row: usize, col: usize) -> Result<(Tableau, u32)> {
    let mut rows: Vec<Vec<u32>> = t.rows().to_vec();
    if rows.get(row - 1).map_or(0, Vec::len) != col
        || rows.get(row).map_or(0, Vec::len) >= col
    {
        return Err(Error::InvalidTableau(format!(
            "cell ({row},{col}) is not a removable corner"
        )));
    }
    let mut carry = rows[row - 1].pop().unwrap();
    if rows[row - 1].is_empty() {
        rows.pop();
    }
    for j in (1..col).rev() {
        // Bottommost entry <= carry in column j is the one that was
        // replaced on the way in; restore it and keep bumping left.
        let col_len = rows.iter().filter(|r| r.len() >= j).count();
        let i = (1..=col_len)
            .rev()
            .find(|&i| rows[i - 1][j - 1] <= carry)
            .ok_or_else(|| {
                Error::InvalidTableau(format!("no entry <= {carry} in column {j}"))
            })?;
        std::mem::swap(&mut rows[i - 1][j - 1], &mut carry);
    }
    Ok((Tableau::new(rows)?, carry))
}

/// Inverse dRSK: reconstructs the {0,1}-matrix from a pair of equal-shape
/// tableaux with P column-strict over `{1..=cols}` and Q row-strict over
/// `{1..=n}`.
///
/// For each recording letter `i` (from the largest down), the cells of Q
/// containing `i` are un-inserted in reverse chronological order, which is
/// bottom row first: within one insertion round the appended cells of a
/// vertical strip are created top to bottom.
pub fn drsk_inverse(p: &Tableau, q: &Tableau, n: usize, cols: usize) -> Result<BitMatrix> {
    if p.shape() != q.shape() {
        return Err(Error::InvalidTableau(format!(
            "shape mismatch: {} vs {}",
            p.shape(),
            q.shape()
        )));
    }
    if !p.is_column_strict() {
        return Err(Error::InvalidTableau("P is not column-strict".into()));
    }
    if !q.is_row_strict() {
        return Err(Error::InvalidTableau("Q is not row-strict".into()));
    }
    if p.max_entry() > cols as u32 || q.max_entry() > n as u32 {
        return Err(Error::InvalidTableau(
            "tableau alphabet exceeds requested matrix dimensions".into(),
        ));
    }
    let mut w = BitMatrix::zeros(n, cols);
    let mut p = p.clone();
    let mut q_rows: Vec<Vec<u32>> = q.rows().to_vec();
    for i in (1..=n as u32).rev() {
        let mut cells: Vec<(usize, usize)> = q_rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v == i)
                    .map(move |(c, _)| (r + 1, c + 1))
            })
            .collect();
        cells.sort_by(|a, b| b.0.cmp(&a.0));
        for (r, c) in cells {
            if q_rows[r - 1].len() != c {
                return Err(Error::InvalidTableau(format!(
                    "recording cell ({r},{c}) is not at the end of its row"
                )));
            }
            let (next, letter) = uninsert(&p, r, c)?;
            p = next;
            q_rows[r - 1].pop();
            if q_rows[r - 1].is_empty() {
                q_rows.pop();
            }
            if w.get(i as usize, letter as usize) {
                return Err(Error::InvalidTableau(format!(
                    "letter {letter} recovered twice in row {i}"
                )));
            }
            w.set(i as usize, letter as usize, true);
        }
    }
    if p.size() != 0 {
        return Err(Error::InvalidTableau("P not exhausted by inversion".into()));
    }
    Ok(w)
}

/// One time step of the autonomous left-edge recursion, applied
/// sequentially for k = 1..=N with the level-0 value treated as infinite:
/// the count at level k grows by `w_k` only if level k-1 (already updated)
/// sits strictly above.
pub fn left_edge_step(edge: &[i64], w_row: &[bool]) -> Vec<i64> {
    assert_eq!(edge.len(), w_row.len());
    let mut next = Vec::with_capacity(edge.len());
    for k in 0..edge.len() {
        let above = if k == 0 { i64::MAX } else { next[k - 1] };
        let grown = edge[k] + i64::from(w_row[k]);
        next.push(if above > edge[k] { grown } else { edge[k] });
    }
    next
}
