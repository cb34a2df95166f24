//! Small dense matrix helpers: determinants (fraction-free Bareiss for the
//! exact backend, partially pivoted LU for floats) and upper-triangular
//! inversion.

use crate::scalar::Scalar;

/// Determinant of a square matrix given as rows.
pub fn determinant<S: Scalar>(matrix: &[Vec<S>]) -> S {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|r| r.len() == n));
    if n == 0 {
        return S::one();
    }
    if S::EXACT {
        bareiss(matrix.to_vec())
    } else {
        lu_det(matrix.to_vec())
    }
}

/// Fraction-free Bareiss elimination; divisions are exact at every step.
fn bareiss<S: Scalar>(mut a: Vec<Vec<S>>) -> S {
    let n = a.len();
    let mut sign = S::one();
    let mut prev = S::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return S::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num / prev.clone();
            }
            a[i][k] = S::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Doolittle LU with partial pivoting.
fn lu_det<S: Scalar>(mut a: Vec<Vec<S>>) -> S {
    let n = a.len();
    let mut det = S::one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| {
                a[i][k]
                    .abs_f64()
                    .partial_cmp(&a[j][k].abs_f64())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][k].is_zero() {
            return S::zero();
        }
        if pivot != k {
            a.swap(k, pivot);
            det = -det;
        }
        det = det * a[k][k].clone();
        for i in k + 1..n {
            let factor = a[i][k].clone() / a[k][k].clone();
            for j in k + 1..n {
                a[i][j] = a[i][j].clone() - factor.clone() * a[k][j].clone();
            }
            a[i][k] = S::zero();
        }
    }
    det
}

/// Inverse of an upper-triangular matrix with nonzero diagonal, by back
/// substitution. Panics on a zero diagonal entry.
pub fn invert_upper_triangular<S: Scalar>(m: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = m.len();
    let mut inv = vec![vec![S::zero(); n]; n];
    for i in (0..n).rev() {
        assert!(!m[i][i].is_zero(), "zero diagonal in triangular inverse");
        inv[i][i] = S::one() / m[i][i].clone();
        for j in i + 1..n {
            let mut acc = S::zero();
            for k in i + 1..=j {
                acc = acc + m[i][k].clone() * inv[k][j].clone();
            }
            inv[i][j] = -(acc / m[i][i].clone());
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        <BigRational as Scalar>::from_ratio(n, d)
    }

    #[test]
    fn determinant_exact_and_float_agree() {
        let m_rat = vec![
            vec![rat(1, 2), rat(3, 1), rat(-1, 1)],
            vec![rat(0, 1), rat(2, 5), rat(7, 2)],
            vec![rat(4, 1), rat(-1, 3), rat(1, 1)],
        ];
        let d = determinant(&m_rat);
        let m_f: Vec<Vec<f64>> = m_rat
            .iter()
            .map(|r| r.iter().map(Scalar::to_f64).collect())
            .collect();
        assert!((determinant(&m_f) - d.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix() {
        let m = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(determinant(&m).is_zero());
    }

    #[test]
    fn zero_pivot_needs_swap() {
        let m = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        assert_eq!(determinant(&m), rat(-1, 1));
    }

    #[test]
    fn triangular_inverse() {
        let m = vec![
            vec![rat(2, 1), rat(1, 1), rat(-3, 1)],
            vec![rat(0, 1), rat(1, 2), rat(5, 1)],
            vec![rat(0, 1), rat(0, 1), rat(4, 1)],
        ];
        let inv = invert_upper_triangular(&m);
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = <BigRational as Scalar>::zero();
                for k in 0..3 {
                    acc += m[i][k].clone() * inv[k][j].clone();
                }
                let expect = if i == j { rat(1, 1) } else { rat(0, 1) };
                assert_eq!(acc, expect);
            }
        }
    }
}
