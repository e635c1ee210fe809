//! Kalmanson matrix recognition and structure-preserving transformations.
//!
//! A symmetric matrix is Kalmanson when for every `i < j < l < m`
//!
//! ```text
//! c[i][j] + c[l][m] <= c[i][l] + c[j][m]
//! c[i][m] + c[j][l] <= c[i][l] + c[j][m]
//! ```
//!
//! On such matrices the identity tour is optimal for every subset of nodes.

use crate::error::{invalid, Result};
use crate::instance::DistanceMatrix;
use crate::sum::exact_sum;

/// Which of the two quadruple inequalities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KalmansonCondition {
    /// `c[i][j] + c[l][m] <= c[i][l] + c[j][m]`
    First,
    /// `c[i][m] + c[j][l] <= c[i][l] + c[j][m]`
    Second,
}

/// A violated quadruple. Indices are 0-based with `i < j < l < m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmansonWitness {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub m: usize,
    pub condition: KalmansonCondition,
    /// Amount by which the left-hand side exceeds the right-hand side.
    pub violation: f64,
}

/// Scale-relative tolerance: `1e-9 * (1 + max entry)`.
pub fn default_tolerance(matrix: &DistanceMatrix) -> f64 {
    1e-9 * (1.0 + matrix.max_entry())
}

/// Returns the lexicographically first quadruple violating a Kalmanson
/// inequality by more than `tol`, or `None` if the matrix is Kalmanson.
pub fn kalmanson_violation(matrix: &DistanceMatrix, tol: f64) -> Option<KalmansonWitness> {
    let n = matrix.len();
    let c = |a: usize, b: usize| matrix.get(a, b);
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                for m in l + 1..n {
                    let rhs = c(i, l) + c(j, m);
                    let first = c(i, j) + c(l, m) - rhs;
                    if first > tol {
                        return Some(KalmansonWitness {
                            i,
                            j,
                            l,
                            m,
                            condition: KalmansonCondition::First,
                            violation: first,
                        });
                    }
                    let second = c(i, m) + c(j, l) - rhs;
                    if second > tol {
                        return Some(KalmansonWitness {
                            i,
                            j,
                            l,
                            m,
                            condition: KalmansonCondition::Second,
                            violation: second,
                        });
                    }
                }
            }
        }
    }
    None
}

pub fn is_kalmanson(matrix: &DistanceMatrix, tol: f64) -> bool {
    kalmanson_violation(matrix, tol).is_none()
}

/// Renumbers rows and columns: `result[a][b] = matrix[perm[a]][perm[b]]`.
pub fn permute_matrix(matrix: &DistanceMatrix, perm: &[usize]) -> Result<DistanceMatrix> {
    let n = matrix.len();
    if perm.len() != n {
        return Err(invalid(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(invalid("permutation is not a bijection"));
        }
    }
    DistanceMatrix::from_fn(n, |a, b| matrix.get(perm[a], perm[b]))
}

/// Length of the identity tour `⟨1, 2, …, n, 1⟩`.
pub fn master_tour_length(matrix: &DistanceMatrix) -> f64 {
    let n = matrix.len();
    exact_sum((0..n).map(|k| matrix.get(k, (k + 1) % n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{euclidean_matrix, Rounding};

    fn pts(p: &[(f64, f64)]) -> DistanceMatrix {
        euclidean_matrix(p, Rounding::Exact).unwrap()
    }

    fn square() -> DistanceMatrix {
        pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    fn line4() -> DistanceMatrix {
        pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])
    }

    #[test]
    fn square_in_hull_order() {
        assert!(is_kalmanson(&square(), 0.0));
    }

    #[test]
    fn square_with_swapped_labels() {
        let m = pts(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        let w = kalmanson_violation(&m, 0.0).unwrap();
        assert_eq!((w.i, w.j, w.l, w.m), (0, 1, 2, 3));
        assert_eq!(w.condition, KalmansonCondition::First);
        assert!((w.violation - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn collinear_holds_with_equality() {
        assert!(is_kalmanson(&line4(), 0.0));
    }

    #[test]
    fn permutation_examples() {
        let sq = square();
        assert_eq!(permute_matrix(&sq, &[0, 1, 2, 3]).unwrap(), sq);
        let shifted = permute_matrix(&line4(), &[2, 3, 0, 1]).unwrap();
        assert!(is_kalmanson(&shifted, 0.0));
        let swapped = permute_matrix(&sq, &[0, 2, 1, 3]).unwrap();
        assert!(!is_kalmanson(&swapped, 0.0));
    }

    #[test]
    fn permutation_must_be_bijective() {
        assert!(permute_matrix(&square(), &[0, 0, 1, 2]).is_err());
        assert!(permute_matrix(&square(), &[0, 1, 2]).is_err());
        assert!(permute_matrix(&square(), &[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn master_tour_examples() {
        assert_eq!(master_tour_length(&square()), 4.0);
        assert_eq!(master_tour_length(&line4()), 6.0);
    }
}
