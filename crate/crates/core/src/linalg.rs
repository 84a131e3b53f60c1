//! Small dense linear algebra: LU solves and symmetric eigenvalues.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num;
use crate::tensor::{Mat3, Vec3};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    /// Extracts the square sub-matrix on `idx × idx`.
    pub fn submatrix(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    /// Solves `A x = b` by LU factorization with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(num::abs(*v)));
        if scale == 0.0 {
            return Err(Error::SingularMatrix);
        }
        for col in 0..n {
            let (piv, pval) = (col..n)
                .map(|r| (r, num::abs(a[r * n + col])))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pval <= 1e-300 || pval <= scale * 1e-15 {
                return Err(Error::SingularMatrix);
            }
            if piv != col {
                for k in 0..n {
                    a.swap(col * n + k, piv * n + k);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                    x[r] -= f * x[col];
                }
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for k in col + 1..n {
                s -= a[col * n + k] * x[k];
            }
            x[col] = s / a[col * n + col];
        }
        Ok(x)
    }

    /// Eigenvalues of the symmetric part, ascending, by cyclic Jacobi sweeps.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let (vals, _) = jacobi_eigen(self.n, &self.data);
        vals
    }
}

/// Cyclic Jacobi on the symmetric part of `a` (row-major `n × n`).
/// Returns ascending eigenvalues and the matching eigenvectors as columns.
fn jacobi_eigen(n: usize, a_in: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (a_in[i * n + j] + a_in[j * n + i]);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i] * a[i * n + i]).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + num::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + num::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / num::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let vals = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new] = v[k * n + old];
        }
    }
    (vals, vecs)
}

/// Eigen-decomposition of a symmetric 3×3 tensor: ascending eigenvalues and
/// orthonormal eigenvectors.
pub fn symmetric_eigen3(a: &Mat3) -> ([f64; 3], [Vec3; 3]) {
    let flat: Vec<f64> = a.0.iter().flat_map(|r| r.iter().copied()).collect();
    let (vals, vecs) = jacobi_eigen(3, &flat);
    let col = |c: usize| Vec3([vecs[c], vecs[3 + c], vecs[6 + c]]);
    ([vals[0], vals[1], vals[2]], [col(0), col(1), col(2)])
}

/// Principal square root of a symmetric positive definite tensor.
pub fn spd_sqrt(a: &Mat3) -> Option<Mat3> {
    let (vals, vecs) = symmetric_eigen3(a);
    if vals.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let mut out = Mat3::zeros();
    for (val, vec) in vals.iter().zip(vecs.iter()) {
        out += vec.outer(vec) * num::sqrt(*val);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let mut a = DenseMatrix::zeros(3);
        let rows = [[4.0, -2.0, 1.0], [-2.0, 4.0, -2.0], [1.0, -2.0, 4.0]];
        for i in 0..3 {
            for j in 0..3 {
                a.set(i, j, rows[i][j]);
            }
        }
        let x = a.solve(&[11.0, -16.0, 17.0]).unwrap();
        for (xi, ei) in x.iter().zip([1.0, -2.0, 3.0]) {
            assert!((xi - ei).abs() < 1e-13);
        }
    }

    #[test]
    fn lu_needs_pivoting() {
        let mut a = DenseMatrix::zeros(2);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        let x = a.solve(&[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn singular_system_is_reported() {
        let a = DenseMatrix::zeros(2);
        assert_eq!(a.solve(&[1.0, 1.0]), Err(Error::SingularMatrix));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let mut a = DenseMatrix::zeros(3);
        a.set(0, 0, 3.0);
        a.set(1, 1, -1.0);
        a.set(2, 2, 2.0);
        assert_eq!(a.symmetric_eigenvalues(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Mat3::from_rows([[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.1]]);
        let r = spd_sqrt(&a).unwrap();
        assert!((r * r - a).max_abs() < 1e-13);
        assert!(r.is_symmetric(1e-14));
    }
}
