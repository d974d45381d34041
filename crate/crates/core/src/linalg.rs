//! Small dense real linear algebra: square matrices, a cyclic Jacobi
//! eigensolver for symmetric matrices and a pivoted linear solver.
//!
//! Ion chains here have at most a handful of ions, so everything is a plain
//! row-major `Vec<f64>`.

use std::ops::{Index, IndexMut};

use serde::Serialize;

/// Square real matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix rows must be square");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn off_diagonal_norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row `k` is the unit eigenvector belonging to `values[k]`.
    pub vectors: SquareMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Eigenvalues come back ascending and each eigenvector has its
/// largest-magnitude component positive. Ties in magnitude (within 1e-12 of
/// the maximum) are resolved in favour of the lowest index, so mirror-symmetric
/// modes get a deterministic sign.
pub fn symmetric_eigen(matrix: &SquareMatrix) -> SymmetricEigen {
    let n = matrix.dim();
    let mut a = matrix.clone();
    let mut v = SquareMatrix::identity(n);
    let scale = matrix.norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm_sq().sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                // columns of v accumulate the eigenvectors
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));

    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = SquareMatrix::zeros(n);
    for (row, &col) in order.iter().enumerate() {
        let mut vec: Vec<f64> = (0..n).map(|k| v[(k, col)]).collect();
        fix_sign(&mut vec);
        for (k, x) in vec.into_iter().enumerate() {
            vectors[(row, k)] = x;
        }
    }
    SymmetricEigen { values, vectors }
}

fn fix_sign(vec: &mut [f64]) {
    let max = vec.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(lead) = vec.iter().find(|x| x.abs() >= max - 1e-12) {
        if *lead < 0.0 {
            vec.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` for a (numerically) singular matrix.
pub fn solve(a: &SquareMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = a.norm();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].abs().total_cmp(&m[(j, col)].abs()))
            .unwrap();
        if m[(pivot, col)].abs() <= 1e-300_f64.max(1e-15 * scale) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            x.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let f = m[(row, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[(row, k)] -= f * m[(col, k)];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for k in (row + 1)..n {
            s -= m[(row, k)] * x[k];
        }
        x[row] = s / m[(row, row)];
    }
    Some(x)
}

/// Matrix inverse through column-by-column solves.
pub fn inverse(a: &SquareMatrix) -> Option<SquareMatrix> {
    let n = a.dim();
    let mut inv = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for (i, x) in col.into_iter().enumerate() {
            inv[(i, j)] = x;
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_analytic() {
        // [[a, b], [b, a]] has eigenvalues a - b, a + b
        let m = SquareMatrix::from_rows(&[vec![3.0, -1.0], vec![-1.0, 3.0]]);
        let e = symmetric_eigen(&m);
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!((e.values[1] - 4.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[(0, 0)] - h).abs() < 1e-14);
        assert!((e.vectors[(0, 1)] - h).abs() < 1e-14);
        // tie in magnitude: first component wins
        assert!((e.vectors[(1, 0)] - h).abs() < 1e-14);
        assert!((e.vectors[(1, 1)] + h).abs() < 1e-14);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = SquareMatrix::from_rows(&[
            vec![5.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 3.0],
        ]);
        let e = symmetric_eigen(&m);
        assert_eq!(e.values, vec![1.0, 3.0, 5.0]);
        assert_eq!(e.vectors.row(0), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn singular_solve_is_none() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(solve(&m, &[1.0, 1.0]).is_none());
    }

    fn symmetric(n: usize) -> impl Strategy<Value = SquareMatrix> {
        proptest::collection::vec(-10.0..10.0_f64, n * n).prop_map(move |v| {
            let mut m = SquareMatrix::zeros(n);
            for i in 0..n {
                for j in 0..=i {
                    m[(i, j)] = v[i * n + j];
                    m[(j, i)] = v[i * n + j];
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn jacobi_reconstructs(m in (1usize..=8).prop_flat_map(symmetric)) {
            let n = m.dim();
            let e = symmetric_eigen(&m);
            let s = &e.vectors;
            let sst = s.matmul(&s.transpose());
            prop_assert!(sst.max_abs_diff(&SquareMatrix::identity(n)) < 1e-10);
            for k in 0..n {
                let kv = m.matvec(s.row(k));
                let resid: f64 = kv.iter().zip(s.row(k)).map(|(a, b)| (a - e.values[k] * b).powi(2)).sum::<f64>().sqrt();
                prop_assert!(resid <= 1e-8 * m.norm().max(1e-300));
            }
            for w in e.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
        }

        #[test]
        fn solve_inverts(m in (1usize..=6).prop_flat_map(symmetric)) {
            let n = m.dim();
            // shift to make it diagonally dominant
            let mut a = m.clone();
            for i in 0..n { a[(i, i)] += 100.0; }
            let inv = inverse(&a).unwrap();
            prop_assert!(a.matmul(&inv).max_abs_diff(&SquareMatrix::identity(n)) < 1e-12);
        }
    }
}
