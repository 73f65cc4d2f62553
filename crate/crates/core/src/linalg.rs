//! Dense row-major matrices and the few kernels the solver needs.
//!
//! All accumulations run in a fixed order (row by row, column by column),
//! so a product split over column blocks reproduces the unsplit product
//! bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                context: "matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// A matrix with a single column.
    pub fn column_vector(v: &[f64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Horizontal concatenation `[M_1 M_2 ... M_K]`.
    pub fn hcat(blocks: &[Matrix]) -> Result<Matrix> {
        let rows = blocks.first().map_or(0, Matrix::rows);
        if let Some(bad) = blocks.iter().find(|b| b.rows != rows) {
            return Err(Error::Dimension {
                context: "hcat row count",
                expected: rows,
                found: bad.rows,
            });
        }
        let cols: usize = blocks.iter().map(Matrix::cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> Matrix {
        assert!(start <= end && end <= self.cols);
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[start..end]);
        }
        Matrix {
            rows: self.rows,
            cols: end - start,
            data,
        }
    }

    /// `acc += M x`, accumulating each row left to right into `acc[r]`.
    pub fn mul_vec_acc(&self, x: &[f64], acc: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(acc.len(), self.rows);
        for (r, out) in acc.iter_mut().enumerate() {
            let mut s = *out;
            for (a, xi) in self.row(r).iter().zip(x) {
                s += a * xi;
            }
            *out = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.mul_vec_acc(x, &mut out);
        out
    }

    /// `out = Mᵀ y`, accumulating over rows in ascending order.
    pub fn tr_mul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (r, &yr) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * yr;
            }
        }
    }

    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        self.tr_mul_vec_into(y, &mut out);
        out
    }

    /// The Gram matrix `MᵀM`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let ri = row[i];
                if ri == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += ri * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Dimension {
                context: "Cholesky of non-square matrix",
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let n = m.rows();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Eigen-decomposition of a small dense symmetric matrix (row-major `n×n`) by
/// cyclic Jacobi rotations. Returns eigenvalues in ascending order and the
/// matching unit eigenvectors.
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let total: f64 = a.iter().map(|x| x * x).sum();
        if off <= f64::EPSILON * f64::EPSILON * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_products_match_unblocked_bitwise() {
        let m = Matrix::from_row_major(3, 5, (0..15).map(|i| (i as f64 * 0.37).sin()).collect())
            .unwrap();
        let x: Vec<f64> = (0..5).map(|i| (i as f64).cos() * 1.3).collect();
        let whole = m.mul_vec(&x);
        let left = m.column_block(0, 2);
        let right = m.column_block(2, 5);
        let mut acc = vec![0.0; 3];
        left.mul_vec_acc(&x[..2], &mut acc);
        right.mul_vec_acc(&x[2..], &mut acc);
        assert_eq!(whole, acc);

        let y = [0.3, -1.1, 2.0];
        let t = m.tr_mul_vec(&y);
        assert_eq!(&t[..2], left.tr_mul_vec(&y).as_slice());
        assert_eq!(&t[2..], right.tr_mul_vec(&y).as_slice());
        assert_eq!(Matrix::hcat(&[left, right]).unwrap(), m);
    }

    #[test]
    fn gram_and_transpose() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = m.gram();
        assert_eq!(g, Matrix::from_rows(&[vec![35.0, 44.0], vec![44.0, 56.0]]).unwrap());
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.2],
            vec![0.5, -0.2, 2.0],
        ])
        .unwrap();
        let chol = Cholesky::factor(&a).unwrap();
        let u = [1.0, -2.0, 0.25];
        let b = a.mul_vec(&u);
        let x = chol.solve(&b);
        for (xi, ui) in x.iter().zip(u) {
            assert!((xi - ui).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            Cholesky::factor(&a),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn shape_errors() {
        assert!(Matrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Matrix::hcat(&[Matrix::zeros(2, 1), Matrix::zeros(3, 1)]).is_err());
    }

    #[test]
    fn jacobi_diagonalizes_small_symmetric() {
        let a = vec![2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (vals, vecs) = symmetric_eigen(a.clone(), 3);
        let r2 = 2f64.sqrt();
        for (got, want) in vals.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-14);
        }
        let m = Matrix::from_row_major(3, 3, a).unwrap();
        for (l, v) in vals.iter().zip(&vecs) {
            let mv = m.mul_vec(v);
            assert!(mv.iter().zip(v).all(|(x, y)| (x - l * y).abs() < 1e-13));
            assert!((norm(v) - 1.0).abs() < 1e-14);
        }
    }
}
