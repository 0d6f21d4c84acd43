//! Dense matrices over a [`Scalar`] backend: row reduction, kernels,
//! inverses, determinants, least squares.
//!
//! Pivot rule (the canonical form depends on it): columns are scanned left
//! to right; within a column the exact backend takes the first usable row,
//! the floating backend the row of largest modulus. A floating entry counts
//! as zero when its modulus is at most `tol` times the largest modulus of
//! the input matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Mat<K: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Scalar> Mat<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map(&self, f: impl Fn(&K) -> K) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out: Mat<K> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = K::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(Scalar::modulus).fold(0.0f64, Float::max)
    }

    fn treat_as_zero(entry: &K, scale: f64, tol: f64) -> bool {
        if K::EXACT {
            entry.is_zero()
        } else {
            entry.modulus() <= tol * scale
        }
    }

    /// Reduced row echelon form with the documented pivot rule. Returns the
    /// reduced matrix and the pivot column of each nonzero row.
    pub fn rref(&self, tol: f64) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = {
            let s = self.max_modulus();
            if s == 0.0 {
                1.0
            } else {
                s
            }
        };
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Pick the pivot row for column c among rows r..
            let mut best: Option<usize> = None;
            if K::EXACT {
                for i in r..m.rows {
                    if !m[(i, c)].is_zero() {
                        best = Some(i);
                        break;
                    }
                }
            } else {
                let mut best_mod = 0.0f64;
                for i in r..m.rows {
                    let w = m[(i, c)].modulus();
                    if w > best_mod {
                        best_mod = w;
                        best = Some(i);
                    }
                }
                if let Some(i) = best {
                    if Self::treat_as_zero(&m[(i, c)], scale, tol) {
                        best = None;
                    }
                }
            }
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let inv = K::one() / m[(r, c)].clone();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            m[(r, c)] = K::one();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    let delta = factor.clone() * m[(r, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - delta;
                }
                m[(i, c)] = K::zero();
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Canonical kernel basis from the reduced echelon form: one vector per
    /// free column, with a `1` in the free slot.
    pub fn kernel(&self, tol: f64) -> Vec<Vec<K>> {
        let (r, pivots) = self.rref(tol);
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = vec![K::zero(); self.cols];
            v[free] = K::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve the square system `self * x = rhs`; `None` when singular at the
    /// given tolerance.
    pub fn solve(&self, rhs: &[K], tol: f64) -> Option<Vec<K>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.len());
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = rhs[i].clone();
        }
        let (r, pivots) = aug.rref(tol);
        if pivots.len() != self.cols || pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        Some((0..self.rows).map(|i| r[(i, self.cols)].clone()).collect())
    }

    /// Inverse via Gauss-Jordan on `[self | I]`; `None` when singular.
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = K::one();
        }
        let (r, pivots) = aug.rref(tol);
        if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Determinant by Gaussian elimination with the backend pivot rule.
    pub fn det(&self, tol: f64) -> K {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let scale = {
            let s = self.max_modulus();
            if s == 0.0 {
                1.0
            } else {
                s
            }
        };
        let mut det = K::one();
        for c in 0..n {
            let mut best: Option<usize> = None;
            if K::EXACT {
                for i in c..n {
                    if !m[(i, c)].is_zero() {
                        best = Some(i);
                        break;
                    }
                }
            } else {
                let mut best_mod = 0.0;
                for i in c..n {
                    let w = m[(i, c)].modulus();
                    if w > best_mod {
                        best_mod = w;
                        best = Some(i);
                    }
                }
            }
            let Some(p) = best else { return K::zero() };
            if Self::treat_as_zero(&m[(p, c)], scale, tol) {
                return K::zero();
            }
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            det = det * m[(c, c)].clone();
            let inv = K::one() / m[(c, c)].clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone() * inv.clone();
                for j in c..n {
                    let delta = factor.clone() * m[(c, j)].clone();
                    m[(i, j)] = m[(i, j)].clone() - delta;
                }
            }
        }
        det
    }

    /// Least-squares solution of `self * x ~ rhs` through the normal
    /// equations; `None` when `self` is rank deficient.
    pub fn lstsq(&self, rhs: &[K], tol: f64) -> Option<Vec<K>> {
        let at = self.conj_transpose();
        let gram = at.mul(self);
        let atb = at.mul_vec(rhs);
        gram.solve(&atb, tol)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<K: Scalar> core::ops::Index<(usize, usize)> for Mat<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        &self.data[i * self.cols + j]
    }
}

impl<K: Scalar> core::ops::IndexMut<(usize, usize)> for Mat<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        &mut self.data[i * self.cols + j]
    }
}

impl<K: Scalar> fmt::Debug for Mat<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Euclidean norm of a coordinate vector.
pub fn vec_norm<K: Scalar>(v: &[K]) -> f64 {
    Float::sqrt(
        v.iter()
            .map(|c| {
                let a = c.modulus();
                a * a
            })
            .sum::<f64>(),
    )
}

/// Max-modulus distance between two equal-length vectors.
pub fn vec_dist_inf<K: Scalar>(a: &[K], b: &[K]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).modulus())
        .fold(0.0f64, Float::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Cf64, ComplexScalar, GaussRat};
    use num_traits::{One, Zero};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rref_exact_canonical() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![q(2, 1), q(4, 1), q(2, 1)],
            alloc::vec![q(1, 1), q(2, 1), q(3, 1)],
        ]);
        let (r, pivots) = m.rref(0.0);
        assert_eq!(pivots, alloc::vec![0, 2]);
        assert_eq!(r[(0, 0)], q(1, 1));
        assert_eq!(r[(0, 1)], q(2, 1));
        assert_eq!(r[(0, 2)], q(0, 1));
        assert_eq!(r[(1, 2)], q(1, 1));
    }

    #[test]
    fn kernel_exact() {
        // x + 2y + 3z = 0 has kernel of rank 2.
        let m = Mat::from_rows(alloc::vec![alloc::vec![q(1, 1), q(2, 1), q(3, 1)]]);
        let k = m.kernel(0.0);
        assert_eq!(k.len(), 2);
        for v in &k {
            let img = m.mul_vec(v);
            assert!(img[0].is_zero());
        }
    }

    #[test]
    fn inverse_and_det_exact() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![q(1, 1), q(2, 1)],
            alloc::vec![q(3, 1), q(5, 1)],
        ]);
        assert_eq!(m.det(0.0), q(-1, 1));
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(2));
    }

    #[test]
    fn singular_inverse_none() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![q(1, 1), q(2, 1)],
            alloc::vec![q(2, 1), q(4, 1)],
        ]);
        assert!(m.inverse(0.0).is_none());
        assert!(m.det(0.0).is_zero());
    }

    #[test]
    fn float_rank_thresholding() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![Cf64::new(1.0, 0.0), Cf64::new(0.0, 1.0)],
            alloc::vec![Cf64::new(1.0, 0.0), Cf64::new(1e-13, 1.0)],
        ]);
        assert_eq!(m.rank(1e-9), 1);
        assert_eq!(m.rank(1e-15), 2);
    }

    #[test]
    fn complex_solve_roundtrip() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![GaussRat::one(), GaussRat::i()],
            alloc::vec![GaussRat::i(), GaussRat::one()],
        ]);
        let rhs = alloc::vec![GaussRat::from_int(1), GaussRat::from_int(0)];
        let x = m.solve(&rhs, 0.0).unwrap();
        assert_eq!(m.mul_vec(&x), rhs);
    }

    #[test]
    fn lstsq_consistent_system() {
        let m = Mat::from_rows(alloc::vec![
            alloc::vec![Cf64::new(1.0, 0.0)],
            alloc::vec![Cf64::new(1.0, 0.0)],
        ]);
        let x = m.lstsq(&[Cf64::new(1.0, 0.0), Cf64::new(3.0, 0.0)], 1e-12).unwrap();
        assert!((x[0] - Cf64::new(2.0, 0.0)).norm() < 1e-12);
    }
}
