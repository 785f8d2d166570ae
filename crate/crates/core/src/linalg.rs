//! Small dense matrices over a [`Scalar`] field.
//!
//! Sizes here are at most a handful of rows, so everything is plain row-major
//! storage with Gauss-Jordan elimination. On rationals all routines are exact.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Q};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Matrix unit `E_{ij}` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = S::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    /// Commutator `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    /// Largest absolute entry, as a double.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..=i.min(self.cols.saturating_sub(1))).all(|j| self[(i, j)].is_zero()))
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = pivot_row(&a, col, col) else {
                return S::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det = det * piv.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / piv.clone();
                if !f.is_zero() {
                    for c in col..n {
                        a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = pivot_row(&a, col, col).ok_or(Error::Singular)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let piv = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / piv.clone();
                inv[(col, c)] = inv[(col, c)].clone() / piv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    inv[(r, c)] = inv[(r, c)].clone() - f.clone() * inv[(col, c)].clone();
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

fn pivot_row<S: Scalar>(a: &Matrix<S>, col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for r in from..a.rows {
        let v = a[(r, col)].abs();
        if v.is_zero() {
            continue;
        }
        if S::is_exact() {
            return Some(r);
        }
        if best.as_ref().map_or(true, |(_, b)| v > *b) {
            best = Some((r, v));
        }
    }
    best.map(|(r, _)| r)
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> =
                (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form of `vectors` (as rows); returns the nonzero rows.
pub fn row_basis(vectors: &[Vec<Q>], dim: usize) -> Vec<Vec<Q>> {
    let mut rows: Vec<Vec<Q>> = vectors.iter().filter(|v| v.iter().any(|x| !Scalar::is_zero(x))).cloned().collect();
    let mut basis = Vec::new();
    let mut lead = 0;
    while lead < dim && !rows.is_empty() {
        let Some(p) = rows.iter().position(|r| !Scalar::is_zero(&r[lead])) else {
            lead += 1;
            continue;
        };
        let pr = rows.swap_remove(p);
        let inv = <Q as Scalar>::one() / pr[lead].clone();
        let pr: Vec<Q> = pr.iter().map(|x| x.clone() * inv.clone()).collect();
        for r in rows.iter_mut() {
            let f = r[lead].clone();
            if !Scalar::is_zero(&f) {
                for (x, y) in r.iter_mut().zip(&pr) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        for b in basis.iter_mut() {
            let b: &mut Vec<Q> = b;
            let f = b[lead].clone();
            if !Scalar::is_zero(&f) {
                for (x, y) in b.iter_mut().zip(&pr) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        basis.push(pr);
        rows.retain(|r| r.iter().any(|x| !Scalar::is_zero(x)));
        lead += 1;
    }
    basis
}

pub fn rank(vectors: &[Vec<Q>], dim: usize) -> usize {
    row_basis(vectors, dim).len()
}

/// Basis of `{w : <w, v> = 0 for all v in vectors}`.
pub fn orthogonal_complement(vectors: &[Vec<Q>], dim: usize) -> Vec<Vec<Q>> {
    let basis = row_basis(vectors, dim);
    let pivots: Vec<usize> = basis
        .iter()
        .map(|r| r.iter().position(|x| !Scalar::is_zero(x)).unwrap())
        .collect();
    let mut out = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut w = vec![<Q as Scalar>::zero(); dim];
        w[free] = Scalar::one();
        for (row, &p) in basis.iter().zip(&pivots) {
            w[p] = -row[free].clone();
        }
        out.push(w);
    }
    out
}

/// Coordinates of `v` in terms of the rows of `basis`, if `v` lies in their span.
pub fn solve_in_span(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let n = basis.len();
    let dim = v.len();
    // Solve sum_k c_k basis_k = v as a dim x n system by elimination on the augmented matrix.
    let mut aug: Vec<Vec<Q>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..dim).find(|&i| !Scalar::is_zero(&aug[i][c])) else { continue };
        aug.swap(r, p);
        let inv = <Q as Scalar>::one() / aug[r][c].clone();
        for x in aug[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..dim {
            if i != r && !Scalar::is_zero(&aug[i][c]) {
                let f = aug[i][c].clone();
                let pr = aug[r].clone();
                for (x, y) in aug[i].iter_mut().zip(&pr) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !Scalar::is_zero(&row[n])) {
        return None;
    }
    let mut coeffs = vec![<Q as Scalar>::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        coeffs[c] = aug[i][n].clone();
    }
    Some(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    #[test]
    fn exact_inverse_and_determinant() {
        let m = Matrix::from_rows(vec![vec![qi(2), qi(1)], vec![qi(7), qi(4)]]);
        assert_eq!(m.determinant(), qi(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let s = Matrix::from_rows(vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]]);
        assert!(s.inverse().is_err());
        assert_eq!(s.determinant(), qi(0));
    }

    #[test]
    fn float_inverse() {
        let m = Matrix::from_rows(vec![vec![1e-3, 2.0], vec![3.0, 4.0]]);
        let p = m.mul(&m.inverse().unwrap());
        assert!(p.sub(&Matrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn spans_and_complements() {
        let vs = vec![vec![qi(1), qi(1), qi(0)], vec![qi(2), qi(2), qi(0)], vec![qi(0), qi(1), qi(1)]];
        assert_eq!(rank(&vs, 3), 2);
        let comp = orthogonal_complement(&vs, 3);
        assert_eq!(comp.len(), 1);
        for v in &vs {
            let dot = v.iter().zip(&comp[0]).fold(qi(0), |a, (x, y)| a + x * y);
            assert_eq!(dot, qi(0));
        }
        let c = solve_in_span(&vs[..1], &[q(1, 2), q(1, 2), qi(0)]).unwrap();
        assert_eq!(c, vec![q(1, 2)]);
        assert!(solve_in_span(&vs[..1], &[qi(1), qi(0), qi(0)]).is_none());
    }
}
