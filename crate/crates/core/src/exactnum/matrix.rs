use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{ArithError, QuadScalar};

/// Dense row-major matrix over `Q(sqrt D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QuadScalar>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![QuadScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = QuadScalar::one();
        }
        m
    }

    pub fn diag(entries: &[QuadScalar]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn diag_int(entries: &[i64]) -> Self {
        Self::diag(&entries.iter().map(|&e| QuadScalar::from_int(e)).collect::<Vec<_>>())
    }

    pub fn from_rows(rows: Vec<Vec<QuadScalar>>) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ArithError::Dimension("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| QuadScalar::from_int(x)).collect()).collect())
            .expect("ragged integer rows")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<QuadScalar>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
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

    pub fn row(&self, i: usize) -> Vec<QuadScalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<QuadScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<QuadScalar>> {
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

    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        if self.cols != other.rows {
            return Err(ArithError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.checked_mul(b)?;
                    out[(i, j)] = out[(i, j)].checked_add(&prod)?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[QuadScalar]) -> Result<Vec<QuadScalar>, ArithError> {
        if v.len() != self.cols {
            return Err(ArithError::Dimension(format!("{}x{} * vector of length {}", self.rows, self.cols, v.len())));
        }
        let mut out = vec![QuadScalar::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() && !x.is_zero() {
                    *o = o.checked_add(&a.checked_mul(x)?)?;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&QuadScalar, &QuadScalar) -> Result<QuadScalar, ArithError>,
    ) -> Result<Self, ArithError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(ArithError::Dimension("elementwise shape mismatch".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect::<Result<_, _>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self, ArithError> {
        self.zip_with(other, QuadScalar::checked_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.zip_with(other, QuadScalar::checked_sub)
    }

    pub fn scale(&self, k: &QuadScalar) -> Result<Self, ArithError> {
        let data = self.data.iter().map(|x| x.checked_mul(k)).collect::<Result<_, _>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QuadScalar::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_rational(&self) -> bool {
        self.data.iter().all(QuadScalar::is_rational)
    }

    /// The common `D` of all irrational entries (0 when all are rational).
    pub fn root(&self) -> Result<u64, ArithError> {
        let mut root = 0;
        for x in &self.data {
            match (root, x.root()) {
                (_, 0) => {}
                (0, r) => root = r,
                (r, s) if r == s => {}
                (r, s) => return Err(ArithError::MismatchedRoot(r, s)),
            }
        }
        Ok(root)
    }

    /// Splits `self = A + sqrt(D) B` with `A`, `B` rational.
    pub fn rational_parts(&self) -> (Self, Self) {
        let a = self.data.iter().map(|x| QuadScalar::rational(x.a().clone())).collect();
        let b = self.data.iter().map(|x| QuadScalar::rational(x.b().clone())).collect();
        (Self { rows: self.rows, cols: self.cols, data: a }, Self { rows: self.rows, cols: self.cols, data: b })
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Self) -> Result<Self, ArithError> {
        if self.cols != other.cols {
            return Err(ArithError::Dimension("stack with different column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (k, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m[(k, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inverse().expect("nonzero pivot");
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let t = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : self * x = 0}`, one vector per
    /// free column, with a 1 in that free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<QuadScalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![QuadScalar::zero(); self.cols];
                v[f] = QuadScalar::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&r[(row, f)];
                }
                v
            })
            .collect()
    }

    /// Null space as the columns of a matrix (`cols x k`).
    pub fn nullspace_matrix(&self) -> Self {
        Self::from_columns(&self.nullspace(), self.cols)
    }

    /// One solution of `self * x = b` (free variables set to zero), or
    /// `None` when the system is inconsistent.
    pub fn solve(&self, b: &[QuadScalar]) -> Option<Vec<QuadScalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (i, x) in b.iter().enumerate() {
            aug[(i, self.cols)] = x.clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![QuadScalar::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        if !self.is_square() {
            return Err(ArithError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let mut aug = Self::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(ArithError::Singular);
        }
        Ok(r.submatrix(0, n, n, n))
    }

    pub fn determinant(&self) -> Result<QuadScalar, ArithError> {
        if !self.is_square() {
            return Err(ArithError::Dimension("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = QuadScalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(QuadScalar::zero());
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inverse()?;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(i, j)] = &m[(i, j)] - &t;
                }
            }
        }
        Ok(det)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `B^T * self * B` for a square `self`.
    pub fn congruent(&self, basis: &Self) -> Result<Self, ArithError> {
        basis.transpose().mul(&self.mul(basis)?)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].to_f64()).collect()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &QuadScalar> {
        self.data.iter()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = QuadScalar;
    fn index(&self, (i, j): (usize, usize)) -> &QuadScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut QuadScalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<QuadScalar>>::deserialize(d)?;
        QMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let m = QMatrix::from_int_rows(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), QMatrix::identity(2));
        assert_eq!(m.determinant().unwrap(), QuadScalar::one());
        let sing = QMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(sing.inverse(), Err(ArithError::Singular));
        assert_eq!(sing.rank(), 1);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = QMatrix::from_int_rows(&[vec![1, 2, 3, 4], vec![2, 4, 7, 9]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).unwrap().iter().all(QuadScalar::is_zero));
        }
    }
}
