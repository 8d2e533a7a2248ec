use serde::Serialize;

use super::linalg;
use super::{Exponent, Field, Ring, Scalar};
use crate::error::{Error, Result};

/// Row or column label. Matrices in this crate are indexed by Hadamard
/// coordinates, exponent vectors, or pairs of those (Kronecker products).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum Index {
    Coord(usize),
    Exp(Exponent),
    Pair(Box<Index>, Box<Index>),
}

impl Index {
    pub fn pair(a: Index, b: Index) -> Index {
        Index::Pair(Box::new(a), Box::new(b))
    }

    pub fn coords(n: usize) -> Vec<Index> {
        (0..n).map(Index::Coord).collect()
    }

    pub fn exps(es: &[Exponent]) -> Vec<Index> {
        es.iter().cloned().map(Index::Exp).collect()
    }
}

/// A dense matrix with labelled rows and columns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactMatrix<S> {
    pub rows: Vec<Index>,
    pub cols: Vec<Index>,
    pub data: Vec<Vec<S>>,
}

impl<S: Ring> ExactMatrix<S> {
    pub fn new(rows: Vec<Index>, cols: Vec<Index>, data: Vec<Vec<S>>) -> Result<Self> {
        if data.len() != rows.len() || data.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{} row labels and {} column labels do not match the data",
                rows.len(),
                cols.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    /// Unlabelled matrix (coordinate labels 0..m, 0..n).
    pub fn from_rows(data: Vec<Vec<S>>) -> Result<Self> {
        let m = data.len();
        let n = data.first().map_or(0, |r| r.len());
        Self::new(Index::coords(m), Index::coords(n), data)
    }

    pub fn from_fn(rows: Vec<Index>, cols: Vec<Index>, f: impl Fn(usize, usize) -> S) -> Self {
        let data = (0..rows.len())
            .map(|i| (0..cols.len()).map(|j| f(i, j)).collect())
            .collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn identity(idx: Vec<Index>) -> Self {
        Self::from_fn(
            idx.clone(),
            idx,
            |i, j| if i == j { S::one() } else { S::zero() },
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i][j]
    }

    pub fn row_pos(&self, r: &Index) -> Option<usize> {
        self.rows.iter().position(|x| x == r)
    }

    pub fn col_pos(&self, c: &Index) -> Option<usize> {
        self.cols.iter().position(|x| x == c)
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols.clone(), self.rows.clone(), |i, j| {
            self.data[j][i].clone()
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        ExactMatrix {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: self.cols.clone(),
            data: idx.iter().map(|&i| self.data[i].clone()).collect(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        ExactMatrix {
            rows: self.rows.clone(),
            cols: idx.iter().map(|&j| self.cols[j].clone()).collect(),
            data: self
                .data
                .iter()
                .map(|r| idx.iter().map(|&j| r[j].clone()).collect())
                .collect(),
        }
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> ExactMatrix<T> {
        ExactMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self
                .data
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{} (or labels differ)",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(ExactMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            data: linalg::mat_mul(&self.data, &other.data),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                "difference of differently labelled matrices".into(),
            ));
        }
        Ok(Self::from_fn(
            self.rows.clone(),
            self.cols.clone(),
            |i, j| self.data[i][j].clone() - &other.data[i][j],
        ))
    }

    /// Kronecker product, rows and columns labelled by pairs.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = pairs(&self.rows, &other.rows);
        let cols = pairs(&self.cols, &other.cols);
        let (m2, n2) = (other.nrows(), other.ncols());
        Self::from_fn(rows, cols, |i, j| {
            self.data[i / m2][j / n2].clone() * &other.data[i % m2][j % n2]
        })
    }

    /// Hadamard-tensor: column (j1, j2) is the coordinatewise product of
    /// column j1 of `self` and column j2 of `other`.
    pub fn had_tensor(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(
                "Hadamard tensor needs equal row labels".into(),
            ));
        }
        let cols = pairs(&self.cols, &other.cols);
        let n2 = other.ncols();
        Ok(Self::from_fn(self.rows.clone(), cols, |i, j| {
            self.data[i][j / n2].clone() * &other.data[i][j % n2]
        }))
    }
}

fn pairs(a: &[Index], b: &[Index]) -> Vec<Index> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| Index::pair(x.clone(), y.clone())))
        .collect()
}

impl<S: Scalar> ExactMatrix<S> {
    pub fn rank(&self) -> usize {
        linalg::rank(&self.data)
    }
}

impl<S: Field + Scalar> ExactMatrix<S> {
    pub fn det(&self) -> Result<S> {
        if self.nrows() != self.ncols() {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        Ok(linalg::det_field(&self.data))
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = linalg::inverse(&self.data)?;
        Ok(ExactMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data: inv,
        })
    }

    pub fn nullspace_basis(&self) -> Vec<Vec<S>> {
        linalg::nullspace(&self.data, self.ncols())
    }

    /// One fewer row than columns, and deleting any single column leaves an
    /// invertible square matrix.
    pub fn is_strongly_full(&self) -> Result<bool> {
        if self.nrows() + 1 != self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "strong fullness needs |rows| = |cols| - 1, got {}x{}",
                self.nrows(),
                self.ncols()
            )));
        }
        let n = self.ncols();
        Ok((0..n).all(|drop| {
            let keep: Vec<usize> = (0..n).filter(|&j| j != drop).collect();
            self.select_cols(&keep).rank() == self.nrows()
        }))
    }
}

impl<S: Ring> ExactMatrix<S> {
    /// JSON dump for test forensics; entries rendered with their Debug form.
    pub fn to_debug_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "data": self.data.iter().map(|r| r.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{with_prime, Fp};

    fn m(rows: &[&[i64]]) -> ExactMatrix<Fp> {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Fp::from_i64(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strongly_full_examples() {
        with_prime(7, || {
            assert!(m(&[&[1, 1]]).is_strongly_full().unwrap());
            assert!(!m(&[&[0, 1]]).is_strongly_full().unwrap());
            assert!(m(&[&[-1, 1]]).is_strongly_full().unwrap());
            assert!(m(&[&[1, 1]]).transpose().is_strongly_full().is_err());
        });
    }

    #[test]
    fn kron_identities() {
        with_prime(7, || {
            let i2 = m(&[&[1, 0], &[0, 1]]);
            let i4 = i2.kron(&i2);
            assert_eq!(
                i4.data,
                m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).data
            );
            let a = m(&[&[1], &[2]]);
            let b = m(&[&[3], &[4]]);
            assert_eq!(a.had_tensor(&b).unwrap().data, m(&[&[3], &[8]]).data);
        });
    }

    #[test]
    fn pascal_det() {
        with_prime(7, || {
            let t = m(&[&[1, 0, 0], &[1, 1, 0], &[1, 2, 1]]);
            assert_eq!(t.det().unwrap(), Fp::new(1));
            assert_eq!(
                t.mul(&t.inverse().unwrap()).unwrap().data,
                ExactMatrix::<Fp>::identity(Index::coords(3)).data
            );
        });
    }
}
