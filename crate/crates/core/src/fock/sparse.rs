//! Row-compressed complex matrices for the truncated-space operators.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::atom::C64;

/// Largest entry modulus of a dense complex matrix.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl MaxAbs for DMatrix<C64> {
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Square sparse matrix stored as sorted `(column, value)` lists per row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside {dim}x{dim}");
            *acc[i].entry(j).or_insert(C64::new(0.0, 0.0)) += v;
        }
        Self {
            dim,
            rows: acc
                .into_iter()
                .map(|r| r.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, C64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(C64::new(0.0, 0.0))
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (i, j, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let entries = self.rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter().flat_map(move |&(k, s)| other.rows[k].iter().map(move |&(j, t)| (i, j, s * t)))
        });
        Self::from_triplets(self.dim, entries)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(k, s)| s * x[k]).sum())
            .collect()
    }

    /// `self * m` for a dense square `m`.
    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, m.ncols());
        for j in 0..m.ncols() {
            let col = m.column(j);
            for (i, r) in self.rows.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &(k, s) in r {
                    acc += s * col[k];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// `m * self` for a dense square `m`.
    pub fn dense_mul(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(m.nrows(), self.dim);
        for (k, r) in self.rows.iter().enumerate() {
            let src = m.column(k);
            for &(j, s) in r {
                out.column_mut(j).axpy(s, &src, C64::new(1.0, 0.0));
            }
        }
        out
    }

    /// `Tr(rho * self)`.
    pub fn expect(&self, rho: &DMatrix<C64>) -> C64 {
        self.triplets().map(|(i, j, v)| v * rho[(j, i)]).sum()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }
}
