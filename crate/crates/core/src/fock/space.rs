//! Truncated basis |level> (x) |n_A> (x) |n_B> and the operators on it.
//!
//! Ordering is level-major, then mode A, then mode B:
//! `index = level * (n_max+1)^2 + n_A * (n_max+1) + n_B`. This is a stable
//! contract; density matrices exchanged with callers use it.

use nalgebra::DMatrix;

use super::sparse::SparseMatrix;
use crate::atom::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Top = 0,
    Intermediate = 1,
    Bottom = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Top, Level::Intermediate, Level::Bottom];

    fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    n_max: usize,
}

impl TruncatedSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter {
                field: "n_max",
                value: n_max as f64,
                reason: "must be >= 1",
            });
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Fock states per mode.
    pub fn levels_per_mode(&self) -> usize {
        self.n_max + 1
    }

    pub fn field_dim(&self) -> usize {
        self.levels_per_mode() * self.levels_per_mode()
    }

    pub fn dim(&self) -> usize {
        3 * self.field_dim()
    }

    pub fn index(&self, level: Level, n_a: usize, n_b: usize) -> usize {
        assert!(n_a <= self.n_max && n_b <= self.n_max, "photon number above cutoff");
        level as usize * self.field_dim() + n_a * self.levels_per_mode() + n_b
    }

    pub fn decompose(&self, i: usize) -> (Level, usize, usize) {
        let m = self.levels_per_mode();
        let f = i % self.field_dim();
        (Level::from_index(i / self.field_dim()), f / m, f % m)
    }

    /// n_A - n_B - [level = intermediate]; conserved by the Hamiltonian, and
    /// differences of it are conserved by the damping.
    pub fn charge(&self, i: usize) -> i64 {
        let (level, na, nb) = self.decompose(i);
        na as i64 - nb as i64 - i64::from(level == Level::Intermediate)
    }

    /// True for basis states with either mode at the cutoff.
    pub fn is_edge(&self, i: usize) -> bool {
        let (_, na, nb) = self.decompose(i);
        na == self.n_max || nb == self.n_max
    }

    pub fn operators(&self) -> Operators {
        let one = C64::new(1.0, 0.0);
        let dim = self.dim();
        let basis = || (0..dim).map(|i| (i, self.decompose(i)));
        let a = SparseMatrix::from_triplets(
            dim,
            basis()
                .filter(|&(_, (_, na, _))| na > 0)
                .map(|(i, (l, na, nb))| (self.index(l, na - 1, nb), i, C64::new((na as f64).sqrt(), 0.0))),
        );
        let b = SparseMatrix::from_triplets(
            dim,
            basis()
                .filter(|&(_, (_, _, nb))| nb > 0)
                .map(|(i, (l, na, nb))| (self.index(l, na, nb - 1), i, C64::new((nb as f64).sqrt(), 0.0))),
        );
        // |to><from| (x) identity on the field
        let flip = |to: Level, from: Level| {
            SparseMatrix::from_triplets(
                dim,
                basis()
                    .filter(|&(_, (l, _, _))| l == from)
                    .map(|(i, (_, na, nb))| (self.index(to, na, nb), i, one)),
            )
        };
        Operators {
            a,
            b,
            sigma_a: flip(Level::Intermediate, Level::Top),
            sigma_b: flip(Level::Bottom, Level::Intermediate),
            sigma_c: flip(Level::Bottom, Level::Top),
            eta_a: flip(Level::Top, Level::Top),
            eta_b: flip(Level::Intermediate, Level::Intermediate),
            eta_c: flip(Level::Bottom, Level::Bottom),
        }
    }

    /// Copies `rho` from `self` into the larger space `to`, zero elsewhere.
    pub fn embed(&self, rho: &DMatrix<C64>, to: &TruncatedSpace) -> DMatrix<C64> {
        assert!(to.n_max >= self.n_max, "embedding must not shrink the cutoff");
        let map: Vec<usize> = (0..self.dim())
            .map(|i| {
                let (l, na, nb) = self.decompose(i);
                to.index(l, na, nb)
            })
            .collect();
        let mut out = DMatrix::zeros(to.dim(), to.dim());
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                out[(map[i], map[j])] = rho[(i, j)];
            }
        }
        out
    }
}

/// Mode annihilators, atomic lowering operators and level projectors.
/// `sigma_a = |b><a|`, `sigma_b = |c><b|`, `sigma_c = |c><a|` with
/// a, b, c the top, intermediate and bottom levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Operators {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub sigma_a: SparseMatrix,
    pub sigma_b: SparseMatrix,
    pub sigma_c: SparseMatrix,
    pub eta_a: SparseMatrix,
    pub eta_b: SparseMatrix,
    pub eta_c: SparseMatrix,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_and_indexing() {
        let s = TruncatedSpace::new(2).unwrap();
        assert_eq!(s.dim(), 27);
        assert_eq!(s.index(Level::Bottom, 0, 0), 18);
        assert_eq!(s.index(Level::Top, 1, 2), 5);
        for i in 0..s.dim() {
            let (l, na, nb) = s.decompose(i);
            assert_eq!(s.index(l, na, nb), i);
        }
        assert!(TruncatedSpace::new(0).is_err());
    }

    #[test]
    fn ladder_algebra_below_cutoff() {
        let s = TruncatedSpace::new(3).unwrap();
        let ops = s.operators();
        let comm = ops.a.mul(&ops.a.adjoint()).sub(&ops.a.adjoint().mul(&ops.a));
        for i in 0..s.dim() {
            let expect = if s.decompose(i).1 == 3 { -3.0 } else { 1.0 };
            assert!((comm.get(i, i) - C64::new(expect, 0.0)).norm() < 1e-14);
        }
        // a and b commute exactly even when truncated
        assert_eq!(ops.a.mul(&ops.b).sub(&ops.b.mul(&ops.a)).nnz(), 0);
        // sigma_b sigma_a = sigma_c
        assert_eq!(ops.sigma_b.mul(&ops.sigma_a), ops.sigma_c);
        let id = ops.eta_a.add(&ops.eta_b).add(&ops.eta_c);
        assert_eq!(id.nnz(), s.dim());
    }

    #[test]
    fn charge_of_basis_states() {
        let s = TruncatedSpace::new(2).unwrap();
        assert_eq!(s.charge(s.index(Level::Intermediate, 2, 0)), 1);
        assert_eq!(s.charge(s.index(Level::Top, 0, 2)), -2);
        assert!(s.is_edge(s.index(Level::Bottom, 2, 0)));
        assert!(!s.is_edge(s.index(Level::Bottom, 1, 1)));
    }

    #[test]
    fn embedding_preserves_entries() {
        let s = TruncatedSpace::new(1).unwrap();
        let t = TruncatedSpace::new(3).unwrap();
        let rho = DMatrix::from_fn(s.dim(), s.dim(), |i, j| C64::new(i as f64, j as f64));
        let big = s.embed(&rho, &t);
        let i = s.index(Level::Intermediate, 1, 0);
        let j = s.index(Level::Bottom, 0, 1);
        assert_eq!(big[(t.index(Level::Intermediate, 1, 0), t.index(Level::Bottom, 0, 1))], rho[(i, j)]);
        assert_eq!(big.iter().filter(|v| v.norm() > 0.0).count(), rho.iter().filter(|v| v.norm() > 0.0).count());
    }
}
