use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

use super::space::{Level, TruncatedSpace};
use super::sparse::MaxAbs;
use crate::atom::C64;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
/// Truncation leaves small negative eigenvalues.
pub const EIGEN_TOL: f64 = 1e-8;

/// Validated state on a [`TruncatedSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: TruncatedSpace,
    matrix: DMatrix<C64>,
}

pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).max_abs()
}

pub(crate) fn symmetrize(m: &mut DMatrix<C64>) {
    let h = (&*m + m.adjoint()) * C64::new(0.5, 0.0);
    *m = h;
}

fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut h = m.clone();
    symmetrize(&mut h);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

impl DensityMatrix {
    pub fn new(space: TruncatedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, space needs {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                space.dim(),
                space.dim()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { space, matrix })
    }

    /// Skips the eigenvalue check; the caller guarantees the invariants.
    pub(crate) fn from_trusted(space: TruncatedSpace, matrix: DMatrix<C64>) -> Self {
        Self { space, matrix }
    }

    pub fn pure(space: TruncatedSpace, level: Level, n_a: usize, n_b: usize) -> Self {
        let mut m = DMatrix::zeros(space.dim(), space.dim());
        let i = space.index(level, n_a, n_b);
        m[(i, i)] = C64::new(1.0, 0.0);
        Self { space, matrix: m }
    }

    /// Bottom-level atom with both modes in vacuum.
    pub fn ground(space: TruncatedSpace) -> Self {
        Self::pure(space, Level::Bottom, 0, 0)
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues(&self.matrix).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Total population of basis states with either mode at the cutoff.
    pub fn edge_population(&self) -> f64 {
        (0..self.space.dim())
            .filter(|&i| self.space.is_edge(i))
            .map(|i| self.matrix[(i, i)].re)
            .sum()
    }

    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::InvalidState("trace distance across different cutoffs".into()));
        }
        let diff = &self.matrix - &other.matrix;
        Ok(0.5 * eigenvalues(&diff).iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Partial trace over both modes.
    pub fn atomic_reduced(&self) -> Matrix3<C64> {
        let f = self.space.field_dim();
        Matrix3::from_fn(|l1, l2| (0..f).map(|k| self.matrix[(l1 * f + k, l2 * f + k)]).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> TruncatedSpace {
        TruncatedSpace::new(2).unwrap()
    }

    #[test]
    fn ground_is_valid() {
        let g = DensityMatrix::ground(space());
        assert!(DensityMatrix::new(space(), g.matrix().clone()).is_ok());
        assert_eq!(g.edge_population(), 0.0);
        assert_eq!(g.atomic_reduced()[(2, 2)], C64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_invalid_matrices() {
        let s = space();
        let mut m = DensityMatrix::ground(s).matrix().clone();
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(s, m.clone()), Err(Error::InvalidState(_))));
        m[(0, 1)] = C64::new(0.0, 0.0);
        m[(0, 0)] = C64::new(0.5, 0.0);
        assert!(DensityMatrix::new(s, m.clone()).is_err());
        m[(0, 0)] = C64::new(-0.5, 0.0);
        m[(1, 1)] = C64::new(0.5, 0.0);
        let err = DensityMatrix::new(s, m).unwrap_err();
        assert!(err.to_string().contains("negative eigenvalue"));
        assert!(DensityMatrix::new(s, DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let s = space();
        let a = DensityMatrix::ground(s);
        let b = DensityMatrix::pure(s, Level::Top, 1, 0);
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(a.trace_distance(&a).unwrap(), 0.0);
        assert!((b.edge_population()).abs() < 1e-15);
        assert_eq!(DensityMatrix::pure(s, Level::Top, 2, 0).edge_population(), 1.0);
    }
}
