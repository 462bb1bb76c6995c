//! Stationary states of the composite Liouvillian.
//!
//! Coherences |i><j| with equal charge (see [`TruncatedSpace::charge`]) form
//! an invariant sector containing every trace-carrying state, so the fixed
//! point is solved there by dense LU with one population equation replaced
//! by the trace condition.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::density::{symmetrize, DensityMatrix};
use super::liouvillian::Liouvillian;
use super::space::Level;
use super::sparse::MaxAbs;
use crate::atom::C64;
use crate::error::{Error, Result};

/// Pivots below this fraction of the largest one count as zero.
pub const PIVOT_RATIO: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Solves within the span of |i><j| for `i, j` in `basis` with equal charge.
/// The caller guarantees that the span is invariant under `l`.
fn solve_sector(l: &Liouvillian, basis: &[usize]) -> Result<DMatrix<C64>> {
    let space = l.space();
    let mut pairs = Vec::new();
    for &i in basis {
        for &j in basis {
            if space.charge(i) == space.charge(j) {
                pairs.push((i, j));
            }
        }
    }
    let lookup: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(n, &p)| (p, n)).collect();
    let s = pairs.len();
    let mut m = DMatrix::<C64>::zeros(s, s);
    let mut buf = Vec::new();
    for (col, &(k, q)) in pairs.iter().enumerate() {
        buf.clear();
        l.column(k, q, &mut buf);
        for &(i, j, v) in &buf {
            let row = *lookup
                .get(&(i, j))
                .expect("sector must be invariant under the Liouvillian");
            m[(row, col)] += v;
        }
    }
    let trace_row = lookup[&(basis[0], basis[0])];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        m[(trace_row, col)] = C64::new(if i == j { 1.0 } else { 0.0 }, 0.0);
    }
    let mut rhs = DVector::zeros(s);
    rhs[trace_row] = C64::new(1.0, 0.0);

    let lu = m.lu();
    let pivots: Vec<f64> = lu.u().diagonal().iter().map(|z| z.norm()).collect();
    let largest = pivots.iter().copied().fold(0.0, f64::max);
    let tiny = pivots.iter().filter(|&&p| p <= PIVOT_RATIO * largest).count();
    if tiny > 0 {
        return Err(Error::NotUnique { near_zero_pivots: tiny });
    }
    let x = lu.solve(&rhs).ok_or(Error::Singular("steady-state sector"))?;
    let mut rho = DMatrix::zeros(space.dim(), space.dim());
    for (n, &(i, j)) in pairs.iter().enumerate() {
        rho[(i, j)] = x[n];
    }
    symmetrize(&mut rho);
    let tr = rho.trace();
    Ok(rho / tr)
}

fn finish(l: &Liouvillian, rho: DMatrix<C64>) -> Result<DensityMatrix> {
    let residual = l.apply(&rho).max_abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::CrossCheck {
            what: "steady-state residual",
            diff: residual,
        });
    }
    DensityMatrix::new(*l.space(), rho)
}

/// The unique stationary state. With `g = 0` every atomic state is
/// stationary and [`Error::NotUnique`] is returned; use
/// [`steady_state_from`] there.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let all: Vec<usize> = (0..l.space().dim()).collect();
    let rho = solve_sector(l, &all)?;
    finish(l, rho)
}

/// The long-time limit reached from `rho0`. Differs from [`steady_state`]
/// only at `g = 0`, where the atomic reduced state of `rho0` is conserved and
/// the field relaxes independently of it.
pub fn steady_state_from(l: &Liouvillian, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if l.params().g() != 0.0 {
        return steady_state(l);
    }
    if rho0.space() != *l.space() {
        return Err(Error::InvalidState("state and Liouvillian use different cutoffs".into()));
    }
    let space = *l.space();
    // without coupling the bottom-level block evolves on its own
    let bottom: Vec<usize> = (0..space.dim())
        .filter(|&i| space.decompose(i).0 == Level::Bottom)
        .collect();
    let block = solve_sector(l, &bottom)?;
    let f = space.field_dim();
    let off = Level::Bottom as usize * f;
    let atom = rho0.atomic_reduced();
    let rho = DMatrix::from_fn(space.dim(), space.dim(), |i, j| {
        atom[(i / f, j / f)] * block[(off + i % f, off + j % f)]
    });
    finish(l, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::liouvillian::build_liouvillian;
    use crate::fock::space::TruncatedSpace;
    use crate::params::SystemParams;

    fn p(k: f64, e: f64, gc: f64) -> SystemParams {
        SystemParams::from_gamma_c(k, e, gc).unwrap()
    }

    #[test]
    fn undriven_uncoupled_is_degenerate() {
        let s = TruncatedSpace::new(2).unwrap();
        let l = build_liouvillian(&p(0.8, 0.0, 0.0), &s);
        assert!(matches!(steady_state(&l), Err(Error::NotUnique { .. })));
        let rho = steady_state_from(&l, &DensityMatrix::ground(s)).unwrap();
        assert!((rho.matrix() - DensityMatrix::ground(s).matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn uncoupled_keeps_atomic_populations() {
        let s = TruncatedSpace::new(3).unwrap();
        let l = build_liouvillian(&p(0.8, 0.1, 0.0), &s);
        let start = DensityMatrix::pure(s, Level::Top, 0, 0);
        let rho = steady_state_from(&l, &start).unwrap();
        assert!((rho.atomic_reduced()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupled_undriven_relaxes_to_ground() {
        let s = TruncatedSpace::new(2).unwrap();
        let l = build_liouvillian(&p(0.8, 0.0, 1.0), &s);
        let rho = steady_state(&l).unwrap();
        assert!(rho.trace_distance(&DensityMatrix::ground(s)).unwrap() < 1e-10);
    }

    #[test]
    fn coupled_driven_is_unique_and_valid() {
        let s = TruncatedSpace::new(3).unwrap();
        let l = build_liouvillian(&p(0.8, 0.2, 0.5), &s);
        let rho = steady_state(&l).unwrap();
        assert!(l.apply(rho.matrix()).max_abs() < 1e-9);
        assert!(rho.min_eigenvalue() > -1e-8);
    }
}
