//! Composite master equation of the cavity modes and the atom:
//! d rho/dt = -i[H, rho] + kappa * sum over m in {A, B} of (m rho m^+ - {m^+ m, rho}/2)
//! with H = i eps (AB - A^+ B^+) + i g (sigma_a^+ A - A^+ sigma_a + sigma_b^+ B - B^+ sigma_b).

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;

use super::density::DensityMatrix;
use super::space::{Operators, TruncatedSpace};
use super::sparse::SparseMatrix;
use crate::atom::C64;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rk4::step_count;

/// Immutable apply-operator form of the Liouvillian.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    params: SystemParams,
    space: TruncatedSpace,
    ops: Operators,
    h: SparseMatrix,
    a_dag: SparseMatrix,
    b_dag: SparseMatrix,
    /// Diagonal of A^+ A + B^+ B.
    n_total: Vec<f64>,
}

pub fn hamiltonian(params: &SystemParams, ops: &Operators) -> SparseMatrix {
    let i = C64::new(0.0, 1.0);
    let ad = ops.a.adjoint();
    let bd = ops.b.adjoint();
    let pump = ops.a.mul(&ops.b).sub(&ad.mul(&bd)).scale(i * params.epsilon());
    let top = ops.sigma_a.adjoint().mul(&ops.a).sub(&ad.mul(&ops.sigma_a));
    let mid = ops.sigma_b.adjoint().mul(&ops.b).sub(&bd.mul(&ops.sigma_b));
    pump.add(&top.add(&mid).scale(i * params.g()))
}

pub fn build_liouvillian(params: &SystemParams, space: &TruncatedSpace) -> Liouvillian {
    let ops = space.operators();
    let h = hamiltonian(params, &ops);
    let a_dag = ops.a.adjoint();
    let b_dag = ops.b.adjoint();
    let n_total = (0..space.dim())
        .map(|i| {
            let (_, na, nb) = space.decompose(i);
            (na + nb) as f64
        })
        .collect();
    Liouvillian {
        params: *params,
        space: *space,
        ops,
        h,
        a_dag,
        b_dag,
        n_total,
    }
}

impl Liouvillian {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn space(&self) -> &TruncatedSpace {
        &self.space
    }

    pub fn operators(&self) -> &Operators {
        &self.ops
    }

    pub fn hamiltonian(&self) -> &SparseMatrix {
        &self.h
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let k = self.params.kappa();
        let minus_i = C64::new(0.0, -1.0);
        let mut out = (self.h.mul_dense(rho) - self.h.dense_mul(rho)) * minus_i;
        for (m, md) in [(&self.ops.a, &self.a_dag), (&self.ops.b, &self.b_dag)] {
            out += md.dense_mul(&m.mul_dense(rho)) * C64::new(k, 0.0);
        }
        for j in 0..rho.ncols() {
            for i in 0..rho.nrows() {
                out[(i, j)] -= rho[(i, j)] * (0.5 * k * (self.n_total[i] + self.n_total[j]));
            }
        }
        out
    }

    /// Nonzero entries of L(|k><l|), appended to `out` as `(i, j, value)`.
    pub(crate) fn column(&self, k: usize, l: usize, out: &mut Vec<(usize, usize, C64)>) {
        let kappa = self.params.kappa();
        let i_unit = C64::new(0.0, 1.0);
        // H hermitian: H_ik = conj(H_ki)
        for &(i, h) in self.h.row(k) {
            out.push((i, l, -i_unit * h.conj()));
        }
        for &(j, h) in self.h.row(l) {
            out.push((k, j, i_unit * h));
        }
        for md in [&self.a_dag, &self.b_dag] {
            // m_ik = conj((m^+)_ki)
            for &(i, x) in md.row(k) {
                for &(j, y) in md.row(l) {
                    out.push((i, j, x.conj() * y * kappa));
                }
            }
        }
        out.push((k, l, C64::new(-0.5 * kappa * (self.n_total[k] + self.n_total[l]), 0.0)));
    }

    /// Largest |Tr L(|k><l|)| over all basis pairs; zero for a
    /// trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let dim = self.space.dim();
        let mut buf = Vec::new();
        let mut worst: f64 = 0.0;
        for k in 0..dim {
            for l in 0..dim {
                buf.clear();
                self.column(k, l, &mut buf);
                let tr: C64 = buf.iter().filter(|(i, j, _)| i == j).map(|e| e.2).sum();
                worst = worst.max(tr.norm());
            }
        }
        worst
    }
}

pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Sparse superoperator on the coherences |i><j| whose charge difference
/// occurs in the initial state; that span is invariant under the dynamics.
struct SectorPropagator {
    pairs: Vec<(usize, usize)>,
    /// Position of the transposed pair, for re-symmetrization.
    partner: Vec<usize>,
    diagonal: Vec<usize>,
    matrix: SparseMatrix,
}

impl SectorPropagator {
    fn new(l: &Liouvillian, rho0: &DMatrix<C64>) -> Self {
        let space = l.space;
        let dim = space.dim();
        let mut deltas = BTreeSet::new();
        for j in 0..dim {
            for i in 0..dim {
                if rho0[(i, j)] != C64::new(0.0, 0.0) {
                    let d = space.charge(i) - space.charge(j);
                    deltas.insert(d);
                    deltas.insert(-d);
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if deltas.contains(&(space.charge(i) - space.charge(j))) {
                    pairs.push((i, j));
                }
            }
        }
        let lookup: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(n, &p)| (p, n)).collect();
        let partner = pairs.iter().map(|&(i, j)| lookup[&(j, i)]).collect();
        let diagonal = pairs.iter().enumerate().filter(|(_, (i, j))| i == j).map(|(n, _)| n).collect();
        let mut entries = Vec::new();
        let mut buf = Vec::new();
        for (col, &(k, q)) in pairs.iter().enumerate() {
            buf.clear();
            l.column(k, q, &mut buf);
            entries.extend(buf.iter().map(|&(i, j, v)| (lookup[&(i, j)], col, v)));
        }
        let matrix = SparseMatrix::from_triplets(pairs.len(), entries);
        Self {
            pairs,
            partner,
            diagonal,
            matrix,
        }
    }

    fn gather(&self, rho: &DMatrix<C64>) -> Vec<C64> {
        self.pairs.iter().map(|&(i, j)| rho[(i, j)]).collect()
    }

    fn scatter(&self, x: &[C64], dim: usize) -> DMatrix<C64> {
        let mut rho = DMatrix::zeros(dim, dim);
        for (&(i, j), &v) in self.pairs.iter().zip(x) {
            rho[(i, j)] = v;
        }
        rho
    }

    fn step(&self, x: &[C64], h: f64) -> Vec<C64> {
        let axpy = |a: &[C64], b: &[C64], s: f64| -> Vec<C64> { a.iter().zip(b).map(|(u, v)| u + v * s).collect() };
        let k1 = self.matrix.mul_vec(x);
        let k2 = self.matrix.mul_vec(&axpy(x, &k1, h / 2.0));
        let k3 = self.matrix.mul_vec(&axpy(x, &k2, h / 2.0));
        let k4 = self.matrix.mul_vec(&axpy(x, &k3, h));
        let next: Vec<C64> = (0..x.len())
            .map(|n| x[n] + (k1[n] + k2[n] * 2.0 + k3[n] * 2.0 + k4[n]) * (h / 6.0))
            .collect();
        // (rho + rho^+)/2
        (0..next.len())
            .map(|n| (next[n] + next[self.partner[n]].conj()) * 0.5)
            .collect()
    }

    fn check(&self, x: &[C64], t: f64) -> Result<()> {
        let tr: C64 = self.diagonal.iter().map(|&n| x[n]).sum();
        let drift = (tr - C64::new(1.0, 0.0)).norm();
        let big = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(drift <= TRACE_DRIFT_LIMIT) || !(big <= 1.0 + TRACE_DRIFT_LIMIT) {
            return Err(Error::Unstable(format!(
                "trace drift {drift:e}, largest entry {big} at t = {t}"
            )));
        }
        Ok(())
    }
}

/// RK4 propagation of `rho0` to each of the ascending `times`, with
/// re-symmetrization after every step.
pub fn evolve_sampled(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    times: &[f64],
    dt: f64,
) -> Result<Vec<DensityMatrix>> {
    if rho0.space() != l.space {
        return Err(Error::InvalidState("state and Liouvillian use different cutoffs".into()));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            field: "dt",
            value: dt,
            reason: "must be finite and > 0",
        });
    }
    let prop = SectorPropagator::new(l, rho0.matrix());
    let mut x = prop.gather(rho0.matrix());
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if !(target.is_finite() && target >= t) {
            return Err(Error::InvalidParameter {
                field: "t_final",
                value: target,
                reason: "sample times must be finite, >= 0 and ascending",
            });
        }
        let n = step_count(target - t, dt);
        let h = if n == 0 { 0.0 } else { (target - t) / n as f64 };
        for s in 0..n {
            x = prop.step(&x, h);
            prop.check(&x, t + (s + 1) as f64 * h)?;
        }
        t = target;
        out.push(DensityMatrix::from_trusted(l.space, prop.scatter(&x, l.space.dim())));
    }
    Ok(out)
}

pub fn evolve(rho0: &DensityMatrix, l: &Liouvillian, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    Ok(evolve_sampled(rho0, l, &[t_final], dt)?.remove(0))
}
