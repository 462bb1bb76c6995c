//! Expectation values and the exact Ehrenfest relations.
//!
//! Products of ladder operators are evaluated after embedding the state into
//! a space with two extra quanta per mode. For a state supported below the
//! original cutoff this reproduces the untruncated operators exactly.

use nalgebra::DMatrix;

use super::density::DensityMatrix;
use super::liouvillian::build_liouvillian;
use super::space::TruncatedSpace;
use super::sparse::SparseMatrix;
use crate::atom::{AtomicState, C64};
use crate::error::{Error, Result};
use crate::moments::FieldMoments;
use crate::params::SystemParams;

const PAD: usize = 2;

/// States with more edge population than this are flagged.
pub const EDGE_LIMIT: f64 = 1e-8;

fn padded(space: &TruncatedSpace) -> TruncatedSpace {
    TruncatedSpace::new(space.n_max() + PAD).expect("padding keeps n_max >= 1")
}

/// All ten field moments and six atomic expectations of `rho`.
pub fn extract_moments(rho: &DensityMatrix) -> (FieldMoments, AtomicState) {
    let big = padded(&rho.space());
    let r = rho.space().embed(rho.matrix(), &big);
    let o = big.operators();
    let ad = o.a.adjoint();
    let bd = o.b.adjoint();
    let ex = |x: &SparseMatrix| x.expect(&r);
    let field = FieldMoments {
        n_a: ex(&ad.mul(&o.a)).re,
        anti_a: ex(&o.a.mul(&ad)).re,
        n_b: ex(&bd.mul(&o.b)).re,
        anti_b: ex(&o.b.mul(&bd)).re,
        ab: ex(&o.a.mul(&o.b)),
        ba: ex(&o.b.mul(&o.a)),
        a2: ex(&o.a.mul(&o.a)),
        b2: ex(&o.b.mul(&o.b)),
        adb: ex(&ad.mul(&o.b)),
        bad: ex(&o.b.mul(&ad)),
    };
    let atom = AtomicState {
        sigma_a: ex(&o.sigma_a),
        sigma_b: ex(&o.sigma_b),
        sigma_c: ex(&o.sigma_c),
        eta_a: ex(&o.eta_a).re,
        eta_b: ex(&o.eta_b).re,
        eta_c: ex(&o.eta_c).re,
    };
    (field, atom)
}

pub const EHRENFEST_LABELS: [&str; 18] = [
    "a", "b", "a+a", "aa+", "b+b", "bb+", "ab", "ba", "a2", "b2", "a+b", "ba+", "sigma_a", "sigma_b",
    "sigma_c", "eta_a", "eta_b", "eta_c",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EhrenfestReport {
    /// |d<X>/dt - RHS| in [`EHRENFEST_LABELS`] order, evaluated with the
    /// padded operators.
    pub residuals: [f64; 18],
    /// The same residuals using the operators truncated at the state's own
    /// cutoff; they measure truncation error, not the identities.
    pub native_residuals: [f64; 18],
    pub edge_population: f64,
    pub cutoff_limited: bool,
}

impl EhrenfestReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn worst(&self) -> (&'static str, f64) {
        let (i, v) = self
            .residuals
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (EHRENFEST_LABELS[i], v)
    }
}

/// Residuals of the exact first-moment, second-moment and atomic equations
/// on `rho`, whose Liouvillian is built on `space`.
fn residuals_on(params: &SystemParams, space: &TruncatedSpace, r: &DMatrix<C64>) -> [f64; 18] {
    let l = build_liouvillian(params, space);
    let dr = l.apply(r);
    let o = l.operators();
    let (k, e, g) = (params.kappa(), params.epsilon(), params.g());
    let (a, b) = (&o.a, &o.b);
    let ad = a.adjoint();
    let bd = b.adjoint();
    let (sa, sb, sc) = (&o.sigma_a, &o.sigma_b, &o.sigma_c);
    let sad = sa.adjoint();
    let sbd = sb.adjoint();
    let ex = |x: &SparseMatrix| x.expect(r);
    let rate = |x: &SparseMatrix| x.expect(&dr);
    let c = |v: f64| C64::new(v, 0.0);

    let a_b = a.mul(b);
    let b_a = b.mul(a);
    let ad_bd = ad.mul(&bd);
    let bd_ad = bd.mul(&ad);
    let na = ad.mul(a);
    let nb = bd.mul(b);
    let emit_a = sad.mul(a).add(&ad.mul(sa));
    let emit_b = sbd.mul(b).add(&bd.mul(sb));

    let eqs: [(SparseMatrix, C64); 18] = [
        (a.clone(), -c(k / 2.0) * ex(a) - c(e) * ex(&bd) - c(g) * ex(sa)),
        (b.clone(), -c(k / 2.0) * ex(b) - c(e) * ex(&ad) - c(g) * ex(sb)),
        (na.clone(), -c(k) * ex(&na) - c(e) * ex(&b_a.add(&ad_bd)) - c(g) * ex(&emit_a)),
        (
            a.mul(&ad),
            -c(k) * ex(&a.mul(&ad)) - c(e) * ex(&a_b.add(&bd_ad)) - c(g) * ex(&a.mul(&sad).add(&sa.mul(&ad))) + c(k),
        ),
        (nb.clone(), -c(k) * ex(&nb) - c(e) * ex(&a_b.add(&bd_ad)) - c(g) * ex(&emit_b)),
        (
            b.mul(&bd),
            -c(k) * ex(&b.mul(&bd)) - c(e) * ex(&b_a.add(&ad_bd)) - c(g) * ex(&b.mul(&sbd).add(&sb.mul(&bd))) + c(k),
        ),
        (
            a_b.clone(),
            -c(k) * ex(&a_b) - c(e) * ex(&na.add(&nb)) - c(g) * ex(&sa.mul(b).add(&a.mul(sb))) - c(e),
        ),
        (
            b_a.clone(),
            -c(k) * ex(&b_a) - c(e) * ex(&na.add(&nb)) - c(g) * ex(&b.mul(sa).add(&sb.mul(a))) - c(e),
        ),
        (
            a.mul(a),
            -c(k) * ex(&a.mul(a)) - c(e) * ex(&a.mul(&bd).add(&bd.mul(a))) - c(g) * ex(&a.mul(sa).add(&sa.mul(a))),
        ),
        (
            b.mul(b),
            -c(k) * ex(&b.mul(b)) - c(e) * ex(&b.mul(&ad).add(&ad.mul(b))) - c(g) * ex(&b.mul(sb).add(&sb.mul(b))),
        ),
        (
            ad.mul(b),
            -c(k) * ex(&ad.mul(b)) - c(e) * ex(&ad.mul(&ad).add(&b.mul(b))) - c(g) * ex(&sad.mul(b).add(&ad.mul(sb))),
        ),
        (
            b.mul(&ad),
            -c(k) * ex(&b.mul(&ad)) - c(e) * ex(&ad.mul(&ad).add(&b.mul(b))) - c(g) * ex(&b.mul(&sad).add(&sb.mul(&ad))),
        ),
        (
            sa.clone(),
            c(g) * ex(&o.eta_b.sub(&o.eta_a).mul(a).add(&bd.mul(sc))),
        ),
        (
            sb.clone(),
            c(g) * ex(&o.eta_c.sub(&o.eta_b).mul(b).sub(&ad.mul(sc))),
        ),
        (sc.clone(), c(g) * ex(&sb.mul(a).sub(&sa.mul(b)))),
        (o.eta_a.clone(), c(g) * ex(&emit_a)),
        (o.eta_b.clone(), c(g) * ex(&emit_b.sub(&emit_a))),
        (o.eta_c.clone(), -c(g) * ex(&emit_b)),
    ];
    let mut out = [0.0; 18];
    for (slot, (x, rhs)) in out.iter_mut().zip(eqs.iter()) {
        *slot = (rate(x) - rhs).norm();
    }
    out
}

pub fn ehrenfest_residuals(
    rho: &DensityMatrix,
    params: &SystemParams,
    space: &TruncatedSpace,
) -> Result<EhrenfestReport> {
    if rho.space() != *space {
        return Err(Error::InvalidState("state and space use different cutoffs".into()));
    }
    let big = padded(space);
    let edge = rho.edge_population();
    Ok(EhrenfestReport {
        residuals: residuals_on(params, &big, &space.embed(rho.matrix(), &big)),
        native_residuals: residuals_on(params, space, rho.matrix()),
        edge_population: edge,
        cutoff_limited: edge >= EDGE_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::liouvillian::evolve;
    use crate::fock::space::Level;

    fn p(k: f64, e: f64, gc: f64) -> SystemParams {
        SystemParams::from_gamma_c(k, e, gc).unwrap()
    }

    #[test]
    fn ground_moments() {
        let s = TruncatedSpace::new(2).unwrap();
        let (m, a) = extract_moments(&DensityMatrix::ground(s));
        assert_eq!(m, FieldMoments::vacuum());
        assert_eq!(a, AtomicState::ground());
    }

    #[test]
    fn diagonal_thermal_like_state() {
        // populations (1-x, x) on n = 0, 1 per mode give mean 0.25
        let s = TruncatedSpace::new(3).unwrap();
        let x = 0.25;
        let mut m = DMatrix::zeros(s.dim(), s.dim());
        for (na, pa) in [(0, 1.0 - x), (1, x)] {
            for (nb, pb) in [(0, 1.0 - x), (1, x)] {
                let i = s.index(Level::Bottom, na, nb);
                m[(i, i)] = C64::new(pa * pb, 0.0);
            }
        }
        let (f, _) = extract_moments(&DensityMatrix::new(s, m).unwrap());
        assert!((f.n_a - 0.25).abs() < 1e-15 && (f.n_b - 0.25).abs() < 1e-15);
        assert!((f.anti_a - 1.25).abs() < 1e-15);
    }

    #[test]
    fn identities_hold_on_ground_state() {
        let s = TruncatedSpace::new(2).unwrap();
        let r = ehrenfest_residuals(&DensityMatrix::ground(s), &p(0.8, 0.2, 0.5), &s).unwrap();
        assert!(r.max_residual() < 1e-14, "{:?}", r.residuals);
        assert!(!r.cutoff_limited);
    }

    #[test]
    fn identities_hold_after_evolution() {
        let s = TruncatedSpace::new(3).unwrap();
        let params = p(0.8, 0.2, 0.5);
        let l = build_liouvillian(&params, &s);
        let rho = evolve(&DensityMatrix::ground(s), &l, 1.0, 0.01).unwrap();
        let r = ehrenfest_residuals(&rho, &params, &s).unwrap();
        assert!(r.max_residual() < 1e-12, "{:?}", r.worst());
    }

    #[test]
    fn identities_hold_for_states_at_the_cutoff() {
        // the padded evaluation is exact even with population on the edge
        let s = TruncatedSpace::new(1).unwrap();
        let params = p(0.8, 0.2, 0.5);
        let l = build_liouvillian(&params, &s);
        let rho = evolve(&DensityMatrix::pure(s, Level::Top, 1, 1), &l, 0.5, 0.01).unwrap();
        let r = ehrenfest_residuals(&rho, &params, &s).unwrap();
        assert!(r.cutoff_limited);
        assert!(r.max_residual() < 1e-12);
        assert!(r.native_residuals.iter().copied().fold(0.0, f64::max) > 1e-3);
    }
}
