//! Difference between the exact stationary state and the adiabatic
//! (large-time) approximation. Diagnostic only.

use super::density::DensityMatrix;
use super::liouvillian::build_liouvillian;
use super::observables::extract_moments;
use super::space::TruncatedSpace;
use super::steady::steady_state_from;
use crate::atom::{atomic_steady_state, AtomicState};
use crate::error::Result;
use crate::moments::{steady_moments_closed, FieldMoments};
use crate::params::SystemParams;

pub const FIELD_LABELS: [&str; 16] = [
    "n_a", "anti_a", "n_b", "anti_b", "re_ab", "im_ab", "re_ba", "im_ba", "re_a2", "im_a2", "re_b2",
    "im_b2", "re_adb", "im_adb", "re_bad", "im_bad",
];

pub const ATOM_LABELS: [&str; 9] = [
    "re_sigma_a", "im_sigma_a", "re_sigma_b", "im_sigma_b", "re_sigma_c", "im_sigma_c", "eta_a", "eta_b",
    "eta_c",
];

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub params: SystemParams,
    pub n_max: usize,
    pub oracle_field: FieldMoments,
    pub oracle_atom: AtomicState,
    pub approx_field: FieldMoments,
    pub approx_atom: AtomicState,
    pub edge_population: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub name: &'static str,
    pub oracle: f64,
    pub approx: f64,
}

impl GapRow {
    pub fn gap(&self) -> f64 {
        (self.oracle - self.approx).abs()
    }
}

impl GapReport {
    pub fn field_rows(&self) -> Vec<GapRow> {
        let o = self.oracle_field.to_vector();
        let a = self.approx_field.to_vector();
        FIELD_LABELS
            .iter()
            .enumerate()
            .map(|(i, &name)| GapRow { name, oracle: o[i], approx: a[i] })
            .collect()
    }

    pub fn atom_rows(&self) -> Vec<GapRow> {
        let o = self.oracle_atom.to_vector();
        let a = self.approx_atom.to_vector();
        ATOM_LABELS
            .iter()
            .enumerate()
            .map(|(i, &name)| GapRow { name, oracle: o[i], approx: a[i] })
            .collect()
    }

    pub fn max_field_gap(&self) -> f64 {
        self.field_rows().iter().map(GapRow::gap).fold(0.0, f64::max)
    }

    pub fn max_atom_gap(&self) -> f64 {
        self.atom_rows().iter().map(GapRow::gap).fold(0.0, f64::max)
    }
}

/// Oracle stationary moments (reached from vacuum and the bottom level)
/// against the closed-form approximate ones.
pub fn approximation_gap(params: &SystemParams, space: &TruncatedSpace) -> Result<GapReport> {
    params.require_dynamics()?;
    let approx_atom = atomic_steady_state(params)?;
    let approx_field = steady_moments_closed(params, &approx_atom)?;
    let l = build_liouvillian(params, space);
    let rho = steady_state_from(&l, &DensityMatrix::ground(*space))?;
    let (oracle_field, oracle_atom) = extract_moments(&rho);
    Ok(GapReport {
        params: *params,
        n_max: space.n_max(),
        oracle_field,
        oracle_atom,
        approx_field,
        approx_atom,
        edge_population: rho.edge_population(),
    })
}
