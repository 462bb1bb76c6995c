//! Quadrature variances of the two-mode field c = a + b in the arbitrary and
//! normal operator orderings, the squeezing measure, and the critical
//! coupling at which the normally ordered plus variance vanishes.

use crate::atom::{atomic_steady_state, AtomicState};
use crate::error::{Error, Result};
use crate::moments::{c2_moment, steady_moments_closed, FieldMoments};
use crate::params::SystemParams;

/// Arbitrary-order variances from a steady moment set with vanishing first
/// moments. Returns `(plus, minus)`.
pub fn variance_arbitrary(m: &FieldMoments) -> (f64, f64) {
    let number = m.n_a + m.n_b + m.anti_a + m.anti_b + 2.0 * (m.adb + m.bad).re;
    let pair = 2.0 * (m.ab + m.ba + m.a2 + m.b2).re;
    (number + pair, number - pair)
}

/// `(<:c^+ c:>, <:c c^+:>)` for the given atomic state.
pub fn normal_moments(params: &SystemParams, atom: &AtomicState) -> Result<(f64, f64)> {
    params.require_dynamics()?;
    let k = params.kappa();
    let c2 = c2_moment(params, atom)?;
    let ncc = -(params.epsilon() / k) * 2.0 * c2;
    let ncc_anti =
        ncc - k * params.gamma_c() * (atom.eta_a - atom.eta_c) / params.detuning_denominator();
    Ok((ncc, ncc_anti))
}

/// Normally ordered `(plus, minus)` assembled from the moment pieces.
/// Cross-validation path only; strict regime.
pub fn variance_normal_assembled(params: &SystemParams, atom: &AtomicState) -> Result<(f64, f64)> {
    let (ncc, anti) = normal_moments(params, atom)?;
    let c2 = c2_moment(params, atom)?;
    Ok((ncc + anti + 2.0 * c2, ncc + anti - 2.0 * c2))
}

/// Closed-form normally ordered plus variance; finite up to and including
/// epsilon = kappa/2.
pub fn variance_plus_closed(params: &SystemParams) -> Result<f64> {
    params.require_closed_form()?;
    let k = params.kappa();
    let e = params.epsilon();
    let gc = params.gamma_c();
    // grouped so that epsilon = 0 returns gamma_c/kappa exactly
    let shape = (k * k / (k * k + 4.0 * e * e)) * ((k + 4.0 * e) / (k + 2.0 * e));
    Ok(gc / k * shape - 4.0 * e / (k + 2.0 * e))
}

/// Closed-form normally ordered minus variance; strict regime.
pub fn variance_minus_closed(params: &SystemParams) -> Result<f64> {
    params.require_closed_form()?;
    if !params.dynamics_valid() {
        return Err(Error::Domain(
            "minus variance diverges at epsilon = kappa/2".into(),
        ));
    }
    let k = params.kappa();
    let e = params.epsilon();
    let gc = params.gamma_c();
    let shape = (k * k / (k * k + 4.0 * e * e)) * ((k - 4.0 * e) / (k - 2.0 * e));
    Ok(gc / k * shape + 4.0 * e / (k - 2.0 * e))
}

/// `(plus, minus)` in closed form. `minus` carries its own domain error so
/// that the plus variance stays available at threshold.
pub fn variance_normal_closed(params: &SystemParams) -> Result<(f64, Result<f64>)> {
    Ok((variance_plus_closed(params)?, variance_minus_closed(params)))
}

/// Normally ordered two-mode vacuum level gamma_c / kappa.
pub fn vacuum_normal(params: &SystemParams) -> f64 {
    params.gamma_c() / params.kappa()
}

/// Fractional reduction of the plus variance below `vacuum_normal`.
pub fn squeezing_normal(params: &SystemParams) -> Result<f64> {
    let plus = variance_plus_closed(params)?;
    let gc = params.gamma_c();
    if gc == 0.0 {
        return Err(Error::Domain(
            "squeezing undefined at gamma_c = 0: the vacuum reference level is 0".into(),
        ));
    }
    Ok(1.0 - plus / vacuum_normal(params))
}

/// gamma_c at which the normally ordered plus variance vanishes.
pub fn critical_gamma_c(kappa: f64, epsilon: f64) -> Result<f64> {
    let params = SystemParams::new(kappa, epsilon, 0.0)?;
    params.require_closed_form()?;
    if epsilon == 0.0 {
        return Err(Error::DegenerateCritical);
    }
    let (k, e) = (kappa, epsilon);
    Ok(4.0 * e * (k * k + 4.0 * e * e) / (k * (k + 4.0 * e)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    pub params: SystemParams,
    /// Arbitrary-order variances; `None` at epsilon = kappa/2 where the
    /// moment system has no steady state.
    pub var_plus_arbitrary: Option<f64>,
    pub var_minus_arbitrary: Option<f64>,
    pub var_plus_normal: f64,
    pub var_minus_normal: Option<f64>,
    pub vacuum_normal: f64,
    /// `None` at gamma_c = 0.
    pub squeezing: Option<f64>,
}

impl QuadratureReport {
    pub fn compute(params: &SystemParams) -> Result<Self> {
        let var_plus_normal = variance_plus_closed(params)?;
        let (var_plus_arbitrary, var_minus_arbitrary) = if params.dynamics_valid() {
            let atom = atomic_steady_state(params)?;
            let m = steady_moments_closed(params, &atom)?;
            let (p, q) = variance_arbitrary(&m);
            (Some(p), Some(q))
        } else {
            (None, None)
        };
        Ok(Self {
            params: *params,
            var_plus_arbitrary,
            var_minus_arbitrary,
            var_plus_normal,
            var_minus_normal: variance_minus_closed(params).ok(),
            vacuum_normal: vacuum_normal(params),
            squeezing: squeezing_normal(params).ok(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(k: f64, e: f64, gc: f64) -> SystemParams {
        SystemParams::from_gamma_c(k, e, gc).unwrap()
    }

    fn steady(params: &SystemParams) -> AtomicState {
        atomic_steady_state(params).unwrap()
    }

    #[test]
    fn arbitrary_vacuum_is_two() {
        assert_eq!(variance_arbitrary(&FieldMoments::vacuum()), (2.0, 2.0));
    }

    #[test]
    fn arbitrary_uncoupled_oscillator() {
        let params = p(0.8, 0.2, 0.0);
        let m = steady_moments_closed(&params, &AtomicState::ground()).unwrap();
        let (plus, minus) = variance_arbitrary(&m);
        assert_relative_eq!(plus, 4.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(minus, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn arbitrary_uncoupled_floor_is_half_vacuum() {
        let params = p(0.8, 0.4 * (1.0 - 1e-7), 0.0);
        let m = steady_moments_closed(&params, &AtomicState::ground()).unwrap();
        assert!((variance_arbitrary(&m).0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn normal_moment_examples() {
        let (ncc, anti) = normal_moments(&p(0.8, 0.3, 1.0), &steady(&p(0.8, 0.3, 1.0))).unwrap();
        assert_relative_eq!(ncc, 27.0 / 35.0, epsilon = 1e-12);
        assert_relative_eq!(anti, 27.0 / 35.0 + 0.8, epsilon = 1e-12);

        let (ncc, anti) = normal_moments(&p(0.8, 0.2, 0.0), &AtomicState::ground()).unwrap();
        assert_relative_eq!(ncc, 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(anti, 1.0 / 3.0, epsilon = 1e-14);

        let params = p(0.8, 0.0, 1.3);
        let (ncc, anti) = normal_moments(&params, &steady(&params)).unwrap();
        assert_eq!(ncc, 0.0);
        assert_relative_eq!(anti, 1.3 / 0.8, epsilon = 1e-14);
    }

    #[test]
    fn assembled_examples() {
        let params = p(0.8, 0.3, 1.0);
        let (plus, minus) = variance_normal_assembled(&params, &steady(&params)).unwrap();
        assert_relative_eq!(plus, 2.0 / 7.0, epsilon = 1e-12);
        assert_relative_eq!(minus, 4.4, epsilon = 1e-12);

        let (plus, minus) = variance_normal_assembled(&p(0.8, 0.2, 0.0), &AtomicState::ground()).unwrap();
        assert_relative_eq!(plus, -2.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(minus, 2.0, epsilon = 1e-14);

        let params = p(0.8, 0.0, 0.7);
        let (plus, minus) = variance_normal_assembled(&params, &steady(&params)).unwrap();
        assert_relative_eq!(plus, 0.875, epsilon = 1e-14);
        assert_relative_eq!(minus, 0.875, epsilon = 1e-14);
    }

    #[test]
    fn assembled_rejects_threshold() {
        let params = p(0.8, 0.4, 1.0);
        let err = variance_normal_assembled(&params, &AtomicState::ground()).unwrap_err();
        assert!(matches!(err, Error::Regime { .. }));
    }

    #[test]
    fn closed_examples() {
        let (plus, minus) = variance_normal_closed(&p(0.8, 0.4, 16.0 / 15.0)).unwrap();
        assert!(plus.abs() < 1e-14);
        assert!(matches!(minus, Err(Error::Domain(_))));

        let (plus, minus) = variance_normal_closed(&p(0.8, 0.3, 1.0)).unwrap();
        assert_relative_eq!(plus, 2.0 / 7.0, epsilon = 1e-14);
        assert_relative_eq!(minus.unwrap(), 4.4, epsilon = 1e-13);

        let (plus, minus) = variance_normal_closed(&p(0.8, 0.0, 0.6)).unwrap();
        assert_relative_eq!(plus, 0.75, epsilon = 1e-15);
        assert_relative_eq!(minus.unwrap(), 0.75, epsilon = 1e-15);

        assert!(matches!(
            variance_normal_closed(&p(0.8, 0.41, 1.0)),
            Err(Error::Regime { .. })
        ));
    }

    #[test]
    fn squeezing_examples() {
        assert!((squeezing_normal(&p(0.8, 0.4, 16.0 / 15.0)).unwrap() - 1.0).abs() < 1e-14);
        let s = squeezing_normal(&p(0.8, 0.4, 1.25)).unwrap();
        assert!((s - 0.89).abs() < 5e-4, "{s}");
        assert!(squeezing_normal(&p(0.8, 0.0, 1.0)).unwrap().abs() < 1e-15);
        assert!(matches!(squeezing_normal(&p(0.8, 0.2, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_examples() {
        assert_relative_eq!(critical_gamma_c(0.8, 0.4).unwrap(), 16.0 / 15.0, epsilon = 1e-14);
        assert_relative_eq!(critical_gamma_c(0.8, 0.2).unwrap(), 0.5, epsilon = 1e-14);
        assert_eq!(critical_gamma_c(0.8, 0.0), Err(Error::DegenerateCritical));
        assert!(matches!(critical_gamma_c(0.8, 0.5), Err(Error::Regime { .. })));
        assert!(critical_gamma_c(0.8, 1e-6).unwrap() < 1e-5);
    }

    #[test]
    fn figure_curve_stays_below_vacuum() {
        let gc = 16.0 / 15.0;
        for i in 1..=400 {
            let params = p(0.8, 0.4 * i as f64 / 400.0, gc);
            let plus = variance_plus_closed(&params).unwrap();
            assert!(plus < vacuum_normal(&params));
        }
        assert!(variance_plus_closed(&p(0.8, 0.4, gc)).unwrap().abs() < 1e-14);
    }

    #[test]
    fn report_fields() {
        let r = QuadratureReport::compute(&p(0.8, 0.4, 16.0 / 15.0)).unwrap();
        assert_eq!(r.var_plus_arbitrary, None);
        assert_eq!(r.var_minus_normal, None);
        assert!((r.squeezing.unwrap() - 1.0).abs() < 1e-14);
        let r = QuadratureReport::compute(&p(0.8, 0.2, 0.0)).unwrap();
        assert_eq!(r.squeezing, None);
        assert_relative_eq!(r.var_plus_arbitrary.unwrap(), 4.0 / 3.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn assembled_equals_closed(k in 0.05f64..5.0, frac in 0.0f64..0.499, gc in 0.0f64..5.0) {
            let params = p(k, frac * k, gc);
            let (ap, am) = variance_normal_assembled(&params, &steady(&params)).unwrap();
            let (cp, cm) = variance_normal_closed(&params).unwrap();
            let scale = 1.0 + gc / k + 1.0 / (1.0 - 2.0 * frac);
            prop_assert!((ap - cp).abs() < 1e-10 * scale, "{ap} {cp}");
            prop_assert!((am - cm.unwrap()).abs() < 1e-10 * scale * scale, "{am}");
        }

        #[test]
        fn critical_is_root(k in 0.05f64..5.0, frac in 1e-3f64..=0.5) {
            let e = frac * k;
            let gc = critical_gamma_c(k, e).unwrap();
            let plus = variance_plus_closed(&p(k, e, gc)).unwrap();
            prop_assert!(plus.abs() < 1e-12, "{plus}");
        }

        #[test]
        fn squeezing_matches_vacuum_ratio(k in 0.05f64..5.0, frac in 0.0f64..=0.5, gc in 1e-3f64..5.0) {
            let params = p(k, frac * k, gc);
            let r = QuadratureReport::compute(&params).unwrap();
            let s = r.squeezing.unwrap();
            prop_assert!((s - (1.0 - r.var_plus_normal / r.vacuum_normal)).abs() < 1e-12);
            prop_assert_eq!(r.var_plus_normal <= r.vacuum_normal, s >= 0.0);
        }
    }
}
