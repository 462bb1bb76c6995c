//! Classical fixed-step RK4 for autonomous affine systems x' = M x + c.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Infinity norm of `m`, an upper bound on its spectral radius.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest dt accepted by [`integrate_affine`] for generator `m`.
pub fn stable_dt_limit(m: &DMatrix<f64>) -> f64 {
    let n = inf_norm(m);
    if n == 0.0 {
        f64::INFINITY
    } else {
        2.0 / n
    }
}

/// Number of equal steps used to cover `t_final` with steps no longer than
/// `dt`. The actual step is `t_final / n` so that the end point is hit exactly.
pub fn step_count(t_final: f64, dt: f64) -> usize {
    if t_final == 0.0 {
        0
    } else {
        (t_final / dt).ceil().max(1.0) as usize
    }
}

fn check_times(t_final: f64, dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            field: "dt",
            value: dt,
            reason: "must be finite and > 0",
        });
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "t_final",
            value: t_final,
            reason: "must be finite and >= 0",
        });
    }
    Ok(())
}

/// Integrates x' = M x + c from `x0` over `[0, t_final]`.
///
/// Fails with [`Error::StepSize`] when `dt * |M|_inf >= 2` unless `unchecked`.
pub fn integrate_affine(
    m: &DMatrix<f64>,
    c: &DVector<f64>,
    x0: DVector<f64>,
    t_final: f64,
    dt: f64,
    unchecked: bool,
) -> Result<DVector<f64>> {
    check_times(t_final, dt)?;
    let limit = stable_dt_limit(m);
    if !unchecked && dt >= limit {
        return Err(Error::StepSize { dt, limit });
    }
    let n = step_count(t_final, dt);
    if n == 0 {
        return Ok(x0);
    }
    let h = t_final / n as f64;
    let f = |x: &DVector<f64>| m * x + c;
    let mut x = x0;
    for _ in 0..n {
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (h / 2.0)));
        let k3 = f(&(&x + &k2 * (h / 2.0)));
        let k4 = f(&(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Unstable("non-finite state".into()));
    }
    Ok(x)
}
