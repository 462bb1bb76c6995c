//! Atomic expectation values under the adiabatically eliminated cavity field.
//!
//! The six expectations obey a homogeneous linear system whose every entry
//! carries the common factor gamma_c / (kappa^2 - 4 epsilon^2). The module
//! stores the generator in a form that is finite at epsilon = 0.

use nalgebra::{Complex, DMatrix, DVector, Matrix5, Vector5};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rk4;

pub type C64 = Complex<f64>;

/// Length of the realified atomic state vector.
pub const ATOM_DIM: usize = 9;

/// Expectation values of the atomic operators.
///
/// `sigma_a = <|b><a|>`, `sigma_b = <|c><b|>`, `sigma_c = <|c><a|>`, and
/// `eta_*` are the populations of the top (a), intermediate (b) and
/// bottom (c) levels.
///
/// Realified layout (stable, used by the generator and by tests):
/// `[Re sa, Im sa, Re sb, Im sb, Re sc, Im sc, eta_a, eta_b, eta_c]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicState {
    pub sigma_a: C64,
    pub sigma_b: C64,
    pub sigma_c: C64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub eta_c: f64,
}

impl AtomicState {
    /// Atom in the bottom level, no coherences.
    pub fn ground() -> Self {
        Self {
            sigma_a: C64::new(0.0, 0.0),
            sigma_b: C64::new(0.0, 0.0),
            sigma_c: C64::new(0.0, 0.0),
            eta_a: 0.0,
            eta_b: 0.0,
            eta_c: 1.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.eta_a + self.eta_b + self.eta_c
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&[
            self.sigma_a.re,
            self.sigma_a.im,
            self.sigma_b.re,
            self.sigma_b.im,
            self.sigma_c.re,
            self.sigma_c.im,
            self.eta_a,
            self.eta_b,
            self.eta_c,
        ])
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        assert_eq!(v.len(), ATOM_DIM, "atomic vector must have 9 components");
        Self {
            sigma_a: C64::new(v[0], v[1]),
            sigma_b: C64::new(v[2], v[3]),
            sigma_c: C64::new(v[4], v[5]),
            eta_a: v[6],
            eta_b: v[7],
            eta_c: v[8],
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.to_vector() - other.to_vector()).amax()
    }
}

/// Real 9x9 generator of the atomic expectations, `d/dt x = G x`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicGenerator {
    pub matrix: DMatrix<f64>,
}

/// Generator with the factor gamma_c / (kappa^2 - 4 eps^2) removed. Finite
/// for every kappa > 0, including epsilon = 0 and epsilon = kappa/2.
fn reduced_generator(kappa: f64, epsilon: f64) -> DMatrix<f64> {
    let k2 = kappa * kappa;
    let ke = kappa * epsilon;
    let mut m = DMatrix::zeros(ATOM_DIM, ATOM_DIM);
    // sigma_a' = -(k^2/2) sigma_a + k eps conj(sigma_b)
    m[(0, 0)] = -k2 / 2.0;
    m[(0, 2)] = ke;
    m[(1, 1)] = -k2 / 2.0;
    m[(1, 3)] = -ke;
    // sigma_b' = -k^2 sigma_b
    m[(2, 2)] = -k2;
    m[(3, 3)] = -k2;
    // sigma_c' = -(k^2/2) sigma_c - k eps (eta_b - eta_c)
    m[(4, 4)] = -k2 / 2.0;
    m[(4, 7)] = -ke;
    m[(4, 8)] = ke;
    m[(5, 5)] = -k2 / 2.0;
    // eta_a' = k eps (sigma_c + sigma_c^*) - k^2 eta_a
    m[(6, 4)] = 2.0 * ke;
    m[(6, 6)] = -k2;
    // eta_b' = -k eps (sigma_c + sigma_c^*) - k^2 (eta_b - eta_a)
    m[(7, 4)] = -2.0 * ke;
    m[(7, 6)] = k2;
    m[(7, 7)] = -k2;
    // eta_c' = k^2 eta_b
    m[(8, 7)] = k2;
    m
}

pub fn atomic_generator(params: &SystemParams) -> Result<AtomicGenerator> {
    params.require_dynamics()?;
    let scale = params.gamma_c() / params.detuning_denominator();
    Ok(AtomicGenerator {
        matrix: reduced_generator(params.kappa(), params.epsilon()) * scale,
    })
}

/// Default RK4 step, 0.01 / max(kappa, gamma_c).
pub fn default_dt(params: &SystemParams) -> f64 {
    0.01 / params.kappa().max(params.gamma_c())
}

/// Default horizon for "converged" queries: 200 over the slowest nonzero
/// relaxation rate of the atomic generator. Infinite when gamma_c = 0.
pub fn default_horizon(params: &SystemParams) -> Result<f64> {
    let gen = atomic_generator(params)?;
    let scale = gen.matrix.amax();
    let slowest = gen
        .matrix
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re.abs())
        .filter(|r| *r > 1e-12 * scale.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    if slowest.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(200.0 / slowest)
}

pub fn integrate_atomic(
    state0: &AtomicState,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
) -> Result<AtomicState> {
    integrate_inner(state0, params, t_final, dt, false)
}

/// As [`integrate_atomic`] but without the step-size guard.
pub fn integrate_atomic_unchecked(
    state0: &AtomicState,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
) -> Result<AtomicState> {
    integrate_inner(state0, params, t_final, dt, true)
}

fn integrate_inner(
    state0: &AtomicState,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
    unchecked: bool,
) -> Result<AtomicState> {
    let gen = atomic_generator(params)?;
    let zero = DVector::zeros(ATOM_DIM);
    let x = rk4::integrate_affine(&gen.matrix, &zero, state0.to_vector(), t_final, dt, unchecked)?;
    Ok(AtomicState::from_vector(&x))
}

/// Closed-form steady state: sigma_a = sigma_b = eta_b = 0,
/// eta_a = 4 eps^2 / (k^2 + 4 eps^2), eta_c = k^2 / (k^2 + 4 eps^2),
/// sigma_c = 2 eps k / (k^2 + 4 eps^2).
pub fn atomic_steady_closed(params: &SystemParams) -> Result<AtomicState> {
    params.require_closed_form()?;
    let k = params.kappa();
    let e = params.epsilon();
    let den = k * k + 4.0 * e * e;
    let eta_a = 4.0 * e * e / den;
    // 1 - eta_a rather than k^2/den: with eta_a <= 1/2 the populations then
    // sum to exactly 1 in floating point
    Ok(AtomicState {
        sigma_a: C64::new(0.0, 0.0),
        sigma_b: C64::new(0.0, 0.0),
        sigma_c: C64::new(2.0 * e * k / den, 0.0),
        eta_a,
        eta_b: 0.0,
        eta_c: 1.0 - eta_a,
    })
}

/// Fixed point of the (sigma_c, eta) block with eta_a + eta_b + eta_c = 1,
/// solved by LU. sigma_a and sigma_b decouple and relax to zero.
pub fn atomic_steady_nullspace(params: &SystemParams) -> Result<AtomicState> {
    params.require_closed_form()?;
    let full = reduced_generator(params.kappa(), params.epsilon());
    // rows/cols 4..9 hold (Re sc, Im sc, eta_a, eta_b, eta_c)
    let mut block = Matrix5::from_fn(|i, j| full[(4 + i, 4 + j)]);
    // the eta rows sum to zero, so the eta_c equation is redundant
    block.set_row(4, &nalgebra::RowVector5::new(0.0, 0.0, 1.0, 1.0, 1.0));
    let rhs = Vector5::new(0.0, 0.0, 0.0, 0.0, 1.0);
    let x = block
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular("atomic steady-state block"))?;
    Ok(AtomicState {
        sigma_a: C64::new(0.0, 0.0),
        sigma_b: C64::new(0.0, 0.0),
        sigma_c: C64::new(x[0], x[1]),
        eta_a: x[2],
        eta_b: x[3],
        eta_c: x[4],
    })
}

/// Steady state of the atom. Solved as a linear fixed point, checked against
/// the closed forms to 1e-10, and reported as the closed forms.
pub fn atomic_steady_state(params: &SystemParams) -> Result<AtomicState> {
    let closed = atomic_steady_closed(params)?;
    let solved = atomic_steady_nullspace(params)?;
    let diff = closed.max_abs_diff(&solved);
    if diff > 1e-10 {
        return Err(Error::CrossCheck {
            what: "atomic steady state (null space vs closed form)",
            diff,
        });
    }
    Ok(closed)
}
