//! Second-order moments of the two cavity modes after the atomic operators
//! have been traded for their adiabatic values.
//!
//! The ten moments obey a closed affine system whose source depends linearly
//! on the atomic expectations. Because the system couples moments to complex
//! conjugates of other moments it is real-linear only, so it is realified
//! into 16 components:
//!
//! | index | component |
//! |-------|-----------|
//! | 0..4  | `n_a, anti_a, n_b, anti_b` |
//! | 4, 5  | `Re ab, Im ab` |
//! | 6, 7  | `Re ba, Im ba` |
//! | 8, 9  | `Re a2, Im a2` |
//! | 10, 11| `Re b2, Im b2` |
//! | 12, 13| `Re adb, Im adb` |
//! | 14, 15| `Re bad, Im bad` |

use nalgebra::{DMatrix, DVector};

use crate::atom::{self, AtomicState, ATOM_DIM, C64};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rk4;

pub const FIELD_DIM: usize = 16;

/// `n_a = <a^+ a>`, `anti_a = <a a^+>`, `n_b`, `anti_b` likewise;
/// `ab = <a b>`, `ba = <b a>`, `a2 = <a^2>`, `b2 = <b^2>`,
/// `adb = <a^+ b>`, `bad = <b a^+>`.
///
/// `ab` and `ba` are tracked separately: the approximate equations give them
/// different atomic source terms even though the operators commute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    pub n_a: f64,
    pub anti_a: f64,
    pub n_b: f64,
    pub anti_b: f64,
    pub ab: C64,
    pub ba: C64,
    pub a2: C64,
    pub b2: C64,
    pub adb: C64,
    pub bad: C64,
}

impl FieldMoments {
    /// Two-mode vacuum: every moment zero except `<a a^+> = <b b^+> = 1`.
    pub fn vacuum() -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            n_a: 0.0,
            anti_a: 1.0,
            n_b: 0.0,
            anti_b: 1.0,
            ab: z,
            ba: z,
            a2: z,
            b2: z,
            adb: z,
            bad: z,
        }
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&[
            self.n_a,
            self.anti_a,
            self.n_b,
            self.anti_b,
            self.ab.re,
            self.ab.im,
            self.ba.re,
            self.ba.im,
            self.a2.re,
            self.a2.im,
            self.b2.re,
            self.b2.im,
            self.adb.re,
            self.adb.im,
            self.bad.re,
            self.bad.im,
        ])
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        assert_eq!(v.len(), FIELD_DIM, "field vector must have 16 components");
        Self {
            n_a: v[0],
            anti_a: v[1],
            n_b: v[2],
            anti_b: v[3],
            ab: C64::new(v[4], v[5]),
            ba: C64::new(v[6], v[7]),
            a2: C64::new(v[8], v[9]),
            b2: C64::new(v[10], v[11]),
            adb: C64::new(v[12], v[13]),
            bad: C64::new(v[14], v[15]),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.to_vector() - other.to_vector()).amax()
    }

    pub fn max_imag(&self) -> f64 {
        [self.ab, self.ba, self.a2, self.b2, self.adb, self.bad]
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    /// `(<a a^+> - <a^+ a> - 1, <b b^+> - <b^+ b> - 1)`. Zero for a physical
    /// state; the approximate closed forms leave atomic corrections here.
    pub fn commutator_defect(&self) -> (f64, f64) {
        (self.anti_a - self.n_a - 1.0, self.anti_b - self.n_b - 1.0)
    }
}

/// First moments. They vanish for the vacuum field and bottom-level atom and
/// decay at rate beta/2 otherwise, so no equation is integrated for them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstMoments {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub decay_rate: f64,
}

pub fn first_moments(params: &SystemParams) -> FirstMoments {
    let z = C64::new(0.0, 0.0);
    FirstMoments {
        a: z,
        b: z,
        c: z,
        decay_rate: params.beta() / 2.0,
    }
}

/// `d/dt m = drift * m + source` in the realified layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMomentSystem {
    pub drift: DMatrix<f64>,
    pub source: DVector<f64>,
}

fn drift_matrix(kappa: f64, eps: f64) -> DMatrix<f64> {
    let mut m = DMatrix::from_diagonal_element(FIELD_DIM, FIELD_DIM, -kappa);
    let e = eps;
    // populations couple to the pair coherences
    m[(0, 6)] = -2.0 * e;
    m[(1, 4)] = -2.0 * e;
    m[(2, 4)] = -2.0 * e;
    m[(3, 6)] = -2.0 * e;
    // pair coherences couple to the populations
    for row in [4, 6] {
        m[(row, 0)] = -e;
        m[(row, 2)] = -e;
    }
    // a2' = -k a2 - e (bad^* + adb^*)
    m[(8, 12)] = -e;
    m[(8, 14)] = -e;
    m[(9, 13)] = e;
    m[(9, 15)] = e;
    // b2' = -k b2 - e (bad + adb)
    m[(10, 12)] = -e;
    m[(10, 14)] = -e;
    m[(11, 13)] = -e;
    m[(11, 15)] = -e;
    // adb' and bad' = -k x - e (a2^* + b2)
    for row in [12, 14] {
        m[(row, 8)] = -e;
        m[(row, 10)] = -e;
        m[(row + 1, 9)] = e;
        m[(row + 1, 11)] = -e;
    }
    m
}

/// Constant part of the source and its linear dependence on the atomic
/// vector: `source = constant + coupling * atom`.
fn source_parts(params: &SystemParams) -> (DVector<f64>, DMatrix<f64>) {
    let k = params.kappa();
    let e = params.epsilon();
    let g = params.g();
    let gg = 4.0 * g * g / params.detuning_denominator();

    let mut constant = DVector::zeros(FIELD_DIM);
    constant[1] = k;
    constant[3] = k;
    constant[4] = -e;
    constant[6] = -e;

    // atomic indices: 4 Re sc, 5 Im sc, 6 eta_a, 7 eta_b, 8 eta_c
    let mut s = DMatrix::zeros(FIELD_DIM, ATOM_DIM);
    s[(0, 4)] = -2.0 * e * gg;
    s[(0, 6)] = k * gg;
    s[(1, 7)] = k * gg;
    s[(2, 7)] = k * gg;
    s[(3, 4)] = -2.0 * e * gg;
    s[(3, 8)] = k * gg;
    s[(4, 7)] = -2.0 * e * gg;
    s[(6, 4)] = k * gg;
    s[(6, 6)] = -e * gg;
    s[(6, 8)] = -e * gg;
    s[(7, 5)] = k * gg;
    (constant, s)
}

pub fn field_system(params: &SystemParams, atom: &AtomicState) -> Result<FieldMomentSystem> {
    params.require_dynamics()?;
    let (constant, coupling) = source_parts(params);
    Ok(FieldMomentSystem {
        drift: drift_matrix(params.kappa(), params.epsilon()),
        source: constant + coupling * atom.to_vector(),
    })
}

/// Joint (atom, field) affine system of dimension 9 + 16.
fn joint_system(params: &SystemParams) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let gen = atom::atomic_generator(params)?;
    let (constant, coupling) = source_parts(params);
    let n = ATOM_DIM + FIELD_DIM;
    let mut m = DMatrix::zeros(n, n);
    m.view_mut((0, 0), (ATOM_DIM, ATOM_DIM)).copy_from(&gen.matrix);
    m.view_mut((ATOM_DIM, 0), (FIELD_DIM, ATOM_DIM)).copy_from(&coupling);
    m.view_mut((ATOM_DIM, ATOM_DIM), (FIELD_DIM, FIELD_DIM))
        .copy_from(&drift_matrix(params.kappa(), params.epsilon()));
    let mut c = DVector::zeros(n);
    c.rows_mut(ATOM_DIM, FIELD_DIM).copy_from(&constant);
    Ok((m, c))
}

/// RK4 on the field moments co-integrated with the atomic expectations.
pub fn integrate_moments(
    m0: &FieldMoments,
    atom0: &AtomicState,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
) -> Result<(FieldMoments, AtomicState)> {
    let (m, c) = joint_system(params)?;
    let mut x0 = DVector::zeros(ATOM_DIM + FIELD_DIM);
    x0.rows_mut(0, ATOM_DIM).copy_from(&atom0.to_vector());
    x0.rows_mut(ATOM_DIM, FIELD_DIM).copy_from(&m0.to_vector());
    let x = rk4::integrate_affine(&m, &c, x0, t_final, dt, false)?;
    Ok((
        FieldMoments::from_vector(&x.rows(ATOM_DIM, FIELD_DIM).into_owned()),
        AtomicState::from_vector(&x.rows(0, ATOM_DIM).into_owned()),
    ))
}

/// Steady moments by dense LU on the 16-component fixed-point system.
pub fn steady_moments_solve(params: &SystemParams, atom: &AtomicState) -> Result<FieldMoments> {
    let sys = field_system(params, atom)?;
    let x = sys
        .drift
        .clone()
        .lu()
        .solve(&(-&sys.source))
        .ok_or(Error::Singular("field moment drift"))?;
    let residual = (&sys.drift * &x + &sys.source).amax() / params.kappa();
    if residual > 1e-10 {
        return Err(Error::CrossCheck {
            what: "steady moment residual",
            diff: residual,
        });
    }
    Ok(FieldMoments::from_vector(&x))
}

fn require_nonzero_denominator(params: &SystemParams) -> Result<()> {
    params.require_closed_form()?;
    if !params.dynamics_valid() {
        return Err(Error::Domain(
            "denominator kappa^2 - 4 epsilon^2 vanishes at epsilon = kappa/2".into(),
        ));
    }
    Ok(())
}

/// Closed-form steady moments.
///
/// Populations and anti-normal products come from the fully reduced
/// expressions, in which the intermediate (kappa^2 - 2 epsilon^2) factors have
/// cancelled. The bottom-level coefficient of `<b b^+>` is
/// kappa^4 - 2 eps^2 (kappa^2 + 2 eps^2); it is what the linear system
/// reduces to. `ab` and `ba` then follow from their own fixed-point
/// equations and the remaining four moments vanish.
pub fn steady_moments_closed(params: &SystemParams, atom: &AtomicState) -> Result<FieldMoments> {
    require_nonzero_denominator(params)?;
    let k = params.kappa();
    let e = params.epsilon();
    let g = params.g();
    let k2 = k * k;
    let e2 = e * e;
    let d = params.detuning_denominator();
    let base = 2.0 * e2 / d;
    let pre = 4.0 * g * g / (k2 * d * d);
    let (ea, eb, ec) = (atom.eta_a, atom.eta_b, atom.eta_c);
    let sc_sum = 2.0 * atom.sigma_c.re;

    let n_a = base
        + pre
            * ((k2 * k2 - 4.0 * e2 * e2) * ea
                + 2.0 * e2 * (4.0 * e2 + k2) * eb
                + 2.0 * e2 * (k2 - 2.0 * e2) * ec
                - 2.0 * e * k * (k2 - 2.0 * e2) * sc_sum);
    let b_bracket = 2.0 * e2 * (k2 + 2.0 * e2) * ea
        + (k2 + 4.0 * e2) * (k2 - 2.0 * e2) * eb
        + 4.0 * e2 * e2 * ec
        - 4.0 * e2 * e * k * sc_sum;
    let n_b = base + pre * b_bracket;
    let anti_a = 1.0 + base + pre * b_bracket;
    let anti_b = 1.0
        + base
        + pre
            * (4.0 * e2 * (k2 - e2) * ea
                + 2.0 * e2 * (4.0 * e2 + k2) * eb
                + (k2 * k2 - 2.0 * e2 * (k2 + 2.0 * e2)) * ec
                - 2.0 * e * k * (k2 - 2.0 * e2) * sc_sum);

    let gg = 4.0 * g * g / d;
    let pop = -(e / k) * (n_a + n_b);
    let ab = pop - gg * 2.0 * e * eb / k - e / k;
    let ba = C64::new(pop - gg * e * (ea + ec) / k - e / k, 0.0) + atom.sigma_c * gg;
    let z = C64::new(0.0, 0.0);
    Ok(FieldMoments {
        n_a,
        anti_a,
        n_b,
        anti_b,
        ab: C64::new(ab, 0.0),
        ba,
        a2: z,
        b2: z,
        adb: z,
        bad: z,
    })
}

/// `<c^2> = <ab> + <ba>` for the two-mode annihilation operator c = a + b,
/// in its explicit closed form. Only the real part of `sigma_c` enters;
/// it is real at the atomic steady state.
pub fn c2_moment(params: &SystemParams, atom: &AtomicState) -> Result<f64> {
    require_nonzero_denominator(params)?;
    let k = params.kappa();
    let e = params.epsilon();
    let gc = params.gamma_c();
    let d = params.detuning_denominator();
    let sc = atom.sigma_c.re;
    let atomic = 3.0 * e * k * atom.eta_a + 4.0 * e * k * atom.eta_b + e * k * atom.eta_c
        - (4.0 * e * e * 2.0 * sc + d * sc);
    Ok(-2.0 * e / k - (2.0 * e / k) * (4.0 * e * e / d) - k * gc / (d * d) * atomic)
}
