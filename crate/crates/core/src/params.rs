//! Rate parameters of the cavity, the parametric drive and the atom-field
//! coupling, together with the constants derived from them.
//!
//! All rates share one arbitrary inverse-time unit.

use crate::error::{Error, Result};

/// The rate triple (kappa, epsilon, g).
///
/// `epsilon` is the classical-pump parametric amplitude: the crystal coupling
/// constant times the (real, constant) pump amplitude. Only the product ever
/// enters the dynamics.
///
/// `gamma_c` and `beta` are recomputed on every call and never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    kappa: f64,
    epsilon: f64,
    g: f64,
}

fn check(field: &'static str, value: f64, strictly_positive: bool) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be finite",
        });
    }
    if strictly_positive && value <= 0.0 {
        return Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be > 0",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            field,
            value,
            reason: "must be >= 0",
        });
    }
    Ok(())
}

impl SystemParams {
    pub fn new(kappa: f64, epsilon: f64, g: f64) -> Result<Self> {
        check("kappa", kappa, true)?;
        check("epsilon", epsilon, false)?;
        check("g", g, false)?;
        Ok(Self { kappa, epsilon, g })
    }

    /// Builds the parameters from the stimulated-emission decay constant
    /// instead of the coupling, using g = sqrt(gamma_c * kappa) / 2.
    pub fn from_gamma_c(kappa: f64, epsilon: f64, gamma_c: f64) -> Result<Self> {
        check("kappa", kappa, true)?;
        check("gamma_c", gamma_c, false)?;
        Self::new(kappa, epsilon, (gamma_c * kappa).sqrt() / 2.0)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Stimulated-emission decay constant 4 g^2 / kappa.
    pub fn gamma_c(&self) -> f64 {
        4.0 * self.g * self.g / self.kappa
    }

    /// kappa^2 - 4 epsilon^2, evaluated as a product so that its sign agrees
    /// exactly with `2 epsilon < kappa`.
    pub fn detuning_denominator(&self) -> f64 {
        (self.kappa - 2.0 * self.epsilon) * (self.kappa + 2.0 * self.epsilon)
    }

    /// First-moment decay constant (kappa^2 - 4 epsilon^2) / kappa.
    pub fn beta(&self) -> f64 {
        self.detuning_denominator() / self.kappa
    }

    /// True iff epsilon < kappa/2: the moment dynamics are stable and every
    /// (kappa^2 - 4 epsilon^2) denominator is nonzero.
    pub fn dynamics_valid(&self) -> bool {
        2.0 * self.epsilon < self.kappa
    }

    /// True iff epsilon <= kappa/2: the closed-form plus-quadrature variance
    /// and squeezing are still finite.
    pub fn closed_form_valid(&self) -> bool {
        2.0 * self.epsilon <= self.kappa
    }

    pub(crate) fn require_dynamics(&self) -> Result<()> {
        if self.dynamics_valid() {
            Ok(())
        } else {
            Err(Error::Regime {
                violated: "epsilon >= kappa/2",
            })
        }
    }

    pub(crate) fn require_closed_form(&self) -> Result<()> {
        if self.closed_form_valid() {
            Ok(())
        } else {
            Err(Error::Regime {
                violated: "epsilon > kappa/2",
            })
        }
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.kappa, epsilon, self.g)
    }
}
