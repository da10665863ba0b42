//! The univariate defective Gompertz distribution.
//!
//! With shape `alpha > 0` and scale `beta > 0` the survival function is
//! `S(t) = exp{-(alpha/beta)[1 - exp(-beta t)]}`, which plateaus at the cure
//! rate `rho = exp(-alpha/beta)` instead of dropping to zero. The density is
//! defective: it integrates to `1 - rho` over the positive axis. The CDF is
//! therefore only invertible on `(0, 1 - rho)`.

use crate::error::{Error, Result};

/// How close `u` may get to the non-invertible boundary `1 - rho` before
/// [`DGParams::inverse_cdf`] refuses it. Inside this margin the inverse is an
/// overflow-prone near-infinity; callers that mean "cured" handle infinity
/// explicitly instead.
pub const INVERSE_CDF_BOUNDARY_MARGIN: f64 = 1e-12;

/// Shape/scale pair of one defective Gompertz marginal.
///
/// Validated on construction; all operations assume a valid pair and only
/// check their time/probability arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DGParams {
    alpha: f64,
    beta: f64,
}

impl DGParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shape alpha must be finite and > 0, got {alpha}"
            )));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "scale beta must be finite and > 0, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The limiting survival probability `rho = exp(-alpha/beta)`.
    pub fn cure_rate(&self) -> f64 {
        (-self.alpha / self.beta).exp()
    }

    /// log S(t) evaluated directly as `(alpha/beta) * expm1(-beta t)`,
    /// never through `exp` then `ln`.
    pub fn log_survival(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.log_survival_unchecked(t))
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        Ok(self.log_survival(t)?.exp())
    }

    pub fn log_density(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.log_density_unchecked(t))
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        Ok(self.log_density(t)?.exp())
    }

    /// `h(t) = alpha * exp(-beta t)`; strictly decreasing in `t`.
    pub fn hazard(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.alpha * (-self.beta * t).exp())
    }

    /// Inverse of the defective CDF `F(t) = 1 - S(t)`, defined for
    /// `0 < u < 1 - rho`.
    ///
    /// Values within [`INVERSE_CDF_BOUNDARY_MARGIN`] of the upper boundary are
    /// rejected as domain errors rather than mapped to a huge finite time.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        let event_mass = 1.0 - self.cure_rate();
        if !u.is_finite() || u <= 0.0 || u >= event_mass - INVERSE_CDF_BOUNDARY_MARGIN {
            return Err(Error::Domain(format!(
                "inverse CDF defined on (0, {event_mass:.6}) exclusive of the cure boundary, got {u}"
            )));
        }
        // ln(1-u) via ln_1p for accuracy at small u.
        let inner = 1.0 + (self.beta / self.alpha) * (-u).ln_1p();
        Ok(-inner.ln() / self.beta)
    }

    pub(crate) fn log_survival_unchecked(&self, t: f64) -> f64 {
        (self.alpha / self.beta) * (-self.beta * t).exp_m1()
    }

    pub(crate) fn log_density_unchecked(&self, t: f64) -> f64 {
        self.alpha.ln() - self.beta * t + self.log_survival_unchecked(t)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(())
    }
}
