//! The bivariate defective Gompertz model: two DG marginals joined by a
//! Clayton copula, and the four-class right-censored log-likelihood.
//!
//! Each observation contributes one of four factors depending on its pair of
//! event indicators: the joint density (both observed), a negated partial
//! derivative of the joint survival (one observed), or the joint survival
//! itself (both censored). All four are assembled in log space from the
//! per-observation cached `log S_j` and `log f_j` terms.

use crate::clayton::ClaytonPhi;
use crate::dgompertz::DGParams;
use crate::error::{Error, Result};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Full parameter vector of the joint model. The canonical flat order used
/// throughout (reports, chains, covariance matrices) is
/// `(alpha1, beta1, alpha2, beta2, phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdgdParams {
    m1: DGParams,
    m2: DGParams,
    phi: ClaytonPhi,
}

/// Cure rates and dependence measures implied by a parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    pub rho1: f64,
    pub rho2: f64,
    pub tau_k: f64,
    pub tau_s: f64,
    /// Joint long-term survival plateau `(rho1^-phi + rho2^-phi - 1)^-1/phi`.
    /// Reported as a diagnostic only; no reference value exists for it.
    pub joint_cure: f64,
}

impl BdgdParams {
    pub fn new(m1: DGParams, m2: DGParams, phi: ClaytonPhi) -> Self {
        Self { m1, m2, phi }
    }

    /// Build from the canonical flat order `(alpha1, beta1, alpha2, beta2, phi)`.
    pub fn from_values(a1: f64, b1: f64, a2: f64, b2: f64, phi: f64) -> Result<Self> {
        Ok(Self {
            m1: DGParams::new(a1, b1)?,
            m2: DGParams::new(a2, b2)?,
            phi: ClaytonPhi::new(phi)?,
        })
    }

    pub fn margin1(&self) -> &DGParams {
        &self.m1
    }

    pub fn margin2(&self) -> &DGParams {
        &self.m2
    }

    pub fn phi(&self) -> &ClaytonPhi {
        &self.phi
    }

    /// Flat parameter vector in canonical order.
    pub fn values(&self) -> [f64; 5] {
        [
            self.m1.alpha(),
            self.m1.beta(),
            self.m2.alpha(),
            self.m2.beta(),
            self.phi.value(),
        ]
    }

    pub fn rho1(&self) -> f64 {
        self.m1.cure_rate()
    }

    pub fn rho2(&self) -> f64 {
        self.m2.cure_rate()
    }

    pub fn log_joint_survival(&self, t1: f64, t2: f64) -> Result<f64> {
        let lu = self.m1.log_survival(t1)?;
        let lv = self.m2.log_survival(t2)?;
        Ok(self.phi.log_joint_survival_from_log(lu, lv))
    }

    pub fn joint_survival(&self, t1: f64, t2: f64) -> Result<f64> {
        Ok(self.log_joint_survival(t1, t2)?.exp())
    }

    /// log of the joint density, for strictly positive times.
    pub fn log_density(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check_positive(t1, t2)?;
        let lu = self.m1.log_survival_unchecked(t1);
        let lv = self.m2.log_survival_unchecked(t2);
        let value = self.m1.log_density_unchecked(t1)
            + self.m2.log_density_unchecked(t2)
            + self.phi.log_density_factor_from_log(lu, lv);
        ensure_finite(value, "joint log-density")
    }

    /// log of `-dS/dt1`, the contribution of an observation with the first
    /// time observed and the second censored.
    pub fn log_partial_t1(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check_positive(t1, t2)?;
        let lu = self.m1.log_survival_unchecked(t1);
        let lv = self.m2.log_survival_unchecked(t2);
        let value =
            self.m1.log_density_unchecked(t1) + self.phi.log_conditional_from_log(lu, lv);
        ensure_finite(value, "partial derivative in t1")
    }

    /// log of `-dS/dt2`, symmetric to [`Self::log_partial_t1`].
    pub fn log_partial_t2(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check_positive(t1, t2)?;
        let lu = self.m1.log_survival_unchecked(t1);
        let lv = self.m2.log_survival_unchecked(t2);
        let value =
            self.m2.log_density_unchecked(t2) + self.phi.log_conditional_from_log(lv, lu);
        ensure_finite(value, "partial derivative in t2")
    }

    /// Censored-data log-likelihood over the four observation classes.
    ///
    /// Any observation producing a non-finite contribution aborts with its
    /// index; silently dropping rows would corrupt downstream coverage
    /// counts. Uncensored times of exactly zero are rejected as data errors.
    pub fn loglik(&self, data: &Dataset) -> Result<f64> {
        let mut total = 0.0;
        for (index, obs) in data.observations().iter().enumerate() {
            let term = self
                .loglik_term(obs)
                .map_err(|e| Error::Observation { index, message: e.to_string() })?;
            total += term;
        }
        Ok(total)
    }

    fn loglik_term(&self, obs: &BivObs) -> Result<f64> {
        if (obs.delta1 && obs.t1 == 0.0) || (obs.delta2 && obs.t2 == 0.0) {
            return Err(Error::Data(
                "uncensored time of exactly 0 is not a valid event time".into(),
            ));
        }
        let lu = self.m1.log_survival_unchecked(obs.t1);
        let lv = self.m2.log_survival_unchecked(obs.t2);
        let value = match (obs.delta1, obs.delta2) {
            (true, true) => {
                self.m1.log_density_unchecked(obs.t1)
                    + self.m2.log_density_unchecked(obs.t2)
                    + self.phi.log_density_factor_from_log(lu, lv)
            }
            (true, false) => {
                self.m1.log_density_unchecked(obs.t1)
                    + self.phi.log_conditional_from_log(lu, lv)
            }
            (false, true) => {
                self.m2.log_density_unchecked(obs.t2)
                    + self.phi.log_conditional_from_log(lv, lu)
            }
            (false, false) => self.phi.log_joint_survival_from_log(lu, lv),
        };
        ensure_finite(value, "log-likelihood contribution")
    }

    pub fn derived_quantities(&self) -> Result<DerivedQuantities> {
        Ok(DerivedQuantities {
            rho1: self.rho1(),
            rho2: self.rho2(),
            tau_k: self.phi.kendall_tau(),
            tau_s: self.phi.spearman_rho()?,
            joint_cure: self.joint_cure_plateau(),
        })
    }

    /// Long-term joint survival mass, the `t1, t2 -> inf` limit of the joint
    /// survival function.
    pub fn joint_cure_plateau(&self) -> f64 {
        self.phi
            .log_joint_survival_from_log(self.rho1().ln(), self.rho2().ln())
            .exp()
    }

    fn check_positive(&self, t1: f64, t2: f64) -> Result<()> {
        if !(t1.is_finite() && t1 > 0.0 && t2.is_finite() && t2 > 0.0) {
            return Err(Error::Domain(format!(
                "times must be finite and > 0, got ({t1}, {t2})"
            )));
        }
        Ok(())
    }
}

impl Serialize for BdgdParams {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let [a1, b1, a2, b2, phi] = self.values();
        let mut s = serializer.serialize_struct("BdgdParams", 5)?;
        s.serialize_field("alpha1", &a1)?;
        s.serialize_field("beta1", &b1)?;
        s.serialize_field("alpha2", &a2)?;
        s.serialize_field("beta2", &b2)?;
        s.serialize_field("phi", &phi)?;
        s.end()
    }
}

fn ensure_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain(format!("{what} is non-finite ({value})")))
    }
}

/// One subject's record: two nonnegative times with event indicators
/// (`true` = event observed, `false` = right-censored).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivObs {
    t1: f64,
    delta1: bool,
    t2: f64,
    delta2: bool,
}

impl BivObs {
    pub fn new(t1: f64, delta1: bool, t2: f64, delta2: bool) -> Result<Self> {
        for (name, t) in [("t1", t1), ("t2", t2)] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Data(format!(
                    "{name} must be finite and >= 0, got {t}"
                )));
            }
        }
        Ok(Self { t1, delta1, t2, delta2 })
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn delta1(&self) -> bool {
        self.delta1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn delta2(&self) -> bool {
        self.delta2
    }
}

/// An ordered collection of bivariate observations, optionally labelled.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<BivObs>,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(observations: Vec<BivObs>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::Data("dataset must be non-empty".into()));
        }
        Ok(Self { observations, labels: None })
    }

    pub fn with_labels(observations: Vec<BivObs>, labels: Vec<String>) -> Result<Self> {
        if observations.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} labels for {} observations",
                labels.len(),
                observations.len()
            )));
        }
        let mut ds = Self::new(observations)?;
        ds.labels = Some(labels);
        Ok(ds)
    }

    pub fn observations(&self) -> &[BivObs] {
        &self.observations
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// The (time, indicator) pairs of one margin.
    pub fn margin(&self, which: usize) -> (Vec<f64>, Vec<bool>) {
        assert!(which == 1 || which == 2, "margin index must be 1 or 2");
        self.observations
            .iter()
            .map(|o| {
                if which == 1 {
                    (o.t1, o.delta1)
                } else {
                    (o.t2, o.delta2)
                }
            })
            .unzip()
    }
}
