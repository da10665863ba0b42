//! Bivariate defective Gompertz lifetime modelling with Clayton dependence.
//!
//! A defective Gompertz marginal leaves probability mass `rho = exp(-alpha/beta)`
//! at infinity; that mass is the cure fraction of a survival population. This
//! crate joins two such marginals through a Clayton copula and provides the
//! tooling around the resulting joint model:
//!
//! - [`dgompertz`]: the univariate marginal (survival, density, hazard,
//!   cure rate, inverse CDF on the non-cured mass).
//! - [`clayton`]: the copula itself, its density factor, conditional
//!   distribution and quantile, and the Kendall/Spearman dependence measures.
//! - [`bdgd`]: the joint model and the four-class right-censored
//!   log-likelihood.
//! - [`mle`]: Nelder-Mead maximum likelihood with numerical-Hessian standard
//!   errors, Wald intervals and delta-method inference for the cure rates.
//! - [`bayes`]: random-walk Metropolis sampling under uniform box priors.
//! - [`simulate`]: the latent-cure generation algorithm and the twelve
//!   simulation scenarios.
//! - [`study`]: Monte-Carlo bias / MSE / coverage studies over the scenarios.
//! - [`nonparam`]: Kaplan-Meier and a binned occurrence/exposure hazard for
//!   model assessment.
//! - [`io`]: CSV/JSON surfaces shared with the command-line front end.

pub mod bayes;
pub mod bdgd;
pub mod clayton;
pub mod dgompertz;
pub mod error;
pub mod io;
pub mod mle;
pub mod nonparam;
pub mod simulate;
pub mod stats;
pub mod study;

pub use bayes::{ChainDiagnostics, McmcConfig, McmcRun, PosteriorSummary, PriorBox};
pub use bdgd::{BdgdParams, BivObs, Dataset, DerivedQuantities};
pub use clayton::{sample_kendall_tau, ClaytonPhi};
pub use dgompertz::DGParams;
pub use error::{Error, Result};
pub use mle::{fit, FitConfig, FitReport};
pub use nonparam::{binned_hazard, kaplan_meier, HazardBin, StepCurve, UnivariateSample};
pub use simulate::{generate, scenario_catalog, GenConfig, MixingRule, Scenario};
pub use stats::Interval;
pub use study::{coverage_band, run_study, StudyConfig, StudyResult};
