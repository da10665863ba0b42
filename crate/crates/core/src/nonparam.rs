//! Nonparametric references for model assessment: the Kaplan-Meier
//! product-limit estimator and a binned occurrence/exposure hazard.

use crate::error::{Error, Result};

/// One margin's right-censored sample: strictly positive times with event
/// indicators (`true` = event).
#[derive(Debug, Clone)]
pub struct UnivariateSample {
    times: Vec<f64>,
    events: Vec<bool>,
}

impl UnivariateSample {
    pub fn new(times: Vec<f64>, events: Vec<bool>) -> Result<Self> {
        if times.is_empty() || times.len() != events.len() {
            return Err(Error::Data(
                "sample needs equal-length nonempty times/events".into(),
            ));
        }
        if times.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::Data("times must be finite and > 0".into()));
        }
        Ok(Self { times, events })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_events(&self) -> usize {
        self.events.iter().filter(|e| **e).count()
    }

    pub fn max_time(&self) -> f64 {
        self.times.iter().copied().fold(0.0, f64::max)
    }
}

/// A right-continuous survival step function. Starts at `(0, 1)` with the
/// full sample at risk; every later knot is a distinct event time.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    knots: Vec<f64>,
    values: Vec<f64>,
    at_risk: Vec<usize>,
}

impl StepCurve {
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_risk(&self) -> &[usize] {
        &self.at_risk
    }

    /// Survival level at time `t` (step lookup).
    pub fn eval(&self, t: f64) -> f64 {
        match self.knots.iter().rposition(|k| *k <= t) {
            Some(i) => self.values[i],
            None => 1.0,
        }
    }

    /// The final survival level; on cured samples this is the plateau.
    pub fn plateau(&self) -> f64 {
        *self.values.last().expect("curve always has the origin knot")
    }
}

/// Kaplan-Meier product-limit estimator.
///
/// Ties between events and censorings at the same instant are resolved by
/// processing events first, the standard product-limit convention. A
/// censored-only tail leaves the curve flat, which is the cure-plateau
/// signature on cured populations.
pub fn kaplan_meier(sample: &UnivariateSample) -> StepCurve {
    let mut order: Vec<usize> = (0..sample.len()).collect();
    order.sort_by(|&a, &b| sample.times[a].total_cmp(&sample.times[b]));

    let mut knots = vec![0.0];
    let mut values = vec![1.0];
    let mut at_risk_track = vec![sample.len()];

    let mut survival = 1.0;
    let mut at_risk = sample.len();
    let mut i = 0;
    while i < order.len() {
        let t = sample.times[order[i]];
        let mut deaths = 0;
        let mut removed = 0;
        while i < order.len() && sample.times[order[i]] == t {
            if sample.events[order[i]] {
                deaths += 1;
            }
            removed += 1;
            i += 1;
        }
        if deaths > 0 {
            survival *= 1.0 - deaths as f64 / at_risk as f64;
            knots.push(t);
            values.push(survival);
            at_risk_track.push(at_risk);
        }
        at_risk -= removed;
    }
    StepCurve { knots, values, at_risk: at_risk_track }
}

/// One bin of the piecewise-constant hazard estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HazardBin {
    pub lo: f64,
    pub hi: f64,
    pub midpoint: f64,
    pub events: usize,
    /// Total at-risk time accrued inside the bin by all subjects.
    pub exposure: f64,
    pub hazard: f64,
}

/// Occurrence/exposure hazard over equal-width bins spanning `(0, max time]`.
/// Bins that accrue no exposure emit no row.
pub fn binned_hazard(sample: &UnivariateSample, bins: usize) -> Result<Vec<HazardBin>> {
    if bins == 0 {
        return Err(Error::Data("bin count must be positive".into()));
    }
    if sample.n_events() == 0 {
        return Err(Error::Data(
            "hazard estimation needs at least one event".into(),
        ));
    }
    let max_t = sample.max_time();
    let width = max_t / bins as f64;
    let mut out = Vec::with_capacity(bins);
    for b in 0..bins {
        let lo = b as f64 * width;
        let hi = if b + 1 == bins { max_t } else { (b + 1) as f64 * width };
        let mut events = 0;
        let mut exposure = 0.0;
        for (t, ev) in sample.times.iter().zip(&sample.events) {
            exposure += (t.min(hi) - lo).max(0.0);
            if *ev && *t > lo && *t <= hi {
                events += 1;
            }
        }
        if exposure > 0.0 {
            out.push(HazardBin {
                lo,
                hi,
                midpoint: 0.5 * (lo + hi),
                events,
                exposure,
                hazard: events as f64 / exposure,
            });
        }
    }
    Ok(out)
}

/// Default bin count: `ceil(sqrt(number of events))`.
pub fn default_bin_count(sample: &UnivariateSample) -> usize {
    (sample.n_events() as f64).sqrt().ceil().max(1.0) as usize
}
