//! Single-sensor validation against the sensor's Markov blanket.
//!
//! A reading is discretized into uniform intervals, the blanket members are
//! instantiated as evidence, and the posterior over the validated sensor is
//! compared with its actual value under a [`DetectionCriterion`].

use crate::inference::{posterior_by_index, Distribution, InferenceError};
use crate::model::BayesNet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DetectionError {
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("sensor `{0}` has a zero-width range in the training data")]
    ZeroRange(String),
    #[error("need at least 2 intervals, got {0}")]
    TooFewBins(usize),
    #[error("invalid bounds for `{sensor}`: lower {lower} must be below upper {upper}")]
    InvalidBounds { sensor: String, lower: f64, upper: f64 },
    #[error("no training rows")]
    NoData,
    #[error("reading has no value for sensor `{0}`")]
    MissingReading(String),
    #[error("discretizer has no entry for sensor `{0}`")]
    UnknownSensor(String),
    #[error("sensor `{sensor}` has {states} states in the network but {bins} intervals")]
    BinMismatch {
        sensor: String,
        states: usize,
        bins: usize,
    },
    #[error("invalid criterion: {0}")]
    InvalidCriterion(String),
    #[error("malformed discretizer document: {0}")]
    Parse(String),
}

/// Outcome of validating one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Correct,
    Faulty,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Correct => "correct",
            Status::Faulty => "faulty",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApparentStatus {
    pub sensor: String,
    pub status: Status,
}

/// Real-valued readings keyed by sensor name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SensorReading(BTreeMap<String, f64>);

impl SensorReading {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, sensor: &str) -> Option<f64> {
        self.0.get(sensor).copied()
    }

    pub fn set(&mut self, sensor: impl Into<String>, value: f64) {
        self.0.insert(sensor.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for SensorReading {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        SensorReading(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Uniform intervals over one sensor's range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorBins {
    pub lower: f64,
    pub upper: f64,
    pub bins: usize,
}

impl SensorBins {
    pub fn new(sensor: &str, lower: f64, upper: f64, bins: usize) -> Result<Self, DetectionError> {
        if bins < 2 {
            return Err(DetectionError::TooFewBins(bins));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(DetectionError::InvalidBounds {
                sensor: sensor.to_string(),
                lower,
                upper,
            });
        }
        Ok(SensorBins { lower, upper, bins })
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        self.lower + (k as f64 + 0.5) * self.range() / self.bins as f64
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.bins).map(|k| self.midpoint(k)).collect()
    }

    /// Interval index of `x`; values outside the range clamp to the edge intervals.
    pub fn index(&self, x: f64) -> usize {
        let raw = (self.bins as f64 * (x - self.lower) / self.range()).floor();
        if raw <= 0.0 || raw.is_nan() {
            0
        } else {
            (raw as usize).min(self.bins - 1)
        }
    }
}

/// Per-sensor interval schemes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Discretizer {
    pub sensors: BTreeMap<String, SensorBins>,
}

impl Discretizer {
    pub fn get(&self, sensor: &str) -> Result<&SensorBins, DetectionError> {
        self.sensors
            .get(sensor)
            .ok_or_else(|| DetectionError::UnknownSensor(sensor.to_string()))
    }

    pub fn discretize(&self, sensor: &str, x: f64) -> Result<usize, DetectionError> {
        Ok(self.get(sensor)?.index(x))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("discretizer serializes")
    }

    pub fn from_json(doc: &str) -> Result<Self, DetectionError> {
        let d: Discretizer = serde_json::from_str(doc)
            .map_err(|e| DetectionError::Parse(e.to_string()))?;
        for (name, b) in &d.sensors {
            SensorBins::new(name, b.lower, b.upper, b.bins)?;
        }
        Ok(d)
    }
}

/// Bounds from the observed min/max of each sensor, `bins` uniform intervals.
pub fn fit_discretizer(
    rows: &[SensorReading],
    sensors: &[String],
    bins: usize,
) -> Result<Discretizer, DetectionError> {
    if rows.is_empty() {
        return Err(DetectionError::NoData);
    }
    let mut out = BTreeMap::new();
    for s in sensors {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in rows {
            let x = r.get(s).ok_or_else(|| DetectionError::MissingReading(s.clone()))?;
            lo = lo.min(x);
            hi = hi.max(x);
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(lo < hi) {
            return Err(DetectionError::ZeroRange(s.clone()));
        }
        out.insert(s.clone(), SensorBins::new(s, lo, hi, bins)?);
    }
    Ok(Discretizer { sensors: out })
}

pub fn discretize(d: &Discretizer, sensor: &str, x: f64) -> Result<usize, DetectionError> {
    d.discretize(sensor, x)
}

/// How a reading is judged against its predicted distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DetectionCriterion {
    /// Faulty when the reading is more than `k` posterior standard deviations from the posterior mean.
    Sigma { k: f64 },
    /// Faulty when the two-tailed posterior mass at least as far from the mean is below `p`.
    PValue { p: f64 },
    /// Faulty when the posterior probability of the reading's interval is below `tau`.
    Tau { tau: f64 },
}

impl DetectionCriterion {
    pub fn sigma(k: f64) -> Result<Self, DetectionError> {
        if k > 0.0 && k.is_finite() {
            Ok(Self::Sigma { k })
        } else {
            Err(DetectionError::InvalidCriterion(format!("k must be positive, got {k}")))
        }
    }

    pub fn pvalue(p: f64) -> Result<Self, DetectionError> {
        if p > 0.0 && p < 1.0 {
            Ok(Self::PValue { p })
        } else {
            Err(DetectionError::InvalidCriterion(format!("p must lie in (0, 1), got {p}")))
        }
    }

    pub fn tau(tau: f64) -> Result<Self, DetectionError> {
        if tau > 0.0 && tau < 1.0 {
            Ok(Self::Tau { tau })
        } else {
            Err(DetectionError::InvalidCriterion(format!("tau must lie in (0, 1), got {tau}")))
        }
    }

    /// Short label used in reports, e.g. `sigma:3` or `pvalue:0.01`.
    pub fn label(&self) -> String {
        match self {
            Self::Sigma { k } => format!("sigma:{k}"),
            Self::PValue { p } => format!("pvalue:{p}"),
            Self::Tau { tau } => format!("tau:{tau}"),
        }
    }
}

impl fmt::Display for DetectionCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn checked_bins<'a>(
    net: &BayesNet,
    d: &'a Discretizer,
    v: usize,
) -> Result<&'a SensorBins, DetectionError> {
    let var = net.variable(v);
    let bins = d.get(&var.name)?;
    if bins.bins != var.cardinality() {
        return Err(DetectionError::BinMismatch {
            sensor: var.name.clone(),
            states: var.cardinality(),
            bins: bins.bins,
        });
    }
    Ok(bins)
}

/// Posterior over `sensor`'s intervals given the discretized readings of its Markov blanket.
pub fn predict_distribution(
    net: &BayesNet,
    d: &Discretizer,
    reading: &SensorReading,
    sensor: &str,
) -> Result<Distribution, DetectionError> {
    let v = net.index_of(sensor).map_err(InferenceError::from)?;
    checked_bins(net, d, v)?;
    let mut observed = Vec::new();
    for u in net.dag().blanket_indices(v) {
        let name = &net.variable(u).name;
        let x = reading
            .get(name)
            .ok_or_else(|| DetectionError::MissingReading(name.clone()))?;
        observed.push((u, checked_bins(net, d, u)?.index(x)));
    }
    Ok(Distribution {
        variable: sensor.to_string(),
        probabilities: posterior_by_index(net, &observed, v)?,
    })
}

/// Posterior mean and standard deviation in engineering units, using interval midpoints.
pub fn posterior_moments(
    dist: &Distribution,
    d: &Discretizer,
    sensor: &str,
) -> Result<(f64, f64), DetectionError> {
    let mids = d.get(sensor)?.midpoints();
    let mean: f64 = dist.probabilities.iter().zip(&mids).map(|(p, m)| p * m).sum();
    let var: f64 = dist
        .probabilities
        .iter()
        .zip(&mids)
        .map(|(p, m)| p * (m - mean).powi(2))
        .sum();
    Ok((mean, var.sqrt()))
}

/// Two-tailed posterior mass of intervals whose midpoint is at least as far from the mean as `x`.
pub fn tail_mass(x: f64, dist: &Distribution, bins: &SensorBins, mean: f64) -> f64 {
    let dev = (x - mean).abs();
    bins.midpoints()
        .iter()
        .zip(&dist.probabilities)
        .filter(|(m, _)| (*m - mean).abs() >= dev)
        .map(|(_, p)| p)
        .sum()
}

pub fn apply_criterion(
    x: f64,
    dist: &Distribution,
    d: &Discretizer,
    sensor: &str,
    criterion: DetectionCriterion,
) -> Result<ApparentStatus, DetectionError> {
    let bins = d.get(sensor)?;
    let (mean, sd) = posterior_moments(dist, d, sensor)?;
    let faulty = match criterion {
        DetectionCriterion::Sigma { k } => (x - mean).abs() > k * sd,
        DetectionCriterion::PValue { p } => tail_mass(x, dist, bins, mean) < p,
        DetectionCriterion::Tau { tau } => dist.probabilities[bins.index(x)] < tau,
    };
    Ok(ApparentStatus {
        sensor: sensor.to_string(),
        status: if faulty { Status::Faulty } else { Status::Correct },
    })
}

/// Predicts `sensor` from its blanket and judges its actual reading.
pub fn validate_sensor(
    net: &BayesNet,
    d: &Discretizer,
    reading: &SensorReading,
    sensor: &str,
    criterion: DetectionCriterion,
) -> Result<ApparentStatus, DetectionError> {
    let x = reading
        .get(sensor)
        .ok_or_else(|| DetectionError::MissingReading(sensor.to_string()))?;
    let dist = predict_distribution(net, d, reading, sensor)?;
    apply_criterion(x, &dist, d, sensor, criterion)
}
