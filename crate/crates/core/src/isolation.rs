//! Fault isolation with a two-layer noisy-OR network.
//!
//! Each sensor `i` has a real-fault root `R_i` and an apparent-fault leaf
//! `A_i`. There is an arc `R_i → A_j` for every `j` in the extended Markov
//! blanket of `i`, so a real fault in `i` shows up as an apparent fault in
//! every sensor whose validation depends on `i`.
//!
//! Posteriors are recomputed from the full [`FindingSet`] on every query.
//! A `correct` finding factorizes over its causes and is folded into the
//! root priors; a `faulty` finding couples its causes and becomes one factor
//! over them. Roots untouched by any `faulty` finding therefore have a closed
//! form, and the remaining roots are solved per connected component with the
//! variable eliminator.

use crate::detection::Status;
use crate::inference::{marginal_from_factors, noisy_or_values, Factor, InferenceError};
use crate::model::{BayesNet, Cpt, EmbTable, ModelError, Variable};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

pub const DEFAULT_LINK_STRENGTH: f64 = 0.99;
pub const DEFAULT_PRIOR: f64 = 0.5;
pub const DEFAULT_DECLARE_THRESHOLD: f64 = 0.9;

/// Faulty findings couple all their causes; past this many causes the joint factor is refused.
const MAX_CAUSES: usize = 24;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IsolationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("unknown sensor `{0}`")]
    UnknownSensor(String),
    #[error("sensor `{0}` already has a finding")]
    DuplicateFinding(String),
    #[error("{name} must lie in (0, 1), got {value}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("no link {cause} -> {effect} in the isolation network")]
    NoSuchLink { cause: String, effect: String },
    #[error("apparent fault `{0}` has too many causes for exact isolation")]
    TooManyCauses(String),
}

/// Observed apparent statuses accumulated during a validation cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FindingSet(BTreeMap<String, Status>);

impl FindingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, sensor: impl Into<String>, status: Status) -> Result<(), IsolationError> {
        let sensor = sensor.into();
        if self.0.contains_key(&sensor) {
            return Err(IsolationError::DuplicateFinding(sensor));
        }
        self.0.insert(sensor, status);
        Ok(())
    }

    /// Copy of `self` with one more finding.
    pub fn with(&self, sensor: &str, status: Status) -> Result<Self, IsolationError> {
        let mut next = self.clone();
        next.insert(sensor, status)?;
        Ok(next)
    }

    pub fn get(&self, sensor: &str) -> Option<Status> {
        self.0.get(sensor).copied()
    }

    pub fn contains(&self, sensor: &str) -> bool {
        self.0.contains_key(sensor)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Status)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn faulty(&self) -> impl Iterator<Item = &String> {
        self.0.iter().filter(|(_, s)| **s == Status::Faulty).map(|(k, _)| k)
    }

    pub fn correct(&self) -> impl Iterator<Item = &String> {
        self.0.iter().filter(|(_, s)| **s == Status::Correct).map(|(k, _)| k)
    }
}

impl<S: Into<String>> FromIterator<(S, Status)> for FindingSet {
    fn from_iter<I: IntoIterator<Item = (S, Status)>>(iter: I) -> Self {
        FindingSet(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Posterior probability of a real fault for every sensor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaultBelief(BTreeMap<String, f64>);

impl FaultBelief {
    pub fn get(&self, sensor: &str) -> Option<f64> {
        self.0.get(sensor).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.values().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for FaultBelief {
    fn from_iter<I: IntoIterator<Item = (S, f64)>>(iter: I) -> Self {
        FaultBelief(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Bipartite real-fault → apparent-fault network with noisy-OR leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolationNet {
    emb: EmbTable,
    sensors: Vec<String>,
    index: HashMap<String, usize>,
    /// `causes[j]`: roots with an arc into `A_j`, ascending.
    causes: Vec<Vec<usize>>,
    /// `inhibitors[j][k] = 1 - c` for the link `causes[j][k] → A_j`.
    inhibitors: Vec<Vec<f64>>,
    priors: Vec<f64>,
}

fn open_unit(name: &'static str, value: f64) -> Result<f64, IsolationError> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(IsolationError::OutOfRange { name, value })
    }
}

fn closed_unit(name: &'static str, value: f64) -> Result<f64, IsolationError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(IsolationError::OutOfRange { name, value })
    }
}

/// Builds the isolation network with uniform link strength `c` and root prior `prior`.
pub fn build_isolation_network(emb: &EmbTable, c: f64, prior: f64) -> Result<IsolationNet, IsolationError> {
    closed_unit("link strength", c)?;
    open_unit("prior", prior)?;
    let emb = EmbTable::new(emb.rows().clone())?;
    let sensors: Vec<String> = emb.sensors().cloned().collect();
    let index: HashMap<String, usize> =
        sensors.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut causes = vec![Vec::new(); sensors.len()];
    for (i, s) in sensors.iter().enumerate() {
        for j in emb.get(s).expect("row exists") {
            causes[index[j]].push(i);
        }
    }
    causes.iter_mut().for_each(|cs| cs.sort_unstable());
    let inhibitors = causes.iter().map(|cs| vec![1.0 - c; cs.len()]).collect();
    let priors = vec![prior; sensors.len()];
    Ok(IsolationNet { emb, sensors, index, causes, inhibitors, priors })
}

impl IsolationNet {
    /// Sensors in ascending name order.
    pub fn sensors(&self) -> &[String] {
        &self.sensors
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn emb(&self) -> &EmbTable {
        &self.emb
    }

    fn idx(&self, sensor: &str) -> Result<usize, IsolationError> {
        self.index
            .get(sensor)
            .copied()
            .ok_or_else(|| IsolationError::UnknownSensor(sensor.to_string()))
    }

    /// Sensors whose real fault can make `effect` look faulty.
    pub fn causes_of(&self, effect: &str) -> Result<Vec<String>, IsolationError> {
        let j = self.idx(effect)?;
        Ok(self.causes[j].iter().map(|&i| self.sensors[i].clone()).collect())
    }

    pub fn prior(&self, sensor: &str) -> Result<f64, IsolationError> {
        Ok(self.priors[self.idx(sensor)?])
    }

    /// `c` on the link `R_cause → A_effect`, or `None` when no such link exists.
    pub fn link_strength(&self, cause: &str, effect: &str) -> Option<f64> {
        let (i, j) = (self.idx(cause).ok()?, self.idx(effect).ok()?);
        let k = self.causes[j].iter().position(|&x| x == i)?;
        Some(1.0 - self.inhibitors[j][k])
    }

    pub fn set_link_strength(&mut self, cause: &str, effect: &str, c: f64) -> Result<(), IsolationError> {
        closed_unit("link strength", c)?;
        let (i, j) = (self.idx(cause)?, self.idx(effect)?);
        let k = self.causes[j].iter().position(|&x| x == i).ok_or_else(|| {
            IsolationError::NoSuchLink { cause: cause.to_string(), effect: effect.to_string() }
        })?;
        self.inhibitors[j][k] = 1.0 - c;
        Ok(())
    }

    pub fn set_prior(&mut self, sensor: &str, prior: f64) -> Result<(), IsolationError> {
        open_unit("prior", prior)?;
        let i = self.idx(sensor)?;
        self.priors[i] = prior;
        Ok(())
    }

    /// The same network as an ordinary [`BayesNet`]: roots `R_s` with states
    /// `ok`/`fault` and leaves `A_s` with states `correct`/`faulty`.
    pub fn to_bayes_net(&self) -> Result<BayesNet, IsolationError> {
        let root = |s: &str| format!("R_{s}");
        let leaf = |s: &str| format!("A_{s}");
        let mut vars = Vec::new();
        let mut edges = Vec::new();
        let mut cpts = Vec::new();
        for (i, s) in self.sensors.iter().enumerate() {
            vars.push(Variable::new(root(s), &["ok", "fault"]));
            cpts.push(Cpt {
                child: root(s),
                parents: vec![],
                table: vec![vec![1.0 - self.priors[i], self.priors[i]]],
            });
        }
        for (j, s) in self.sensors.iter().enumerate() {
            vars.push(Variable::new(leaf(s), &["correct", "faulty"]));
            let parents: Vec<String> = self.causes[j].iter().map(|&i| root(&self.sensors[i])).collect();
            edges.extend(parents.iter().map(|p| (p.clone(), leaf(s))));
            let table = noisy_or_values(&self.inhibitors[j])
                .chunks(2)
                .map(|r| r.to_vec())
                .collect();
            cpts.push(Cpt { child: leaf(s), parents, table });
        }
        Ok(BayesNet::new(vars, edges, cpts)?)
    }
}

/// Exact `P(R_s = fault | findings)` for every sensor.
pub fn fault_belief(iso: &IsolationNet, findings: &FindingSet) -> Result<FaultBelief, IsolationError> {
    let n = iso.len();
    // Unnormalized root weights (ok, fault) after absorbing the correct findings.
    let mut weights: Vec<[f64; 2]> = iso.priors.iter().map(|&p| [1.0 - p, p]).collect();
    let mut positive = Vec::new();
    for (sensor, status) in findings.iter() {
        let j = iso.idx(sensor)?;
        match status {
            Status::Correct => {
                for (&i, &q) in iso.causes[j].iter().zip(&iso.inhibitors[j]) {
                    weights[i][1] *= q;
                }
            }
            Status::Faulty => {
                if iso.causes[j].len() > MAX_CAUSES {
                    return Err(IsolationError::TooManyCauses(sensor.clone()));
                }
                positive.push(j);
            }
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut coupled = vec![false; n];
    for &j in &positive {
        let cs = &iso.causes[j];
        for &i in cs {
            coupled[i] = true;
            let (a, b) = (find(&mut parent, cs[0]), find(&mut parent, i));
            parent[a] = b;
        }
    }

    let mut pf = vec![0.0; n];
    for i in (0..n).filter(|&i| !coupled[i]) {
        let [ok, fault] = weights[i];
        pf[i] = fault / (ok + fault);
    }

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in (0..n).filter(|&i| coupled[i]) {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i);
    }
    for (root, members) in components {
        let mut factors: Vec<Factor> = members
            .iter()
            .map(|&i| Factor::new(vec![i], vec![2], weights[i].to_vec()))
            .collect();
        for &j in &positive {
            if find(&mut parent, iso.causes[j][0]) != root {
                continue;
            }
            let cs = iso.causes[j].clone();
            let values: Vec<f64> = noisy_or_values(&iso.inhibitors[j]).into_iter().skip(1).step_by(2).collect();
            factors.push(Factor::new(cs.clone(), vec![2; cs.len()], values));
        }
        for &i in &members {
            pf[i] = marginal_from_factors(factors.clone(), i, 2, &iso.sensors)?[1];
        }
    }

    Ok(iso.sensors.iter().cloned().zip(pf).collect())
}

/// Sensors whose fault probability reaches `threshold`.
pub fn declare_faults(pf: &FaultBelief, threshold: f64) -> Result<BTreeSet<String>, IsolationError> {
    open_unit("declare threshold", threshold)?;
    Ok(pf.iter().filter(|(_, p)| **p >= threshold).map(|(s, _)| s.clone()).collect())
}

/// Sensors `r` with `EMB(r)` equal to the apparent-fault set.
pub fn emb_matches(emb: &EmbTable, apparent: &BTreeSet<String>) -> BTreeSet<String> {
    emb.rows().iter().filter(|(_, row)| *row == apparent).map(|(s, _)| s.clone()).collect()
}

/// The complete finding set a lone fault in `r` produces under perfect detection.
pub fn ideal_findings(emb: &EmbTable, r: &str) -> Result<FindingSet, IsolationError> {
    let row = emb.get(r).ok_or_else(|| IsolationError::UnknownSensor(r.to_string()))?;
    Ok(emb
        .sensors()
        .map(|s| (s.clone(), if row.contains(s) { Status::Faulty } else { Status::Correct }))
        .collect())
}
