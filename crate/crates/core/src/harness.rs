//! Experiment harness: datasets, parameter learning, synthetic plant data,
//! fault injection and error accounting.
//!
//! Every randomized operation takes an explicit seed and draws from
//! [`ChaCha8Rng`], so a run is a pure function of its inputs.

use crate::anytime::{AnytimeError, AnytimeSession, DecisionTree, QualityTrace, SelectionPolicy};
use crate::detection::{fit_discretizer, DetectionCriterion, DetectionError, Discretizer, SensorReading};
use crate::isolation::{
    build_isolation_network, declare_faults, FaultBelief, IsolationError, IsolationNet, DEFAULT_LINK_STRENGTH,
    DEFAULT_PRIOR,
};
use crate::model::{emb_table, reference_edges, BayesNet, Cpt, ModelError, Structure, Variable};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::io;
use thiserror::Error;

pub const DEFAULT_SPLIT: f64 = 0.7;
pub const MILD_SHIFT: f64 = 0.25;
/// Rows generated for a benchmark plant before the train/test split.
pub const DEFAULT_ROWS: usize = 870;
/// Generator noise level; the per-link standard deviation is `noise × 100`.
pub const DEFAULT_NOISE: f64 = 0.2;
pub const BENCHMARK_SEED: u64 = 2002;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error(transparent)]
    Isolation(#[from] IsolationError),
    #[error(transparent)]
    Anytime(#[from] AnytimeError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("dataset has no rows")]
    EmptyData,
    #[error("dataset has no column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    BadValue { row: usize, column: String, value: String },
    #[error("row {row} has {found} fields, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error("{name} must lie in (0, 1), got {value}")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("need at least one {0}")]
    Empty(&'static str),
}

/// Rectangular table of finite readings with a sensor-name header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    sensors: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(sensors: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, HarnessError> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != sensors.len() {
                return Err(HarnessError::Ragged { row: r, found: row.len(), expected: sensors.len() });
            }
            if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                return Err(HarnessError::BadValue {
                    row: r,
                    column: sensors[c].clone(),
                    value: row[c].to_string(),
                });
            }
        }
        Ok(Dataset { sensors, rows })
    }

    pub fn sensors(&self) -> &[String] {
        &self.sensors
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn reading(&self, i: usize) -> SensorReading {
        self.sensors.iter().cloned().zip(self.rows[i].iter().copied()).collect()
    }

    pub fn readings(&self) -> Vec<SensorReading> {
        (0..self.len()).map(|i| self.reading(i)).collect()
    }

    /// Fails with the first sensor in `names` that has no column.
    pub fn require<'a>(&self, names: impl IntoIterator<Item = &'a String>) -> Result<(), HarnessError> {
        for n in names {
            if !self.sensors.contains(n) {
                return Err(HarnessError::MissingColumn(n.clone()));
            }
        }
        Ok(())
    }

    fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset { sensors: self.sensors.clone(), rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    pub fn from_csv<R: io::Read>(reader: R) -> Result<Self, HarnessError> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
        let sensors: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != sensors.len() {
                return Err(HarnessError::Ragged { row: r, found: rec.len(), expected: sensors.len() });
            }
            let row = rec
                .iter()
                .zip(&sensors)
                .map(|(field, col)| {
                    field.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| HarnessError::BadValue {
                        row: r,
                        column: col.clone(),
                        value: field.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        Ok(Dataset { sensors, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.sensors).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Deterministic shuffled split; the training part gets `⌊ratio·N⌋` rows.
/// Both parts keep the original row order.
pub fn split_dataset(data: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset), HarnessError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(HarnessError::OutOfRange { name: "split ratio", value: ratio });
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // The epsilon keeps products such as 0.7 * 870 from flooring to one less.
    let n_train = (ratio * data.len() as f64 + 1e-9).floor() as usize;
    let (mut train, mut test) = (idx[..n_train].to_vec(), idx[n_train..].to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.subset(&train), data.subset(&test)))
}

/// Interval state names used for learned networks.
pub fn bin_states(bins: usize) -> Vec<String> {
    (0..bins).map(|k| format!("b{k}")).collect()
}

/// Laplace-smoothed CPTs over the discretized training rows.
pub fn learn_parameters(structure: &Structure, d: &Discretizer, train: &Dataset) -> Result<BayesNet, HarnessError> {
    if train.is_empty() {
        return Err(HarnessError::EmptyData);
    }
    train.require(&structure.variables)?;
    let dag = structure.dag()?;
    let cards: Vec<usize> = structure
        .variables
        .iter()
        .map(|v| d.get(v).map(|b| b.bins))
        .collect::<Result<_, _>>()?;
    let col: Vec<usize> = structure
        .variables
        .iter()
        .map(|v| train.sensors.iter().position(|s| s == v).expect("column checked"))
        .collect();
    let binned: Vec<Vec<usize>> = train
        .rows
        .iter()
        .map(|row| {
            structure
                .variables
                .iter()
                .zip(&col)
                .map(|(v, &c)| d.discretize(v, row[c]))
                .collect::<Result<Vec<usize>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut vars = Vec::new();
    let mut cpts = Vec::new();
    for (v, name) in structure.variables.iter().enumerate() {
        let states = bin_states(cards[v]);
        let refs: Vec<&str> = states.iter().map(String::as_str).collect();
        vars.push(Variable::new(name.clone(), &refs));
        let parents = dag.parents_of(v);
        let n_rows: usize = parents.iter().map(|&p| cards[p]).product();
        let mut counts = vec![vec![1.0; cards[v]]; n_rows];
        for b in &binned {
            let r = parents.iter().fold(0, |acc, &p| acc * cards[p] + b[p]);
            counts[r][b[v]] += 1.0;
        }
        let table = counts
            .into_iter()
            .map(|row| {
                let z: f64 = row.iter().sum();
                row.into_iter().map(|c| c / z).collect()
            })
            .collect();
        cpts.push(Cpt {
            child: name.clone(),
            parents: parents.iter().map(|&p| structure.variables[p].clone()).collect(),
            table,
        });
    }
    Ok(BayesNet::new(vars, structure.edges.clone(), cpts)?)
}

/// Structure of the five-sensor reference network.
pub fn reference_structure() -> Structure {
    Structure {
        variables: ["m", "t", "p", "g", "a"].iter().map(|s| s.to_string()).collect(),
        edges: reference_edges(),
    }
}

/// Random recursive tree over `n` sensors named `s01`, `s02`, ...; sensor `k`
/// hangs off a uniformly chosen earlier sensor.
pub fn random_tree_structure(n: usize, seed: u64) -> Structure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.to_string().len().max(2);
    let names: Vec<String> = (1..=n).map(|k| format!("s{k:0width$}")).collect();
    let edges = (1..n).map(|k| (names[rng.random_range(0..k)].clone(), names[k].clone())).collect();
    Structure { variables: names, edges }
}

/// The 21-sensor benchmark plant.
pub fn benchmark_structure(seed: u64) -> Structure {
    random_tree_structure(21, seed)
}

/// Start-up-like trajectories: roots ramp toward a plateau, children are
/// noisy weighted sums of their parents. Noise standard deviation is
/// `noise × 100` engineering units.
pub fn generate_synthetic_dataset(
    structure: &Structure,
    n_rows: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset, HarnessError> {
    if n_rows == 0 {
        return Err(HarnessError::Empty("row"));
    }
    let dag = structure.dag()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = structure.variables.len();

    enum Law {
        Ramp { base: f64, amp: f64, tau: f64 },
        Mix { bias: f64, weights: Vec<(usize, f64)> },
    }
    let mut laws = Vec::with_capacity(n);
    for v in 0..n {
        let parents = dag.parents_of(v);
        laws.push(if parents.is_empty() {
            Law::Ramp {
                base: rng.random_range(200.0..800.0),
                amp: rng.random_range(100.0..400.0),
                tau: rng.random_range(0.1..0.4) * n_rows as f64,
            }
        } else {
            Law::Mix {
                bias: rng.random_range(-50.0..50.0),
                weights: parents.iter().map(|&p| (p, rng.random_range(0.5..1.5))).collect(),
            }
        });
    }

    let gauss = Normal::new(0.0, (noise * 100.0).max(0.0)).expect("finite deviation");
    let mut rows = Vec::with_capacity(n_rows);
    for t in 0..n_rows {
        let mut row = vec![0.0; n];
        for &v in dag.topological_order() {
            let clean = match &laws[v] {
                Law::Ramp { base, amp, tau } => base + amp * (1.0 - (-(t as f64) / tau).exp()),
                Law::Mix { bias, weights } => bias + weights.iter().map(|&(p, w)| w * row[p]).sum::<f64>(),
            };
            row[v] = clean + if noise > 0.0 { gauss.sample(&mut rng) } else { 0.0 };
        }
        rows.push(row);
    }
    Dataset::new(structure.variables.clone(), rows)
}

/// Everything a fault experiment needs, learned from one dataset.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub structure: Structure,
    pub discretizer: Discretizer,
    pub net: BayesNet,
    pub iso: IsolationNet,
    pub train: Dataset,
    pub test: Dataset,
}

/// Splits `data`, fits the discretizer and CPTs on the training part and
/// builds the isolation network from the learned blankets.
pub fn build_pipeline(
    structure: &Structure,
    data: &Dataset,
    bins: usize,
    split: f64,
    seed: u64,
) -> Result<Pipeline, HarnessError> {
    let (train, test) = split_dataset(data, split, seed)?;
    let discretizer = fit_discretizer(&train.readings(), &structure.variables, bins)?;
    let net = learn_parameters(structure, &discretizer, &train)?;
    let iso = build_isolation_network(&emb_table(&net), DEFAULT_LINK_STRENGTH, DEFAULT_PRIOR)?;
    Ok(Pipeline { structure: structure.clone(), discretizer, net, iso, train, test })
}

/// The seeded 21-sensor plant at default size and noise, split 70/30.
pub fn benchmark_pipeline(bins: usize) -> Result<Pipeline, HarnessError> {
    let structure = benchmark_structure(BENCHMARK_SEED);
    let data = generate_synthetic_dataset(&structure, DEFAULT_ROWS, DEFAULT_NOISE, BENCHMARK_SEED)?;
    build_pipeline(&structure, &data, bins, DEFAULT_SPLIT, BENCHMARK_SEED)
}

/// The five-sensor reference plant at default size and noise, split 70/30.
pub fn reference_pipeline(seed: u64, bins: usize) -> Result<Pipeline, HarnessError> {
    let structure = reference_structure();
    let data = generate_synthetic_dataset(&structure, DEFAULT_ROWS, DEFAULT_NOISE, seed)?;
    build_pipeline(&structure, &data, bins, DEFAULT_SPLIT, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Severe,
    Mild,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Severe => "severe",
            Severity::Mild => "mild",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub sensor: String,
    pub severity: Severity,
}

/// Replaces the target reading. Severe: the training-range bound farther from
/// the true value (upper on a tie). Mild: a quarter of the range toward that bound.
pub fn inject_fault(row: &SensorReading, spec: &FaultSpec, d: &Discretizer) -> Result<SensorReading, HarnessError> {
    let x = row
        .get(&spec.sensor)
        .ok_or_else(|| HarnessError::MissingColumn(spec.sensor.clone()))?;
    let b = d.get(&spec.sensor)?;
    let toward_upper = b.upper - x >= x - b.lower;
    let value = match (spec.severity, toward_upper) {
        (Severity::Severe, true) => b.upper,
        (Severity::Severe, false) => b.lower,
        (Severity::Mild, true) => x + MILD_SHIFT * b.range(),
        (Severity::Mild, false) => x - MILD_SHIFT * b.range(),
    };
    let mut out = row.clone();
    out.set(spec.sensor.clone(), value);
    Ok(out)
}

/// What to run over a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub criteria: Vec<DetectionCriterion>,
    pub severities: Vec<Severity>,
    pub declare: f64,
    /// Use at most this many test rows, drawn by `seed`.
    pub max_rows: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub row: usize,
    pub fault: Option<FaultSpec>,
    pub criterion: String,
    pub final_belief: FaultBelief,
    pub declared: BTreeSet<String>,
    pub trace: QualityTrace,
}

/// Row indices an experiment plan uses, ascending.
pub fn plan_rows(n_rows: usize, max_rows: Option<usize>, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n_rows).collect();
    if let Some(m) = max_rows.filter(|&m| m < n_rows) {
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        idx.truncate(m);
        idx.sort_unstable();
    }
    idx
}

/// One cycle on one (possibly faulted) row, with a frozen clock.
#[allow(clippy::too_many_arguments)]
pub fn run_single(
    net: &BayesNet,
    d: &Discretizer,
    iso: &IsolationNet,
    policy: SelectionPolicy<'_>,
    reading: &SensorReading,
    criterion: DetectionCriterion,
) -> Result<QualityTrace, HarnessError> {
    let steps = AnytimeSession::new(net, d, iso, reading, criterion, policy)
        .with_frozen_clock()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QualityTrace(steps))
}

/// For each selected row and criterion: a control run, then every sensor at every severity.
/// Cycles follow `tree` when given and on-line selection otherwise.
pub fn run_fault_experiments(
    net: &BayesNet,
    d: &Discretizer,
    iso: &IsolationNet,
    tree: Option<&DecisionTree>,
    test: &Dataset,
    plan: &ExperimentPlan,
) -> Result<Vec<ExperimentRecord>, HarnessError> {
    if !(plan.declare > 0.0 && plan.declare < 1.0) {
        return Err(HarnessError::OutOfRange { name: "declare threshold", value: plan.declare });
    }
    if !test.is_empty() {
        test.require(iso.sensors())?;
    }
    let mut jobs = Vec::new();
    for row in plan_rows(test.len(), plan.max_rows, plan.seed) {
        for &criterion in &plan.criteria {
            jobs.push((row, criterion, None));
            for sensor in iso.sensors() {
                for &severity in &plan.severities {
                    jobs.push((row, criterion, Some(FaultSpec { sensor: sensor.clone(), severity })));
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(row, criterion, fault)| {
            let clean = test.reading(row);
            let reading = match &fault {
                Some(spec) => inject_fault(&clean, spec, d)?,
                None => clean,
            };
            let policy = tree.map_or(SelectionPolicy::Entropy, SelectionPolicy::Tree);
            let trace = run_single(net, d, iso, policy, &reading, criterion)?;
            let final_belief = match trace.last() {
                Some(r) => r.pf.clone(),
                None => crate::isolation::fault_belief(iso, &Default::default())?,
            };
            let declared = declare_faults(&final_belief, plan.declare)?;
            Ok(ExperimentRecord { row, fault, criterion: criterion.label(), final_belief, declared, trace })
        })
        .collect()
}

/// Type I and II tallies for one criterion and severity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub criterion: String,
    pub severity: Severity,
    pub type1_count: usize,
    pub type1_total: usize,
    pub type2_count: usize,
    pub type2_total: usize,
}

impl ErrorRow {
    pub fn type1_rate(&self) -> f64 {
        rate(self.type1_count, self.type1_total)
    }

    pub fn type2_rate(&self) -> f64 {
        rate(self.type2_count, self.type2_total)
    }
}

fn rate(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn row(&self, criterion: &str, severity: Severity) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.criterion == criterion && r.severity == severity)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "severity", "type1_count", "type1_rate", "type2_count", "type2_rate"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.criterion.clone(),
                r.severity.to_string(),
                r.type1_count.to_string(),
                format!("{:.6}", r.type1_rate()),
                r.type2_count.to_string(),
                format!("{:.6}", r.type2_rate()),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Tallies one row per plan criterion and severity. A type I judgment is a
/// sensor that was not faulted, in fault runs and in control runs; control
/// runs count toward every severity row of their criterion.
pub fn evaluate_errors(records: &[ExperimentRecord], plan: &ExperimentPlan) -> ErrorReport {
    let mut rows = Vec::new();
    for criterion in &plan.criteria {
        let label = criterion.label();
        for &severity in &plan.severities {
            let mut row = ErrorRow {
                criterion: label.clone(),
                severity,
                type1_count: 0,
                type1_total: 0,
                type2_count: 0,
                type2_total: 0,
            };
            for rec in records.iter().filter(|r| r.criterion == label) {
                let n = rec.final_belief.len();
                match &rec.fault {
                    None => {
                        row.type1_total += n;
                        row.type1_count += rec.declared.len();
                    }
                    Some(spec) if spec.severity == severity => {
                        row.type1_total += n - 1;
                        row.type1_count += rec.declared.iter().filter(|s| **s != spec.sensor).count();
                        row.type2_total += 1;
                        row.type2_count += usize::from(!rec.declared.contains(&spec.sensor));
                    }
                    Some(_) => {}
                }
            }
            rows.push(row);
        }
    }
    ErrorReport { rows }
}

/// Mean quality per step under entropy-driven and random sensor selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyComparison {
    pub entropy: Vec<f64>,
    pub random: Vec<f64>,
}

impl PolicyComparison {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "mean_quality_entropy", "mean_quality_random"]).expect("in-memory write");
        for (k, (e, r)) in self.entropy.iter().zip(&self.random).enumerate() {
            w.write_record([(k + 1).to_string(), format!("{e:.6}"), format!("{r:.6}")])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn mean_profile(traces: &[QualityTrace], n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let sum: f64 = traces
                .iter()
                .map(|t| t.steps().get(k).or(t.last()).map_or(0.0, |r| r.quality))
                .sum();
            sum / traces.len() as f64
        })
        .collect()
}

/// Experiment `k` puts a severe fault on sensor `k mod n` in a seeded test
/// row and runs the same faulted row under both policies.
pub fn compare_selection_policies(
    net: &BayesNet,
    d: &Discretizer,
    iso: &IsolationNet,
    test: &Dataset,
    n_experiments: usize,
    criterion: DetectionCriterion,
    seed: u64,
) -> Result<PolicyComparison, HarnessError> {
    if n_experiments == 0 {
        return Err(HarnessError::Empty("experiment"));
    }
    if test.is_empty() {
        return Err(HarnessError::EmptyData);
    }
    test.require(iso.sensors())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(usize, String, u64)> = (0..n_experiments)
        .map(|k| {
            let sensor = iso.sensors()[k % iso.len()].clone();
            (rng.random_range(0..test.len()), sensor, rng.random())
        })
        .collect();
    let runs: Vec<(QualityTrace, QualityTrace)> = jobs
        .into_par_iter()
        .map(|(row, sensor, policy_seed)| {
            let spec = FaultSpec { sensor, severity: Severity::Severe };
            let reading = inject_fault(&test.reading(row), &spec, d)?;
            let entropy = run_single(net, d, iso, SelectionPolicy::Entropy, &reading, criterion)?;
            let random = SelectionPolicy::Random(ChaCha8Rng::seed_from_u64(policy_seed));
            let random = run_single(net, d, iso, random, &reading, criterion)?;
            Ok((entropy, random))
        })
        .collect::<Result<_, HarnessError>>()?;
    let (entropy, random): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    Ok(PolicyComparison {
        entropy: mean_profile(&entropy, iso.len()),
        random: mean_profile(&random, iso.len()),
    })
}
