//! The anytime validation loop.
//!
//! A cycle validates one sensor at a time, feeds each apparent status to the
//! isolation network and reports a normalized quality after every step, so a
//! caller may stop whenever it likes and still hold a usable [`FaultBelief`].
//! The next sensor is the one whose two possible outcomes leave the least
//! average entropy; the choice can be precompiled into a [`DecisionTree`].

use crate::detection::{validate_sensor, DetectionCriterion, DetectionError, SensorReading, Status};
use crate::isolation::{fault_belief, FaultBelief, FindingSet, IsolationError, IsolationNet};
use crate::model::{BayesNet, EmbTable};
use crate::detection::Discretizer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

/// Relative slack under which two entropy scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnytimeError {
    #[error(transparent)]
    Isolation(#[from] IsolationError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error("probability {0} is outside [0, 1]")]
    Domain(f64),
    #[error("belief covers no sensors")]
    EmptyBelief,
    #[error("sensor `{0}` has already been validated")]
    AlreadyObserved(String),
    #[error("no candidate sensors left")]
    NoCandidates,
    #[error("decision tree names `{0}`, which is unknown or already validated on this path")]
    TreeMismatch(String),
    #[error("malformed decision tree document: {0}")]
    Parse(String),
}

/// Binary entropy in bits, zero at both endpoints.
pub fn binary_entropy(p: f64) -> Result<f64, AnytimeError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AnytimeError::Domain(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

fn entropy_sum(pf: &FaultBelief) -> Result<f64, AnytimeError> {
    if pf.is_empty() {
        return Err(AnytimeError::EmptyBelief);
    }
    pf.values().map(binary_entropy).sum()
}

pub fn average_entropy(pf: &FaultBelief) -> Result<f64, AnytimeError> {
    Ok(entropy_sum(pf)? / pf.len() as f64)
}

/// `(n - ΣH) / n`: 0 when every sensor is at 0.5, 1 when every sensor is settled.
pub fn quality(pf: &FaultBelief) -> Result<f64, AnytimeError> {
    let n = pf.len() as f64;
    Ok((n - entropy_sum(pf)?) / n)
}

/// Sum of the average entropies left by each outcome of validating `x`.
pub fn conditional_average_entropy(
    iso: &IsolationNet,
    findings: &FindingSet,
    x: &str,
) -> Result<f64, AnytimeError> {
    if findings.contains(x) {
        return Err(AnytimeError::AlreadyObserved(x.to_string()));
    }
    let mut total = 0.0;
    for status in [Status::Correct, Status::Faulty] {
        total += average_entropy(&fault_belief(iso, &findings.with(x, status)?)?)?;
    }
    Ok(total)
}

/// Minimum score; near-ties resolve to the lexicographically first name.
pub fn argmin_lexicographic<'a>(scores: impl IntoIterator<Item = (&'a str, f64)>) -> Option<String> {
    let mut sorted: Vec<(&str, f64)> = scores.into_iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(b.0));
    let mut best: Option<(&str, f64)> = None;
    for (name, e) in sorted {
        best = match best {
            Some((_, b)) if e < b - TIE_TOLERANCE * b.abs() => Some((name, e)),
            None => Some((name, e)),
            keep => keep,
        };
    }
    best.map(|(n, _)| n.to_string())
}

pub fn select_next_sensor(
    iso: &IsolationNet,
    findings: &FindingSet,
    unvalidated: &BTreeSet<String>,
) -> Result<String, AnytimeError> {
    let mut scores = Vec::with_capacity(unvalidated.len());
    for x in unvalidated {
        scores.push((x.as_str(), conditional_average_entropy(iso, findings, x)?));
    }
    argmin_lexicographic(scores).ok_or(AnytimeError::NoCandidates)
}

/// One test in a [`DecisionTree`]; a missing child ends the cycle on that outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub sensor: String,
    pub faulty: Option<Box<TreeNode>>,
    pub ok: Option<Box<TreeNode>>,
}

impl TreeNode {
    pub fn leaf(sensor: impl Into<String>) -> Self {
        TreeNode { sensor: sensor.into(), faulty: None, ok: None }
    }

    pub fn child(&self, status: Status) -> Option<&TreeNode> {
        match status {
            Status::Faulty => self.faulty.as_deref(),
            Status::Correct => self.ok.as_deref(),
        }
    }

    fn count(&self) -> usize {
        1 + self.faulty.as_ref().map_or(0, |c| c.count()) + self.ok.as_ref().map_or(0, |c| c.count())
    }

    fn height(&self) -> usize {
        1 + self
            .faulty
            .as_ref()
            .map_or(0, |c| c.height())
            .max(self.ok.as_ref().map_or(0, |c| c.height()))
    }
}

/// Precompiled sensor-selection policy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionTree {
    pub root: TreeNode,
}

impl DecisionTree {
    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.root.height()
    }

    /// Sensor the tree asks for after the given outcome sequence, if the path continues.
    pub fn follow(&self, outcomes: &[Status]) -> Option<&TreeNode> {
        outcomes.iter().try_fold(&self.root, |node, s| node.child(*s))
    }

    /// Fails on a label outside `sensors` or a sensor repeated along a path.
    pub fn check_sensors(&self, sensors: &[String]) -> Result<(), AnytimeError> {
        fn walk<'a>(node: &'a TreeNode, sensors: &[String], path: &mut Vec<&'a str>) -> Result<(), AnytimeError> {
            if !sensors.contains(&node.sensor) || path.contains(&node.sensor.as_str()) {
                return Err(AnytimeError::TreeMismatch(node.sensor.clone()));
            }
            path.push(&node.sensor);
            for child in [&node.faulty, &node.ok].into_iter().flatten() {
                walk(child, sensors, path)?;
            }
            path.pop();
            Ok(())
        }
        walk(&self.root, sensors, &mut Vec::new())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }

    pub fn from_json(doc: &str) -> Result<Self, AnytimeError> {
        serde_json::from_str(doc).map_err(|e| AnytimeError::Parse(e.to_string()))
    }
}

fn compile_from(
    iso: &IsolationNet,
    findings: &FindingSet,
    remaining: &BTreeSet<String>,
    keep: &(dyn Fn(&FindingSet) -> bool + Sync),
) -> Result<TreeNode, AnytimeError> {
    let sensor = select_next_sensor(iso, findings, remaining)?;
    let mut rest = remaining.clone();
    rest.remove(&sensor);
    let branch = |status: Status| -> Result<Option<Box<TreeNode>>, AnytimeError> {
        let next = findings.with(&sensor, status)?;
        if rest.is_empty() || !keep(&next) {
            return Ok(None);
        }
        Ok(Some(Box::new(compile_from(iso, &next, &rest, keep)?)))
    };
    let (faulty, ok) = rayon::join(|| branch(Status::Faulty), || branch(Status::Correct));
    Ok(TreeNode { sensor, faulty: faulty?, ok: ok? })
}

/// Full tree: every outcome path visits every sensor, choosing as [`select_next_sensor`] would.
pub fn compile_decision_tree(iso: &IsolationNet) -> Result<DecisionTree, AnytimeError> {
    let all: BTreeSet<String> = iso.sensors().iter().cloned().collect();
    Ok(DecisionTree { root: compile_from(iso, &FindingSet::new(), &all, &|_| true)? })
}

/// Single-fault tree built directly, without materializing the full tree first.
pub fn compile_pruned_tree(iso: &IsolationNet) -> Result<DecisionTree, AnytimeError> {
    let all: BTreeSet<String> = iso.sensors().iter().cloned().collect();
    let emb = iso.emb();
    let keep = |f: &FindingSet| consistent_with_single_fault(emb, f);
    Ok(DecisionTree { root: compile_from(iso, &FindingSet::new(), &all, &keep)? })
}

/// True when the findings fit "no fault" or a lone fault in some sensor under perfect detection.
pub fn consistent_with_single_fault(emb: &EmbTable, findings: &FindingSet) -> bool {
    if findings.faulty().next().is_none() {
        return true;
    }
    emb.rows().values().any(|row| {
        findings.iter().all(|(s, st)| match st {
            Status::Faulty => row.contains(s),
            Status::Correct => !row.contains(s),
        })
    })
}

/// Cuts every branch whose outcomes no single-fault hypothesis explains.
pub fn prune_single_fault(tree: &DecisionTree, emb: &EmbTable) -> Result<DecisionTree, AnytimeError> {
    fn walk(node: &TreeNode, findings: &FindingSet, emb: &EmbTable) -> Result<TreeNode, AnytimeError> {
        let mut out = TreeNode::leaf(node.sensor.clone());
        for status in [Status::Faulty, Status::Correct] {
            let Some(child) = node.child(status) else { continue };
            let next = findings.with(&node.sensor, status)?;
            if consistent_with_single_fault(emb, &next) {
                let kept = Some(Box::new(walk(child, &next, emb)?));
                match status {
                    Status::Faulty => out.faulty = kept,
                    Status::Correct => out.ok = kept,
                }
            }
        }
        Ok(out)
    }
    Ok(DecisionTree { root: walk(&tree.root, &FindingSet::new(), emb)? })
}

/// How a session picks the next sensor.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SelectionPolicy<'a> {
    Tree(&'a DecisionTree),
    Entropy,
    Random(ChaCha8Rng),
}

/// One validated sensor and the state of knowledge right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub sensor: String,
    pub status: Status,
    pub pf: FaultBelief,
    pub quality: f64,
    pub elapsed_ms: f64,
}

impl StepRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Records of one cycle in step order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QualityTrace(pub Vec<StepRecord>);

impl QualityTrace {
    pub fn steps(&self) -> &[StepRecord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn qualities(&self) -> Vec<f64> {
        self.0.iter().map(|r| r.quality).collect()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.0.last()
    }

    pub fn findings(&self) -> FindingSet {
        self.0.iter().map(|r| (r.sensor.clone(), r.status)).collect()
    }
}

/// One validation cycle, yielding a [`StepRecord`] per validated sensor.
pub struct AnytimeSession<'a> {
    net: &'a BayesNet,
    d: &'a Discretizer,
    iso: &'a IsolationNet,
    reading: &'a SensorReading,
    criterion: DetectionCriterion,
    policy: SelectionPolicy<'a>,
    findings: FindingSet,
    remaining: BTreeSet<String>,
    cursor: Option<&'a TreeNode>,
    step: usize,
    done: bool,
    started: Option<Instant>,
}

impl<'a> AnytimeSession<'a> {
    pub fn new(
        net: &'a BayesNet,
        d: &'a Discretizer,
        iso: &'a IsolationNet,
        reading: &'a SensorReading,
        criterion: DetectionCriterion,
        policy: SelectionPolicy<'a>,
    ) -> Self {
        let cursor = match &policy {
            SelectionPolicy::Tree(t) => Some(&t.root),
            _ => None,
        };
        AnytimeSession {
            net,
            d,
            iso,
            reading,
            criterion,
            policy,
            findings: FindingSet::new(),
            remaining: iso.sensors().iter().cloned().collect(),
            cursor,
            step: 0,
            done: false,
            started: Some(Instant::now()),
        }
    }

    /// Reports `elapsed_ms = 0` on every step so traces are reproducible.
    pub fn with_frozen_clock(mut self) -> Self {
        self.started = None;
        self
    }

    pub fn findings(&self) -> &FindingSet {
        &self.findings
    }

    fn choose(&mut self) -> Result<Option<String>, AnytimeError> {
        if self.remaining.is_empty() {
            return Ok(None);
        }
        match &mut self.policy {
            SelectionPolicy::Tree(_) => {
                let Some(node) = self.cursor else { return Ok(None) };
                if !self.remaining.contains(&node.sensor) {
                    return Err(AnytimeError::TreeMismatch(node.sensor.clone()));
                }
                Ok(Some(node.sensor.clone()))
            }
            SelectionPolicy::Entropy => {
                Ok(Some(select_next_sensor(self.iso, &self.findings, &self.remaining)?))
            }
            SelectionPolicy::Random(rng) => {
                let k = rng.random_range(0..self.remaining.len());
                Ok(self.remaining.iter().nth(k).cloned())
            }
        }
    }

    fn advance(&mut self) -> Result<Option<StepRecord>, AnytimeError> {
        let Some(sensor) = self.choose()? else { return Ok(None) };
        let status = validate_sensor(self.net, self.d, self.reading, &sensor, self.criterion)?.status;
        self.findings.insert(sensor.clone(), status)?;
        self.remaining.remove(&sensor);
        if let Some(node) = self.cursor {
            self.cursor = node.child(status);
        }
        let pf = fault_belief(self.iso, &self.findings)?;
        let quality = quality(&pf)?;
        self.step += 1;
        Ok(Some(StepRecord {
            step: self.step,
            sensor,
            status,
            pf,
            quality,
            elapsed_ms: self.started.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3),
        }))
    }
}

impl Iterator for AnytimeSession<'_> {
    type Item = Result<StepRecord, AnytimeError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.advance();
        if !matches!(out, Ok(Some(_))) {
            self.done = true;
        }
        out.transpose()
    }
}

/// Runs a whole cycle, following `tree` when given and on-line selection otherwise.
pub fn run_anytime_validation(
    net: &BayesNet,
    d: &Discretizer,
    iso: &IsolationNet,
    tree: Option<&DecisionTree>,
    reading: &SensorReading,
    criterion: DetectionCriterion,
) -> Result<QualityTrace, AnytimeError> {
    let policy = tree.map_or(SelectionPolicy::Entropy, SelectionPolicy::Tree);
    AnytimeSession::new(net, d, iso, reading, criterion, policy)
        .collect::<Result<Vec<_>, _>>()
        .map(QualityTrace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isolation::{build_isolation_network, DEFAULT_LINK_STRENGTH, DEFAULT_PRIOR};
    use crate::model::{emb_table, reference_net};
    use std::collections::BTreeMap;

    fn reference_iso() -> IsolationNet {
        build_isolation_network(&emb_table(&reference_net()), DEFAULT_LINK_STRENGTH, DEFAULT_PRIOR).unwrap()
    }

    fn belief(ps: &[f64]) -> FaultBelief {
        ps.iter().enumerate().map(|(i, p)| (format!("s{i}"), *p)).collect()
    }

    fn isolated(names: &[&str]) -> IsolationNet {
        let rows: BTreeMap<String, BTreeSet<String>> = names
            .iter()
            .map(|n| (n.to_string(), [n.to_string()].into_iter().collect()))
            .collect();
        build_isolation_network(&EmbTable::new(rows).unwrap(), 0.99, 0.5).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let h = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!((binary_entropy(0.25).unwrap() - h).abs() < 1e-15);
        assert!((h - 0.811_278_124_459_132_9).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.5), Err(AnytimeError::Domain(_))));
    }

    #[test]
    fn averages_and_quality() {
        assert_eq!(average_entropy(&belief(&[0.5, 0.5])).unwrap(), 1.0);
        let two = average_entropy(&belief(&[0.5, 0.25])).unwrap();
        assert!((two - 0.905_639_062_229_566_4).abs() < 1e-12);
        assert_eq!(quality(&belief(&[0.5; 4])).unwrap(), 0.0);
        assert_eq!(quality(&belief(&[0.0, 1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(average_entropy(&FaultBelief::default()), Err(AnytimeError::EmptyBelief));
    }

    #[test]
    fn lone_sensor_resolves_either_way() {
        let iso = isolated(&["x"]);
        let e = conditional_average_entropy(&iso, &FindingSet::new(), "x").unwrap();
        let h = binary_entropy(0.5 * 0.01 / (0.5 + 0.5 * 0.01)).unwrap();
        assert!((e - h).abs() < 1e-12);
        assert!(e < 0.1);
    }

    #[test]
    fn observed_candidate_rejected() {
        let iso = reference_iso();
        let f: FindingSet = [("t", Status::Faulty)].into_iter().collect();
        assert_eq!(
            conditional_average_entropy(&iso, &f, "t"),
            Err(AnytimeError::AlreadyObserved("t".into()))
        );
        assert_eq!(
            select_next_sensor(&iso, &f, &BTreeSet::new()),
            Err(AnytimeError::NoCandidates)
        );
    }

    #[test]
    fn ties_go_to_first_name() {
        let iso = isolated(&["b", "a"]);
        let all: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(select_next_sensor(&iso, &FindingSet::new(), &all).unwrap(), "a");
        assert_eq!(argmin_lexicographic([("z", 1.0), ("y", 1.0 + 1e-15), ("x", 2.0)]).as_deref(), Some("y"));
    }

    #[test]
    fn two_independent_sensors_make_three_nodes() {
        let tree = compile_decision_tree(&isolated(&["a", "b"])).unwrap();
        assert_eq!(tree.node_count(), 3);
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.root.faulty.as_ref().unwrap().sensor, "b");
        assert_eq!(tree.root.ok.as_ref().unwrap().sensor, "b");
        assert_eq!(compile_decision_tree(&isolated(&["a"])).unwrap().node_count(), 1);
    }

    #[test]
    fn single_fault_consistency() {
        let emb = emb_table(&reference_net());
        let f = |pairs: &[(&str, Status)]| pairs.iter().map(|(s, st)| (*s, *st)).collect::<FindingSet>();
        assert!(consistent_with_single_fault(&emb, &f(&[("m", Status::Correct), ("a", Status::Correct)])));
        assert!(consistent_with_single_fault(&emb, &f(&[("g", Status::Faulty), ("t", Status::Faulty)])));
        // EMB(p) and EMB(g) share nothing, so no lone fault covers both.
        assert!(!consistent_with_single_fault(&emb, &f(&[("p", Status::Faulty), ("g", Status::Faulty)])));
        assert!(!consistent_with_single_fault(&emb, &f(&[("g", Status::Faulty), ("t", Status::Correct)])));
    }

    #[test]
    fn pruning_matches_direct_compilation() {
        let iso = reference_iso();
        let full = compile_decision_tree(&iso).unwrap();
        assert_eq!(full.node_count(), 31);
        let pruned = prune_single_fault(&full, iso.emb()).unwrap();
        assert_eq!(pruned, compile_pruned_tree(&iso).unwrap());
        assert!(pruned.node_count() <= 30);
    }

    #[test]
    fn tree_json_round_trip() {
        let tree = compile_pruned_tree(&reference_iso()).unwrap();
        let doc = tree.to_json();
        assert!(doc.contains("\"sensor\""));
        assert_eq!(DecisionTree::from_json(&doc).unwrap(), tree);
        assert!(matches!(DecisionTree::from_json("{"), Err(AnytimeError::Parse(_))));
    }

    #[test]
    fn follow_walks_outcomes() {
        let tree = compile_decision_tree(&reference_iso()).unwrap();
        assert_eq!(tree.follow(&[]).unwrap().sensor, tree.root.sensor);
        let five = [Status::Correct; 5];
        assert!(tree.follow(&five[..4]).is_some());
        assert!(tree.follow(&five).is_none());
    }
}
