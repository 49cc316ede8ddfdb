//! Discrete Bayesian networks, Markov blankets and the network file format.
//!
//! A [`BayesNet`] is a DAG over discrete [`Variable`]s with one dense [`Cpt`]
//! per variable. Table rows are parent assignments in mixed-radix order with
//! the first-listed parent varying slowest; columns follow the child's
//! declared state order.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

/// Tolerance on the sum of every conditional table row.
pub const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` needs at least two states")]
    TooFewStates(String),
    #[error("variable `{var}` lists state `{state}` twice")]
    DuplicateState { var: String, state: String },
    #[error("self loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("edge list contains a directed cycle through `{0}`")]
    Cycle(String),
    #[error("missing conditional table for `{0}`")]
    MissingCpt(String),
    #[error("conditional table given for unknown variable `{0}`")]
    OrphanCpt(String),
    #[error("table for `{child}` lists parents {found:?} but the graph has {expected:?}")]
    ParentMismatch {
        child: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("table for `{child}` has {found} rows, expected {expected}")]
    RowCount {
        child: String,
        expected: usize,
        found: usize,
    },
    #[error("row {row} of `{child}` has {found} entries, expected {expected}")]
    RowWidth {
        child: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} of `{child}` sums to {sum}, expected 1")]
    NotNormalized { child: String, row: usize, sum: f64 },
    #[error("row {row} of `{child}` has an entry outside [0, 1]")]
    OutOfRange { child: String, row: usize },
    #[error("malformed document: {0}")]
    Parse(String),
}

/// A discrete variable with explicitly enumerated states.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, states: &[&str]) -> Self {
        Variable {
            name: name.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Conditional probability table `P(child | parents)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub child: String,
    pub parents: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

/// Directed acyclic graph over named nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    edges: Vec<(String, String)>,
    topo: Vec<usize>,
}

impl Dag {
    pub fn new(names: Vec<String>, edges: Vec<(String, String)>) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable(n.clone()));
            }
        }
        let mut parents = vec![Vec::new(); names.len()];
        let mut children = vec![Vec::new(); names.len()];
        let mut seen = BTreeSet::new();
        for (p, c) in &edges {
            let pi = *index
                .get(p)
                .ok_or_else(|| ModelError::UnknownVariable(p.clone()))?;
            let ci = *index
                .get(c)
                .ok_or_else(|| ModelError::UnknownVariable(c.clone()))?;
            if pi == ci {
                return Err(ModelError::SelfLoop(p.clone()));
            }
            if !seen.insert((pi, ci)) {
                return Err(ModelError::DuplicateEdge(p.clone(), c.clone()));
            }
            parents[ci].push(pi);
            children[pi].push(ci);
        }

        // Kahn's algorithm; leftover nodes sit on a cycle.
        let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..names.len()).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(names.len());
        while let Some(v) = queue.pop_front() {
            topo.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if topo.len() != names.len() {
            let stuck = (0..names.len())
                .filter(|&i| indegree[i] > 0)
                .map(|i| names[i].clone())
                .min()
                .unwrap_or_default();
            return Err(ModelError::Cycle(stuck));
        }

        Ok(Dag {
            names,
            index,
            parents,
            children,
            edges,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn parents_of(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children_of(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Node indices in a topological order (parents before children).
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Parents, children and co-parents of `name`, excluding `name` itself.
    pub fn markov_blanket(&self, name: &str) -> Result<BTreeSet<String>, ModelError> {
        let v = self.index_of(name)?;
        Ok(self
            .blanket_indices(v)
            .into_iter()
            .map(|i| self.names[i].clone())
            .collect())
    }

    pub(crate) fn blanket_indices(&self, v: usize) -> BTreeSet<usize> {
        let mut mb: BTreeSet<usize> = self.parents[v].iter().copied().collect();
        for &c in &self.children[v] {
            mb.insert(c);
            mb.extend(self.parents[c].iter().copied());
        }
        mb.remove(&v);
        mb
    }
}

/// Graph-only description of a network, used as the input to parameter learning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub variables: Vec<String>,
    pub edges: Vec<(String, String)>,
}

impl Structure {
    pub fn dag(&self) -> Result<Dag, ModelError> {
        Dag::new(self.variables.clone(), self.edges.clone())
    }

    pub fn from_json(doc: &str) -> Result<Self, ModelError> {
        let s: Structure = serde_json::from_str(doc).map_err(|e| ModelError::Parse(e.to_string()))?;
        s.dag()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure serializes")
    }
}

/// A validated discrete Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    dag: Dag,
    /// Parent indices in the order the CPT lists them.
    cpt_parents: Vec<Vec<usize>>,
}

impl BayesNet {
    pub fn new(
        variables: Vec<Variable>,
        edges: Vec<(String, String)>,
        cpts: Vec<Cpt>,
    ) -> Result<Self, ModelError> {
        for v in &variables {
            if v.states.len() < 2 {
                return Err(ModelError::TooFewStates(v.name.clone()));
            }
            let mut seen = BTreeSet::new();
            for s in &v.states {
                if !seen.insert(s) {
                    return Err(ModelError::DuplicateState {
                        var: v.name.clone(),
                        state: s.clone(),
                    });
                }
            }
        }
        let dag = Dag::new(variables.iter().map(|v| v.name.clone()).collect(), edges)?;

        let mut by_child: HashMap<String, Cpt> = HashMap::with_capacity(cpts.len());
        for cpt in cpts {
            if !dag.index.contains_key(&cpt.child) {
                return Err(ModelError::OrphanCpt(cpt.child));
            }
            by_child.insert(cpt.child.clone(), cpt);
        }

        let mut ordered = Vec::with_capacity(variables.len());
        let mut cpt_parents = Vec::with_capacity(variables.len());
        for (i, var) in variables.iter().enumerate() {
            let cpt = by_child
                .remove(&var.name)
                .ok_or_else(|| ModelError::MissingCpt(var.name.clone()))?;
            let mut expected: Vec<String> = dag.parents[i].iter().map(|&p| dag.names[p].clone()).collect();
            let mut found = cpt.parents.clone();
            expected.sort();
            found.sort();
            if expected != found || cpt.parents.len() != dag.parents[i].len() {
                return Err(ModelError::ParentMismatch {
                    child: var.name.clone(),
                    expected,
                    found: cpt.parents.clone(),
                });
            }
            let parent_idx: Vec<usize> = cpt
                .parents
                .iter()
                .map(|p| dag.index[p])
                .collect();
            let rows: usize = parent_idx.iter().map(|&p| variables[p].cardinality()).product();
            check_table(&cpt, rows, var.cardinality())?;
            ordered.push(cpt);
            cpt_parents.push(parent_idx);
        }

        Ok(BayesNet {
            variables,
            cpts: ordered,
            dag,
            cpt_parents,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &Variable {
        &self.variables[i]
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn edges(&self) -> &[(String, String)] {
        self.dag.edges()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ModelError> {
        self.dag.index_of(name)
    }

    /// CPT of variable `i`, aligned with [`BayesNet::variables`].
    pub fn cpt(&self, i: usize) -> &Cpt {
        &self.cpts[i]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    /// Parent indices of `i` in the order its CPT declares them.
    pub fn cpt_parents(&self, i: usize) -> &[usize] {
        &self.cpt_parents[i]
    }

    /// Row index of a parent assignment (first parent varies slowest).
    pub fn row_index(&self, i: usize, parent_states: &[usize]) -> usize {
        let mut row = 0;
        for (&p, &s) in self.cpt_parents[i].iter().zip(parent_states) {
            row = row * self.variables[p].cardinality() + s;
        }
        row
    }

    pub fn markov_blanket(&self, name: &str) -> Result<BTreeSet<String>, ModelError> {
        self.dag.markov_blanket(name)
    }
}

fn check_table(cpt: &Cpt, rows: usize, width: usize) -> Result<(), ModelError> {
    if cpt.table.len() != rows {
        return Err(ModelError::RowCount {
            child: cpt.child.clone(),
            expected: rows,
            found: cpt.table.len(),
        });
    }
    for (r, row) in cpt.table.iter().enumerate() {
        if row.len() != width {
            return Err(ModelError::RowWidth {
                child: cpt.child.clone(),
                row: r,
                expected: width,
                found: row.len(),
            });
        }
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ModelError::OutOfRange {
                child: cpt.child.clone(),
                row: r,
            });
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(ModelError::NotNormalized {
                child: cpt.child.clone(),
                row: r,
                sum,
            });
        }
    }
    Ok(())
}

/// Parents, children and co-parents of `v`, excluding `v`.
pub fn markov_blanket(net: &BayesNet, v: &str) -> Result<BTreeSet<String>, ModelError> {
    net.markov_blanket(v)
}

/// The Markov blanket of `v` together with `v` itself.
pub fn extended_markov_blanket(net: &BayesNet, v: &str) -> Result<BTreeSet<String>, ModelError> {
    let mut emb = net.markov_blanket(v)?;
    emb.insert(v.to_string());
    Ok(emb)
}

/// Per-sensor extended Markov blankets.
///
/// Every sensor belongs to its own row and membership is symmetric:
/// `t ∈ EMB(s)` exactly when `s ∈ EMB(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbTable(BTreeMap<String, BTreeSet<String>>);

impl EmbTable {
    pub fn new(rows: BTreeMap<String, BTreeSet<String>>) -> Result<Self, ModelError> {
        for (s, row) in &rows {
            if !row.contains(s) {
                return Err(ModelError::Parse(format!("EMB of `{s}` does not contain itself")));
            }
            for t in row {
                let back = rows
                    .get(t)
                    .ok_or_else(|| ModelError::UnknownVariable(t.clone()))?;
                if !back.contains(s) {
                    return Err(ModelError::Parse(format!(
                        "EMB table is asymmetric: `{t}` in EMB(`{s}`) but not the reverse"
                    )));
                }
            }
        }
        Ok(EmbTable(rows))
    }

    pub fn from_dag(dag: &Dag) -> Self {
        let rows = dag
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let mut row: BTreeSet<String> = dag
                    .blanket_indices(i)
                    .into_iter()
                    .map(|j| dag.names()[j].clone())
                    .collect();
                row.insert(name.clone());
                (name.clone(), row)
            })
            .collect();
        EmbTable(rows)
    }

    pub fn sensors(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, sensor: &str) -> Option<&BTreeSet<String>> {
        self.0.get(sensor)
    }

    pub fn rows(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.0
    }
}

/// Extended Markov blanket of every variable in `net`.
pub fn emb_table(net: &BayesNet) -> EmbTable {
    EmbTable::from_dag(net.dag())
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    variables: Vec<Variable>,
    edges: Vec<(String, String)>,
    cpts: BTreeMap<String, CptDoc>,
}

#[derive(Serialize, Deserialize)]
struct CptDoc {
    parents: Vec<String>,
    table: Vec<Vec<f64>>,
}

/// Parses and validates a JSON network document.
pub fn load_network(document: &str) -> Result<BayesNet, ModelError> {
    let doc: NetworkDoc =
        serde_json::from_str(document).map_err(|e| ModelError::Parse(e.to_string()))?;
    let cpts = doc
        .cpts
        .into_iter()
        .map(|(child, c)| Cpt {
            child,
            parents: c.parents,
            table: c.table,
        })
        .collect();
    BayesNet::new(doc.variables, doc.edges, cpts)
}

pub fn save_network(net: &BayesNet) -> String {
    let doc = NetworkDoc {
        variables: net.variables.clone(),
        edges: net.edges().to_vec(),
        cpts: net
            .cpts
            .iter()
            .map(|c| {
                (
                    c.child.clone(),
                    CptDoc {
                        parents: c.parents.clone(),
                        table: c.table.clone(),
                    },
                )
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("network serializes")
}

/// The five-sensor gas-turbine example: `m → t`, `m → p`, `t → g`, `t → a`,
/// with binary variables and hand-set tables.
pub fn reference_net() -> BayesNet {
    let binary = ["low", "high"];
    let vars = ["m", "t", "p", "g", "a"]
        .iter()
        .map(|n| Variable::new(*n, &binary))
        .collect();
    let edges = reference_edges();
    let follow = |child: &str, parent: &str, keep: f64| Cpt {
        child: child.into(),
        parents: vec![parent.into()],
        table: vec![vec![keep, 1.0 - keep], vec![1.0 - keep, keep]],
    };
    let cpts = vec![
        Cpt {
            child: "m".into(),
            parents: vec![],
            table: vec![vec![0.4, 0.6]],
        },
        follow("t", "m", 0.9),
        follow("p", "m", 0.8),
        follow("g", "t", 0.85),
        follow("a", "t", 0.75),
    ];
    BayesNet::new(vars, edges, cpts).expect("reference net is valid")
}

pub fn reference_edges() -> Vec<(String, String)> {
    [("m", "t"), ("m", "p"), ("t", "g"), ("t", "a")]
        .iter()
        .map(|(p, c)| (p.to_string(), c.to_string()))
        .collect()
}
