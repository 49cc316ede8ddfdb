//! Exact posterior marginals over discrete Bayesian networks.
//!
//! [`posterior_marginal`] runs variable elimination with a greedy min-fill
//! order (ties broken by variable name) over the ancestors of the query and
//! evidence. [`brute_force_posterior`] enumerates the full joint in log space
//! and exists as an independent check of the eliminator.
//!
//! Noisy-OR tables are kept parametric in [`NoisyOrParams`] and expanded on
//! demand by [`expand_noisy_or`].

use crate::model::{BayesNet, ModelError};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Upper bound on the number of joint assignments the enumeration oracle visits.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InferenceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("variable `{var}` has no state `{state}`")]
    UnknownState { var: String, state: String },
    #[error("query variable `{0}` is part of the evidence")]
    TargetObserved(String),
    #[error("evidence has zero probability under the model")]
    InconsistentEvidence,
    #[error("joint has {assignments} assignments, enumeration limit is {limit}")]
    TooLarge { assignments: u128, limit: u128 },
    #[error("no assignment given for cause `{cause}` of `{effect}`")]
    MissingParent { effect: String, cause: String },
    #[error("link strength {value} for {cause} -> {effect} is outside [0, 1]")]
    InvalidStrength {
        cause: String,
        effect: String,
        value: f64,
    },
}

/// Observed states keyed by variable name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, state: impl Into<String>) -> Self {
        self.insert(var, state);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, state: impl Into<String>) {
        self.0.insert(var.into(), state.into());
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
        self.0.iter()
    }

    /// Resolves names and labels to `(variable, state)` indices.
    pub fn resolve(&self, net: &BayesNet) -> Result<Vec<(usize, usize)>, InferenceError> {
        self.0
            .iter()
            .map(|(var, state)| {
                let v = net.index_of(var)?;
                let s = net.variable(v).state_index(state).ok_or_else(|| {
                    InferenceError::UnknownState {
                        var: var.clone(),
                        state: state.clone(),
                    }
                })?;
                Ok((v, s))
            })
            .collect()
    }
}

/// A marginal distribution over one variable's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub variable: String,
    pub probabilities: Vec<f64>,
}

impl Distribution {
    pub fn probability(&self, state: usize) -> f64 {
        self.probabilities[state]
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// A non-negative table over a set of discrete variables.
///
/// Values are stored row-major: the first variable in `vars` varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(vars.len(), cards.len());
        assert_eq!(cards.iter().product::<usize>(), values.len());
        Factor { vars, cards, values }
    }

    pub fn unit() -> Self {
        Factor {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![1.0],
        }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.vars.len()];
        for k in (0..self.vars.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.cards[k + 1];
        }
        strides
    }

    /// Fixes `var` to `state` and drops it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let outer = self.values.len() / (self.cards[pos] * strides[pos]);
        let mut values = Vec::with_capacity(self.values.len() / self.cards[pos]);
        for o in 0..outer {
            let base = o * self.cards[pos] * strides[pos] + state * strides[pos];
            values.extend_from_slice(&self.values[base..base + strides[pos]]);
        }
        Factor { vars, cards, values }
    }

    /// Sums `var` out of the factor.
    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let inner = strides[pos];
        let card = self.cards[pos];
        let outer = self.values.len() / (card * inner);
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = o * card * inner + s * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[base + i];
                }
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor { vars, cards, values }
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (&v, &c) in other.vars.iter().zip(&other.cards) {
            if !vars.contains(&v) {
                vars.push(v);
                cards.push(c);
            }
        }
        let total: usize = cards.iter().product();
        // Stride of each result variable inside each operand (0 when absent).
        let map_strides = |f: &Factor| -> Vec<usize> {
            let s = f.strides();
            vars.iter()
                .map(|v| f.vars.iter().position(|w| w == v).map_or(0, |p| s[p]))
                .collect()
        };
        let sa = map_strides(self);
        let sb = map_strides(other);
        let mut values = Vec::with_capacity(total);
        let mut counter = vec![0usize; vars.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..total {
            values.push(self.values[ia] * other.values[ib]);
            for k in (0..vars.len()).rev() {
                counter[k] += 1;
                ia += sa[k];
                ib += sb[k];
                if counter[k] < cards[k] {
                    break;
                }
                ia -= sa[k] * cards[k];
                ib -= sb[k] * cards[k];
                counter[k] = 0;
            }
        }
        Factor { vars, cards, values }
    }
}

/// Eliminates every variable except `target` and returns its normalized marginal.
///
/// `names` supplies the lexicographic tie-break for the min-fill heuristic.
pub fn marginal_from_factors(
    factors: Vec<Factor>,
    target: usize,
    target_card: usize,
    names: &[String],
) -> Result<Vec<f64>, InferenceError> {
    let mut factors = factors;
    let mut remaining: BTreeSet<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
    remaining.remove(&target);

    while !remaining.is_empty() {
        let var = next_by_min_fill(&factors, &remaining, names);
        remaining.remove(&var);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        let merged = touching
            .iter()
            .fold(Factor::unit(), |acc, f| acc.product(f))
            .sum_out(var);
        factors.push(merged);
    }

    let mut result = vec![1.0; target_card];
    for f in &factors {
        match f.vars.as_slice() {
            [] => result.iter_mut().for_each(|r| *r *= f.values[0]),
            [v] if *v == target => result
                .iter_mut()
                .zip(&f.values)
                .for_each(|(r, x)| *r *= x),
            _ => unreachable!("only the target survives elimination"),
        }
    }
    normalize(result)
}

fn normalize(mut p: Vec<f64>) -> Result<Vec<f64>, InferenceError> {
    let z: f64 = p.iter().sum();
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
    if !(z > 0.0) || !z.is_finite() {
        return Err(InferenceError::InconsistentEvidence);
    }
    p.iter_mut().for_each(|x| *x /= z);
    Ok(p)
}

fn next_by_min_fill(factors: &[Factor], candidates: &BTreeSet<usize>, names: &[String]) -> usize {
    let neighbours = |v: usize| -> BTreeSet<usize> {
        factors
            .iter()
            .filter(|f| f.vars.contains(&v))
            .flat_map(|f| f.vars.iter().copied())
            .filter(|&w| w != v)
            .collect()
    };
    let adjacent = |a: usize, b: usize| factors.iter().any(|f| f.vars.contains(&a) && f.vars.contains(&b));

    let mut best: Option<(usize, usize)> = None;
    for &v in candidates {
        let nb: Vec<usize> = neighbours(v).into_iter().collect();
        let mut fill = 0;
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                if !adjacent(nb[i], nb[j]) {
                    fill += 1;
                }
            }
        }
        best = match best {
            None => Some((v, fill)),
            Some((b, bf)) if fill < bf || (fill == bf && names[v] < names[b]) => Some((v, fill)),
            keep => keep,
        };
    }
    best.expect("candidate set is not empty").0
}

/// Exact `P(target | evidence)` by variable elimination.
pub fn posterior_marginal(
    net: &BayesNet,
    evidence: &Evidence,
    target: &str,
) -> Result<Distribution, InferenceError> {
    let t = net.index_of(target)?;
    if evidence.contains(target) {
        return Err(InferenceError::TargetObserved(target.to_string()));
    }
    let observed = evidence.resolve(net)?;
    Ok(Distribution {
        variable: target.to_string(),
        probabilities: posterior_by_index(net, &observed, t)?,
    })
}

/// Index-level form of [`posterior_marginal`]; `observed` holds `(variable, state)` pairs.
pub fn posterior_by_index(
    net: &BayesNet,
    observed: &[(usize, usize)],
    target: usize,
) -> Result<Vec<f64>, InferenceError> {
    if observed.iter().any(|&(v, _)| v == target) {
        return Err(InferenceError::TargetObserved(net.variable(target).name.clone()));
    }
    // Only ancestors of the query and evidence carry information; the rest are barren.
    let dag = net.dag();
    let mut keep = vec![false; net.len()];
    let mut stack: Vec<usize> = observed.iter().map(|&(v, _)| v).chain([target]).collect();
    while let Some(v) = stack.pop() {
        if !keep[v] {
            keep[v] = true;
            stack.extend(dag.parents_of(v).iter().copied());
        }
    }

    let mut factors = Vec::new();
    for v in (0..net.len()).filter(|&v| keep[v]) {
        let mut f = cpt_factor(net, v);
        for &(ov, os) in observed {
            f = f.reduce(ov, os);
        }
        factors.push(f);
    }
    let names = dag.names();
    marginal_from_factors(factors, target, net.variable(target).cardinality(), names)
}

/// The CPT of `v` as a factor over `(parents..., v)`.
pub fn cpt_factor(net: &BayesNet, v: usize) -> Factor {
    let mut vars: Vec<usize> = net.cpt_parents(v).to_vec();
    vars.push(v);
    let cards = vars.iter().map(|&w| net.variable(w).cardinality()).collect();
    let values = net.cpt(v).table.iter().flatten().copied().collect();
    Factor::new(vars, cards, values)
}

/// `P(target | evidence)` by enumerating the full joint distribution.
pub fn brute_force_posterior(
    net: &BayesNet,
    evidence: &Evidence,
    target: &str,
) -> Result<Distribution, InferenceError> {
    let t = net.index_of(target)?;
    if evidence.contains(target) {
        return Err(InferenceError::TargetObserved(target.to_string()));
    }
    let observed = evidence.resolve(net)?;
    let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
    let assignments: u128 = cards.iter().map(|&c| c as u128).product();
    if assignments > BRUTE_FORCE_LIMIT {
        return Err(InferenceError::TooLarge {
            assignments,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut fixed: Vec<Option<usize>> = vec![None; net.len()];
    for &(v, s) in &observed {
        fixed[v] = Some(s);
    }
    let free: Vec<usize> = (0..net.len()).filter(|&v| fixed[v].is_none()).collect();
    let mut state: Vec<usize> = fixed.iter().map(|s| s.unwrap_or(0)).collect();
    let mut log_mass = vec![f64::NEG_INFINITY; cards[t]];
    let mut parent_states = Vec::new();

    loop {
        let mut logp = 0.0;
        for v in 0..net.len() {
            parent_states.clear();
            parent_states.extend(net.cpt_parents(v).iter().map(|&p| state[p]));
            let p = net.cpt(v).table[net.row_index(v, &parent_states)][state[v]];
            logp += p.ln();
            if logp == f64::NEG_INFINITY {
                break;
            }
        }
        log_mass[state[t]] = log_add_exp(log_mass[state[t]], logp);

        // Advance the mixed-radix counter over free variables.
        let mut k = free.len();
        loop {
            if k == 0 {
                return finish_log(target, log_mass);
            }
            k -= 1;
            let v = free[k];
            state[v] += 1;
            if state[v] < cards[v] {
                break;
            }
            state[v] = 0;
        }
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn finish_log(target: &str, log_mass: Vec<f64>) -> Result<Distribution, InferenceError> {
    let m = log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(InferenceError::InconsistentEvidence);
    }
    let probabilities = normalize(log_mass.iter().map(|l| (l - m).exp()).collect())?;
    Ok(Distribution {
        variable: target.to_string(),
        probabilities,
    })
}

/// Link strengths `c_ij = P(effect j | cause i alone)` of a noisy-OR model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoisyOrParams {
    links: BTreeMap<String, BTreeMap<String, f64>>,
}

impl NoisyOrParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, cause: &str, effect: &str, strength: f64) -> Result<(), InferenceError> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(InferenceError::InvalidStrength {
                cause: cause.to_string(),
                effect: effect.to_string(),
                value: strength,
            });
        }
        self.links
            .entry(effect.to_string())
            .or_default()
            .insert(cause.to_string(), strength);
        Ok(())
    }

    pub fn strength(&self, cause: &str, effect: &str) -> Option<f64> {
        self.links.get(effect)?.get(cause).copied()
    }

    /// Inhibitor `q_ij = 1 - c_ij`.
    pub fn inhibitor(&self, cause: &str, effect: &str) -> Option<f64> {
        self.strength(cause, effect).map(|c| 1.0 - c)
    }

    /// Causes linked to `effect`, sorted by name.
    pub fn causes_of(&self, effect: &str) -> Vec<String> {
        self.links
            .get(effect)
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default()
    }

    pub fn effects(&self) -> impl Iterator<Item = &String> {
        self.links.keys()
    }
}

/// `P(effect = true | causes)`: one minus the product of inhibitors of the active causes.
pub fn noisy_or_row(
    params: &NoisyOrParams,
    effect: &str,
    active: &BTreeMap<String, bool>,
) -> Result<f64, InferenceError> {
    let mut inhibited = 1.0;
    for cause in params.causes_of(effect) {
        let on = *active.get(&cause).ok_or_else(|| InferenceError::MissingParent {
            effect: effect.to_string(),
            cause: cause.clone(),
        })?;
        if on {
            inhibited *= params.inhibitor(&cause, effect).expect("linked cause");
        }
    }
    Ok(1.0 - inhibited)
}

/// Expands the noisy-OR table of `effect`.
///
/// Returns the causes in table order and rows over `(false, true)` cause
/// states, first cause slowest; columns are `[P(¬effect), P(effect)]`.
pub fn expand_noisy_or(params: &NoisyOrParams, effect: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let causes = params.causes_of(effect);
    let inhibitors: Vec<f64> = causes
        .iter()
        .map(|c| params.inhibitor(c, effect).expect("linked cause"))
        .collect();
    let rows = noisy_or_values(&inhibitors)
        .chunks(2)
        .map(|r| r.to_vec())
        .collect();
    (causes, rows)
}

/// Flat noisy-OR table for the given inhibitors, shaped `(cause_1, ..., cause_k, effect)`.
pub(crate) fn noisy_or_values(inhibitors: &[f64]) -> Vec<f64> {
    let k = inhibitors.len();
    let mut values = Vec::with_capacity(2 << k);
    for row in 0..(1usize << k) {
        let mut off = 1.0;
        for (bit, q) in inhibitors.iter().enumerate() {
            if row >> (k - 1 - bit) & 1 == 1 {
                off *= q;
            }
        }
        values.push(off);
        values.push(1.0 - off);
    }
    values
}
