#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensorval::inference::Evidence;
use sensorval::model::{BayesNet, Cpt, Dag, EmbTable, Variable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i:02}")).collect()
}

/// Random DAG over `n` nodes: each forward pair `i < j` is an edge with probability `density`,
/// with at most `max_parents` parents per node. Node order is shuffled so names carry no order.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, density: f64, max_parents: usize) -> (Vec<String>, Vec<(String, String)>) {
    let mut order = names(n);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut edges = Vec::new();
    for j in 1..n {
        let mut parents = 0;
        for i in 0..j {
            if parents < max_parents && rng.random_bool(density) {
                edges.push((order[i].clone(), order[j].clone()));
                parents += 1;
            }
        }
    }
    (names(n), edges)
}

fn random_row(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

/// Random network with the given cardinality per variable.
pub fn random_net(rng: &mut ChaCha8Rng, n: usize, card: usize, density: f64, max_parents: usize) -> BayesNet {
    let (vars, edges) = random_dag(rng, n, density, max_parents);
    let states: Vec<String> = (0..card).map(|k| format!("s{k}")).collect();
    let refs: Vec<&str> = states.iter().map(String::as_str).collect();
    let variables: Vec<Variable> = vars.iter().map(|v| Variable::new(v.clone(), &refs)).collect();
    let cpts = vars
        .iter()
        .map(|v| {
            let parents: Vec<String> = edges.iter().filter(|(_, c)| c == v).map(|(p, _)| p.clone()).collect();
            let rows = card.pow(parents.len() as u32);
            Cpt { child: v.clone(), parents, table: (0..rows).map(|_| random_row(rng, card)).collect() }
        })
        .collect();
    BayesNet::new(variables, edges, cpts).expect("random net is valid")
}

/// Random evidence on up to `k` variables other than `exclude`.
pub fn random_evidence(rng: &mut ChaCha8Rng, net: &BayesNet, k: usize, exclude: &str) -> Evidence {
    let mut ev = Evidence::new();
    for _ in 0..k {
        let v = net.variable(rng.random_range(0..net.len()));
        if v.name != exclude && !ev.contains(&v.name) {
            ev.insert(v.name.clone(), v.states[rng.random_range(0..v.cardinality())].clone());
        }
    }
    ev
}

pub fn random_emb(rng: &mut ChaCha8Rng, n: usize) -> EmbTable {
    let (vars, edges) = random_dag(rng, n, 0.3, 3);
    EmbTable::from_dag(&Dag::new(vars, edges).expect("acyclic"))
}
