//! Anytime probabilistic sensor validation.
//!
//! A sensor is validated by predicting its value from its Markov blanket in a
//! Bayesian network of the plant. Apparent faults found this way are passed to
//! a noisy-OR isolation network that tracks the probability of a real fault in
//! every sensor. Sensors are processed in the order that reduces uncertainty
//! fastest, and a usable answer is available after every step.
//!
//! ```
//! use sensorval::isolation::{build_isolation_network, fault_belief, FindingSet};
//! use sensorval::detection::Status;
//! use sensorval::model::{emb_table, reference_net};
//!
//! let iso = build_isolation_network(&emb_table(&reference_net()), 0.99, 0.5).unwrap();
//! let mut findings = FindingSet::new();
//! findings.insert("t", Status::Faulty).unwrap();
//! let pf = fault_belief(&iso, &findings).unwrap();
//! assert!((pf.get("m").unwrap() - 0.534).abs() < 0.001);
//! assert_eq!(pf.get("p"), Some(0.5));
//! ```

pub mod anytime;
pub mod cli;
pub mod detection;
pub mod harness;
pub mod inference;
pub mod isolation;
pub mod model;
