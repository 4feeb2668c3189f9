//! Propagation- and rate-aware cell switching for HAPS-assisted cellular
//! networks: a snapshot simulator (placement, path loss, SINR association,
//! EARTH power) plus energy-focused, weighted-sum and ε-constraint switching
//! formulations solved by exhaustive, greedy and genetic search.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod objectives;
pub mod power;
pub mod propagation;
pub mod radio;
pub mod rng;
pub mod scenario;
pub mod solvers;
pub mod units;

pub use error::{Error, Result};
pub use objectives::{
    Baseline, EvaluationReport, Evaluator, Formulation, Problem, RatePolicy, Scored, SwitchVector,
    WsmWeights,
};
pub use propagation::{LinkTable, RadioParams};
pub use radio::AssociationState;
pub use scenario::{generate_scenario, step_mobility, Scenario, ScenarioConfig};
pub use solvers::{GaConfig, SolverKind, SolverResult};
