//! Objective values, WSM scalarization and εCM feasibility, all measured
//! against the all-SBS-on baseline of the same snapshot.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power::{network_power, power_for_loads};
use crate::propagation::LinkTable;
use crate::radio::{associate, AssociationState};
use crate::scenario::Scenario;

/// ON/OFF state of the small cells, in SBS order. `true` is ON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SwitchVector(Vec<bool>);

impl SwitchVector {
    pub fn from_bits(bits: &[bool]) -> Self {
        SwitchVector(bits.to_vec())
    }

    pub fn all_on(gamma: usize) -> Self {
        SwitchVector(vec![true; gamma])
    }

    pub fn all_off(gamma: usize) -> Self {
        SwitchVector(vec![false; gamma])
    }

    /// Bit `i` of `mask` gives the state of SBS `i`.
    pub fn from_mask(gamma: usize, mask: u64) -> Self {
        SwitchVector((0..gamma).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_on(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = on;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn off_count(&self) -> usize {
        self.0.iter().filter(|b| !**b).count()
    }

    pub fn off_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, b)| !**b)
            .map(|(i, _)| i)
    }

    pub fn is_all_on(&self) -> bool {
        self.0.iter().all(|b| *b)
    }
}

impl fmt::Display for SwitchVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for SwitchVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::Usage(format!(
                    "switch vector must be 0/1 digits: {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SwitchVector)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Minimize network power only.
    Efm,
    /// Weighted sum of normalized power, unconnected and dissatisfied users.
    Wsm,
    /// Minimize power subject to no loss of connectivity or rate.
    Ecm,
}

impl Formulation {
    pub fn label(self) -> &'static str {
        match self {
            Formulation::Efm => "efm",
            Formulation::Wsm => "wsm",
            Formulation::Ecm => "ecm",
        }
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "efm" => Ok(Formulation::Efm),
            "wsm" => Ok(Formulation::Wsm),
            "ecm" | "εcm" => Ok(Formulation::Ecm),
            other => Err(Error::Usage(format!("unknown formulation {other:?}"))),
        }
    }
}

/// Scope of the rate constraint R_a ≥ R_b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatePolicy {
    /// Every user connected before and after keeps at least its old rate.
    #[default]
    PerUser,
    /// The summed rate does not drop.
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsmWeights {
    pub alpha: f64,
    pub beta: f64,
    pub upsilon: f64,
}

impl WsmWeights {
    pub const QOS_DOMINANT: WsmWeights = WsmWeights::new_unchecked(1.0, 1.0, 1.0);
    pub const BALANCED: WsmWeights = WsmWeights::new_unchecked(1.0, 0.3, 0.25);
    pub const POWER_DOMINANT: WsmWeights = WsmWeights::new_unchecked(1.0, 0.1, 0.1);

    const fn new_unchecked(alpha: f64, beta: f64, upsilon: f64) -> Self {
        WsmWeights {
            alpha,
            beta,
            upsilon,
        }
    }

    pub fn new(alpha: f64, beta: f64, upsilon: f64) -> Result<Self> {
        let w = WsmWeights::new_unchecked(alpha, beta, upsilon);
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("upsilon", self.upsilon),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidWeight { name, value });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        WsmWeights::new_unchecked(self.alpha * k, self.beta * k, self.upsilon * k)
    }
}

impl Default for WsmWeights {
    fn default() -> Self {
        WsmWeights::QOS_DOMINANT
    }
}

impl FromStr for WsmWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Usage(format!("bad weights {s:?}: {e}")))?;
        match parts[..] {
            [a, b, v] => WsmWeights::new(a, b, v),
            _ => Err(Error::Usage(format!(
                "weights need three values a,b,v: {s:?}"
            ))),
        }
    }
}

impl fmt::Display for WsmWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.alpha, self.beta, self.upsilon)
    }
}

/// The optimization problem a solver works on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub formulation: Formulation,
    pub weights: WsmWeights,
    pub rate_policy: RatePolicy,
}

impl Problem {
    pub fn efm() -> Self {
        Problem {
            formulation: Formulation::Efm,
            weights: WsmWeights::default(),
            rate_policy: RatePolicy::default(),
        }
    }

    pub fn wsm(weights: WsmWeights) -> Self {
        Problem {
            formulation: Formulation::Wsm,
            weights,
            ..Problem::efm()
        }
    }

    pub fn ecm() -> Self {
        Problem {
            formulation: Formulation::Ecm,
            ..Problem::efm()
        }
    }

    pub fn objective(&self, report: &EvaluationReport) -> f64 {
        match self.formulation {
            Formulation::Efm | Formulation::Ecm => report.power,
            Formulation::Wsm => report.wsm_score,
        }
    }

    /// Load constraints and binary states hold by construction, so only the
    /// εCM constraints can reject a candidate.
    pub fn feasible(&self, report: &EvaluationReport) -> bool {
        match self.formulation {
            Formulation::Ecm => report.ecm_feasible,
            Formulation::Efm | Formulation::Wsm => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baseline {
    pub rates_before: Vec<f64>,
    pub unconnected_before: usize,
    pub power_before: f64,
    pub association_before: AssociationState,
}

impl Baseline {
    pub fn compute(scenario: &Scenario, links: &LinkTable) -> Result<Self> {
        let delta = SwitchVector::all_on(scenario.gamma());
        let association = associate(scenario, &delta, links)?;
        let power = network_power(scenario, &delta, &association)?;
        Ok(Baseline {
            rates_before: association.rate.clone(),
            unconnected_before: count_unconnected(&association),
            power_before: power.total,
            association_before: association,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub power: f64,
    pub unconnected: usize,
    pub dissatisfied: usize,
    pub wsm_score: f64,
    pub ecm_feasible: bool,
}

pub fn count_unconnected(state: &AssociationState) -> usize {
    state.unconnected()
}

/// Users whose rate strictly dropped; a user dropped to unconnected counts
/// whenever it had a positive rate before.
pub fn count_dissatisfied(baseline: &Baseline, after: &AssociationState) -> usize {
    baseline
        .rates_before
        .iter()
        .zip(&after.rate)
        .filter(|(before, after)| after < before)
        .count()
}

pub fn wsm_score(
    power: f64,
    unconnected: usize,
    dissatisfied: usize,
    weights: &WsmWeights,
    p_max: f64,
    chi: usize,
) -> Result<f64> {
    weights.validate()?;
    if !(p_max > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "p_max must be positive, got {p_max}"
        )));
    }
    if chi == 0 {
        return Err(Error::InvalidConfig("user count must be positive".into()));
    }
    Ok(weighted_sum(
        power,
        unconnected,
        dissatisfied,
        weights,
        p_max,
        chi,
    ))
}

fn weighted_sum(
    power: f64,
    unconnected: usize,
    dissatisfied: usize,
    w: &WsmWeights,
    p_max: f64,
    chi: usize,
) -> f64 {
    let chi = chi as f64;
    w.alpha * power / p_max
        + w.beta * unconnected as f64 / chi
        + w.upsilon * dissatisfied as f64 / chi
}

pub fn ecm_feasible(
    baseline: &Baseline,
    after: &AssociationState,
    unconnected_after: usize,
    policy: RatePolicy,
) -> bool {
    if unconnected_after > baseline.unconnected_before {
        return false;
    }
    match policy {
        RatePolicy::PerUser => baseline
            .association_before
            .serving
            .iter()
            .zip(&after.serving)
            .enumerate()
            .filter(|(_, (b, a))| b.is_some() && a.is_some())
            .all(|(u, _)| after.rate[u] >= baseline.rates_before[u]),
        RatePolicy::Aggregate => {
            after.rate.iter().sum::<f64>() >= baseline.rates_before.iter().sum::<f64>()
        }
    }
}

/// Network power with every SBS on at full load.
pub fn p_max(scenario: &Scenario) -> Result<f64> {
    let n = scenario.base_stations.len();
    Ok(power_for_loads(scenario, &vec![true; n], &vec![1.0; n])?.total)
}

/// Evaluates switch vectors for one snapshot against its frozen baseline.
/// Shared read-only across solver threads.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    links: &'a LinkTable,
    baseline: Baseline,
    p_max: f64,
    problem: Problem,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, links: &'a LinkTable, problem: Problem) -> Result<Self> {
        problem.weights.validate()?;
        if scenario.users.is_empty() && problem.formulation == Formulation::Wsm {
            return Err(Error::InvalidConfig("WSM needs at least one user".into()));
        }
        Ok(Evaluator {
            scenario,
            links,
            baseline: Baseline::compute(scenario, links)?,
            p_max: p_max(scenario)?,
            problem,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn links(&self) -> &LinkTable {
        self.links
    }

    pub fn baseline(&self) -> &Baseline {
        &self.baseline
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn gamma(&self) -> usize {
        self.scenario.gamma()
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn assess(&self, delta: &SwitchVector) -> Result<(AssociationState, EvaluationReport)> {
        let state = associate(self.scenario, delta, self.links)?;
        let power = network_power(self.scenario, delta, &state)?.total;
        let report = self.report_for(&state, power);
        Ok((state, report))
    }

    /// Builds the report for an association already computed for some Δ.
    pub fn report_for(&self, state: &AssociationState, power: f64) -> EvaluationReport {
        let unconnected = count_unconnected(state);
        let dissatisfied = count_dissatisfied(&self.baseline, state);
        let wsm_score = weighted_sum(
            power,
            unconnected,
            dissatisfied,
            &self.problem.weights,
            self.p_max,
            self.scenario.users.len().max(1),
        );
        let ecm_feasible =
            ecm_feasible(&self.baseline, state, unconnected, self.problem.rate_policy);
        EvaluationReport {
            power,
            unconnected,
            dissatisfied,
            wsm_score,
            ecm_feasible,
        }
    }

    pub fn evaluate(&self, delta: &SwitchVector) -> Result<EvaluationReport> {
        Ok(self.assess(delta)?.1)
    }

    pub fn score(&self, delta: SwitchVector) -> Result<Scored> {
        let report = self.evaluate(&delta)?;
        Ok(self.scored(delta, report))
    }

    pub fn scored(&self, delta: SwitchVector, report: EvaluationReport) -> Scored {
        Scored {
            objective: self.problem.objective(&report),
            feasible: self.problem.feasible(&report),
            delta,
            report,
        }
    }

    /// True when both evaluators see the same scenario and link table.
    pub fn shares_instance(&self, other: &Evaluator<'_>) -> bool {
        std::ptr::eq(self.scenario, other.scenario) && std::ptr::eq(self.links, other.links)
    }
}

/// A switch vector together with its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scored {
    pub delta: SwitchVector,
    pub report: EvaluationReport,
    pub objective: f64,
    pub feasible: bool,
}

impl Scored {
    /// Total preference order: feasible first, then lower objective, then
    /// more SBSs off, then lexicographically smaller vector.
    pub fn rank_cmp(&self, other: &Scored) -> Ordering {
        other
            .feasible
            .cmp(&self.feasible)
            .then(self.objective.total_cmp(&other.objective))
            .then(other.delta.off_count().cmp(&self.delta.off_count()))
            .then(self.delta.cmp(&other.delta))
    }

    pub fn better_than(&self, other: &Scored) -> bool {
        self.rank_cmp(other) == Ordering::Less
    }
}
