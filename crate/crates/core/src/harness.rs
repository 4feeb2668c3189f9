//! Experiment drivers: BEL / user-density sweeps, the solver comparison and
//! the small three-SBS demo. Output is CSV with a fixed column order.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Evaluator, Formulation, Problem, RatePolicy, SwitchVector, WsmWeights};
use crate::propagation::LinkTable;
use crate::radio::AssociationState;
use crate::scenario::{generate_scenario, step_mobility, Scenario, ScenarioConfig, UserClass};
use crate::solvers::{self, GaConfig, SolverKind, DEFAULT_EXHAUSTIVE_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub bel_values: Vec<f64>,
    pub user_counts: Vec<usize>,
    pub formulations: Vec<Formulation>,
    pub wsm_weight_sets: Vec<WsmWeights>,
    pub solver: SolverKind,
    pub seeds: Vec<u64>,
    pub snapshots: usize,
    pub ga: GaConfig,
    pub exhaustive_cap: usize,
    pub rate_policy: RatePolicy,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            bel_values: (0..=6).map(|i| 5.0 * i as f64).collect(),
            user_counts: (1..=6).map(|i| 200 * i).collect(),
            formulations: vec![Formulation::Efm, Formulation::Wsm, Formulation::Ecm],
            wsm_weight_sets: vec![
                WsmWeights::QOS_DOMINANT,
                WsmWeights::BALANCED,
                WsmWeights::POWER_DOMINANT,
            ],
            solver: SolverKind::Exhaustive,
            seeds: vec![1],
            snapshots: 10,
            ga: GaConfig::default(),
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            rate_policy: RatePolicy::PerUser,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, config: &ScenarioConfig) -> Result<()> {
        let usage = |m: &str| Err(Error::Usage(m.to_string()));
        if self.bel_values.is_empty() {
            return usage("bel list is empty");
        }
        if self.user_counts.is_empty() {
            return usage("user count list is empty");
        }
        if self.formulations.is_empty() {
            return usage("no formulation selected");
        }
        if self.formulations.contains(&Formulation::Wsm) && self.wsm_weight_sets.is_empty() {
            return usage("WSM selected without weight sets");
        }
        if self.seeds.is_empty() {
            return usage("seed list is empty");
        }
        if self.snapshots == 0 {
            return usage("snapshots must be at least 1");
        }
        if let Some(b) = self.bel_values.iter().find(|b| !(0.0..=30.0).contains(*b)) {
            return Err(Error::Usage(format!("BEL value {b} outside [0, 30] dB")));
        }
        if self.user_counts.contains(&0) {
            return usage("user counts must be positive");
        }
        for w in &self.wsm_weight_sets {
            w.validate()?;
        }
        if self.solver == SolverKind::Exhaustive && config.gamma > self.exhaustive_cap {
            return Err(Error::ExhaustiveCap {
                gamma: config.gamma,
                cap: self.exhaustive_cap,
            });
        }
        self.ga.validate()?;
        config.validate()
    }

    /// Formulations expanded into concrete problems, one per WSM weight set.
    pub fn problems(&self) -> Vec<Problem> {
        let mut out = Vec::new();
        for f in &self.formulations {
            let base = Problem {
                rate_policy: self.rate_policy,
                ..Problem::efm()
            };
            match f {
                Formulation::Efm => out.push(base),
                Formulation::Ecm => out.push(Problem {
                    formulation: Formulation::Ecm,
                    ..base
                }),
                Formulation::Wsm => out.extend(self.wsm_weight_sets.iter().map(|w| Problem {
                    formulation: Formulation::Wsm,
                    weights: *w,
                    ..base
                })),
            }
        }
        out
    }
}

/// Scenario snapshots for one (user count, seed): the generated layout
/// followed by `snapshots - 1` mobility steps.
pub fn snapshots(
    config: &ScenarioConfig,
    chi: usize,
    seed: u64,
    count: usize,
) -> Result<Vec<Scenario>> {
    let cfg = ScenarioConfig {
        chi,
        ..config.clone()
    };
    let mut out = Vec::with_capacity(count);
    let mut s = generate_scenario(&cfg, seed)?;
    for i in 0..count {
        if i > 0 {
            s = step_mobility(&s, cfg.step_size_m)?;
        }
        out.push(s.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scope {
    Class(UserClass),
    Network,
}

impl Scope {
    pub const ALL: [Scope; 4] = [
        Scope::Class(UserClass::HighLossIndoor),
        Scope::Class(UserClass::LowLossIndoor),
        Scope::Class(UserClass::Outdoor),
        Scope::Network,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scope::Class(c) => c.label(),
            Scope::Network => "network",
        }
    }

    fn includes(self, class: UserClass) -> bool {
        match self {
            Scope::Class(c) => c == class,
            Scope::Network => true,
        }
    }
}

/// Per-scope metrics of one solved snapshot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
struct Metrics {
    users: f64,
    rate_before: f64,
    rate_after: f64,
    power_before: f64,
    power_after: f64,
    unconnected_before: f64,
    unconnected_after: f64,
    dissatisfied: f64,
    sbs_off: f64,
}

impl Metrics {
    fn accumulate(&mut self, o: &Metrics) {
        self.users += o.users;
        self.rate_before += o.rate_before;
        self.rate_after += o.rate_after;
        self.power_before += o.power_before;
        self.power_after += o.power_after;
        self.unconnected_before += o.unconnected_before;
        self.unconnected_after += o.unconnected_after;
        self.dissatisfied += o.dissatisfied;
        self.sbs_off += o.sbs_off;
    }

    fn scale(&mut self, k: f64) {
        self.users *= k;
        self.rate_before *= k;
        self.rate_after *= k;
        self.power_before *= k;
        self.power_after *= k;
        self.unconnected_before *= k;
        self.unconnected_after *= k;
        self.dissatisfied *= k;
        self.sbs_off *= k;
    }
}

fn scope_metrics(
    scenario: &Scenario,
    before: &AssociationState,
    after: &AssociationState,
    scope: Scope,
    power_before: f64,
    power_after: f64,
    delta: &SwitchVector,
) -> Metrics {
    let mut m = Metrics {
        power_before,
        power_after,
        sbs_off: delta.off_count() as f64,
        ..Metrics::default()
    };
    for (u, user) in scenario.users.iter().enumerate() {
        if !scope.includes(user.class) {
            continue;
        }
        m.users += 1.0;
        m.rate_before += before.rate[u];
        m.rate_after += after.rate[u];
        m.unconnected_before += before.serving[u].is_none() as u8 as f64;
        m.unconnected_after += after.serving[u].is_none() as u8 as f64;
        m.dissatisfied += (after.rate[u] < before.rate[u]) as u8 as f64;
    }
    if m.users > 0.0 {
        m.rate_before /= m.users;
        m.rate_after /= m.users;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub bel_db: f64,
    pub users: usize,
    pub problem: Problem,
    pub solver: SolverKind,
    pub seed: u64,
    pub scope: Scope,
    /// Users in scope, averaged over snapshots.
    pub scope_users: f64,
    /// Mean per-user rate in scope, unconnected users counting as zero.
    pub rate_before_bps: f64,
    pub rate_after_bps: f64,
    pub power_before_w: f64,
    pub power_after_w: f64,
    pub unconnected_before: f64,
    pub unconnected_after: f64,
    pub dissatisfied: f64,
    pub sbs_off: f64,
    /// Every snapshot's chosen vector kept all SBSs on.
    pub all_on: bool,
}

pub const SWEEP_HEADER: &str = "bel_db,users,formulation,alpha,beta,upsilon,solver,seed,scope,\
scope_users,rate_before_bps,rate_after_bps,power_before_w,power_after_w,\
unconnected_before,unconnected_after,dissatisfied,sbs_off";

fn weight_cells(p: &Problem) -> String {
    match p.formulation {
        Formulation::Wsm => format!(
            "{},{},{}",
            p.weights.alpha, p.weights.beta, p.weights.upsilon
        ),
        _ => ",,".to_string(),
    }
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.4},{:.3},{:.3},{:.6},{:.6},{:.4},{:.4},{:.4},{:.4}",
            self.bel_db,
            self.users,
            self.problem.formulation.label(),
            weight_cells(&self.problem),
            self.solver.label(),
            self.seed,
            self.scope.label(),
            self.scope_users,
            self.rate_before_bps,
            self.rate_after_bps,
            self.power_before_w,
            self.power_after_w,
            self.unconnected_before,
            self.unconnected_after,
            self.dissatisfied,
            self.sbs_off,
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Whitespace-separated blocks, one per (formulation, weights, scope),
/// separated by blank lines for gnuplot's `index`.
pub fn sweep_gnuplot(rows: &[SweepRow]) -> String {
    let mut keys: Vec<(String, &'static str)> = Vec::new();
    for r in rows {
        let key = (problem_tag(&r.problem), r.scope.label());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out = String::new();
    for (i, (tag, scope)) in keys.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# {tag} {scope}").unwrap();
        out.push_str("# bel_db users rate_before rate_after power_before power_after unconnected_after dissatisfied\n");
        for r in rows
            .iter()
            .filter(|r| &problem_tag(&r.problem) == tag && r.scope.label() == *scope)
        {
            writeln!(
                out,
                "{} {} {:.3} {:.3} {:.6} {:.6} {:.4} {:.4}",
                r.bel_db,
                r.users,
                r.rate_before_bps,
                r.rate_after_bps,
                r.power_before_w,
                r.power_after_w,
                r.unconnected_after,
                r.dissatisfied
            )
            .unwrap();
        }
    }
    out
}

fn problem_tag(p: &Problem) -> String {
    match p.formulation {
        Formulation::Wsm => format!("wsm({})", p.weights),
        f => f.label().to_string(),
    }
}

struct SnapshotOutcome {
    per_problem: Vec<([Metrics; 4], bool)>,
}

fn solve_snapshot(
    scenario: &Scenario,
    problems: &[Problem],
    solver: SolverKind,
    ga: &GaConfig,
    cap: usize,
) -> Result<SnapshotOutcome> {
    let links = LinkTable::build(scenario)?;
    let evaluators = problems
        .iter()
        .map(|p| Evaluator::new(scenario, &links, *p))
        .collect::<Result<Vec<_>>>()?;
    let results = match solver {
        SolverKind::Exhaustive => solvers::exhaustive_many(&evaluators, scenario.gamma(), cap)?,
        _ => evaluators
            .iter()
            .map(|ev| solvers::solve(solver, ev, ga, cap))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut per_problem = Vec::with_capacity(problems.len());
    for (ev, result) in evaluators.iter().zip(results) {
        let (after, report) = ev.assess(&result.best_delta)?;
        let before = &ev.baseline().association_before;
        let metrics = Scope::ALL.map(|scope| {
            scope_metrics(
                scenario,
                before,
                &after,
                scope,
                ev.baseline().power_before,
                report.power,
                &result.best_delta,
            )
        });
        per_problem.push((metrics, result.best_delta.is_all_on()));
    }
    Ok(SnapshotOutcome { per_problem })
}

/// Runs every (BEL, user count, seed) cell over all requested problems and
/// returns 4 rows per (cell, problem): one per user class plus the network.
pub fn run_sweep(spec: &SweepSpec, config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    spec.validate(config)?;
    let problems = spec.problems();

    let mut jobs = Vec::new();
    for &chi in &spec.user_counts {
        for &seed in &spec.seeds {
            for &bel in &spec.bel_values {
                jobs.push((chi, seed, bel));
            }
        }
    }

    let cells = jobs
        .par_iter()
        .map(|&(chi, seed, bel)| -> Result<Vec<SweepRow>> {
            let snaps = snapshots(config, chi, seed, spec.snapshots)?;
            let outcomes = snaps
                .par_iter()
                .map(|s| {
                    let mut radio = s.radio.clone();
                    radio.bel_db = bel;
                    solve_snapshot(
                        &s.with_radio(radio),
                        &problems,
                        spec.solver,
                        &spec.ga,
                        spec.exhaustive_cap,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let k = 1.0 / outcomes.len() as f64;
            let mut rows = Vec::with_capacity(problems.len() * 4);
            for (pi, problem) in problems.iter().enumerate() {
                let mut sums = [Metrics::default(); 4];
                let mut all_on = true;
                for o in &outcomes {
                    let (m, on) = &o.per_problem[pi];
                    for (acc, x) in sums.iter_mut().zip(m) {
                        acc.accumulate(x);
                    }
                    all_on &= on;
                }
                for (scope, mut m) in Scope::ALL.into_iter().zip(sums) {
                    m.scale(k);
                    rows.push(SweepRow {
                        bel_db: bel,
                        users: chi,
                        problem: *problem,
                        solver: spec.solver,
                        seed,
                        scope,
                        scope_users: m.users,
                        rate_before_bps: m.rate_before,
                        rate_after_bps: m.rate_after,
                        power_before_w: m.power_before,
                        power_after_w: m.power_after,
                        unconnected_before: m.unconnected_before,
                        unconnected_after: m.unconnected_after,
                        dissatisfied: m.dissatisfied,
                        sbs_off: m.sbs_off,
                        all_on,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(cells.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareSpec {
    pub user_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    pub snapshots: usize,
    pub solvers: Vec<SolverKind>,
    pub ga: GaConfig,
    pub exhaustive_cap: usize,
    pub rate_policy: RatePolicy,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec {
            user_counts: (1..=6).map(|i| 200 * i).collect(),
            seeds: vec![1],
            snapshots: 1,
            solvers: SolverKind::ALL.to_vec(),
            ga: GaConfig::default(),
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            rate_policy: RatePolicy::PerUser,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub users: usize,
    pub seed: u64,
    pub solver: SolverKind,
    pub power_before_w: f64,
    pub power_after_w: f64,
    /// Power above the exhaustive optimum of the same instances.
    pub gap_w: f64,
    pub unconnected_after: f64,
    pub dissatisfied: f64,
    pub sbs_off: f64,
    pub evaluations: f64,
    /// Snapshots on which the solver hit the exhaustive optimum exactly.
    pub optimal_hits: usize,
    pub snapshots: usize,
}

pub const COMPARE_HEADER: &str = "users,seed,solver,power_before_w,power_after_w,gap_w,\
unconnected_after,dissatisfied,sbs_off,evaluations,optimal_hits,snapshots";

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.4},{:.4},{:.4},{:.2},{},{}",
            r.users,
            r.seed,
            r.solver.label(),
            r.power_before_w,
            r.power_after_w,
            r.gap_w,
            r.unconnected_after,
            r.dissatisfied,
            r.sbs_off,
            r.evaluations,
            r.optimal_hits,
            r.snapshots
        )
        .unwrap();
    }
    out
}

/// Runs each requested solver under εCM on identical instances, with an
/// exhaustive reference run for the optimality gap.
pub fn compare_solvers(spec: &CompareSpec, config: &ScenarioConfig) -> Result<Vec<CompareRow>> {
    if spec.solvers.is_empty() {
        return Err(Error::Usage("compare needs at least one solver".into()));
    }
    if spec.user_counts.is_empty() || spec.seeds.is_empty() || spec.snapshots == 0 {
        return Err(Error::Usage(
            "compare needs user counts, seeds and snapshots".into(),
        ));
    }
    if config.gamma > spec.exhaustive_cap {
        return Err(Error::ExhaustiveCap {
            gamma: config.gamma,
            cap: spec.exhaustive_cap,
        });
    }
    spec.ga.validate()?;
    config.validate()?;
    let problem = Problem {
        rate_policy: spec.rate_policy,
        ..Problem::ecm()
    };

    let mut jobs = Vec::new();
    for &chi in &spec.user_counts {
        for &seed in &spec.seeds {
            jobs.push((chi, seed));
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(chi, seed)| -> Result<Vec<CompareRow>> {
            let snaps = snapshots(config, chi, seed, spec.snapshots)?;
            let mut rows: Vec<CompareRow> = spec
                .solvers
                .iter()
                .map(|&solver| CompareRow {
                    users: chi,
                    seed,
                    solver,
                    power_before_w: 0.0,
                    power_after_w: 0.0,
                    gap_w: 0.0,
                    unconnected_after: 0.0,
                    dissatisfied: 0.0,
                    sbs_off: 0.0,
                    evaluations: 0.0,
                    optimal_hits: 0,
                    snapshots: snaps.len(),
                })
                .collect();
            for s in &snaps {
                let links = LinkTable::build(s)?;
                let ev = Evaluator::new(s, &links, problem)?;
                let reference = solvers::exhaustive_with_cap(&ev, ev.gamma(), spec.exhaustive_cap)?;
                for row in rows.iter_mut() {
                    let r = if row.solver == SolverKind::Exhaustive {
                        reference.clone()
                    } else {
                        solvers::solve(row.solver, &ev, &spec.ga, spec.exhaustive_cap)?
                    };
                    row.power_before_w += ev.baseline().power_before;
                    row.power_after_w += r.best_report.power;
                    row.gap_w += r.best_report.power - reference.best_report.power;
                    row.unconnected_after += r.best_report.unconnected as f64;
                    row.dissatisfied += r.best_report.dissatisfied as f64;
                    row.sbs_off += r.best_delta.off_count() as f64;
                    row.evaluations += r.evaluations as f64;
                    row.optimal_hits += (r.objective == reference.objective) as usize;
                }
            }
            let k = 1.0 / snaps.len() as f64;
            for row in rows.iter_mut() {
                row.power_before_w *= k;
                row.power_after_w *= k;
                row.gap_w *= k;
                row.unconnected_after *= k;
                row.dissatisfied *= k;
                row.sbs_off *= k;
                row.evaluations *= k;
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Everything a CLI run can read from a config file. Missing sections take
/// their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub sweep: SweepSpec,
    pub compare: CompareSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Seed used by the demo when none is given.
pub const DEMO_SEED: u64 = 15;

/// The three-SBS / ten-user demo layout.
pub fn demo_config() -> ScenarioConfig {
    ScenarioConfig {
        gamma: 3,
        chi: 10,
        ..ScenarioConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub scenario: Scenario,
    pub delta: SwitchVector,
    pub before: AssociationState,
    pub after: AssociationState,
    pub power_before_w: f64,
    pub power_after_w: f64,
    pub unconnected_before: usize,
    pub unconnected_after: usize,
    pub dissatisfied: usize,
    pub ecm_feasible: bool,
    /// SBS index with the fewest RBs in use before switching.
    pub least_loaded_sbs: usize,
}

impl DemoReport {
    pub fn switched_off(&self) -> Vec<usize> {
        self.delta.off_indices().collect()
    }

    /// Users of the least-loaded SBS before switching, all now on the MBS.
    pub fn offloaded_to_mbs(&self) -> bool {
        let mbs = self.scenario.mbs_index();
        self.before
            .users_of(self.least_loaded_sbs)
            .all(|u| self.after.serving[u] == Some(mbs))
    }
}

fn bs_name(s: &Scenario, b: Option<usize>) -> String {
    match b {
        Some(b) => {
            let bs = &s.base_stations[b];
            match bs.kind {
                crate::scenario::BsKind::Sbs => format!("SBS{}", b + 1),
                k => k.label().to_string(),
            }
        }
        None => "-".to_string(),
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.scenario;
        writeln!(
            f,
            "demo: {} SBS + MBS + HAPS, {} users, seed {}",
            s.gamma(),
            s.users.len(),
            s.seed
        )?;
        writeln!(f, "formulation: ecm, solver: exhaustive")?;
        writeln!(f, "switch vector: {}", self.delta)?;
        let off: Vec<String> = self
            .switched_off()
            .iter()
            .map(|&i| bs_name(s, Some(i)))
            .collect();
        writeln!(
            f,
            "switched off: {}",
            if off.is_empty() {
                "none".to_string()
            } else {
                off.join(" ")
            }
        )?;
        writeln!(
            f,
            "least-loaded SBS before switching: {}",
            bs_name(s, Some(self.least_loaded_sbs))
        )?;
        writeln!(
            f,
            "user  class             before  after   rate_before_kbps  rate_after_kbps"
        )?;
        for (u, user) in s.users.iter().enumerate() {
            writeln!(
                f,
                "{:<5} {:<17} {:<7} {:<7} {:>16.1}  {:>15.1}",
                u,
                user.class.label(),
                bs_name(s, self.before.serving[u]),
                bs_name(s, self.after.serving[u]),
                self.before.rate[u] / 1e3,
                self.after.rate[u] / 1e3
            )?;
        }
        writeln!(
            f,
            "power: {:.3} W -> {:.3} W",
            self.power_before_w, self.power_after_w
        )?;
        writeln!(
            f,
            "unconnected: {} -> {}, dissatisfied: {}",
            self.unconnected_before, self.unconnected_after, self.dissatisfied
        )?;
        writeln!(f, "ecm constraints hold: {}", self.ecm_feasible)
    }
}

pub const DEMO_HEADER: &str =
    "user_id,class,serving_before,serving_after,rate_before_bps,rate_after_bps";

/// Per-user association before and after switching.
pub fn demo_csv(report: &DemoReport) -> String {
    let s = &report.scenario;
    let mut out = String::from(DEMO_HEADER);
    out.push('\n');
    for (u, user) in s.users.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            user.id,
            user.class.label(),
            bs_name(s, report.before.serving[u]),
            bs_name(s, report.after.serving[u]),
            report.before.rate[u],
            report.after.rate[u]
        )
        .unwrap();
    }
    out
}

pub fn run_demo(config: &ScenarioConfig, seed: u64) -> Result<DemoReport> {
    let scenario = generate_scenario(config, seed)?;
    let links = LinkTable::build(&scenario)?;
    let ev = Evaluator::new(&scenario, &links, Problem::ecm())?;
    let result = solvers::exhaustive(&ev, ev.gamma())?;
    let (after, report) = ev.assess(&result.best_delta)?;
    let before = ev.baseline().association_before.clone();
    let least_loaded_sbs = scenario
        .sbs_indices()
        .min_by_key(|&b| (before.rb_used[b], b))
        .expect("at least one SBS");
    Ok(DemoReport {
        delta: result.best_delta,
        power_before_w: ev.baseline().power_before,
        power_after_w: report.power,
        unconnected_before: ev.baseline().unconnected_before,
        unconnected_after: report.unconnected,
        dissatisfied: report.dissatisfied,
        ecm_feasible: report.ecm_feasible,
        least_loaded_sbs,
        before,
        after,
        scenario,
    })
}

pub fn run_demo_fig4(seed: u64) -> Result<DemoReport> {
    run_demo(&demo_config(), seed)
}
