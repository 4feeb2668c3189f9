//! Search over switch vectors: exhaustive enumeration, greedy switch-off and
//! a binary-chromosome genetic algorithm.
//!
//! All three share the preference order of [`Scored::rank_cmp`], so parallel
//! evaluation reduces to the same answer as a sequential scan.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{EvaluationReport, Evaluator, Scored, SwitchVector};
use crate::power::network_power;
use crate::radio::associate;
use crate::rng::{stream_rng, Domain};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Exhaustive,
    Greedy,
    Genetic,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [
        SolverKind::Exhaustive,
        SolverKind::Greedy,
        SolverKind::Genetic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SolverKind::Exhaustive => "exhaustive",
            SolverKind::Greedy => "greedy",
            SolverKind::Genetic => "ga",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(SolverKind::Exhaustive),
            "greedy" => Ok(SolverKind::Greedy),
            "ga" | "genetic" => Ok(SolverKind::Genetic),
            other => Err(Error::Usage(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    pub best_delta: SwitchVector,
    pub best_report: EvaluationReport,
    pub objective: f64,
    pub feasible: bool,
    pub evaluations: usize,
    pub wall_time: f64,
}

impl SolverResult {
    fn new(best: Scored, evaluations: usize, started: Instant) -> Self {
        SolverResult {
            best_delta: best.delta,
            best_report: best.report,
            objective: best.objective,
            feasible: best.feasible,
            evaluations,
            wall_time: started.elapsed().as_secs_f64(),
        }
    }
}

fn check_gamma(evaluator: &Evaluator<'_>, gamma: usize) -> Result<()> {
    if evaluator.gamma() != gamma {
        return Err(Error::LengthMismatch {
            expected: evaluator.gamma(),
            got: gamma,
        });
    }
    Ok(())
}

fn pick(a: Scored, b: Scored) -> Scored {
    if b.better_than(&a) {
        b
    } else {
        a
    }
}

pub fn exhaustive(evaluator: &Evaluator<'_>, gamma: usize) -> Result<SolverResult> {
    exhaustive_with_cap(evaluator, gamma, DEFAULT_EXHAUSTIVE_CAP)
}

/// Evaluates all 2^Γ vectors and returns the best under the shared order.
pub fn exhaustive_with_cap(
    evaluator: &Evaluator<'_>,
    gamma: usize,
    cap: usize,
) -> Result<SolverResult> {
    if gamma > cap || gamma >= 64 {
        return Err(Error::ExhaustiveCap { gamma, cap });
    }
    check_gamma(evaluator, gamma)?;
    let started = Instant::now();
    let count = 1u64 << gamma;
    let best = (0..count)
        .into_par_iter()
        .map(|mask| evaluator.score(SwitchVector::from_mask(gamma, mask)))
        .try_reduce_with(|a, b| Ok(pick(a, b)))
        .expect("at least one candidate")?;
    Ok(SolverResult::new(best, count as usize, started))
}

/// Exhaustive search for several problems over one instance. Each Δ is
/// associated once and scored under every evaluator; results are identical to
/// calling [`exhaustive_with_cap`] per evaluator.
pub fn exhaustive_many(
    evaluators: &[Evaluator<'_>],
    gamma: usize,
    cap: usize,
) -> Result<Vec<SolverResult>> {
    let Some(first) = evaluators.first() else {
        return Ok(Vec::new());
    };
    if gamma > cap || gamma >= 64 {
        return Err(Error::ExhaustiveCap { gamma, cap });
    }
    check_gamma(first, gamma)?;
    if !evaluators.iter().all(|e| first.shares_instance(e)) {
        return Err(Error::InvalidConfig(
            "evaluators must share one scenario and link table".into(),
        ));
    }
    let started = Instant::now();
    let count = 1u64 << gamma;
    let best = (0..count)
        .into_par_iter()
        .map(|mask| -> Result<Vec<Scored>> {
            let delta = SwitchVector::from_mask(gamma, mask);
            let state = associate(first.scenario(), &delta, first.links())?;
            let power = network_power(first.scenario(), &delta, &state)?.total;
            Ok(evaluators
                .iter()
                .map(|e| e.scored(delta.clone(), e.report_for(&state, power)))
                .collect())
        })
        .try_reduce_with(|a, b| Ok(a.into_iter().zip(b).map(|(x, y)| pick(x, y)).collect()))
        .expect("at least one candidate")?;
    Ok(best
        .into_iter()
        .map(|b| SolverResult::new(b, count as usize, started))
        .collect())
}

/// Starts from all-on and repeatedly commits the single feasible switch-off
/// that improves the objective most. Stops when no switch-off improves it.
pub fn greedy(evaluator: &Evaluator<'_>, gamma: usize) -> Result<SolverResult> {
    let trace = greedy_trace(evaluator, gamma)?;
    Ok(trace.result)
}

#[derive(Debug, Clone)]
pub struct GreedyTrace {
    pub result: SolverResult,
    /// Objective after each committed round, starting with all-on.
    pub committed: Vec<f64>,
}

pub fn greedy_trace(evaluator: &Evaluator<'_>, gamma: usize) -> Result<GreedyTrace> {
    check_gamma(evaluator, gamma)?;
    let started = Instant::now();
    let mut current = evaluator.score(SwitchVector::all_on(gamma))?;
    let mut evaluations = 1;
    let mut committed = vec![current.objective];
    loop {
        let on: Vec<usize> = (0..gamma).filter(|&i| current.delta.is_on(i)).collect();
        if on.is_empty() {
            break;
        }
        let moves = on
            .par_iter()
            .map(|&i| {
                let mut d = current.delta.clone();
                d.set(i, false);
                evaluator.score(d)
            })
            .collect::<Result<Vec<_>>>()?;
        evaluations += moves.len();
        let best = moves
            .into_iter()
            .filter(|m| m.feasible && m.objective < current.objective)
            .reduce(pick);
        match best {
            Some(m) => {
                current = m;
                committed.push(current.objective);
            }
            None => break,
        }
    }
    Ok(GreedyTrace {
        result: SolverResult::new(current, evaluations, started),
        committed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means 1/Γ.
    pub mutation_rate: Option<f64>,
    pub elitism: usize,
    pub tournament: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 32,
            generations: 60,
            crossover_rate: 0.9,
            mutation_rate: None,
            elitism: 2,
            tournament: 3,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("GA: {m}")));
        if self.population < 2 {
            return bad("population must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover rate outside [0, 1]");
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return bad("mutation rate outside [0, 1]");
            }
        }
        if self.elitism >= self.population {
            return bad("elitism must be below population");
        }
        if self.tournament < 1 {
            return bad("tournament size must be at least 1");
        }
        Ok(())
    }

    fn mutation_for(&self, gamma: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / gamma.max(1) as f64)
    }
}

pub fn genetic(evaluator: &Evaluator<'_>, gamma: usize, config: &GaConfig) -> Result<SolverResult> {
    genetic_seeded(evaluator, gamma, config, &[])
}

struct Memo<'e, 'a> {
    evaluator: &'e Evaluator<'a>,
    cache: HashMap<SwitchVector, Scored>,
}

impl Memo<'_, '_> {
    /// Scores a batch, evaluating unseen vectors in parallel.
    fn score_all(&mut self, batch: Vec<SwitchVector>) -> Result<Vec<Scored>> {
        let mut fresh: Vec<SwitchVector> = batch
            .iter()
            .filter(|d| !self.cache.contains_key(*d))
            .cloned()
            .collect();
        fresh.sort();
        fresh.dedup();
        let scored = fresh
            .into_par_iter()
            .map(|d| self.evaluator.score(d))
            .collect::<Result<Vec<_>>>()?;
        for s in scored {
            self.cache.insert(s.delta.clone(), s);
        }
        Ok(batch.iter().map(|d| self.cache[d].clone()).collect())
    }
}

fn tournament<'p>(pop: &'p [Scored], size: usize, rng: &mut impl Rng) -> &'p Scored {
    let mut winner = &pop[rng.random_range(0..pop.len())];
    for _ in 1..size {
        let challenger = &pop[rng.random_range(0..pop.len())];
        if challenger.better_than(winner) {
            winner = challenger;
        }
    }
    winner
}

/// Genetic search whose first generation starts with `initial` (then the
/// all-on vector, then random chromosomes).
pub fn genetic_seeded(
    evaluator: &Evaluator<'_>,
    gamma: usize,
    config: &GaConfig,
    initial: &[SwitchVector],
) -> Result<SolverResult> {
    config.validate()?;
    check_gamma(evaluator, gamma)?;
    for d in initial {
        if d.len() != gamma {
            return Err(Error::LengthMismatch {
                expected: gamma,
                got: d.len(),
            });
        }
    }
    let started = Instant::now();
    let mut rng = stream_rng(config.seed, Domain::Genetic, gamma as u64);
    let mutation = config.mutation_for(gamma);
    let mut memo = Memo {
        evaluator,
        cache: HashMap::new(),
    };

    let mut genomes: Vec<SwitchVector> = initial.iter().take(config.population).cloned().collect();
    if genomes.len() < config.population {
        genomes.push(SwitchVector::all_on(gamma));
    }
    while genomes.len() < config.population {
        let bits: Vec<bool> = (0..gamma).map(|_| rng.random_bool(0.5)).collect();
        genomes.push(SwitchVector::from_bits(&bits));
    }
    let mut pop = memo.score_all(genomes)?;
    let mut best = pop
        .iter()
        .cloned()
        .reduce(pick)
        .expect("non-empty population");

    for _ in 0..config.generations {
        pop.sort_by(|a, b| a.rank_cmp(b));
        let mut children = Vec::with_capacity(config.population - config.elitism);
        while children.len() < config.population - config.elitism {
            let a = tournament(&pop, config.tournament, &mut rng);
            let b = tournament(&pop, config.tournament, &mut rng);
            let mut bits: Vec<bool> = if rng.random_bool(config.crossover_rate) {
                a.delta
                    .bits()
                    .iter()
                    .zip(b.delta.bits())
                    .map(|(x, y)| if rng.random_bool(0.5) { *x } else { *y })
                    .collect()
            } else {
                a.delta.bits().to_vec()
            };
            for bit in &mut bits {
                if rng.random_bool(mutation) {
                    *bit = !*bit;
                }
            }
            children.push(SwitchVector::from_bits(&bits));
        }
        let mut next: Vec<Scored> = pop[..config.elitism].to_vec();
        next.extend(memo.score_all(children)?);
        pop = next;
        for s in &pop {
            if s.better_than(&best) {
                best = s.clone();
            }
        }
    }
    Ok(SolverResult::new(best, memo.cache.len(), started))
}

pub fn solve(
    kind: SolverKind,
    evaluator: &Evaluator<'_>,
    ga: &GaConfig,
    exhaustive_cap: usize,
) -> Result<SolverResult> {
    let gamma = evaluator.gamma();
    match kind {
        SolverKind::Exhaustive => exhaustive_with_cap(evaluator, gamma, exhaustive_cap),
        SolverKind::Greedy => greedy(evaluator, gamma),
        SolverKind::Genetic => genetic(evaluator, gamma, ga),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{Problem, WsmWeights};
    use crate::propagation::LinkTable;
    use crate::scenario::{generate_scenario, Scenario, ScenarioConfig};

    fn setup(gamma: usize, chi: usize, seed: u64) -> (Scenario, LinkTable) {
        let s = generate_scenario(
            &ScenarioConfig {
                gamma,
                chi,
                ..ScenarioConfig::default()
            },
            seed,
        )
        .unwrap();
        let links = LinkTable::build(&s).unwrap();
        (s, links)
    }

    #[test]
    fn single_sbs_empty_network_sleeps() {
        let (mut s, _) = setup(1, 1, 1);
        s.users.clear();
        let links = LinkTable::build(&s).unwrap();
        let ev = Evaluator::new(&s, &links, Problem::efm()).unwrap();
        let r = exhaustive(&ev, 1).unwrap();
        assert_eq!(r.best_delta, SwitchVector::all_off(1));
        assert_eq!(r.evaluations, 2);
    }

    #[test]
    fn exhaustive_counts_and_cap() {
        let (s, links) = setup(10, 50, 2);
        let ev = Evaluator::new(&s, &links, Problem::efm()).unwrap();
        assert_eq!(exhaustive(&ev, 10).unwrap().evaluations, 1024);
        assert!(matches!(
            exhaustive_with_cap(&ev, 10, 8),
            Err(Error::ExhaustiveCap { gamma: 10, cap: 8 })
        ));
        assert!(matches!(
            exhaustive(&ev, 9),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn exhaustive_beats_every_candidate() {
        for problem in [
            Problem::efm(),
            Problem::wsm(WsmWeights::BALANCED),
            Problem::ecm(),
        ] {
            let (s, links) = setup(6, 60, 77);
            let ev = Evaluator::new(&s, &links, problem).unwrap();
            let r = exhaustive(&ev, 6).unwrap();
            assert!(r.feasible);
            for m in 0..64 {
                let c = ev.score(SwitchVector::from_mask(6, m)).unwrap();
                if c.feasible {
                    assert!(r.objective <= c.objective);
                }
            }
        }
    }

    #[test]
    fn greedy_keeps_all_on_when_nothing_helps() {
        let (s, links) = setup(3, 40, 3);
        let ev = Evaluator::new(
            &s,
            &links,
            Problem::wsm(WsmWeights::new(0.0, 1.0, 1.0).unwrap()),
        )
        .unwrap();
        let r = greedy(&ev, 3).unwrap();
        assert_eq!(r.best_delta, SwitchVector::all_on(3));
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn greedy_bounds_and_monotone() {
        for seed in 0..5 {
            let (s, links) = setup(6, 60, seed);
            for problem in [
                Problem::efm(),
                Problem::ecm(),
                Problem::wsm(WsmWeights::BALANCED),
            ] {
                let ev = Evaluator::new(&s, &links, problem).unwrap();
                let t = greedy_trace(&ev, 6).unwrap();
                assert!(t.result.evaluations <= 6 * 7 / 2 + 1);
                assert!(t.committed.windows(2).all(|w| w[1] <= w[0]));
                assert!(t.result.feasible);
                let ex = exhaustive(&ev, 6).unwrap();
                assert!(ex.objective <= t.result.objective);
            }
        }
    }

    #[test]
    fn ga_is_deterministic() {
        let (s, links) = setup(8, 80, 4);
        let ev = Evaluator::new(&s, &links, Problem::ecm()).unwrap();
        let cfg = GaConfig {
            seed: 99,
            ..GaConfig::default()
        };
        let a = genetic(&ev, 8, &cfg).unwrap();
        let b = genetic(&ev, 8, &cfg).unwrap();
        assert_eq!(a.best_delta, b.best_delta);
        assert_eq!(a.best_report, b.best_report);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn ga_elitism_keeps_seeded_optimum() {
        let (s, links) = setup(8, 80, 5);
        let ev = Evaluator::new(&s, &links, Problem::ecm()).unwrap();
        let ex = exhaustive(&ev, 8).unwrap();
        let cfg = GaConfig {
            generations: 5,
            seed: 1,
            ..GaConfig::default()
        };
        let r = genetic_seeded(&ev, 8, &cfg, std::slice::from_ref(&ex.best_delta)).unwrap();
        assert_eq!(r.best_delta, ex.best_delta);
        assert_eq!(r.objective, ex.objective);
    }

    #[test]
    fn ga_config_validation() {
        let bad = [
            GaConfig {
                population: 1,
                ..GaConfig::default()
            },
            GaConfig {
                crossover_rate: 1.5,
                ..GaConfig::default()
            },
            GaConfig {
                mutation_rate: Some(-0.1),
                ..GaConfig::default()
            },
            GaConfig {
                elitism: 32,
                ..GaConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(GaConfig::default().validate().is_ok());
    }

    #[test]
    fn solver_kind_parsing() {
        assert_eq!("ga".parse::<SolverKind>().unwrap(), SolverKind::Genetic);
        assert_eq!(
            "Exhaustive".parse::<SolverKind>().unwrap(),
            SolverKind::Exhaustive
        );
        assert!("anneal".parse::<SolverKind>().is_err());
    }
}
