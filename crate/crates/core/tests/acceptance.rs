//! Acceptance checks. Criteria run sequentially inside one test so that the
//! wall-clock limits are measured without competing test threads. Each
//! criterion prints one PASS/FAIL line; the test fails if any criterion does.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use cellswitch::harness::{run_demo_fig4, run_sweep, Scope, SweepRow, SweepSpec, DEMO_SEED};
use cellswitch::objectives::{self, Baseline};
use cellswitch::power::{bs_power, power_for_loads};
use cellswitch::propagation::{self, LinkDraw};
use cellswitch::radio::{associate, sinr};
use cellswitch::scenario::{BsKind, UserClass};
use cellswitch::solvers::{self, GaConfig};
use cellswitch::{
    generate_scenario, AssociationState, Evaluator, Formulation, LinkTable, Problem, RadioParams,
    Scenario, ScenarioConfig, SolverKind, SwitchVector, WsmWeights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    elapsed: Duration,
    limit: Option<Duration>,
    notes: Vec<String>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.failures.is_empty() && self.limit.is_none_or(|l| self.elapsed < l)
    }

    fn print(&self) {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let limit = self
            .limit
            .map(|l| format!(" (limit {:.0} s)", l.as_secs_f64()))
            .unwrap_or_default();
        println!(
            "{verdict} [{}] {} in {:.2} s{limit}",
            self.id,
            self.title,
            self.elapsed.as_secs_f64()
        );
        for n in &self.notes {
            println!("       {n}");
        }
        for f in self.failures.iter().take(10) {
            println!("       failure: {f}");
        }
        if self.failures.len() > 10 {
            println!("       ... {} more failures", self.failures.len() - 10);
        }
    }
}

fn run(
    id: &'static str,
    title: &'static str,
    limit: Option<Duration>,
    body: impl FnOnce(&mut Vec<String>, &mut Vec<String>),
) -> Outcome {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    body(&mut failures, &mut notes);
    Outcome {
        id,
        title,
        failures,
        elapsed: started.elapsed(),
        limit,
        notes,
    }
}

fn close(failures: &mut Vec<String>, what: &str, got: f64, want: f64) {
    let tol = 1e-9 * want.abs().max(1e-300);
    if (got - want).abs() > tol {
        failures.push(format!("{what}: got {got:.15}, want {want:.15}"));
    }
}

fn formula_fidelity(failures: &mut Vec<String>) {
    let draw = |z: f64| LinkDraw {
        shadow_z: z,
        fading_db: 0.0,
    };
    let params = |bel: f64| RadioParams {
        bel_db: bel,
        ..RadioParams::default()
    };
    use UserClass::*;

    let los = [
        (1000.0, 2.0, 0.0, 0.0, Outdoor, 100.02059991327963),
        (250.0, 3.5, 0.5, 20.0, HighLossIndoor, 123.63604107779034),
        (35.7, 2.0, -1.2, 5.0, LowLossIndoor, 70.37930066774787),
    ];
    for (d, f, z, bel, class, want) in los {
        let got = propagation::path_loss_tn_los(d, f, &params(bel), class, &draw(z)).unwrap();
        close(failures, &format!("tn los d={d}"), got.total_db, want);
    }

    let nlos = [
        (1000.0, 2.0, 0.0, 0.0, Outdoor, 128.56059991327962),
        (480.0, 2.0, 1.5, 25.0, HighLossIndoor, 162.99783703454725),
        (60.0, 6.0, -0.8, 10.0, LowLossIndoor, 108.64756251918219),
    ];
    for (d, f, z, bel, class, want) in nlos {
        let got = propagation::path_loss_tn_nlos(d, f, &params(bel), class, &draw(z)).unwrap();
        close(failures, &format!("tn nlos d={d}"), got.total_db, want);
    }

    let haps = [
        (20_000.0, 2.0, 0.0, Outdoor, 125.99119982655925),
        (25_000.0, 2.0, 15.0, HighLossIndoor, 152.92940008672036),
        (20_500.3, 28.0, 30.0, LowLossIndoor, 181.12836495760948),
    ];
    for (d, f, bel, class, want) in haps {
        let got = propagation::path_loss_haps(d, f, &params(bel), class).unwrap();
        close(failures, &format!("haps d={d}"), got.total_db, want);
    }

    let s = generate_scenario(
        &ScenarioConfig {
            gamma: 3,
            chi: 1,
            ..ScenarioConfig::default()
        },
        1,
    )
    .unwrap();
    let sbs = &s.base_stations[0];
    let mbs = &s.base_stations[s.mbs_index()];
    let haps_bs = &s.base_stations[s.haps_index()];
    close(
        failures,
        "power sbs 0.37",
        bs_power(sbs, 0.37, true).unwrap(),
        62.069809653899455,
    );
    close(
        failures,
        "power mbs 1.0",
        bs_power(mbs, 1.0, true).unwrap(),
        317.1103701601436,
    );
    close(
        failures,
        "power haps idle",
        bs_power(haps_bs, 0.0, true).unwrap(),
        130.0,
    );
    close(
        failures,
        "power sbs sleep",
        bs_power(sbs, 0.0, false).unwrap(),
        39.0,
    );

    let cases = [
        (
            [true, false, true, true, true],
            [0.2, 0.0, 0.0, 0.5, 0.1],
            526.5472002873832,
        ),
        (
            [false, false, false, true, true],
            [0.0, 0.0, 0.0, 1.0, 0.25],
            610.8879627001795,
        ),
        ([true; 5], [1.0; 5], 851.4354131897422),
    ];
    for (active, loads, want) in cases {
        let got = power_for_loads(&s, &active, &loads).unwrap().total;
        close(failures, &format!("network power {active:?}"), got, want);
    }

    let links = LinkTable::from_rx_dbm(5, &[-70.0, -80.0, -90.0, -95.0, -85.0]);
    close(
        failures,
        "noise dBm",
        s.radio.noise_power_dbm,
        -114.44727494896694,
    );
    close(
        failures,
        "sinr all on",
        sinr(&s, &links, 0, 0, &[true; 5]),
        6.9050774001780395,
    );
    close(
        failures,
        "sinr sbs2 off",
        sinr(&s, &links, 0, 4, &[true, false, true, true, true]),
        0.031210849801601614,
    );
    close(
        failures,
        "sinr sbs1,2 off",
        sinr(&s, &links, 0, 2, &[false, false, true, true, true]),
        0.28718327754555933,
    );

    let rss = [
        (sbs, 100.02059991327963, -62.020599913279625),
        (haps_bs, 125.99119982655925, -79.99119982655925),
        (sbs, 162.99783703454725, -124.99783703454725),
    ];
    for (bs, loss, want) in rss {
        let l = propagation::LinkLoss {
            total_db: loss,
            ..Default::default()
        };
        close(
            failures,
            "received power",
            propagation::received_power(bs, &l),
            want,
        );
    }

    let big = generate_scenario(&ScenarioConfig::default(), 1).unwrap();
    let p_max = objectives::p_max(&big).unwrap();
    close(failures, "p_max", p_max, 1358.2696498851374);
    let wsm = [
        (
            800.0,
            10,
            20,
            WsmWeights::QOS_DOMINANT,
            600,
            0.6389846688893125,
        ),
        (950.5, 0, 3, WsmWeights::BALANCED, 200, 0.7035374097241144),
        (
            700.0,
            55,
            120,
            WsmWeights::POWER_DOMINANT,
            1200,
            0.5299449186114819,
        ),
    ];
    for (p, u, d, w, chi, want) in wsm {
        let got = objectives::wsm_score(p, u, d, &w, p_max, chi).unwrap();
        close(failures, &format!("wsm {w}"), got, want);
    }
}

fn oracle_instance(seed: u64) -> Scenario {
    generate_scenario(
        &ScenarioConfig {
            gamma: 6,
            chi: 60,
            ..ScenarioConfig::default()
        },
        seed,
    )
    .unwrap()
}

fn oracle_equivalence(failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let ga = GaConfig::default();
    let problems = [
        ("efm", Problem::efm()),
        ("wsm(1,0.3,0.25)", Problem::wsm(WsmWeights::BALANCED)),
        ("ecm", Problem::ecm()),
    ];
    let instances: Vec<(Scenario, LinkTable)> = (1..=20u64)
        .map(|seed| {
            let s = oracle_instance(seed);
            let links = LinkTable::build(&s).unwrap();
            (s, links)
        })
        .collect();
    for (label, problem) in problems {
        let mut ga_hits = 0;
        let mut greedy_hits = 0;
        let mut nontrivial = 0;
        for (seed, (s, links)) in (1..).zip(&instances) {
            let ev = Evaluator::new(s, links, problem).unwrap();
            let ex = solvers::exhaustive(&ev, 6).unwrap();
            nontrivial += (!ex.best_delta.is_all_on()) as usize;

            let mut best = None;
            for mask in 0..64u64 {
                let c = ev.score(SwitchVector::from_mask(6, mask)).unwrap();
                if c.feasible && best.is_none_or(|b| c.objective < b) {
                    best = Some(c.objective);
                }
            }
            if !ex.feasible || Some(ex.objective) != best {
                failures.push(format!(
                    "{label} seed {seed}: exhaustive {} vs re-enumerated optimum {best:?}",
                    ex.objective
                ));
            }

            let gr = solvers::greedy(&ev, 6).unwrap();
            let gen = solvers::genetic(&ev, 6, &ga).unwrap();
            for (name, r) in [("greedy", &gr), ("ga", &gen)] {
                if !r.feasible || r.objective < ex.objective {
                    failures.push(format!(
                        "{label} seed {seed}: {name} objective {} below exhaustive {}",
                        r.objective, ex.objective
                    ));
                }
            }
            greedy_hits += (gr.objective == ex.objective) as usize;
            ga_hits += (gen.objective == ex.objective) as usize;
        }
        notes.push(format!(
            "{label}: GA matched {ga_hits}/20, greedy {greedy_hits}/20, optimum switches SBSs off on {nontrivial}/20"
        ));
        if ga_hits < 18 {
            failures.push(format!("{label}: GA matched only {ga_hits}/20 (need 18)"));
        }
    }
}

/// Independent re-check of the εCM constraints from raw associations.
fn ecm_violations(s: &Scenario, links: &LinkTable, delta: &SwitchVector) -> Vec<String> {
    let before = associate(s, &SwitchVector::all_on(s.gamma()), links).unwrap();
    let after = associate(s, delta, links).unwrap();
    let unconnected = |st: &AssociationState| st.serving.iter().filter(|b| b.is_none()).count();
    let mut out = Vec::new();
    let (ub, ua) = (unconnected(&before), unconnected(&after));
    if ua > ub {
        out.push(format!("U_a {ua} > U_b {ub} for {delta}"));
    }
    for u in 0..s.users.len() {
        let both = before.serving[u].is_some() && after.serving[u].is_some();
        if both && after.rate[u] < before.rate[u] {
            out.push(format!(
                "user {u}: R_a {} < R_b {} for {delta}",
                after.rate[u], before.rate[u]
            ));
        }
    }
    out
}

fn ecm_hard_constraints(failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut switched = 0;
    for case in 0..100 {
        let gamma = rng.random_range(2..=8);
        let chi = rng.random_range(10..=200);
        let cfg = ScenarioConfig {
            gamma,
            chi,
            ..ScenarioConfig::default()
        };
        let mut s = generate_scenario(&cfg, rng.random()).unwrap();
        s.radio.bel_db = 5.0 * rng.random_range(0..=6) as f64;
        let links = LinkTable::build(&s).unwrap();
        let ev = Evaluator::new(&s, &links, Problem::ecm()).unwrap();
        let ga = GaConfig {
            seed: case,
            ..GaConfig::default()
        };
        for kind in SolverKind::ALL {
            let r = solvers::solve(kind, &ev, &ga, 20).unwrap();
            checked += 1;
            switched += (!r.best_delta.is_all_on()) as usize;
            for v in ecm_violations(&s, &links, &r.best_delta) {
                failures.push(format!("case {case} {kind}: {v}"));
            }
        }
    }
    notes.push(format!(
        "{checked} solver outputs checked, {switched} switched at least one SBS off, {} violations",
        failures.len()
    ));
}

fn rows_of(
    rows: &[SweepRow],
    formulation: Formulation,
    weights: Option<WsmWeights>,
) -> impl Iterator<Item = &SweepRow> {
    rows.iter().filter(move |r| {
        r.problem.formulation == formulation && weights.is_none_or(|w| r.problem.weights == w)
    })
}

fn efm_energy(rows: &[SweepRow], failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let mut n = 0;
    for r in rows_of(rows, Formulation::Efm, None) {
        n += 1;
        if r.power_after_w > r.power_before_w {
            failures.push(format!(
                "bel {} users {} {}: {} W > {} W",
                r.bel_db,
                r.users,
                r.scope.label(),
                r.power_after_w,
                r.power_before_w
            ));
        }
    }
    notes.push(format!("{n} EFM rows checked"));
    if n == 0 {
        failures.push("no EFM rows".into());
    }
}

fn trends(rows: &[SweepRow], failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let high = Scope::Class(UserClass::HighLossIndoor);

    let mut by_bel: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    let mut by_density: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows_of(rows, Formulation::Efm, None).filter(|r| r.scope == high) {
        by_bel
            .entry((r.bel_db * 1000.0) as i64)
            .or_default()
            .push(r.rate_after_bps);
        by_density
            .entry(r.users)
            .or_default()
            .push((r.bel_db, r.rate_after_bps));
    }
    let means: Vec<(f64, f64)> = by_bel
        .iter()
        .map(|(b, v)| (*b as f64 / 1000.0, v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    notes.push(format!(
        "(a) EFM high-loss indoor mean rate after, kbit/s by BEL: {}",
        means
            .iter()
            .map(|(b, m)| format!("{b}:{:.1}", m / 1e3))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    for w in means.windows(2) {
        if w[1].1 > w[0].1 {
            failures.push(format!(
                "(a) mean rate rises from BEL {} to {}",
                w[0].0, w[1].0
            ));
        }
    }
    for (users, series) in &by_density {
        let rises: Vec<String> = series
            .windows(2)
            .filter(|w| w[1].1 > w[0].1)
            .map(|w| format!("{}->{}", w[0].0, w[1].0))
            .collect();
        if !rises.is_empty() {
            notes.push(format!(
                "(a) info: at {users} users the per-density curve rises at BEL {}",
                rises.join(", ")
            ));
        }
    }

    let mut qos = 0;
    for r in rows_of(rows, Formulation::Wsm, Some(WsmWeights::QOS_DOMINANT)) {
        qos += 1;
        if !r.all_on || r.rate_after_bps != r.rate_before_bps || r.dissatisfied != 0.0 {
            failures.push(format!(
                "(b) bel {} users {} {}: all_on {} rate {} -> {} D {}",
                r.bel_db,
                r.users,
                r.scope.label(),
                r.all_on,
                r.rate_before_bps,
                r.rate_after_bps,
                r.dissatisfied
            ));
        }
    }
    notes.push(format!("(b) {qos} WSM(1,1,1) rows checked"));

    let mut pd = 0;
    for r in rows_of(rows, Formulation::Wsm, Some(WsmWeights::POWER_DOMINANT)) {
        pd += 1;
        if r.power_after_w > r.power_before_w {
            failures.push(format!(
                "(c) bel {} users {}: {} W > {} W",
                r.bel_db, r.users, r.power_after_w, r.power_before_w
            ));
        }
    }
    notes.push(format!("(c) {pd} WSM(1,0.1,0.1) rows checked"));
    if qos == 0 || pd == 0 || means.is_empty() {
        failures.push("sweep produced no rows for a trend".into());
    }
}

fn demo(failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let report = run_demo_fig4(DEMO_SEED).unwrap();
    let s = &report.scenario;
    if s.gamma() != 3 || s.users.len() != 10 {
        failures.push(format!(
            "demo has {} SBSs and {} users",
            s.gamma(),
            s.users.len()
        ));
    }
    let off = report.switched_off();
    notes.push(format!(
        "seed {DEMO_SEED}: switched off SBS index {off:?}, least loaded {}",
        report.least_loaded_sbs
    ));
    if off != vec![report.least_loaded_sbs] {
        failures.push(format!(
            "switched off {off:?}, least-loaded is {}",
            report.least_loaded_sbs
        ));
    }
    let mbs = s.mbs_index();
    if s.base_stations[mbs].kind != BsKind::Mbs {
        failures.push("MBS index mismatch".into());
    }
    let moved: Vec<usize> = report.before.users_of(report.least_loaded_sbs).collect();
    if moved.iter().any(|&u| report.after.serving[u] != Some(mbs)) {
        failures.push(format!("users {moved:?} were not all offloaded to the MBS"));
    }
    let links = LinkTable::build(s).unwrap();
    let baseline = Baseline::compute(s, &links).unwrap();
    let after = associate(s, &report.delta, &links).unwrap();
    if after != report.after {
        failures.push("reported association differs from recomputation".into());
    }
    let u = objectives::count_unconnected(&after);
    if !objectives::ecm_feasible(&baseline, &after, u, Default::default()) || !report.ecm_feasible {
        failures.push("εCM constraints do not hold".into());
    }
    failures.extend(ecm_violations(s, &links, &report.delta));
}

fn cli(args: &[&str], out: &std::path::Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_cellswitch"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism(failures: &mut Vec<String>, notes: &mut Vec<String>) {
    let invocations: [&[&str]; 5] = [
        &[
            "sweep",
            "--users-list",
            "60,120",
            "--bel-list",
            "0,15,30",
            "--snapshots",
            "2",
            "--gamma",
            "5",
            "--seed",
            "3",
            "--gnuplot",
        ],
        &[
            "sweep",
            "--users-list",
            "80",
            "--bel-list",
            "10",
            "--solver",
            "ga",
            "--formulation",
            "wsm",
            "--weights",
            "1,0.3,0.25",
            "--gamma",
            "6",
            "--snapshots",
            "1",
        ],
        &[
            "compare",
            "--users-list",
            "50,100",
            "--gamma",
            "5",
            "--seed",
            "2",
        ],
        &["demo"],
        &["scenario", "--seed", "9"],
    ];
    for args in invocations {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        match (cli(args, a.path()), cli(args, b.path())) {
            (Ok(x), Ok(y)) => {
                if x.is_empty() {
                    failures.push(format!("{args:?} wrote nothing"));
                } else if x != y {
                    failures.push(format!("{args:?} output differs between runs"));
                } else {
                    notes.push(format!(
                        "{}: {} identical",
                        args[0],
                        x.iter()
                            .map(|f| f.0.as_str())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("{args:?} failed: {e}")),
        }
    }
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();
    outcomes.push(run(
        "1",
        "formula fidelity, 1e-9 relative",
        Some(Duration::from_secs(1)),
        |f, _| formula_fidelity(f),
    ));
    outcomes.push(run(
        "2",
        "oracle equivalence on 20 instances, Γ=6, χ=60",
        Some(Duration::from_secs(30)),
        oracle_equivalence,
    ));
    outcomes.push(run(
        "3",
        "εCM hard constraints on a 100-case randomized suite",
        None,
        ecm_hard_constraints,
    ));

    let mut rows = Vec::new();
    let trend = run(
        "5",
        "trend reproduction on the full default sweep (Γ=10, χ≤1200)",
        Some(Duration::from_secs(120)),
        |f, n| {
            rows = run_sweep(&SweepSpec::default(), &ScenarioConfig::default()).unwrap();
            n.push(format!("full sweep: {} rows", rows.len()));
            trends(&rows, f, n)
        },
    );
    outcomes.push(run(
        "4",
        "EFM power after <= before in every sweep row",
        None,
        |f, n| efm_energy(&rows, f, n),
    ));
    outcomes.push(trend);
    outcomes.push(run(
        "6",
        "three-SBS demo switches off the least-loaded SBS",
        None,
        demo,
    ));
    outcomes.push(run(
        "7",
        "CLI output is byte-identical across reruns",
        None,
        determinism,
    ));

    for o in &outcomes {
        o.print();
    }
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.id)
        .collect();
    println!(
        "acceptance: {}/{} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
