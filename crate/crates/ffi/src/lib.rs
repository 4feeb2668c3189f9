//! C ABI over the `cellswitch` simulator.
//!
//! Scenarios and evaluators are opaque handles created and released through
//! this interface. Every fallible function returns a [`CsStatus`]; on failure
//! the message is available from [`cs_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cellswitch::objectives::{EvaluationReport, Problem, SwitchVector, WsmWeights};
use cellswitch::propagation::{self, LinkDraw};
use cellswitch::scenario::UserClass;
use cellswitch::solvers::{self, DEFAULT_EXHAUSTIVE_CAP};
use cellswitch::{
    generate_scenario, Error, Evaluator, GaConfig, LinkTable, RadioParams, Scenario,
    ScenarioConfig, SolverKind,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    InvalidConfig = 4,
    InvalidArgument = 5,
    LengthMismatch = 6,
    SolverLimit = 7,
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsFormulation {
    Efm = 0,
    Wsm = 1,
    Ecm = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsSolver {
    Exhaustive = 0,
    Greedy = 1,
    Genetic = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsLinkKind {
    TerrestrialLos = 0,
    TerrestrialNlos = 1,
    Haps = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsUserClass {
    HighLossIndoor = 0,
    LowLossIndoor = 1,
    Outdoor = 2,
}

/// Evaluation of one switch vector.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsReport {
    pub power_w: f64,
    pub unconnected: u64,
    pub dissatisfied: u64,
    pub wsm_score: f64,
    pub objective: f64,
    pub ecm_feasible: bool,
    pub feasible: bool,
}

/// A generated or loaded scenario with its link table.
pub struct CsScenario {
    scenario: Scenario,
    links: LinkTable,
}

/// A scenario bound to one optimisation problem.
pub struct CsEvaluator {
    scenario: Scenario,
    links: LinkTable,
    problem: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

struct Failure(CsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Json(_) => CsStatus::InvalidJson,
            Error::InvalidConfig(_) | Error::InvalidWeight { .. } | Error::Usage(_) => {
                CsStatus::InvalidConfig
            }
            Error::InvalidDistance(_) | Error::InvalidLoad(_) | Error::NotTerrestrial(_) => {
                CsStatus::InvalidArgument
            }
            Error::LengthMismatch { .. } => CsStatus::LengthMismatch,
            Error::ExhaustiveCap { .. } => CsStatus::SolverLimit,
            _ => CsStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CsStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside cellswitch".into());
            CsStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if text.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| Failure(CsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_delta(delta: *const u8, len: usize) -> Result<SwitchVector, Failure> {
    if delta.is_null() {
        return Err(null("delta"));
    }
    let bytes = std::slice::from_raw_parts(delta, len);
    Ok(SwitchVector::from_bits(
        &bytes.iter().map(|&b| b != 0).collect::<Vec<_>>(),
    ))
}

fn to_report(report: &EvaluationReport, problem: &Problem) -> CsReport {
    CsReport {
        power_w: report.power,
        unconnected: report.unconnected as u64,
        dissatisfied: report.dissatisfied as u64,
        wsm_score: report.wsm_score,
        objective: problem.objective(report),
        ecm_feasible: report.ecm_feasible,
        feasible: problem.feasible(report),
    }
}

fn into_handle<T>(value: T, out: *mut *mut T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Generates a scenario from a JSON `ScenarioConfig` (null for defaults).
///
/// # Safety
/// `config_json` must be null or a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_generate(
    config_json: *const c_char,
    seed: u64,
    out: *mut *mut CsScenario,
) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = if config_json.is_null() {
            ScenarioConfig::default()
        } else {
            ScenarioConfig::from_json(read_str(config_json, "config_json")?)?
        };
        let scenario = generate_scenario(&config, seed)?;
        let links = LinkTable::build(&scenario)?;
        into_handle(CsScenario { scenario, links }, out);
        Ok(())
    })
}

/// Loads a scenario previously exported as JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_from_json(
    json: *const c_char,
    out: *mut *mut CsScenario,
) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let scenario = Scenario::from_json(read_str(json, "json")?)?;
        let links = LinkTable::build(&scenario)?;
        into_handle(CsScenario { scenario, links }, out);
        Ok(())
    })
}

/// Sets the building entry loss. Link draws are keyed by the scenario seed,
/// so only the BEL term of each link changes.
///
/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_set_bel(scenario: *mut CsScenario, bel_db: f64) -> CsStatus {
    guard(|| {
        let h = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        if !(0.0..=30.0).contains(&bel_db) {
            return Err(Failure(
                CsStatus::InvalidArgument,
                format!("BEL {bel_db} outside [0, 30] dB"),
            ));
        }
        let mut radio = h.scenario.radio.clone();
        radio.bel_db = bel_db;
        h.scenario = h.scenario.with_radio(radio);
        h.links = LinkTable::build(&h.scenario)?;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_gamma(scenario: *const CsScenario) -> usize {
    scenario.as_ref().map_or(0, |h| h.scenario.gamma())
}

/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_user_count(scenario: *const CsScenario) -> usize {
    scenario.as_ref().map_or(0, |h| h.scenario.users.len())
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_free(scenario: *mut CsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Binds a copy of `scenario` to a formulation. Weights are read only for WSM.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluator_new(
    scenario: *const CsScenario,
    formulation: CsFormulation,
    alpha: f64,
    beta: f64,
    upsilon: f64,
    out: *mut *mut CsEvaluator,
) -> CsStatus {
    guard(|| {
        let h = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let problem = match formulation {
            CsFormulation::Efm => Problem::efm(),
            CsFormulation::Ecm => Problem::ecm(),
            CsFormulation::Wsm => Problem::wsm(WsmWeights::new(alpha, beta, upsilon)?),
        };
        Evaluator::new(&h.scenario, &h.links, problem)?;
        into_handle(
            CsEvaluator {
                scenario: h.scenario.clone(),
                links: h.links.clone(),
                problem,
            },
            out,
        );
        Ok(())
    })
}

/// # Safety
/// `evaluator` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluator_free(evaluator: *mut CsEvaluator) {
    if !evaluator.is_null() {
        drop(Box::from_raw(evaluator));
    }
}

/// Evaluates the switch vector `delta` (one byte per SBS, nonzero = on).
///
/// # Safety
/// `evaluator` must be a live handle, `delta` must point to `len` bytes and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_evaluate(
    evaluator: *const CsEvaluator,
    delta: *const u8,
    len: usize,
    out: *mut CsReport,
) -> CsStatus {
    guard(|| {
        let h = evaluator.as_ref().ok_or_else(|| null("evaluator"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let delta = read_delta(delta, len)?;
        let ev = Evaluator::new(&h.scenario, &h.links, h.problem)?;
        *out = to_report(&ev.evaluate(&delta)?, &h.problem);
        Ok(())
    })
}

/// Runs a solver and writes the best switch vector into `delta_out`
/// (`len` must equal Γ) and its evaluation into `out`. `ga_seed` is used
/// only by the genetic solver.
///
/// # Safety
/// `evaluator` must be a live handle, `delta_out` must point to `len`
/// writable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_solve(
    evaluator: *const CsEvaluator,
    solver: CsSolver,
    ga_seed: u64,
    delta_out: *mut u8,
    len: usize,
    out: *mut CsReport,
) -> CsStatus {
    guard(|| {
        let h = evaluator.as_ref().ok_or_else(|| null("evaluator"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if delta_out.is_null() {
            return Err(null("delta_out"));
        }
        let gamma = h.scenario.gamma();
        if len != gamma {
            return Err(Error::LengthMismatch {
                expected: gamma,
                got: len,
            }
            .into());
        }
        let kind = match solver {
            CsSolver::Exhaustive => SolverKind::Exhaustive,
            CsSolver::Greedy => SolverKind::Greedy,
            CsSolver::Genetic => SolverKind::Genetic,
        };
        let ga = GaConfig {
            seed: ga_seed,
            ..GaConfig::default()
        };
        let ev = Evaluator::new(&h.scenario, &h.links, h.problem)?;
        let result = solvers::solve(kind, &ev, &ga, DEFAULT_EXHAUSTIVE_CAP)?;
        let bytes = std::slice::from_raw_parts_mut(delta_out, len);
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = result.best_delta.is_on(i) as u8;
        }
        *out = to_report(&result.best_report, &h.problem);
        Ok(())
    })
}

/// Total path loss in dB under the default radio parameters with the given
/// BEL, a standardised shadowing draw `shadow_z` and fading off. `shadow_z`
/// is ignored for HAPS links.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cs_path_loss_db(
    kind: CsLinkKind,
    d3d_m: f64,
    f_ghz: f64,
    bel_db: f64,
    class: CsUserClass,
    shadow_z: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if !(f_ghz.is_finite() && f_ghz > 0.0) {
            return Err(Failure(
                CsStatus::InvalidArgument,
                format!("frequency {f_ghz} GHz"),
            ));
        }
        if !shadow_z.is_finite() || !bel_db.is_finite() {
            return Err(Failure(
                CsStatus::InvalidArgument,
                "non-finite input".into(),
            ));
        }
        let params = RadioParams {
            bel_db,
            ..RadioParams::default()
        };
        let class = match class {
            CsUserClass::HighLossIndoor => UserClass::HighLossIndoor,
            CsUserClass::LowLossIndoor => UserClass::LowLossIndoor,
            CsUserClass::Outdoor => UserClass::Outdoor,
        };
        let draw = LinkDraw {
            shadow_z,
            fading_db: 0.0,
        };
        let loss = match kind {
            CsLinkKind::TerrestrialLos => {
                propagation::path_loss_tn_los(d3d_m, f_ghz, &params, class, &draw)?
            }
            CsLinkKind::TerrestrialNlos => {
                propagation::path_loss_tn_nlos(d3d_m, f_ghz, &params, class, &draw)?
            }
            CsLinkKind::Haps => propagation::path_loss_haps(d3d_m, f_ghz, &params, class)?,
        };
        *out = loss.total_db;
        Ok(())
    })
}
