//! EARTH-style base station power model.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objectives::SwitchVector;
use crate::radio::{active_set, AssociationState};
use crate::scenario::{BaseStation, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub per_bs: Vec<f64>,
    pub total: f64,
}

impl PowerReport {
    pub fn to_csv(&self, scenario: &Scenario) -> String {
        let mut out = String::from("bs_id,kind,power_w\n");
        for (bs, p) in scenario.base_stations.iter().zip(&self.per_bs) {
            writeln!(out, "{},{},{:.6}", bs.id, bs.kind.label(), p).expect("write to String");
        }
        writeln!(out, "total,,{:.6}", self.total).expect("write to String");
        out
    }
}

/// Power draw of one BS: `P_O + η·λ·P_T` when on (P_T in watts), `P_S` asleep.
pub fn bs_power(bs: &BaseStation, load: f64, on: bool) -> Result<f64> {
    if !(0.0..=1.0).contains(&load) {
        return Err(Error::InvalidLoad(load));
    }
    if on {
        Ok(bs.operational_power_w + bs.efficiency * load * bs.transmit_power_w())
    } else if load == 0.0 {
        Ok(bs.sleep_power_w)
    } else {
        Err(Error::InvalidLoad(load))
    }
}

/// Total network power for `delta` under the loads of `state`. MBS and HAPS
/// always contribute their on-state term.
pub fn network_power(
    scenario: &Scenario,
    delta: &SwitchVector,
    state: &AssociationState,
) -> Result<PowerReport> {
    let active = active_set(scenario, delta)?;
    power_for_loads(scenario, &active, &state.load)
}

pub fn power_for_loads(scenario: &Scenario, active: &[bool], loads: &[f64]) -> Result<PowerReport> {
    let per_bs = scenario
        .base_stations
        .iter()
        .zip(active)
        .zip(loads)
        .map(|((bs, &on), &load)| bs_power(bs, if on { load } else { 0.0 }, on))
        .collect::<Result<Vec<f64>>>()?;
    let total = per_bs.iter().sum();
    Ok(PowerReport { per_bs, total })
}
