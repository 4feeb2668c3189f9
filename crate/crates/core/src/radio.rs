//! SINR, user association and achievable rate.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objectives::SwitchVector;
use crate::propagation::{Link, LinkTable};
use crate::scenario::{BsKind, Scenario};
use crate::units::{dbm_to_mw, linear_to_db};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationState {
    pub serving: Vec<Option<usize>>,
    /// Linear SINR towards the serving BS; 0 for unconnected users.
    pub sinr: Vec<f64>,
    /// Achievable rate, bit/s; 0 for unconnected users.
    pub rate: Vec<f64>,
    pub rb_used: Vec<u32>,
    pub load: Vec<f64>,
}

impl AssociationState {
    pub fn unconnected(&self) -> usize {
        self.serving.iter().filter(|s| s.is_none()).count()
    }

    pub fn users_of(&self, bs: usize) -> impl Iterator<Item = usize> + '_ {
        self.serving
            .iter()
            .enumerate()
            .filter(move |(_, s)| **s == Some(bs))
            .map(|(u, _)| u)
    }

    /// CSV rows `user_id,serving_bs,sinr_db,rate_bps`; unconnected users
    /// leave the BS and SINR cells empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("user_id,serving_bs,sinr_db,rate_bps\n");
        for (u, serving) in self.serving.iter().enumerate() {
            match serving {
                Some(b) => writeln!(
                    out,
                    "{u},{b},{:.6},{:.3}",
                    linear_to_db(self.sinr[u]),
                    self.rate[u]
                ),
                None => writeln!(out, "{u},,,{:.3}", 0.0),
            }
            .expect("write to String");
        }
        out
    }
}

/// Active flags per base station; MBS and HAPS are always on.
pub fn active_set(scenario: &Scenario, delta: &SwitchVector) -> Result<Vec<bool>> {
    let gamma = scenario.gamma();
    if delta.len() != gamma {
        return Err(Error::LengthMismatch {
            expected: gamma,
            got: delta.len(),
        });
    }
    let mut sbs = 0;
    Ok(scenario
        .base_stations
        .iter()
        .map(|b| match b.kind {
            BsKind::Sbs => {
                let on = delta.is_on(sbs);
                sbs += 1;
                on
            }
            _ => true,
        })
        .collect())
}

fn interferes(scenario: &Scenario, target: usize, other: usize) -> bool {
    scenario.radio.cross_tier_interference
        || scenario.base_stations[target].kind.is_terrestrial()
            == scenario.base_stations[other].kind.is_terrestrial()
}

/// SINR of `user` towards `bs`, summing interference over every other active
/// BS in the linear (mW) domain.
pub fn sinr(
    scenario: &Scenario,
    links: &LinkTable,
    user: usize,
    bs: usize,
    active: &[bool],
) -> f64 {
    let row = links.row(user);
    let mut interference = 0.0;
    for k in 0..row.len() {
        if k != bs && active[k] && interferes(scenario, bs, k) {
            interference += row[k].rx_mw;
        }
    }
    row[bs].rx_mw / (dbm_to_mw(scenario.radio.noise_power_dbm) + interference)
}

/// Shannon rate over the user's allocated RBs.
pub fn shannon_rate(demand_rbs: u32, rb_bandwidth_hz: f64, sinr: f64) -> f64 {
    demand_rbs as f64 * rb_bandwidth_hz * (1.0 + sinr).log2()
}

pub fn achievable_rate(scenario: &Scenario, state: &AssociationState, user: usize) -> f64 {
    match state.serving[user] {
        Some(_) => shannon_rate(
            scenario.users[user].demand_rbs,
            scenario.radio.rb_bandwidth_hz,
            state.sinr[user],
        ),
        None => 0.0,
    }
}

/// Per-user SINR towards every active BS, with interference sums built from
/// prefix and suffix sums so that no large term is ever subtracted.
struct SinrRow {
    group: Vec<usize>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
}

impl SinrRow {
    fn new(scenario: &Scenario) -> Self {
        let n = scenario.base_stations.len();
        let group = scenario
            .base_stations
            .iter()
            .map(|b| {
                if scenario.radio.cross_tier_interference || b.kind.is_terrestrial() {
                    0
                } else {
                    1
                }
            })
            .collect();
        SinrRow {
            group,
            prefix: vec![0.0; 2 * (n + 1)],
            suffix: vec![0.0; 2 * (n + 1)],
        }
    }

    fn fill(&mut self, row: &[Link], active: &[bool]) {
        let n = active.len();
        let stride = n + 1;
        for g in 0..2 {
            let base = g * stride;
            let part = |k: usize| {
                if active[k] && self.group[k] == g {
                    row[k].rx_mw
                } else {
                    0.0
                }
            };
            let mut acc = 0.0;
            self.prefix[base] = 0.0;
            for k in 0..n {
                acc += part(k);
                self.prefix[base + k + 1] = acc;
            }
            acc = 0.0;
            self.suffix[base + n] = 0.0;
            for k in (0..n).rev() {
                acc += part(k);
                self.suffix[base + k] = acc;
            }
        }
    }

    fn interference(&self, bs: usize, n: usize) -> f64 {
        let base = self.group[bs] * (n + 1);
        self.prefix[base + bs] + self.suffix[base + bs + 1]
    }
}

/// Associates users in ascending id order. Each user joins the active BS with
/// the highest SINR among those meeting the sensitivity threshold and still
/// holding enough free RBs; ties go to the lower BS index.
pub fn associate(
    scenario: &Scenario,
    delta: &SwitchVector,
    links: &LinkTable,
) -> Result<AssociationState> {
    let active = active_set(scenario, delta)?;
    Ok(associate_active(scenario, &active, links))
}

pub fn associate_active(
    scenario: &Scenario,
    active: &[bool],
    links: &LinkTable,
) -> AssociationState {
    let n_bs = scenario.base_stations.len();
    let chi = scenario.users.len();
    let noise_mw = dbm_to_mw(scenario.radio.noise_power_dbm);
    let threshold = scenario.radio.receiver_sensitivity_dbm;
    let mut state = AssociationState {
        serving: vec![None; chi],
        sinr: vec![0.0; chi],
        rate: vec![0.0; chi],
        rb_used: vec![0; n_bs],
        load: vec![0.0; n_bs],
    };
    let mut row_buf = SinrRow::new(scenario);

    for (u, user) in scenario.users.iter().enumerate() {
        let row = links.row(u);
        row_buf.fill(row, active);
        let mut best: Option<(usize, f64)> = None;
        for (b, bs) in scenario.base_stations.iter().enumerate() {
            if !active[b]
                || row[b].rx_dbm < threshold
                || state.rb_used[b] + user.demand_rbs > bs.total_rbs
            {
                continue;
            }
            let gamma = row[b].rx_mw / (noise_mw + row_buf.interference(b, n_bs));
            if best.is_none_or(|(_, g)| gamma > g) {
                best = Some((b, gamma));
            }
        }
        if let Some((b, gamma)) = best {
            state.serving[u] = Some(b);
            state.sinr[u] = gamma;
            state.rate[u] = shannon_rate(user.demand_rbs, scenario.radio.rb_bandwidth_hz, gamma);
            state.rb_used[b] += user.demand_rbs;
        }
    }
    for (b, bs) in scenario.base_stations.iter().enumerate() {
        state.load[b] = state.rb_used[b] as f64 / bs.total_rbs as f64;
    }
    state
}

/// Extra path loss a user picks up when its serving BS changes. `None` if the
/// user is unconnected on either side.
pub fn delta_path_loss(
    user: usize,
    before: &AssociationState,
    after: &AssociationState,
    links: &LinkTable,
) -> Option<f64> {
    let b0 = before.serving[user]?;
    let b1 = after.serving[user]?;
    Some(links.get(user, b1).loss.total_db - links.get(user, b0).loss.total_db)
}

/// Received power after switching, from the before-switching value and the
/// extra path loss. Exact when both serving BSs share a transmit power.
pub fn rx_after_switching(rx_before_dbm: f64, delta_loss_db: f64) -> f64 {
    rx_before_dbm - delta_loss_db
}
