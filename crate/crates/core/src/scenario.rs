//! Network world: base station layout, user placement and random-walk mobility.
//!
//! Base stations are stored in a fixed order: the `gamma` small cells first,
//! then the macro cell, then the HAPS super-macro cell. Every index used
//! elsewhere in the crate (switch vectors, link tables, association state)
//! follows this order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::RadioParams;
use crate::rng::{stream_rng, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsKind {
    Sbs,
    Mbs,
    HapsSmbs,
}

impl BsKind {
    pub fn is_terrestrial(self) -> bool {
        !matches!(self, BsKind::HapsSmbs)
    }

    pub fn label(self) -> &'static str {
        match self {
            BsKind::Sbs => "SBS",
            BsKind::Mbs => "MBS",
            BsKind::HapsSmbs => "HAPS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserClass {
    HighLossIndoor,
    LowLossIndoor,
    Outdoor,
}

impl UserClass {
    pub const ALL: [UserClass; 3] = [
        UserClass::HighLossIndoor,
        UserClass::LowLossIndoor,
        UserClass::Outdoor,
    ];

    pub fn is_indoor(self) -> bool {
        !matches!(self, UserClass::Outdoor)
    }

    pub fn label(self) -> &'static str {
        match self {
            UserClass::HighLossIndoor => "high_loss_indoor",
            UserClass::LowLossIndoor => "low_loss_indoor",
            UserClass::Outdoor => "outdoor",
        }
    }

    pub fn index(self) -> usize {
        match self {
            UserClass::HighLossIndoor => 0,
            UserClass::LowLossIndoor => 1,
            UserClass::Outdoor => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Position { x, y, z }
    }

    pub fn distance_2d(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_3d(&self, other: &Position) -> f64 {
        let d2 = self.distance_2d(other);
        d2.hypot(self.z - other.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn contains(&self, p: &Position) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width / 2.0, self.height / 2.0)
    }
}

/// Per-kind radio and EARTH power coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KindParams {
    pub transmit_power_dbm: f64,
    pub operational_power_w: f64,
    pub sleep_power_w: f64,
    pub efficiency: f64,
    pub total_rbs: u32,
    pub carrier_frequency_ghz: f64,
    /// Antenna height. Ignored for the HAPS, which uses `haps_altitude_m`.
    pub height_m: f64,
}

impl KindParams {
    pub fn sbs() -> Self {
        KindParams {
            transmit_power_dbm: 38.0,
            operational_power_w: 56.0,
            sleep_power_w: 39.0,
            efficiency: 2.6,
            total_rbs: 100,
            carrier_frequency_ghz: 2.0,
            height_m: 10.0,
        }
    }

    pub fn mbs() -> Self {
        KindParams {
            transmit_power_dbm: 46.0,
            operational_power_w: 130.0,
            sleep_power_w: 75.0,
            efficiency: 4.7,
            total_rbs: 100,
            carrier_frequency_ghz: 2.0,
            height_m: 25.0,
        }
    }

    pub fn haps() -> Self {
        KindParams {
            height_m: 20_000.0,
            ..KindParams::mbs()
        }
    }

    fn validate(&self, kind: &str) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("{kind}: {msg}")));
        if !(self.sleep_power_w < self.operational_power_w) {
            return bad("sleep power must be below operational power");
        }
        if !(self.efficiency > 0.0) {
            return bad("efficiency must be positive");
        }
        if self.total_rbs < 1 {
            return bad("total_rbs must be at least 1");
        }
        if !(self.carrier_frequency_ghz > 0.0) {
            return bad("carrier frequency must be positive");
        }
        if !self.transmit_power_dbm.is_finite() {
            return bad("transmit power must be finite");
        }
        Ok(())
    }
}

impl Default for KindParams {
    fn default() -> Self {
        KindParams::sbs()
    }
}

/// Scenario description as read from the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub gamma: usize,
    pub chi: usize,
    pub area_m: [f64; 2],
    pub haps_altitude_m: f64,
    pub user_height_m: f64,
    pub demand_rbs: u32,
    /// Random-walk step per mobility tick, metres.
    pub step_size_m: f64,
    /// SBS offset from its grid cell centre, as a fraction of the cell size.
    pub sbs_jitter: f64,
    pub sbs: KindParams,
    pub mbs: KindParams,
    pub haps: KindParams,
    pub radio: RadioParams,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            gamma: 10,
            chi: 600,
            area_m: [1000.0, 1000.0],
            haps_altitude_m: 20_000.0,
            user_height_m: 1.5,
            demand_rbs: 1,
            step_size_m: 5.0,
            sbs_jitter: 0.25,
            sbs: KindParams::sbs(),
            mbs: KindParams::mbs(),
            haps: KindParams::haps(),
            radio: RadioParams::default(),
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let [w, h] = self.area_m;
        if !(w > 0.0 && h > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "area must have positive size, got {w} x {h}"
            )));
        }
        if self.gamma == 0 {
            return Err(Error::InvalidConfig("gamma must be at least 1".into()));
        }
        if self.chi == 0 {
            return Err(Error::InvalidConfig("chi must be at least 1".into()));
        }
        if self.demand_rbs == 0 {
            return Err(Error::InvalidConfig("demand_rbs must be at least 1".into()));
        }
        if !(self.step_size_m >= 0.0) {
            return Err(Error::InvalidConfig(
                "step size must be non-negative".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.sbs_jitter) {
            return Err(Error::InvalidConfig(
                "sbs_jitter must lie in [0, 0.5)".into(),
            ));
        }
        self.sbs.validate("sbs")?;
        self.mbs.validate("mbs")?;
        self.haps.validate("haps")?;
        self.radio.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub kind: BsKind,
    pub position: Position,
    pub transmit_power_dbm: f64,
    pub operational_power_w: f64,
    pub sleep_power_w: f64,
    pub efficiency: f64,
    pub total_rbs: u32,
    pub carrier_frequency_ghz: f64,
}

impl BaseStation {
    pub fn from_params(id: usize, kind: BsKind, position: Position, p: &KindParams) -> Self {
        BaseStation {
            id,
            kind,
            position,
            transmit_power_dbm: p.transmit_power_dbm,
            operational_power_w: p.operational_power_w,
            sleep_power_w: p.sleep_power_w,
            efficiency: p.efficiency,
            total_rbs: p.total_rbs,
            carrier_frequency_ghz: p.carrier_frequency_ghz,
        }
    }

    pub fn transmit_power_w(&self) -> f64 {
        crate::units::dbm_to_watts(self.transmit_power_dbm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub position: Position,
    pub class: UserClass,
    pub demand_rbs: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub area: Area,
    pub base_stations: Vec<BaseStation>,
    pub users: Vec<User>,
    pub radio: RadioParams,
    pub seed: u64,
    /// Number of mobility steps applied since generation.
    pub step: u64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Number of small cells, Γ.
    pub fn gamma(&self) -> usize {
        self.base_stations
            .iter()
            .filter(|b| b.kind == BsKind::Sbs)
            .count()
    }

    pub fn chi(&self) -> usize {
        self.users.len()
    }

    pub fn sbs_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.base_stations
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind == BsKind::Sbs)
            .map(|(i, _)| i)
    }

    pub fn mbs_index(&self) -> usize {
        self.index_of(BsKind::Mbs)
    }

    pub fn haps_index(&self) -> usize {
        self.index_of(BsKind::HapsSmbs)
    }

    fn index_of(&self, kind: BsKind) -> usize {
        self.base_stations
            .iter()
            .position(|b| b.kind == kind)
            .expect("scenario holds one MBS and one HAPS")
    }

    pub fn class_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for u in &self.users {
            counts[u.class.index()] += 1;
        }
        counts
    }

    /// Seed for the per-snapshot stochastic link draws.
    pub fn snapshot_seed(&self) -> u64 {
        let mut rng = stream_rng(self.seed, Domain::Snapshot, self.step);
        rng.random()
    }

    pub fn with_radio(&self, radio: RadioParams) -> Scenario {
        Scenario {
            radio,
            ..self.clone()
        }
    }
}

/// Builds a scenario from `config`. Identical inputs yield identical scenarios.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let [width, height] = config.area_m;
    let area = Area { width, height };
    let mut rng = stream_rng(seed, Domain::Layout, 0);

    let mut base_stations = Vec::with_capacity(config.gamma + 2);
    let cols = (config.gamma as f64).sqrt().ceil() as usize;
    let rows = config.gamma.div_ceil(cols);
    let cell_w = width / cols as f64;
    let cell_h = height / rows as f64;
    for s in 0..config.gamma {
        let (r, c) = (s / cols, s % cols);
        let jx = rng.random_range(-config.sbs_jitter..=config.sbs_jitter) * cell_w;
        let jy = rng.random_range(-config.sbs_jitter..=config.sbs_jitter) * cell_h;
        let x = (c as f64 + 0.5) * cell_w + jx;
        let y = (r as f64 + 0.5) * cell_h + jy;
        base_stations.push(BaseStation::from_params(
            s,
            BsKind::Sbs,
            Position::new(x, y, config.sbs.height_m),
            &config.sbs,
        ));
    }
    let (cx, cy) = area.center();
    base_stations.push(BaseStation::from_params(
        config.gamma,
        BsKind::Mbs,
        Position::new(cx, cy, config.mbs.height_m),
        &config.mbs,
    ));
    base_stations.push(BaseStation::from_params(
        config.gamma + 1,
        BsKind::HapsSmbs,
        Position::new(cx, cy, config.haps_altitude_m),
        &config.haps,
    ));

    let users = (0..config.chi)
        .map(|id| User {
            id,
            position: Position::new(
                rng.random_range(0.0..=width),
                rng.random_range(0.0..=height),
                config.user_height_m,
            ),
            class: UserClass::ALL[id % 3],
            demand_rbs: config.demand_rbs,
        })
        .collect();

    Ok(Scenario {
        area,
        base_stations,
        users,
        radio: config.radio.clone(),
        seed,
        step: 0,
    })
}

/// Folds a coordinate back into `[0, limit]` by mirror reflection at the walls.
pub fn reflect(v: f64, limit: f64) -> f64 {
    let period = 2.0 * limit;
    let m = v.rem_euclid(period);
    if m > limit {
        period - m
    } else {
        m
    }
}

/// Moves every user `step_size` metres in a uniformly random direction.
pub fn step_mobility(scenario: &Scenario, step_size: f64) -> Result<Scenario> {
    if !(step_size >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "step size must be non-negative, got {step_size}"
        )));
    }
    let mut rng = stream_rng(scenario.seed, Domain::Mobility, scenario.step);
    let mut next = scenario.clone();
    for user in &mut next.users {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (dy, dx) = theta.sin_cos();
        move_user(user, dx * step_size, dy * step_size, &scenario.area);
    }
    next.step += 1;
    Ok(next)
}

fn move_user(user: &mut User, dx: f64, dy: f64, area: &Area) {
    user.position.x = reflect(user.position.x + dx, area.width);
    user.position.y = reflect(user.position.y + dy, area.height);
}
