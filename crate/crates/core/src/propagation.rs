//! Link losses for terrestrial (UMa LoS/NLoS) and HAPS links, plus the
//! per-snapshot link table that freezes every stochastic draw.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Domain};
use crate::scenario::{BaseStation, BsKind, Scenario, User, UserClass};
use crate::units::{dbm_to_mw, linear_to_db};

/// Additional loss per user class, dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtraLoss {
    pub high_loss_indoor: f64,
    pub low_loss_indoor: f64,
    pub outdoor: f64,
}

impl Default for ExtraLoss {
    fn default() -> Self {
        ExtraLoss {
            high_loss_indoor: 10.0,
            low_loss_indoor: 2.0,
            outdoor: 0.0,
        }
    }
}

impl ExtraLoss {
    pub fn for_class(&self, class: UserClass) -> f64 {
        match class {
            UserClass::HighLossIndoor => self.high_loss_indoor,
            UserClass::LowLossIndoor => self.low_loss_indoor,
            UserClass::Outdoor => self.outdoor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    Off,
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioParams {
    pub bel_db: f64,
    pub extra_loss_db: ExtraLoss,
    pub atmospheric_loss_db: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    pub fading: FadingMode,
    pub rician_k_db: f64,
    pub noise_power_dbm: f64,
    pub rb_bandwidth_hz: f64,
    pub receiver_sensitivity_dbm: f64,
    /// Whether HAPS and terrestrial links interfere with each other.
    pub cross_tier_interference: bool,
}

/// Thermal noise over one RB with a 7 dB receiver noise figure.
pub fn default_noise_power_dbm(rb_bandwidth_hz: f64) -> f64 {
    -174.0 + 10.0 * rb_bandwidth_hz.log10() + 7.0
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            bel_db: 0.0,
            extra_loss_db: ExtraLoss::default(),
            atmospheric_loss_db: 1.5,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 6.0,
            fading: FadingMode::Off,
            rician_k_db: 10.0,
            noise_power_dbm: default_noise_power_dbm(180e3),
            rb_bandwidth_hz: 180e3,
            receiver_sensitivity_dbm: -100.0,
            cross_tier_interference: true,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0..=30.0).contains(&self.bel_db) {
            return bad(format!("bel_db {} outside [0, 30]", self.bel_db));
        }
        if !(self.atmospheric_loss_db >= 0.0) {
            return bad("atmospheric loss must be non-negative".into());
        }
        if !(self.rb_bandwidth_hz > 0.0) {
            return bad("rb bandwidth must be positive".into());
        }
        if self.extra_loss_db.outdoor != 0.0 {
            return bad("outdoor users carry no extra loss".into());
        }
        if !(self.shadow_sigma_los_db >= 0.0 && self.shadow_sigma_nlos_db >= 0.0) {
            return bad("shadowing sigma must be non-negative".into());
        }
        if !self.noise_power_dbm.is_finite() {
            return bad("noise power must be finite".into());
        }
        if self.receiver_sensitivity_dbm.is_nan() {
            return bad("receiver sensitivity must be a number".into());
        }
        Ok(())
    }

    /// Building entry loss seen by a user of `class`.
    pub fn bel_for(&self, class: UserClass) -> f64 {
        if class.is_indoor() {
            self.bel_db
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LosState {
    Los,
    Nlos,
}

/// Stochastic inputs of one terrestrial link: a standard-normal shadowing
/// variate (scaled by the LoS or NLoS sigma) and a fading loss in dB.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkDraw {
    pub shadow_z: f64,
    pub fading_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkLoss {
    pub base_db: f64,
    pub shadowing_db: f64,
    pub bel_db: f64,
    pub extra_db: f64,
    pub fading_db: f64,
    pub atmospheric_db: f64,
    pub total_db: f64,
}

impl LinkLoss {
    fn assemble(
        base_db: f64,
        shadowing_db: f64,
        bel_db: f64,
        extra_db: f64,
        fading_db: f64,
        atmospheric_db: f64,
    ) -> Self {
        LinkLoss {
            base_db,
            shadowing_db,
            bel_db,
            extra_db,
            fading_db,
            atmospheric_db,
            total_db: base_db + shadowing_db + bel_db + extra_db + fading_db + atmospheric_db,
        }
    }

    pub fn component_sum(&self) -> f64 {
        self.base_db
            + self.shadowing_db
            + self.bel_db
            + self.extra_db
            + self.fading_db
            + self.atmospheric_db
    }
}

fn check_distance(d3d: f64) -> Result<()> {
    if d3d > 0.0 && d3d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDistance(d3d))
    }
}

pub fn tn_los_base_db(d3d: f64, f_ghz: f64) -> f64 {
    28.0 + 22.0 * d3d.log10() + 20.0 * f_ghz.log10()
}

pub fn tn_nlos_base_db(d3d: f64, f_ghz: f64) -> f64 {
    32.54 + 30.0 * d3d.log10() + 20.0 * f_ghz.log10()
}

/// Free-space path loss with distance given in metres.
pub fn fspl_db(d3d: f64, f_ghz: f64) -> f64 {
    20.0 * (d3d / 1000.0).log10() + 20.0 * f_ghz.log10() + 92.45
}

fn fading_for(params: &RadioParams, draw: &LinkDraw) -> f64 {
    match params.fading {
        FadingMode::Off => 0.0,
        FadingMode::Stochastic => draw.fading_db,
    }
}

pub fn path_loss_tn_los(
    d3d: f64,
    f_ghz: f64,
    params: &RadioParams,
    class: UserClass,
    draw: &LinkDraw,
) -> Result<LinkLoss> {
    check_distance(d3d)?;
    Ok(LinkLoss::assemble(
        tn_los_base_db(d3d, f_ghz),
        params.shadow_sigma_los_db * draw.shadow_z,
        params.bel_for(class),
        params.extra_loss_db.for_class(class),
        fading_for(params, draw),
        0.0,
    ))
}

pub fn path_loss_tn_nlos(
    d3d: f64,
    f_ghz: f64,
    params: &RadioParams,
    class: UserClass,
    draw: &LinkDraw,
) -> Result<LinkLoss> {
    check_distance(d3d)?;
    Ok(LinkLoss::assemble(
        tn_nlos_base_db(d3d, f_ghz),
        params.shadow_sigma_nlos_db * draw.shadow_z,
        params.bel_for(class),
        params.extra_loss_db.for_class(class),
        fading_for(params, draw),
        0.0,
    ))
}

pub fn path_loss_haps(
    d3d: f64,
    f_ghz: f64,
    params: &RadioParams,
    class: UserClass,
) -> Result<LinkLoss> {
    check_distance(d3d)?;
    Ok(LinkLoss::assemble(
        fspl_db(d3d, f_ghz),
        0.0,
        params.bel_for(class),
        params.extra_loss_db.for_class(class),
        0.0,
        params.atmospheric_loss_db,
    ))
}

/// UMa line-of-sight probability for a user at or below 13 m.
pub fn los_probability_uma(d2d: f64) -> f64 {
    if d2d <= 18.0 {
        1.0
    } else {
        18.0 / d2d + (-d2d / 63.0).exp() * (1.0 - 18.0 / d2d)
    }
}

fn pair_stream(user: &User, bs: &BaseStation) -> u64 {
    ((user.id as u64) << 20) | bs.id as u64
}

fn link_rng(user: &User, bs: &BaseStation, seed: u64) -> rand_chacha::ChaCha8Rng {
    stream_rng(seed, Domain::Link, pair_stream(user, bs))
}

fn draw_los(rng: &mut impl Rng, d2d: f64) -> LosState {
    let u: f64 = rng.random();
    if u < los_probability_uma(d2d) {
        LosState::Los
    } else {
        LosState::Nlos
    }
}

pub fn los_state(user: &User, bs: &BaseStation, seed: u64) -> Result<LosState> {
    if !bs.kind.is_terrestrial() {
        return Err(Error::NotTerrestrial(bs.id));
    }
    let d2d = user.position.distance_2d(&bs.position);
    Ok(draw_los(&mut link_rng(user, bs, seed), d2d))
}

/// Fading loss in dB for a unit-mean power gain: Rician with factor `k_db`
/// under LoS, Rayleigh under NLoS.
fn draw_fading_db(rng: &mut impl Rng, state: LosState, k_db: f64) -> f64 {
    let gain = match state {
        LosState::Los => {
            let k = 10f64.powf(k_db / 10.0);
            let spec = (k / (k + 1.0)).sqrt();
            let sigma = (1.0 / (2.0 * (k + 1.0))).sqrt();
            let re: f64 = rng.sample::<f64, _>(StandardNormal) * sigma + spec;
            let im: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
            re * re + im * im
        }
        LosState::Nlos => Exp1.sample(rng),
    };
    -linear_to_db(gain.max(f64::MIN_POSITIVE))
}

/// Received signal strength in dBm.
pub fn received_power(bs: &BaseStation, loss: &LinkLoss) -> f64 {
    bs.transmit_power_dbm - loss.total_db
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub loss: LinkLoss,
    /// `None` for HAPS links.
    pub los: Option<LosState>,
    pub rx_dbm: f64,
    pub rx_mw: f64,
}

/// Every user-to-BS link of one snapshot, row-major by user.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable {
    n_bs: usize,
    links: Vec<Link>,
}

impl LinkTable {
    /// Computes all links with draws seeded from the scenario's snapshot seed.
    pub fn build(scenario: &Scenario) -> Result<Self> {
        Self::build_with_seed(scenario, scenario.snapshot_seed())
    }

    pub fn build_with_seed(scenario: &Scenario, seed: u64) -> Result<Self> {
        let params = &scenario.radio;
        let n_bs = scenario.base_stations.len();
        let mut links = Vec::with_capacity(n_bs * scenario.users.len());
        for user in &scenario.users {
            for bs in &scenario.base_stations {
                let d3d = user.position.distance_3d(&bs.position);
                let (loss, los) = match bs.kind {
                    BsKind::HapsSmbs => (
                        path_loss_haps(d3d, bs.carrier_frequency_ghz, params, user.class)?,
                        None,
                    ),
                    BsKind::Sbs | BsKind::Mbs => {
                        let mut rng = link_rng(user, bs, seed);
                        let state = draw_los(&mut rng, user.position.distance_2d(&bs.position));
                        let shadow_z: f64 = rng.sample(StandardNormal);
                        let fading_db = draw_fading_db(&mut rng, state, params.rician_k_db);
                        let draw = LinkDraw {
                            shadow_z,
                            fading_db,
                        };
                        let loss = match state {
                            LosState::Los => path_loss_tn_los(
                                d3d,
                                bs.carrier_frequency_ghz,
                                params,
                                user.class,
                                &draw,
                            )?,
                            LosState::Nlos => path_loss_tn_nlos(
                                d3d,
                                bs.carrier_frequency_ghz,
                                params,
                                user.class,
                                &draw,
                            )?,
                        };
                        (loss, Some(state))
                    }
                };
                let rx_dbm = received_power(bs, &loss);
                links.push(Link {
                    loss,
                    los,
                    rx_dbm,
                    rx_mw: dbm_to_mw(rx_dbm),
                });
            }
        }
        Ok(LinkTable { n_bs, links })
    }

    pub fn n_bs(&self) -> usize {
        self.n_bs
    }

    pub fn n_users(&self) -> usize {
        self.links.len() / self.n_bs.max(1)
    }

    pub fn get(&self, user: usize, bs: usize) -> &Link {
        &self.links[user * self.n_bs + bs]
    }

    pub fn row(&self, user: usize) -> &[Link] {
        &self.links[user * self.n_bs..(user + 1) * self.n_bs]
    }

    /// Builds a table directly from received powers, for hand-made instances.
    pub fn from_rx_dbm(n_bs: usize, rx_dbm: &[f64]) -> Self {
        assert_eq!(rx_dbm.len() % n_bs, 0, "rx table is not rectangular");
        let links = rx_dbm
            .iter()
            .map(|&rx| Link {
                loss: LinkLoss::default(),
                los: None,
                rx_dbm: rx,
                rx_mw: dbm_to_mw(rx),
            })
            .collect();
        LinkTable { n_bs, links }
    }

    /// Reorders base station columns: new column `j` takes old column `perm[j]`.
    pub fn permute_bs(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n_bs);
        let mut links = Vec::with_capacity(self.links.len());
        for u in 0..self.n_users() {
            for &old in perm {
                links.push(self.get(u, old).clone());
            }
        }
        LinkTable {
            n_bs: self.n_bs,
            links,
        }
    }
}
