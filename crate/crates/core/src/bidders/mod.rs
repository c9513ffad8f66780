//! Bid discretization and the baseline autobidders.
//!
//! Every controller plays the cold-start bid `b0` on its first step and
//! afterwards adjusts a real-valued control level. Spend rates are measured
//! per unit of traffic share rather than per wall-clock hour.

mod alm;
mod broi;
mod mpid;
mod mystique;
mod params;
mod pid;
mod tapid;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::TrafficWindow;

pub use alm::{alm_increment, Alm, AlmParams};
pub use broi::{broi_bid, Broi, BroiParams};
pub use mpid::{optimal_bid, MPid, MPidParams};
pub use mystique::{mystique_increment, Mystique, MystiqueParams};
pub use params::{AlgorithmParams, BidderParams};
pub use pid::{PidGains, TrafficPid};
pub use tapid::{TaPid, TaPidParams};

/// Control levels are clamped to this magnitude; `gamma^1000` is far
/// beyond any bin present in auction data and still finite.
pub const DELTA_LIMIT: f64 = 1000.0;

/// Relative tolerance used to snap `log(bid)/log(gamma)` onto an integer
/// when the bid is an exact power of gamma up to rounding.
const BIN_SNAP: f64 = 1e-9;

/// `floor(log(bid) / log(gamma))`.
pub fn bin_of(bid: f64, gamma: f64) -> Result<i32> {
    if !(bid > 0.0) || !bid.is_finite() {
        return Err(Error::InvalidArgument(format!("bid must be positive, got {bid}")));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidArgument(format!("gamma must exceed 1, got {gamma}")));
    }
    let x = bid.ln() / gamma.ln();
    let nearest = x.round();
    let bin = if (x - nearest).abs() <= BIN_SNAP * nearest.abs().max(1.0) {
        nearest
    } else {
        x.floor()
    };
    Ok(bin.clamp(i32::MIN as f64, i32::MAX as f64) as i32)
}

/// `gamma^delta`.
pub fn bid_of(delta: f64, gamma: f64) -> f64 {
    gamma.powf(delta)
}

pub fn log_gamma(bid: f64, gamma: f64) -> f64 {
    bid.ln() / gamma.ln()
}

pub(crate) fn clamp_delta(delta: f64) -> f64 {
    delta.clamp(-DELTA_LIMIT, DELTA_LIMIT)
}

/// Campaign-level constants handed to a bidder before its first step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CampaignContext {
    pub campaign_id: u64,
    /// Initial budget `B0`, minor money units.
    pub budget: f64,
    /// CPC cap `C` in minor money units per click.
    pub cpc_limit: f64,
    pub gamma: f64,
    /// Traffic mass over the whole campaign.
    pub traffic_total: f64,
    pub hours: usize,
}

/// What a bidder sees at the start of each hourly step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub step: usize,
    pub now: i64,
    pub balance: f64,
    pub spent_total: f64,
    pub spend_last_step: f64,
    pub clicks_last_step: f64,
    pub contacts_last_step: f64,
    pub clicks_total: f64,
    pub traffic: TrafficWindow,
    pub ctr: f64,
    pub cvr: f64,
}

/// A per-campaign bidding policy. A non-positive bid abstains.
pub trait Bidder {
    fn begin(&mut self, ctx: &CampaignContext);

    fn bid(&mut self, obs: &Observation) -> f64;

    /// Current control level, when the algorithm keeps one.
    fn delta(&self) -> Option<f64> {
        None
    }
}

impl<B: Bidder + ?Sized> Bidder for Box<B> {
    fn begin(&mut self, ctx: &CampaignContext) {
        (**self).begin(ctx)
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        (**self).bid(obs)
    }

    fn delta(&self) -> Option<f64> {
        (**self).delta()
    }
}

/// Plays the same bid every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantBid(pub f64);

impl Bidder for ConstantBid {
    fn begin(&mut self, _: &CampaignContext) {}

    fn bid(&mut self, _: &Observation) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "alm")]
    Alm,
    #[serde(rename = "tapid")]
    TaPid,
    #[serde(rename = "mpid")]
    MPid,
    #[serde(rename = "mystique")]
    Mystique,
    #[serde(rename = "broi")]
    Broi,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Alm,
        Algorithm::TaPid,
        Algorithm::MPid,
        Algorithm::Mystique,
        Algorithm::Broi,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Alm => "alm",
            Algorithm::TaPid => "tapid",
            Algorithm::MPid => "mpid",
            Algorithm::Mystique => "mystique",
            Algorithm::Broi => "broi",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Alm => "ALM",
            Algorithm::TaPid => "TA-PID",
            Algorithm::MPid => "M-PID",
            Algorithm::Mystique => "Mystique",
            Algorithm::Broi => "BROI",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match norm.as_str() {
            "alm" | "linear" => Ok(Algorithm::Alm),
            "tapid" => Ok(Algorithm::TaPid),
            "mpid" => Ok(Algorithm::MPid),
            "mystique" => Ok(Algorithm::Mystique),
            "broi" => Ok(Algorithm::Broi),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Any of the five baselines behind one type.
#[derive(Debug, Clone)]
pub enum AnyBidder {
    Alm(Alm),
    TaPid(TaPid),
    MPid(MPid),
    Mystique(Mystique),
    Broi(Broi),
}

impl AnyBidder {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AnyBidder::Alm(_) => Algorithm::Alm,
            AnyBidder::TaPid(_) => Algorithm::TaPid,
            AnyBidder::MPid(_) => Algorithm::MPid,
            AnyBidder::Mystique(_) => Algorithm::Mystique,
            AnyBidder::Broi(_) => Algorithm::Broi,
        }
    }
}

impl Bidder for AnyBidder {
    fn begin(&mut self, ctx: &CampaignContext) {
        match self {
            AnyBidder::Alm(b) => b.begin(ctx),
            AnyBidder::TaPid(b) => b.begin(ctx),
            AnyBidder::MPid(b) => b.begin(ctx),
            AnyBidder::Mystique(b) => b.begin(ctx),
            AnyBidder::Broi(b) => b.begin(ctx),
        }
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        match self {
            AnyBidder::Alm(b) => b.bid(obs),
            AnyBidder::TaPid(b) => b.bid(obs),
            AnyBidder::MPid(b) => b.bid(obs),
            AnyBidder::Mystique(b) => b.bid(obs),
            AnyBidder::Broi(b) => b.bid(obs),
        }
    }

    fn delta(&self) -> Option<f64> {
        match self {
            AnyBidder::Alm(b) => b.delta(),
            AnyBidder::TaPid(b) => b.delta(),
            AnyBidder::MPid(b) => b.delta(),
            AnyBidder::Mystique(b) => b.delta(),
            AnyBidder::Broi(b) => b.delta(),
        }
    }
}
