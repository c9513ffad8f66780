use serde::{Deserialize, Serialize};

use crate::data::AuctionStatRecord;

/// How a first-price step is charged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpCharge {
    /// Bid times the contacts surplus summed over bins up to the played one.
    #[default]
    Cumulative,
    /// Bid times the contacts surplus of the played bin only.
    ExactBin,
}

/// Expected outcomes of one step; wins count auctions, the rest are
/// expected sums.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcomes {
    pub clicks: f64,
    pub contacts: f64,
    pub visibility: f64,
    pub wins: f64,
}

impl Outcomes {
    pub fn scaled(self, f: f64) -> Outcomes {
        Outcomes {
            clicks: self.clicks * f,
            contacts: self.contacts * f,
            visibility: self.visibility * f,
            wins: self.wins * f,
        }
    }
}

pub fn vcg_expected_price<'a>(bins: impl IntoIterator<Item = &'a AuctionStatRecord>, delta: i32) -> f64 {
    bins.into_iter()
        .filter(|r| r.contact_price_bin <= delta)
        .map(|r| r.win_bid_surplus)
        .sum()
}

pub fn fp_expected_price<'a>(
    bins: impl IntoIterator<Item = &'a AuctionStatRecord>,
    delta: i32,
    bid: f64,
) -> f64 {
    let contacts: f64 = bins
        .into_iter()
        .filter(|r| r.contact_price_bin <= delta)
        .map(|r| r.contacts_surplus)
        .sum();
    bid * contacts
}

pub fn fp_exact_bin_price<'a>(
    bins: impl IntoIterator<Item = &'a AuctionStatRecord>,
    delta: i32,
    bid: f64,
) -> f64 {
    let contacts: f64 = bins
        .into_iter()
        .filter(|r| r.contact_price_bin == delta)
        .map(|r| r.contacts_surplus)
        .sum();
    bid * contacts
}

pub fn step_outcomes<'a>(bins: impl IntoIterator<Item = &'a AuctionStatRecord>, delta: i32) -> Outcomes {
    let mut out = Outcomes::default();
    for r in bins.into_iter().filter(|r| r.contact_price_bin <= delta) {
        out.clicks += r.clicks_surplus;
        out.contacts += r.contacts_surplus;
        out.visibility += r.visibility_surplus;
        out.wins += r.auction_count.unwrap_or(1.0);
    }
    out
}
