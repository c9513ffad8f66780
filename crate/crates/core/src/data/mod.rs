//! Dataset components: campaigns, hourly auction statistics and weekly
//! traffic profiles, plus the indexes the simulator reads from.

mod ctr;
mod io;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traffic::{TrafficProfile, WeekClock, HOUR, SLOTS_PER_WEEK};

pub use ctr::CtrIndex;
pub use io::{
    load_campaigns, load_dataset, load_stats, load_traffic, write_campaigns, write_dataset,
    write_stats, write_traffic, DatasetPaths, CAMPAIGN_COLUMNS, STATS_COLUMNS, TRAFFIC_COLUMNS,
};
pub use validate::{validate_dataset, CheckResult, ValidationReport};

/// Default base of the bid discretization, `bid = gamma^bin`.
pub const DEFAULT_GAMMA: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuctionType {
    Vcg,
    Fp,
}

impl fmt::Display for AuctionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuctionType::Vcg => "vcg",
            AuctionType::Fp => "fp",
        })
    }
}

impl FromStr for AuctionType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vcg" => Ok(AuctionType::Vcg),
            "fp" | "fpa" => Ok(AuctionType::Fp),
            other => Err(Error::InvalidArgument(format!("unknown auction type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub loc_id: u64,
    pub campaign_id: u64,
    pub item_id: u64,
    pub campaign_start_date: NaiveDate,
    pub campaign_end_date: NaiveDate,
    pub campaign_start: i64,
    pub campaign_end: i64,
    /// Integer minor money units.
    pub auction_budget: i64,
    pub microcat_ext: u64,
    /// Two-level label such as `"2.33"`, compared as a string.
    pub logical_category: String,
    pub region_id: u64,
    pub platform_p: Option<[f64; 4]>,
}

impl Campaign {
    pub fn duration(&self) -> i64 {
        self.campaign_end - self.campaign_start
    }

    pub fn duration_days(&self) -> f64 {
        self.duration() as f64 / crate::traffic::DAY as f64
    }

    /// Number of hourly steps needed to cover the lifetime.
    pub fn hours(&self) -> usize {
        if self.campaign_end <= self.campaign_start {
            0
        } else {
            ((self.duration() + HOUR - 1) / HOUR) as usize
        }
    }

    pub fn in_category(&self, prefix: &str) -> bool {
        category_matches(&self.logical_category, prefix)
    }
}

/// Component-wise prefix match on dotted labels: `"1"` matches `"1"` and
/// `"1.13"` but not `"11.2"`; `"1.1"` does not match `"1.13"`.
pub fn category_matches(label: &str, prefix: &str) -> bool {
    if prefix.is_empty() {
        return true;
    }
    label == prefix
        || (label.len() > prefix.len()
            && label.starts_with(prefix)
            && label.as_bytes()[prefix.len()] == b'.')
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionStatRecord {
    pub campaign_id: u64,
    pub item_id: u64,
    /// Start of the one-hour aggregation window.
    pub period: i64,
    pub contact_price_bin: i32,
    pub visibility_surplus: f64,
    pub clicks_surplus: f64,
    pub contacts_surplus: f64,
    /// Incremental write-off in minor money units.
    pub win_bid_surplus: f64,
    pub ctr_predict: f64,
    pub cr_predict: f64,
    pub auction_count: Option<f64>,
}

impl AuctionStatRecord {
    pub fn surpluses_nonnegative(&self) -> bool {
        [
            self.visibility_surplus,
            self.clicks_surplus,
            self.contacts_surplus,
            self.win_bid_surplus,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
            && self.auction_count.is_none_or(|c| c.is_finite() && c >= 0.0)
    }

    pub fn predictions_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.ctr_predict) && (0.0..=1.0).contains(&self.cr_predict)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficRecord {
    pub region_id: u64,
    pub dow: u8,
    pub hour: u8,
    pub traffic_share: f64,
}

/// Stats for one campaign: period start -> records sorted by bin.
pub type CampaignStats = BTreeMap<i64, Vec<AuctionStatRecord>>;

/// Immutable, fully indexed dataset.
///
/// All maps are ordered, so every aggregate computed by iterating a
/// dataset is independent of the row order of the files it came from.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub auction_type: AuctionType,
    pub gamma: f64,
    pub clock: WeekClock,
    campaigns: BTreeMap<u64, Campaign>,
    stats: BTreeMap<u64, CampaignStats>,
    traffic: BTreeMap<u64, TrafficProfile>,
    /// Regions whose traffic table did not list all 168 slots.
    incomplete_traffic: BTreeMap<u64, usize>,
    ctr: CtrIndex,
}

/// Key of a stats row that collided with an earlier one.
pub type DuplicateStat = (u64, i64, i32);

#[derive(Debug, Default)]
pub struct DatasetBuilder {
    campaigns: BTreeMap<u64, Campaign>,
    stats: BTreeMap<u64, CampaignStats>,
    traffic: BTreeMap<u64, [Option<f64>; SLOTS_PER_WEEK]>,
}

impl DatasetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later campaigns with the same id replace earlier ones.
    pub fn add_campaign(&mut self, c: Campaign) {
        self.campaigns.insert(c.campaign_id, c);
    }

    pub fn add_stat(&mut self, r: AuctionStatRecord) -> std::result::Result<(), DuplicateStat> {
        let period = self
            .stats
            .entry(r.campaign_id)
            .or_default()
            .entry(r.period)
            .or_default();
        match period.binary_search_by_key(&r.contact_price_bin, |x| x.contact_price_bin) {
            Ok(_) => Err((r.campaign_id, r.period, r.contact_price_bin)),
            Err(pos) => {
                period.insert(pos, r);
                Ok(())
            }
        }
    }

    pub fn add_traffic(&mut self, r: TrafficRecord) -> Result<()> {
        let idx = crate::traffic::slot_index(r.dow, r.hour)?;
        let slots = self.traffic.entry(r.region_id).or_insert([None; SLOTS_PER_WEEK]);
        if slots[idx].is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate traffic slot (region {}, dow {}, hour {})",
                r.region_id, r.dow, r.hour
            )));
        }
        slots[idx] = Some(r.traffic_share);
        Ok(())
    }

    pub fn add_profile(&mut self, p: &TrafficProfile) {
        let mut slots = [None; SLOTS_PER_WEEK];
        for (slot, s) in slots.iter_mut().zip(p.shares()) {
            *slot = Some(*s);
        }
        self.traffic.insert(p.region_id, slots);
    }

    pub fn build(self, auction_type: AuctionType, gamma: f64, clock: WeekClock) -> Dataset {
        let mut traffic = BTreeMap::new();
        let mut incomplete_traffic = BTreeMap::new();
        for (region, slots) in self.traffic {
            let present = slots.iter().filter(|s| s.is_some()).count();
            if present < SLOTS_PER_WEEK {
                incomplete_traffic.insert(region, present);
            }
            let shares = slots.iter().map(|s| s.unwrap_or(0.0)).collect();
            traffic.insert(region, TrafficProfile::new(region, shares).expect("168 slots"));
        }
        let ctr = CtrIndex::build(&self.campaigns, &self.stats, &clock);
        Dataset {
            auction_type,
            gamma,
            clock,
            campaigns: self.campaigns,
            stats: self.stats,
            traffic,
            incomplete_traffic,
            ctr,
        }
    }
}

impl Dataset {
    pub fn builder() -> DatasetBuilder {
        DatasetBuilder::new()
    }

    pub fn campaigns(&self) -> impl ExactSizeIterator<Item = &Campaign> + Clone {
        self.campaigns.values()
    }

    pub fn campaign(&self, id: u64) -> Option<&Campaign> {
        self.campaigns.get(&id)
    }

    pub fn n_campaigns(&self) -> usize {
        self.campaigns.len()
    }

    pub fn stats_for(&self, campaign_id: u64) -> Option<&CampaignStats> {
        self.stats.get(&campaign_id)
    }

    /// All stats, grouped by campaign id (including ids with no campaign).
    pub fn all_stats(&self) -> impl Iterator<Item = (u64, &CampaignStats)> {
        self.stats.iter().map(|(id, s)| (*id, s))
    }

    pub fn records(&self) -> impl Iterator<Item = &AuctionStatRecord> {
        self.stats.values().flat_map(|p| p.values()).flatten()
    }

    pub fn n_records(&self) -> usize {
        self.stats.values().flat_map(|p| p.values()).map(Vec::len).sum()
    }

    /// Records of the hourly window `[now, now + step)`. Records from several
    /// periods inside the window are merged in bin order.
    pub fn period_slice(&self, campaign_id: u64, now: i64, step: i64) -> Vec<&AuctionStatRecord> {
        let Some(periods) = self.stats.get(&campaign_id) else {
            return Vec::new();
        };
        let mut out: Vec<&AuctionStatRecord> = periods
            .range(now..now + step)
            .flat_map(|(_, recs)| recs.iter())
            .collect();
        out.sort_by_key(|r| r.contact_price_bin);
        out
    }

    pub fn traffic_profile(&self, region_id: u64) -> Option<&TrafficProfile> {
        self.traffic.get(&region_id)
    }

    pub fn traffic_profiles(&self) -> impl Iterator<Item = &TrafficProfile> {
        self.traffic.values()
    }

    pub(crate) fn incomplete_traffic(&self) -> &BTreeMap<u64, usize> {
        &self.incomplete_traffic
    }

    /// Profile for a campaign, falling back to uniform traffic when the
    /// region is unknown.
    pub fn profile_for(&self, c: &Campaign) -> std::borrow::Cow<'_, TrafficProfile> {
        match self.traffic.get(&c.region_id) {
            Some(p) => std::borrow::Cow::Borrowed(p),
            None => std::borrow::Cow::Owned(TrafficProfile::uniform(c.region_id)),
        }
    }

    pub fn ctr_index(&self) -> &CtrIndex {
        &self.ctr
    }

    /// Mean CTR and CVR predictions for a category, hour of week and bin range.
    ///
    /// Empty groups fall back to the category mean, then to the global mean,
    /// then to `(0, 0)`.
    pub fn estimate_ctr_cvr(&self, category: &str, hour_of_week: usize, bins: (i32, i32)) -> (f64, f64) {
        self.ctr.estimate(category, hour_of_week, bins)
    }

    /// Copy of the dataset restricted to the given campaigns.
    pub fn subset(&self, keep: impl Fn(&Campaign) -> bool) -> Dataset {
        let mut b = DatasetBuilder::new();
        for c in self.campaigns.values().filter(|c| keep(c)) {
            b.add_campaign(c.clone());
            if let Some(s) = self.stats.get(&c.campaign_id) {
                b.stats.insert(c.campaign_id, s.clone());
            }
        }
        for p in self.traffic.values() {
            b.add_profile(p);
        }
        b.build(self.auction_type, self.gamma, self.clock)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn category_prefix_is_component_wise() {
        assert!(category_matches("1.13", "1"));
        assert!(category_matches("1", "1"));
        assert!(!category_matches("11.2", "1"));
        assert!(!category_matches("1.13", "1.1"));
        assert!(category_matches("1.1", "1.1"));
        assert!(category_matches("3.23", ""));
    }

    #[test]
    fn auction_type_parses() {
        assert_eq!("VCG".parse::<AuctionType>().unwrap(), AuctionType::Vcg);
        assert_eq!("fp".parse::<AuctionType>().unwrap(), AuctionType::Fp);
        assert!("gsp".parse::<AuctionType>().is_err());
    }

    #[test]
    fn builder_rejects_duplicate_stats() {
        let mut b = DatasetBuilder::new();
        let r = AuctionStatRecord {
            campaign_id: 1,
            item_id: 2,
            period: 0,
            contact_price_bin: 5,
            visibility_surplus: 0.0,
            clicks_surplus: 0.0,
            contacts_surplus: 0.0,
            win_bid_surplus: 0.0,
            ctr_predict: 0.0,
            cr_predict: 0.0,
            auction_count: None,
        };
        b.add_stat(r.clone()).unwrap();
        assert_eq!(b.add_stat(r), Err((1, 0, 5)));
    }
}
