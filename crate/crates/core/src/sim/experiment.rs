use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_campaign, CampaignTrajectory, SimConfig};
use crate::bidders::Bidder;
use crate::data::{AuctionType, Campaign, Dataset};
use crate::error::{Error, Result};
use crate::traffic::DAY;

/// Where each campaign's CPC cap comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CpcPolicy {
    /// The same cap for every campaign, minor units per click.
    Fixed(f64),
    /// The campaign's own budget, which makes any CPC loop inert.
    Budget,
    /// A tenth of the mean CPC of the selected campaigns.
    CategoryDiv10,
}

impl fmt::Display for CpcPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpcPolicy::Fixed(v) => write!(f, "fixed:{v}"),
            CpcPolicy::Budget => f.write_str("budget"),
            CpcPolicy::CategoryDiv10 => f.write_str("category-div-10"),
        }
    }
}

impl FromStr for CpcPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "budget" => Ok(CpcPolicy::Budget),
            "category-div-10" => Ok(CpcPolicy::CategoryDiv10),
            other => {
                let v = other
                    .strip_prefix("fixed:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|v| *v > 0.0 && v.is_finite())
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "cpc policy must be fixed:<positive>, budget or category-div-10, got {other:?}"
                        ))
                    })?;
                Ok(CpcPolicy::Fixed(v))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DurationClass {
    /// At most one day.
    Short,
    Long,
}

impl DurationClass {
    pub fn of(c: &Campaign) -> DurationClass {
        if c.duration() <= DAY {
            DurationClass::Short
        } else {
            DurationClass::Long
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignFilter {
    pub category_prefix: Option<String>,
    pub duration: Option<DurationClass>,
    /// Inclusive bounds on the campaign start date.
    pub start_from: Option<NaiveDate>,
    pub start_until: Option<NaiveDate>,
    pub ids: Option<BTreeSet<u64>>,
}

impl CampaignFilter {
    pub fn matches(&self, c: &Campaign) -> bool {
        self.category_prefix.as_deref().is_none_or(|p| c.in_category(p))
            && self.duration.is_none_or(|d| DurationClass::of(c) == d)
            && self.start_from.is_none_or(|d| c.campaign_start_date >= d)
            && self.start_until.is_none_or(|d| c.campaign_start_date <= d)
            && self.ids.as_ref().is_none_or(|ids| ids.contains(&c.campaign_id))
    }
}

pub fn select_campaigns<'a>(d: &'a Dataset, f: &CampaignFilter) -> Vec<&'a Campaign> {
    d.campaigns().filter(|c| f.matches(c)).collect()
}

/// Total money over total clicks, summed over every record of the given
/// campaigns.
pub fn category_cpc<'a>(d: &Dataset, campaigns: impl IntoIterator<Item = &'a Campaign>) -> Result<f64> {
    let (mut money, mut clicks) = (0.0, 0.0);
    for c in campaigns {
        for r in d.stats_for(c.campaign_id).into_iter().flat_map(|s| s.values()).flatten() {
            money += r.win_bid_surplus;
            clicks += r.clicks_surplus;
        }
    }
    if clicks > 0.0 {
        Ok(money / clicks)
    } else {
        Err(Error::InvalidArgument("selected campaigns have no clicks; mean CPC is undefined".into()))
    }
}

pub fn resolve_cpc(policy: CpcPolicy, c: &Campaign, category_cpc: Option<f64>) -> Result<f64> {
    match policy {
        CpcPolicy::Fixed(v) => Ok(v),
        CpcPolicy::Budget => Ok(c.auction_budget as f64),
        CpcPolicy::CategoryDiv10 => category_cpc
            .map(|v| v / 10.0)
            .ok_or_else(|| Error::InvalidArgument("category CPC not available".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub sim: SimConfig,
    pub cpc: CpcPolicy,
    /// Mean CPC to use for [`CpcPolicy::CategoryDiv10`] instead of
    /// computing it from the selection.
    pub category_cpc: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            label: String::new(),
            sim: SimConfig::default(),
            cpc: CpcPolicy::Budget,
            category_cpc: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub label: String,
    pub auction_type: AuctionType,
    pub cpc_policy: CpcPolicy,
    pub category_cpc: Option<f64>,
    pub trajectories: Vec<CampaignTrajectory>,
}

/// Runs a fresh bidder on every selected campaign, in parallel on the
/// current rayon pool. Results are in campaign id order.
pub fn run_experiment<F, B>(
    d: &Dataset,
    factory: F,
    cfg: &ExperimentConfig,
    filter: &CampaignFilter,
) -> Result<ExperimentResult>
where
    F: Fn() -> B + Sync,
    B: Bidder,
{
    let selected = select_campaigns(d, filter);
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let category = match (cfg.cpc, cfg.category_cpc) {
        (CpcPolicy::CategoryDiv10, None) => Some(category_cpc(d, selected.iter().copied())?),
        (_, given) => given,
    };
    let trajectories = selected
        .par_iter()
        .map(|c| {
            let limit = resolve_cpc(cfg.cpc, c, category)?;
            let mut bidder = factory();
            run_campaign(c, d, &mut bidder, limit, &cfg.sim)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        label: cfg.label.clone(),
        auction_type: d.auction_type,
        cpc_policy: cfg.cpc,
        category_cpc: category,
        trajectories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bidders::{Algorithm, BidderParams, ConstantBid};
    use crate::data::DatasetBuilder;
    use crate::sim::pricing::tests::rec;
    use crate::sim::tests::campaign;
    use crate::traffic::{TrafficProfile, WeekClock, HOUR};

    fn two_campaigns() -> Dataset {
        let mut b = DatasetBuilder::new();
        let mut c1 = campaign(1, 24, 1000);
        c1.logical_category = "1.13".into();
        let mut c2 = campaign(2, 48, 1000);
        c2.logical_category = "11.2".into();
        c2.campaign_start_date = NaiveDate::from_ymd_opt(1970, 1, 5).unwrap();
        for c in [&c1, &c2] {
            for h in 0..c.hours() as i64 {
                let mut r = rec(1, 1.0, 0.1, 0.25);
                r.campaign_id = c.campaign_id;
                r.period = h * HOUR;
                b.add_stat(r).unwrap();
            }
        }
        b.add_campaign(c1);
        b.add_campaign(c2);
        b.add_profile(&TrafficProfile::uniform(1));
        b.build(AuctionType::Vcg, 1.2, WeekClock::default())
    }

    #[test]
    fn cpc_policy_parses() {
        assert_eq!("budget".parse::<CpcPolicy>().unwrap(), CpcPolicy::Budget);
        assert_eq!("category-div-10".parse::<CpcPolicy>().unwrap(), CpcPolicy::CategoryDiv10);
        assert_eq!("fixed:2.5".parse::<CpcPolicy>().unwrap(), CpcPolicy::Fixed(2.5));
        assert!("fixed:-1".parse::<CpcPolicy>().is_err());
        assert!("cheap".parse::<CpcPolicy>().is_err());
        for p in [CpcPolicy::Budget, CpcPolicy::CategoryDiv10, CpcPolicy::Fixed(3.0)] {
            assert_eq!(p.to_string().parse::<CpcPolicy>().unwrap(), p);
        }
    }

    #[test]
    fn duration_classes_partition() {
        let d = two_campaigns();
        let short = CampaignFilter {
            duration: Some(DurationClass::Short),
            ..Default::default()
        };
        let long = CampaignFilter {
            duration: Some(DurationClass::Long),
            ..Default::default()
        };
        let s: Vec<u64> = select_campaigns(&d, &short).iter().map(|c| c.campaign_id).collect();
        let l: Vec<u64> = select_campaigns(&d, &long).iter().map(|c| c.campaign_id).collect();
        assert_eq!(s, vec![1]);
        assert_eq!(l, vec![2]);
    }

    #[test]
    fn filters_by_prefix_date_and_ids() {
        let d = two_campaigns();
        let f = CampaignFilter {
            category_prefix: Some("1".into()),
            ..Default::default()
        };
        assert_eq!(select_campaigns(&d, &f).len(), 1);
        let f = CampaignFilter {
            start_from: NaiveDate::from_ymd_opt(1970, 1, 2),
            ..Default::default()
        };
        assert_eq!(select_campaigns(&d, &f)[0].campaign_id, 2);
        let f = CampaignFilter {
            ids: Some([2, 3].into()),
            ..Default::default()
        };
        assert_eq!(select_campaigns(&d, &f).len(), 1);
    }

    #[test]
    fn empty_selection_is_an_error() {
        let d = two_campaigns();
        let f = CampaignFilter {
            category_prefix: Some("7".into()),
            ..Default::default()
        };
        let r = run_experiment(&d, || ConstantBid(1.0), &ExperimentConfig::default(), &f);
        assert!(matches!(r, Err(Error::EmptySelection)));
    }

    #[test]
    fn category_cpc_is_money_over_clicks() {
        let d = two_campaigns();
        let v = category_cpc(&d, d.campaigns()).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let cfg = ExperimentConfig {
            cpc: CpcPolicy::CategoryDiv10,
            ..Default::default()
        };
        let r = run_experiment(&d, || ConstantBid(5.0), &cfg, &CampaignFilter::default()).unwrap();
        assert!(r.trajectories.iter().all(|t| (t.cpc_limit - 0.4).abs() < 1e-12));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let d = two_campaigns();
        let cfg = ExperimentConfig::default();
        let params = BidderParams::default_for(Algorithm::TaPid);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_experiment(&d, || params.build(), &cfg, &CampaignFilter::default()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
