//! Pacing, click and CPC metrics plus the hindsight click bound.

mod oracle;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize, Serializer};

use crate::data::{AuctionType, Dataset};
use crate::error::{Error, Result};
use crate::sim::{CampaignTrajectory, ExperimentResult, SimConfig};

pub use oracle::{hindsight_oracle, oracle_clicks, oracle_items, Item};

/// Root-mean-square deviation of the balance from the traffic-proportional
/// ideal, in money and as a fraction of the budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rmse {
    pub raw: f64,
    pub normalized: Option<f64>,
}

pub fn rmse(ideal: &[f64], actual: &[f64]) -> Result<f64> {
    if ideal.is_empty() || ideal.len() != actual.len() {
        return Err(Error::InvalidArgument(format!(
            "rmse needs equal non-empty series, got {} and {}",
            ideal.len(),
            actual.len()
        )));
    }
    let ss: f64 = ideal.iter().zip(actual).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / ideal.len() as f64).sqrt())
}

/// Compares the balance after each step with `B0 * T_left / T_all` at the
/// same instant.
pub fn rmse_t(t: &CampaignTrajectory) -> Result<Rmse> {
    let b0 = t.budget as f64;
    let ideal: Vec<f64> = t.steps.iter().map(|s| b0 * s.ideal_fraction_after()).collect();
    let actual: Vec<f64> = t.steps.iter().map(|s| s.balance as f64).collect();
    let raw = rmse(&ideal, &actual)?;
    Ok(Rmse {
        raw,
        normalized: (b0 > 0.0).then(|| raw / b0),
    })
}

pub fn scr(trajectories: &[CampaignTrajectory]) -> f64 {
    trajectories.iter().map(|t| t.totals.clicks).sum()
}

/// Clicks per campaign day, summed over campaigns.
pub fn per_diem_scr(trajectories: &[CampaignTrajectory]) -> f64 {
    trajectories
        .iter()
        .filter(|t| t.duration_days > 0.0)
        .map(|t| t.totals.clicks / t.duration_days)
        .sum()
}

/// Realized CPC over the cap; undefined when nothing was clicked.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(from = "Option<f64>")]
pub enum RelCpc {
    Defined(f64),
    Undefined,
}

impl RelCpc {
    pub fn value(self) -> Option<f64> {
        match self {
            RelCpc::Defined(v) => Some(v),
            RelCpc::Undefined => None,
        }
    }
}

impl From<Option<f64>> for RelCpc {
    fn from(v: Option<f64>) -> Self {
        v.map_or(RelCpc::Undefined, RelCpc::Defined)
    }
}

impl Serialize for RelCpc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

impl fmt::Display for RelCpc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelCpc::Defined(v) => write!(f, "{v}"),
            RelCpc::Undefined => f.write_str("undefined"),
        }
    }
}

/// Total spend over total clicks, divided by `cap`.
pub fn rel_cpc(trajectories: &[CampaignTrajectory], cap: f64) -> Result<RelCpc> {
    if !(cap > 0.0) {
        return Err(Error::InvalidArgument(format!("CPC cap must be positive, got {cap}")));
    }
    let clicks: f64 = trajectories.iter().map(|t| t.totals.clicks).sum();
    let spend: f64 = trajectories.iter().map(|t| t.totals.spend).sum();
    Ok(if clicks > 0.0 {
        RelCpc::Defined(spend / clicks / cap)
    } else {
        RelCpc::Undefined
    })
}

/// Like [`rel_cpc`] with each campaign's own cap: total spend over the
/// sum of `cap * clicks`. Equal to [`rel_cpc`] when all caps agree.
pub fn rel_cpc_own_caps(trajectories: &[CampaignTrajectory]) -> RelCpc {
    let clicks: f64 = trajectories.iter().map(|t| t.totals.clicks).sum();
    let allowed: f64 = trajectories.iter().map(|t| t.cpc_limit * t.totals.clicks).sum();
    let spend: f64 = trajectories.iter().map(|t| t.totals.spend).sum();
    if clicks > 0.0 && allowed > 0.0 {
        RelCpc::Defined(spend / allowed)
    } else {
        RelCpc::Undefined
    }
}

/// Mean over clicked campaigns of each campaign's CPC over its cap.
pub fn rel_cpc_campaign_mean(trajectories: &[CampaignTrajectory]) -> RelCpc {
    let ratios: Vec<f64> = trajectories
        .iter()
        .filter(|t| t.totals.clicks > 0.0 && t.cpc_limit > 0.0)
        .map(|t| t.totals.spend / t.totals.clicks / t.cpc_limit)
        .collect();
    if ratios.is_empty() {
        RelCpc::Undefined
    } else {
        RelCpc::Defined(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMetrics {
    pub campaign_id: u64,
    pub budget: i64,
    pub cpc_limit: f64,
    pub duration_days: f64,
    pub spend: f64,
    pub write_off: i64,
    pub clicks: f64,
    pub contacts: f64,
    pub rmse_t: Option<f64>,
    pub rmse_t_normalized: Option<f64>,
    pub rel_cpc: RelCpc,
    pub exhausted_at: Option<usize>,
    pub oracle_clicks: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub algorithm: String,
    pub experiment: String,
    pub auction_type: AuctionType,
    pub n_campaigns: usize,
    /// Mean of per-campaign RMSE_T, money.
    pub rmse_t: f64,
    /// Mean of per-campaign RMSE_T over budget.
    pub rmse_t_normalized: f64,
    pub scr: f64,
    pub per_diem_scr: f64,
    pub rel_cpc: RelCpc,
    pub oracle_clicks: Option<f64>,
    pub campaigns: Vec<CampaignMetrics>,
}

/// Columns of [`MetricReport::csv_row`].
pub const REPORT_COLUMNS: [&str; 10] = [
    "algorithm",
    "experiment",
    "auction_type",
    "n_campaigns",
    "rmse_t",
    "rmse_t_normalized",
    "scr",
    "per_diem_scr",
    "rel_cpc",
    "oracle_clicks",
];

impl MetricReport {
    /// Summarizes an experiment. With a dataset, also bounds every
    /// campaign with the unconstrained hindsight oracle.
    pub fn from_result(experiment: &str, r: &ExperimentResult, oracle: Option<(&Dataset, &SimConfig)>) -> Self {
        let mut campaigns = Vec::with_capacity(r.trajectories.len());
        let (mut raw_sum, mut norm_sum, mut raw_n, mut norm_n) = (0.0, 0.0, 0usize, 0usize);
        let mut oracle_total = oracle.map(|_| 0.0);
        for t in &r.trajectories {
            let rm = rmse_t(t).ok();
            if let Some(rm) = rm {
                raw_sum += rm.raw;
                raw_n += 1;
                if let Some(n) = rm.normalized {
                    norm_sum += n;
                    norm_n += 1;
                }
            }
            let bound = oracle.and_then(|(d, cfg)| {
                d.campaign(t.campaign_id)
                    .map(|c| hindsight_oracle(c, d, t.budget as f64, None, cfg.step))
            });
            if let (Some(total), Some(b)) = (oracle_total.as_mut(), bound) {
                *total += b;
            }
            campaigns.push(CampaignMetrics {
                campaign_id: t.campaign_id,
                budget: t.budget,
                cpc_limit: t.cpc_limit,
                duration_days: t.duration_days,
                spend: t.totals.spend,
                write_off: t.totals.write_off,
                clicks: t.totals.clicks,
                contacts: t.totals.contacts,
                rmse_t: rm.map(|r| r.raw),
                rmse_t_normalized: rm.and_then(|r| r.normalized),
                rel_cpc: rel_cpc_own_caps(std::slice::from_ref(t)),
                exhausted_at: t.exhausted_at,
                oracle_clicks: bound,
            });
        }
        let mean = |s: f64, n: usize| if n > 0 { s / n as f64 } else { 0.0 };
        MetricReport {
            algorithm: r.label.clone(),
            experiment: experiment.to_string(),
            auction_type: r.auction_type,
            n_campaigns: r.trajectories.len(),
            rmse_t: mean(raw_sum, raw_n),
            rmse_t_normalized: mean(norm_sum, norm_n),
            scr: scr(&r.trajectories),
            per_diem_scr: per_diem_scr(&r.trajectories),
            rel_cpc: rel_cpc_own_caps(&r.trajectories),
            oracle_clicks: oracle_total,
            campaigns,
        }
    }

    pub fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        vec![
            self.algorithm.clone(),
            self.experiment.clone(),
            self.auction_type.to_string(),
            self.n_campaigns.to_string(),
            self.rmse_t.to_string(),
            self.rmse_t_normalized.to_string(),
            self.scr.to_string(),
            self.per_diem_scr.to_string(),
            self.rel_cpc.to_string(),
            opt(self.oracle_clicks),
        ]
    }

    /// Writes a header and one row per report.
    pub fn write_csv<'a>(reports: impl IntoIterator<Item = &'a MetricReport>, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let map = |e: csv::Error| Error::InvalidArgument(e.to_string());
        w.write_record(REPORT_COLUMNS).map_err(map)?;
        for r in reports {
            w.write_record(r.csv_row()).map_err(map)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(())
    }
}
