//! Seeded synthetic datasets with the published marginal shapes: campaign
//! duration and budget mixes, a diurnal and weekly traffic cycle, and
//! bin-indexed surplus curves with a reserve-price bump near bin zero.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{AuctionStatRecord, AuctionType, Campaign, Dataset, DatasetBuilder, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::traffic::{TrafficProfile, WeekClock, HOUR, SLOTS_PER_WEEK};

/// Minor money units per major unit in generated budgets.
pub const MINOR_PER_MAJOR: i64 = 100;

/// Campaign lifetime classes in days: 1, 2-6, 7 and 8-14.
pub const DURATION_CLASSES: [(u32, u32); 4] = [(1, 1), (2, 6), (7, 7), (8, 14)];

/// Budget bands in major units.
pub const BUDGET_BANDS: [(f64, f64); 4] = [(10.0, 500.0), (500.0, 1000.0), (1000.0, 10_000.0), (10_000.0, 50_000.0)];

pub const VCG_DURATION_MIX: [f64; 4] = [0.7585, 0.0845, 0.1557, 0.0013];
pub const FP_DURATION_MIX: [f64; 4] = [0.8346, 0.0741, 0.0827, 0.0086];
pub const VCG_BUDGET_MIX: [f64; 4] = [0.7353, 0.0735, 0.1428, 0.0484];
pub const FP_BUDGET_MIX: [f64; 4] = [0.0, 0.0, 0.8296, 0.1704];

/// Per-category means of CTR, CVR, budget (major units) and lifetime (days).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryProfile {
    pub label: String,
    pub ctr: f64,
    pub cvr: f64,
    pub budget: f64,
    pub days: f64,
}

// label, FP (ctr, cvr, budget, days), VCG (ctr, cvr, budget, days)
#[rustfmt::skip]
const CATEGORY_TABLE: [(&str, [f64; 4], [f64; 4]); 29] = [
    ("1.0",  [3.98e-2, 2.25e-2, 862.0, 4.4],  [7.56e-2, 3.43e-2, 255.0, 5.7]),
    ("1.1",  [2.62e-2, 2.01e-2, 317.0, 3.1],  [3.47e-2, 1.64e-2, 93.0, 5.3]),
    ("1.11", [4.74e-2, 3.67e-2, 462.0, 3.0],  [8.74e-2, 4.35e-2, 387.0, 4.9]),
    ("1.13", [2.66e-2, 2.22e-2, 945.0, 3.9],  [5.10e-2, 2.67e-2, 202.0, 3.8]),
    ("1.14", [2.19e-2, 3.75e-2, 869.0, 3.7],  [5.07e-2, 3.99e-2, 521.0, 6.1]),
    ("1.15", [3.81e-2, 1.91e-2, 447.0, 3.4],  [4.37e-2, 2.06e-2, 131.0, 4.6]),
    ("1.17", [1.97e-2, 1.73e-2, 170.0, 2.3],  [5.38e-2, 3.42e-2, 161.0, 4.5]),
    ("1.18", [2.47e-2, 3.17e-2, 1026.0, 3.4], [5.62e-2, 3.99e-2, 151.0, 5.6]),
    ("1.19", [2.86e-2, 4.92e-2, 277.0, 2.7],  [6.53e-2, 3.37e-2, 165.0, 4.7]),
    ("1.2",  [2.63e-2, 2.77e-2, 539.0, 3.6],  [4.44e-2, 3.51e-2, 135.0, 4.1]),
    ("1.21", [3.74e-2, 2.05e-2, 754.0, 4.0],  [4.35e-2, 2.38e-2, 117.0, 4.0]),
    ("1.3",  [2.64e-2, 1.94e-2, 2857.0, 4.7], [5.54e-2, 1.85e-2, 762.0, 4.9]),
    ("1.7",  [2.84e-2, 4.16e-2, 851.0, 4.1],  [4.19e-2, 3.27e-2, 207.0, 4.3]),
    ("1.8",  [2.82e-2, 3.18e-2, 506.0, 3.3],  [4.63e-2, 4.07e-2, 155.0, 3.9]),
    ("2.12", [1.93e-2, 3.55e-2, 1061.0, 5.1], [5.31e-2, 1.10e-2, 77.0, 1.0]),
    ("2.22", [2.02e-2, 2.66e-2, 1033.0, 4.9], [1.53e-1, 6.63e-2, 102.0, 3.6]),
    ("2.3",  [1.68e-2, 2.27e-2, 1046.0, 5.2], [7.31e-2, 1.87e-2, 201.0, 6.3]),
    ("2.5",  [1.54e-2, 2.60e-2, 1565.0, 4.7], [4.38e-2, 2.99e-2, 426.0, 5.2]),
    ("3.1",  [5.78e-2, 2.30e-1, 1742.0, 3.5], [5.82e-2, 2.04e-1, 424.0, 2.3]),
    ("3.17", [5.97e-2, 7.47e-2, 1085.0, 4.2], [5.58e-2, 3.97e-2, 354.0, 4.8]),
    ("3.2",  [4.95e-2, 1.44e-1, 2408.0, 4.9], [4.99e-2, 1.22e-1, 341.0, 3.0]),
    ("3.23", [5.34e-2, 1.40e-1, 717.0, 4.0],  [3.41e-2, 6.66e-2, 370.0, 6.0]),
    ("3.25", [3.83e-2, 1.34e-1, 2018.0, 4.7], [6.21e-2, 1.35e-1, 564.0, 3.5]),
    ("3.27", [4.95e-2, 2.10e-1, 1493.0, 4.5], [4.92e-2, 1.77e-1, 470.0, 3.0]),
    ("3.3",  [4.98e-2, 1.09e-1, 1164.0, 4.5], [5.16e-2, 1.01e-1, 374.0, 3.9]),
    ("3.9",  [5.34e-2, 9.89e-2, 1482.0, 3.5], [7.34e-2, 8.68e-2, 345.0, 4.1]),
    ("4.24", [3.53e-2, 2.23e-1, 4938.0, 5.0], [3.95e-2, 1.59e-1, 1018.0, 4.9]),
    ("4.28", [2.42e-2, 1.52e-2, 921.0, 5.4],  [4.47e-2, 1.91e-2, 157.0, 5.7]),
    ("4.4",  [9.34e-2, 1.36e-1, 4711.0, 7.0], [5.49e-2, 6.40e-2, 796.0, 2.5]),
];

/// Category means for one auction type.
pub fn category_profiles(t: AuctionType) -> Vec<CategoryProfile> {
    CATEGORY_TABLE
        .iter()
        .map(|(label, fp, vcg)| {
            let v = match t {
                AuctionType::Fp => fp,
                AuctionType::Vcg => vcg,
            };
            CategoryProfile {
                label: label.to_string(),
                ctr: v[0],
                cvr: v[1],
                budget: v[2],
                days: v[3],
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficShape {
    /// Ratio of the busiest hour of the week to the quietest.
    pub max_min_ratio: f64,
    /// Ratio of the busiest day to the quietest.
    pub weekly_ratio: f64,
    pub peak_hour: u8,
    pub trough_hour: u8,
    /// Day of week, 1 = Sunday.
    pub peak_dow: u8,
    pub trough_dow: u8,
    /// Per-region log-uniform jitter of `max_min_ratio`.
    pub ratio_jitter: f64,
}

impl Default for TrafficShape {
    fn default() -> Self {
        TrafficShape {
            max_min_ratio: 30.0,
            weekly_ratio: 1.5,
            peak_hour: 12,
            trough_hour: 3,
            peak_dow: 2,
            trough_dow: 7,
            ratio_jitter: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurplusShape {
    /// Bin with the largest click surplus.
    pub peak_bin: f64,
    /// Standard deviation of the per-campaign peak bin.
    pub peak_jitter: f64,
    pub sigma_below: f64,
    pub sigma_above: f64,
    /// Height of the reserve-price bump at bin 0, relative to the peak.
    pub reserve_amplitude: f64,
    /// Decay length of the reserve bump, in bins.
    pub reserve_decay: f64,
    /// Bins whose relative weight falls below this are not emitted.
    pub min_weight: f64,
    /// Log-normal noise on every surplus record.
    pub noise_sigma: f64,
    /// Relative CTR/CVR increase from bin 0 to the peak bin.
    pub rate_slope: f64,
    /// Amplitude of the diurnal peak-bin swing as a fraction of the peak bin.
    pub night_drift: f64,
    /// Hour at which the diurnal swing is highest.
    pub drift_peak_hour: u8,
    /// Lifetime spend of a constant bid at the peak bin, relative to budget.
    pub spend_ratio: f64,
}

impl SurplusShape {
    pub fn for_auction(t: AuctionType) -> Self {
        SurplusShape {
            peak_bin: match t {
                AuctionType::Vcg => 55.0,
                AuctionType::Fp => 40.0,
            },
            peak_jitter: 2.0,
            sigma_below: 6.0,
            sigma_above: 2.5,
            reserve_amplitude: 0.1,
            reserve_decay: 1.5,
            min_weight: 1e-3,
            noise_sigma: 0.3,
            rate_slope: 0.3,
            night_drift: 0.05,
            drift_peak_hour: 4,
            spend_ratio: 2.0,
        }
    }

    /// Noise-free relative click surplus at `bin` for a curve peaking at `peak`.
    pub fn weight(&self, bin: f64, peak: f64) -> f64 {
        let sigma = if bin < peak { self.sigma_below } else { self.sigma_above };
        let z = (bin - peak) / sigma;
        (-0.5 * z * z).exp() + self.reserve_amplitude * (-bin.max(0.0) / self.reserve_decay).exp()
    }

    fn rate_factor(&self, bin: i32, peak: f64) -> f64 {
        1.0 + self.rate_slope * (bin.max(0) as f64 / peak.max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_campaigns: usize,
    pub auction_type: AuctionType,
    pub seed: u64,
    pub gamma: f64,
    pub duration_mix: [f64; 4],
    pub budget_mix: [f64; 4],
    pub n_regions: usize,
    /// Campaigns start on hour boundaries inside this many days.
    pub horizon_days: u32,
    /// Timestamp of the first hour of the horizon.
    pub start_time: i64,
    pub traffic: TrafficShape,
    pub surplus: SurplusShape,
    pub categories: Vec<CategoryProfile>,
    /// Draw budget and lifetime around each category's means instead of the
    /// global mixes.
    pub category_overrides: bool,
    /// Log-normal spread of per-campaign CTR and CVR around the category mean.
    pub rate_sigma: f64,
}

impl SynthConfig {
    pub fn new(auction_type: AuctionType, n_campaigns: usize, seed: u64) -> Self {
        let (duration_mix, budget_mix) = match auction_type {
            AuctionType::Vcg => (VCG_DURATION_MIX, VCG_BUDGET_MIX),
            AuctionType::Fp => (FP_DURATION_MIX, FP_BUDGET_MIX),
        };
        SynthConfig {
            n_campaigns,
            auction_type,
            seed,
            gamma: DEFAULT_GAMMA,
            duration_mix,
            budget_mix,
            n_regions: 8,
            horizon_days: 21,
            start_time: 0,
            traffic: TrafficShape::default(),
            surplus: SurplusShape::for_auction(auction_type),
            categories: category_profiles(auction_type),
            category_overrides: false,
            rate_sigma: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, w) in [("duration_mix", &self.duration_mix), ("budget_mix", &self.budget_mix)] {
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return bad(format!("{name} has a negative or non-finite weight"));
            }
            let s: f64 = w.iter().sum();
            if (s - 1.0).abs() > 1e-6 {
                return bad(format!("{name} sums to {s}, expected 1"));
            }
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma {} must exceed 1", self.gamma));
        }
        if self.n_regions == 0 {
            return bad("n_regions must be positive".into());
        }
        if self.categories.is_empty() {
            return bad("at least one category is required".into());
        }
        if let Some(c) = self
            .categories
            .iter()
            .find(|c| !(c.ctr > 0.0 && c.ctr <= 1.0 && c.cvr > 0.0 && c.cvr <= 1.0 && c.budget > 0.0 && c.days > 0.0))
        {
            return bad(format!("category {} has out-of-range means", c.label));
        }
        let longest = DURATION_CLASSES[3].1.max(self.categories.iter().map(|c| (2.0 * c.days).ceil() as u32).max().unwrap_or(0));
        if self.horizon_days < longest {
            return bad(format!("horizon_days must be at least {longest}"));
        }
        let t = &self.traffic;
        if !(t.max_min_ratio >= t.weekly_ratio && t.weekly_ratio >= 1.0 && t.ratio_jitter >= 0.0) {
            return bad("traffic ratios must satisfy max_min_ratio >= weekly_ratio >= 1".into());
        }
        if t.peak_hour > 23 || t.trough_hour > 23 || t.peak_hour == t.trough_hour {
            return bad("traffic peak and trough hours must be distinct hours".into());
        }
        if !(1..=7).contains(&t.peak_dow) || !(1..=7).contains(&t.trough_dow) || t.peak_dow == t.trough_dow {
            return bad("traffic peak and trough days must be distinct days 1..=7".into());
        }
        let s = &self.surplus;
        let positive = [s.sigma_below, s.sigma_above, s.reserve_decay, s.spend_ratio, s.min_weight];
        if positive.iter().any(|x| !(*x > 0.0)) || s.peak_bin < 1.0 {
            return bad("surplus shape parameters must be positive".into());
        }
        let nonneg = [s.peak_jitter, s.reserve_amplitude, s.noise_sigma, s.rate_slope, s.night_drift, self.rate_sigma];
        if nonneg.iter().any(|x| !(*x >= 0.0)) || s.drift_peak_hour > 23 {
            return bad("surplus noise and drift parameters must be non-negative".into());
        }
        Ok(())
    }
}

/// Maps `x` on a cycle of length `period` to -1 at `trough`, +1 at `peak`,
/// with a half-cosine on each of the two arcs between them.
fn cycle(x: f64, trough: f64, peak: f64, period: f64) -> f64 {
    let u = (x - trough).rem_euclid(period);
    let rise = (peak - trough).rem_euclid(period);
    let phase = if u <= rise {
        std::f64::consts::PI * u / rise
    } else {
        std::f64::consts::PI * (1.0 + (u - rise) / (period - rise))
    };
    -phase.cos()
}

/// Weekly profile whose log share is a daily cycle plus a weekly cycle,
/// normalized to sum to one. The busiest slot is `(peak_dow, peak_hour)`
/// and the quietest `(trough_dow, trough_hour)`, with ratio `ratio`.
pub fn traffic_profile(region_id: u64, shape: &TrafficShape, ratio: f64) -> TrafficProfile {
    let b = shape.weekly_ratio.ln() / 2.0;
    let a = (ratio.ln() - shape.weekly_ratio.ln()) / 2.0;
    let mut shares: Vec<f64> = (0..SLOTS_PER_WEEK)
        .map(|slot| {
            let day = (slot / 24) as f64;
            let hour = (slot % 24) as f64;
            let d = cycle(day, (shape.trough_dow - 1) as f64, (shape.peak_dow - 1) as f64, 7.0);
            let h = cycle(hour, shape.trough_hour as f64, shape.peak_hour as f64, 24.0);
            (a * h + b * d).exp()
        })
        .collect();
    let total: f64 = shares.iter().sum();
    for s in &mut shares {
        *s /= total;
    }
    TrafficProfile::new(region_id, shares).expect("168 slots")
}

fn pick(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.random::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Mean-one log-normal factor.
fn lognormal(rng: &mut impl Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    (sigma * z - 0.5 * sigma * sigma).exp()
}

fn date_of(t: i64) -> NaiveDate {
    DateTime::from_timestamp(t, 0).map(|d| d.date_naive()).unwrap_or_default()
}

const REGION_BASE: u64 = 600_000;

/// Campaign attributes the stats generator needs beyond the campaign row.
struct Draft {
    campaign: Campaign,
    ctr: f64,
    cvr: f64,
    peak: f64,
}

fn draft_campaign(cfg: &SynthConfig, rng: &mut ChaCha8Rng, id: u64) -> Draft {
    let cat = &cfg.categories[rng.random_range(0..cfg.categories.len())];
    let (days, budget_major) = if cfg.category_overrides {
        let days = (cat.days * lognormal(rng, 0.4)).round().clamp(1.0, (2.0 * cat.days).ceil().max(1.0));
        (days as u32, cat.budget * lognormal(rng, 0.5))
    } else {
        let (lo, hi) = DURATION_CLASSES[pick(rng, &cfg.duration_mix)];
        let days = rng.random_range(lo..=hi);
        let (blo, bhi) = BUDGET_BANDS[pick(rng, &cfg.budget_mix)];
        let budget = (blo.ln() + rng.random::<f64>() * (bhi.ln() - blo.ln())).exp();
        (days, budget)
    };
    let hours = days as i64 * 24;
    let slots = cfg.horizon_days as i64 * 24 - hours;
    let start = cfg.start_time + rng.random_range(0..=slots.max(0)) * HOUR;
    let end = start + hours * HOUR;
    let region_id = REGION_BASE + rng.random_range(0..cfg.n_regions as u64);
    let mut p = [0.0; 4];
    for v in &mut p {
        *v = rng.random::<f64>() + 0.05;
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    let campaign = Campaign {
        loc_id: region_id * 100 + rng.random_range(0..100),
        campaign_id: id,
        item_id: rng.random_range(1_000_000_000..5_000_000_000),
        campaign_start_date: date_of(start),
        campaign_end_date: date_of(end),
        campaign_start: start,
        campaign_end: end,
        auction_budget: ((budget_major * MINOR_PER_MAJOR as f64).round() as i64).max(1),
        microcat_ext: rng.random_range(1..6000),
        logical_category: cat.label.clone(),
        region_id,
        platform_p: Some(p),
    };
    let ctr = (cat.ctr * lognormal(rng, cfg.rate_sigma)).min(0.5);
    let cvr = (cat.cvr * lognormal(rng, cfg.rate_sigma)).min(0.5);
    let z: f64 = StandardNormal.sample(rng);
    let peak = (cfg.surplus.peak_bin + cfg.surplus.peak_jitter * z).max(1.0);
    Draft {
        campaign,
        ctr,
        cvr,
        peak,
    }
}

/// Bins emitted for a curve peaking at `peak`, with their noise-free weights.
fn curve(s: &SurplusShape, peak: f64) -> Vec<(i32, f64)> {
    let top = (peak + 4.0 * s.sigma_above).ceil() as i32;
    (0..=top)
        .map(|k| (k, s.weight(k as f64, peak)))
        .filter(|(_, w)| *w >= s.min_weight)
        .collect()
}

fn campaign_stats(cfg: &SynthConfig, draft: &Draft, profile: &TrafficProfile, clock: &WeekClock) -> Vec<AuctionStatRecord> {
    let s = &cfg.surplus;
    let c = &draft.campaign;
    let gamma = cfg.gamma;
    let fp = cfg.auction_type == AuctionType::Fp;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(c.campaign_id + 1);

    // Volume so that a constant bid at the peak bin spends `spend_ratio`
    // budgets over the lifetime, before noise.
    let p = draft.peak.round() as i32;
    let base = curve(s, draft.peak);
    let mut contacts_at_peak = 0.0;
    let mut vcg_spend_at_peak = 0.0;
    for &(k, w) in base.iter().filter(|(k, _)| *k <= p) {
        let cts = w * draft.cvr * s.rate_factor(k, draft.peak);
        contacts_at_peak += cts;
        vcg_spend_at_peak += gamma.powi(k - 1) * cts;
    }
    let unit_spend = if fp { gamma.powi(p) * contacts_at_peak } else { vcg_spend_at_peak };
    let volume = if unit_spend > 0.0 {
        c.auction_budget as f64 * s.spend_ratio / unit_spend
    } else {
        0.0
    };
    let t_all = profile.window_share(clock, c.campaign_start, c.campaign_end);

    let mut out = Vec::new();
    for h in 0..c.hours() as i64 {
        let t = c.campaign_start + h * HOUR;
        let frac = profile.window_share(clock, t, t + HOUR) / t_all;
        let (_, hour) = clock.dow_hour(t);
        let swing = (2.0 * std::f64::consts::PI * (hour as f64 - s.drift_peak_hour as f64) / 24.0).cos();
        let peak = draft.peak * (1.0 + s.night_drift * swing);
        let mut cum_contacts = 0.0;
        let mut paid = 0.0;
        for (k, w) in curve(s, peak) {
            let rate = s.rate_factor(k, draft.peak);
            let ctr = (draft.ctr * rate).min(1.0);
            let cvr = (draft.cvr * rate).min(1.0);
            let clicks = volume * frac * w * lognormal(&mut rng, s.noise_sigma);
            let contacts = clicks * cvr;
            let visibility = clicks / ctr;
            let win_bid = if fp {
                cum_contacts += contacts;
                let total = gamma.powi(k) * cum_contacts;
                let inc = (total - paid).max(0.0);
                paid = total;
                inc
            } else {
                gamma.powi(k - 1) * contacts
            };
            out.push(AuctionStatRecord {
                campaign_id: c.campaign_id,
                item_id: c.item_id,
                period: t,
                contact_price_bin: k,
                visibility_surplus: visibility,
                clicks_surplus: clicks,
                contacts_surplus: contacts,
                win_bid_surplus: win_bid,
                ctr_predict: ctr,
                cr_predict: cvr,
                auction_count: (!fp).then(|| visibility.ceil().max(1.0)),
            });
        }
    }
    out
}

/// Generates a dataset; identical configs give identical datasets.
pub fn generate(cfg: &SynthConfig) -> Result<Dataset> {
    cfg.validate()?;
    let clock = WeekClock::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t = &cfg.traffic;
    let profiles: Vec<TrafficProfile> = (0..cfg.n_regions as u64)
        .map(|r| {
            let j = t.ratio_jitter * (2.0 * rng.random::<f64>() - 1.0);
            traffic_profile(REGION_BASE + r, t, (t.max_min_ratio * j.exp()).max(t.weekly_ratio))
        })
        .collect();
    let drafts: Vec<Draft> = (1..=cfg.n_campaigns as u64).map(|id| draft_campaign(cfg, &mut rng, id)).collect();
    let stats: Vec<Vec<AuctionStatRecord>> = drafts
        .par_iter()
        .map(|d| {
            let p = &profiles[(d.campaign.region_id - REGION_BASE) as usize];
            campaign_stats(cfg, d, p, &clock)
        })
        .collect();

    let mut b = DatasetBuilder::new();
    for p in &profiles {
        b.add_profile(p);
    }
    for (d, recs) in drafts.into_iter().zip(stats) {
        for r in recs {
            b.add_stat(r).map_err(|k| Error::InvalidArgument(format!("generator emitted duplicate stats key {k:?}")))?;
        }
        b.add_campaign(d.campaign);
    }
    Ok(b.build(cfg.auction_type, cfg.gamma, clock))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub label: String,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTraffic {
    pub region_id: u64,
    pub weekly_total: f64,
    pub max_min_ratio: f64,
    /// `(dow, hour)` of the busiest and quietest slots.
    pub peak: (u8, u8),
    pub trough: (u8, u8),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSummary {
    pub bin: i32,
    pub records: usize,
    pub clicks_surplus: f64,
    pub win_bid_surplus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub auction_type: AuctionType,
    pub n_campaigns: usize,
    pub n_records: usize,
    pub durations: Vec<Band>,
    /// Bands in major units, `MINOR_PER_MAJOR` minor units each.
    pub budgets: Vec<Band>,
    pub traffic: Vec<RegionTraffic>,
    pub surplus_by_bin: Vec<BinSummary>,
}

impl DatasetSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn bands(labels: &[&str], counts: &[usize]) -> Vec<Band> {
    let n: usize = counts.iter().sum();
    labels
        .iter()
        .zip(counts)
        .map(|(l, &count)| Band {
            label: l.to_string(),
            count,
            fraction: if n == 0 { 0.0 } else { count as f64 / n as f64 },
        })
        .collect()
}

/// Index of the duration class of a lifetime in whole days, rounded up;
/// 4 means longer than 14 days.
pub fn duration_class(days: f64) -> usize {
    let d = days.ceil().max(1.0) as u32;
    DURATION_CLASSES.iter().position(|(lo, hi)| (*lo..=*hi).contains(&d)).unwrap_or(4)
}

/// Index of the budget band of a budget in minor units; 4 means above the
/// top band.
pub fn budget_band(budget: i64) -> usize {
    let major = budget as f64 / MINOR_PER_MAJOR as f64;
    [500.0, 1000.0, 10_000.0, 50_000.0].iter().position(|hi| major < *hi).unwrap_or(4)
}

/// Summary statistics of any dataset, synthetic or loaded.
pub fn describe(d: &Dataset) -> DatasetSummary {
    let mut dur = [0usize; 5];
    let mut bud = [0usize; 5];
    for c in d.campaigns() {
        dur[duration_class(c.duration_days())] += 1;
        bud[budget_band(c.auction_budget)] += 1;
    }
    let traffic = d
        .traffic_profiles()
        .map(|p| {
            let s = p.shares();
            let at = |i: usize| ((i / 24 + 1) as u8, (i % 24) as u8);
            let imax = (0..s.len()).fold(0, |m, i| if s[i] > s[m] { i } else { m });
            let imin = (0..s.len()).fold(0, |m, i| if s[i] < s[m] { i } else { m });
            RegionTraffic {
                region_id: p.region_id,
                weekly_total: p.weekly_total(),
                max_min_ratio: p.max_min_ratio(),
                peak: at(imax),
                trough: at(imin),
            }
        })
        .collect();
    let mut bins: BTreeMap<i32, BinSummary> = BTreeMap::new();
    for r in d.records() {
        let b = bins.entry(r.contact_price_bin).or_insert(BinSummary {
            bin: r.contact_price_bin,
            records: 0,
            clicks_surplus: 0.0,
            win_bid_surplus: 0.0,
        });
        b.records += 1;
        b.clicks_surplus += r.clicks_surplus;
        b.win_bid_surplus += r.win_bid_surplus;
    }
    DatasetSummary {
        auction_type: d.auction_type,
        n_campaigns: d.n_campaigns(),
        n_records: d.n_records(),
        durations: bands(&["1", "2-6", "7", "8-14", "15+"], &dur),
        budgets: bands(&["0-500", "500-1000", "1000-10000", "10000-50000", "50000+"], &bud),
        traffic,
        surplus_by_bin: bins.into_values().collect(),
    }
}
