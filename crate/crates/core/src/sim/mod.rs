//! Hourly replay of campaigns against their aggregated auction statistics.

mod experiment;
mod pricing;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bidders::{bin_of, Bidder, CampaignContext, Observation};
use crate::data::{AuctionType, Campaign, Dataset};
use crate::error::{Error, Result};
use crate::traffic::{window_for_campaign, HOUR};

pub use experiment::{
    category_cpc, resolve_cpc, run_experiment, select_campaigns, CampaignFilter, CpcPolicy,
    DurationClass, ExperimentConfig, ExperimentResult,
};
pub use pricing::{
    fp_exact_bin_price, fp_expected_price, step_outcomes, vcg_expected_price, FpCharge, Outcomes,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Step length in seconds.
    pub step: i64,
    /// Half-width of the bin range around the last played bin used for
    /// CTR/CVR estimates.
    pub ctr_bin_window: i32,
    pub fp_charge: FpCharge,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            step: HOUR,
            ctr_bin_window: 3,
            fp_charge: FpCharge::Cumulative,
        }
    }
}

/// One row of a campaign trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub timestamp: i64,
    /// Balance after the step, minor units.
    pub balance: i64,
    pub bid: f64,
    pub bin: Option<i32>,
    /// Money charged this step, minor units.
    pub write_off: i64,
    /// Unrounded charge.
    pub spend: f64,
    pub clicks: f64,
    pub contacts: f64,
    pub visibility: f64,
    pub wins: f64,
    pub ctr: f64,
    pub cvr: f64,
    pub t_cur: f64,
    pub t_prev: f64,
    pub t_left: f64,
    pub t_all: f64,
    pub missing_stats: bool,
    /// The budget was already exhausted before this step.
    pub finished: bool,
}

impl StepRecord {
    /// Remaining traffic fraction after this step.
    pub fn ideal_fraction_after(&self) -> f64 {
        if self.t_all > 0.0 {
            ((self.t_left - self.t_cur) / self.t_all).max(0.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub write_off: i64,
    pub spend: f64,
    pub clicks: f64,
    pub contacts: f64,
    pub visibility: f64,
    pub wins: f64,
    pub missing_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignTrajectory {
    pub campaign_id: u64,
    pub budget: i64,
    pub cpc_limit: f64,
    pub traffic_total: f64,
    pub duration_days: f64,
    /// Step at which the balance reached zero.
    pub exhausted_at: Option<usize>,
    pub totals: Totals,
    pub steps: Vec<StepRecord>,
}

impl CampaignTrajectory {
    pub fn final_balance(&self) -> i64 {
        self.steps.last().map_or(self.budget, |s| s.balance)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.steps {
            w.serialize(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(())
    }
}

/// Replays one campaign hour by hour.
///
/// Charges are tracked in real money and written off in whole minor units
/// so that the rounded total never drifts from the real one by more than
/// half a unit. A step that would overdraw the budget has its feedback
/// scaled by the fraction that was affordable and zeroes the balance.
pub fn run_campaign<B: Bidder + ?Sized>(
    c: &Campaign,
    d: &Dataset,
    bidder: &mut B,
    cpc_limit: f64,
    cfg: &SimConfig,
) -> Result<CampaignTrajectory> {
    if cfg.step <= 0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {}", cfg.step)));
    }
    let profile = d.profile_for(c);
    let (start, end) = (c.campaign_start, c.campaign_end);
    let n_steps = if end > start {
        ((end - start + cfg.step - 1) / cfg.step) as usize
    } else {
        0
    };
    let budget = c.auction_budget.max(0);
    let b0 = budget as f64;
    let ctx = CampaignContext {
        campaign_id: c.campaign_id,
        budget: b0,
        cpc_limit,
        gamma: d.gamma,
        traffic_total: profile.window_share(&d.clock, start, end),
        hours: n_steps,
    };
    bidder.begin(&ctx);

    let mut steps = Vec::with_capacity(n_steps);
    let mut totals = Totals::default();
    let mut balance = budget;
    let mut spent_real = 0.0;
    let mut last = Outcomes::default();
    let mut last_spend = 0.0;
    let mut last_bin: Option<i32> = None;
    let mut exhausted_at = None;

    for n in 0..n_steps {
        let now = start + n as i64 * cfg.step;
        let tw = window_for_campaign(&profile, &d.clock, start, end, now, cfg.step)?;
        let mut rec = StepRecord {
            step: n,
            timestamp: now,
            balance,
            t_cur: tw.t_cur,
            t_prev: tw.t_prev,
            t_left: tw.t_left,
            t_all: tw.t_all,
            ..StepRecord::default()
        };
        if balance <= 0 {
            rec.finished = true;
            steps.push(rec);
            continue;
        }

        let range = match last_bin {
            Some(b) => (b.saturating_sub(cfg.ctr_bin_window), b.saturating_add(cfg.ctr_bin_window)),
            None => (i32::MIN, i32::MAX),
        };
        let (ctr, cvr) = d.estimate_ctr_cvr(&c.logical_category, d.clock.slot(now), range);
        let obs = Observation {
            step: n,
            now,
            balance: b0 - spent_real,
            spent_total: spent_real,
            spend_last_step: last_spend,
            clicks_last_step: last.clicks,
            contacts_last_step: last.contacts,
            clicks_total: totals.clicks,
            traffic: tw,
            ctr,
            cvr,
        };
        let bid = bidder.bid(&obs);
        rec.bid = bid;
        rec.ctr = ctr;
        rec.cvr = cvr;

        let slice = d.period_slice(c.campaign_id, now, cfg.step);
        let (mut spend, mut out) = (0.0, Outcomes::default());
        if slice.is_empty() {
            rec.missing_stats = true;
            totals.missing_steps += 1;
        } else if bid > 0.0 && bid.is_finite() {
            let bin = bin_of(bid, d.gamma)?;
            rec.bin = Some(bin);
            last_bin = Some(bin);
            let rows = slice.iter().copied();
            spend = match (d.auction_type, cfg.fp_charge) {
                (AuctionType::Vcg, _) => vcg_expected_price(rows, bin),
                (AuctionType::Fp, FpCharge::Cumulative) => fp_expected_price(rows, bin, bid),
                (AuctionType::Fp, FpCharge::ExactBin) => fp_exact_bin_price(rows, bin, bid),
            };
            out = step_outcomes(slice.iter().copied(), bin);
        }

        let write_off;
        if spend > 0.0 && spent_real + spend > b0 {
            let frac = ((b0 - spent_real) / spend).clamp(0.0, 1.0);
            out = out.scaled(frac);
            spend = b0 - spent_real;
            spent_real = b0;
            write_off = balance;
        } else {
            spent_real += spend.max(0.0);
            let charged = budget - balance;
            let target = (spent_real.round_ties_even() as i64).clamp(charged, budget);
            write_off = target - charged;
        }
        balance -= write_off;
        if balance == 0 && exhausted_at.is_none() {
            exhausted_at = Some(n);
        }

        rec.balance = balance;
        rec.write_off = write_off;
        rec.spend = spend;
        rec.clicks = out.clicks;
        rec.contacts = out.contacts;
        rec.visibility = out.visibility;
        rec.wins = out.wins;
        totals.write_off += write_off;
        totals.spend += spend;
        totals.clicks += out.clicks;
        totals.contacts += out.contacts;
        totals.visibility += out.visibility;
        totals.wins += out.wins;
        last = out;
        last_spend = spend;
        steps.push(rec);
    }
    if budget == 0 {
        exhausted_at = Some(0);
    }

    Ok(CampaignTrajectory {
        campaign_id: c.campaign_id,
        budget,
        cpc_limit,
        traffic_total: ctx.traffic_total,
        duration_days: c.duration_days(),
        exhausted_at,
        totals,
        steps,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    pub(crate) use super::pricing::tests::rec;
    use super::*;
    use crate::bidders::{bid_of, ConstantBid};
    use crate::data::{AuctionStatRecord, DatasetBuilder};
    use crate::traffic::{TrafficProfile, WeekClock};
    use chrono::NaiveDate;
    use proptest::prelude::*;

    pub fn campaign(id: u64, hours: i64, budget: i64) -> Campaign {
        let date = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
        Campaign {
            loc_id: 0,
            campaign_id: id,
            item_id: id,
            campaign_start_date: date,
            campaign_end_date: date,
            campaign_start: 0,
            campaign_end: hours * HOUR,
            auction_budget: budget,
            microcat_ext: 0,
            logical_category: "1.1".into(),
            region_id: 1,
            platform_p: None,
        }
    }

    fn at(mut r: AuctionStatRecord, id: u64, period: i64) -> AuctionStatRecord {
        r.campaign_id = id;
        r.period = period;
        r
    }

    pub fn dataset(ty: AuctionType, c: &Campaign, rows: &[(i64, AuctionStatRecord)]) -> Dataset {
        let mut b = DatasetBuilder::new();
        b.add_campaign(c.clone());
        b.add_profile(&TrafficProfile::uniform(1));
        for (p, r) in rows {
            b.add_stat(at(r.clone(), c.campaign_id, *p)).unwrap();
        }
        b.build(ty, 1.2, WeekClock::default())
    }

    #[test]
    fn one_step_vcg_example() {
        let c = campaign(1, 1, 10);
        let rows = [
            (0, rec(1, 2.0, 0.0, 0.1)),
            (0, rec(2, 3.0, 0.0, 0.1)),
            (0, rec(3, 5.0, 0.0, 0.1)),
        ];
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let mut bidder = ConstantBid(bid_of(2.0, 1.2));
        let t = run_campaign(&c, &d, &mut bidder, 10.0, &SimConfig::default()).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].bin, Some(2));
        assert_eq!(t.final_balance(), 5);
        assert!((t.totals.clicks - 0.2).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_yields_zero_feedback() {
        let c = campaign(1, 3, 0);
        let rows: Vec<_> = (0..3).map(|h| (h * HOUR, rec(1, 2.0, 0.1, 0.1))).collect();
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(100.0), 0.0, &SimConfig::default()).unwrap();
        assert_eq!(t.exhausted_at, Some(0));
        assert!(t.steps.iter().all(|s| s.finished && s.write_off == 0 && s.clicks == 0.0));
    }

    #[test]
    fn bidding_below_every_bin_spends_nothing() {
        let c = campaign(1, 4, 100);
        let rows: Vec<_> = (0..4).map(|h| (h * HOUR, rec(5, 2.0, 0.1, 0.1))).collect();
        let d = dataset(AuctionType::Fp, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(1.0), 100.0, &SimConfig::default()).unwrap();
        assert_eq!(t.steps.len(), 4);
        assert_eq!(t.final_balance(), 100);
        assert_eq!(t.totals.clicks, 0.0);
    }

    #[test]
    fn missing_hour_is_flagged_and_skipped() {
        let c = campaign(1, 3, 100);
        let rows = [(0, rec(1, 1.0, 0.0, 0.5)), (2 * HOUR, rec(1, 1.0, 0.0, 0.5))];
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(50.0), 100.0, &SimConfig::default()).unwrap();
        assert!(t.steps[1].missing_stats);
        assert_eq!(t.steps[1].clicks, 0.0);
        assert_eq!(t.totals.missing_steps, 1);
        assert!((t.totals.clicks - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overdraw_scales_feedback_and_zeroes_balance() {
        let c = campaign(1, 3, 15);
        let rows: Vec<_> = (0..3).map(|h| (h * HOUR, rec(1, 10.0, 0.0, 1.0))).collect();
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(100.0), 15.0, &SimConfig::default()).unwrap();
        assert_eq!(t.steps[0].write_off, 10);
        assert_eq!(t.steps[1].write_off, 5);
        assert!((t.steps[1].clicks - 0.5).abs() < 1e-12);
        assert_eq!(t.exhausted_at, Some(1));
        assert!(t.steps[2].finished);
        assert_eq!(t.steps[2].clicks, 0.0);
    }

    #[test]
    fn fractional_charges_are_diffused() {
        let c = campaign(1, 4, 100);
        let rows: Vec<_> = (0..4).map(|h| (h * HOUR, rec(1, 0.5, 0.0, 1.0))).collect();
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(100.0), 100.0, &SimConfig::default()).unwrap();
        let offs: Vec<i64> = t.steps.iter().map(|s| s.write_off).collect();
        assert_eq!(offs, vec![0, 1, 1, 0]);
        assert_eq!(t.final_balance(), 98);
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let c = campaign(1, 2, 10);
        let rows = [(0, rec(1, 1.0, 0.0, 0.1)), (HOUR, rec(1, 1.0, 0.0, 0.1))];
        let d = dataset(AuctionType::Vcg, &c, &rows);
        let t = run_campaign(&c, &d, &mut ConstantBid(5.0), 10.0, &SimConfig::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,timestamp,balance,bid,bin,write_off"));
        assert_eq!(text.lines().count(), 3);
    }

    fn random_campaign() -> impl Strategy<Value = (i64, i64, Vec<Vec<(f64, f64, f64)>>)> {
        (1i64..6, 0i64..60).prop_flat_map(|(hours, budget)| {
            let rows = prop::collection::vec(
                prop::collection::vec((0.0f64..7.0, 0.0f64..1.0, 0.0f64..1.0), 0..5),
                hours as usize,
            );
            (Just(hours), Just(budget), rows)
        })
    }

    fn build(ty: AuctionType, hours: i64, budget: i64, table: &[Vec<(f64, f64, f64)>]) -> (Campaign, Dataset) {
        let c = campaign(1, hours, budget);
        let rows: Vec<_> = table
            .iter()
            .enumerate()
            .flat_map(|(h, bins)| {
                bins.iter()
                    .enumerate()
                    .map(move |(k, &(w, ct, cl))| (h as i64 * HOUR, rec(k as i32 * 2, w, ct, cl)))
            })
            .collect();
        let d = dataset(ty, &c, &rows);
        (c, d)
    }

    proptest! {
        #[test]
        fn budget_is_conserved(
            (hours, budget, table) in random_campaign(),
            bid in 0.5f64..30.0,
            fp in any::<bool>(),
        ) {
            let ty = if fp { AuctionType::Fp } else { AuctionType::Vcg };
            let (c, d) = build(ty, hours, budget, &table);
            let t = run_campaign(&c, &d, &mut ConstantBid(bid), 1.0, &SimConfig::default()).unwrap();
            let offs: i64 = t.steps.iter().map(|s| s.write_off).sum();
            prop_assert_eq!(budget, t.final_balance() + offs);
            let mut b = budget;
            for s in &t.steps {
                prop_assert!(s.write_off >= 0);
                b -= s.write_off;
                prop_assert_eq!(b, s.balance);
                prop_assert!(s.balance >= 0);
            }
            prop_assert!(t.totals.spend <= budget as f64 + 1e-9);
            if let Some(k) = t.exhausted_at {
                for s in &t.steps[k + 1..] {
                    prop_assert!(s.clicks == 0.0 && s.write_off == 0 && s.wins == 0.0);
                }
            }
        }

        #[test]
        fn constant_bin_dominance(
            (hours, _budget, table) in random_campaign(),
            budget in 0i64..1_000_000,
            k in -1i32..9,
        ) {
            let (c, d) = build(AuctionType::Vcg, hours, budget, &table);
            let lo = run_campaign(&c, &d, &mut ConstantBid(bid_of(k as f64, 1.2)), 1.0, &SimConfig::default()).unwrap();
            let hi = run_campaign(&c, &d, &mut ConstantBid(bid_of(k as f64 + 1.0, 1.2)), 1.0, &SimConfig::default()).unwrap();
            if hi.exhausted_at.is_none() {
                prop_assert!(hi.totals.clicks >= lo.totals.clicks - 1e-12);
                prop_assert!(hi.totals.spend >= lo.totals.spend - 1e-12);
            }
        }
    }
}
