use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::traffic::HOUR;

const PLATFORM_TOLERANCE: f64 = 1e-6;
const TRAFFIC_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of items the check looked at.
    pub checked: usize,
    /// Offending keys, formatted for humans.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Check {
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn test(&mut self, ok: bool, key: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(key());
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed: self.failures.is_empty(),
            checked: self.checked,
            failures: self.failures,
        }
    }
}

/// Runs every load-time sanity check; failures are reported, never raised.
pub fn validate_dataset(d: &Dataset) -> ValidationReport {
    let mut window = Check::new("campaign_window");
    let mut budget = Check::new("budget_positive");
    let mut platform = Check::new("platform_p");
    let mut region = Check::new("traffic_region_known");
    let mut coverage = Check::new("full_period_coverage");
    for c in d.campaigns() {
        let id = c.campaign_id;
        window.test(c.campaign_end > c.campaign_start, || {
            format!("campaign {id}: end {} <= start {}", c.campaign_end, c.campaign_start)
        });
        budget.test(c.auction_budget > 0, || {
            format!("campaign {id}: budget {}", c.auction_budget)
        });
        if let Some(p) = c.platform_p {
            let ok = p.iter().all(|v| v.is_finite() && *v >= 0.0)
                && (p.iter().sum::<f64>() - 1.0).abs() <= PLATFORM_TOLERANCE;
            platform.test(ok, || format!("campaign {id}: platform_p {p:?}"));
        }
        region.test(d.traffic_profile(c.region_id).is_some(), || {
            format!("campaign {id}: region {}", c.region_id)
        });
        let stats = d.stats_for(id);
        let covered = c.campaign_end > c.campaign_start
            && (0..c.hours()).all(|k| {
                let t = c.campaign_start + k as i64 * HOUR;
                stats.is_some_and(|s| s.range(t..t + HOUR).next().is_some())
            });
        coverage.test(covered, || format!("campaign {id}"));
    }

    let mut known = Check::new("stats_known_campaign");
    let mut within = Check::new("stats_within_window");
    let mut surplus = Check::new("surplus_nonnegative");
    for (id, periods) in d.all_stats() {
        let campaign = d.campaign(id);
        known.test(campaign.is_some(), || format!("campaign {id}"));
        for (&period, recs) in periods {
            if let Some(c) = campaign {
                within.test(
                    period >= c.campaign_start && period < c.campaign_end,
                    || format!("campaign {id} period {period}"),
                );
            }
            for r in recs {
                surplus.test(r.surpluses_nonnegative() && r.predictions_valid(), || {
                    format!("campaign {id} period {period} bin {}", r.contact_price_bin)
                });
            }
        }
    }

    let mut traffic = Check::new("traffic_normalized");
    for p in d.traffic_profiles() {
        let missing = d.incomplete_traffic().get(&p.region_id);
        let nonneg = p.shares().iter().all(|s| s.is_finite() && *s >= 0.0);
        let sum = p.weekly_total();
        let ok = missing.is_none() && nonneg && (sum - 1.0).abs() <= TRAFFIC_TOLERANCE;
        traffic.test(ok, || match missing {
            Some(n) => format!("region {}: {n} of 168 slots present", p.region_id),
            None => format!("region {}: weekly sum {sum}", p.region_id),
        });
    }

    let checks: Vec<CheckResult> = [
        window, budget, platform, known, within, surplus, traffic, region, coverage,
    ]
    .into_iter()
    .map(Check::finish)
    .collect();
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
