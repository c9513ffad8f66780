use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{bid_of, clamp_delta, log_gamma, Bidder, CampaignContext, Observation};
use crate::data::DEFAULT_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MystiqueParams {
    pub b0: f64,
    /// Gain on the cumulative spend gap, as a fraction of budget.
    pub alpha: f64,
    /// Gain on the spend-rate difference per unit of traffic.
    pub beta: f64,
    /// Number of recent steps used to measure the realized rate.
    pub window: usize,
}

impl Default for MystiqueParams {
    fn default() -> Self {
        MystiqueParams {
            b0: 1000.0,
            alpha: 2.0,
            beta: 0.05,
            window: 1,
        }
    }
}

pub fn mystique_increment(gap: f64, slope_diff: f64, p: &MystiqueParams) -> f64 {
    p.alpha * gap + p.beta * slope_diff
}

/// Tracks the ideal cumulative spend curve using both the gap to the
/// curve and the difference between its slope and the realized one.
#[derive(Debug, Clone, PartialEq)]
pub struct Mystique {
    pub params: MystiqueParams,
    gamma: f64,
    budget: f64,
    delta: f64,
    last_t: f64,
    recent: VecDeque<(f64, f64)>,
}

impl Mystique {
    pub fn new(params: MystiqueParams) -> Self {
        Mystique {
            params,
            gamma: DEFAULT_GAMMA,
            budget: 1.0,
            delta: 0.0,
            last_t: 0.0,
            recent: VecDeque::new(),
        }
    }
}

impl Bidder for Mystique {
    fn begin(&mut self, ctx: &CampaignContext) {
        self.gamma = ctx.gamma;
        self.budget = ctx.budget;
        self.delta = log_gamma(self.params.b0, ctx.gamma);
        self.last_t = 0.0;
        self.recent.clear();
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        let tw = &obs.traffic;
        if obs.step > 0 && tw.t_all > 0.0 {
            self.recent.push_back((obs.spend_last_step, tw.t_prev - self.last_t));
            while self.recent.len() > self.params.window.max(1) {
                self.recent.pop_front();
            }
            let ideal = self.budget * tw.t_prev / tw.t_all;
            let gap = (ideal - obs.spent_total) / self.budget;
            let (spend, traffic) = self
                .recent
                .iter()
                .fold((0.0, 0.0), |(s, t), &(ds, dt)| (s + ds, t + dt));
            let slope_diff = if traffic > 0.0 {
                1.0 / tw.t_all - spend / (self.budget * traffic)
            } else {
                0.0
            };
            let u = mystique_increment(gap, slope_diff, &self.params);
            self.delta = clamp_delta(self.delta + u);
        }
        self.last_t = tw.t_prev;
        bid_of(self.delta, self.gamma)
    }

    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }
}
