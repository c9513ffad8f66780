use serde::{Deserialize, Serialize};

use super::{bid_of, clamp_delta, log_gamma, Bidder, CampaignContext, Observation};
use crate::data::DEFAULT_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlmParams {
    /// Cold-start bid, minor money units.
    pub b0: f64,
    pub beta: f64,
    pub clip_lo: f64,
    pub clip_hi: f64,
}

impl Default for AlmParams {
    fn default() -> Self {
        AlmParams {
            b0: 1000.0,
            beta: 2.0,
            clip_lo: -1.0,
            clip_hi: 1.0,
        }
    }
}

/// Control increment from a linear extrapolation of the relative balance
/// to the end of the campaign, in cumulative-traffic coordinates.
pub fn alm_increment(b_now: f64, b_prev: f64, dt: f64, t_left: f64, p: &AlmParams) -> f64 {
    let slope = if dt > 0.0 { (b_now - b_prev) / dt } else { 0.0 };
    let b_left = b_now + slope * t_left;
    (p.beta * b_left).clamp(p.clip_lo, p.clip_hi)
}

/// Adaptive linear model: raises the bid when the extrapolated leftover
/// is positive and lowers it when the budget would run out early.
#[derive(Debug, Clone, PartialEq)]
pub struct Alm {
    pub params: AlmParams,
    gamma: f64,
    budget: f64,
    delta: f64,
    prev: (f64, f64),
}

impl Alm {
    pub fn new(params: AlmParams) -> Self {
        Alm {
            params,
            gamma: DEFAULT_GAMMA,
            budget: 1.0,
            delta: 0.0,
            prev: (1.0, 0.0),
        }
    }
}

impl Bidder for Alm {
    fn begin(&mut self, ctx: &CampaignContext) {
        self.gamma = ctx.gamma;
        self.budget = ctx.budget;
        self.delta = log_gamma(self.params.b0, ctx.gamma);
        self.prev = (1.0, 0.0);
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        let b_now = obs.balance / self.budget;
        let t = obs.traffic.t_prev;
        if obs.step > 0 {
            let (b_prev, t_prev) = self.prev;
            let u = alm_increment(b_now, b_prev, t - t_prev, obs.traffic.t_left, &self.params);
            self.delta = clamp_delta(self.delta + u);
        }
        self.prev = (b_now, t);
        bid_of(self.delta, self.gamma)
    }

    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }
}
