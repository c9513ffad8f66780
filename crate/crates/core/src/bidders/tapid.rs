use serde::{Deserialize, Serialize};

use super::pid::{PidGains, TrafficPid};
use super::{bid_of, clamp_delta, log_gamma, Bidder, CampaignContext, Observation};
use crate::data::DEFAULT_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaPidParams {
    pub b0: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Measure the spend-rate error as a fraction of the budget so that
    /// one set of gains fits every budget size.
    pub normalize_error: bool,
}

impl Default for TaPidParams {
    fn default() -> Self {
        TaPidParams {
            b0: 1000.0,
            kp: 0.3,
            ki: 0.0,
            kd: 0.0,
            normalize_error: true,
        }
    }
}

/// Traffic-aware PID on the cumulative spend rate per unit of traffic.
#[derive(Debug, Clone, PartialEq)]
pub struct TaPid {
    pub params: TaPidParams,
    pid: TrafficPid,
    gamma: f64,
    budget: f64,
    delta: f64,
    last_t: f64,
}

impl TaPid {
    pub fn new(params: TaPidParams) -> Self {
        TaPid {
            params,
            pid: TrafficPid::new(gains(&params)),
            gamma: DEFAULT_GAMMA,
            budget: 1.0,
            delta: 0.0,
            last_t: 0.0,
        }
    }

    /// Target minus realized spend per unit of traffic so far.
    pub fn error(&self, spent: f64, t_prev: f64, t_all: f64) -> f64 {
        if !(t_prev > 0.0) || !(t_all > 0.0) {
            return 0.0;
        }
        if self.params.normalize_error {
            1.0 / t_all - (spent / self.budget) / t_prev
        } else {
            self.budget / t_all - spent / t_prev
        }
    }
}

fn gains(p: &TaPidParams) -> PidGains {
    PidGains {
        kp: p.kp,
        ki: p.ki,
        kd: p.kd,
    }
}

impl Bidder for TaPid {
    fn begin(&mut self, ctx: &CampaignContext) {
        self.gamma = ctx.gamma;
        self.budget = ctx.budget;
        self.pid = TrafficPid::new(gains(&self.params));
        self.delta = log_gamma(self.params.b0, ctx.gamma);
        self.last_t = 0.0;
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        let t = obs.traffic.t_prev;
        if obs.step > 0 {
            let e = self.error(obs.spent_total, t, obs.traffic.t_all);
            let u = self.pid.update(e, t - self.last_t);
            self.delta = clamp_delta(self.delta + u);
        }
        self.last_t = t;
        bid_of(self.delta, self.gamma)
    }

    fn delta(&self) -> Option<f64> {
        Some(self.delta)
    }
}
