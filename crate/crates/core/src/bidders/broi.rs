use serde::{Deserialize, Serialize};

use super::{Bidder, CampaignContext, Observation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BroiParams {
    pub b0: f64,
    pub eta_budget: f64,
    pub eta_roi: f64,
    pub mu_budget0: f64,
    pub mu_roi0: f64,
    pub mu_max: f64,
}

impl Default for BroiParams {
    fn default() -> Self {
        BroiParams {
            b0: 1000.0,
            eta_budget: 20.0,
            eta_roi: 20.0,
            mu_budget0: 0.0,
            mu_roi0: 0.0,
            mu_max: 1e4,
        }
    }
}

pub fn broi_bid(ctr: f64, cpc_limit: f64, mu_budget: f64, mu_roi: f64) -> f64 {
    ctr * cpc_limit / (1.0 + mu_budget + mu_roi)
}

/// Primal-dual bidder with one multiplier for the budget and one for the
/// CPC (return-on-investment) constraint, both updated by projected
/// subgradient steps on the last step's violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Broi {
    pub params: BroiParams,
    budget: f64,
    cpc_limit: f64,
    mu_budget: f64,
    mu_roi: f64,
    last_t_cur: f64,
}

impl Broi {
    pub fn new(params: BroiParams) -> Self {
        Broi {
            params,
            budget: 1.0,
            cpc_limit: 1.0,
            mu_budget: params.mu_budget0,
            mu_roi: params.mu_roi0,
            last_t_cur: 0.0,
        }
    }

    pub fn multipliers(&self) -> (f64, f64) {
        (self.mu_budget, self.mu_roi)
    }
}

impl Bidder for Broi {
    fn begin(&mut self, ctx: &CampaignContext) {
        self.budget = ctx.budget;
        self.cpc_limit = ctx.cpc_limit;
        let max = self.params.mu_max;
        self.mu_budget = self.params.mu_budget0.clamp(0.0, max);
        self.mu_roi = self.params.mu_roi0.clamp(0.0, max);
        self.last_t_cur = 0.0;
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        let tw = &obs.traffic;
        if obs.step > 0 && tw.t_all > 0.0 {
            let spend = obs.spend_last_step;
            let target = self.budget * self.last_t_cur / tw.t_all;
            let g_budget = (spend - target) / self.budget;
            let g_roi = (spend - self.cpc_limit * obs.clicks_last_step) / self.budget;
            let max = self.params.mu_max;
            self.mu_budget = (self.mu_budget + self.params.eta_budget * g_budget).clamp(0.0, max);
            self.mu_roi = (self.mu_roi + self.params.eta_roi * g_roi).clamp(0.0, max);
        }
        self.last_t_cur = tw.t_cur;
        if obs.balance <= 0.0 {
            return 0.0;
        }
        if obs.step == 0 {
            return self.params.b0;
        }
        broi_bid(obs.ctr, self.cpc_limit, self.mu_budget, self.mu_roi)
    }
}
