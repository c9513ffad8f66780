use serde::{Deserialize, Serialize};

use super::pid::{PidGains, TrafficPid};
use super::{Bidder, CampaignContext, Observation};

const MULTIPLIER_FLOOR: f64 = 1e-9;
const MULTIPLIER_CEIL: f64 = 1e12;
const MAX_LOG_STEP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MPidParams {
    pub b0: f64,
    /// Initial budget multiplier.
    pub p0: f64,
    /// Initial CPC multiplier.
    pub q0: f64,
    /// Rescale `p0` and `q0` together so the first formula bid equals `b0`.
    pub calibrate: bool,
    pub kp_spend: f64,
    pub ki_spend: f64,
    pub kd_spend: f64,
    pub kp_cpc: f64,
    pub ki_cpc: f64,
    pub kd_cpc: f64,
    /// Cross gain between the two loops; 0 keeps them independent.
    pub coupling: f64,
    /// Target click count; when set, `C = budget / clicks_target`.
    pub clicks_target: Option<f64>,
}

impl Default for MPidParams {
    fn default() -> Self {
        MPidParams {
            b0: 1000.0,
            p0: 1.0,
            q0: 0.01,
            calibrate: true,
            kp_spend: 0.5,
            ki_spend: 0.0,
            kd_spend: 0.0,
            kp_cpc: 0.5,
            ki_cpc: 0.0,
            kd_cpc: 0.0,
            coupling: 0.0,
            clicks_target: None,
        }
    }
}

/// Bid maximizing conversions under a budget and a CPC cap for given
/// Lagrange multipliers `p` (budget) and `q` (CPC).
pub fn optimal_bid(ctr: f64, cvr: f64, cpc_limit: f64, p: f64, q: f64) -> f64 {
    let s = p + q;
    if !(s > 0.0) {
        return 0.0;
    }
    ctr * cvr / s + q / s * ctr * cpc_limit
}

/// Two PID loops on the multipliers of the constrained optimal bid: one
/// tracks hourly spend against a traffic-proportional reference, the
/// other tracks realized CPC against the cap.
#[derive(Debug, Clone, PartialEq)]
pub struct MPid {
    pub params: MPidParams,
    spend: TrafficPid,
    cpc: TrafficPid,
    p: f64,
    q: f64,
    cpc_limit: f64,
    spend_ref: f64,
    last_t: f64,
}

impl MPid {
    pub fn new(params: MPidParams) -> Self {
        MPid {
            params,
            spend: TrafficPid::default(),
            cpc: TrafficPid::default(),
            p: params.p0,
            q: params.q0,
            cpc_limit: 1.0,
            spend_ref: 0.0,
            last_t: 0.0,
        }
    }

    pub fn multipliers(&self) -> (f64, f64) {
        (self.p, self.q)
    }

    pub fn cpc_limit(&self) -> f64 {
        self.cpc_limit
    }

    fn calibrate(&mut self, ctr: f64, cvr: f64) {
        let (p0, q0) = (self.params.p0, self.params.q0);
        let denom = self.params.b0 * (p0 + q0) - ctr * q0 * self.cpc_limit;
        if ctr * cvr > 0.0 && denom > 0.0 {
            let s = ctr * cvr / denom;
            self.p = (s * p0).clamp(MULTIPLIER_FLOOR, MULTIPLIER_CEIL);
            self.q = (s * q0).clamp(MULTIPLIER_FLOOR, MULTIPLIER_CEIL);
        }
    }
}

fn spend_reference(obs: &Observation) -> f64 {
    let t = &obs.traffic;
    if t.t_left > 0.0 {
        obs.balance * t.t_cur / t.t_left
    } else {
        0.0
    }
}

fn scale(m: f64, u: f64) -> f64 {
    (m * (-u.clamp(-MAX_LOG_STEP, MAX_LOG_STEP)).exp()).clamp(MULTIPLIER_FLOOR, MULTIPLIER_CEIL)
}

impl Bidder for MPid {
    fn begin(&mut self, ctx: &CampaignContext) {
        let p = &self.params;
        self.spend = TrafficPid::new(PidGains {
            kp: p.kp_spend,
            ki: p.ki_spend,
            kd: p.kd_spend,
        });
        self.cpc = TrafficPid::new(PidGains {
            kp: p.kp_cpc,
            ki: p.ki_cpc,
            kd: p.kd_cpc,
        });
        self.cpc_limit = match p.clicks_target {
            Some(k) if k > 0.0 => ctx.budget / k,
            _ => ctx.cpc_limit,
        };
        self.p = p.p0;
        self.q = p.q0;
        self.spend_ref = 0.0;
        self.last_t = 0.0;
    }

    fn bid(&mut self, obs: &Observation) -> f64 {
        let t = obs.traffic.t_prev;
        if obs.step == 0 {
            if self.params.calibrate {
                self.calibrate(obs.ctr, obs.cvr);
            }
            self.spend_ref = spend_reference(obs);
            self.last_t = t;
            return self.params.b0;
        }
        let dt = t - self.last_t;
        let e_spend = if self.spend_ref > 0.0 {
            (self.spend_ref - obs.spend_last_step) / self.spend_ref
        } else {
            0.0
        };
        let e_cpc = if obs.clicks_total > 0.0 && self.cpc_limit > 0.0 {
            let cpc = obs.spent_total / obs.clicks_total;
            (self.cpc_limit - cpc) / self.cpc_limit
        } else {
            0.0
        };
        let us = self.spend.update(e_spend, dt);
        let uc = self.cpc.update(e_cpc, dt);
        let k = self.params.coupling;
        self.p = scale(self.p, us + k * uc);
        self.q = scale(self.q, uc + k * us);
        self.spend_ref = spend_reference(obs);
        self.last_t = t;
        optimal_bid(obs.ctr, obs.cvr, self.cpc_limit, self.p, self.q)
    }
}
