use serde::{Deserialize, Serialize};

use super::{
    Algorithm, Alm, AlmParams, AnyBidder, Broi, BroiParams, MPid, MPidParams, Mystique,
    MystiqueParams, TaPid, TaPidParams,
};
use crate::error::{Error, Result};

/// Parameters for every algorithm, as read from a config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    pub alm: AlmParams,
    pub tapid: TaPidParams,
    pub mpid: MPidParams,
    pub mystique: MystiqueParams,
    pub broi: BroiParams,
}

impl AlgorithmParams {
    pub fn get(&self, a: Algorithm) -> BidderParams {
        match a {
            Algorithm::Alm => BidderParams::Alm(self.alm),
            Algorithm::TaPid => BidderParams::TaPid(self.tapid),
            Algorithm::MPid => BidderParams::MPid(self.mpid),
            Algorithm::Mystique => BidderParams::Mystique(self.mystique),
            Algorithm::Broi => BidderParams::Broi(self.broi),
        }
    }

    pub fn put(&mut self, p: BidderParams) {
        match p {
            BidderParams::Alm(p) => self.alm = p,
            BidderParams::TaPid(p) => self.tapid = p,
            BidderParams::MPid(p) => self.mpid = p,
            BidderParams::Mystique(p) => self.mystique = p,
            BidderParams::Broi(p) => self.broi = p,
        }
    }
}

/// Parameters of one algorithm; also the factory for its bidders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum BidderParams {
    Alm(AlmParams),
    TaPid(TaPidParams),
    MPid(MPidParams),
    Mystique(MystiqueParams),
    Broi(BroiParams),
}

impl BidderParams {
    pub fn default_for(a: Algorithm) -> Self {
        AlgorithmParams::default().get(a)
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            BidderParams::Alm(_) => Algorithm::Alm,
            BidderParams::TaPid(_) => Algorithm::TaPid,
            BidderParams::MPid(_) => Algorithm::MPid,
            BidderParams::Mystique(_) => Algorithm::Mystique,
            BidderParams::Broi(_) => Algorithm::Broi,
        }
    }

    pub fn build(&self) -> AnyBidder {
        match *self {
            BidderParams::Alm(p) => AnyBidder::Alm(Alm::new(p)),
            BidderParams::TaPid(p) => AnyBidder::TaPid(TaPid::new(p)),
            BidderParams::MPid(p) => AnyBidder::MPid(MPid::new(p)),
            BidderParams::Mystique(p) => AnyBidder::Mystique(Mystique::new(p)),
            BidderParams::Broi(p) => AnyBidder::Broi(Broi::new(p)),
        }
    }

    /// Names accepted by [`BidderParams::set`].
    pub fn names(&self) -> &'static [&'static str] {
        match self {
            BidderParams::Alm(_) => &["b0", "beta", "clip_lo", "clip_hi"],
            BidderParams::TaPid(_) => &["b0", "kp", "ki", "kd", "normalize_error"],
            BidderParams::MPid(_) => &[
                "b0", "p0", "q0", "calibrate", "kp_spend", "ki_spend", "kd_spend", "kp_cpc",
                "ki_cpc", "kd_cpc", "coupling", "clicks_target",
            ],
            BidderParams::Mystique(_) => &["b0", "alpha", "beta", "window"],
            BidderParams::Broi(_) => &[
                "b0", "eta_budget", "eta_roi", "mu_budget0", "mu_roi0", "mu_max",
            ],
        }
    }

    /// Sets a numeric parameter. Flags take nonzero as true, `window` is
    /// rounded and `clicks_target <= 0` clears the target.
    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        let algorithm = self.algorithm();
        let slot: &mut f64 = match (self, name) {
            (BidderParams::TaPid(p), "normalize_error") => {
                p.normalize_error = v != 0.0;
                return Ok(());
            }
            (BidderParams::MPid(p), "calibrate") => {
                p.calibrate = v != 0.0;
                return Ok(());
            }
            (BidderParams::MPid(p), "clicks_target") => {
                p.clicks_target = (v > 0.0).then_some(v);
                return Ok(());
            }
            (BidderParams::Mystique(p), "window") => {
                p.window = v.round().max(1.0) as usize;
                return Ok(());
            }
            (BidderParams::Alm(p), "b0") => &mut p.b0,
            (BidderParams::Alm(p), "beta") => &mut p.beta,
            (BidderParams::Alm(p), "clip_lo") => &mut p.clip_lo,
            (BidderParams::Alm(p), "clip_hi") => &mut p.clip_hi,
            (BidderParams::TaPid(p), "b0") => &mut p.b0,
            (BidderParams::TaPid(p), "kp") => &mut p.kp,
            (BidderParams::TaPid(p), "ki") => &mut p.ki,
            (BidderParams::TaPid(p), "kd") => &mut p.kd,
            (BidderParams::MPid(p), "b0") => &mut p.b0,
            (BidderParams::MPid(p), "p0") => &mut p.p0,
            (BidderParams::MPid(p), "q0") => &mut p.q0,
            (BidderParams::MPid(p), "kp_spend") => &mut p.kp_spend,
            (BidderParams::MPid(p), "ki_spend") => &mut p.ki_spend,
            (BidderParams::MPid(p), "kd_spend") => &mut p.kd_spend,
            (BidderParams::MPid(p), "kp_cpc") => &mut p.kp_cpc,
            (BidderParams::MPid(p), "ki_cpc") => &mut p.ki_cpc,
            (BidderParams::MPid(p), "kd_cpc") => &mut p.kd_cpc,
            (BidderParams::MPid(p), "coupling") => &mut p.coupling,
            (BidderParams::Mystique(p), "b0") => &mut p.b0,
            (BidderParams::Mystique(p), "alpha") => &mut p.alpha,
            (BidderParams::Mystique(p), "beta") => &mut p.beta,
            (BidderParams::Broi(p), "b0") => &mut p.b0,
            (BidderParams::Broi(p), "eta_budget") => &mut p.eta_budget,
            (BidderParams::Broi(p), "eta_roi") => &mut p.eta_roi,
            (BidderParams::Broi(p), "mu_budget0") => &mut p.mu_budget0,
            (BidderParams::Broi(p), "mu_roi0") => &mut p.mu_roi0,
            (BidderParams::Broi(p), "mu_max") => &mut p.mu_max,
            _ => {
                return Err(Error::UnknownParameter {
                    algorithm: algorithm.tag().to_string(),
                    param: name.to_string(),
                })
            }
        };
        *slot = v;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let v = match (self, name) {
            (BidderParams::Alm(p), "b0") => p.b0,
            (BidderParams::Alm(p), "beta") => p.beta,
            (BidderParams::Alm(p), "clip_lo") => p.clip_lo,
            (BidderParams::Alm(p), "clip_hi") => p.clip_hi,
            (BidderParams::TaPid(p), "b0") => p.b0,
            (BidderParams::TaPid(p), "kp") => p.kp,
            (BidderParams::TaPid(p), "ki") => p.ki,
            (BidderParams::TaPid(p), "kd") => p.kd,
            (BidderParams::TaPid(p), "normalize_error") => flag(p.normalize_error),
            (BidderParams::MPid(p), "b0") => p.b0,
            (BidderParams::MPid(p), "p0") => p.p0,
            (BidderParams::MPid(p), "q0") => p.q0,
            (BidderParams::MPid(p), "calibrate") => flag(p.calibrate),
            (BidderParams::MPid(p), "kp_spend") => p.kp_spend,
            (BidderParams::MPid(p), "ki_spend") => p.ki_spend,
            (BidderParams::MPid(p), "kd_spend") => p.kd_spend,
            (BidderParams::MPid(p), "kp_cpc") => p.kp_cpc,
            (BidderParams::MPid(p), "ki_cpc") => p.ki_cpc,
            (BidderParams::MPid(p), "kd_cpc") => p.kd_cpc,
            (BidderParams::MPid(p), "coupling") => p.coupling,
            (BidderParams::MPid(p), "clicks_target") => p.clicks_target.unwrap_or(0.0),
            (BidderParams::Mystique(p), "b0") => p.b0,
            (BidderParams::Mystique(p), "alpha") => p.alpha,
            (BidderParams::Mystique(p), "beta") => p.beta,
            (BidderParams::Mystique(p), "window") => p.window as f64,
            (BidderParams::Broi(p), "b0") => p.b0,
            (BidderParams::Broi(p), "eta_budget") => p.eta_budget,
            (BidderParams::Broi(p), "eta_roi") => p.eta_roi,
            (BidderParams::Broi(p), "mu_budget0") => p.mu_budget0,
            (BidderParams::Broi(p), "mu_roi0") => p.mu_roi0,
            (BidderParams::Broi(p), "mu_max") => p.mu_max,
            _ => {
                return Err(Error::UnknownParameter {
                    algorithm: self.algorithm().tag().to_string(),
                    param: name.to_string(),
                })
            }
        };
        Ok(v)
    }
}
