//! Time-disjoint train/validation split and hyperparameter search.

mod search;
mod split;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bidders::{Algorithm, BidderParams};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{rel_cpc_own_caps, rmse_t, scr, RelCpc};
use crate::sim::{
    category_cpc, run_experiment, select_campaigns, CampaignFilter, CpcPolicy, ExperimentConfig,
    ExperimentResult,
};

pub use search::{ParamKind, ParamSpec, RandomSearch, SearchResult, SearchSpace, Searcher, Trial};
pub use split::{split_time_disjoint, Split};

pub const DEFAULT_TRIALS: usize = 200;

/// What a tuning run maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Negative mean budget-normalized RMSE_T.
    Pacing,
    /// Negative REL_CPC; runs without clicks score minus infinity.
    Cpc,
    /// Mean clicks per campaign.
    Clicks,
}

impl Objective {
    pub fn score(self, r: &ExperimentResult) -> f64 {
        let n = r.trajectories.len();
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        match self {
            Objective::Pacing => {
                let norms: Vec<f64> = r
                    .trajectories
                    .iter()
                    .filter_map(|t| rmse_t(t).ok().and_then(|m| m.normalized))
                    .collect();
                if norms.is_empty() {
                    f64::NEG_INFINITY
                } else {
                    -norms.iter().sum::<f64>() / norms.len() as f64
                }
            }
            Objective::Cpc => match rel_cpc_own_caps(&r.trajectories) {
                RelCpc::Defined(v) => -v,
                RelCpc::Undefined => f64::NEG_INFINITY,
            },
            Objective::Clicks => scr(&r.trajectories) / n as f64,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Pacing => "pacing",
            Objective::Cpc => "cpc",
            Objective::Clicks => "clicks",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pacing" => Ok(Objective::Pacing),
            "cpc" => Ok(Objective::Cpc),
            "clicks" | "duration-split" => Ok(Objective::Clicks),
            _ => Err(Error::InvalidArgument(format!("unknown objective {s:?}"))),
        }
    }
}

fn ids_filter(ids: &[u64]) -> CampaignFilter {
    CampaignFilter {
        ids: Some(ids.iter().copied().collect()),
        ..CampaignFilter::default()
    }
}

/// Runs `params` on the given campaigns only and scores the result.
pub fn evaluate(
    params: &BidderParams,
    d: &Dataset,
    ids: &[u64],
    objective: Objective,
    cfg: &ExperimentConfig,
) -> Result<f64> {
    if ids.is_empty() {
        return Err(Error::EmptySelection);
    }
    let r = run_experiment(d, || params.build(), cfg, &ids_filter(ids))?;
    Ok(objective.score(&r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub split: Split,
    pub category_cpc: Option<f64>,
    pub best_params: BidderParams,
    pub train_score: f64,
    pub test_score: f64,
    pub search: SearchResult,
}

/// Applies a point of `space` to a copy of `base`.
pub fn apply(base: &BidderParams, space: &SearchSpace, values: &[f64]) -> Result<BidderParams> {
    let mut p = *base;
    for (spec, v) in space.params.iter().zip(values) {
        p.set(&spec.name, *v)?;
    }
    Ok(p)
}

/// Splits the selected campaigns in time, searches on the earlier part and
/// scores the winner on the later part.
pub fn tune(
    d: &Dataset,
    base: &BidderParams,
    space: &SearchSpace,
    objective: Objective,
    cfg: &ExperimentConfig,
    filter: &CampaignFilter,
    searcher: &dyn Searcher,
) -> Result<TuneReport> {
    apply(base, space, &vec![0.0; space.params.len()])?;
    let selected = select_campaigns(d, filter);
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    let split = split_time_disjoint(selected.iter().copied())?;
    let mut cfg = cfg.clone();
    if cfg.cpc == CpcPolicy::CategoryDiv10 && cfg.category_cpc.is_none() {
        cfg.category_cpc = Some(category_cpc(d, selected.iter().copied())?);
    }
    let objective_fn = |values: &[f64]| match apply(base, space, values) {
        Ok(p) => evaluate(&p, d, &split.train, objective, &cfg).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    };
    let search = searcher.search(space, &objective_fn)?;
    let best_params = apply(base, space, &search.best.values)?;
    let test_score = evaluate(&best_params, d, &split.test, objective, &cfg)?;
    Ok(TuneReport {
        algorithm: base.algorithm(),
        objective,
        train_score: search.best.score,
        test_score,
        category_cpc: cfg.category_cpc,
        best_params,
        split,
        search,
    })
}

fn cont(name: &str, lo: f64, hi: f64) -> ParamSpec {
    ParamSpec {
        name: name.into(),
        kind: ParamKind::Continuous { lo, hi },
    }
}

fn log(name: &str, lo: f64, hi: f64) -> ParamSpec {
    ParamSpec {
        name: name.into(),
        kind: ParamKind::LogUniform { lo, hi },
    }
}

/// Search ranges used when the config declares none.
pub fn default_space(a: Algorithm) -> Vec<ParamSpec> {
    let b0 = log("b0", 10.0, 1e5);
    match a {
        Algorithm::Alm => vec![b0, cont("beta", 0.0, 10.0), cont("clip_hi", 0.1, 3.0)],
        Algorithm::TaPid => vec![b0, cont("kp", 0.0, 2.0), cont("ki", 0.0, 2.0), cont("kd", 0.0, 0.01)],
        Algorithm::MPid => vec![
            b0,
            log("q0", 1e-4, 10.0),
            cont("kp_spend", 0.0, 2.0),
            cont("ki_spend", 0.0, 1.0),
            cont("kp_cpc", 0.0, 2.0),
            cont("ki_cpc", 0.0, 1.0),
        ],
        Algorithm::Mystique => vec![
            b0,
            cont("alpha", 0.0, 10.0),
            cont("beta", 0.0, 1.0),
            ParamSpec {
                name: "window".into(),
                kind: ParamKind::Discrete {
                    choices: vec![1.0, 2.0, 3.0, 6.0],
                },
            },
        ],
        Algorithm::Broi => vec![b0, log("eta_budget", 0.1, 1e3), log("eta_roi", 0.1, 1e3)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bidders::ConstantBid;
    use crate::data::{AuctionType, DatasetBuilder};
    use crate::sim::tests::{campaign, rec};
    use crate::traffic::{TrafficProfile, WeekClock, HOUR};

    fn staggered(n: u64) -> Dataset {
        let mut b = DatasetBuilder::new();
        for id in 0..n {
            let mut c = campaign(id, 2, 1000);
            c.campaign_start = id as i64 * 2 * HOUR;
            c.campaign_end = c.campaign_start + 2 * HOUR;
            for h in 0..2 {
                let mut r = rec(1, 10.0 * (id + 1) as f64, 0.1, 0.5 + id as f64);
                r.campaign_id = id;
                r.period = c.campaign_start + h * HOUR;
                b.add_stat(r).unwrap();
            }
            b.add_campaign(c);
        }
        b.add_profile(&TrafficProfile::uniform(1));
        b.build(AuctionType::Vcg, 1.2, WeekClock::default())
    }

    #[test]
    fn evaluate_passes_clicks_through() {
        let d = staggered(4);
        let p = BidderParams::default_for(Algorithm::TaPid);
        let cfg = ExperimentConfig::default();
        // every campaign wins bin 1 both hours with the default cold start
        let score = evaluate(&p, &d, &[2, 3], Objective::Clicks, &cfg).unwrap();
        let direct = run_experiment(&d, || ConstantBid(1e9), &cfg, &ids_filter(&[2, 3])).unwrap();
        assert!((score - scr(&direct.trajectories) / 2.0).abs() < 1e-12);
        assert!((score - (2.0 * 2.5 + 2.0 * 3.5) / 2.0).abs() < 1e-12);
        assert!(matches!(evaluate(&p, &d, &[], Objective::Clicks, &cfg), Err(Error::EmptySelection)));
    }

    #[test]
    fn evaluation_ignores_other_campaigns() {
        let d = staggered(6);
        let p = BidderParams::default_for(Algorithm::Alm);
        let cfg = ExperimentConfig::default();
        let full = evaluate(&p, &d, &[4, 5], Objective::Pacing, &cfg).unwrap();
        let only = d.subset(|c| c.campaign_id >= 4);
        let alone = evaluate(&p, &only, &[4, 5], Objective::Pacing, &cfg).unwrap();
        assert_eq!(full, alone);
    }

    #[test]
    fn tune_reports_disjoint_scores() {
        let d = staggered(6);
        let base = BidderParams::default_for(Algorithm::Alm);
        let space = SearchSpace {
            params: default_space(Algorithm::Alm),
            trials: 12,
            seed: 5,
            refine_fraction: 0.25,
        };
        let cfg = ExperimentConfig::default();
        let r = tune(&d, &base, &space, Objective::Clicks, &cfg, &CampaignFilter::default(), &RandomSearch::default()).unwrap();
        assert_eq!(r.search.trials.len(), 12);
        assert!(r.split.train.iter().all(|id| !r.split.test.contains(id)));
        let again = evaluate(&r.best_params, &d, &r.split.test, Objective::Clicks, &cfg).unwrap();
        assert_eq!(again, r.test_score);
        let r2 = tune(&d, &base, &space, Objective::Clicks, &cfg, &CampaignFilter::default(), &RandomSearch::default()).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn unknown_search_parameter_fails_fast() {
        let d = staggered(4);
        let space = SearchSpace {
            params: vec![cont("nope", 0.0, 1.0)],
            trials: 3,
            seed: 1,
            refine_fraction: 0.0,
        };
        let r = tune(
            &d,
            &BidderParams::default_for(Algorithm::Broi),
            &space,
            Objective::Cpc,
            &ExperimentConfig::default(),
            &CampaignFilter::default(),
            &RandomSearch::default(),
        );
        assert!(matches!(r, Err(Error::UnknownParameter { .. })));
    }

    #[test]
    fn default_spaces_name_real_parameters() {
        for a in Algorithm::ALL {
            let base = BidderParams::default_for(a);
            for spec in default_space(a) {
                assert!(base.names().contains(&spec.name.as_str()), "{a} {}", spec.name);
            }
        }
    }
}
