//! TOML configuration shared by the command-line tools.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bidders::{
    Algorithm, AlgorithmParams, AlmParams, BroiParams, MPidParams, MystiqueParams, TaPidParams,
};
use crate::data::AuctionType;
use crate::error::{Error, Result};
use crate::sim::SimConfig;
use crate::synth::SynthConfig;
use crate::tuning::{default_space, ParamKind, ParamSpec, SearchSpace, DEFAULT_TRIALS};

/// The shipped defaults, also installed as `config/default.toml`.
pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub auction: Option<String>,
    pub dataset_dir: Option<PathBuf>,
    pub algo: Option<Vec<String>>,
    pub experiment: Option<String>,
    pub category_prefix: Option<String>,
    pub cpc: Option<String>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub gamma: Option<f64>,
    pub epoch_offset: Option<i64>,
    pub tune_trials: Option<usize>,
    pub synth_campaigns: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSection {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub refine_fraction: Option<f64>,
    pub params: BTreeMap<String, ParamKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub run: RunSection,
    pub sim: SimConfig,
    pub alm: AlmParams,
    pub tapid: TaPidParams,
    pub mpid: MPidParams,
    pub mystique: MystiqueParams,
    pub broi: BroiParams,
    pub search: BTreeMap<String, SearchSection>,
    pub synth: toml::Table,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let c: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for key in c.search.keys() {
            key.parse::<Algorithm>()
                .map_err(|_| Error::Config(format!("[search.{key}] names no algorithm")))?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn shipped() -> Config {
        Self::parse(DEFAULT_CONFIG).expect("shipped config parses")
    }

    pub fn algorithms(&self) -> AlgorithmParams {
        AlgorithmParams {
            alm: self.alm,
            tapid: self.tapid,
            mpid: self.mpid,
            mystique: self.mystique,
            broi: self.broi,
        }
    }

    fn search_section(&self, a: Algorithm) -> Option<&SearchSection> {
        self.search
            .iter()
            .find(|(k, _)| k.parse::<Algorithm>().ok() == Some(a))
            .map(|(_, s)| s)
    }

    /// Search space for `a`; `trials` and `seed` fill whatever the config
    /// leaves unset.
    pub fn search_space(&self, a: Algorithm, trials: Option<usize>, seed: u64) -> SearchSpace {
        let s = self.search_section(a);
        let params = match s {
            Some(s) if !s.params.is_empty() => s
                .params
                .iter()
                .map(|(name, kind)| ParamSpec {
                    name: name.clone(),
                    kind: kind.clone(),
                })
                .collect(),
            _ => default_space(a),
        };
        SearchSpace {
            params,
            trials: trials.or(s.and_then(|s| s.trials)).unwrap_or(DEFAULT_TRIALS),
            seed: s.and_then(|s| s.seed).unwrap_or(seed),
            refine_fraction: s.and_then(|s| s.refine_fraction).unwrap_or(0.25),
        }
    }

    /// Generator settings: per-auction defaults overlaid with `[synth]`.
    pub fn synth_config(&self, auction: AuctionType, n_campaigns: usize, seed: u64) -> Result<SynthConfig> {
        let base = SynthConfig::new(auction, n_campaigns, seed);
        if self.synth.is_empty() {
            return Ok(base);
        }
        let mut value = toml::Value::try_from(&base).map_err(|e| Error::Config(e.to_string()))?;
        overlay(&mut value, &toml::Value::Table(self.synth.clone()));
        let mut cfg: SynthConfig = value.try_into().map_err(|e: toml::de::Error| Error::Config(format!("[synth]: {e}")))?;
        // the command line decides these
        cfg.auction_type = auction;
        cfg.n_campaigns = n_campaigns;
        if !self.synth.contains_key("seed") {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

/// Recursively replaces entries of `base` with those of `top`.
fn overlay(base: &mut toml::Value, top: &toml::Value) {
    match (base, top) {
        (toml::Value::Table(b), toml::Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}
