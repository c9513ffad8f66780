use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamKind {
    Continuous { lo: f64, hi: f64 },
    /// Sampled uniformly in `ln` space; bounds must be positive.
    LogUniform { lo: f64, hi: f64 },
    Discrete { choices: Vec<f64> },
}

impl ParamKind {
    fn check(&self, name: &str) -> Result<()> {
        let bad = |why: &str| Err(Error::Config(format!("search parameter {name}: {why}")));
        match self {
            ParamKind::Continuous { lo, hi } if !(lo <= hi) => bad("lo must not exceed hi"),
            ParamKind::LogUniform { lo, hi } if !(*lo > 0.0 && lo <= hi) => {
                bad("log-uniform bounds must be positive with lo <= hi")
            }
            ParamKind::Discrete { choices } if choices.is_empty() => bad("no choices"),
            _ => Ok(()),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ParamKind::Continuous { lo, hi } => lerp(*lo, *hi, rng.random()),
            ParamKind::LogUniform { lo, hi } => lerp(lo.ln(), hi.ln(), rng.random()).exp().clamp(*lo, *hi),
            ParamKind::Discrete { choices } => choices[rng.random_range(0..choices.len())],
        }
    }

    /// A point near `x`; `scale` is a fraction of the range.
    fn perturb(&self, x: f64, scale: f64, rng: &mut ChaCha8Rng) -> f64 {
        let noise = Normal::new(0.0, scale).expect("finite scale").sample(rng);
        match self {
            ParamKind::Continuous { lo, hi } => (x + noise * (hi - lo)).clamp(*lo, *hi),
            ParamKind::LogUniform { lo, hi } => {
                (x.ln() + noise * (hi.ln() - lo.ln())).exp().clamp(*lo, *hi)
            }
            ParamKind::Discrete { choices } => {
                let at = choices.iter().position(|c| *c == x).unwrap_or(0) as f64;
                let k = (at + noise * choices.len() as f64).round();
                choices[k.clamp(0.0, (choices.len() - 1) as f64) as usize]
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            ParamKind::Continuous { lo, hi } | ParamKind::LogUniform { lo, hi } => (*lo..=*hi).contains(&x),
            ParamKind::Discrete { choices } => choices.contains(&x),
        }
    }
}

fn lerp(lo: f64, hi: f64, u: f64) -> f64 {
    (lo + (hi - lo) * u).clamp(lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: ParamKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub params: Vec<ParamSpec>,
    pub trials: usize,
    pub seed: u64,
    /// Share of the trials spent perturbing the best points found so far.
    pub refine_fraction: f64,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trial budget must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.refine_fraction) {
            return Err(Error::Config("refine_fraction must lie in [0, 1]".into()));
        }
        self.params.iter().try_for_each(|p| p.kind.check(&p.name))
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub values: Vec<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub names: Vec<String>,
    pub best: Trial,
    pub trials: Vec<Trial>,
}

impl SearchResult {
    /// Trial log with columns `trial, <params...>, score`.
    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let map = |e: csv::Error| Error::InvalidArgument(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["trial".to_string()];
        header.extend(self.names.iter().cloned());
        header.push("score".into());
        w.write_record(&header).map_err(map)?;
        for t in &self.trials {
            let mut row = vec![t.index.to_string()];
            row.extend(t.values.iter().map(|v| v.to_string()));
            row.push(t.score.to_string());
            w.write_record(&row).map_err(map)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(())
    }
}

/// Maximizes an objective over a search space.
pub trait Searcher {
    fn search(&self, space: &SearchSpace, objective: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<SearchResult>;
}

/// Seeded random search, optionally followed by rounds of Gaussian
/// perturbation around the best trials.
///
/// Points of each round are drawn before any is evaluated, so the trial
/// sequence depends only on the seed and on earlier scores, never on how
/// evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSearch {
    pub refine_rounds: usize,
    pub elite: usize,
}

impl Default for RandomSearch {
    fn default() -> Self {
        RandomSearch {
            refine_rounds: 4,
            elite: 5,
        }
    }
}

fn score_of(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x
    }
}

fn evaluate(points: Vec<Vec<f64>>, first: usize, objective: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Vec<Trial> {
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, values)| {
            let score = score_of(objective(&values));
            Trial {
                index: first + i,
                values,
                score,
            }
        })
        .collect()
}

fn ranked(trials: &[Trial]) -> Vec<&Trial> {
    let mut r: Vec<&Trial> = trials.iter().collect();
    r.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    r
}

impl Searcher for RandomSearch {
    fn search(&self, space: &SearchSpace, objective: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<SearchResult> {
        space.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(space.seed);
        let n_refine = if self.refine_rounds > 0 {
            ((space.trials as f64 * space.refine_fraction).round() as usize).min(space.trials - 1)
        } else {
            0
        };
        let n_random = space.trials - n_refine;
        let points: Vec<Vec<f64>> = (0..n_random)
            .map(|_| space.params.iter().map(|p| p.kind.sample(&mut rng)).collect())
            .collect();
        let mut trials = evaluate(points, 0, objective);

        let rounds = self.refine_rounds.min(n_refine);
        let mut scale = 0.1;
        for round in 0..rounds {
            let count = n_refine / rounds + usize::from(round < n_refine % rounds);
            let elite: Vec<Vec<f64>> = ranked(&trials)
                .into_iter()
                .take(self.elite.max(1))
                .map(|t| t.values.clone())
                .collect();
            let points: Vec<Vec<f64>> = (0..count)
                .map(|k| {
                    let base = &elite[k % elite.len()];
                    space
                        .params
                        .iter()
                        .zip(base)
                        .map(|(p, &x)| p.kind.perturb(x, scale, &mut rng))
                        .collect()
                })
                .collect();
            let first = trials.len();
            trials.extend(evaluate(points, first, objective));
            scale *= 0.5;
        }

        let best = ranked(&trials)[0].clone();
        Ok(SearchResult {
            names: space.params.iter().map(|p| p.name.clone()).collect(),
            best,
            trials,
        })
    }
}
