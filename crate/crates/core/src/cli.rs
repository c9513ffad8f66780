//! Command-line front end: dataset validation, experiments, tuning and
//! synthetic data.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bidders::{Algorithm, BidderParams};
use crate::config::Config;
use crate::data::{load_dataset, validate_dataset, write_dataset, AuctionType, Dataset, DatasetPaths, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::metrics::MetricReport;
use crate::sim::{category_cpc, run_experiment, select_campaigns, CampaignFilter, CpcPolicy, DurationClass, ExperimentConfig};
use crate::synth::{describe, generate, DatasetSummary};
use crate::traffic::WeekClock;
use crate::tuning::{tune, Objective, RandomSearch, SearchResult, Split};

#[derive(Debug, Parser)]
#[command(name = "bidbench", version, about = "Replay hourly auction statistics and benchmark autobidders")]
pub struct Cli {
    /// TOML config file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the dataset checks; exits 1 if any fails.
    Validate(ValidateArgs),
    /// Run one of the benchmark experiments and write report files.
    Experiment(ExperimentArgs),
    /// Tune one or more algorithms on a time-disjoint split.
    Tune(ExperimentArgs),
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Print summary statistics of a dataset as JSON.
    Describe(DataArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Directory with campaigns.csv, auction_stats.csv and traffic.csv, or
    /// with one such directory per auction type.
    #[arg(long)]
    pub dataset_dir: Option<PathBuf>,
    /// Use this many synthetic campaigns instead of reading files.
    #[arg(long, value_name = "N")]
    pub synth: Option<usize>,
    /// Auction types, comma separated: vcg, fp.
    #[arg(long, value_delimiter = ',')]
    pub auction: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Seconds added to timestamps before mapping them to week slots.
    #[arg(long, allow_negative_numbers = true)]
    pub epoch_offset: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// pacing, cpc, clicks or duration-split.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Algorithms, comma separated, or `all`.
    #[arg(long, value_delimiter = ',')]
    pub algo: Vec<String>,
    #[arg(long)]
    pub category_prefix: Option<String>,
    /// fixed:<value>, budget or category-div-10.
    #[arg(long)]
    pub cpc: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trials per algorithm; 0 skips tuning.
    #[arg(long)]
    pub tune_trials: Option<usize>,
    /// Objective for `tune`: pacing, cpc or clicks.
    #[arg(long)]
    pub objective: Option<String>,
    /// Also write every step of every campaign.
    #[arg(long)]
    pub dump_trajectories: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Auction types, comma separated: vcg, fp.
    #[arg(long, value_delimiter = ',')]
    pub auction: Vec<String>,
    /// Number of campaigns per auction type.
    #[arg(long, short = 'n')]
    pub campaigns: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// The four experiment designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Pacing,
    Cpc,
    Clicks,
    DurationSplit,
}

impl ExperimentKind {
    pub fn tag(self) -> &'static str {
        match self {
            ExperimentKind::Pacing => "pacing",
            ExperimentKind::Cpc => "cpc",
            ExperimentKind::Clicks => "clicks",
            ExperimentKind::DurationSplit => "duration-split",
        }
    }

    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            ExperimentKind::Pacing => vec![Algorithm::Alm, Algorithm::TaPid, Algorithm::MPid, Algorithm::Mystique],
            ExperimentKind::Cpc => vec![Algorithm::MPid, Algorithm::Broi],
            ExperimentKind::Clicks | ExperimentKind::DurationSplit => Algorithm::ALL.to_vec(),
        }
    }

    pub fn cpc_policy(self) -> CpcPolicy {
        match self {
            ExperimentKind::Cpc => CpcPolicy::CategoryDiv10,
            _ => CpcPolicy::Budget,
        }
    }

    pub fn objective(self) -> Objective {
        match self {
            ExperimentKind::Pacing => Objective::Pacing,
            ExperimentKind::Cpc => Objective::Cpc,
            ExperimentKind::Clicks | ExperimentKind::DurationSplit => Objective::Clicks,
        }
    }

    fn classes(self) -> Vec<Option<DurationClass>> {
        match self {
            ExperimentKind::DurationSplit => vec![Some(DurationClass::Short), Some(DurationClass::Long)],
            _ => vec![None],
        }
    }

    /// Metric columns of the wide table.
    fn columns(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Pacing => &["rmse_t", "scr"],
            ExperimentKind::Cpc => &["rel_cpc"],
            ExperimentKind::Clicks => &["scr"],
            ExperimentKind::DurationSplit => &["per_diem_scr"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pacing" => Ok(ExperimentKind::Pacing),
            "cpc" => Ok(ExperimentKind::Cpc),
            "clicks" => Ok(ExperimentKind::Clicks),
            "duration-split" => Ok(ExperimentKind::DurationSplit),
            _ => Err(Error::InvalidArgument(format!(
                "unknown experiment {s:?}; expected pacing, cpc, clicks or duration-split"
            ))),
        }
    }
}

fn class_tag(c: Option<DurationClass>) -> Option<&'static str> {
    c.map(|c| match c {
        DurationClass::Short => "short",
        DurationClass::Long => "long",
    })
}

/// Dataset source after merging flags with the config.
#[derive(Debug, Clone)]
struct DataPlan {
    dir: Option<PathBuf>,
    synth: Option<usize>,
    auctions: Vec<AuctionType>,
    seed: u64,
    gamma: f64,
    clock: WeekClock,
}

impl DataPlan {
    fn resolve(a: &DataArgs, cfg: &Config) -> Result<DataPlan> {
        let auctions = parse_auctions(&a.auction, cfg.run.auction.as_deref())?;
        let dir = a.dataset_dir.clone().or(cfg.run.dataset_dir.clone());
        let synth = a.synth.or(if dir.is_none() { cfg.run.synth_campaigns } else { None });
        Ok(DataPlan {
            dir,
            synth,
            auctions,
            seed: a.seed.or(cfg.run.seed).unwrap_or(42),
            gamma: a.gamma.or(cfg.run.gamma).unwrap_or(DEFAULT_GAMMA),
            clock: WeekClock::new(a.epoch_offset.or(cfg.run.epoch_offset).unwrap_or(0)),
        })
    }

    /// Files for one auction type: `<dir>/<auction>/` when present, else `<dir>`.
    fn paths(&self, auction: AuctionType) -> Option<DatasetPaths> {
        let dir = self.dir.as_ref()?;
        let sub = dir.join(auction.to_string());
        Some(if sub.is_dir() { DatasetPaths::in_dir(sub) } else { DatasetPaths::in_dir(dir) })
    }

    fn load(&self, auction: AuctionType, cfg: &Config) -> Result<Dataset> {
        match (self.paths(auction), self.synth) {
            (Some(paths), _) => load_dataset(&paths, auction, self.gamma, self.clock),
            (None, Some(n)) => generate(&cfg.synth_config(auction, n, self.seed)?),
            (None, None) => Err(Error::InvalidArgument("pass --dataset-dir or --synth".into())),
        }
    }
}

fn parse_auctions(flag: &[String], cfg: Option<&str>) -> Result<Vec<AuctionType>> {
    let raw: Vec<String> = if !flag.is_empty() {
        flag.to_vec()
    } else if let Some(c) = cfg {
        c.split(',').map(str::to_string).collect()
    } else {
        vec!["fp".into()]
    };
    let mut out = Vec::new();
    for s in raw {
        let t: AuctionType = s.trim().parse()?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn parse_algorithms(flag: &[String], cfg: Option<&Vec<String>>, fallback: Vec<Algorithm>) -> Result<Vec<Algorithm>> {
    let raw: &[String] = if !flag.is_empty() {
        flag
    } else if let Some(c) = cfg {
        c
    } else {
        return Ok(fallback);
    };
    if raw.iter().any(|s| s == "all") {
        return Ok(Algorithm::ALL.to_vec());
    }
    let mut out = Vec::new();
    for s in raw {
        let a: Algorithm = s.parse().map_err(|_| Error::UnknownAlgorithm(s.clone()))?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Parses arguments, runs the command and maps failures to exit status 2.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs a parsed command line; returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Validate(a) => cmd_validate(&a, &cfg),
        Command::Experiment(a) => cmd_experiment(&a, &cfg).map(|_| 0),
        Command::Tune(a) => cmd_tune(&a, &cfg).map(|_| 0),
        Command::Synth(a) => cmd_synth(&a, &cfg).map(|_| 0),
        Command::Describe(a) => cmd_describe(&a, &cfg).map(|_| 0),
    }
}

#[derive(Serialize)]
struct ValidationOutput {
    auction_type: AuctionType,
    report: crate::data::ValidationReport,
}

/// Validates every requested dataset; returns 0 if all checks pass, 1 otherwise.
pub fn cmd_validate(a: &ValidateArgs, cfg: &Config) -> Result<u8> {
    let plan = DataPlan::resolve(&a.data, cfg)?;
    if plan.dir.is_none() && a.data.synth.is_none() {
        return Err(Error::InvalidArgument("validate needs --dataset-dir or --synth".into()));
    }
    let mut outputs = Vec::new();
    for &t in &plan.auctions {
        let d = plan.load(t, cfg)?;
        let report = validate_dataset(&d);
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("{t}: check {} failed: {}", c.name, c.failures.join("; "));
        }
        outputs.push(ValidationOutput {
            auction_type: t,
            report,
        });
    }
    let json = serde_json::to_string_pretty(&outputs)?;
    let path = a
        .report
        .clone()
        .unwrap_or_else(|| cfg.run.out.clone().unwrap_or_else(|| "out".into()).join("validation.json"));
    write_text(&path, &json)?;
    println!("{json}");
    Ok(if outputs.iter().all(|o| o.report.passed) { 0 } else { 1 })
}

/// Everything an experiment run needs after merging flags and config.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentPlan {
    pub experiment: ExperimentKind,
    pub algorithms: Vec<Algorithm>,
    pub cpc: CpcPolicy,
    pub objective: Objective,
    pub category_prefix: Option<String>,
    pub seed: u64,
    pub tune_trials: usize,
    pub auctions: Vec<AuctionType>,
    #[serde(skip)]
    out: PathBuf,
    #[serde(skip)]
    jobs: usize,
    #[serde(skip)]
    dump: bool,
    #[serde(skip)]
    data: DataPlan,
}

impl ExperimentPlan {
    fn resolve(a: &ExperimentArgs, cfg: &Config, tuning: bool) -> Result<ExperimentPlan> {
        let data = DataPlan::resolve(&a.data, cfg)?;
        let experiment: ExperimentKind = a
            .experiment
            .as_deref()
            .or(cfg.run.experiment.as_deref())
            .unwrap_or("pacing")
            .parse()?;
        let cpc = match a.cpc.as_deref().or(cfg.run.cpc.as_deref()) {
            Some(s) => s.parse()?,
            None => experiment.cpc_policy(),
        };
        let objective = match a.objective.as_deref() {
            Some(s) => s.parse()?,
            None => experiment.objective(),
        };
        let tune_trials = a.tune_trials.or(cfg.run.tune_trials).unwrap_or(0);
        Ok(ExperimentPlan {
            algorithms: parse_algorithms(&a.algo, cfg.run.algo.as_ref(), experiment.algorithms())?,
            experiment,
            cpc,
            objective,
            category_prefix: a.category_prefix.clone().or(cfg.run.category_prefix.clone()),
            seed: data.seed,
            tune_trials: if tuning && tune_trials == 0 { crate::tuning::DEFAULT_TRIALS } else { tune_trials },
            auctions: data.auctions.clone(),
            out: a.out.clone().or(cfg.run.out.clone()).unwrap_or_else(|| "out".into()),
            jobs: a.jobs.or(cfg.run.jobs).unwrap_or(0),
            dump: a.dump_trajectories,
            data,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TuningSummary {
    pub split: Split,
    pub train_score: f64,
    pub test_score: f64,
    #[serde(skip)]
    pub search: SearchResult,
}

/// One algorithm on one auction type and duration class.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub auction_type: AuctionType,
    pub duration_class: Option<&'static str>,
    pub algorithm: Algorithm,
    pub category_cpc: Option<f64>,
    pub params: BidderParams,
    pub tuning: Option<TuningSummary>,
    pub report: MetricReport,
    #[serde(skip)]
    pub trajectories: Vec<crate::sim::CampaignTrajectory>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    pub plan: ExperimentPlan,
    pub runs: Vec<RunRecord>,
}

impl ExperimentOutput {
    /// Rows are algorithms, columns are metric per auction type and class.
    pub fn wide_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut groups: Vec<(AuctionType, Option<&'static str>)> = Vec::new();
        for r in &self.runs {
            if !groups.contains(&(r.auction_type, r.duration_class)) {
                groups.push((r.auction_type, r.duration_class));
            }
        }
        let cols = self.plan.experiment.columns();
        let mut header = vec!["algorithm".to_string()];
        for (t, class) in &groups {
            for c in cols {
                header.push(match class {
                    Some(k) => format!("{t}_{k}_{c}"),
                    None => format!("{t}_{c}"),
                });
            }
        }
        let rows = self
            .plan
            .algorithms
            .iter()
            .map(|a| {
                let mut row = vec![a.label().to_string()];
                for g in &groups {
                    let run = self.runs.iter().find(|r| r.algorithm == *a && (r.auction_type, r.duration_class) == *g);
                    for c in cols {
                        row.push(run.map(|r| metric(&r.report, c)).unwrap_or_default());
                    }
                }
                row
            })
            .collect();
        (header, rows)
    }

    /// Writes `table.csv`, `metrics.csv`, `report.json`, per-run trial logs
    /// and, if asked, trajectories.
    pub fn write(&self, out: &Path) -> Result<()> {
        let (header, rows) = self.wide_table();
        let path = out.join("table.csv");
        let mut w = csv::Writer::from_writer(create(&path)?);
        let cerr = |e: csv::Error| Error::InvalidArgument(format!("{}: {e}", path.display()));
        w.write_record(&header).map_err(cerr)?;
        for r in rows {
            w.write_record(&r).map_err(cerr)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        drop(w);

        let path = out.join("metrics.csv");
        MetricReport::write_csv(self.runs.iter().map(|r| &r.report), create(&path)?)?;
        write_text(&out.join("report.json"), &serde_json::to_string_pretty(self)?)?;

        for r in &self.runs {
            let stem = run_stem(r);
            if let Some(t) = &r.tuning {
                t.search.write_csv(create(&out.join("trials").join(format!("{stem}.csv")))?)?;
            }
            if self.plan.dump {
                let dir = out.join("trajectories").join(&stem);
                for traj in &r.trajectories {
                    traj.write_csv(create(&dir.join(format!("{}.csv", traj.campaign_id)))?)?;
                }
            }
        }
        Ok(())
    }
}

fn run_stem(r: &RunRecord) -> String {
    match r.duration_class {
        Some(c) => format!("{}_{c}_{}", r.auction_type, r.algorithm.tag()),
        None => format!("{}_{}", r.auction_type, r.algorithm.tag()),
    }
}

fn metric(r: &MetricReport, column: &str) -> String {
    match column {
        "rmse_t" => r.rmse_t.to_string(),
        "scr" => r.scr.to_string(),
        "per_diem_scr" => r.per_diem_scr.to_string(),
        "rel_cpc" => r.rel_cpc.to_string(),
        _ => String::new(),
    }
}

/// Runs (and optionally tunes) every planned algorithm.
pub fn execute(plan: &ExperimentPlan, cfg: &Config) -> Result<Vec<RunRecord>> {
    let algorithms = cfg.algorithms();
    let mut runs = Vec::new();
    for &t in &plan.auctions {
        let d = plan.data.load(t, cfg)?;
        for class in plan.experiment.classes() {
            let filter = CampaignFilter {
                category_prefix: plan.category_prefix.clone(),
                duration: class,
                ..CampaignFilter::default()
            };
            let selected = select_campaigns(&d, &filter);
            if selected.is_empty() {
                return Err(Error::EmptySelection);
            }
            let mut exp = ExperimentConfig {
                label: String::new(),
                sim: cfg.sim,
                cpc: plan.cpc,
                category_cpc: None,
            };
            if plan.cpc == CpcPolicy::CategoryDiv10 {
                exp.category_cpc = Some(category_cpc(&d, selected.iter().copied())?);
            }
            for &a in &plan.algorithms {
                exp.label = a.label().to_string();
                let base = algorithms.get(a);
                let (params, tuning, eval_filter) = if plan.tune_trials > 0 {
                    let space = cfg.search_space(a, Some(plan.tune_trials), plan.seed);
                    let r = tune(&d, &base, &space, plan.objective, &exp, &filter, &RandomSearch::default())?;
                    let test = CampaignFilter {
                        ids: Some(r.split.test.iter().copied().collect()),
                        ..filter.clone()
                    };
                    let summary = TuningSummary {
                        split: r.split,
                        train_score: r.train_score,
                        test_score: r.test_score,
                        search: r.search,
                    };
                    (r.best_params, Some(summary), test)
                } else {
                    (base, None, filter.clone())
                };
                let result = run_experiment(&d, || params.build(), &exp, &eval_filter)?;
                let label = match class_tag(class) {
                    Some(c) => format!("{}:{c}", plan.experiment),
                    None => plan.experiment.to_string(),
                };
                let report = MetricReport::from_result(&label, &result, Some((&d, &cfg.sim)));
                runs.push(RunRecord {
                    auction_type: t,
                    duration_class: class_tag(class),
                    algorithm: a,
                    category_cpc: result.category_cpc,
                    params,
                    tuning,
                    report,
                    trajectories: result.trajectories,
                });
            }
        }
    }
    Ok(runs)
}

pub fn cmd_experiment(a: &ExperimentArgs, cfg: &Config) -> Result<ExperimentOutput> {
    let plan = ExperimentPlan::resolve(a, cfg, false)?;
    let runs = with_pool(plan.jobs, || execute(&plan, cfg))??;
    let out = ExperimentOutput { plan, runs };
    out.write(&out.plan.out)?;
    let (header, rows) = out.wide_table();
    println!("{}", header.join(","));
    for r in rows {
        println!("{}", r.join(","));
    }
    Ok(out)
}

#[derive(Serialize)]
struct TuneFile<'a> {
    auction_type: AuctionType,
    duration_class: Option<&'static str>,
    algorithm: Algorithm,
    objective: Objective,
    category_cpc: Option<f64>,
    best_params: &'a BidderParams,
    tuning: &'a TuningSummary,
}

/// Tunes every planned algorithm and writes `best_<run>.json` plus the
/// trial logs.
pub fn cmd_tune(a: &ExperimentArgs, cfg: &Config) -> Result<ExperimentOutput> {
    let plan = ExperimentPlan::resolve(a, cfg, true)?;
    let runs = with_pool(plan.jobs, || execute(&plan, cfg))??;
    let out = ExperimentOutput { plan, runs };
    out.write(&out.plan.out)?;
    for r in &out.runs {
        let Some(t) = &r.tuning else { continue };
        let f = TuneFile {
            auction_type: r.auction_type,
            duration_class: r.duration_class,
            algorithm: r.algorithm,
            objective: out.plan.objective,
            category_cpc: r.category_cpc,
            best_params: &r.params,
            tuning: t,
        };
        write_text(&out.plan.out.join(format!("best_{}.json", run_stem(r))), &serde_json::to_string_pretty(&f)?)?;
        println!(
            "{} {}: train {} test {}",
            r.auction_type, r.algorithm, t.train_score, t.test_score
        );
    }
    Ok(out)
}

/// Generates datasets; one auction type goes to `out`, several to
/// `out/<auction>`.
pub fn cmd_synth(a: &SynthArgs, cfg: &Config) -> Result<Vec<DatasetSummary>> {
    let auctions = parse_auctions(&a.auction, cfg.run.auction.as_deref())?;
    let n = a.campaigns.or(cfg.run.synth_campaigns).unwrap_or(1000);
    let seed = a.seed.or(cfg.run.seed).unwrap_or(42);
    let out = a.out.clone().or(cfg.run.out.clone()).unwrap_or_else(|| "out".into());
    let jobs = a.jobs.or(cfg.run.jobs).unwrap_or(0);
    let mut summaries = Vec::new();
    for &t in &auctions {
        let sc = cfg.synth_config(t, n, seed)?;
        let d = with_pool(jobs, || generate(&sc))??;
        let dir = if auctions.len() > 1 { out.join(t.to_string()) } else { out.clone() };
        write_dataset(&d, &DatasetPaths::in_dir(&dir))?;
        let s = describe(&d);
        write_text(&dir.join("summary.json"), &s.to_json())?;
        println!("{}", s.to_json());
        summaries.push(s);
    }
    Ok(summaries)
}

pub fn cmd_describe(a: &DataArgs, cfg: &Config) -> Result<Vec<DatasetSummary>> {
    let plan = DataPlan::resolve(a, cfg)?;
    let mut out = Vec::new();
    for &t in &plan.auctions {
        let s = describe(&plan.load(t, cfg)?);
        println!("{}", s.to_json());
        out.push(s);
    }
    Ok(out)
}
