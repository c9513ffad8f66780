//! C interface to the replay harness.
//!
//! Every function returns a [`BbStatus`]. On failure the message is kept
//! per thread and can be read with [`bb_last_error`]. Datasets and reports
//! are opaque handles owned by the caller and released with their `_free`
//! function. Strings returned through out pointers are freed with
//! [`bb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use bidbench::bidders::{bin_of, Algorithm, BidderParams};
use bidbench::data::{load_dataset, validate_dataset, write_dataset, AuctionType, Dataset, DatasetPaths, DEFAULT_GAMMA};
use bidbench::metrics::MetricReport;
use bidbench::sim::{run_experiment, CampaignFilter, CpcPolicy, ExperimentConfig};
use bidbench::synth::{describe, generate, SynthConfig};
use bidbench::traffic::WeekClock;
use bidbench::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    EmptySelection = 5,
    UnknownAlgorithm = 6,
    Config = 7,
    /// The requested metric has no value, e.g. REL_CPC without clicks.
    Undefined = 8,
    Panic = 9,
}

impl From<&Error> for BbStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io { .. } => BbStatus::Io,
            Error::MissingColumn { .. } | Error::Parse { .. } | Error::DuplicateKey { .. } | Error::Json(_) => {
                BbStatus::Parse
            }
            Error::EmptySelection => BbStatus::EmptySelection,
            Error::UnknownAlgorithm(_) => BbStatus::UnknownAlgorithm,
            Error::Config(_) => BbStatus::Config,
            _ => BbStatus::InvalidArgument,
        }
    }
}

/// Loaded or generated dataset.
pub struct BbDataset(Dataset);

/// Metrics of one experiment run.
pub struct BbReport(MetricReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(BbStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(BbStatus::from(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> BbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BbStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            BbStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BbStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> FfiResult {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(v);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn bb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Bin index of `bid` under base `gamma`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_bin_of(bid: f64, gamma: f64, out: *mut i32) -> BbStatus {
    guard(|| {
        let b = bin_of(bid, gamma)?;
        write_out(out, b)
    })
}

/// Loads `campaigns.csv`, `auction_stats.csv` and `traffic.csv` from `dir`.
/// `auction` is `"vcg"` or `"fp"`.
///
/// # Safety
/// Strings must be nul-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_load(
    dir: *const c_char,
    auction: *const c_char,
    out: *mut *mut BbDataset,
) -> BbStatus {
    guard(|| {
        let dir = str_arg(dir, "dir")?;
        let auction: AuctionType = str_arg(auction, "auction")?.parse()?;
        let d = load_dataset(&DatasetPaths::in_dir(dir), auction, DEFAULT_GAMMA, WeekClock::default())?;
        write_out(out, Box::into_raw(Box::new(BbDataset(d))))
    })
}

/// Generates a synthetic dataset with the default generator settings.
///
/// # Safety
/// `auction` must be nul-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_synth(
    auction: *const c_char,
    n_campaigns: usize,
    seed: u64,
    out: *mut *mut BbDataset,
) -> BbStatus {
    guard(|| {
        let auction: AuctionType = str_arg(auction, "auction")?.parse()?;
        let d = generate(&SynthConfig::new(auction, n_campaigns, seed))?;
        write_out(out, Box::into_raw(Box::new(BbDataset(d))))
    })
}

/// Writes the three CSV files into `dir`, creating it if needed.
///
/// # Safety
/// `ds` must come from this library; `dir` must be nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_write(ds: *const BbDataset, dir: *const c_char) -> BbStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        let dir = str_arg(dir, "dir")?;
        write_dataset(&ds.0, &DatasetPaths::in_dir(Path::new(dir)))?;
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_free(ds: *mut BbDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_n_campaigns(ds: *const BbDataset, out: *mut usize) -> BbStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        write_out(out, ds.0.n_campaigns())
    })
}

/// Runs the load-time checks. `passed` receives whether all of them hold.
///
/// # Safety
/// `ds` must come from this library; `passed` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_validate(ds: *const BbDataset, passed: *mut bool) -> BbStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        write_out(passed, validate_dataset(&ds.0).passed)
    })
}

/// Summary statistics as JSON; free the string with [`bb_string_free`].
///
/// # Safety
/// `ds` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_dataset_describe_json(ds: *const BbDataset, out: *mut *mut c_char) -> BbStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, c_string(describe(&ds.0).to_json()))
    })
}

fn params_from_json(a: Algorithm, json: Option<&str>) -> Result<BidderParams, Fail> {
    let mut p = BidderParams::default_for(a);
    let Some(json) = json else { return Ok(p) };
    let map: serde_json::Map<String, serde_json::Value> = serde_json::from_str(json).map_err(Error::from)?;
    for (k, v) in map {
        let v = match v {
            serde_json::Value::Number(n) => n.as_f64(),
            serde_json::Value::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
            serde_json::Value::Null => Some(0.0),
            _ => None,
        }
        .ok_or_else(|| Fail(BbStatus::InvalidArgument, format!("parameter `{k}` must be a number")))?;
        p.set(&k, v)?;
    }
    Ok(p)
}

/// Replays every campaign of `ds` with one algorithm.
///
/// `params_json` is null or a JSON object of numeric overrides such as
/// `{"b0": 500, "kp": 0.2}`. `cpc` is null (own budget), `"budget"`,
/// `"category-div-10"` or `"fixed:<value>"`.
///
/// # Safety
/// `ds` must come from this library; strings must be null or
/// nul-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_experiment_run(
    ds: *const BbDataset,
    algo: *const c_char,
    params_json: *const c_char,
    cpc: *const c_char,
    out: *mut *mut BbReport,
) -> BbStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        let algorithm: Algorithm = str_arg(algo, "algo")?.parse()?;
        let params = params_from_json(algorithm, opt_str_arg(params_json, "params_json")?)?;
        let cpc = match opt_str_arg(cpc, "cpc")? {
            Some(s) => s.parse::<CpcPolicy>()?,
            None => CpcPolicy::Budget,
        };
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = ExperimentConfig {
            label: algorithm.label().to_string(),
            cpc,
            ..ExperimentConfig::default()
        };
        let r = run_experiment(&ds.0, || params.build(), &cfg, &CampaignFilter::default())?;
        let report = MetricReport::from_result("ffi", &r, Some((&ds.0, &cfg.sim)));
        write_out(out, Box::into_raw(Box::new(BbReport(report))))
    })
}

/// Total clicks over all campaigns.
///
/// # Safety
/// `r` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_report_scr(r: *const BbReport, out: *mut f64) -> BbStatus {
    guard(|| {
        let r = deref(r, "report")?;
        write_out(out, r.0.scr)
    })
}

/// Mean per-campaign pacing RMSE in money.
///
/// # Safety
/// `r` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_report_rmse_t(r: *const BbReport, out: *mut f64) -> BbStatus {
    guard(|| {
        let r = deref(r, "report")?;
        write_out(out, r.0.rmse_t)
    })
}

/// Realized CPC over the cap; [`BbStatus::Undefined`] when nothing was
/// clicked.
///
/// # Safety
/// `r` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_report_rel_cpc(r: *const BbReport, out: *mut f64) -> BbStatus {
    guard(|| {
        let r = deref(r, "report")?;
        match r.0.rel_cpc.value() {
            Some(v) => write_out(out, v),
            None => Err(Fail(BbStatus::Undefined, "REL_CPC is undefined without clicks".into())),
        }
    })
}

/// Full report, including per-campaign rows, as JSON.
///
/// # Safety
/// `r` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bb_report_json(r: *const BbReport, out: *mut *mut c_char) -> BbStatus {
    guard(|| {
        let r = deref(r, "report")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let json = serde_json::to_string(&r.0).map_err(Error::from)?;
        write_out(out, c_string(json))
    })
}

/// # Safety
/// `r` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_report_free(r: *mut BbReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
