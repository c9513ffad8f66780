use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use csv::StringRecord;

use super::{AuctionStatRecord, AuctionType, Campaign, Dataset, DatasetBuilder, TrafficRecord};
use crate::error::{Error, Result};
use crate::traffic::WeekClock;

pub const CAMPAIGN_COLUMNS: [&str; 12] = [
    "loc_id",
    "campaign_id",
    "item_id",
    "campaign_start_date",
    "campaign_end_date",
    "campaign_start",
    "campaign_end",
    "auction_budget",
    "microcat_ext",
    "logical_category",
    "region_id",
    "platform_p",
];

pub const STATS_COLUMNS: [&str; 11] = [
    "item_id",
    "campaign_id",
    "period",
    "contact_price_bin",
    "AuctionVisibilitySurplus",
    "AuctionClicksSurplus",
    "AuctionContactsSurplus",
    "AuctionWinBidSurplus",
    "CTRPredicts",
    "CRPredicts",
    "AuctionCount",
];

pub const TRAFFIC_COLUMNS: [&str; 4] = ["region_id", "dow", "hour", "traffic_share"];

/// Columns that may be absent from a file header.
const OPTIONAL_COLUMNS: [&str; 2] = ["platform_p", "AuctionCount"];

/// File names used inside a dataset directory.
#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub campaigns: PathBuf,
    pub stats: PathBuf,
    pub traffic: PathBuf,
}

impl DatasetPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        DatasetPaths {
            campaigns: dir.join("campaigns.csv"),
            stats: dir.join("auction_stats.csv"),
            traffic: dir.join("traffic.csv"),
        }
    }

    pub fn all(&self) -> [&Path; 3] {
        [&self.campaigns, &self.stats, &self.traffic]
    }
}

struct Table<'a> {
    path: &'a Path,
    columns: HashMap<String, usize>,
}

impl<'a> Table<'a> {
    fn open(path: &'a Path, required: &[&str]) -> Result<(Self, csv::Reader<File>)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        let columns: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim_start_matches('\u{feff}').to_string(), i))
            .collect();
        for col in required {
            if !columns.contains_key(*col) && !OPTIONAL_COLUMNS.contains(col) {
                return Err(Error::MissingColumn {
                    path: path.to_path_buf(),
                    column: (*col).to_string(),
                });
            }
        }
        Ok((Table { path, columns }, reader))
    }

    fn raw<'r>(&self, rec: &'r StringRecord, col: &str) -> Option<&'r str> {
        self.columns.get(col).and_then(|&i| rec.get(i))
    }

    fn parse_err(&self, rec: &StringRecord, message: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: line_of(rec),
            message,
        }
    }

    fn field<T: std::str::FromStr>(&self, rec: &StringRecord, col: &str) -> Result<T> {
        let raw = self
            .raw(rec, col)
            .ok_or_else(|| self.parse_err(rec, format!("row has no `{col}` field")))?;
        raw.parse()
            .map_err(|_| self.parse_err(rec, format!("cannot parse `{col}` value {raw:?}")))
    }

    /// Integers may be written with a trailing `.0`, as in exported tables.
    fn integer(&self, rec: &StringRecord, col: &str) -> Result<i64> {
        let raw = self
            .raw(rec, col)
            .ok_or_else(|| self.parse_err(rec, format!("row has no `{col}` field")))?;
        parse_integer(raw)
            .ok_or_else(|| self.parse_err(rec, format!("cannot parse `{col}` value {raw:?} as integer")))
    }

    fn id(&self, rec: &StringRecord, col: &str) -> Result<u64> {
        let v = self.integer(rec, col)?;
        u64::try_from(v).map_err(|_| self.parse_err(rec, format!("negative id in `{col}`")))
    }

    fn optional_f64(&self, rec: &StringRecord, col: &str) -> Result<Option<f64>> {
        match self.raw(rec, col) {
            None => Ok(None),
            Some(s) if s.is_empty() || s == "--" || s.eq_ignore_ascii_case("nan") => Ok(None),
            Some(_) => self.field(rec, col).map(Some),
        }
    }
}

fn line_of(rec: &StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

fn parse_integer(raw: &str) -> Option<i64> {
    if let Ok(v) = raw.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = raw.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

/// Parses `[0.5 0. 0.25 0.25]` (numpy style) or comma separated variants.
fn parse_platform(raw: &str) -> Option<Option<[f64; 4]>> {
    let inner = raw.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if inner.is_empty() {
        return Some(None);
    }
    let values: Vec<f64> = inner
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .ok()?;
    let arr: [f64; 4] = values.try_into().ok()?;
    Some(Some(arr))
}

fn format_platform(p: &Option<[f64; 4]>) -> String {
    match p {
        None => String::new(),
        Some(v) => format!("[{} {} {} {}]", v[0], v[1], v[2], v[3]),
    }
}

pub fn load_campaigns(path: &Path) -> Result<Vec<Campaign>> {
    let (t, mut reader) = Table::open(path, &CAMPAIGN_COLUMNS)?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let date = |col: &str| -> Result<NaiveDate> {
            let raw: String = t.field(&rec, col)?;
            NaiveDate::parse_from_str(&raw, "%Y-%m-%d")
                .map_err(|_| t.parse_err(&rec, format!("cannot parse `{col}` date {raw:?}")))
        };
        let platform_p = match t.raw(&rec, "platform_p") {
            None => None,
            Some(raw) => parse_platform(raw).ok_or_else(|| {
                t.parse_err(&rec, format!("cannot parse `platform_p` value {raw:?}"))
            })?,
        };
        out.push(Campaign {
            loc_id: t.id(&rec, "loc_id")?,
            campaign_id: t.id(&rec, "campaign_id")?,
            item_id: t.id(&rec, "item_id")?,
            campaign_start_date: date("campaign_start_date")?,
            campaign_end_date: date("campaign_end_date")?,
            campaign_start: t.integer(&rec, "campaign_start")?,
            campaign_end: t.integer(&rec, "campaign_end")?,
            auction_budget: t.integer(&rec, "auction_budget")?,
            microcat_ext: t.id(&rec, "microcat_ext")?,
            logical_category: t.field(&rec, "logical_category")?,
            region_id: t.id(&rec, "region_id")?,
            platform_p,
        });
    }
    Ok(out)
}

/// Streams stats rows into `sink`; the callback may reject a row (for
/// example as a duplicate) and receives its line number for the message.
fn read_stats(
    path: &Path,
    mut sink: impl FnMut(AuctionStatRecord, u64) -> Result<()>,
) -> Result<()> {
    let (t, mut reader) = Table::open(path, &STATS_COLUMNS)?;
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let bin = t.integer(&rec, "contact_price_bin")?;
        let bin = i32::try_from(bin)
            .map_err(|_| t.parse_err(&rec, format!("bin {bin} out of range")))?;
        let r = AuctionStatRecord {
            campaign_id: t.id(&rec, "campaign_id")?,
            item_id: t.id(&rec, "item_id")?,
            period: t.integer(&rec, "period")?,
            contact_price_bin: bin,
            visibility_surplus: t.field(&rec, "AuctionVisibilitySurplus")?,
            clicks_surplus: t.field(&rec, "AuctionClicksSurplus")?,
            contacts_surplus: t.field(&rec, "AuctionContactsSurplus")?,
            win_bid_surplus: t.field(&rec, "AuctionWinBidSurplus")?,
            ctr_predict: t.field(&rec, "CTRPredicts")?,
            cr_predict: t.field(&rec, "CRPredicts")?,
            auction_count: t.optional_f64(&rec, "AuctionCount")?,
        };
        sink(r, line_of(&rec))?;
    }
    Ok(())
}

pub fn load_stats(path: &Path) -> Result<Vec<AuctionStatRecord>> {
    let mut out = Vec::new();
    read_stats(path, |r, _| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

pub fn load_traffic(path: &Path) -> Result<Vec<TrafficRecord>> {
    let (t, mut reader) = Table::open(path, &TRAFFIC_COLUMNS)?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        out.push(TrafficRecord {
            region_id: t.id(&rec, "region_id")?,
            dow: t.field(&rec, "dow")?,
            hour: t.field(&rec, "hour")?,
            traffic_share: t.field(&rec, "traffic_share")?,
        });
    }
    Ok(out)
}

/// Loads and indexes the three dataset components.
pub fn load_dataset(
    paths: &DatasetPaths,
    auction_type: AuctionType,
    gamma: f64,
    clock: WeekClock,
) -> Result<Dataset> {
    let mut b = DatasetBuilder::new();
    for c in load_campaigns(&paths.campaigns)? {
        b.add_campaign(c);
    }
    read_stats(&paths.stats, |r, line| {
        b.add_stat(r).map_err(|(campaign_id, period, bin)| Error::DuplicateKey {
            path: paths.stats.clone(),
            line,
            campaign_id,
            period,
            bin,
        })
    })?;
    let (t, mut reader) = Table::open(&paths.traffic, &TRAFFIC_COLUMNS)?;
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(&paths.traffic, e))?;
        let r = TrafficRecord {
            region_id: t.id(&rec, "region_id")?,
            dow: t.field(&rec, "dow")?,
            hour: t.field(&rec, "hour")?,
            traffic_share: t.field(&rec, "traffic_share")?,
        };
        b.add_traffic(r).map_err(|e| t.parse_err(&rec, e.to_string()))?;
    }
    Ok(b.build(auction_type, gamma, clock))
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_campaigns<'a>(path: &Path, campaigns: impl IntoIterator<Item = &'a Campaign>) -> Result<()> {
    let mut w = writer(path)?;
    let werr = |e| csv_error(path, e);
    w.write_record(CAMPAIGN_COLUMNS).map_err(werr)?;
    for c in campaigns {
        w.write_record([
            c.loc_id.to_string(),
            c.campaign_id.to_string(),
            c.item_id.to_string(),
            c.campaign_start_date.format("%Y-%m-%d").to_string(),
            c.campaign_end_date.format("%Y-%m-%d").to_string(),
            c.campaign_start.to_string(),
            c.campaign_end.to_string(),
            c.auction_budget.to_string(),
            c.microcat_ext.to_string(),
            c.logical_category.clone(),
            c.region_id.to_string(),
            format_platform(&c.platform_p),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_stats<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a AuctionStatRecord>,
) -> Result<()> {
    let mut w = writer(path)?;
    let werr = |e| csv_error(path, e);
    w.write_record(STATS_COLUMNS).map_err(werr)?;
    for r in records {
        w.write_record([
            r.item_id.to_string(),
            r.campaign_id.to_string(),
            r.period.to_string(),
            r.contact_price_bin.to_string(),
            r.visibility_surplus.to_string(),
            r.clicks_surplus.to_string(),
            r.contacts_surplus.to_string(),
            r.win_bid_surplus.to_string(),
            r.ctr_predict.to_string(),
            r.cr_predict.to_string(),
            r.auction_count.map(|c| c.to_string()).unwrap_or_default(),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_traffic<'a>(
    path: &Path,
    records: impl IntoIterator<Item = &'a TrafficRecord>,
) -> Result<()> {
    let mut w = writer(path)?;
    let werr = |e| csv_error(path, e);
    w.write_record(TRAFFIC_COLUMNS).map_err(werr)?;
    for r in records {
        w.write_record([
            r.region_id.to_string(),
            r.dow.to_string(),
            r.hour.to_string(),
            r.traffic_share.to_string(),
        ])
        .map_err(werr)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the dataset in canonical (sorted) order.
pub fn write_dataset(d: &Dataset, paths: &DatasetPaths) -> Result<()> {
    write_campaigns(&paths.campaigns, d.campaigns())?;
    write_stats(&paths.stats, d.records())?;
    let traffic: Vec<TrafficRecord> = d
        .traffic_profiles()
        .flat_map(|p| {
            p.shares().iter().enumerate().map(|(i, s)| TrafficRecord {
                region_id: p.region_id,
                dow: (i / 24 + 1) as u8,
                hour: (i % 24) as u8,
                traffic_share: *s,
            })
        })
        .collect();
    write_traffic(&paths.traffic, &traffic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        let mut f = File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    }

    const CAMPAIGNS: &str = "\
loc_id,campaign_id,item_id,campaign_start_date,campaign_end_date,campaign_start,campaign_end,auction_budget,microcat_ext,logical_category,region_id,platform_p
653248,272505312,3660681800,1970-01-27,1970-02-03,2302355,2907155,378227125476,4928,2.33,653420,[0.5 0. 0.25 0.25]
630730,271449978,2561215400,1970-01-27,1970-02-03,2253120,2857920,4282490290176,4147,3.23,630660,[0.24 0.08 0.24 0.44]
";

    const STATS: &str = "\
item_id,campaign_id,period,contact_price_bin,AuctionVisibilitySurplus,AuctionClicksSurplus,AuctionContactsSurplus,AuctionWinBidSurplus,CTRPredicts,CRPredicts,AuctionCount
3315908300,231571725,784791.0,245,0.771,0.451,0.212,725.661,0.0,0.0,2.0
3315908300,231571725,791991.0,240,0.348,0.405,0.205,288.975,0.0,0.0,
";

    const TRAFFIC: &str = "\
region_id,dow,hour,traffic_share
645530,1,0,0.001704
645530,1,1,0.000917
645530,1,2,0.000546
645530,1,3,0.000314
";

    #[test]
    fn campaign_rows_parse() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.csv", CAMPAIGNS);
        let cs = load_campaigns(&p).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].auction_budget, 378227125476);
        assert_eq!(cs[0].region_id, 653420);
        assert_eq!(cs[0].logical_category, "2.33");
        assert_eq!(cs[0].platform_p, Some([0.5, 0.0, 0.25, 0.25]));
        assert_eq!(
            cs[0].campaign_start_date,
            NaiveDate::from_ymd_opt(1970, 1, 27).unwrap()
        );
        assert_eq!(cs[1].campaign_end, 2857920);
    }

    #[test]
    fn traffic_row_parses() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", TRAFFIC);
        let t = load_traffic(&p).unwrap();
        assert_eq!(
            t[0],
            TrafficRecord {
                region_id: 645530,
                dow: 1,
                hour: 0,
                traffic_share: 0.001704
            }
        );
    }

    #[test]
    fn stats_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "s.csv", STATS);
        let rows = load_stats(&p).unwrap();
        assert_eq!(rows[0].period, 784791);
        assert_eq!(rows[1].contact_price_bin, 240);
        assert_eq!(rows[1].clicks_surplus, 0.405);
        assert_eq!(rows[0].auction_count, Some(2.0));
        assert_eq!(rows[1].auction_count, None);
        let out = dir.path().join("s2.csv");
        write_stats(&out, &rows).unwrap();
        assert_eq!(load_stats(&out).unwrap(), rows);
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "t.csv", "region_id,dow,traffic_share\n1,1,0.5\n");
        match load_traffic(&p) {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "hour"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_value_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "t.csv",
            "region_id,dow,hour,traffic_share\n1,1,0,0.5\n1,1,1,abc\n",
        );
        match load_traffic(&p) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("traffic_share"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_stats_key_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let paths = DatasetPaths::in_dir(dir.path());
        write(dir.path(), "campaigns.csv", CAMPAIGNS);
        write(dir.path(), "traffic.csv", TRAFFIC);
        let dup = format!("{STATS}3315908300,231571725,784791,245,0,0,0,0,0,0,\n");
        write(dir.path(), "auction_stats.csv", &dup);
        match load_dataset(&paths, AuctionType::Vcg, 1.2, WeekClock::default()) {
            Err(Error::DuplicateKey { line, bin, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(bin, 245);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_traffic(Path::new("/nonexistent/traffic.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/traffic.csv"));
    }

    #[test]
    fn platform_formats() {
        assert_eq!(parse_platform("[0.5 0. 0.25 0.25]"), Some(Some([0.5, 0.0, 0.25, 0.25])));
        assert_eq!(parse_platform("[0.1, 0.2, 0.3, 0.4]"), Some(Some([0.1, 0.2, 0.3, 0.4])));
        assert_eq!(parse_platform(""), Some(None));
        assert_eq!(parse_platform("[1 2]"), None);
        let p = Some([0.24, 0.08, 0.24, 0.44]);
        assert_eq!(parse_platform(&format_platform(&p)), Some(p));
    }
}
