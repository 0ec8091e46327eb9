//! Wind-direction pipeline: CSV ingestion, daily Fréchet means, yearly
//! samples, FSS tables and BH-corrected pairwise year tests.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime, Utc};
use log::warn;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Sampler};
use crate::error::{Error, Result};
use crate::fss::fss_test;
use crate::geometry::Angle;
use crate::inference::{
    bh_adjust, bootstrap_summary, bootstrap_two_sample_from, quantile_two_sample, BootstrapSummary, Method,
};
use crate::mean::{frechet_mean_circle, CircleSample, TorusSample};
use crate::rng::{substream, tag};

pub const DEFAULT_STATION: &str = "station";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindRecord {
    pub timestamp: DateTime<Utc>,
    pub direction: Angle,
    pub station_id: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedWind {
    pub records: Vec<WindRecord>,
    /// Rows dropped for an unparseable timestamp or direction.
    pub skipped: usize,
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc())
}

fn parse_direction(s: &str) -> Option<Angle> {
    let d: f64 = s.trim().parse().ok()?;
    if !(0.0..360.0).contains(&d) {
        return None;
    }
    Angle::from_degrees(d).ok()
}

/// Reads `timestamp,direction_deg[,station_id]` rows. Timestamps without an
/// offset are taken as UTC.
pub fn parse_wind_csv<R: Read>(input: R) -> Result<ParsedWind> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ts), Some(dir)) = (col("timestamp"), col("direction_deg")) else {
        return Err(Error::Format("wind CSV needs columns `timestamp` and `direction_deg`".into()));
    };
    let station = col("station_id");

    let mut records = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row?;
        let parsed = row
            .get(ts)
            .and_then(parse_timestamp)
            .zip(row.get(dir).and_then(parse_direction));
        match parsed {
            Some((timestamp, direction)) => {
                let station_id = station
                    .and_then(|i| row.get(i))
                    .filter(|s| !s.is_empty())
                    .unwrap_or(DEFAULT_STATION)
                    .to_string();
                records.push(WindRecord { timestamp, direction, station_id });
            }
            None => skipped += 1,
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!("no valid wind records ({skipped} rows skipped)")));
    }
    Ok(ParsedWind { records, skipped })
}

pub fn read_wind_csv(path: &Path) -> Result<ParsedWind> {
    parse_wind_csv(std::fs::File::open(path)?)
}

/// Daily Fréchet means of one station in one calendar year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearlySample {
    pub station_id: String,
    pub year: i32,
    pub days: Vec<NaiveDate>,
    pub daily_means: CircleSample,
}

impl YearlySample {
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }
}

/// Groups `station`'s records in `year` by UTC day and takes each day's
/// Fréchet mean; days with fewer than `min_count` records are dropped. Ties
/// draw from `rng` in date order. `None` when no day is left.
pub fn daily_means<R: RngCore + ?Sized>(
    records: &[WindRecord],
    station: &str,
    year: i32,
    min_count: usize,
    rng: &mut R,
) -> Option<YearlySample> {
    let mut by_day: BTreeMap<NaiveDate, Vec<Angle>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.station_id == station && r.timestamp.year() == year) {
        by_day.entry(r.timestamp.date_naive()).or_default().push(r.direction);
    }
    let mut days = Vec::new();
    let mut means = Vec::new();
    for (day, dirs) in by_day {
        if dirs.len() < min_count.max(1) {
            continue;
        }
        let s = CircleSample::new(dirs).expect("non-empty day");
        days.push(day);
        means.push(frechet_mean_circle(&s, rng).mean);
    }
    let daily_means = CircleSample::new(means).ok()?;
    Some(YearlySample { station_id: station.to_string(), year, days, daily_means })
}

/// Every (station, year) sample in the records, ordered by station then year.
/// Draws one `u64` from `rng`; each sample uses its own substream.
pub fn yearly_samples<R: RngCore + ?Sized>(records: &[WindRecord], min_count: usize, rng: &mut R) -> Vec<YearlySample> {
    let master = rng.next_u64();
    let keys: BTreeSet<(String, i32)> =
        records.iter().map(|r| (r.station_id.clone(), r.timestamp.year())).collect();
    keys.into_iter()
        .filter_map(|(st, y)| {
            let mut sub = substream(master, tag(&format!("daily_means/{st}")), y as u64);
            daily_means(records, &st, y, min_count, &mut sub)
        })
        .collect()
}

/// One year's data on S¹ (one station) or T^k (stations paired by date).
#[derive(Clone, Debug, PartialEq)]
pub struct YearData {
    pub year: i32,
    pub days: Vec<NaiveDate>,
    pub sample: TorusSample,
}

impl From<&YearlySample> for YearData {
    fn from(s: &YearlySample) -> Self {
        YearData { year: s.year, days: s.days.clone(), sample: s.daily_means.clone().into() }
    }
}

/// Pairs same-year samples of several stations on the dates all of them
/// share. Years missing at any station are left out.
pub fn pair_stations(per_station: &[Vec<YearlySample>]) -> Result<Vec<YearData>> {
    let Some(first) = per_station.first() else {
        return Err(Error::EmptyInput("no stations to pair".into()));
    };
    let mut out = Vec::new();
    for ys in first {
        let others: Option<Vec<&YearlySample>> =
            per_station[1..].iter().map(|st| st.iter().find(|s| s.year == ys.year)).collect();
        let Some(others) = others else { continue };
        let all: Vec<&YearlySample> = std::iter::once(ys).chain(others).collect();
        let common: Vec<NaiveDate> = ys
            .days
            .iter()
            .filter(|d| all[1..].iter().all(|s| s.days.binary_search(d).is_ok()))
            .copied()
            .collect();
        if common.is_empty() {
            continue;
        }
        let marginals = all
            .iter()
            .map(|s| {
                let pts = common.iter().map(|d| s.daily_means.points()[s.days.binary_search(d).unwrap()]).collect();
                CircleSample::new(pts)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(YearData { year: ys.year, days: common, sample: TorusSample::from_marginals(marginals)? });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssRow {
    pub station_id: String,
    pub year: i32,
    pub n: usize,
    pub scale: f64,
    pub p_value: f64,
    pub reject: bool,
}

/// Test for FSS on every yearly sample. Sample `i` uses its own substream
/// of `master`.
pub fn fss_by_year(samples: &[YearlySample], b: usize, alpha: f64, master: u64) -> Result<Vec<FssRow>> {
    samples
        .iter()
        .filter(|s| {
            let ok = s.len() >= 2;
            if !ok {
                warn!("skipping {} {}: fewer than 2 days of data", s.station_id, s.year);
            }
            ok
        })
        .map(|s| {
            let mut rng = substream(master, tag(&format!("fss_by_year/{}", s.station_id)), s.year as u64);
            let r = fss_test(&s.daily_means, b, alpha, &mut rng)?;
            Ok(FssRow {
                station_id: s.station_id.clone(),
                year: s.year,
                n: s.len(),
                scale: r.scale,
                p_value: r.p_value,
                reject: r.reject_absence,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseMatrix {
    pub years: Vec<i32>,
    /// `raw_p[i][j]`, `None` on the diagonal.
    pub raw_p: Vec<Vec<Option<f64>>>,
    pub adjusted_p: Vec<Vec<Option<f64>>>,
    pub reject: Vec<Vec<Option<bool>>>,
    pub statistic: Vec<Vec<Option<f64>>>,
    pub method: Method,
    pub alpha: f64,
    pub dimension_k: usize,
}

impl PairwiseMatrix {
    pub fn rejected_pairs(&self) -> Vec<(i32, i32)> {
        let y = self.years.len();
        (0..y)
            .flat_map(|i| (i + 1..y).map(move |j| (i, j)))
            .filter(|&(i, j)| self.reject[i][j] == Some(true))
            .map(|(i, j)| (self.years[i], self.years[j]))
            .collect()
    }
}

/// Two-sample test on every pair of years followed by BH at `alpha`.
/// Bootstrap summaries are computed once per year, so every pair statistic
/// is symmetric.
pub fn yearly_pairwise_matrix(
    data: &[YearData],
    method: Method,
    alpha: f64,
    b: usize,
    master: u64,
) -> Result<PairwiseMatrix> {
    let data: Vec<&YearData> = data
        .iter()
        .filter(|d| {
            let ok = d.sample.len() >= 2;
            if !ok {
                warn!("skipping year {}: fewer than 2 days of data", d.year);
            }
            ok
        })
        .collect();
    if data.len() < 2 {
        return Err(Error::InvalidInput("pairwise tests need at least 2 years".into()));
    }
    let k = data[0].sample.dim();
    if let Some(d) = data.iter().find(|d| d.sample.dim() != k) {
        return Err(Error::Dimension { expected: k, got: d.sample.dim() });
    }
    let y = data.len();
    let pairs: Vec<(usize, usize)> = (0..y).flat_map(|i| (i + 1..y).map(move |j| (i, j))).collect();

    let outcomes = match method {
        Method::Bootstrap => {
            let summaries: Vec<BootstrapSummary> = data
                .iter()
                .map(|d| bootstrap_summary(&d.sample, b, &mut substream(master, tag("pairs/summary"), d.year as u64)))
                .collect::<Result<_>>()?;
            pairs
                .par_iter()
                .map(|&(i, j)| bootstrap_two_sample_from(&summaries[i], &summaries[j], alpha, None))
                .collect::<Result<Vec<_>>>()?
        }
        Method::Quantile => pairs
            .par_iter()
            .enumerate()
            .map(|(idx, &(i, j))| {
                let mut rng = substream(master, tag("pairs/quantile"), idx as u64);
                quantile_two_sample(&data[i].sample, &data[j].sample, alpha, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let raw: Vec<f64> = outcomes.iter().map(|o| o.p_value).collect();
    let bh = bh_adjust(&raw, alpha)?;

    let mut m = PairwiseMatrix {
        years: data.iter().map(|d| d.year).collect(),
        raw_p: vec![vec![None; y]; y],
        adjusted_p: vec![vec![None; y]; y],
        reject: vec![vec![None; y]; y],
        statistic: vec![vec![None; y]; y],
        method,
        alpha,
        dimension_k: k,
    };
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        for (a, c) in [(i, j), (j, i)] {
            m.raw_p[a][c] = Some(raw[idx]);
            m.adjusted_p[a][c] = Some(bh.adjusted[idx]);
            m.reject[a][c] = Some(bh.reject[idx]);
            m.statistic[a][c] = Some(outcomes[idx].statistic);
        }
    }
    Ok(m)
}

pub fn write_fss_table<W: Write>(rows: &[FssRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["station_id", "year", "n", "scale", "p", "reject"])?;
    for r in rows {
        w.write_record([
            r.station_id.clone(),
            r.year.to_string(),
            r.n.to_string(),
            format!("{:.6}", r.scale),
            format!("{:.6e}", r.p_value),
            r.reject.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_matrix<W: Write, T>(years: &[i32], cells: &[Vec<Option<T>>], fmt: impl Fn(&T) -> String, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("year".to_string()).chain(years.iter().map(|y| y.to_string())))?;
    for (y, row) in years.iter().zip(cells) {
        let fields = row.iter().map(|c| c.as_ref().map(&fmt).unwrap_or_default());
        w.write_record(std::iter::once(y.to_string()).chain(fields))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `pairs_raw.csv`, `pairs_bh.csv` and `pairs_reject.csv` into `dir`
/// and returns their paths.
pub fn write_pairwise(m: &PairwiseMatrix, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let p = |v: &f64| format!("{v:.6e}");
    let paths = ["pairs_raw.csv", "pairs_bh.csv", "pairs_reject.csv"].map(|f| dir.join(f));
    write_matrix(&m.years, &m.raw_p, p, std::fs::File::create(&paths[0])?)?;
    write_matrix(&m.years, &m.adjusted_p, p, std::fs::File::create(&paths[1])?)?;
    write_matrix(&m.years, &m.reject, |b| b.to_string(), std::fs::File::create(&paths[2])?)?;
    Ok(paths.to_vec())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearKind {
    /// von Mises, κ = 3.
    Background,
    /// von Mises mixture κ = 3, β = 1/2, λ = 1/2.
    Fss,
    /// Uniform on [-1.2, 1.2].
    HalfCircle,
    /// Background law centred at π.
    Anomalous,
}

impl YearKind {
    fn spec(self) -> DistributionSpec {
        match self {
            YearKind::Background | YearKind::Anomalous => DistributionSpec::von_mises(3.0),
            YearKind::Fss => DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0),
            YearKind::HalfCircle => DistributionSpec::Uniform { half_width: 1.2 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub stations: Vec<String>,
    pub kinds: BTreeMap<i32, YearKind>,
}

impl SyntheticTruth {
    pub fn years_of(&self, kind: YearKind) -> Vec<i32> {
        self.kinds.iter().filter(|(_, &k)| k == kind).map(|(&y, _)| y).collect()
    }
}

/// Year layout of the synthetic fixture for 2000..=2019: 2010 is anomalous,
/// the other years from 2001 in steps of three carry FSS and those from 2002
/// in steps of three are half-circle years.
pub fn synthetic_layout() -> SyntheticTruth {
    let kinds = (2000..=2019)
        .map(|y| {
            let kind = match (y, (y - 2000) % 3) {
                (2010, _) => YearKind::Anomalous,
                (_, 1) => YearKind::Fss,
                (_, 2) => YearKind::HalfCircle,
                _ => YearKind::Background,
            };
            (y, kind)
        })
        .collect();
    SyntheticTruth { stations: vec!["basel".into(), "goettingen".into()], kinds }
}

const OFFSET_DEG: f64 = 2.0;

fn to_degrees(a: f64) -> f64 {
    let d = a.to_degrees().rem_euclid(360.0);
    // keep the printed value strictly below 360
    if format!("{d:.6}") == "360.000000" {
        0.0
    } else {
        d
    }
}

/// Writes the synthetic two-station fixture: for every day two readings
/// `m ± 2°` whose Fréchet mean is `m`. Each year's daily values are rotated
/// so their Fréchet mean is exactly 0 (π for the anomalous year).
pub fn write_synthetic_fixture<W: Write>(truth: &SyntheticTruth, master: u64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["timestamp", "direction_deg", "station_id"])?;
    for (si, station) in truth.stations.iter().enumerate() {
        for (&year, &kind) in &truth.kinds {
            let first = NaiveDate::from_ymd_opt(year, 1, 1).expect("valid year");
            let days: Vec<NaiveDate> = first.iter_days().take_while(|d| d.year() == year).collect();
            let mut rng = substream(master, tag(&format!("synthetic/{si}")), year as u64);
            let raw = Sampler::new(&kind.spec())?.sample(days.len(), &mut rng)?;
            let centre = frechet_mean_circle(&raw, &mut rng).mean.radians();
            let target = if kind == YearKind::Anomalous { std::f64::consts::PI } else { 0.0 };
            let values = raw.rotated(target - centre);
            for (day, m) in days.iter().zip(values.points()) {
                for (hour, sign) in [(6, -1.0), (18, 1.0)] {
                    let ts = day.and_hms_opt(hour, 0, 0).expect("valid time").and_utc();
                    let deg = to_degrees(m.radians()) + sign * OFFSET_DEG;
                    w.write_record([
                        ts.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                        format!("{:.6}", deg.rem_euclid(360.0)),
                        station.clone(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn rng() -> crate::rng::StreamRng {
        substream(11, 0, 0)
    }

    #[test]
    fn parses_rows_and_counts_rejects() {
        let csv = "timestamp,direction_deg\n2018-07-01T12:00:00Z,90.0\n2018-07-01T13:00:00Z,360.0\n\
                   2018-07-01T14:00:00Z,abc\nnot-a-time,10\n2018-07-02 00:00:00,359.5\n";
        let p = parse_wind_csv(csv.as_bytes()).unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(p.skipped, 3);
        assert!((p.records[0].direction.radians() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(p.records[0].station_id, DEFAULT_STATION);
        assert!((p.records[1].direction.radians() + 0.5f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn header_only_and_missing_columns() {
        assert!(matches!(parse_wind_csv("timestamp,direction_deg\n".as_bytes()), Err(Error::EmptyInput(_))));
        assert!(matches!(parse_wind_csv("time,dir\n2018-01-01T00:00:00Z,3\n".as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn offsets_are_converted_to_utc() {
        let csv = "timestamp,direction_deg,station_id\n2018-12-31T23:30:00-02:00,10,a\n";
        let p = parse_wind_csv(csv.as_bytes()).unwrap();
        assert_eq!(p.records[0].timestamp.year(), 2019);
        assert_eq!(p.records[0].station_id, "a");
    }

    #[test]
    fn daily_means_group_by_day() {
        let csv = "timestamp,direction_deg\n2018-01-01T01:00:00Z,10\n2018-01-01T05:00:00Z,30\n\
                   2018-01-02T00:00:00Z,45\n2017-12-31T23:00:00Z,5\n";
        let p = parse_wind_csv(csv.as_bytes()).unwrap();
        let y = daily_means(&p.records, DEFAULT_STATION, 2018, 1, &mut rng()).unwrap();
        assert_eq!(y.len(), 2);
        assert!((y.daily_means.points()[0].radians() - 20f64.to_radians()).abs() < 1e-12);
        assert!((y.daily_means.points()[1].radians() - 45f64.to_radians()).abs() < 1e-12);
        assert_eq!(daily_means(&p.records, DEFAULT_STATION, 2018, 2, &mut rng()).unwrap().len(), 1);
        assert!(daily_means(&p.records, DEFAULT_STATION, 2016, 1, &mut rng()).is_none());
    }

    #[test]
    fn tied_day_resolved_by_seed() {
        let csv = "timestamp,direction_deg\n2018-01-01T01:00:00Z,90\n2018-01-01T05:00:00Z,270\n";
        let p = parse_wind_csv(csv.as_bytes()).unwrap();
        let mut seen = BTreeSet::new();
        for s in 0..40 {
            let y = daily_means(&p.records, DEFAULT_STATION, 2018, 1, &mut substream(s, 0, 0)).unwrap();
            let m = y.daily_means.points()[0].radians();
            assert!(m.abs() < 1e-12 || (m.abs() - PI).abs() < 1e-12);
            seen.insert((m.abs() > 1.0) as u8);
            let again = daily_means(&p.records, DEFAULT_STATION, 2018, 1, &mut substream(s, 0, 0)).unwrap();
            assert_eq!(y, again);
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn full_year_has_365_days() {
        let days: String = NaiveDate::from_ymd_opt(2019, 1, 1)
            .unwrap()
            .iter_days()
            .take(365)
            .map(|d| format!("{d}T12:00:00Z,15\n"))
            .collect();
        let p = parse_wind_csv(format!("timestamp,direction_deg\n{days}").as_bytes()).unwrap();
        assert_eq!(daily_means(&p.records, DEFAULT_STATION, 2019, 1, &mut rng()).unwrap().len(), 365);
    }

    fn year(station: &str, y: i32, vals: &[(u32, f64)]) -> YearlySample {
        YearlySample {
            station_id: station.into(),
            year: y,
            days: vals.iter().map(|&(d, _)| NaiveDate::from_ymd_opt(y, 1, d).unwrap()).collect(),
            daily_means: CircleSample::from_radians(&vals.iter().map(|v| v.1).collect::<Vec<_>>()).unwrap(),
        }
    }

    #[test]
    fn pairing_keeps_common_dates_only() {
        let a = vec![year("a", 2000, &[(1, 0.1), (2, 0.2), (3, 0.3)])];
        let b = vec![year("b", 2000, &[(2, -0.2), (3, -0.3), (4, -0.4)]), year("b", 2001, &[(1, 0.0)])];
        let p = pair_stations(&[a, b]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].sample.dim(), 2);
        assert_eq!(p[0].sample.marginals()[0].radians(), vec![0.2, 0.3]);
        assert_eq!(p[0].sample.marginals()[1].radians(), vec![-0.2, -0.3]);
    }

    #[test]
    fn identical_years_never_reject() {
        let base = Sampler::new(&DistributionSpec::von_mises(3.0)).unwrap().sample(120, &mut rng()).unwrap();
        let data: Vec<YearData> = (0..4)
            .map(|i| YearData {
                year: 2000 + i,
                days: vec![NaiveDate::MIN; 120],
                sample: base.clone().into(),
            })
            .collect();
        for method in [Method::Quantile, Method::Bootstrap] {
            let m = yearly_pairwise_matrix(&data, method, 0.5, 200, 3).unwrap();
            assert!(m.rejected_pairs().is_empty(), "{method}");
            assert_eq!(m.raw_p.iter().flatten().flatten().count(), 12);
        }
    }

    #[test]
    fn matrix_is_symmetric() {
        let s = Sampler::new(&DistributionSpec::vmm(3.0, 0.5, 0.5, 0.0)).unwrap();
        let mut r = rng();
        let data: Vec<YearData> = (0..4)
            .map(|i| YearData { year: 2000 + i, days: vec![], sample: s.sample(80, &mut r).unwrap().into() })
            .collect();
        let m = yearly_pairwise_matrix(&data, Method::Bootstrap, 0.05, 200, 5).unwrap();
        for i in 0..4 {
            assert!(m.raw_p[i][i].is_none());
            for j in 0..4 {
                assert_eq!(m.statistic[i][j], m.statistic[j][i]);
            }
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        assert_eq!(m, pool.install(|| yearly_pairwise_matrix(&data, Method::Bootstrap, 0.05, 200, 5)).unwrap());
    }

    #[test]
    fn short_years_are_skipped() {
        let a = year("a", 2000, &[(1, 0.1)]);
        let b = year("a", 2001, &[(1, 0.1), (2, 0.2)]);
        let rows = fss_by_year(&[a.clone(), b.clone()], 100, 0.05, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(yearly_pairwise_matrix(&[(&a).into(), (&b).into()], Method::Quantile, 0.05, 100, 1).is_err());
    }

    #[test]
    fn synthetic_fixture_round_trips() {
        let truth = SyntheticTruth {
            stations: vec!["s".into()],
            kinds: [(2001, YearKind::HalfCircle), (2002, YearKind::Anomalous)].into_iter().collect(),
        };
        let mut buf = Vec::new();
        write_synthetic_fixture(&truth, 4, &mut buf).unwrap();
        let p = parse_wind_csv(buf.as_slice()).unwrap();
        assert_eq!(p.skipped, 0);
        let ys = yearly_samples(&p.records, 1, &mut rng());
        assert_eq!(ys.iter().map(|y| y.len()).collect::<Vec<_>>(), vec![365, 365]);
        let m0 = frechet_mean_circle(&ys[0].daily_means, &mut rng()).mean.radians();
        let m1 = frechet_mean_circle(&ys[1].daily_means, &mut rng()).mean.radians();
        assert!(m0.abs() < 1e-6, "{m0}");
        assert!(PI - m1.abs() < 1e-6, "{m1}");
        let r = ys[0].daily_means.radians();
        let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 2.4 + 1e-6, "{spread}");
    }

    #[test]
    fn layout_counts() {
        let t = synthetic_layout();
        assert_eq!(t.kinds.len(), 20);
        assert_eq!(t.years_of(YearKind::Anomalous), vec![2010]);
        assert_eq!(t.years_of(YearKind::Fss), vec![2001, 2004, 2007, 2013, 2016, 2019]);
    }
}
