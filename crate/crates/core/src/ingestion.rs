//! CSV ingestion, trimming and trading-day alignment.
//!
//! The trading calendar is whatever dates appear in the price file. Search
//! rows on other days are dropped; a trading day without a search row inside
//! the search file's coverage is an error, never an implicit zero.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{
    AlignedPair, CountryCode, CountryPanel, ModelError, Observation, ObservationSeries, SeriesKind,
    TradingDate, DEFAULT_DATE_FORMAT,
};
use crate::normalization::{normalize_prices, NormalizationError};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {detail}")]
    MalformedRow { line: u64, detail: String },
    #[error("line {line}: value {value} out of range")]
    OutOfRange { line: u64, value: String },
    #[error("line {line}: date {date} does not follow the previous row")]
    NonMonotoneDates { line: u64, date: TradingDate },
    #[error("series has no rows")]
    EmptySeries,
    #[error("search series has no nonnull value")]
    AllZero,
    #[error("expected a {expected:?} series")]
    WrongKind { expected: SeriesKind },
    #[error("only {0} common trading day(s) with nonnull search start")]
    InsufficientOverlap(usize),
    #[error("no search value on trading day {0}")]
    MissingSearchValue(TradingDate),
    #[error("all prices are zero on the aligned grid")]
    AllZeroPrices,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl IngestError {
    /// Stable machine-readable code used in diagnostics reports.
    pub fn code(&self) -> &'static str {
        match self {
            Self::MalformedRow { .. } => "MalformedRow",
            Self::OutOfRange { .. } => "OutOfRange",
            Self::NonMonotoneDates { .. } => "NonMonotoneDates",
            Self::EmptySeries => "EmptySeries",
            Self::AllZero => "AllZero",
            Self::WrongKind { .. } => "WrongKind",
            Self::InsufficientOverlap(_) => "InsufficientOverlap",
            Self::MissingSearchValue(_) => "MissingSearchValue",
            Self::AllZeroPrices => "AllZeroPrices",
            Self::Io { .. } => "IoError",
            Self::Model(_) => "InvalidPair",
        }
    }
}

impl From<NormalizationError> for IngestError {
    fn from(e: NormalizationError) -> Self {
        match e {
            NormalizationError::AllZeroPrices => Self::AllZeroPrices,
            NormalizationError::Empty => Self::EmptySeries,
            NormalizationError::InvalidPrice { index, value } => Self::OutOfRange {
                line: index as u64 + 2,
                value: value.to_string(),
            },
            NormalizationError::Model(m) => Self::Model(m),
        }
    }
}

/// Parses a `date,value` CSV into a validated series.
pub fn parse_series(
    bytes: &[u8],
    kind: SeriesKind,
    date_format: &str,
) -> Result<ObservationSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let headers = reader.headers().map_err(|e| malformed(1, e))?;
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "value" {
        return Err(IngestError::MalformedRow {
            line: 1,
            detail: format!(
                "expected header `date,value`, got {:?}",
                headers.iter().collect::<Vec<_>>()
            ),
        });
    }

    let mut points: Vec<Observation> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(IngestError::MalformedRow {
                line,
                detail: format!("expected 2 fields, got {}", record.len()),
            });
        }
        let date = TradingDate::parse(&record[0], date_format)
            .map_err(|e| malformed(line, format!("date {:?}: {e}", &record[0])))?;
        let raw = &record[1];
        let value: f64 = raw
            .parse()
            .map_err(|_| malformed(line, format!("value {raw:?} is not a number")))?;
        let in_range = match kind {
            SeriesKind::Search => (0.0..=100.0).contains(&value) && value.fract() == 0.0,
            SeriesKind::Price => value.is_finite() && value >= 0.0,
        };
        if !in_range {
            return Err(IngestError::OutOfRange {
                line,
                value: raw.to_owned(),
            });
        }
        if let Some(prev) = points.last() {
            if date == prev.date {
                return Err(malformed(line, format!("duplicate date {date}")));
            }
            if date < prev.date {
                return Err(IngestError::NonMonotoneDates { line, date });
            }
        }
        points.push(Observation { date, value });
    }

    if points.is_empty() {
        return Err(IngestError::EmptySeries);
    }
    Ok(ObservationSeries::new(kind, points)?)
}

fn malformed(line: u64, detail: impl fmt::Display) -> IngestError {
    IngestError::MalformedRow {
        line,
        detail: detail.to_string(),
    }
}

/// Drops the leading run of zero search values.
pub fn trim_to_first_nonnull(search: &ObservationSeries) -> Result<ObservationSeries, IngestError> {
    if search.kind() != SeriesKind::Search {
        return Err(IngestError::WrongKind {
            expected: SeriesKind::Search,
        });
    }
    let start = search
        .points()
        .iter()
        .position(|p| p.value > 0.0)
        .ok_or(IngestError::AllZero)?;
    Ok(ObservationSeries::new(
        SeriesKind::Search,
        search.points()[start..].to_vec(),
    )?)
}

/// Restricts a search series to the trading days of a price series and
/// normalizes the prices on the resulting grid.
///
/// The grid is every price date within the search series' coverage, minus
/// any leading days whose search value is zero (the first nonnull search
/// day may be a non-trading day).
pub fn align(
    country: &CountryCode,
    index_id: &str,
    search: &ObservationSeries,
    price: &ObservationSeries,
) -> Result<AlignedPair, IngestError> {
    if search.kind() != SeriesKind::Search {
        return Err(IngestError::WrongKind {
            expected: SeriesKind::Search,
        });
    }
    if price.kind() != SeriesKind::Price {
        return Err(IngestError::WrongKind {
            expected: SeriesKind::Price,
        });
    }
    let sp = search.points();
    let first = sp[0].date;
    let last = sp[sp.len() - 1].date;

    let mut dates = Vec::new();
    let mut w = Vec::new();
    let mut raw = Vec::new();
    let mut cursor = 0;
    for p in price
        .points()
        .iter()
        .filter(|p| p.date >= first && p.date <= last)
    {
        while sp[cursor].date < p.date {
            cursor += 1;
        }
        if sp[cursor].date != p.date {
            return Err(IngestError::MissingSearchValue(p.date));
        }
        let v = sp[cursor].value as u8;
        if dates.is_empty() && v == 0 {
            continue;
        }
        dates.push(p.date);
        w.push(v);
        raw.push(p.value);
    }

    if dates.len() < 2 {
        return Err(IngestError::InsufficientOverlap(dates.len()));
    }
    let normalized = normalize_prices(&raw)?;
    Ok(AlignedPair::new(
        country.clone(),
        index_id,
        dates,
        w,
        normalized,
        raw,
    )?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub index_id: String,
    pub price_file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountryEntry {
    pub country: CountryCode,
    pub search_file: PathBuf,
    pub indexes: Vec<IndexEntry>,
}

/// Which files make up the panel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanelConfig {
    pub entries: Vec<CountryEntry>,
    pub date_format: String,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error(transparent)]
    Country(#[from] ModelError),
    #[error("duplicate entry for country {0}")]
    DuplicateCountry(CountryCode),
    #[error("duplicate index {index_id} for country {country}")]
    DuplicateIndex {
        country: CountryCode,
        index_id: String,
    },
    #[error("empty {what} for country {country}")]
    EmptyField {
        country: CountryCode,
        what: &'static str,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    date_format: Option<String>,
    #[serde(default)]
    countries: Vec<RawCountry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCountry {
    code: String,
    search: PathBuf,
    #[serde(default)]
    indexes: Vec<RawIndex>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndex {
    id: String,
    prices: PathBuf,
}

impl PanelConfig {
    /// Parses TOML text; relative file paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let mut entries = Vec::with_capacity(raw.countries.len());
        let mut seen_countries = HashSet::new();
        for c in raw.countries {
            let country = CountryCode::new(&c.code)?;
            if !seen_countries.insert(country.clone()) {
                return Err(ConfigError::DuplicateCountry(country));
            }
            if c.search.as_os_str().is_empty() {
                return Err(ConfigError::EmptyField {
                    country,
                    what: "search file",
                });
            }
            if c.indexes.is_empty() {
                return Err(ConfigError::EmptyField {
                    country,
                    what: "index list",
                });
            }
            let mut seen_ids = HashSet::new();
            let mut indexes = Vec::with_capacity(c.indexes.len());
            for ix in c.indexes {
                if ix.id.is_empty() || ix.prices.as_os_str().is_empty() {
                    return Err(ConfigError::EmptyField {
                        country,
                        what: "index id or price file",
                    });
                }
                if !seen_ids.insert(ix.id.clone()) {
                    return Err(ConfigError::DuplicateIndex {
                        country,
                        index_id: ix.id,
                    });
                }
                indexes.push(IndexEntry {
                    index_id: ix.id,
                    price_file: base_dir.join(ix.prices),
                });
            }
            entries.push(CountryEntry {
                country,
                search_file: base_dir.join(c.search),
                indexes,
            });
        }
        Ok(Self {
            entries,
            date_format: raw
                .date_format
                .unwrap_or_else(|| DEFAULT_DATE_FORMAT.to_owned()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Keeps only the listed countries, preserving config order.
    pub fn restrict_to(&mut self, countries: &[CountryCode]) {
        self.entries.retain(|e| countries.contains(&e.country));
    }
}

/// One row of the diagnostics report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub country: CountryCode,
    /// Empty when the problem concerns the country's search file.
    pub index_id: String,
    pub error_code: String,
    pub detail: String,
}

impl Diagnostic {
    fn from_error(country: &CountryCode, index_id: &str, err: &IngestError) -> Self {
        Self {
            country: country.clone(),
            index_id: index_id.to_owned(),
            error_code: err.code().to_owned(),
            detail: err.to_string(),
        }
    }
}

/// Serializes diagnostics as `country,index_id,error_code,detail`.
pub fn diagnostics_csv(rows: &[Diagnostic]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["country", "index_id", "error_code", "detail"])
        .expect("write to Vec");
    for d in rows {
        w.write_record([d.country.as_str(), &d.index_id, &d.error_code, &d.detail])
            .expect("write to Vec");
    }
    w.into_inner().expect("flush to Vec")
}

/// Result of ingesting one configured country.
#[derive(Debug)]
pub struct CountryBuild {
    pub panel: Option<CountryPanel>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Ingests every index of one country. Pair failures become diagnostics;
/// a country with no surviving pair yields `panel: None` plus a
/// `CountryEmpty` diagnostic.
pub fn build_country<R>(entry: &CountryEntry, date_format: &str, resolve: &R) -> CountryBuild
where
    R: Fn(&Path) -> io::Result<Vec<u8>> + ?Sized,
{
    let country = &entry.country;
    let mut diagnostics = Vec::new();
    let read = |path: &Path, kind| {
        let bytes = resolve(path).map_err(|source| IngestError::Io {
            path: path.to_owned(),
            source,
        })?;
        parse_series(&bytes, kind, date_format)
    };

    let search =
        read(&entry.search_file, SeriesKind::Search).and_then(|s| trim_to_first_nonnull(&s));
    let mut pairs = Vec::new();
    match search {
        Err(e) => diagnostics.push(Diagnostic::from_error(country, "", &e)),
        Ok(search) => {
            for ix in &entry.indexes {
                let pair = read(&ix.price_file, SeriesKind::Price)
                    .and_then(|p| align(country, &ix.index_id, &search, &p));
                match pair {
                    Ok(p) => pairs.push(p),
                    Err(e) => diagnostics.push(Diagnostic::from_error(country, &ix.index_id, &e)),
                }
            }
        }
    }

    let panel = if pairs.is_empty() {
        diagnostics.push(Diagnostic {
            country: country.clone(),
            index_id: String::new(),
            error_code: "CountryEmpty".to_owned(),
            detail: format!("all {} index(es) failed", entry.indexes.len()),
        });
        None
    } else {
        Some(CountryPanel::new(country.clone(), pairs).expect("pairs share the entry country"))
    };
    CountryBuild { panel, diagnostics }
}

#[derive(Debug, Default)]
pub struct PanelBuild {
    pub panels: Vec<CountryPanel>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("countries lost all their indexes: {}", join_codes(.countries))]
    CountryEmpty {
        countries: Vec<CountryCode>,
        diagnostics: Vec<Diagnostic>,
    },
}

fn join_codes(codes: &[CountryCode]) -> String {
    codes
        .iter()
        .map(CountryCode::as_str)
        .collect::<Vec<_>>()
        .join(",")
}

/// Combines per-country builds (in config order) into a panel list.
pub fn collect_panels(builds: Vec<CountryBuild>) -> Result<PanelBuild, PanelError> {
    let mut out = PanelBuild::default();
    let mut empty = Vec::new();
    for b in builds {
        match b.panel {
            Some(p) => out.panels.push(p),
            None => {
                if let Some(d) = b.diagnostics.first() {
                    empty.push(d.country.clone());
                }
            }
        }
        out.diagnostics.extend(b.diagnostics);
    }
    if empty.is_empty() {
        Ok(out)
    } else {
        Err(PanelError::CountryEmpty {
            countries: empty,
            diagnostics: out.diagnostics,
        })
    }
}

/// Ingests every configured country sequentially.
pub fn build_panel<R>(config: &PanelConfig, resolve: &R) -> Result<PanelBuild, PanelError>
where
    R: Fn(&Path) -> io::Result<Vec<u8>> + ?Sized,
{
    let builds = config
        .entries
        .iter()
        .map(|e| build_country(e, &config.date_format, resolve))
        .collect();
    collect_panels(builds)
}

/// Reads files from the local filesystem.
pub fn fs_resolver(path: &Path) -> io::Result<Vec<u8>> {
    std::fs::read(path)
}

/// Resolver over an in-memory file map, for tests and embedding.
pub fn map_resolver(files: BTreeMap<PathBuf, Vec<u8>>) -> impl Fn(&Path) -> io::Result<Vec<u8>> {
    move |path| {
        files
            .get(path)
            .cloned()
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, "no such file"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ISO: &str = DEFAULT_DATE_FORMAT;

    fn search(csv: &str) -> ObservationSeries {
        parse_series(csv.as_bytes(), SeriesKind::Search, ISO).unwrap()
    }

    fn price(csv: &str) -> ObservationSeries {
        parse_series(csv.as_bytes(), SeriesKind::Price, ISO).unwrap()
    }

    fn ita() -> CountryCode {
        CountryCode::new("ITA").unwrap()
    }

    #[test]
    fn parses_minimal_input() {
        let s = search("date,value\n2020-01-06,0\n2020-01-07,3");
        assert_eq!(s.len(), 2);
        assert_eq!(s.values().collect::<Vec<_>>(), vec![0.0, 3.0]);
    }

    #[test]
    fn accepts_crlf() {
        let s = price("date,value\r\n2020-01-06,10.5\r\n2020-01-07,11\r\n");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn rejects_order_violation() {
        let err = parse_series(
            b"date,value\n2020-01-07,3\n2020-01-06,0",
            SeriesKind::Search,
            ISO,
        )
        .unwrap_err();
        assert!(matches!(err, IngestError::NonMonotoneDates { line: 3, .. }));
    }

    #[test]
    fn rejects_out_of_range_search() {
        let err = parse_series(b"date,value\n2020-02-01,101", SeriesKind::Search, ISO).unwrap_err();
        assert!(matches!(err, IngestError::OutOfRange { line: 2, .. }));
        let err = parse_series(b"date,value\n2020-02-01,2.5", SeriesKind::Search, ISO).unwrap_err();
        assert_eq!(err.code(), "OutOfRange");
        let err = parse_series(b"date,value\n2020-02-01,-1", SeriesKind::Price, ISO).unwrap_err();
        assert_eq!(err.code(), "OutOfRange");
    }

    #[test]
    fn rejects_malformed_rows() {
        for bad in [
            "date,value\n2020-13-01,1",
            "date,value\n2020-01-06,abc",
            "date,value\n2020-01-06,",
            "date,value\n2020-01-06,1,2",
            "day,value\n2020-01-06,1",
            "date,value\n2020-01-06,1\n2020-01-06,2",
        ] {
            let err = parse_series(bad.as_bytes(), SeriesKind::Search, ISO).unwrap_err();
            assert_eq!(err.code(), "MalformedRow", "{bad:?} gave {err}");
        }
        let err = parse_series(b"date,value\n", SeriesKind::Search, ISO).unwrap_err();
        assert!(matches!(err, IngestError::EmptySeries));
    }

    #[test]
    fn custom_date_format() {
        let s = parse_series(b"date,value\n06/01/2020,4", SeriesKind::Search, "%d/%m/%Y").unwrap();
        assert_eq!(s.first_date(), TradingDate::from_ymd(2020, 1, 6).unwrap());
    }

    #[test]
    fn trims_leading_zeros_only() {
        let s = search(
            "date,value\n2020-01-06,0\n2020-01-07,0\n2020-01-08,5\n2020-01-09,0\n2020-01-10,7",
        );
        let t = trim_to_first_nonnull(&s).unwrap();
        assert_eq!(t.values().collect::<Vec<_>>(), vec![5.0, 0.0, 7.0]);

        let s = search("date,value\n2020-01-06,9\n2020-01-07,0");
        assert_eq!(trim_to_first_nonnull(&s).unwrap(), s);

        let s = search("date,value\n2020-01-06,0\n2020-01-07,0\n2020-01-08,0");
        assert!(matches!(
            trim_to_first_nonnull(&s),
            Err(IngestError::AllZero)
        ));
        assert!(matches!(
            trim_to_first_nonnull(&price("date,value\n2020-01-06,1")),
            Err(IngestError::WrongKind { .. })
        ));
    }

    #[test]
    fn align_drops_weekends() {
        // 2020-01-06 is a Monday; search covers Mon..Sun, prices Mon..Fri.
        let mut s = String::from("date,value\n");
        let mut p = String::from("date,value\n");
        for day in 6..=12 {
            s.push_str(&format!("2020-01-{day:02},{}\n", day * 5));
            if day <= 10 {
                p.push_str(&format!("2020-01-{day:02},{}\n", 100 + day));
            }
        }
        let pair = align(&ita(), "IX", &search(&s), &price(&p)).unwrap();
        assert_eq!(pair.len(), 5);
        assert_eq!(pair.search(), &[30, 35, 40, 45, 50]);
        assert_eq!(pair.prices()[4], 100);
        assert!(pair.search_peak_missing());
    }

    #[test]
    fn align_skips_holiday() {
        let s = search("date,value\n2020-01-06,1\n2020-01-07,2\n2020-01-08,3\n2020-01-09,4");
        let p = price("date,value\n2020-01-06,10\n2020-01-08,20\n2020-01-09,30");
        let pair = align(&ita(), "IX", &s, &p).unwrap();
        let got: Vec<String> = pair.dates().iter().map(|d| d.to_string()).collect();
        assert_eq!(got, ["2020-01-06", "2020-01-08", "2020-01-09"]);
        assert_eq!(pair.search(), &[1, 3, 4]);
    }

    #[test]
    fn align_disjoint_is_insufficient() {
        let s = search("date,value\n2020-01-06,1\n2020-01-07,2");
        let p = price("date,value\n2020-02-06,10\n2020-02-07,20");
        assert!(matches!(
            align(&ita(), "IX", &s, &p),
            Err(IngestError::InsufficientOverlap(0))
        ));
    }

    #[test]
    fn align_rejects_search_gap() {
        let s = search("date,value\n2020-01-06,1\n2020-01-08,2");
        let p = price("date,value\n2020-01-06,10\n2020-01-07,20\n2020-01-08,30");
        assert!(matches!(
            align(&ita(), "IX", &s, &p),
            Err(IngestError::MissingSearchValue(_))
        ));
    }

    #[test]
    fn align_retrims_when_first_nonnull_is_weekend() {
        // Sat 11th is the first nonnull search day; Monday 13th reads 0 again.
        let s = search(
            "date,value\n2020-01-11,4\n2020-01-12,2\n2020-01-13,0\n2020-01-14,6\n2020-01-15,8",
        );
        let p = price("date,value\n2020-01-13,10\n2020-01-14,20\n2020-01-15,30");
        let pair = align(&ita(), "IX", &s, &p).unwrap();
        assert_eq!(pair.search(), &[6, 8]);
        assert_eq!(pair.prices(), &[66, 100]);
    }

    #[test]
    fn align_rejects_zero_prices() {
        let s = search("date,value\n2020-01-06,1\n2020-01-07,2");
        let p = price("date,value\n2020-01-06,0\n2020-01-07,0");
        assert!(matches!(
            align(&ita(), "IX", &s, &p),
            Err(IngestError::AllZeroPrices)
        ));
    }

    #[test]
    fn config_parsing() {
        let text = r#"
            date_format = "%Y-%m-%d"

            [[countries]]
            code = "ITA"
            search = "search/ITA.csv"
            indexes = [
                { id = "FTSE MIB", prices = "prices/ita_mib.csv" },
                { id = "FTSE ITALIA", prices = "prices/ita_all.csv" },
            ]
        "#;
        let cfg = PanelConfig::from_toml(text, Path::new("/data")).unwrap();
        assert_eq!(cfg.entries.len(), 1);
        assert_eq!(
            cfg.entries[0].search_file,
            Path::new("/data/search/ITA.csv")
        );
        assert_eq!(cfg.entries[0].indexes[1].index_id, "FTSE ITALIA");

        let dup = r#"
            [[countries]]
            code = "ITA"
            search = "s.csv"
            indexes = [{ id = "A", prices = "a.csv" }, { id = "A", prices = "b.csv" }]
        "#;
        assert!(matches!(
            PanelConfig::from_toml(dup, Path::new(".")),
            Err(ConfigError::DuplicateIndex { .. })
        ));
        let empty_path = r#"
            [[countries]]
            code = "ITA"
            search = ""
            indexes = [{ id = "A", prices = "a.csv" }]
        "#;
        assert!(matches!(
            PanelConfig::from_toml(empty_path, Path::new(".")),
            Err(ConfigError::EmptyField { .. })
        ));
        let bad_code = "[[countries]]\ncode = \"it\"\nsearch = \"s\"\nindexes = []";
        assert!(matches!(
            PanelConfig::from_toml(bad_code, Path::new(".")),
            Err(ConfigError::Country(_))
        ));
        let cfg = PanelConfig::from_toml("", Path::new(".")).unwrap();
        assert!(cfg.entries.is_empty());
        assert_eq!(cfg.date_format, DEFAULT_DATE_FORMAT);
    }

    fn two_index_config() -> (PanelConfig, BTreeMap<PathBuf, Vec<u8>>) {
        let cfg = PanelConfig {
            date_format: ISO.to_owned(),
            entries: vec![CountryEntry {
                country: ita(),
                search_file: "s.csv".into(),
                indexes: vec![
                    IndexEntry {
                        index_id: "A".into(),
                        price_file: "a.csv".into(),
                    },
                    IndexEntry {
                        index_id: "B".into(),
                        price_file: "b.csv".into(),
                    },
                ],
            }],
        };
        let mut files = BTreeMap::new();
        files.insert(
            PathBuf::from("s.csv"),
            b"date,value\n2020-01-06,5\n2020-01-07,100\n".to_vec(),
        );
        files.insert(
            PathBuf::from("a.csv"),
            b"date,value\n2020-01-06,10\n2020-01-07,20\n".to_vec(),
        );
        files.insert(
            PathBuf::from("b.csv"),
            b"date,value\n2020-01-06,30\n2020-01-07,20\n".to_vec(),
        );
        (cfg, files)
    }

    #[test]
    fn panel_with_all_indexes() {
        let (cfg, files) = two_index_config();
        let out = build_panel(&cfg, &map_resolver(files)).unwrap();
        assert_eq!(out.panels.len(), 1);
        assert_eq!(out.panels[0].pairs().len(), 2);
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn panel_survives_missing_file() {
        let (cfg, mut files) = two_index_config();
        files.remove(Path::new("b.csv"));
        let out = build_panel(&cfg, &map_resolver(files)).unwrap();
        assert_eq!(out.panels[0].pairs().len(), 1);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].error_code, "IoError");
        assert_eq!(out.diagnostics[0].index_id, "B");
    }

    #[test]
    fn panel_country_empty() {
        let (cfg, mut files) = two_index_config();
        files.remove(Path::new("s.csv"));
        let err = build_panel(&cfg, &map_resolver(files)).unwrap_err();
        let PanelError::CountryEmpty {
            countries,
            diagnostics,
        } = err;
        assert_eq!(countries, vec![ita()]);
        let codes: Vec<_> = diagnostics.iter().map(|d| d.error_code.as_str()).collect();
        assert_eq!(codes, ["IoError", "CountryEmpty"]);
    }

    #[test]
    fn empty_config_gives_empty_panel_list() {
        let cfg = PanelConfig {
            entries: vec![],
            date_format: ISO.to_owned(),
        };
        let out = build_panel(&cfg, &map_resolver(BTreeMap::new())).unwrap();
        assert!(out.panels.is_empty());
    }

    #[test]
    fn diagnostics_csv_quotes_fields() {
        let rows = vec![Diagnostic {
            country: ita(),
            index_id: "FTSE, MIB".into(),
            error_code: "MalformedRow".into(),
            detail: "line 3: bad".into(),
        }];
        let text = String::from_utf8(diagnostics_csv(&rows)).unwrap();
        assert_eq!(
            text,
            "country,index_id,error_code,detail\nITA,\"FTSE, MIB\",MalformedRow,line 3: bad\n"
        );
    }
}
