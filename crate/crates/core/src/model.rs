//! Domain types shared by every stage of the pipeline.
//!
//! All types are immutable after construction and validated on the way in:
//! a constructor either returns a value satisfying its invariants or an
//! error; nothing is silently repaired.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

/// ISO-8601 date format used when a config does not override it.
pub const DEFAULT_DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("series is empty")]
    EmptySeries,
    #[error("dates not strictly increasing at {date}")]
    NonMonotoneDates { date: TradingDate },
    #[error("search value {value} on {date} is not an integer in [0,100]")]
    SearchOutOfRange { date: TradingDate, value: f64 },
    #[error("price {value} on {date} is negative or not finite")]
    InvalidPrice { date: TradingDate, value: f64 },
    #[error("invalid country code {0:?}: expected 3 uppercase ASCII letters")]
    InvalidCountryCode(String),
    #[error("aligned pair needs at least 2 trading days, got {0}")]
    TooShort(usize),
    #[error("length mismatch: {dates} dates, {search} search values, {prices} prices")]
    LengthMismatch {
        dates: usize,
        search: usize,
        prices: usize,
    },
    #[error("first search value must be nonnull")]
    LeadingZeroSearch,
    #[error("search value {0} exceeds 100")]
    SearchAbove100(u8),
    #[error("normalized series invalid: {0}")]
    InvalidNormalized(&'static str),
    #[error("panel for {country} has no pairs")]
    EmptyPanel { country: CountryCode },
    #[error("pair {index_id} belongs to {found}, not {expected}")]
    CountryMismatch {
        expected: CountryCode,
        found: CountryCode,
        index_id: String,
    },
    #[error("joint variation {0} outside -2..=2")]
    OutOfDomain(i8),
}

/// A calendar day on which an observation was recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TradingDate(NaiveDate);

impl TradingDate {
    pub fn new(date: NaiveDate) -> Self {
        Self(date)
    }

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day).map(Self)
    }

    pub fn parse(text: &str, format: &str) -> Result<Self, chrono::ParseError> {
        NaiveDate::parse_from_str(text, format).map(Self)
    }

    pub fn date(self) -> NaiveDate {
        self.0
    }

    pub fn iso_week(self) -> IsoWeek {
        let w = self.0.iso_week();
        IsoWeek {
            year: w.year(),
            week: w.week(),
        }
    }
}

impl fmt::Display for TradingDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(DEFAULT_DATE_FORMAT))
    }
}

/// ISO-8601 week-numbering year and week.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoWeek {
    pub year: i32,
    pub week: u32,
}

impl fmt::Display for IsoWeek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-W{:02}", self.year, self.week)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Search,
    Price,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub date: TradingDate,
    pub value: f64,
}

/// A dated sequence of search volumes or closing prices.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    kind: SeriesKind,
    points: Vec<Observation>,
}

impl ObservationSeries {
    pub fn new(kind: SeriesKind, points: Vec<Observation>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::EmptySeries);
        }
        for pair in points.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(ModelError::NonMonotoneDates { date: pair[1].date });
            }
        }
        for p in &points {
            match kind {
                SeriesKind::Search => {
                    let v = p.value;
                    if !(0.0..=100.0).contains(&v) || v.fract() != 0.0 {
                        return Err(ModelError::SearchOutOfRange {
                            date: p.date,
                            value: v,
                        });
                    }
                }
                SeriesKind::Price => {
                    if !p.value.is_finite() || p.value < 0.0 {
                        return Err(ModelError::InvalidPrice {
                            date: p.date,
                            value: p.value,
                        });
                    }
                }
            }
        }
        Ok(Self { kind, points })
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_date(&self) -> TradingDate {
        self.points[0].date
    }

    pub fn dates(&self) -> impl Iterator<Item = TradingDate> + '_ {
        self.points.iter().map(|p| p.date)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }
}

/// ISO 3166-1 alpha-3 country code.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryCode(String);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self, ModelError> {
        if code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase()) {
            Ok(Self(code.to_owned()))
        } else {
            Err(ModelError::InvalidCountryCode(code.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for CountryCode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Prices mapped onto integers in `[0,100]`, with the position of the
/// (earliest) raw maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedSeries {
    values: Vec<u8>,
    argmax_index: usize,
}

impl NormalizedSeries {
    pub fn new(values: Vec<u8>, argmax_index: usize) -> Result<Self, ModelError> {
        match values.get(argmax_index) {
            None => return Err(ModelError::InvalidNormalized("argmax out of range")),
            Some(&v) if v != 100 => {
                return Err(ModelError::InvalidNormalized("argmax value is not 100"))
            }
            _ => {}
        }
        if values.iter().any(|&v| v > 100) {
            return Err(ModelError::InvalidNormalized("value above 100"));
        }
        Ok(Self {
            values,
            argmax_index,
        })
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn argmax_index(&self) -> usize {
        self.argmax_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One (country, index) pair on its common trading-day grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    country: CountryCode,
    index_id: String,
    dates: Vec<TradingDate>,
    search: Vec<u8>,
    prices: NormalizedSeries,
    raw_prices: Vec<f64>,
}

impl AlignedPair {
    pub fn new(
        country: CountryCode,
        index_id: impl Into<String>,
        dates: Vec<TradingDate>,
        search: Vec<u8>,
        prices: NormalizedSeries,
        raw_prices: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let t = dates.len();
        if search.len() != t || prices.len() != t || raw_prices.len() != t {
            return Err(ModelError::LengthMismatch {
                dates: t,
                search: search.len(),
                prices: prices.len(),
            });
        }
        if t < 2 {
            return Err(ModelError::TooShort(t));
        }
        if let Some(i) = dates.windows(2).position(|d| d[1] <= d[0]) {
            return Err(ModelError::NonMonotoneDates { date: dates[i + 1] });
        }
        if let Some(&v) = search.iter().find(|&&v| v > 100) {
            return Err(ModelError::SearchAbove100(v));
        }
        if search[0] == 0 {
            return Err(ModelError::LeadingZeroSearch);
        }
        Ok(Self {
            country,
            index_id: index_id.into(),
            dates,
            search,
            prices,
            raw_prices,
        })
    }

    /// Builds a pair directly from integer series, with synthetic consecutive
    /// weekday dates starting on Monday 2020-01-06. Used by tests and
    /// simulations that only care about the positional values.
    pub fn from_values(search: Vec<u8>, prices: Vec<u8>) -> Result<Self, ModelError> {
        let argmax = prices
            .iter()
            .position(|&v| v == 100)
            .ok_or(ModelError::InvalidNormalized("no value equals 100"))?;
        let raw = prices.iter().map(|&v| f64::from(v)).collect();
        let dates = synthetic_weekdays(search.len());
        Self::new(
            CountryCode::new("XXX")?,
            "synthetic",
            dates,
            search,
            NormalizedSeries::new(prices, argmax)?,
            raw,
        )
    }

    pub fn country(&self) -> &CountryCode {
        &self.country
    }

    pub fn index_id(&self) -> &str {
        &self.index_id
    }

    pub fn dates(&self) -> &[TradingDate] {
        &self.dates
    }

    /// Search volumes `w` on the trading grid.
    pub fn search(&self) -> &[u8] {
        &self.search
    }

    /// Normalized prices on the trading grid.
    pub fn prices(&self) -> &[u8] {
        self.prices.values()
    }

    pub fn normalized(&self) -> &NormalizedSeries {
        &self.prices
    }

    pub fn raw_prices(&self) -> &[f64] {
        &self.raw_prices
    }

    /// Number of trading days `T`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// True when no trading day carries the provider's maximum of 100
    /// (the global search peak fell on a non-trading day).
    pub fn search_peak_missing(&self) -> bool {
        self.search.iter().all(|&v| v < 100)
    }

    /// The same pair with search and normalized price series exchanged.
    /// Only meaningful when the search series also reaches 100.
    pub fn swapped(&self) -> Result<Self, ModelError> {
        let argmax =
            self.search
                .iter()
                .position(|&v| v == 100)
                .ok_or(ModelError::InvalidNormalized(
                    "search series never reaches 100",
                ))?;
        Self::new(
            self.country.clone(),
            self.index_id.clone(),
            self.dates.clone(),
            self.prices.values().to_vec(),
            NormalizedSeries::new(self.search.clone(), argmax)?,
            self.search.iter().map(|&v| f64::from(v)).collect(),
        )
    }
}

fn synthetic_weekdays(n: usize) -> Vec<TradingDate> {
    let mut out = Vec::with_capacity(n);
    let mut day = NaiveDate::from_ymd_opt(2020, 1, 6).expect("valid date");
    while out.len() < n {
        if day.weekday().number_from_monday() <= 5 {
            out.push(TradingDate(day));
        }
        day = day.succ_opt().expect("date in range");
    }
    out
}

/// Totals `W` (search) and `P̄` (normalized price) over the whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAggregates {
    pub search_total: u64,
    pub price_total: u64,
}

/// All aligned pairs of one country.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryPanel {
    country: CountryCode,
    pairs: Vec<AlignedPair>,
}

impl CountryPanel {
    pub fn new(country: CountryCode, pairs: Vec<AlignedPair>) -> Result<Self, ModelError> {
        if pairs.is_empty() {
            return Err(ModelError::EmptyPanel { country });
        }
        if let Some(p) = pairs.iter().find(|p| p.country != country) {
            return Err(ModelError::CountryMismatch {
                expected: country.clone(),
                found: p.country.clone(),
                index_id: p.index_id.clone(),
            });
        }
        Ok(Self { country, pairs })
    }

    pub fn country(&self) -> &CountryCode {
        &self.country
    }

    pub fn pairs(&self) -> &[AlignedPair] {
        &self.pairs
    }
}

/// Interpretation of a joint variation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoodLabel {
    StrongOptimism,
    MildOptimism,
    Neutral,
    MildPessimism,
    StrongPessimism,
}

impl MoodLabel {
    pub fn value(self) -> i8 {
        match self {
            Self::StrongOptimism => -2,
            Self::MildOptimism => -1,
            Self::Neutral => 0,
            Self::MildPessimism => 1,
            Self::StrongPessimism => 2,
        }
    }
}

impl TryFrom<i8> for MoodLabel {
    type Error = ModelError;

    fn try_from(d: i8) -> Result<Self, Self::Error> {
        Ok(match d {
            -2 => Self::StrongOptimism,
            -1 => Self::MildOptimism,
            0 => Self::Neutral,
            1 => Self::MildPessimism,
            2 => Self::StrongPessimism,
            other => return Err(ModelError::OutOfDomain(other)),
        })
    }
}

/// An exact nonnegative rational `numerator / denominator`, kept unreduced.
///
/// Indicators whose definitions are ratios of integer sums are carried in
/// this form so identities such as `H + H' = 1` can be checked exactly.
/// Equality compares the rational values, not the representations.
#[derive(Debug, Clone, Copy)]
pub struct Fraction {
    numerator: i128,
    denominator: i128,
}

impl Fraction {
    /// Panics if `denominator` is not positive.
    pub fn new(numerator: i128, denominator: i128) -> Self {
        assert!(denominator > 0, "denominator must be positive");
        Self {
            numerator,
            denominator,
        }
    }

    pub fn numerator(self) -> i128 {
        self.numerator
    }

    pub fn denominator(self) -> i128 {
        self.denominator
    }

    /// Correctly rounded only when both parts fit in 53 bits, which holds for
    /// every quantity produced by this crate.
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// `1 - self`.
    pub fn complement(self) -> Self {
        Self::new(self.denominator - self.numerator, self.denominator)
    }

    pub fn half() -> Self {
        Self::new(1, 2)
    }
}

impl PartialEq for Fraction {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fraction {}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator * other.denominator).cmp(&(other.numerator * self.denominator))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}
