//! Country-level optimism/pessimism indicators from the co-movement of
//! search-attention volumes and stock-index prices.
//!
//! The pipeline runs: [`ingestion`] (CSV parsing, trimming, trading-day
//! alignment) → [`normalization`] (prices onto `[0,100]`) →
//! [`temporal`] (windowed mood index `A`) and [`global`] (threshold
//! indicators `H` and `R`) → [`reporting`] / [`pipeline`] (rankings,
//! summary tables, CSV and SVG matrices).

pub mod global;
pub mod ingestion;
pub mod model;
pub mod normalization;
pub mod pipeline;
pub mod reporting;
pub mod temporal;

pub use model::{
    AlignedPair, CountryCode, CountryPanel, Fraction, IsoWeek, ModelError, MoodLabel,
    NormalizedSeries, Observation, ObservationSeries, PairAggregates, SeriesKind, TradingDate,
};
