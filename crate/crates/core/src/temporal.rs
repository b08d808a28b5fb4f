//! Windowed mood index: the share of normalized price mass minus the share
//! of search mass inside a window, rescaled so the full period reads ½.
//!
//! Values above ½ lean optimistic (prices carry relatively more of their
//! total than searches), values below ½ lean pessimistic.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{AlignedPair, CountryPanel, Fraction, IsoWeek, PairAggregates, TradingDate};

/// Absolute slack tolerated outside `[0,1]` before a value is an internal error.
pub const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TemporalError {
    #[error("search total is zero")]
    ZeroTotal,
    #[error("window [{t1},{t2}] outside 1..={len}")]
    IndexOutOfRange { t1: usize, t2: usize, len: usize },
    #[error("cannot average an empty list")]
    EmptyList,
    #[error("value {0} outside [0,1]")]
    OutOfUnitRange(f64),
}

pub fn pair_aggregates(pair: &AlignedPair) -> Result<PairAggregates, TemporalError> {
    let search_total: u64 = pair.search().iter().map(|&v| u64::from(v)).sum();
    let price_total: u64 = pair.prices().iter().map(|&v| u64::from(v)).sum();
    if search_total == 0 || price_total == 0 {
        return Err(TemporalError::ZeroTotal);
    }
    Ok(PairAggregates {
        search_total,
        price_total,
    })
}

/// Exact window index over the 1-based inclusive range `[t1, t2]`:
/// `½ · Σ (p̄(s)/P̄ − w(s)/W) + ½`.
pub fn mood_window_exact(
    pair: &AlignedPair,
    agg: &PairAggregates,
    t1: usize,
    t2: usize,
) -> Result<Fraction, TemporalError> {
    let len = pair.len();
    if t1 < 1 || t1 > t2 || t2 > len {
        return Err(TemporalError::IndexOutOfRange { t1, t2, len });
    }
    let range = t1 - 1..t2;
    let price_mass: i128 = pair.prices()[range.clone()]
        .iter()
        .map(|&v| i128::from(v))
        .sum();
    let search_mass: i128 = pair.search()[range].iter().map(|&v| i128::from(v)).sum();
    let w = i128::from(agg.search_total);
    let p = i128::from(agg.price_total);
    Ok(Fraction::new(
        p * w + price_mass * w - search_mass * p,
        2 * p * w,
    ))
}

pub fn mood_window_index(
    pair: &AlignedPair,
    agg: &PairAggregates,
    t1: usize,
    t2: usize,
) -> Result<f64, TemporalError> {
    unit_checked(mood_window_exact(pair, agg, t1, t2)?.to_f64())
}

/// Mean of per-index window values for one country.
pub fn country_mood_window(values: &[f64]) -> Result<f64, TemporalError> {
    if values.is_empty() {
        return Err(TemporalError::EmptyList);
    }
    for &v in values {
        unit_checked(v)?;
    }
    unit_checked(values.iter().sum::<f64>() / values.len() as f64)
}

/// Accepts values within [`RANGE_SLACK`] of `[0,1]`, clamping the dust.
pub(crate) fn unit_checked(v: f64) -> Result<f64, TemporalError> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) {
        return Err(TemporalError::OutOfUnitRange(v));
    }
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowMode {
    /// Trading days of one ISO-8601 calendar week.
    #[default]
    IsoWeek,
    /// Consecutive blocks of five trading days from the first grid day.
    Fixed5,
}

/// Identifies a window across pairs with different trading grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WindowLabel {
    Week(IsoWeek),
    Start(TradingDate),
}

impl WindowLabel {
    /// ISO week number of the window (of its first day for fixed blocks).
    pub fn iso_week_number(&self) -> u32 {
        match self {
            Self::Week(w) => w.week,
            Self::Start(d) => d.iso_week().week,
        }
    }
}

impl fmt::Display for WindowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Week(w) => w.fmt(f),
            Self::Start(d) => d.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    /// 1-based, inclusive.
    pub t1: usize,
    pub t2: usize,
    pub label: WindowLabel,
}

impl Window {
    pub fn len(&self) -> usize {
        self.t2 - self.t1 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// ISO week of the window's first day.
    pub fn iso_week(&self, pair: &AlignedPair) -> IsoWeek {
        pair.dates()[self.t1 - 1].iso_week()
    }
}

/// Partitions the grid by ISO calendar week, in chronological order.
pub fn weekly_windows(pair: &AlignedPair) -> Vec<Window> {
    let mut out: Vec<Window> = Vec::new();
    for (i, d) in pair.dates().iter().enumerate() {
        let label = WindowLabel::Week(d.iso_week());
        match out.last_mut() {
            Some(w) if w.label == label => w.t2 = i + 1,
            _ => out.push(Window {
                t1: i + 1,
                t2: i + 1,
                label,
            }),
        }
    }
    out
}

/// Partitions the grid into blocks of five trading days; the last block may
/// be shorter.
pub fn fixed_windows(pair: &AlignedPair) -> Vec<Window> {
    let t = pair.len();
    (0..t)
        .step_by(5)
        .map(|start| Window {
            t1: start + 1,
            t2: (start + 5).min(t),
            label: WindowLabel::Start(pair.dates()[start]),
        })
        .collect()
}

pub fn windows(pair: &AlignedPair, mode: WindowMode) -> Vec<Window> {
    match mode {
        WindowMode::IsoWeek => weekly_windows(pair),
        WindowMode::Fixed5 => fixed_windows(pair),
    }
}

/// Window values of one pair, keyed by label.
pub fn pair_window_scores(
    pair: &AlignedPair,
    mode: WindowMode,
) -> Result<BTreeMap<WindowLabel, f64>, TemporalError> {
    let agg = pair_aggregates(pair)?;
    windows(pair, mode)
        .into_iter()
        .map(|w| Ok((w.label, mood_window_index(pair, &agg, w.t1, w.t2)?)))
        .collect()
}

/// Window values of every index of a country plus their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MoodWindowScore {
    pub label: WindowLabel,
    pub per_index: Vec<(String, f64)>,
    pub country_value: f64,
}

/// Scores every window label present in at least one index of the panel.
/// The country value averages over the indexes that cover that label.
pub fn country_window_scores(
    panel: &CountryPanel,
    mode: WindowMode,
) -> Result<Vec<MoodWindowScore>, TemporalError> {
    let mut by_label: BTreeMap<WindowLabel, Vec<(String, f64)>> = BTreeMap::new();
    for pair in panel.pairs() {
        for (label, v) in pair_window_scores(pair, mode)? {
            by_label
                .entry(label)
                .or_default()
                .push((pair.index_id().to_owned(), v));
        }
    }
    by_label
        .into_iter()
        .map(|(label, per_index)| {
            let values: Vec<f64> = per_index.iter().map(|(_, v)| *v).collect();
            Ok(MoodWindowScore {
                label,
                country_value: country_mood_window(&values)?,
                per_index,
            })
        })
        .collect()
}
