//! Per-country analysis and assembly of the report file set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::global::{zeta_sweep, GlobalError, ThresholdProfile, DEFAULT_ZETA_MAX};
use crate::model::{CountryCode, CountryPanel, Fraction, TradingDate};
use crate::reporting::{
    emit_heatmap_svg, emit_matrix_csv, format_value, fraction_beyond_half, rank_week, rankings_csv,
    summarize, Matrix, ReportError, Side, WeeklyRanking,
};
use crate::temporal::{
    country_window_scores, MoodWindowScore, TemporalError, WindowLabel, WindowMode,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Temporal(#[from] TemporalError),
    #[error(transparent)]
    Global(#[from] GlobalError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub window_mode: WindowMode,
    pub zeta_grid: Vec<u32>,
    /// Inclusive range of ISO week numbers kept in the windowed outputs.
    pub weeks: Option<(u32, u32)>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            window_mode: WindowMode::IsoWeek,
            zeta_grid: (0..=DEFAULT_ZETA_MAX).collect(),
            weeks: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryResults {
    pub panel: CountryPanel,
    pub windows: Vec<MoodWindowScore>,
    pub profile: ThresholdProfile,
}

impl CountryResults {
    pub fn country(&self) -> &CountryCode {
        self.panel.country()
    }
}

/// Computes windowed scores and the threshold profile for one country.
pub fn analyze_country(
    panel: &CountryPanel,
    options: &AnalysisOptions,
) -> Result<CountryResults, PipelineError> {
    let mut windows = country_window_scores(panel, options.window_mode)?;
    if let Some((lo, hi)) = options.weeks {
        windows.retain(|w| (lo..=hi).contains(&w.label.iso_week_number()));
    }
    let profile = zeta_sweep(panel, &options.zeta_grid)?;
    Ok(CountryResults {
        panel: panel.clone(),
        windows,
        profile,
    })
}

/// One output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn index_label(country: &CountryCode, index_id: &str) -> String {
    format!("{country}/{index_id}")
}

/// Per-window ranking of countries by their country-level window value.
/// Countries without data in a window are left out of it.
pub fn weekly_rankings(results: &[CountryResults]) -> Result<Vec<WeeklyRanking>, ReportError> {
    let mut by_label: BTreeMap<WindowLabel, Vec<(CountryCode, f64)>> = BTreeMap::new();
    for r in results {
        for w in &r.windows {
            by_label
                .entry(w.label)
                .or_default()
                .push((r.country().clone(), w.country_value));
        }
    }
    by_label
        .into_iter()
        .map(|(label, scores)| rank_week(&scores, label.to_string()))
        .collect()
}

fn window_matrices(results: &[CountryResults]) -> Result<(Matrix, Matrix), ReportError> {
    let labels: BTreeSet<WindowLabel> = results
        .iter()
        .flat_map(|r| r.windows.iter().map(|w| w.label))
        .collect();
    let cols: Vec<WindowLabel> = labels.into_iter().collect();
    let col_labels: Vec<String> = cols.iter().map(ToString::to_string).collect();

    let mut idx_rows = Vec::new();
    let mut idx_cells = Vec::new();
    let mut cty_rows = Vec::new();
    let mut cty_cells = Vec::new();
    for r in results {
        let by_label: BTreeMap<WindowLabel, &MoodWindowScore> =
            r.windows.iter().map(|w| (w.label, w)).collect();
        cty_rows.push(r.country().to_string());
        cty_cells.extend(
            cols.iter()
                .map(|l| by_label.get(l).map(|w| w.country_value)),
        );
        for pair in r.panel.pairs() {
            let id = pair.index_id();
            idx_rows.push(index_label(r.country(), id));
            idx_cells.extend(cols.iter().map(|l| {
                by_label
                    .get(l)
                    .and_then(|w| w.per_index.iter().find(|(i, _)| i == id))
                    .map(|(_, v)| *v)
            }));
        }
    }
    Ok((
        Matrix::new("index", idx_rows, col_labels.clone(), idx_cells)?,
        Matrix::new("country", cty_rows, col_labels, cty_cells)?,
    ))
}

enum Indicator {
    H,
    R,
}

fn zeta_matrices(
    results: &[CountryResults],
    which: Indicator,
) -> Result<(Matrix, Matrix), ReportError> {
    let grid = results
        .first()
        .map(|r| r.profile.zeta_grid.clone())
        .unwrap_or_default();
    let col_labels: Vec<String> = grid.iter().map(ToString::to_string).collect();
    let mut idx_rows = Vec::new();
    let mut idx_cells = Vec::new();
    let mut cty_rows = Vec::new();
    let mut cty_cells = Vec::new();
    for r in results {
        let p = &r.profile;
        cty_rows.push(r.country().to_string());
        let country = match which {
            Indicator::H => &p.country_h,
            Indicator::R => &p.country_r,
        };
        cty_cells.extend(country.iter().map(|&v| Some(v)));
        for ix in &p.per_index {
            idx_rows.push(index_label(r.country(), &ix.index_id));
            let vals = match which {
                Indicator::H => &ix.h,
                Indicator::R => &ix.r,
            };
            idx_cells.extend(vals.iter().map(|f| Some(f.to_f64())));
        }
    }
    Ok((
        Matrix::new("index", idx_rows, col_labels.clone(), idx_cells)?,
        Matrix::new("country", cty_rows, col_labels, cty_cells)?,
    ))
}

struct StatsTable {
    w: csv::Writer<Vec<u8>>,
}

impl StatsTable {
    fn new() -> Self {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record([
            "table",
            "series",
            "n_obs",
            "min",
            "max",
            "mean",
            "std_dev_pop",
            "share_above_half",
            "share_below_half",
        ])
        .expect("write to Vec");
        Self { w }
    }

    fn row(
        &mut self,
        table: &str,
        series: &str,
        values: &[f64],
        unit: bool,
    ) -> Result<(), ReportError> {
        if values.is_empty() {
            return Ok(());
        }
        let s = summarize(values)?;
        let (above, below) = if unit {
            (
                format_value(fraction_beyond_half(values, Side::Above)?),
                format_value(fraction_beyond_half(values, Side::Below)?),
            )
        } else {
            (String::new(), String::new())
        };
        self.w
            .write_record([
                table,
                series,
                &s.n_obs.to_string(),
                &format_value(s.min),
                &format_value(s.max),
                &format_value(s.mean),
                &format_value(s.std_dev),
                &above,
                &below,
            ])
            .expect("write to Vec");
        Ok(())
    }

    fn finish(self) -> Vec<u8> {
        self.w.into_inner().expect("flush to Vec")
    }
}

fn summary_stats(results: &[CountryResults]) -> Result<Vec<u8>, ReportError> {
    let mut t = StatsTable::new();
    for r in results {
        let c = r.country().to_string();
        // Search values on the union of the country's trading grids.
        let mut search: BTreeMap<TradingDate, u8> = BTreeMap::new();
        for pair in r.panel.pairs() {
            search.extend(
                pair.dates()
                    .iter()
                    .copied()
                    .zip(pair.search().iter().copied()),
            );
        }
        let w: Vec<f64> = search.values().map(|&v| f64::from(v)).collect();
        t.row("search", &c, &w, false)?;
    }
    for r in results {
        for pair in r.panel.pairs() {
            let label = index_label(r.country(), pair.index_id());
            t.row("price_raw", &label, pair.raw_prices(), false)?;
            let norm: Vec<f64> = pair.prices().iter().map(|&v| f64::from(v)).collect();
            t.row("price_normalized", &label, &norm, false)?;
        }
    }
    for r in results {
        for pair in r.panel.pairs() {
            let id = pair.index_id();
            let vals: Vec<f64> = r
                .windows
                .iter()
                .filter_map(|w| w.per_index.iter().find(|(i, _)| i == id).map(|(_, v)| *v))
                .collect();
            t.row("A_index", &index_label(r.country(), id), &vals, true)?;
        }
    }
    for r in results {
        let vals: Vec<f64> = r.windows.iter().map(|w| w.country_value).collect();
        t.row("A_country", r.country().as_str(), &vals, true)?;
    }
    let fracs = |v: &[Fraction]| v.iter().map(|f| f.to_f64()).collect::<Vec<_>>();
    for (table, pick_h) in [("H", true), ("R", false)] {
        for r in results {
            for ix in &r.profile.per_index {
                let vals = fracs(if pick_h { &ix.h } else { &ix.r });
                t.row(
                    &format!("{table}_index"),
                    &index_label(r.country(), &ix.index_id),
                    &vals,
                    true,
                )?;
            }
        }
        for r in results {
            let vals = if pick_h {
                &r.profile.country_h
            } else {
                &r.profile.country_r
            };
            t.row(
                &format!("{table}_country"),
                r.country().as_str(),
                vals,
                true,
            )?;
        }
    }
    Ok(t.finish())
}

/// Pairs whose search series never reaches 100 on the trading grid.
fn pair_flags(results: &[CountryResults]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["country", "index_id", "flag", "detail"])
        .expect("write to Vec");
    for r in results {
        for pair in r.panel.pairs() {
            if pair.search_peak_missing() {
                let max = pair.search().iter().max().copied().unwrap_or(0);
                w.write_record([
                    r.country().as_str(),
                    pair.index_id(),
                    "SearchPeakOffGrid",
                    &format!("search maximum on trading days is {max}"),
                ])
                .expect("write to Vec");
            }
        }
    }
    w.into_inner().expect("flush to Vec")
}

/// Renders every report file, in a fixed order.
pub fn render_reports(results: &[CountryResults]) -> Result<Vec<ReportFile>, ReportError> {
    let mut files = Vec::new();
    let mut push = |name: &str, bytes: Vec<u8>| {
        files.push(ReportFile {
            name: name.to_owned(),
            bytes,
        })
    };

    let (a_idx, a_cty) = window_matrices(results)?;
    let (h_idx, h_cty) = zeta_matrices(results, Indicator::H)?;
    let (r_idx, r_cty) = zeta_matrices(results, Indicator::R)?;
    let matrices = [
        (
            "A_weekly_by_index",
            &a_idx,
            "Windowed mood index A per stock index",
        ),
        (
            "A_weekly_by_country",
            &a_cty,
            "Windowed mood index A per country",
        ),
        (
            "H_by_zeta",
            &h_idx,
            "Aggregated mood H per stock index by threshold",
        ),
        (
            "H_by_zeta_country",
            &h_cty,
            "Aggregated mood H per country by threshold",
        ),
        (
            "R_by_zeta",
            &r_idx,
            "Optimism/pessimism ratio R per stock index by threshold",
        ),
        (
            "R_by_zeta_country",
            &r_cty,
            "Optimism/pessimism ratio R per country by threshold",
        ),
    ];
    for (name, m, _) in &matrices {
        push(&format!("{name}.csv"), emit_matrix_csv(m));
    }
    push("rankings.csv", rankings_csv(&weekly_rankings(results)?));
    push("summary_stats.csv", summary_stats(results)?);
    push("pair_flags.csv", pair_flags(results));
    for (name, m, title) in &matrices {
        push(&format!("{name}.svg"), emit_heatmap_svg(m, title)?);
    }
    Ok(files)
}
