//! Rankings, summary statistics and matrix serialization (CSV and SVG).
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! emitting, parsing and re-emitting a file reproduces it byte for byte.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::CountryCode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("input is empty")]
    EmptyInput,
    #[error("shape mismatch: {rows} rows × {cols} cols but {cells} cells")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        cells: usize,
    },
    #[error("cell ({row},{col}) is {value}, expected a finite value in [0,1]")]
    NonFiniteCell { row: usize, col: usize, value: f64 },
    #[error("duplicate country {0} in ranking input")]
    DuplicateCountry(CountryCode),
    #[error("matrix csv: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub rank: usize,
    pub country: CountryCode,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeklyRanking {
    pub week: String,
    pub entries: Vec<RankEntry>,
}

/// Orders countries by descending value, breaking ties by ascending code.
pub fn rank_week(
    scores: &[(CountryCode, f64)],
    week: impl Into<String>,
) -> Result<WeeklyRanking, ReportError> {
    if scores.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let mut seen = HashSet::new();
    for (c, _) in scores {
        if !seen.insert(c) {
            return Err(ReportError::DuplicateCountry(c.clone()));
        }
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(WeeklyRanking {
        week: week.into(),
        entries: sorted
            .into_iter()
            .enumerate()
            .map(|(i, (country, value))| RankEntry {
                rank: i + 1,
                country,
                value,
            })
            .collect(),
    })
}

/// `week,rank,country,value`, one row per ranked country.
pub fn rankings_csv(rankings: &[WeeklyRanking]) -> Vec<u8> {
    let mut w = csv_writer();
    w.write_record(["week", "rank", "country", "value"])
        .expect("write to Vec");
    for r in rankings {
        for e in &r.entries {
            w.write_record([
                r.week.as_str(),
                &e.rank.to_string(),
                e.country.as_str(),
                &format_value(e.value),
            ])
            .expect("write to Vec");
        }
    }
    w.into_inner().expect("flush to Vec")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n_obs: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation (divisor `n`).
    pub std_dev: f64,
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats, ReportError> {
    if values.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let n = values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (values.iter().sum::<f64>() / n).clamp(min, max);
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(SummaryStats {
        n_obs: values.len(),
        min,
        max,
        mean,
        std_dev: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// Share of values strictly above (or below) ½.
pub fn fraction_beyond_half(values: &[f64], side: Side) -> Result<f64, ReportError> {
    if values.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let hits = values
        .iter()
        .filter(|&&v| match side {
            Side::Above => v > 0.5,
            Side::Below => v < 0.5,
        })
        .count();
    Ok(hits as f64 / values.len() as f64)
}

/// A labelled row-major matrix whose cells may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    /// Header of the row-label column.
    pub corner: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    cells: Vec<Option<f64>>,
}

impl Matrix {
    pub fn new(
        corner: impl Into<String>,
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        cells: Vec<Option<f64>>,
    ) -> Result<Self, ReportError> {
        if cells.len() != row_labels.len() * col_labels.len() {
            return Err(ReportError::ShapeMismatch {
                rows: row_labels.len(),
                cols: col_labels.len(),
                cells: cells.len(),
            });
        }
        Ok(Self {
            corner: corner.into(),
            row_labels,
            col_labels,
            cells,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.col_labels.len() + col]
    }

    pub fn cells(&self) -> &[Option<f64>] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let n = self.col_labels.len();
        &self.cells[row * n..(row + 1) * n]
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v}")
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

/// RFC-4180 CSV: header row of column labels, one row per matrix row,
/// absent cells left empty.
pub fn emit_matrix_csv(m: &Matrix) -> Vec<u8> {
    let mut w = csv_writer();
    let header = std::iter::once(m.corner.as_str()).chain(m.col_labels.iter().map(String::as_str));
    w.write_record(header).expect("write to Vec");
    for (i, label) in m.row_labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(
            m.row(i)
                .iter()
                .map(|c| c.map(format_value).unwrap_or_default()),
        );
        w.write_record(&rec).expect("write to Vec");
    }
    w.into_inner().expect("flush to Vec")
}

pub fn parse_matrix_csv(bytes: &[u8]) -> Result<Matrix, ReportError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let header = r.headers().map_err(|e| ReportError::Parse(e.to_string()))?;
    let corner = header.get(0).unwrap_or_default().to_owned();
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| ReportError::Parse(e.to_string()))?;
        row_labels.push(rec[0].to_owned());
        for field in rec.iter().skip(1) {
            cells.push(if field.is_empty() {
                None
            } else {
                Some(
                    field
                        .parse()
                        .map_err(|_| ReportError::Parse(format!("bad number {field:?}")))?,
                )
            });
        }
    }
    Matrix::new(corner, row_labels, col_labels, cells)
}

const LOW: [f64; 3] = [33.0, 102.0, 172.0];
const MID: [f64; 3] = [247.0, 247.0, 247.0];
const HIGH: [f64; 3] = [178.0, 24.0, 43.0];

/// Diverging scale: 0 blue, ½ near-white, 1 red.
pub fn diverging_color(v: f64) -> [u8; 3] {
    let v = v.clamp(0.0, 1.0);
    let (from, to, t) = if v < 0.5 {
        (LOW, MID, v / 0.5)
    } else {
        (MID, HIGH, (v - 0.5) / 0.5)
    };
    let mut out = [0u8; 3];
    for i in 0..3 {
        out[i] = (from[i] + (to[i] - from[i]) * t).round() as u8;
    }
    out
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const CELL: usize = 14;
const CHAR_W: usize = 7;
const LEGEND_STEPS: usize = 21;

/// Renders a standalone SVG heatmap with one `<rect>` per cell.
pub fn emit_heatmap_svg(m: &Matrix, title: &str) -> Result<Vec<u8>, ReportError> {
    let ncols = m.col_labels.len();
    for (i, c) in m.cells.iter().enumerate() {
        if let Some(v) = *c {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(ReportError::NonFiniteCell {
                    row: i / ncols.max(1),
                    col: i % ncols.max(1),
                    value: v,
                });
            }
        }
    }

    let label_w = m
        .row_labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        * CHAR_W
        + 10;
    let header_h = m
        .col_labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        * CHAR_W
        + 30;
    let grid_w = ncols * CELL;
    let grid_h = m.row_labels.len() * CELL;
    let legend_y = header_h + grid_h + 20;
    let width = (label_w + grid_w + 20).max(LEGEND_STEPS * 10 + label_w + 60);
    let height = legend_y + 40;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape_xml(title));
    let _ = writeln!(
        s,
        r#"<text x="{label_w}" y="14" font-size="12">{}</text>"#,
        escape_xml(title)
    );

    for (j, label) in m.col_labels.iter().enumerate() {
        let x = label_w + j * CELL + CELL / 2 + 3;
        let y = header_h - 4;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" transform="rotate(-90 {x} {y})">{}</text>"#,
            escape_xml(label)
        );
    }
    for (i, label) in m.row_labels.iter().enumerate() {
        let y = header_h + i * CELL + CELL - 3;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#,
            label_w - 4,
            escape_xml(label)
        );
    }
    for i in 0..m.row_labels.len() {
        for j in 0..ncols {
            let x = label_w + j * CELL;
            let y = header_h + i * CELL;
            match m.get(i, j) {
                Some(v) => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>{} {}: {}</title></rect>"#,
                        hex(diverging_color(v)),
                        escape_xml(&m.row_labels[i]),
                        escape_xml(&m.col_labels[j]),
                        format_value(v)
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r#"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="none"/>"#
                    );
                }
            }
        }
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for k in 0..LEGEND_STEPS {
        let v = k as f64 / (LEGEND_STEPS - 1) as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{legend_y}" width="10" height="12" fill="{}"/>"#,
            label_w + k * 10,
            hex(diverging_color(v))
        );
    }
    for (v, k) in [("0", 0), ("0.5", LEGEND_STEPS / 2), ("1", LEGEND_STEPS - 1)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{v}</text>"#,
            label_w + k * 10 + 5,
            legend_y + 24
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    Ok(s.into_bytes())
}
