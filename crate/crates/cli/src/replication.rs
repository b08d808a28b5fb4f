//! Comparison of a run on the original 2020 panel against published
//! reference figures.
//!
//! The reference figures number weeks from Monday 2020-01-06 (week 1), one
//! behind ISO numbering, so weeks are selected here by their Monday.

use moodgauge_core::pipeline::CountryResults;
use moodgauge_core::temporal::WindowLabel;
use moodgauge_core::{CountryCode, TradingDate};

/// Allowed absolute deviation from a reference figure.
pub const TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub name: &'static str,
    pub reference: f64,
    pub observed: Option<f64>,
}

impl Comparison {
    pub fn within_tolerance(&self) -> bool {
        self.observed
            .is_some_and(|v| (v - self.reference).abs() <= TOLERANCE)
    }
}

fn window_of(results: &CountryResults, monday: TradingDate) -> Option<f64> {
    let week = monday.iso_week();
    results
        .windows
        .iter()
        .find(|w| match w.label {
            WindowLabel::Week(iw) => iw == week,
            WindowLabel::Start(d) => d.iso_week() == week,
        })
        .map(|w| w.country_value)
}

fn week_values(results: &[CountryResults], monday: TradingDate) -> Vec<f64> {
    results
        .iter()
        .filter_map(|r| window_of(r, monday))
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn at_zero(results: &[CountryResults], code: &str, h: bool) -> Option<f64> {
    let code = CountryCode::new(code).ok()?;
    let r = results.iter().find(|r| r.country() == &code)?;
    let i = r.profile.zeta_grid.iter().position(|&z| z == 0)?;
    Some(if h {
        r.profile.country_h[i]
    } else {
        r.profile.country_r[i]
    })
}

pub fn compare(results: &[CountryResults]) -> Vec<Comparison> {
    let week10 = TradingDate::from_ymd(2020, 3, 9).expect("valid date");
    let week11 = TradingDate::from_ymd(2020, 3, 16).expect("valid date");
    let w11 = week_values(results, week11);
    let breadth = (!w11.is_empty())
        .then(|| w11.iter().filter(|&&v| v < 0.5).count() as f64 / w11.len() as f64);
    vec![
        Comparison {
            name: "week 11 share of countries with A < 0.5",
            reference: 0.81,
            observed: breadth,
        },
        Comparison {
            name: "week 10 cross-country mean A",
            reference: 0.485,
            observed: mean(&week_values(results, week10)),
        },
        Comparison {
            name: "week 11 cross-country mean A",
            reference: 0.483,
            observed: mean(&w11),
        },
        Comparison {
            name: "ITA H at zeta 0",
            reference: 0.400,
            observed: at_zero(results, "ITA", true),
        },
        Comparison {
            name: "BHR H at zeta 0",
            reference: 0.559,
            observed: at_zero(results, "BHR", true),
        },
        Comparison {
            name: "ITA R at zeta 0",
            reference: 0.421,
            observed: at_zero(results, "ITA", false),
        },
        Comparison {
            name: "BHR R at zeta 0",
            reference: 0.565,
            observed: at_zero(results, "BHR", false),
        },
    ]
}

pub fn format_table(rows: &[Comparison]) -> String {
    let mut out = String::from("check,reference,observed,within_tolerance\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.name,
            r.reference,
            r.observed.map_or("n/a".to_owned(), |v| format!("{v:.3}")),
            r.within_tolerance()
        ));
    }
    out
}
