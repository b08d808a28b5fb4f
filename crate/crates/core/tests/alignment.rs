use chrono::{Duration, NaiveDate};
use moodgauge_core::ingestion::{align, trim_to_first_nonnull, IngestError};
use moodgauge_core::{CountryCode, Observation, ObservationSeries, SeriesKind, TradingDate};
use proptest::prelude::*;

fn day(offset: usize) -> TradingDate {
    TradingDate::new(NaiveDate::from_ymd_opt(2020, 1, 6).unwrap() + Duration::days(offset as i64))
}

fn search_series(days: &[(usize, u8)]) -> ObservationSeries {
    ObservationSeries::new(
        SeriesKind::Search,
        days.iter()
            .map(|&(d, v)| Observation {
                date: day(d),
                value: f64::from(v),
            })
            .collect(),
    )
    .unwrap()
}

fn price_series(days: &[(usize, f64)]) -> ObservationSeries {
    ObservationSeries::new(
        SeriesKind::Price,
        days.iter()
            .map(|&(d, v)| Observation {
                date: day(d),
                value: v,
            })
            .collect(),
    )
    .unwrap()
}

/// Offsets in `0..span` kept with the given mask, each with a value.
fn dated<T: Clone + std::fmt::Debug>(
    span: usize,
    value: impl Strategy<Value = T> + Clone,
) -> impl Strategy<Value = Vec<(usize, T)>> {
    prop::collection::vec((any::<bool>(), value), span).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .filter(|(_, (keep, _))| *keep)
            .map(|(i, (_, x))| (i, x))
            .collect()
    })
}

enum Expected {
    Grid(Vec<usize>),
    Gap,
    TooShort,
}

/// Naive restatement: every price day inside the search coverage must have a
/// search row; the grid then starts at the first such day with a nonzero
/// search value.
fn oracle(search: &[(usize, u8)], price: &[(usize, f64)]) -> Expected {
    let first = search[0].0;
    let last = search[search.len() - 1].0;
    let mut grid = Vec::new();
    for &(d, _) in price {
        if d < first || d > last {
            continue;
        }
        let hit = search.iter().find(|(sd, _)| *sd == d);
        match hit {
            None => return Expected::Gap,
            Some(&(_, v)) => {
                if grid.is_empty() && v == 0 {
                    continue;
                }
                grid.push(d);
            }
        }
    }
    if grid.len() < 2 {
        Expected::TooShort
    } else {
        Expected::Grid(grid)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn grid_is_brute_force_intersection(
        search in dated(20, 0u8..=100),
        price in dated(24, 1.0f64..500.0),
    ) {
        prop_assume!(!search.is_empty() && !price.is_empty());
        let country = CountryCode::new("ITA").unwrap();
        let got = align(&country, "IX", &search_series(&search), &price_series(&price));
        match (oracle(&search, &price), got) {
            (Expected::Grid(days), Ok(pair)) => {
                let want: Vec<TradingDate> = days.iter().map(|&d| day(d)).collect();
                prop_assert_eq!(pair.dates(), want.as_slice());
                for (i, d) in days.iter().enumerate() {
                    let v = search.iter().find(|(sd, _)| sd == d).unwrap().1;
                    prop_assert_eq!(pair.search()[i], v);
                }
            }
            (Expected::Gap, Err(IngestError::MissingSearchValue(_))) => {}
            (Expected::TooShort, Err(IngestError::InsufficientOverlap(_))) => {}
            (Expected::TooShort, Err(IngestError::AllZeroPrices)) => {}
            (Expected::Grid(_), Err(IngestError::AllZeroPrices)) => {}
            (_, other) => prop_assert!(false, "unexpected outcome {:?}", other.map(|p| p.len())),
        }
    }

    #[test]
    fn trim_commutes_with_alignment(
        values in prop::collection::vec(prop_oneof![Just(0u8), 0u8..=100], 2..25),
        price in dated(30, 1.0f64..500.0),
    ) {
        prop_assume!(!price.is_empty());
        let search: Vec<(usize, u8)> = values.iter().copied().enumerate().collect();
        let s = search_series(&search);
        let p = price_series(&price);
        let country = CountryCode::new("ITA").unwrap();
        let Ok(trimmed) = trim_to_first_nonnull(&s) else {
            prop_assert!(values.iter().all(|&v| v == 0));
            return Ok(());
        };
        let a = align(&country, "IX", &trimmed, &p);
        let b = align(&country, "IX", &s, &p);
        match (a, b) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(x), Err(y)) => prop_assert_eq!(x.code(), y.code()),
            (x, y) => prop_assert!(false, "diverged: {:?} vs {:?}", x.is_ok(), y.is_ok()),
        }
    }
}
