//! Threshold sign variations and the whole-period indicators built on them.
//!
//! Both `H` and `R` are ratios of integers with denominators fixed by `T`, so
//! they are computed as exact [`Fraction`]s and converted to `f64` once.

use thiserror::Error;

use crate::model::{AlignedPair, CountryPanel, Fraction, ModelError, MoodLabel};
use crate::temporal::unit_checked;

/// Thresholds swept by default: `0, 1, …, 50`.
pub const DEFAULT_ZETA_MAX: u32 = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GlobalError {
    #[error("step {t} outside 1..={max}")]
    IndexOutOfRange { t: usize, max: usize },
    #[error("joint variation {0} outside -2..=2")]
    OutOfDomain(i8),
    #[error("cannot average an empty list")]
    EmptyList,
    #[error("bad threshold grid: {0}")]
    BadGrid(&'static str),
    #[error("value {0} outside [0,1]")]
    OutOfUnitRange(f64),
}

/// Direction of the step `x(t) → x(t+1)` at threshold `zeta`, for 1-based
/// `t` in `1..=T-1`. Changes of magnitude exactly `zeta` count as flat.
pub fn sign_variation(x: &[u8], t: usize, zeta: u32) -> Result<i8, GlobalError> {
    if t < 1 || t >= x.len() {
        return Err(GlobalError::IndexOutOfRange {
            t,
            max: x.len().saturating_sub(1),
        });
    }
    Ok(step_sign(x[t - 1], x[t], zeta))
}

fn step_sign(from: u8, to: u8, zeta: u32) -> i8 {
    let diff = i64::from(to) - i64::from(from);
    let zeta = i64::from(zeta);
    if diff > zeta {
        1
    } else if diff < -zeta {
        -1
    } else {
        0
    }
}

/// Joint variation `δ(w) − δ(p̄)` at step `t`.
pub fn delta(pair: &AlignedPair, t: usize, zeta: u32) -> Result<i8, GlobalError> {
    Ok(sign_variation(pair.search(), t, zeta)? - sign_variation(pair.prices(), t, zeta)?)
}

/// Joint variations for every step `t = 1..T-1`.
pub fn joint_variations(pair: &AlignedPair, zeta: u32) -> Vec<i8> {
    let w = pair.search();
    let p = pair.prices();
    (1..pair.len())
        .map(|i| step_sign(w[i - 1], w[i], zeta) - step_sign(p[i - 1], p[i], zeta))
        .collect()
}

pub fn classify_delta(d: i8) -> Result<MoodLabel, GlobalError> {
    MoodLabel::try_from(d).map_err(|e| match e {
        ModelError::OutOfDomain(v) => GlobalError::OutOfDomain(v),
        _ => unreachable!("MoodLabel conversion only fails with OutOfDomain"),
    })
}

/// Aggregated mood `(Σ Δ + 2(T−1)) / (4(T−1))`.
pub fn h_exact(pair: &AlignedPair, zeta: u32) -> Fraction {
    let steps = (pair.len() - 1) as i128;
    let sum: i128 = joint_variations(pair, zeta)
        .iter()
        .map(|&d| i128::from(d))
        .sum();
    Fraction::new(sum + 2 * steps, 4 * steps)
}

/// Optimism/pessimism ratio `(n⁺ − n⁻ + (T−1)) / (2(T−1))`, where `n⁺`
/// and `n⁻` count steps with `Δ = +2` and `Δ = −2`.
pub fn r_exact(pair: &AlignedPair, zeta: u32) -> Fraction {
    let steps = (pair.len() - 1) as i128;
    let (mut up, mut down) = (0i128, 0i128);
    for d in joint_variations(pair, zeta) {
        match d {
            2 => up += 1,
            -2 => down += 1,
            _ => {}
        }
    }
    Fraction::new(up - down + steps, 2 * steps)
}

pub fn h_index(pair: &AlignedPair, zeta: u32) -> f64 {
    h_exact(pair, zeta).to_f64()
}

pub fn r_index(pair: &AlignedPair, zeta: u32) -> f64 {
    r_exact(pair, zeta).to_f64()
}

/// Mean of per-index values for one country.
pub fn country_mean(values: &[f64]) -> Result<f64, GlobalError> {
    if values.is_empty() {
        return Err(GlobalError::EmptyList);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    unit_checked(mean).map_err(|_| GlobalError::OutOfUnitRange(mean))
}

/// `lo..=hi` as a validated grid.
pub fn zeta_range(lo: u32, hi: u32) -> Result<Vec<u32>, GlobalError> {
    let grid: Vec<u32> = (lo..=hi).collect();
    validate_grid(&grid)?;
    Ok(grid)
}

pub fn validate_grid(grid: &[u32]) -> Result<(), GlobalError> {
    if grid.is_empty() {
        return Err(GlobalError::BadGrid("empty"));
    }
    if grid.iter().any(|&z| z > 100) {
        return Err(GlobalError::BadGrid("threshold above 100"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GlobalError::BadGrid("not strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexProfile {
    pub index_id: String,
    /// One entry per grid threshold.
    pub h: Vec<Fraction>,
    pub r: Vec<Fraction>,
}

/// `H` and `R` over a threshold grid, per index and averaged per country.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdProfile {
    pub zeta_grid: Vec<u32>,
    pub per_index: Vec<IndexProfile>,
    pub country_h: Vec<f64>,
    pub country_r: Vec<f64>,
}

pub fn zeta_sweep(panel: &CountryPanel, grid: &[u32]) -> Result<ThresholdProfile, GlobalError> {
    validate_grid(grid)?;
    let per_index: Vec<IndexProfile> = panel
        .pairs()
        .iter()
        .map(|pair| IndexProfile {
            index_id: pair.index_id().to_owned(),
            h: grid.iter().map(|&z| h_exact(pair, z)).collect(),
            r: grid.iter().map(|&z| r_exact(pair, z)).collect(),
        })
        .collect();

    let mut country_h = Vec::with_capacity(grid.len());
    let mut country_r = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let hs: Vec<f64> = per_index.iter().map(|p| p.h[i].to_f64()).collect();
        let rs: Vec<f64> = per_index.iter().map(|p| p.r[i].to_f64()).collect();
        country_h.push(country_mean(&hs)?);
        country_r.push(country_mean(&rs)?);
    }
    Ok(ThresholdProfile {
        zeta_grid: grid.to_vec(),
        per_index,
        country_h,
        country_r,
    })
}
