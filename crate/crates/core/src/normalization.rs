//! Closing prices mapped to integers in `[0,100]`:
//! `p̄(t) = floor(100 · p(t) / max p)`.
//!
//! The floor is computed exactly. A float quotient only supplies a candidate
//! which is then corrected by comparing `q · max` against `100 · p(t)` in
//! integer arithmetic over the binary expansions of the two doubles.

use std::cmp::Ordering;

use thiserror::Error;

use crate::model::{ModelError, NormalizedSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizationError {
    #[error("price series is empty")]
    Empty,
    #[error("all prices are zero")]
    AllZeroPrices,
    #[error("price {value} at position {index} is negative or not finite")]
    InvalidPrice { index: usize, value: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn normalize_prices(raw: &[f64]) -> Result<NormalizedSeries, NormalizationError> {
    if raw.is_empty() {
        return Err(NormalizationError::Empty);
    }
    if let Some((index, &value)) = raw
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(NormalizationError::InvalidPrice { index, value });
    }

    let mut argmax = 0;
    for (i, &v) in raw.iter().enumerate() {
        if v > raw[argmax] {
            argmax = i;
        }
    }
    let max = raw[argmax];
    if max == 0.0 {
        return Err(NormalizationError::AllZeroPrices);
    }

    let values = raw.iter().map(|&v| scaled_floor(v, max)).collect();
    Ok(NormalizedSeries::new(values, argmax)?)
}

/// `floor(100 · value / max)` for `0 <= value <= max`, `max > 0`.
fn scaled_floor(value: f64, max: f64) -> u8 {
    if value == max {
        return 100;
    }
    if value == 0.0 {
        return 0;
    }
    let (vm, ve) = decode(value);
    let (mm, me) = decode(max);
    let target = (u128::from(vm) * 100, ve);
    // q · max <= 100 · value  <=>  q <= 100 · value / max
    let fits =
        |q: u32| cmp_dyadic((u128::from(mm) * u128::from(q), me), target) != Ordering::Greater;

    let mut q = ((100.0 * value) / max).floor().clamp(0.0, 100.0) as u32;
    while q > 0 && !fits(q) {
        q -= 1;
    }
    while q < 100 && fits(q + 1) {
        q += 1;
    }
    q as u8
}

/// Mantissa and exponent with `x = mantissa · 2^exponent`, for finite `x >= 0`.
fn decode(x: f64) -> (u64, i32) {
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    }
}

/// Compares `a.0 · 2^a.1` with `b.0 · 2^b.1` exactly.
fn cmp_dyadic(a: (u128, i32), b: (u128, i32)) -> Ordering {
    match (a.0 == 0, b.0 == 0) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let bitlen = |m: u128| 128 - m.leading_zeros() as i32;
    let mag_a = bitlen(a.0) + a.1;
    let mag_b = bitlen(b.0) + b.1;
    if mag_a != mag_b {
        return mag_a.cmp(&mag_b);
    }
    // Equal magnitudes bound the shift by the mantissa widths, so it fits.
    if a.1 >= b.1 {
        (a.0 << (a.1 - b.1)).cmp(&b.0)
    } else {
        a.0.cmp(&(b.0 << (b.1 - a.1)))
    }
}
