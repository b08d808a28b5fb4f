use moodgauge_core::global::{classify_delta, h_exact, joint_variations, r_exact};
use moodgauge_core::normalization::normalize_prices;
use moodgauge_core::temporal::{mood_window_exact, pair_aggregates};
use moodgauge_core::{AlignedPair, Fraction, MoodLabel};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use proptest::prelude::*;

/// Integer series in [0,100] with a 100 somewhere and a nonzero first value.
fn series(len: usize) -> impl Strategy<Value = Vec<u8>> {
    (prop::collection::vec(0u8..=100, len), 0..len).prop_map(|(mut v, peak)| {
        v[peak] = 100;
        if v[0] == 0 {
            v[0] = 1;
        }
        v
    })
}

fn pair_strategy() -> impl Strategy<Value = AlignedPair> {
    (2usize..60)
        .prop_flat_map(|t| (series(t), series(t)))
        .prop_map(|(w, p)| AlignedPair::from_values(w, p).unwrap())
}

/// Cut points splitting 1..=t into contiguous windows.
fn partition(t: usize, cuts: &[usize]) -> Vec<(usize, usize)> {
    let mut bounds: Vec<usize> = cuts.iter().map(|c| c % t).filter(|&c| c > 0).collect();
    bounds.sort_unstable();
    bounds.dedup();
    let mut out = Vec::new();
    let mut start = 1;
    for b in bounds {
        out.push((start, b));
        start = b + 1;
    }
    out.push((start, t));
    out
}

fn rational_floor_oracle(raw: &[f64]) -> Vec<u8> {
    let max = raw.iter().copied().fold(0.0, f64::max);
    let max = BigRational::from_f64(max).unwrap();
    raw.iter()
        .map(|&v| {
            let q = BigRational::from_f64(v).unwrap()
                * BigRational::from_integer(BigInt::from(100))
                / &max;
            q.floor().to_integer().to_u8().unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalization_matches_rational_floor(raw in prop::collection::vec(0.0f64..1e6, 1..40)) {
        prop_assume!(raw.iter().any(|&v| v > 0.0));
        let n = normalize_prices(&raw).unwrap();
        let expected = rational_floor_oracle(&raw);
        prop_assert_eq!(n.values(), expected.as_slice());
        prop_assert_eq!(n.values()[n.argmax_index()], 100);
    }

    #[test]
    fn normalization_scale_invariant_for_powers_of_two(
        raw in prop::collection::vec(1e-3f64..1e6, 1..40),
        exp in -8i32..8,
    ) {
        let c = 2f64.powi(exp);
        let scaled: Vec<f64> = raw.iter().map(|v| v * c).collect();
        prop_assert_eq!(normalize_prices(&raw).unwrap(), normalize_prices(&scaled).unwrap());
    }

    #[test]
    fn normalization_monotone(raw in prop::collection::vec(0.0f64..1e4, 2..40)) {
        prop_assume!(raw.iter().any(|&v| v > 0.0));
        let n = normalize_prices(&raw).unwrap();
        for a in 0..raw.len() {
            for b in 0..raw.len() {
                if raw[a] <= raw[b] {
                    prop_assert!(n.values()[a] <= n.values()[b]);
                }
            }
        }
    }

    #[test]
    fn normalization_idempotent(v in series(30)) {
        let raw: Vec<f64> = v.iter().map(|&x| f64::from(x)).collect();
        let n = normalize_prices(&raw).unwrap();
        prop_assert_eq!(n.values(), v.as_slice());
    }

    #[test]
    fn window_additivity(pair in pair_strategy(), cuts in prop::collection::vec(0usize..1000, 0..10)) {
        let agg = pair_aggregates(&pair).unwrap();
        let parts = partition(pair.len(), &cuts);
        // Windows of one pair share the denominator 2·P̄·W, so Σ (A_i − ½) = 0
        // reduces to Σ (2·num_i − den) = 0.
        let den = 2 * agg.price_total as i128 * agg.search_total as i128;
        let mut excess = 0i128;
        for (t1, t2) in &parts {
            let a = mood_window_exact(&pair, &agg, *t1, *t2).unwrap();
            prop_assert_eq!(a.denominator(), den);
            excess += 2 * a.numerator() - den;
            prop_assert!((0.0..=1.0).contains(&a.to_f64()));
        }
        prop_assert_eq!(excess, 0);
    }

    #[test]
    fn window_antisymmetry(pair in pair_strategy(), cuts in prop::collection::vec(0usize..1000, 0..6)) {
        let swapped = pair.swapped().unwrap();
        let agg = pair_aggregates(&pair).unwrap();
        let agg_s = pair_aggregates(&swapped).unwrap();
        for (t1, t2) in partition(pair.len(), &cuts) {
            let a = mood_window_exact(&pair, &agg, t1, t2).unwrap();
            let b = mood_window_exact(&swapped, &agg_s, t1, t2).unwrap();
            prop_assert_eq!(b, a.complement());
        }
    }

    #[test]
    fn window_monotone_response(
        pair in pair_strategy(),
        t1 in 1usize..60,
        width in 0usize..10,
        inside in 0usize..60,
        outside in 0usize..60,
    ) {
        let t = pair.len();
        let t1 = 1 + (t1 - 1) % t;
        let t2 = (t1 + width).min(t);
        let s = t1 - 1 + inside % (t2 - t1 + 1);
        let outs: Vec<usize> = (0..t).filter(|&u| u + 1 < t1 || u + 1 > t2).collect();
        prop_assume!(!outs.is_empty());
        let u = outs[outside % outs.len()];
        let mut w = pair.search().to_vec();
        prop_assume!(w[s] < 100 && w[u] > 0 && !(u == 0 && w[u] == 1));
        prop_assume!(w[u] < 100 || w.iter().filter(|&&x| x == 100).count() > 1);
        w[s] += 1;
        w[u] -= 1;
        let bumped = AlignedPair::from_values(w, pair.prices().to_vec()).unwrap();
        let before = mood_window_exact(&pair, &pair_aggregates(&pair).unwrap(), t1, t2).unwrap();
        let after = mood_window_exact(&bumped, &pair_aggregates(&bumped).unwrap(), t1, t2).unwrap();
        prop_assert!(after < before);
    }

    #[test]
    fn global_swap_antisymmetry(pair in pair_strategy(), zeta in 0u32..=100) {
        let swapped = pair.swapped().unwrap();
        let d: Vec<i8> = joint_variations(&pair, zeta);
        let ds: Vec<i8> = joint_variations(&swapped, zeta);
        prop_assert!(d.iter().zip(&ds).all(|(a, b)| *a == -*b));
        prop_assert_eq!(h_exact(&swapped, zeta), h_exact(&pair, zeta).complement());
        prop_assert_eq!(r_exact(&swapped, zeta), r_exact(&pair, zeta).complement());
    }

    #[test]
    fn global_saturation(pair in pair_strategy()) {
        let step = |x: &[u8]| x.windows(2).map(|s| (i32::from(s[1]) - i32::from(s[0])).unsigned_abs()).max().unwrap();
        let zeta = step(pair.search()).max(step(pair.prices()));
        for z in [zeta, zeta + 1, 100] {
            prop_assert_eq!(h_exact(&pair, z), Fraction::half());
            prop_assert_eq!(r_exact(&pair, z), Fraction::half());
        }
    }

    #[test]
    fn activity_nonincreasing_in_zeta(pair in pair_strategy()) {
        let active = |x: &[u8], z: u32| (1..x.len())
            .filter(|&t| moodgauge_core::global::sign_variation(x, t, z).unwrap() != 0)
            .count();
        for x in [pair.search(), pair.prices()] {
            for z in 0..100 {
                prop_assert!(active(x, z + 1) <= active(x, z));
            }
        }
    }

    #[test]
    fn h_equals_label_weighted_counts(pair in pair_strategy(), zeta in 0u32..=60) {
        let steps = (pair.len() - 1) as i128;
        let mut counts = std::collections::HashMap::new();
        for d in joint_variations(&pair, zeta) {
            *counts.entry(classify_delta(d).unwrap()).or_insert(0i128) += 1;
        }
        let n = |l| counts.get(&l).copied().unwrap_or(0);
        let weighted = -2 * n(MoodLabel::StrongOptimism) - n(MoodLabel::MildOptimism)
            + n(MoodLabel::MildPessimism)
            + 2 * n(MoodLabel::StrongPessimism);
        prop_assert_eq!(h_exact(&pair, zeta), Fraction::new(weighted + 2 * steps, 4 * steps));
    }

    #[test]
    fn indicators_ignore_step_order(
        deltas in prop::collection::vec(-2i8..=2, 1..44),
        seed in any::<u64>(),
    ) {
        let mut order: Vec<usize> = (0..deltas.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted: Vec<i8> = order.iter().map(|&i| deltas[i]).collect();
        let a = realize(&deltas);
        let b = realize(&permuted);
        prop_assert_eq!(h_exact(&a, 0), h_exact(&b, 0));
        prop_assert_eq!(r_exact(&a, 0), r_exact(&b, 0));
    }
}

/// A pair whose joint variations at threshold 0 are `deltas`, preceded by
/// one fixed step from the price peak.
fn realize(deltas: &[i8]) -> AlignedPair {
    let mut w = vec![50u8, 50];
    let mut p = vec![100u8, 50];
    for &d in deltas {
        let (dw, dp): (i8, i8) = match d {
            2 => (1, -1),
            1 => (1, 0),
            0 => (0, 0),
            -1 => (0, 1),
            _ => (-1, 1),
        };
        w.push(w.last().unwrap().wrapping_add_signed(dw));
        p.push(p.last().unwrap().wrapping_add_signed(dp));
    }
    let pair = AlignedPair::from_values(w, p).unwrap();
    assert_eq!(&joint_variations(&pair, 0)[1..], deltas);
    pair
}
