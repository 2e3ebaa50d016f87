//! Reference data sets: the 2015 event-day sentiment sequences against the
//! index, and a seeded crash-drill scenario.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::PriceSeries;
use crate::strategy::StrategyDay;

/// Number of event days in the 2015 sample.
pub const IC_EVENT_DAYS: usize = 23;

/// Daily index percentage change on each event day.
pub const IC_INDEX_PCT: [f64; IC_EVENT_DAYS] = [
    0.87, -2.00, -3.47, 1.65, -3.67, -6.42, 2.19, 2.48, -3.46, -7.40, -3.34, 0.00, -5.23, -3.48,
    -5.77, 2.41, -1.29, 5.76, 4.54, 1.04, 2.41, -0.34, -3.03,
];

/// Sentiment scored by the full cognitive pipeline.
pub const IC_SENTIMENT_A: [f64; IC_EVENT_DAYS] = [
    -0.85, -0.96, -0.89, 0.05, -0.73, -0.96, -0.07, -0.07, -0.91, -0.98, -0.82, 0.23, -0.92, -0.95,
    -0.96, -0.85, -0.97, -0.05, 0.88, -0.31, 0.25, -0.73, -0.96,
];

/// Sentiment scored by a general-purpose model without the cognitive layer.
pub const IC_SENTIMENT_B: [f64; IC_EVENT_DAYS] = [
    -0.81, -0.96, -0.82, 0.04, -0.83, -0.96, 0.08, -0.05, -0.93, -0.98, -0.90, 0.23, -0.94, -0.97,
    -0.98, -0.95, -0.97, -0.02, 0.88, -0.25, 0.28, -0.68, -0.97,
];

/// Dictionary-based sentiment.
pub const IC_SENTIMENT_C: [f64; IC_EVENT_DAYS] = [
    0.45, 0.15, 0.05, 0.28, -0.55, -0.45, -0.85, -0.82, 0.05, -0.75, -0.92, 0.1, 0.35, -0.88,
    -0.95, -0.85, -0.75, -0.6, -0.8, -0.9, -0.45, 0.1, 0.82,
];

/// Reported information coefficients for A, B and C.
pub const IC_REPORTED: [f64; 3] = [0.761, 0.757, -0.121];

/// IC fixture as CSV: `day,index_pct,sentiment_a,sentiment_b,sentiment_c`.
pub fn ic_csv() -> String {
    let mut out = String::from("day,index_pct,sentiment_a,sentiment_b,sentiment_c\n");
    for i in 0..IC_EVENT_DAYS {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            IC_INDEX_PCT[i],
            IC_SENTIMENT_A[i],
            IC_SENTIMENT_B[i],
            IC_SENTIMENT_C[i]
        ));
    }
    out
}

pub const CRASH_DRILL_DAYS: usize = 30;
pub const CRASH_DAY: usize = 20;
pub const CRASH_RETURN: f64 = -0.08;

/// A synthetic window with one -8% day. Novice fear crosses the stop level
/// the day before the crash and fades over the following week. Quiet days
/// move between -0.3% and +0.5%.
#[derive(Debug, Clone)]
pub struct CrashDrill {
    pub prices: PriceSeries,
    pub days: Vec<StrategyDay>,
}

pub fn crash_drill(seed: u64) -> CrashDrill {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2015, 6, 1).expect("valid date");
    let dates: Vec<NaiveDate> = (0..CRASH_DRILL_DAYS as u64)
        .map(|i| start + Days::new(i))
        .collect();

    let mut level = 3000.0;
    let mut closes = Vec::with_capacity(CRASH_DRILL_DAYS);
    for t in 0..CRASH_DRILL_DAYS {
        if t > 0 {
            let r = if t == CRASH_DAY {
                CRASH_RETURN
            } else {
                rng.random_range(-0.003..0.005)
            };
            level *= 1.0 + r;
        }
        closes.push(level);
    }
    let prices = PriceSeries::from_closes(&dates, &closes).expect("positive synthetic prices");

    let days = dates
        .iter()
        .enumerate()
        .map(|(t, &date)| {
            let fear = if t + 1 < CRASH_DAY {
                rng.random_range(0.05..0.2)
            } else {
                let since = (t + 1 - CRASH_DAY) as f64;
                0.45 * (1.0 + since).powf(-0.32)
            };
            let entry = t == 0;
            StrategyDay {
                date,
                novice_fear: fear,
                novice_valence: -fear,
                mdi: if entry { 0.10 } else { 0.45 },
                mcfi: if entry { 0.48 } else { 0.2 },
                v_mdi: if t == 0 { None } else { Some(0.01) },
                h_fear: 0.0,
                veteran_momentum: None,
            }
        })
        .collect();
    CrashDrill { prices, days }
}
