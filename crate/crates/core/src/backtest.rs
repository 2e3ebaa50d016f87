//! Daily backtester with proportional trading friction and the evaluation
//! metrics used to compare strategy variants.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PriceSeries;
use crate::stats::entropy_of;
use crate::strategy::Signal;

pub const DEFAULT_COST_RATE: f64 = 0.0026;
pub const ANNUAL_RISK_FREE: f64 = 0.02;
pub const DAILY_RISK_FREE: f64 = 0.00008;
pub const TRADING_DAYS: f64 = 252.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    /// Fraction of traded notional lost per exposure change.
    pub cost_rate: f64,
    pub risk_free_daily: f64,
    /// Scale the daily Sharpe ratio by sqrt(252).
    pub annualize: bool,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig {
            cost_rate: DEFAULT_COST_RATE,
            risk_free_daily: DAILY_RISK_FREE,
            annualize: false,
        }
    }
}

impl BacktestConfig {
    pub fn frictionless() -> Self {
        BacktestConfig {
            cost_rate: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.cost_rate) {
            return Err(Error::OutOfRange {
                name: "backtest.cost_rate".into(),
                value: self.cost_rate,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(self.risk_free_daily >= 0.0 && self.risk_free_daily.is_finite()) {
            return Err(Error::invalid(
                "backtest.risk_free_daily",
                "must be a finite rate >= 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trade {
    pub date: NaiveDate,
    pub delta: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestResult {
    pub dates: Vec<NaiveDate>,
    pub exposures: Vec<f64>,
    /// Starting capital of 1 followed by the close of each day.
    pub equity: Vec<f64>,
    pub trades: Vec<Trade>,
}

impl BacktestResult {
    pub fn final_equity(&self) -> f64 {
        *self.equity.last().expect("equity starts at 1")
    }

    /// Day-over-day portfolio returns, one per trading day.
    pub fn returns(&self) -> Vec<f64> {
        self.equity.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
    }

    pub fn drawdown_series(&self) -> Vec<f64> {
        let mut peak = f64::MIN;
        self.equity
            .iter()
            .map(|&e| {
                peak = peak.max(e);
                (peak - e) / peak
            })
            .collect()
    }
}

/// Runs one exposure path over a price series. Exposure held at the close of
/// day t-1 earns day t's market return; any change in exposure at day t costs
/// `|delta| * cost_rate` of the equity at that point.
pub fn simulate_portfolio(
    prices: &PriceSeries,
    exposures: &[(NaiveDate, f64)],
    cfg: &BacktestConfig,
) -> Result<BacktestResult> {
    cfg.validate()?;
    if exposures.len() != prices.len() {
        return Err(Error::LengthMismatch {
            left: prices.len(),
            right: exposures.len(),
        });
    }
    for (p, (d, e)) in prices.points().iter().zip(exposures) {
        if p.date != *d {
            return Err(Error::Misaligned(format!(
                "price date {} vs exposure date {}",
                p.date, d
            )));
        }
        if !(0.0..=1.0).contains(e) {
            return Err(Error::OutOfRange {
                name: format!("exposure on {d}"),
                value: *e,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }

    let market = prices.returns();
    let mut equity = Vec::with_capacity(exposures.len() + 1);
    equity.push(1.0);
    let mut trades = Vec::new();
    let mut held = 0.0;
    let mut value = 1.0;
    for ((date, target), m) in exposures.iter().zip(&market) {
        value *= 1.0 + held * m;
        let delta = target - held;
        if delta != 0.0 {
            let cost = delta.abs() * cfg.cost_rate * value;
            value -= cost;
            trades.push(Trade {
                date: *date,
                delta,
                cost,
            });
        }
        held = *target;
        equity.push(value);
    }
    Ok(BacktestResult {
        dates: exposures.iter().map(|(d, _)| *d).collect(),
        exposures: exposures.iter().map(|(_, e)| *e).collect(),
        equity,
        trades,
    })
}

/// Largest peak-to-trough loss as a fraction of the peak.
pub fn max_drawdown(equity: &[f64]) -> f64 {
    let mut peak = f64::MIN;
    let mut worst: f64 = 0.0;
    for &e in equity {
        peak = peak.max(e);
        worst = worst.max((peak - e) / peak);
    }
    worst
}

/// Mean excess return over the sample standard deviation of returns.
pub fn sharpe_ratio(returns: &[f64], risk_free: f64, annualize: bool) -> Result<f64> {
    let n = returns.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mean = returns.iter().sum::<f64>() / n as f64;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return Err(Error::ZeroVariance("portfolio returns".into()));
    }
    let daily = (mean - risk_free) / var.sqrt();
    Ok(if annualize {
        daily * TRADING_DAYS.sqrt()
    } else {
        daily
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub net_return: f64,
    pub max_drawdown: f64,
    /// `None` when portfolio returns have zero variance.
    pub sharpe: Option<f64>,
    pub trade_count: usize,
}

pub fn metrics(result: &BacktestResult, cfg: &BacktestConfig) -> Result<Metrics> {
    if result.equity.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: result.equity.len(),
        });
    }
    let sharpe = match sharpe_ratio(&result.returns(), cfg.risk_free_daily, cfg.annualize) {
        Ok(s) => Some(s),
        Err(Error::ZeroVariance(_)) | Err(Error::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Metrics {
        net_return: result.final_equity() - 1.0,
        max_drawdown: max_drawdown(&result.equity),
        sharpe,
        trade_count: result.trades.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefensiveAlpha {
    pub da: f64,
    /// Defensive alpha expressed in multiples of the per-trade cost.
    pub safety_buffer: f64,
}

impl DefensiveAlpha {
    pub fn from_terminal(strategy_end: f64, baseline_end: f64, cost_rate: f64) -> Result<Self> {
        if cost_rate <= 0.0 {
            return Err(Error::Undefined("safety buffer with zero cost rate".into()));
        }
        if baseline_end <= 0.0 {
            return Err(Error::Undefined(
                "defensive alpha against non-positive baseline".into(),
            ));
        }
        let da = strategy_end / baseline_end - 1.0;
        Ok(DefensiveAlpha {
            da,
            safety_buffer: da / cost_rate,
        })
    }
}

pub fn defensive_alpha(
    strategy: &BacktestResult,
    baseline: &BacktestResult,
    cfg: &BacktestConfig,
) -> Result<DefensiveAlpha> {
    if strategy.dates != baseline.dates {
        return Err(Error::Misaligned(
            "strategy and baseline cover different windows".into(),
        ));
    }
    DefensiveAlpha::from_terminal(
        strategy.final_equity(),
        baseline.final_equity(),
        cfg.cost_rate,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalQualityConfig {
    /// Calendar days after an event during which a signal still counts.
    pub window_days: i64,
    /// Signals that count as a response to an event.
    pub qualifying: Vec<Signal>,
}

impl Default for SignalQualityConfig {
    fn default() -> Self {
        SignalQualityConfig {
            window_days: 5,
            qualifying: vec![Signal::Sell, Signal::Warning],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignalQuality {
    /// `None` when there are no events.
    pub mean_latency_days: Option<f64>,
    pub latencies: Vec<i64>,
    /// Events with no qualifying signal in the window, scored at the cap.
    pub unmatched: Vec<NaiveDate>,
    /// Natural-log entropy of the signal-category distribution.
    pub entropy: f64,
}

pub fn signal_quality(
    signals: &[(NaiveDate, Signal)],
    events: &[NaiveDate],
    cfg: &SignalQualityConfig,
) -> Result<SignalQuality> {
    if signals.is_empty() {
        return Err(Error::NoInput("signal stream".into()));
    }
    if cfg.window_days < 0 {
        return Err(Error::invalid("window_days", "must be >= 0"));
    }
    let mut latencies = Vec::with_capacity(events.len());
    let mut unmatched = Vec::new();
    for &event in events {
        let hit = signals
            .iter()
            .filter(|(d, s)| *d >= event && cfg.qualifying.contains(s))
            .map(|(d, _)| (*d - event).num_days())
            .filter(|lag| *lag <= cfg.window_days)
            .min();
        match hit {
            Some(lag) => latencies.push(lag),
            None => {
                latencies.push(cfg.window_days);
                unmatched.push(event);
            }
        }
    }
    let mean_latency_days = if latencies.is_empty() {
        None
    } else {
        Some(latencies.iter().sum::<i64>() as f64 / latencies.len() as f64)
    };
    let categories: Vec<Signal> = signals.iter().map(|(_, s)| *s).collect();
    Ok(SignalQuality {
        mean_latency_days,
        latencies,
        unmatched,
        entropy: entropy_of(&categories)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{crash_drill, CrashDrill};
    use crate::strategy::{run_strategy, StrategyConfig, StrategyMode};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn days(n: usize) -> Vec<NaiveDate> {
        let d0 = NaiveDate::from_ymd_opt(2015, 6, 1).unwrap();
        (0..n as u64).map(|i| d0 + chrono::Days::new(i)).collect()
    }

    fn path(dates: &[NaiveDate], e: &[f64]) -> Vec<(NaiveDate, f64)> {
        dates.iter().copied().zip(e.iter().copied()).collect()
    }

    #[test]
    fn round_trip_on_flat_prices_pays_twice() {
        let d = days(3);
        let prices = PriceSeries::from_closes(&d, &[100.0; 3]).unwrap();
        let r = simulate_portfolio(
            &prices,
            &path(&d, &[1.0, 1.0, 0.0]),
            &BacktestConfig::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.final_equity(), 0.9948068, epsilon = 1e-7);
        assert_abs_diff_eq!(r.final_equity(), (1.0f64 - 0.0026).powi(2), epsilon = 1e-15);
        assert_eq!(r.trades.len(), 2);
        assert_eq!(r.equity.len(), 4);
    }

    #[test]
    fn zero_exposure_is_flat() {
        let d = days(4);
        let prices = PriceSeries::from_closes(&d, &[100.0, 80.0, 120.0, 90.0]).unwrap();
        let r =
            simulate_portfolio(&prices, &path(&d, &[0.0; 4]), &BacktestConfig::default()).unwrap();
        assert!(r.equity.iter().all(|&e| e == 1.0));
        assert!(r.trades.is_empty());
    }

    #[test]
    fn full_exposure_up_day() {
        let d = days(2);
        let prices = PriceSeries::from_closes(&d, &[100.0, 110.0]).unwrap();
        let r = simulate_portfolio(
            &prices,
            &path(&d, &[1.0, 1.0]),
            &BacktestConfig::frictionless(),
        )
        .unwrap();
        assert_abs_diff_eq!(r.final_equity(), 1.10, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_paths() {
        let d = days(2);
        let prices = PriceSeries::from_closes(&d, &[100.0, 110.0]).unwrap();
        let cfg = BacktestConfig::default();
        assert!(matches!(
            simulate_portfolio(&prices, &path(&d, &[1.0]), &cfg),
            Err(Error::LengthMismatch { .. })
        ));
        let shifted = path(&days(3)[1..], &[1.0, 1.0]);
        assert!(matches!(
            simulate_portfolio(&prices, &shifted, &cfg),
            Err(Error::Misaligned(_))
        ));
        assert!(matches!(
            simulate_portfolio(&prices, &path(&d, &[1.0, 1.5]), &cfg),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn drawdown_examples() {
        assert_abs_diff_eq!(
            max_drawdown(&[1.0, 1.1, 0.9, 1.0]),
            0.2 / 1.1,
            epsilon = 1e-12
        );
        assert_eq!(max_drawdown(&[1.0, 1.01, 1.2, 1.5]), 0.0);
    }

    #[test]
    fn daily_sharpe_example() {
        // Two-point returns with mean 0.001 and sample sd 0.01.
        let n = 100;
        let half = 0.01 * (((n - 1) as f64) / n as f64).sqrt();
        let r: Vec<f64> = (0..n)
            .map(|i| 0.001 + if i % 2 == 0 { half } else { -half })
            .collect();
        let s = sharpe_ratio(&r, DAILY_RISK_FREE, false).unwrap();
        assert_abs_diff_eq!(s, 0.092, epsilon = 1e-9);
        let a = sharpe_ratio(&r, DAILY_RISK_FREE, true).unwrap();
        assert_abs_diff_eq!(a, 0.092 * 252f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn zero_variance_sharpe_is_undefined() {
        assert!(matches!(
            sharpe_ratio(&[0.0; 5], DAILY_RISK_FREE, false),
            Err(Error::ZeroVariance(_))
        ));
        let d = days(3);
        let prices = PriceSeries::from_closes(&d, &[1.0; 3]).unwrap();
        let r =
            simulate_portfolio(&prices, &path(&d, &[0.0; 3]), &BacktestConfig::default()).unwrap();
        let m = metrics(&r, &BacktestConfig::default()).unwrap();
        assert_eq!(m.sharpe, None);
        assert_eq!(m.net_return, 0.0);
        assert_eq!(m.trade_count, 0);
    }

    #[test]
    fn defensive_alpha_examples() {
        let same = DefensiveAlpha::from_terminal(0.9, 0.9, DEFAULT_COST_RATE).unwrap();
        assert_eq!(same.da, 0.0);
        assert_eq!(same.safety_buffer, 0.0);
        let x = DefensiveAlpha::from_terminal(0.95, 0.88, DEFAULT_COST_RATE).unwrap();
        assert_abs_diff_eq!(x.da, 0.07 / 0.88, epsilon = 1e-12);
        assert_abs_diff_eq!(x.safety_buffer, 30.6, epsilon = 0.05);
        // 8.6% defensive alpha at 0.26% cost is a buffer of about 33 trades.
        assert_abs_diff_eq!(0.086 / DEFAULT_COST_RATE, 33.1, epsilon = 0.05);
    }

    #[test]
    fn defensive_alpha_needs_same_window() {
        let cfg = BacktestConfig::default();
        let d = days(3);
        let p = PriceSeries::from_closes(&d, &[1.0, 1.1, 1.2]).unwrap();
        let a = simulate_portfolio(&p, &path(&d, &[1.0; 3]), &cfg).unwrap();
        let d2 = days(4);
        let p2 = PriceSeries::from_closes(&d2[1..], &[1.0, 1.1, 1.2]).unwrap();
        let b = simulate_portfolio(&p2, &path(&d2[1..], &[1.0; 3]), &cfg).unwrap();
        assert!(matches!(
            defensive_alpha(&a, &b, &cfg),
            Err(Error::Misaligned(_))
        ));
        assert_eq!(defensive_alpha(&a, &a, &cfg).unwrap().da, 0.0);
    }

    #[test]
    fn signal_quality_examples() {
        use Signal::*;
        let d = days(6);
        let sigs: Vec<(NaiveDate, Signal)> = d
            .iter()
            .copied()
            .zip([Buy, Sell, Wait, Buy, Sell, Wait])
            .collect();
        let q = signal_quality(&sigs, &[d[1], d[4]], &SignalQualityConfig::default()).unwrap();
        assert_eq!(q.mean_latency_days, Some(0.0));
        assert!(q.unmatched.is_empty());
        assert_abs_diff_eq!(q.entropy, 3f64.ln(), epsilon = 1e-12);

        let flat: Vec<(NaiveDate, Signal)> = d.iter().map(|x| (*x, Wait)).collect();
        let q = signal_quality(&flat, &[d[0]], &SignalQualityConfig::default()).unwrap();
        assert_eq!(q.entropy, 0.0);
        assert_eq!(q.unmatched, vec![d[0]]);
        assert_eq!(q.mean_latency_days, Some(5.0));
    }

    #[test]
    fn latency_counts_days_to_first_response() {
        use Signal::*;
        let d = days(6);
        let sigs: Vec<(NaiveDate, Signal)> = d
            .iter()
            .copied()
            .zip([Wait, Wait, Wait, Warning, Sell, Wait])
            .collect();
        let q = signal_quality(&sigs, &[d[1]], &SignalQualityConfig::default()).unwrap();
        assert_eq!(q.latencies, vec![2]);
        let tight = SignalQualityConfig {
            window_days: 1,
            ..Default::default()
        };
        let q = signal_quality(&sigs, &[d[1]], &tight).unwrap();
        assert_eq!(q.latencies, vec![1]);
        assert_eq!(q.unmatched, vec![d[1]]);
    }

    fn brute_drawdown(eq: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..eq.len() {
            for j in i..eq.len() {
                worst = worst.max((eq[i] - eq[j]) / eq[i]);
            }
        }
        worst
    }

    #[test]
    fn drawdown_matches_double_loop_on_random_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.random_range(1..60);
            let mut e = 1.0;
            let curve: Vec<f64> = (0..n)
                .map(|_| {
                    e *= 1.0 + rng.random_range(-0.1..0.1);
                    e
                })
                .collect();
            assert_abs_diff_eq!(
                max_drawdown(&curve),
                brute_drawdown(&curve),
                epsilon = 1e-12
            );
        }
    }

    fn run_drill(drill: &CrashDrill, mode: StrategyMode) -> Metrics {
        let cfg = StrategyConfig {
            mode,
            ..Default::default()
        };
        let steps = run_strategy(&drill.days, &cfg).unwrap();
        let exp: Vec<(NaiveDate, f64)> = steps.iter().map(|s| (s.date, s.exposure)).collect();
        let bt = BacktestConfig::default();
        metrics(&simulate_portfolio(&drill.prices, &exp, &bt).unwrap(), &bt).unwrap()
    }

    proptest! {
        #[test]
        fn costs_never_help(
            rets in proptest::collection::vec(-0.09f64..0.09, 2..40),
            exps in proptest::collection::vec(0.0f64..=1.0, 40),
            rate in 1e-5f64..0.05,
        ) {
            let d = days(rets.len());
            let p = PriceSeries::from_pct_changes(&d, &rets.iter().map(|r| r * 100.0).collect::<Vec<_>>(), 100.0).unwrap();
            let e = path(&d, &exps[..rets.len()]);
            let free = simulate_portfolio(&p, &e, &BacktestConfig::frictionless()).unwrap();
            let paid = simulate_portfolio(&p, &e, &BacktestConfig { cost_rate: rate, ..Default::default() }).unwrap();
            prop_assert!(paid.final_equity() <= free.final_equity() + 1e-15);
            prop_assert!(paid.equity.iter().all(|&x| x > 0.0));
            let dd = max_drawdown(&paid.equity);
            prop_assert!((0.0..=1.0).contains(&dd));
            let again = simulate_portfolio(&p, &e, &BacktestConfig { cost_rate: rate, ..Default::default() }).unwrap();
            prop_assert_eq!(again.equity, paid.equity);
        }

        #[test]
        fn zero_cost_zero_exposure_flat(rets in proptest::collection::vec(-0.5f64..0.5, 1..30)) {
            let d = days(rets.len());
            let p = PriceSeries::from_pct_changes(&d, &rets.iter().map(|r| r * 100.0).collect::<Vec<_>>(), 50.0).unwrap();
            let r = simulate_portfolio(&p, &path(&d, &vec![0.0; rets.len()]), &BacktestConfig::frictionless()).unwrap();
            prop_assert!(r.equity.iter().all(|&x| x == 1.0));
        }

        #[test]
        fn crash_drill_dynamic_beats_baseline(seed in any::<u64>()) {
            let drill = crash_drill(seed);
            let dynamic = run_drill(&drill, StrategyMode::Dynamic);
            let baseline = run_drill(&drill, StrategyMode::Baseline);
            prop_assert!(dynamic.max_drawdown < baseline.max_drawdown,
                "dynamic {} vs baseline {}", dynamic.max_drawdown, baseline.max_drawdown);
        }
    }
}
