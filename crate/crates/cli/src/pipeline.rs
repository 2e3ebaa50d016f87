//! Day states to macro table, fear volatility, strategy stream and
//! portfolio runs.

use chrono::NaiveDate;
use coglab_core::backtest::{
    defensive_alpha, metrics, signal_quality, simulate_portfolio, BacktestResult, DefensiveAlpha,
    Metrics, SignalQuality, SignalQualityConfig,
};
use coglab_core::cogvec::PersonaDayState;
use coglab_core::garch::{run_volatility, DriftRecord, GarchMode, VolatilityOptions};
use coglab_core::ingest::{ModelConfig, PriceSeries};
use coglab_core::macrostate::{
    dynamics, quadrant_membership, MacroDynamics, MacroFeatures, MacroState, QuadrantId,
    QuadrantMembership,
};
use coglab_core::strategy::{
    run_strategy, Signal, StrategyConfig, StrategyDay, StrategyMode, StrategyStep,
};
use coglab_core::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct MacroRow {
    pub state: MacroState,
    pub dynamics: MacroDynamics,
    pub membership: QuadrantMembership,
}

pub fn macro_table(
    states: &[PersonaDayState],
    lag: usize,
    cfg: &ModelConfig,
) -> Result<Vec<MacroRow>> {
    let series = states
        .iter()
        .map(|s| MacroState::from_day(s, cfg.mcfi_alpha))
        .collect::<Result<Vec<_>>>()?;
    let dyns = dynamics(&series, lag)?;
    series
        .into_iter()
        .zip(dyns)
        .map(|(state, dynamics)| {
            let membership =
                quadrant_membership(&MacroFeatures::new(&state, &dynamics), &cfg.quadrants)?;
            Ok(MacroRow {
                state,
                dynamics,
                membership,
            })
        })
        .collect()
}

/// CSV row for the macro table.
#[derive(Debug, Serialize)]
pub struct MacroCsvRow {
    date: NaiveDate,
    mdi: f64,
    mcfi: f64,
    meta: f64,
    v_mdi: Option<f64>,
    v_mcfi: Option<f64>,
    a_mdi: Option<f64>,
    a_mcfi: Option<f64>,
    p_a: f64,
    p_b: f64,
    p_c: f64,
    p_d: f64,
    p_e: f64,
    p_f: f64,
    dominant: char,
    regime: &'static str,
}

impl From<&MacroRow> for MacroCsvRow {
    fn from(r: &MacroRow) -> Self {
        let p = r.membership.probabilities;
        MacroCsvRow {
            date: r.state.date,
            mdi: r.state.mdi,
            mcfi: r.state.mcfi,
            meta: r.state.meta,
            v_mdi: r.dynamics.v_mdi,
            v_mcfi: r.dynamics.v_mcfi,
            a_mdi: r.dynamics.a_mdi,
            a_mcfi: r.dynamics.a_mcfi,
            p_a: p[0],
            p_b: p[1],
            p_c: p[2],
            p_d: p[3],
            p_e: p[4],
            p_f: p[5],
            dominant: r.membership.dominant.letter(),
            regime: r.membership.dominant.name(),
        }
    }
}

pub struct FearVolatility {
    pub h: Vec<f64>,
    pub drift: Vec<DriftRecord>,
}

/// GJR variance of novice fear with parameters switched by each day's
/// dominant quadrant.
pub fn fear_volatility(
    states: &[PersonaDayState],
    rows: &[MacroRow],
    mode: GarchMode,
    cfg: &ModelConfig,
) -> Result<FearVolatility> {
    let dates: Vec<NaiveDate> = states.iter().map(|s| s.date).collect();
    let fear: Vec<f64> = states
        .iter()
        .map(|s| s.novice.score_or_zero("fear"))
        .collect();
    let quadrants: Vec<QuadrantId> = rows.iter().map(|r| r.membership.dominant).collect();
    let run = run_volatility(
        "fear",
        &dates,
        &fear,
        &quadrants,
        &cfg.arsenal,
        VolatilityOptions {
            mode,
            ..VolatilityOptions::default()
        },
    )?;
    Ok(FearVolatility {
        h: run.h,
        drift: run.drift,
    })
}

fn veteran_drive(s: &PersonaDayState) -> f64 {
    0.5 * (s.veteran.score_or_zero("anticipation") + s.veteran.score_or_zero("agency"))
}

pub fn strategy_days(
    states: &[PersonaDayState],
    rows: &[MacroRow],
    h_fear: &[f64],
) -> Result<Vec<StrategyDay>> {
    if states.len() != rows.len() || states.len() != h_fear.len() {
        return Err(Error::Misaligned(
            "day states, macro rows and volatility differ in length".into(),
        ));
    }
    Ok(states
        .iter()
        .enumerate()
        .map(|(t, s)| StrategyDay {
            date: s.date,
            novice_fear: s.novice.score_or_zero("fear"),
            novice_valence: s.novice.score_or_zero("valence"),
            mdi: rows[t].state.mdi,
            mcfi: rows[t].state.mcfi,
            v_mdi: rows[t].dynamics.v_mdi,
            h_fear: h_fear[t],
            veteran_momentum: (t > 0).then(|| veteran_drive(s) - veteran_drive(&states[t - 1])),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BacktestMode {
    Dynamic,
    Baseline,
    StaticGarch,
}

impl BacktestMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            BacktestMode::Dynamic => "dynamic",
            BacktestMode::Baseline => "baseline",
            BacktestMode::StaticGarch => "static-garch",
        }
    }

    pub fn strategy_mode(&self) -> StrategyMode {
        match self {
            BacktestMode::Baseline => StrategyMode::Baseline,
            _ => StrategyMode::Dynamic,
        }
    }
}

pub struct StrategyRun {
    pub steps: Vec<StrategyStep>,
    pub result: BacktestResult,
    pub metrics: Metrics,
}

pub fn run_mode(
    prices: &PriceSeries,
    days: &[StrategyDay],
    mode: StrategyMode,
    cfg: &ModelConfig,
) -> Result<StrategyRun> {
    let strategy = StrategyConfig {
        mode,
        ..cfg.strategy.clone()
    };
    let steps = run_strategy(days, &strategy)?;
    let exposures: Vec<(NaiveDate, f64)> = steps.iter().map(|s| (s.date, s.exposure)).collect();
    let result = simulate_portfolio(prices, &exposures, &cfg.backtest)?;
    let metrics = metrics(&result, &cfg.backtest)?;
    Ok(StrategyRun {
        steps,
        result,
        metrics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BacktestReport {
    pub mode: &'static str,
    pub days: usize,
    pub cost_rate: f64,
    pub metrics: Metrics,
    pub baseline_metrics: Metrics,
    /// Against the baseline run; absent when the baseline is the run itself.
    pub defensive_alpha: Option<DefensiveAlpha>,
    pub signal_quality: SignalQuality,
    pub crash_days: Vec<NaiveDate>,
    pub signal_counts: Vec<(Signal, usize)>,
}

pub struct Backtest {
    pub run: StrategyRun,
    pub report: BacktestReport,
}

/// Runs the chosen mode and the baseline over the same window. Days whose
/// market return is at or below `crash_return` are the events scored for
/// signal latency.
pub fn backtest(
    prices: &PriceSeries,
    days: &[StrategyDay],
    mode: BacktestMode,
    crash_return: f64,
    cfg: &ModelConfig,
) -> Result<Backtest> {
    let run = run_mode(prices, days, mode.strategy_mode(), cfg)?;
    let baseline = if mode == BacktestMode::Baseline {
        None
    } else {
        Some(run_mode(prices, days, StrategyMode::Baseline, cfg)?)
    };
    let defensive = match &baseline {
        Some(b) if cfg.backtest.cost_rate > 0.0 => {
            Some(defensive_alpha(&run.result, &b.result, &cfg.backtest)?)
        }
        _ => None,
    };
    let crash_days: Vec<NaiveDate> = prices
        .dates()
        .into_iter()
        .zip(prices.returns())
        .skip(1)
        .filter(|(_, r)| *r <= crash_return)
        .map(|(d, _)| d)
        .collect();
    let signals: Vec<(NaiveDate, Signal)> = run.steps.iter().map(|s| (s.date, s.signal)).collect();
    let quality = signal_quality(&signals, &crash_days, &SignalQualityConfig::default())?;
    let signal_counts = Signal::ALL
        .iter()
        .map(|&sig| (sig, run.steps.iter().filter(|s| s.signal == sig).count()))
        .collect();
    let report = BacktestReport {
        mode: mode.as_str(),
        days: days.len(),
        cost_rate: cfg.backtest.cost_rate,
        metrics: run.metrics,
        baseline_metrics: baseline.as_ref().map_or(run.metrics, |b| b.metrics),
        defensive_alpha: defensive,
        signal_quality: quality,
        crash_days,
        signal_counts,
    };
    Ok(Backtest { run, report })
}
