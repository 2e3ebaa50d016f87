use anyhow::Result;
use chrono::NaiveDate;
use coglab_core::fixtures::crash_drill;
use coglab_core::garch::{DriftRecord, GarchMode};
use coglab_core::ingest::{load_price_series, PriceSeries};
use coglab_core::strategy::{Rationale, Signal, StrategyDay};
use serde::Serialize;

use crate::daystate::load_day_states;
use crate::output::csv_bytes;
use crate::pipeline::{
    backtest, fear_volatility, macro_table, strategy_days, Backtest, BacktestMode,
};
use crate::{BacktestArgs, BacktestModeArg, Outcome, RunContext};

#[derive(Serialize)]
struct EquityRow {
    date: NaiveDate,
    close: f64,
    exposure: f64,
    equity: f64,
    drawdown: f64,
}

#[derive(Serialize)]
struct SignalRow {
    date: NaiveDate,
    signal: Signal,
    rationale: &'static str,
    exposure: f64,
    novice_fear: f64,
    fear_threshold: f64,
    h_fear: f64,
    mdi: f64,
    mcfi: f64,
}

#[derive(Serialize)]
struct TradeRow {
    date: NaiveDate,
    delta: f64,
    cost: f64,
    signal: Signal,
    rationale: &'static str,
}

struct Inputs {
    prices: PriceSeries,
    days: Vec<StrategyDay>,
    drift: Vec<DriftRecord>,
}

fn mode_of(arg: BacktestModeArg) -> BacktestMode {
    match arg {
        BacktestModeArg::Dynamic => BacktestMode::Dynamic,
        BacktestModeArg::Baseline => BacktestMode::Baseline,
        BacktestModeArg::StaticGarch => BacktestMode::StaticGarch,
    }
}

fn load_inputs(
    args: &BacktestArgs,
    mode: BacktestMode,
    ctx: &RunContext,
) -> Result<(Inputs, Vec<std::path::PathBuf>)> {
    if args.drill {
        let drill = crash_drill(ctx.seed);
        return Ok((
            Inputs {
                prices: drill.prices,
                days: drill.days,
                drift: Vec::new(),
            },
            Vec::new(),
        ));
    }
    let prices_path = args.prices.clone().expect("clap requires --prices");
    let states_path = args.states.clone().expect("clap requires --states");
    let prices = load_price_series(&prices_path)?;
    let states = load_day_states(&states_path)?;
    let rows = macro_table(&states, 1, &ctx.config)?;
    let garch_mode = match mode {
        BacktestMode::StaticGarch => GarchMode::Static,
        _ => ctx.config.garch_mode,
    };
    let vol = fear_volatility(&states, &rows, garch_mode, &ctx.config)?;
    let days = strategy_days(&states, &rows, &vol.h)?;
    let drift = if garch_mode == GarchMode::Dynamic && mode != BacktestMode::Baseline {
        vol.drift
    } else {
        Vec::new()
    };
    Ok((
        Inputs {
            prices,
            days,
            drift,
        },
        vec![prices_path, states_path],
    ))
}

fn rationale_of(
    steps: &[coglab_core::strategy::StrategyStep],
    date: NaiveDate,
) -> (Signal, Rationale) {
    steps
        .iter()
        .find(|s| s.date == date)
        .map(|s| (s.signal, s.rationale))
        .unwrap_or((Signal::Wait, Rationale::Hold))
}

pub fn run(args: &BacktestArgs, ctx: &RunContext) -> Result<Outcome> {
    let mode = mode_of(args.mode);
    let (inputs, paths) = load_inputs(args, mode, ctx)?;
    let Backtest { run, report } = backtest(
        &inputs.prices,
        &inputs.days,
        mode,
        args.crash_return,
        &ctx.config,
    )?;

    let drawdown = run.result.drawdown_series();
    let closes = inputs.prices.closes();
    let equity_rows: Vec<EquityRow> = run
        .result
        .dates
        .iter()
        .enumerate()
        .map(|(t, &date)| EquityRow {
            date,
            close: closes[t],
            exposure: run.result.exposures[t],
            equity: run.result.equity[t + 1],
            drawdown: drawdown[t + 1],
        })
        .collect();
    let signal_rows: Vec<SignalRow> = run
        .steps
        .iter()
        .zip(&inputs.days)
        .map(|(s, d)| SignalRow {
            date: s.date,
            signal: s.signal,
            rationale: s.rationale.as_str(),
            exposure: s.exposure,
            novice_fear: d.novice_fear,
            fear_threshold: ctx.config.strategy.threshold(d.h_fear),
            h_fear: d.h_fear,
            mdi: d.mdi,
            mcfi: d.mcfi,
        })
        .collect();
    let trade_rows: Vec<TradeRow> = run
        .result
        .trades
        .iter()
        .map(|t| {
            let (signal, rationale) = rationale_of(&run.steps, t.date);
            TradeRow {
                date: t.date,
                delta: t.delta,
                cost: t.cost,
                signal,
                rationale: rationale.as_str(),
            }
        })
        .collect();

    let mut out = Outcome::default();
    out.artifacts.add_json("report.json", &report)?;
    out.artifacts.add("equity.csv", csv_bytes(&equity_rows)?);
    out.artifacts.add("signals.csv", csv_bytes(&signal_rows)?);
    out.artifacts.add("trades.csv", csv_bytes(&trade_rows)?);
    if !inputs.drift.is_empty() {
        out.artifacts.add("drift.csv", csv_bytes(&inputs.drift)?);
    }
    let m = &report.metrics;
    let b = &report.baseline_metrics;
    let mut summary = format!(
        "mode {}  days {}\n{:<10} {:>12} {:>12} {:>10} {:>7}\n",
        report.mode, report.days, "", "net_return", "max_dd", "sharpe", "trades"
    );
    for (label, x) in [(report.mode, m), ("baseline", b)] {
        summary.push_str(&format!(
            "{:<10} {:>12.6} {:>12.6} {:>10} {:>7}\n",
            label,
            x.net_return,
            x.max_drawdown,
            x.sharpe
                .map(|s| format!("{s:.4}"))
                .unwrap_or_else(|| "n/a".into()),
            x.trade_count
        ));
    }
    if let Some(da) = &report.defensive_alpha {
        summary.push_str(&format!(
            "defensive alpha {:.6}  safety buffer {:.2}x cost\n",
            da.da, da.safety_buffer
        ));
    }
    out.summary = summary;
    out.inputs = paths;
    Ok(out)
}
