//! Trading signals from daily cognitive, macro and volatility state.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Signal {
    Buy,
    Warning,
    Sell,
    Wait,
    Prepare,
}

impl Signal {
    pub const ALL: [Signal; 5] = [
        Signal::Buy,
        Signal::Warning,
        Signal::Sell,
        Signal::Wait,
        Signal::Prepare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Signal::Buy => "BUY",
            Signal::Warning => "WARNING",
            Signal::Sell => "SELL",
            Signal::Wait => "WAIT",
            Signal::Prepare => "PREPARE",
        }
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Signal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Signal::ALL
            .into_iter()
            .find(|sig| sig.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::parse("signal", format!("unknown signal {s:?}")))
    }
}

/// Which rule produced a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    FearStop,
    DispersionSpike,
    ConsensusEntry,
    VeteranAccumulation,
    Hold,
    BaselineHold,
}

impl Rationale {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rationale::FearStop => "fear_stop",
            Rationale::DispersionSpike => "dispersion_spike",
            Rationale::ConsensusEntry => "consensus_entry",
            Rationale::VeteranAccumulation => "veteran_accumulation",
            Rationale::Hold => "hold",
            Rationale::BaselineHold => "baseline_hold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub signal: Signal,
    pub rationale: Rationale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyMode {
    #[default]
    Dynamic,
    Baseline,
}

/// Target exposure for the signals that move the position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositionMap {
    pub buy: f64,
    pub warning: f64,
    pub sell: f64,
}

impl Default for PositionMap {
    fn default() -> Self {
        PositionMap {
            buy: 1.0,
            warning: 0.5,
            sell: 0.0,
        }
    }
}

impl PositionMap {
    /// `None` for signals that keep the previous exposure.
    pub fn target(&self, signal: Signal) -> Option<f64> {
        match signal {
            Signal::Buy => Some(self.buy),
            Signal::Warning => Some(self.warning),
            Signal::Sell => Some(self.sell),
            Signal::Wait | Signal::Prepare => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    pub mode: StrategyMode,
    pub fear_stop_base: f64,
    pub fear_stop_floor: f64,
    pub h_ref: f64,
    pub h_scale: f64,
    pub mdi_max: f64,
    pub mcfi_min: f64,
    pub spike_multiple: f64,
    pub spike_window: usize,
    /// Smallest v_MDI that can count as a spike, so a flat trailing window
    /// does not turn noise into warnings.
    pub spike_min: f64,
    pub prepare_mdi_min: f64,
    pub positions: PositionMap,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            mode: StrategyMode::Dynamic,
            fear_stop_base: 0.30,
            fear_stop_floor: 0.25,
            h_ref: 0.05,
            h_scale: 0.05,
            mdi_max: 0.2,
            mcfi_min: 0.4,
            spike_multiple: 3.0,
            spike_window: 5,
            spike_min: 0.05,
            prepare_mdi_min: 0.5,
            positions: PositionMap::default(),
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("strategy.fear_stop_base", self.fear_stop_base),
            ("strategy.fear_stop_floor", self.fear_stop_floor),
            ("strategy.h_ref", self.h_ref),
            ("strategy.h_scale", self.h_scale),
            ("strategy.mdi_max", self.mdi_max),
            ("strategy.mcfi_min", self.mcfi_min),
            ("strategy.spike_multiple", self.spike_multiple),
            ("strategy.spike_min", self.spike_min),
            ("strategy.prepare_mdi_min", self.prepare_mdi_min),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if self.fear_stop_floor > self.fear_stop_base {
            return Err(Error::invalid(
                "strategy.fear_stop_floor",
                "must not exceed fear_stop_base",
            ));
        }
        if self.h_scale <= 0.0 {
            return Err(Error::invalid("strategy.h_scale", "must be positive"));
        }
        if self.spike_window == 0 {
            return Err(Error::invalid(
                "strategy.spike_window",
                "must be at least 1",
            ));
        }
        let p = &self.positions;
        for (name, v) in [
            ("strategy.positions.buy", p.buy),
            ("strategy.positions.warning", p.warning),
            ("strategy.positions.sell", p.sell),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    name: name.into(),
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(())
    }

    pub fn threshold(&self, h_fear: f64) -> f64 {
        dynamic_threshold(
            self.fear_stop_base,
            self.fear_stop_floor,
            h_fear,
            self.h_ref,
            self.h_scale,
        )
    }
}

/// Fear stop-loss level, lowered linearly from `base` to `floor` as fear
/// volatility rises from `h_ref` to `h_ref + h_scale`.
pub fn dynamic_threshold(base: f64, floor: f64, h_fear: f64, h_ref: f64, h_scale: f64) -> f64 {
    let w = ((h_fear - h_ref) / h_scale).clamp(0.0, 1.0);
    let w = if w.is_nan() { 0.0 } else { w };
    base - (base - floor) * w
}

/// Everything `decide` looks at for one day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyDay {
    pub date: NaiveDate,
    pub novice_fear: f64,
    pub novice_valence: f64,
    pub mdi: f64,
    pub mcfi: f64,
    pub v_mdi: Option<f64>,
    pub h_fear: f64,
    /// Day-over-day change in the veteran's mean of anticipation and agency.
    pub veteran_momentum: Option<f64>,
}

/// State carried between days.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DecisionContext {
    pub trailing_abs_v_mdi: Option<f64>,
    pub entered: bool,
}

pub fn decide(day: &StrategyDay, ctx: &DecisionContext, cfg: &StrategyConfig) -> Decision {
    let buy_zone = day.mdi <= cfg.mdi_max && day.mcfi >= cfg.mcfi_min;
    if cfg.mode == StrategyMode::Baseline {
        return if !ctx.entered && buy_zone {
            Decision {
                signal: Signal::Buy,
                rationale: Rationale::ConsensusEntry,
            }
        } else {
            Decision {
                signal: Signal::Wait,
                rationale: Rationale::BaselineHold,
            }
        };
    }

    if day.novice_fear > cfg.threshold(day.h_fear) {
        return Decision {
            signal: Signal::Sell,
            rationale: Rationale::FearStop,
        };
    }
    if let (Some(v), Some(trail)) = (day.v_mdi, ctx.trailing_abs_v_mdi) {
        if v >= cfg.spike_min && v >= cfg.spike_multiple * trail {
            return Decision {
                signal: Signal::Warning,
                rationale: Rationale::DispersionSpike,
            };
        }
    }
    if buy_zone {
        return Decision {
            signal: Signal::Buy,
            rationale: Rationale::ConsensusEntry,
        };
    }
    let accumulating = day.veteran_momentum.is_some_and(|m| m > 0.0);
    if day.mdi >= cfg.prepare_mdi_min && accumulating && day.novice_valence < 0.0 {
        return Decision {
            signal: Signal::Prepare,
            rationale: Rationale::VeteranAccumulation,
        };
    }
    Decision {
        signal: Signal::Wait,
        rationale: Rationale::Hold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyStep {
    pub date: NaiveDate,
    pub signal: Signal,
    pub rationale: Rationale,
    pub exposure: f64,
}

/// Folds `decide` over a date-sorted stream, tracking the trailing |v_MDI|
/// window and the exposure implied by the position map.
pub fn run_strategy(stream: &[StrategyDay], cfg: &StrategyConfig) -> Result<Vec<StrategyStep>> {
    cfg.validate()?;
    if stream.is_empty() {
        return Err(Error::NoInput("strategy stream".into()));
    }
    for w in stream.windows(2) {
        if w[1].date <= w[0].date {
            return Err(Error::Unsorted(w[1].date));
        }
    }

    let mut window: VecDeque<f64> = VecDeque::with_capacity(cfg.spike_window);
    let mut exposure = 0.0;
    let mut entered = false;
    let mut out = Vec::with_capacity(stream.len());
    for day in stream {
        let trailing = if window.is_empty() {
            None
        } else {
            Some(window.iter().sum::<f64>() / window.len() as f64)
        };
        let ctx = DecisionContext {
            trailing_abs_v_mdi: trailing,
            entered,
        };
        let d = decide(day, &ctx, cfg);
        if let Some(target) = cfg.positions.target(d.signal) {
            exposure = target;
        }
        entered |= d.signal == Signal::Buy;
        if let Some(v) = day.v_mdi {
            if window.len() == cfg.spike_window {
                window.pop_front();
            }
            window.push_back(v.abs());
        }
        out.push(StrategyStep {
            date: day.date,
            signal: d.signal,
            rationale: d.rationale,
            exposure,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn date(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2015, 5, d).unwrap()
    }

    fn calm(d: u32) -> StrategyDay {
        StrategyDay {
            date: date(d),
            novice_fear: 0.1,
            novice_valence: 0.0,
            mdi: 0.4,
            mcfi: 0.2,
            v_mdi: Some(0.01),
            h_fear: 0.0,
            veteran_momentum: None,
        }
    }

    #[test]
    fn threshold_endpoints() {
        let t = |h| dynamic_threshold(0.30, 0.25, h, 0.1, 0.2);
        assert_abs_diff_eq!(t(0.1), 0.30, epsilon = 1e-15);
        assert_abs_diff_eq!(t(0.3), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t(5.0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(t(0.2), 0.275, epsilon = 1e-15);
        assert_abs_diff_eq!(t(-1.0), 0.30, epsilon = 1e-15);
    }

    #[test]
    fn consensus_day_buys() {
        let day = StrategyDay {
            mdi: 0.10,
            mcfi: 0.48,
            ..calm(12)
        };
        let d = decide(
            &day,
            &DecisionContext::default(),
            &StrategyConfig::default(),
        );
        assert_eq!(d.signal, Signal::Buy);
    }

    #[test]
    fn quake_day_warns() {
        // v_MDI 0.72 against a trailing mean of 0.09: an 8x spike.
        let day = StrategyDay {
            mdi: 0.82,
            mcfi: 0.3,
            v_mdi: Some(0.72),
            ..calm(13)
        };
        let ctx = DecisionContext {
            trailing_abs_v_mdi: Some(0.09),
            entered: true,
        };
        assert_eq!(
            decide(&day, &ctx, &StrategyConfig::default()).signal,
            Signal::Warning
        );
    }

    #[test]
    fn fear_above_stop_sells() {
        let day = StrategyDay {
            novice_fear: 0.35,
            mdi: 0.10,
            mcfi: 0.48,
            ..calm(14)
        };
        let cfg = StrategyConfig::default();
        assert_abs_diff_eq!(cfg.threshold(day.h_fear), 0.30);
        let d = decide(&day, &DecisionContext::default(), &cfg);
        assert_eq!(d.signal, Signal::Sell);
        assert_eq!(d.rationale, Rationale::FearStop);
    }

    #[test]
    fn baseline_never_sells() {
        let cfg = StrategyConfig {
            mode: StrategyMode::Baseline,
            ..Default::default()
        };
        let day = StrategyDay {
            novice_fear: 0.99,
            ..calm(14)
        };
        assert_eq!(
            decide(&day, &DecisionContext::default(), &cfg).signal,
            Signal::Wait
        );
    }

    #[test]
    fn baseline_holds_after_entry() {
        let cfg = StrategyConfig {
            mode: StrategyMode::Baseline,
            ..Default::default()
        };
        let buy = StrategyDay {
            mdi: 0.1,
            mcfi: 0.5,
            ..calm(1)
        };
        let stream = vec![
            buy.clone(),
            StrategyDay {
                date: date(2),
                ..buy.clone()
            },
            StrategyDay {
                novice_fear: 0.9,
                v_mdi: Some(5.0),
                ..calm(3)
            },
        ];
        let steps = run_strategy(&stream, &cfg).unwrap();
        let sigs: Vec<Signal> = steps.iter().map(|s| s.signal).collect();
        assert_eq!(sigs, vec![Signal::Buy, Signal::Wait, Signal::Wait]);
        assert!(steps.iter().all(|s| s.exposure == 1.0));
    }

    #[test]
    fn prepare_needs_all_three_conditions() {
        let day = StrategyDay {
            mdi: 0.7,
            novice_valence: -0.4,
            veteran_momentum: Some(0.05),
            v_mdi: None,
            ..calm(16)
        };
        let cfg = StrategyConfig::default();
        let ctx = DecisionContext::default();
        assert_eq!(decide(&day, &ctx, &cfg).signal, Signal::Prepare);
        let flat = StrategyDay {
            veteran_momentum: Some(0.0),
            ..day.clone()
        };
        assert_eq!(decide(&flat, &ctx, &cfg).signal, Signal::Wait);
        let cheerful = StrategyDay {
            novice_valence: 0.1,
            ..day.clone()
        };
        assert_eq!(decide(&cheerful, &ctx, &cfg).signal, Signal::Wait);
    }

    fn exposures_for(signals: &[Signal]) -> Vec<f64> {
        let map = PositionMap::default();
        let mut e = 0.0;
        signals
            .iter()
            .map(|s| {
                if let Some(t) = map.target(*s) {
                    e = t;
                }
                e
            })
            .collect()
    }

    #[test]
    fn position_map_fold() {
        use Signal::*;
        assert_eq!(exposures_for(&[Buy, Wait, Sell]), vec![1.0, 1.0, 0.0]);
        assert_eq!(exposures_for(&[Wait, Wait, Wait]), vec![0.0; 3]);
        assert_eq!(exposures_for(&[Buy, Warning]), vec![1.0, 0.5]);
        assert_eq!(exposures_for(&[Buy, Prepare]), vec![1.0, 1.0]);
    }

    #[test]
    fn run_strategy_applies_map() {
        let stream = vec![
            StrategyDay {
                mdi: 0.1,
                mcfi: 0.5,
                ..calm(1)
            },
            calm(2),
            StrategyDay {
                novice_fear: 0.5,
                ..calm(3)
            },
        ];
        let steps = run_strategy(&stream, &StrategyConfig::default()).unwrap();
        let e: Vec<f64> = steps.iter().map(|s| s.exposure).collect();
        assert_eq!(e, vec![1.0, 1.0, 0.0]);
        assert_eq!(steps[1].signal, Signal::Wait);
    }

    #[test]
    fn quiet_stream_stays_flat() {
        let stream: Vec<StrategyDay> = (1..=6).map(calm).collect();
        let steps = run_strategy(&stream, &StrategyConfig::default()).unwrap();
        assert!(steps
            .iter()
            .all(|s| s.signal == Signal::Wait && s.exposure == 0.0));
    }

    #[test]
    fn spike_measured_against_trailing_window() {
        let mut stream: Vec<StrategyDay> = (1..=5)
            .map(|d| StrategyDay {
                v_mdi: Some(0.09),
                ..calm(d)
            })
            .collect();
        stream.push(StrategyDay {
            v_mdi: Some(0.72),
            ..calm(6)
        });
        stream.push(StrategyDay {
            v_mdi: Some(0.2),
            ..calm(7)
        });
        let steps = run_strategy(&stream, &StrategyConfig::default()).unwrap();
        assert!(steps[..5].iter().all(|s| s.signal == Signal::Wait));
        assert_eq!(steps[5].signal, Signal::Warning);
        assert_eq!(steps[5].exposure, 0.5);
        // Trailing mean now includes the spike: (4 * 0.09 + 0.72) / 5 = 0.216.
        assert_eq!(steps[6].signal, Signal::Wait);
    }

    #[test]
    fn unsorted_or_empty_stream_rejected() {
        let cfg = StrategyConfig::default();
        assert!(matches!(run_strategy(&[], &cfg), Err(Error::NoInput(_))));
        let err = run_strategy(&[calm(2), calm(1)], &cfg).unwrap_err();
        assert!(matches!(err, Error::Unsorted(d) if d == date(1)));
        assert!(run_strategy(&[calm(2), calm(2)], &cfg).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = StrategyConfig {
            fear_stop_floor: 0.35,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = StrategyConfig {
            h_scale: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = StrategyConfig {
            mdi_max: f64::NAN,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn signal_round_trip() {
        for s in Signal::ALL {
            assert_eq!(s.as_str().parse::<Signal>().unwrap(), s);
        }
        assert!("HODL".parse::<Signal>().is_err());
    }

    proptest! {
        #[test]
        fn threshold_bounded_and_monotone(
            base in 0.0f64..1.0,
            gap in 0.0f64..0.5,
            h1 in -2.0f64..2.0,
            h2 in -2.0f64..2.0,
            h_ref in -1.0f64..1.0,
            h_scale in 1e-3f64..2.0,
        ) {
            let floor = base - gap;
            let t1 = dynamic_threshold(base, floor, h1, h_ref, h_scale);
            let t2 = dynamic_threshold(base, floor, h2, h_ref, h_scale);
            prop_assert!(t1 >= floor - 1e-12 && t1 <= base + 1e-12);
            if h1 <= h2 {
                prop_assert!(t1 >= t2 - 1e-12);
            }
        }

        #[test]
        fn more_fear_keeps_sell(
            fear in 0.0f64..1.0,
            extra in 0.0f64..1.0,
            mdi in 0.0f64..2.0,
            mcfi in -1.0f64..1.0,
            v in proptest::option::of(-1.0f64..1.0),
            trail in proptest::option::of(0.0f64..1.0),
            h in 0.0f64..0.3,
        ) {
            let cfg = StrategyConfig::default();
            let ctx = DecisionContext { trailing_abs_v_mdi: trail, entered: false };
            let day = StrategyDay {
                novice_fear: fear,
                mdi,
                mcfi,
                v_mdi: v,
                h_fear: h,
                ..calm(1)
            };
            let scared = StrategyDay { novice_fear: fear + extra, ..day.clone() };
            if decide(&day, &ctx, &cfg).signal == Signal::Sell {
                prop_assert_eq!(decide(&scared, &ctx, &cfg).signal, Signal::Sell);
            }
        }

        #[test]
        fn baseline_has_no_fear_trigger(
            fear in 0.0f64..1.0,
            mdi in 0.0f64..2.0,
            mcfi in -1.0f64..1.0,
            entered: bool,
        ) {
            let cfg = StrategyConfig { mode: StrategyMode::Baseline, ..Default::default() };
            let day = StrategyDay { novice_fear: fear, mdi, mcfi, ..calm(1) };
            let ctx = DecisionContext { trailing_abs_v_mdi: Some(0.0), entered };
            prop_assert_ne!(decide(&day, &ctx, &cfg).signal, Signal::Sell);
        }
    }
}
