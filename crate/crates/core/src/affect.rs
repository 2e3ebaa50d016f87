//! Time evolution of cognitive vectors: power-law decay, post-holiday
//! multipliers, asymmetric shock response and the satellite interaction
//! models, together with their calibration routines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cogvec::CognitiveVector;
use crate::error::{Error, Result};
use crate::macrostate::QuadrantId;
use crate::stats::{mean, ols, welch_t_one_tailed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    pub alpha: f64,
    pub threshold: f64,
    #[serde(default)]
    pub beta0: f64,
    #[serde(default = "one")]
    pub beta2: f64,
}

fn one() -> f64 {
    1.0
}

impl DecayEntry {
    pub fn new(alpha: f64, threshold: f64) -> Self {
        Self {
            alpha,
            threshold,
            beta0: 0.0,
            beta2: 1.0,
        }
    }

    /// Days until the score halves from `e_t`, ignoring the activation gate.
    pub fn half_life(&self, e_t: f64) -> f64 {
        // 0.5 e = exp(b0) T^-a e^b2  =>  T = (0.5 e^(1-b2) exp(-b0))^(-1/a)
        (0.5 * e_t.powf(1.0 - self.beta2) * (-self.beta0).exp()).powf(-1.0 / self.alpha)
    }

    fn validate(&self, dim: &str) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!("decay.{dim}.alpha"), "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::OutOfRange {
                name: format!("decay.{dim}.threshold"),
                value: self.threshold,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !self.beta0.is_finite() || !self.beta2.is_finite() {
            return Err(Error::invalid(
                format!("decay.{dim}"),
                "non-finite coefficient",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecayTable(pub BTreeMap<String, DecayEntry>);

impl Default for DecayTable {
    fn default() -> Self {
        Self(BTreeMap::from([
            ("fear".into(), DecayEntry::new(0.32, 0.7)),
            ("greed".into(), DecayEntry::new(0.25, 0.6)),
            ("joy".into(), DecayEntry::new(0.20, 0.6)),
            ("sadness".into(), DecayEntry::new(0.11, 0.8)),
            ("trust".into(), DecayEntry::new(0.05, 0.6)),
        ]))
    }
}

impl DecayTable {
    pub fn get(&self, dim: &str) -> Option<&DecayEntry> {
        self.0.get(dim)
    }

    pub fn validate(&self) -> Result<()> {
        self.0.iter().try_for_each(|(d, e)| e.validate(d))
    }
}

/// Decays `e_t` over `elapsed` days. Scores at or below the dimension's
/// activation threshold, and dimensions without a table entry, are returned
/// unchanged.
pub fn decay(e_t: f64, elapsed: f64, dim: &str, table: &DecayTable) -> Result<f64> {
    if !(elapsed >= 1.0) || !elapsed.is_finite() {
        return Err(Error::invalid("elapsed", format!("{elapsed} < 1 day")));
    }
    if e_t < 0.0 && elapsed > 1.0 {
        return Err(Error::LogDomain(e_t));
    }
    if e_t == 0.0 {
        return Ok(0.0);
    }
    let Some(entry) = table.get(dim) else {
        return Ok(e_t);
    };
    if e_t <= entry.threshold {
        return Ok(e_t);
    }
    let value = entry.beta0.exp() * elapsed.powf(-entry.alpha) * e_t.powf(entry.beta2);
    Ok(value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HolidayTable(pub BTreeMap<String, f64>);

impl Default for HolidayTable {
    fn default() -> Self {
        Self(BTreeMap::from([
            ("fear".into(), 1.91),
            ("joy".into(), 2.12),
            ("uncertainty".into(), 1.83),
            ("sadness".into(), 1.00),
        ]))
    }
}

impl HolidayTable {
    pub fn multiplier(&self, dim: &str) -> f64 {
        self.0.get(dim).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (dim, &m) in &self.0 {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::invalid(
                    format!("holiday.{dim}"),
                    "multiplier must be > 0",
                ));
            }
        }
        Ok(())
    }
}

pub fn holiday_adjust(value: f64, dim: &str, is_post_holiday: bool, table: &HolidayTable) -> f64 {
    if is_post_holiday {
        value * table.multiplier(dim)
    } else {
        value
    }
}

pub const FEAR_INDUCING: &str = "fear_inducing";
pub const CONFUSION_INDUCING: &str = "confusion_inducing";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockConfig {
    pub mdi_threshold: f64,
    pub lambda: f64,
    pub events: BTreeMap<String, BTreeMap<String, f64>>,
}

impl Default for ShockConfig {
    fn default() -> Self {
        Self {
            mdi_threshold: 1.2,
            lambda: 1.5,
            events: BTreeMap::from([
                (
                    FEAR_INDUCING.into(),
                    BTreeMap::from([("fear".into(), 0.75), ("trust".into(), -0.70)]),
                ),
                (
                    CONFUSION_INDUCING.into(),
                    BTreeMap::from([("uncertainty".into(), 0.8), ("certainty".into(), -0.8)]),
                ),
            ]),
        }
    }
}

impl ShockConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 1.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("shock.lambda", "must be >= 1"));
        }
        if !(self.mdi_threshold > 0.0) {
            return Err(Error::invalid("shock.mdi_threshold", "must be > 0"));
        }
        Ok(())
    }

    pub fn delta(&self, event_class: &str) -> Result<&BTreeMap<String, f64>> {
        self.events
            .get(event_class)
            .ok_or_else(|| Error::UnknownEventClass(event_class.to_string()))
    }

    pub fn is_fragile(&self, current_mdi: f64) -> bool {
        current_mdi > self.mdi_threshold
    }
}

/// Adds the event's shock vector, amplifying negative components by λ, and
/// reports whether the market was in the fragile regime.
pub fn apply_shock(
    state: &CognitiveVector,
    event_class: &str,
    cfg: &ShockConfig,
    current_mdi: f64,
) -> Result<(CognitiveVector, bool)> {
    let delta = cfg.delta(event_class)?;
    Ok((
        shift_clamped(state, delta, cfg.lambda)?,
        cfg.is_fragile(current_mdi),
    ))
}

/// Applies an arbitrary shock vector with the same asymmetry rule.
pub fn shift_clamped(
    state: &CognitiveVector,
    delta: &BTreeMap<String, f64>,
    lambda: f64,
) -> Result<CognitiveVector> {
    let mut out = state.clone();
    for (dim, &d) in delta {
        let idx = state
            .registry()
            .index_of(dim)
            .ok_or_else(|| Error::UnknownDimension(dim.clone()))?;
        let d = if d < 0.0 { d * lambda } else { d };
        out.set_clamped(idx, state.scores()[idx] + d);
    }
    Ok(out)
}

/// Table-calibrated coefficient sets for the four satellite models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteCoeffs {
    /// Weights on joy, v_joy, mcfi, joy·mcfi, v_joy·mcfi.
    pub fomo: [f64; 5],
    pub greed: [f64; 5],
    /// Weights on v_mdi, mcfi, v_mdi·mcfi.
    pub uncertainty_delta: [f64; 3],
    /// Weights on regret_lag, mcfi, regret_lag·mcfi.
    pub regret: [f64; 3],
}

impl Default for SatelliteCoeffs {
    fn default() -> Self {
        Self {
            fomo: [0.8543, 0.2345, 0.1234, -0.4567, -0.1890],
            greed: [0.9123, 0.1987, 0.0, -0.5123, -0.1567],
            uncertainty_delta: [0.3456, -0.2345, 0.1890],
            regret: [0.7234, -0.4567, 0.3456],
        }
    }
}

impl SatelliteCoeffs {
    pub fn zero() -> Self {
        Self {
            fomo: [0.0; 5],
            greed: [0.0; 5],
            uncertainty_delta: [0.0; 3],
            regret: [0.0; 3],
        }
    }

    fn validate(&self) -> Result<()> {
        let all = self
            .fomo
            .iter()
            .chain(&self.greed)
            .chain(&self.uncertainty_delta)
            .chain(&self.regret);
        if all.clone().any(|c| !c.is_finite()) {
            return Err(Error::invalid("satellite", "non-finite coefficient"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteRegimes {
    pub default: SatelliteCoeffs,
    #[serde(default)]
    pub by_quadrant: BTreeMap<QuadrantId, SatelliteCoeffs>,
}

impl Default for SatelliteRegimes {
    /// Bull quadrants (A, F) carry the elevated joy→FOMO transmission of 0.8.
    fn default() -> Self {
        let mut bull = SatelliteCoeffs::default();
        bull.fomo[0] = 0.8;
        Self {
            default: SatelliteCoeffs::default(),
            by_quadrant: BTreeMap::from([(QuadrantId::A, bull), (QuadrantId::F, bull)]),
        }
    }
}

impl SatelliteRegimes {
    pub fn uniform(coeffs: SatelliteCoeffs) -> Self {
        Self {
            default: coeffs,
            by_quadrant: BTreeMap::new(),
        }
    }

    pub fn for_quadrant(&self, q: QuadrantId) -> &SatelliteCoeffs {
        self.by_quadrant.get(&q).unwrap_or(&self.default)
    }

    pub fn validate(&self) -> Result<()> {
        self.default.validate()?;
        self.by_quadrant
            .values()
            .try_for_each(SatelliteCoeffs::validate)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SatelliteInputs {
    pub joy: f64,
    pub v_joy: f64,
    pub mcfi: f64,
    pub regret_lag: f64,
    pub v_mdi: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SatelliteOutputs {
    pub fomo: f64,
    pub greed: f64,
    pub d_uncertainty: f64,
    pub regret: f64,
}

fn interaction5(c: &[f64; 5], x: f64, v: f64, m: f64) -> f64 {
    c[0] * x + c[1] * v + c[2] * m + c[3] * x * m + c[4] * v * m
}

fn interaction3(c: &[f64; 3], x: f64, m: f64) -> f64 {
    c[0] * x + c[1] * m + c[2] * x * m
}

pub fn satellite_step(inputs: &SatelliteInputs, coeffs: &SatelliteCoeffs) -> SatelliteOutputs {
    let SatelliteInputs {
        joy,
        v_joy,
        mcfi,
        regret_lag,
        v_mdi,
    } = *inputs;
    SatelliteOutputs {
        fomo: interaction5(&coeffs.fomo, joy, v_joy, mcfi).clamp(-1.0, 1.0),
        greed: interaction5(&coeffs.greed, joy, v_joy, mcfi).clamp(-1.0, 1.0),
        d_uncertainty: interaction3(&coeffs.uncertainty_delta, v_mdi, mcfi).clamp(-1.0, 1.0),
        regret: interaction3(&coeffs.regret, regret_lag, mcfi).clamp(-1.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub e_t: f64,
    pub elapsed: f64,
    pub e_next: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub alpha: f64,
    pub beta0: f64,
    pub beta2: f64,
    pub r_squared: f64,
}

/// Log-linear regression `ln E_{t+T} = b0 + b1 ln T + b2 ln E_t`; α = -b1.
pub fn fit_decay(samples: &[DecaySample]) -> Result<DecayFit> {
    if samples.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: samples.len(),
        });
    }
    for s in samples {
        if !(s.e_t > 0.0) || !(s.e_next > 0.0) {
            return Err(Error::LogDomain(s.e_t.min(s.e_next)));
        }
        if !(s.elapsed >= 1.0) {
            return Err(Error::invalid("elapsed", format!("{} < 1 day", s.elapsed)));
        }
    }
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| vec![1.0, s.elapsed.ln(), s.e_t.ln()])
        .collect();
    let y: Vec<f64> = samples.iter().map(|s| s.e_next.ln()).collect();
    let fit = ols(&rows, &y)?;
    Ok(DecayFit {
        alpha: -fit.coefficients[1],
        beta0: fit.coefficients[0],
        beta2: fit.coefficients[2],
        r_squared: fit.r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatelliteRow {
    pub y: f64,
    pub x: f64,
    pub v_x: f64,
    pub mcfi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatelliteFit {
    pub coefficients: [f64; 5],
    pub std_errors: [f64; 5],
    pub p_values: [f64; 5],
    pub r_squared: f64,
}

/// Global interaction regression without intercept on
/// `(X, V_X, MCFI, X·MCFI, V_X·MCFI)`.
pub fn fit_satellite(rows: &[SatelliteRow]) -> Result<SatelliteFit> {
    if rows.len() < 6 {
        return Err(Error::InsufficientData {
            needed: 6,
            got: rows.len(),
        });
    }
    let design: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.x, r.v_x, r.mcfi, r.x * r.mcfi, r.v_x * r.mcfi])
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let fit = ols(&design, &y)?;
    let arr = |v: &[f64]| -> [f64; 5] { v.try_into().expect("five columns") };
    Ok(SatelliteFit {
        coefficients: arr(&fit.coefficients),
        std_errors: arr(&fit.std_errors),
        p_values: arr(&fit.p_values),
        r_squared: fit.r_squared,
    })
}

pub const HOLIDAY_SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolidayTest {
    pub t: f64,
    pub p: f64,
    pub ratio: f64,
    pub multiplier: f64,
}

/// Acceptance rule: the mean ratio is adopted only when significant.
pub fn holiday_multiplier(p: f64, ratio: f64) -> f64 {
    if p < HOLIDAY_SIGNIFICANCE {
        ratio
    } else {
        1.0
    }
}

pub fn holiday_test(post_holiday: &[f64], normal: &[f64]) -> Result<HolidayTest> {
    let tt = welch_t_one_tailed(post_holiday, normal)?;
    let base = mean(normal);
    if base == 0.0 {
        return Err(Error::Undefined("normal-day mean is zero".into()));
    }
    let ratio = mean(post_holiday) / base;
    Ok(HolidayTest {
        t: tt.t,
        p: tt.p,
        ratio,
        multiplier: holiday_multiplier(tt.p, ratio),
    })
}
