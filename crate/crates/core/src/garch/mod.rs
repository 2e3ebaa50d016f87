//! Quadrant-switched GJR-GARCH over emotion-score innovations.
//!
//! Each macro quadrant owns a parameter range table; the engine either picks
//! the active quadrant's selection point each day (dynamic) or uses the mean
//! of all six selections (static baseline).

pub mod pir;

pub use pir::{pir_simulate, PirConfig, PirState};

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::macrostate::QuadrantId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub omega: f64,
    pub alpha: f64,
    pub alpha_neg: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(omega: f64, alpha: f64, alpha_neg: f64, beta: f64) -> Result<Self> {
        let p = Self {
            omega,
            alpha,
            alpha_neg,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::invalid(
                "omega",
                format!("{} must be > 0", self.omega),
            ));
        }
        for (name, v) in [
            ("alpha", self.alpha),
            ("alpha_neg", self.alpha_neg),
            ("beta", self.beta),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} must be >= 0")));
            }
        }
        Ok(())
    }

    /// `α + α⁻/2 + β`; below one for a covariance-stationary process under
    /// symmetric innovations.
    pub fn persistence(&self) -> f64 {
        self.alpha + 0.5 * self.alpha_neg + self.beta
    }

    pub fn long_run_variance(&self) -> Option<f64> {
        let p = self.persistence();
        (p < 1.0).then(|| self.omega / (1.0 - p))
    }
}

/// `h_t = ω + α ε² + α⁻ ε² 1[ε<0] + β h_{t-1}`.
pub fn gjr_step(h_prev: f64, eps: f64, p: &GarchParams) -> f64 {
    let e2 = eps * eps;
    let leverage = if eps < 0.0 { p.alpha_neg * e2 } else { 0.0 };
    p.omega + p.alpha * e2 + leverage + p.beta * h_prev
}

/// Closed interval; deserializes from `[lo, hi]` or a single number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RangeRepr", into = "[f64; 2]")]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    Point(f64),
    Pair([f64; 2]),
}

impl From<RangeRepr> for ParamRange {
    fn from(r: RangeRepr) -> Self {
        match r {
            RangeRepr::Point(v) => ParamRange { lo: v, hi: v },
            RangeRepr::Pair([lo, hi]) => ParamRange { lo, hi },
        }
    }
}

impl From<ParamRange> for [f64; 2] {
    fn from(r: ParamRange) -> Self {
        [r.lo, r.hi]
    }
}

impl ParamRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn at(&self, point: f64) -> f64 {
        self.lo + point * (self.hi - self.lo)
    }

    pub fn contains_range(&self, other: &ParamRange) -> bool {
        const EPS: f64 = 1e-12;
        other.lo >= self.lo - EPS && other.hi <= self.hi + EPS
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamOverride {
    pub omega: Option<f64>,
    pub alpha: Option<f64>,
    pub alpha_neg: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantParams {
    pub core_dimension: String,
    pub omega: ParamRange,
    pub alpha: ParamRange,
    pub alpha_neg: ParamRange,
    pub beta: ParamRange,
    /// Position inside each range, 0 = lower bound, 1 = upper bound.
    #[serde(default = "midpoint")]
    pub point: f64,
    #[serde(default, rename = "override")]
    pub overrides: ParamOverride,
}

fn midpoint() -> f64 {
    0.5
}

impl QuadrantParams {
    fn canonical(
        dim: &str,
        omega: [f64; 2],
        alpha: [f64; 2],
        alpha_neg: [f64; 2],
        beta: [f64; 2],
    ) -> Self {
        let r = |[lo, hi]: [f64; 2]| ParamRange::new(lo, hi);
        Self {
            core_dimension: dim.to_string(),
            omega: r(omega),
            alpha: r(alpha),
            alpha_neg: r(alpha_neg),
            beta: r(beta),
            point: 0.5,
            overrides: ParamOverride::default(),
        }
    }

    fn ranges(&self) -> [(&'static str, &ParamRange); 4] {
        [
            ("omega", &self.omega),
            ("alpha", &self.alpha),
            ("alpha_neg", &self.alpha_neg),
            ("beta", &self.beta),
        ]
    }

    pub fn selection(&self) -> GarchParams {
        let o = &self.overrides;
        GarchParams {
            omega: o.omega.unwrap_or_else(|| self.omega.at(self.point)),
            alpha: o.alpha.unwrap_or_else(|| self.alpha.at(self.point)),
            alpha_neg: o.alpha_neg.unwrap_or_else(|| self.alpha_neg.at(self.point)),
            beta: o.beta.unwrap_or_else(|| self.beta.at(self.point)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GarchMode {
    #[default]
    Dynamic,
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamArsenal {
    #[serde(default)]
    pub strict_stationarity: bool,
    pub quadrants: BTreeMap<QuadrantId, QuadrantParams>,
}

impl Default for ParamArsenal {
    /// Reference ranges; open-ended cells closed at [0, 0.05] and [0.90, 0.99].
    fn default() -> Self {
        use QuadrantId::*;
        let q = QuadrantParams::canonical;
        Self {
            strict_stationarity: false,
            quadrants: BTreeMap::from([
                (
                    A,
                    q("joy", [0.15, 0.25], [0.10, 0.20], [0.0, 0.05], [0.75, 0.85]),
                ),
                (
                    B,
                    q(
                        "fear",
                        [0.10, 0.15],
                        [0.05, 0.10],
                        [0.08, 0.15],
                        [0.80, 0.90],
                    ),
                ),
                (
                    C,
                    q("fear", [0.0, 0.05], [0.0, 0.05], [0.15, 0.25], [0.90, 0.99]),
                ),
                (
                    D,
                    q(
                        "sadness",
                        [0.08, 0.12],
                        [0.0, 0.05],
                        [0.08, 0.15],
                        [0.85, 0.95],
                    ),
                ),
                (
                    E,
                    q(
                        "fear",
                        [0.05, 0.10],
                        [0.02, 0.05],
                        [0.15, 0.20],
                        [0.85, 0.90],
                    ),
                ),
                (
                    F,
                    q("joy", [0.01, 0.05], [0.10, 0.15], [0.0, 0.05], [0.75, 0.80]),
                ),
            ]),
        }
    }
}

impl ParamArsenal {
    pub fn quadrant(&self, q: QuadrantId) -> Result<&QuadrantParams> {
        self.quadrants
            .get(&q)
            .ok_or_else(|| Error::UnknownQuadrant(q.name().to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for q in QuadrantId::ALL {
            let qp = self.quadrant(q)?;
            for (name, r) in qp.ranges() {
                if !(r.lo <= r.hi) || !r.lo.is_finite() || !r.hi.is_finite() {
                    return Err(Error::invalid(
                        format!("arsenal.{}.{name}", q.letter()),
                        format!("range [{}, {}] is not ordered", r.lo, r.hi),
                    ));
                }
            }
            if !(0.0..=1.0).contains(&qp.point) {
                return Err(Error::OutOfRange {
                    name: format!("arsenal.{}.point", q.letter()),
                    value: qp.point,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let sel = qp.selection();
            sel.validate()
                .map_err(|e| Error::Config(format!("arsenal.{}: {e}", q.letter())))?;
            if self.strict_stationarity && sel.persistence() >= 1.0 {
                return Err(Error::Config(format!(
                    "arsenal.{}: persistence {:.4} >= 1 under strict_stationarity",
                    q.letter(),
                    sel.persistence()
                )));
            }
        }
        Ok(())
    }

    /// Checks every configured range against the reference table.
    /// Overrides are exempt.
    pub fn check_reference_ranges(&self) -> Result<()> {
        let reference = ParamArsenal::default();
        for q in QuadrantId::ALL {
            let mine = self.quadrant(q)?;
            let canon = reference.quadrant(q)?;
            for ((name, r), (_, c)) in mine.ranges().into_iter().zip(canon.ranges()) {
                if !c.contains_range(r) {
                    let value = if r.lo < c.lo { r.lo } else { r.hi };
                    return Err(Error::OutOfRange {
                        name: format!("arsenal.{}.{name}", q.letter()),
                        value,
                        lo: c.lo,
                        hi: c.hi,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn static_params(&self) -> Result<GarchParams> {
        let mut acc = [0.0; 4];
        for q in QuadrantId::ALL {
            let s = self.quadrant(q)?.selection();
            acc[0] += s.omega;
            acc[1] += s.alpha;
            acc[2] += s.alpha_neg;
            acc[3] += s.beta;
        }
        let n = QuadrantId::ALL.len() as f64;
        Ok(GarchParams {
            omega: acc[0] / n,
            alpha: acc[1] / n,
            alpha_neg: acc[2] / n,
            beta: acc[3] / n,
        })
    }

    pub fn select(&self, q: QuadrantId, mode: GarchMode) -> Result<GarchParams> {
        match mode {
            GarchMode::Dynamic => Ok(self.quadrant(q)?.selection()),
            GarchMode::Static => self.static_params(),
        }
    }
}

pub fn select_params(
    q: QuadrantId,
    arsenal: &ParamArsenal,
    mode: GarchMode,
) -> Result<GarchParams> {
    arsenal.select(q, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnovationMode {
    /// `ε_t = E_t - E_{t-1}`.
    #[default]
    FirstDifference,
    /// `ε_t = E_t - mean(E_0..E_{t-1})`.
    MeanResidual,
}

pub fn innovations(scores: &[f64], mode: InnovationMode) -> Vec<f64> {
    let mut out = vec![0.0; scores.len()];
    let mut running = 0.0;
    for t in 1..scores.len() {
        running += scores[t - 1];
        out[t] = match mode {
            InnovationMode::FirstDifference => scores[t] - scores[t - 1],
            InnovationMode::MeanResidual => scores[t] - running / t as f64,
        };
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityRun {
    pub h: Vec<f64>,
    pub innovations: Vec<f64>,
    pub drift: Vec<DriftRecord>,
}

/// One drift-log row: the parameters in force on `date` and the resulting variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftRecord {
    pub date: NaiveDate,
    pub dim: String,
    pub omega: f64,
    pub alpha: f64,
    pub alpha_neg: f64,
    pub beta: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilityOptions {
    pub mode: GarchMode,
    pub innovation: InnovationMode,
    pub h0: f64,
}

impl Default for VolatilityOptions {
    fn default() -> Self {
        Self {
            mode: GarchMode::Dynamic,
            innovation: InnovationMode::FirstDifference,
            h0: 0.0,
        }
    }
}

/// Runs the variance recursion over one dimension's daily scores.
///
/// `h[0] = h0`; for `t >= 1`, `h[t] = gjr_step(h[t-1], ε_t, params(quadrant_t))`.
/// The drift log has one row per day with the parameters in force.
pub fn run_volatility(
    dim: &str,
    dates: &[NaiveDate],
    scores: &[f64],
    quadrants: &[QuadrantId],
    arsenal: &ParamArsenal,
    opts: VolatilityOptions,
) -> Result<VolatilityRun> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if dates.len() != n || quadrants.len() != n {
        return Err(Error::Misaligned(format!(
            "{n} scores, {} dates, {} quadrants",
            dates.len(),
            quadrants.len()
        )));
    }
    if !(opts.h0 >= 0.0) {
        return Err(Error::invalid("h0", "must be >= 0"));
    }
    let eps = innovations(scores, opts.innovation);
    let mut h = Vec::with_capacity(n);
    let mut drift = Vec::with_capacity(n);
    for t in 0..n {
        let p = arsenal.select(quadrants[t], opts.mode)?;
        let ht = if t == 0 {
            opts.h0
        } else {
            gjr_step(h[t - 1], eps[t], &p)
        };
        h.push(ht);
        drift.push(DriftRecord {
            date: dates[t],
            dim: dim.to_string(),
            omega: p.omega,
            alpha: p.alpha,
            alpha_neg: p.alpha_neg,
            beta: p.beta,
            h: ht,
        });
    }
    Ok(VolatilityRun {
        h,
        innovations: eps,
        drift,
    })
}

pub const FREEZE_MDI: f64 = 0.8;
pub const FREEZE_LIQUIDITY: f64 = 0.3;

/// Crash-determinism rule: cognitive divergence together with a liquidity vacuum.
pub fn freeze_predicate(mdi: f64, liquidity: f64) -> bool {
    mdi > FREEZE_MDI && liquidity < FREEZE_LIQUIDITY
}
