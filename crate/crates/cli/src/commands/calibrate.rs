use anyhow::{Context, Result};
use coglab_core::affect::{
    fit_decay, fit_satellite, holiday_test, DecayEntry, DecaySample, SatelliteRow,
};
use coglab_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{CalibrateArgs, CalibrationTarget, Outcome, RunContext};

fn read_rows<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, Error> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec.map_err(|e| Error::parse("calibration data", e))?);
    }
    if rows.is_empty() {
        return Err(Error::NoInput("calibration data has no rows".into()));
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct HolidayRow {
    group: String,
    value: f64,
}

#[derive(Serialize)]
struct DecayReport {
    alpha: f64,
    beta0: f64,
    beta2: f64,
    r_squared: f64,
    /// Days for a unit score to halve under the fitted law.
    half_life_days: f64,
    samples: usize,
}

pub fn run(args: &CalibrateArgs, _ctx: &RunContext) -> Result<Outcome> {
    let text = crate::read_text(&args.data)?;
    let context = || format!("in {}", args.data.display());
    let mut out = Outcome::default();
    match args.target {
        CalibrationTarget::Decay => {
            let samples: Vec<DecaySample> = read_rows(&text).with_context(context)?;
            let fit = fit_decay(&samples)?;
            let entry = DecayEntry {
                beta0: fit.beta0,
                beta2: fit.beta2,
                ..DecayEntry::new(fit.alpha, 0.0)
            };
            let report = DecayReport {
                alpha: fit.alpha,
                beta0: fit.beta0,
                beta2: fit.beta2,
                r_squared: fit.r_squared,
                half_life_days: entry.half_life(1.0),
                samples: samples.len(),
            };
            out.summary = format!(
                "decay alpha {:.6}  R^2 {:.4}  half-life {:.3} days\n",
                report.alpha, report.r_squared, report.half_life_days
            );
            out.artifacts.add_json("calibration.json", &report)?;
        }
        CalibrationTarget::Satellite => {
            let rows: Vec<SatelliteRow> = read_rows(&text).with_context(context)?;
            let fit = fit_satellite(&rows)?;
            let names = ["x", "v_x", "mcfi", "x*mcfi", "v_x*mcfi"];
            let mut summary = format!("{:<10} {:>10} {:>10} {:>10}\n", "term", "coef", "se", "p");
            for (i, name) in names.iter().enumerate() {
                summary.push_str(&format!(
                    "{:<10} {:>10.4} {:>10.4} {:>10.4}\n",
                    name, fit.coefficients[i], fit.std_errors[i], fit.p_values[i]
                ));
            }
            summary.push_str(&format!("R^2 {:.4}\n", fit.r_squared));
            out.summary = summary;
            out.artifacts.add_json("calibration.json", &fit)?;
        }
        CalibrationTarget::Holiday => {
            let rows: Vec<HolidayRow> = read_rows(&text).with_context(context)?;
            let (mut post, mut normal) = (Vec::new(), Vec::new());
            for r in rows {
                match r.group.to_ascii_lowercase().as_str() {
                    "post_holiday" | "post" | "holiday" => post.push(r.value),
                    "normal" => normal.push(r.value),
                    other => {
                        return Err(Error::parse(
                            format!("in {}", args.data.display()),
                            format!("unknown group `{other}`"),
                        )
                        .into())
                    }
                }
            }
            let test = holiday_test(&post, &normal)?;
            out.summary = format!(
                "t {:.4}  p {:.4}  ratio {:.4}  multiplier {:.4}\n",
                test.t, test.p, test.ratio, test.multiplier
            );
            out.artifacts.add_json("calibration.json", &test)?;
        }
    }
    out.inputs = vec![args.data.clone()];
    Ok(out)
}
