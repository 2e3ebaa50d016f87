pub mod abtest;
pub mod backtest;
pub mod calibrate;
pub mod fingerprint;
pub mod ingest;
pub mod macro_state;
pub mod perturb;
pub mod simulate;
pub mod validate;

use anyhow::Result;

use crate::{Command, Outcome, RunContext};

pub use ingest::read_report_dir;

pub fn dispatch(command: &Command, ctx: &RunContext) -> Result<Outcome> {
    match command {
        Command::Ingest(a) => ingest::run(a, ctx),
        Command::Macro(a) => macro_state::run(a, ctx),
        Command::Simulate(a) => simulate::run(a, ctx),
        Command::Backtest(a) => backtest::run(a, ctx),
        Command::Abtest(a) => abtest::run(a, ctx),
        Command::Fingerprint(a) => fingerprint::run(a, ctx),
        Command::Perturb(a) => perturb::run(a, ctx),
        Command::Calibrate(a) => calibrate::run(a, ctx),
        Command::Validate(a) => validate::run(a, ctx),
    }
}

fn parse_date(text: &str, what: &str) -> Result<chrono::NaiveDate, coglab_core::Error> {
    chrono::NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d")
        .map_err(|e| coglab_core::Error::parse(what.to_string(), format!("{text:?}: {e}")))
}
