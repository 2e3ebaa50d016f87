use anyhow::Result;
use coglab_core::ingest::ParseOptions;

use super::read_report_dir;
use crate::{Outcome, RunContext, ValidateArgs};

pub fn run(args: &ValidateArgs, ctx: &RunContext) -> Result<Outcome> {
    let mut out = Outcome::default();
    out.artifacts
        .add("config.toml", ctx.config.to_toml_string()?);
    let mut summary = format!(
        "config ok ({} dimensions, strict ranges {})\n",
        ctx.config.registry.labels.len(),
        if ctx.config.strict_ranges {
            "on"
        } else {
            "off"
        }
    );
    if let Some(dir) = &args.reports {
        let opts = ParseOptions {
            registry: ctx.config.registry()?,
            ..ParseOptions::default()
        };
        let (files, reports) = read_report_dir(dir, opts)?;
        summary.push_str(&format!(
            "{} report(s) in {} file(s) ok\n",
            reports.len(),
            files.len()
        ));
        out.inputs = files;
    }
    out.summary = summary;
    Ok(out)
}
