use anyhow::Result;

use crate::daystate::load_day_states;
use crate::output::csv_bytes;
use crate::pipeline::{macro_table, MacroCsvRow};
use crate::{MacroArgs, Outcome, RunContext};

pub fn run(args: &MacroArgs, ctx: &RunContext) -> Result<Outcome> {
    let states = load_day_states(&args.day_states)?;
    let rows = macro_table(&states, args.lag, &ctx.config)?;
    let csv_rows: Vec<MacroCsvRow> = rows.iter().map(MacroCsvRow::from).collect();

    let mut summary = String::from("date        mdi     mcfi    regime\n");
    for r in &rows {
        summary.push_str(&format!(
            "{}  {:.4}  {:.4}  {} ({:.3})\n",
            r.state.date,
            r.state.mdi,
            r.state.mcfi,
            r.membership.dominant.name(),
            r.membership.probability(r.membership.dominant)
        ));
    }
    let mut out = Outcome::default();
    out.artifacts.add("macro.csv", csv_bytes(&csv_rows)?);
    out.inputs = vec![args.day_states.clone()];
    out.summary = summary;
    Ok(out)
}
