use anyhow::{bail, Result};
use coglab_core::garch::{pir_simulate, GarchMode, PirConfig, PirState};
use coglab_core::macrostate::MacroState;
use coglab_core::Error;

use super::parse_date;
use crate::daystate::load_day_states;
use crate::{GarchModeArg, Outcome, RunContext, SimulateArgs};

/// `DAY:CLASS` pairs into a per-day schedule (`schedule[k]` hits day `k + 1`).
pub fn shock_schedule(specs: &[String], horizon: usize) -> Result<Vec<Option<String>>, Error> {
    let mut schedule: Vec<Option<String>> = Vec::new();
    for spec in specs {
        let (day, class) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse("--shock", format!("{spec:?} is not DAY:CLASS")))?;
        let day: usize = day
            .trim()
            .parse()
            .map_err(|e| Error::parse("--shock", format!("{spec:?}: {e}")))?;
        if day == 0 || day > horizon {
            return Err(Error::invalid(
                "--shock",
                format!("day {day} outside 1..={horizon}"),
            ));
        }
        if schedule.len() < day {
            schedule.resize(day, None);
        }
        if schedule[day - 1].is_some() {
            return Err(Error::invalid(
                "--shock",
                format!("two shocks on day {day}"),
            ));
        }
        schedule[day - 1] = Some(class.trim().to_string());
    }
    Ok(schedule)
}

fn trajectory_csv(path: &[PirState]) -> Result<Vec<u8>> {
    let labels = path[0].day.registry().labels().to_vec();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = [
        "step", "date", "shock", "fragile", "mdi", "mcfi", "v_mdi", "dominant", "p_a", "p_b",
        "p_c", "p_d", "p_e", "p_f",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for prefix in ["novice", "veteran", "h"] {
        header.extend(labels.iter().map(|l| format!("{prefix}.{l}")));
    }
    w.write_record(&header)?;
    for (step, s) in path.iter().enumerate() {
        let mut row = vec![
            step.to_string(),
            s.day.date.to_string(),
            s.shock.clone().unwrap_or_default(),
            s.fragile.to_string(),
            s.macro_state.mdi.to_string(),
            s.macro_state.mcfi.to_string(),
            s.dynamics.v_mdi.map(|v| v.to_string()).unwrap_or_default(),
            s.membership.dominant.letter().to_string(),
        ];
        row.extend(s.membership.probabilities.iter().map(f64::to_string));
        row.extend(s.day.novice.scores().iter().map(f64::to_string));
        row.extend(s.day.veteran.scores().iter().map(f64::to_string));
        row.extend(s.h.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn run(args: &SimulateArgs, ctx: &RunContext) -> Result<Outcome> {
    let states = load_day_states(&args.day_states)?;
    let at = match &args.from {
        None => states.len() - 1,
        Some(d) => {
            let date = parse_date(d, "--from")?;
            states
                .iter()
                .position(|s| s.date == date)
                .ok_or_else(|| Error::Misaligned(format!("no day state on {date}")))?
        }
    };
    let mut cfg: PirConfig = ctx.config.pir_config();
    if let Some(mode) = args.mode {
        cfg.garch_mode = match mode {
            GarchModeArg::Dynamic => GarchMode::Dynamic,
            GarchModeArg::Static => GarchMode::Static,
        };
    }
    let previous = if at > 0 {
        Some(MacroState::from_day(&states[at - 1], cfg.mcfi_alpha)?)
    } else {
        None
    };
    let initial = PirState::initial(states[at].clone(), args.h0, previous.as_ref(), &cfg)?;
    let schedule = shock_schedule(&args.shocks, args.horizon)?;

    let seeds: Vec<u64> = match args.sweep {
        None => vec![ctx.seed],
        Some(0) => bail!(Error::invalid("--sweep", "must be at least 1")),
        Some(n) => (0..n as u64).map(|k| ctx.seed.wrapping_add(k)).collect(),
    };
    let runs: Vec<Result<Vec<PirState>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let (initial, schedule, cfg) = (&initial, &schedule, &cfg);
                scope.spawn(move || pir_simulate(initial, schedule, args.horizon, cfg, seed))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread"))
            .collect()
    });

    let mut out = Outcome::default();
    let mut summary = format!(
        "snapshot {} ({}), horizon {} day(s), garch {:?}\n",
        states[at].date,
        initial.membership.dominant.name(),
        args.horizon,
        cfg.garch_mode
    );
    for (seed, run) in seeds.iter().zip(runs) {
        let path = run?;
        let name = if args.sweep.is_some() {
            format!("pir_seed{seed}.csv")
        } else {
            "pir.csv".to_string()
        };
        out.artifacts.add(name, trajectory_csv(&path)?);
        let last = path.last().expect("initial state included");
        summary.push_str(&format!(
            "seed {seed}: day {} mdi {:.4} mcfi {:.4} regime {}\n",
            last.day.date,
            last.macro_state.mdi,
            last.macro_state.mcfi,
            last.membership.dominant.name()
        ));
    }
    out.inputs = vec![args.day_states.clone()];
    out.summary = summary;
    Ok(out)
}
