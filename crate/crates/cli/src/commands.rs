use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::json;
use walkforge::evolve::{
    agreement_fraction, asymptotic_density, closed_form_wavefield, evolve_qw, evolve_qw_complex, evolve_rw_exact,
    simulate_rw, symmetric_hadamard_density, McConfig,
};
use walkforge::feasibility::{flux_from_rho, validate_sequence, FeasibilityReport};
use walkforge::formats::{self, Format, ScheduleKind, SCHEMA_VERSION};
use walkforge::lattice::probability_from_wavefield;
use walkforge::synthesis::{mimic_quantum_walk, reconstruct_wavefield, synthesize_coins, synthesize_jumps};
use walkforge::targets::{load_target, TargetKind, TargetSpec};
use walkforge::{CoinSchedule, HomogeneousCoinParams, JumpSchedule, ProbabilitySequence};

use crate::{CoinArgs, Command, EngineArgs, Figure, OutFormat, OutputArgs, TargetArgs, Walk};

/// Exit status of a command that ran to completion.
pub enum Status {
    Pass,
    CheckFailed,
    Infeasible,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Pass => ExitCode::SUCCESS,
            Status::CheckFailed => ExitCode::from(1),
            Status::Infeasible => ExitCode::from(2),
        }
    }
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Validate { target, tol, output } => validate(&target, tol, &output),
        Command::Synth { target, walk, output } => synth(&target, walk, &output),
        Command::Evolve { walk, schedule, init, horizon, output } => evolve(walk, &schedule, &init, horizon, &output),
        Command::Mc { schedule, trajectories, seed, horizon, output } => {
            monte_carlo(&schedule, trajectories, seed, horizon, &output)
        }
        Command::Hadamard { coin, horizon, engine, output } => hadamard(&coin, horizon, &engine, &output),
        Command::Roundtrip { target, walk, tol } => roundtrip(&target, walk, tol),
        Command::Figure { which, trajectories, seed, horizon, out } => {
            figure(which, trajectories, seed, horizon, out.as_deref())
        }
    }
}

fn format_of(f: OutFormat) -> Format {
    match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    }
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Writes `name.<ext>` into the output directory, or to stdout when none is given.
fn emit(dir: Option<&Path>, file_name: &str, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(file_name);
            let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn load_spec(args: &TargetArgs) -> Result<ProbabilitySequence> {
    let kind: TargetKind = args.target.parse()?;
    match (&kind, args.horizon) {
        (TargetKind::File(path), None) => {
            Ok(load_target(path).with_context(|| format!("loading target {}", path.display()))?)
        }
        (_, Some(horizon)) => Ok(TargetSpec::new(kind, horizon)?.build()?),
        (_, None) => bail!("-T/--horizon is required for the {} target", args.target),
    }
}

fn report_violations(report: &FeasibilityReport) {
    const SHOWN: usize = 20;
    for v in report.violations.iter().take(SHOWN) {
        eprintln!("infeasible at n={} t={}: |J| = {} > rho = {}", v.n, v.t, v.flux.abs(), v.rho);
    }
    if report.violations.len() > SHOWN {
        eprintln!("... {} more violating sites", report.violations.len() - SHOWN);
    }
    if report.violations.is_empty() && !report.feasible {
        eprintln!("flux recursions disagree by {:e}; the input does not conserve probability", report.pass_disagreement);
    }
}

/// Validates and returns `None` after reporting when the target is infeasible.
fn feasible_target(args: &TargetArgs) -> Result<Option<ProbabilitySequence>> {
    let rho = load_spec(args)?;
    let report = walkforge::validate(&rho);
    if report.feasible {
        Ok(Some(rho))
    } else {
        report_violations(&report);
        Ok(None)
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn validate(target: &TargetArgs, tol: f64, output: &OutputArgs) -> Result<Status> {
    let rho = load_spec(target)?;
    let report = validate_sequence(&rho, tol);
    let mut doc = serde_json::to_value(&report)?;
    doc["schema_version"] = json!(SCHEMA_VERSION);
    doc["horizon"] = json!(rho.horizon());
    print_json(&doc)?;
    if let Some(dir) = &output.out {
        emit(Some(dir), "report.json", |w| Ok(serde_json::to_writer_pretty(w, &doc)?))?;
    }
    Ok(if report.feasible { Status::Pass } else { Status::Infeasible })
}

fn synth(target: &TargetArgs, walk: Walk, output: &OutputArgs) -> Result<Status> {
    let Some(rho) = feasible_target(target)? else {
        return Ok(Status::Infeasible);
    };
    let format = format_of(output.format);
    let ext = extension(format);
    let dir = output.out.as_deref();
    match walk {
        Walk::Qw => {
            let w = reconstruct_wavefield(&rho)?;
            let coins = synthesize_coins(&rho, &w)?;
            emit(dir, &format!("coins.{ext}"), |out| Ok(formats::write_coin_schedule(&coins, format, out)?))?;
            if dir.is_some() {
                emit(dir, &format!("wavefield.{ext}"), |out| Ok(formats::write_wavefield(&w, format, out)?))?;
            }
        }
        Walk::Rw => {
            let flux = flux_from_rho(&rho);
            let jumps = synthesize_jumps(&rho, &flux)?;
            emit(dir, &format!("jumps.{ext}"), |out| Ok(formats::write_jump_schedule(&jumps, format, out)?))?;
            if dir.is_some() {
                emit(dir, &format!("flux.{ext}"), |out| Ok(formats::write_flux(&flux, format, out)?))?;
            }
        }
    }
    Ok(Status::Pass)
}

fn parse_init(raw: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("--init expects two comma-separated amplitudes, got '{raw}'");
    }
    let a = parts[0].parse().with_context(|| format!("bad amplitude '{}'", parts[0]))?;
    let b = parts[1].parse().with_context(|| format!("bad amplitude '{}'", parts[1]))?;
    Ok((a, b))
}

fn read_schedule_text(path: &Path, walk: Walk) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading schedule {}", path.display()))?;
    let expected = match walk {
        Walk::Qw => ScheduleKind::Coin,
        Walk::Rw => ScheduleKind::Jump,
    };
    if let Some(kind) = formats::schedule_kind(&text) {
        if kind != expected {
            let (found, needed) = match walk {
                Walk::Qw => ("jump", "quantum walk (coin schedule)"),
                Walk::Rw => ("coin", "random walk (jump schedule)"),
            };
            bail!("{} holds a {found} schedule but --walk asks for a {needed}", path.display());
        }
    }
    Ok(text)
}

fn steps_for(requested: Option<usize>, available: usize) -> Result<usize> {
    match requested {
        Some(t) if t > available => bail!("-T {t} exceeds the schedule's {available} steps"),
        Some(t) => Ok(t),
        None => Ok(available),
    }
}

fn evolve(walk: Walk, schedule: &Path, init: &str, horizon: Option<usize>, output: &OutputArgs) -> Result<Status> {
    let text = read_schedule_text(schedule, walk)?;
    let format = format_of(output.format);
    let ext = extension(format);
    let dir = output.out.as_deref();
    match walk {
        Walk::Qw => {
            let coins: CoinSchedule = formats::parse_coin_schedule(&text)?;
            let steps = steps_for(horizon, coins.horizon())?;
            let w = evolve_qw(&coins.truncated(steps)?, parse_init(init)?)?;
            let rho = probability_from_wavefield(&w)?;
            emit(dir, &format!("rho.{ext}"), |out| Ok(formats::write_probability(&rho, format, out)?))?;
            if dir.is_some() {
                emit(dir, &format!("wavefield.{ext}"), |out| Ok(formats::write_wavefield(&w, format, out)?))?;
            }
        }
        Walk::Rw => {
            let jumps: JumpSchedule = formats::parse_jump_schedule(&text)?;
            let steps = steps_for(horizon, jumps.horizon())?;
            let rho = evolve_rw_exact(&jumps, steps)?;
            emit(dir, &format!("rho.{ext}"), |out| Ok(formats::write_probability(&rho, format, out)?))?;
        }
    }
    Ok(Status::Pass)
}

fn monte_carlo(schedule: &Path, trajectories: u64, seed: u64, horizon: Option<usize>, output: &OutputArgs) -> Result<Status> {
    let text = read_schedule_text(schedule, Walk::Rw)?;
    let jumps: JumpSchedule = formats::parse_jump_schedule(&text)?;
    let steps = steps_for(horizon, jumps.horizon())?;
    let cfg = McConfig::new(trajectories, seed, steps)?;
    let (rho, stderr) = simulate_rw(&jumps, &cfg)?;
    let format = format_of(output.format);
    let name = format!("estimate.{}", extension(format));
    emit(output.out.as_deref(), &name, |out| match format {
        Format::Csv => Ok(formats::write_estimate_csv(&rho, stderr.lattice(), out)?),
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "horizon": steps,
                "trajectories": trajectories,
                "seed": seed,
                "slices": rho.lattice().slices(),
                "stderr": stderr.lattice().slices(),
            });
            serde_json::to_writer(&mut *out, &doc)?;
            writeln!(out)?;
            Ok(())
        }
    })?;
    Ok(Status::Pass)
}

fn hadamard(coin: &CoinArgs, horizon: usize, engine: &EngineArgs, output: &OutputArgs) -> Result<Status> {
    let params =
        HomogeneousCoinParams::new(coin.theta, coin.eta, coin.gamma).with_phases(coin.chi, coin.alpha, coin.beta);
    params.validate()?;
    let format = format_of(output.format);
    let ext = extension(format);
    let dir = output.out.as_deref();
    if engine.asymptotic {
        let rows: Vec<(i64, f64)> = (0..=horizon)
            .map(|k| 2 * k as i64 - horizon as i64)
            .filter_map(|n| asymptotic_density(&params, n, horizon).ok().map(|v| (n, v)))
            .collect();
        if rows.is_empty() {
            bail!("no site of slice {horizon} lies inside the bulk |n| < t |cos theta|");
        }
        emit(dir, &format!("asymptotic.{ext}"), |out| {
            match format {
                Format::Csv => {
                    writeln!(out, "t,n,value")?;
                    for (n, v) in &rows {
                        writeln!(out, "{horizon},{n},{}", formats::fmt_num(*v))?;
                    }
                }
                Format::Json => {
                    let sites: Vec<_> = rows.iter().map(|(n, v)| json!({"n": n, "value": v})).collect();
                    serde_json::to_writer(&mut *out, &json!({"schema_version": SCHEMA_VERSION, "t": horizon, "sites": sites}))?;
                    writeln!(out)?;
                }
            }
            Ok(())
        })?;
        return Ok(Status::Pass);
    }
    let field = if engine.closed_form {
        closed_form_wavefield(&params, horizon)?
    } else {
        evolve_qw_complex(&params, horizon)?
    };
    let rho = field.probability()?;
    emit(dir, &format!("rho.{ext}"), |out| Ok(formats::write_probability(&rho, format, out)?))?;
    if dir.is_some() {
        emit(dir, &format!("wavefield.{ext}"), |out| Ok(formats::write_complex_wavefield(&field, format, out)?))?;
    }
    Ok(Status::Pass)
}

fn roundtrip(target: &TargetArgs, walk: Walk, tol: f64) -> Result<Status> {
    let Some(rho) = feasible_target(target)? else {
        return Ok(Status::Infeasible);
    };
    let back = match walk {
        Walk::Qw => {
            let w = reconstruct_wavefield(&rho)?;
            let coins = synthesize_coins(&rho, &w)?;
            probability_from_wavefield(&evolve_qw(&coins, (1.0, 0.0))?)?
        }
        Walk::Rw => {
            let jumps = synthesize_jumps(&rho, &flux_from_rho(&rho))?;
            evolve_rw_exact(&jumps, rho.horizon())?
        }
    };
    let max_error = back.max_abs_diff(&rho);
    let pass = max_error < tol;
    print_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "target": target.target,
        "walk": match walk { Walk::Qw => "qw", Walk::Rw => "rw" },
        "horizon": rho.horizon(),
        "max_error": max_error,
        "tolerance": tol,
        "pass": pass,
    }))?;
    Ok(if pass { Status::Pass } else { Status::CheckFailed })
}

fn figure(which: Figure, trajectories: u64, seed: u64, horizon: usize, out: Option<&Path>) -> Result<Status> {
    let params = match which {
        Figure::Fig1 => HomogeneousCoinParams::quasi_symmetric_hadamard(),
        Figure::Fig2 => HomogeneousCoinParams::symmetric_hadamard(),
    };
    let field = evolve_qw_complex(&params, horizon)?;
    let mut exact = field.probability()?;
    if which == Figure::Fig2 {
        // closed-form density of the symmetric walk
        let slices = (0..=horizon)
            .map(|t| {
                (0..=t)
                    .map(|k| symmetric_hadamard_density(2 * k as i64 - t as i64, t, params.theta))
                    .collect::<walkforge::Result<Vec<f64>>>()
            })
            .collect::<walkforge::Result<Vec<_>>>()?;
        exact = ProbabilitySequence::new(slices)?;
    }
    let jumps = mimic_quantum_walk(&field)?;
    let cfg = McConfig::new(trajectories, seed, horizon)?;
    let (estimate, stderr) = simulate_rw(&jumps, &cfg)?;
    let fraction = agreement_fraction(&exact, &estimate, &stderr, trajectories, horizon, 3.0);
    let name = match which {
        Figure::Fig1 => "fig1.csv",
        Figure::Fig2 => "fig2.csv",
    };
    emit(out, name, |w| {
        writeln!(w, "n,exact,mc,stderr")?;
        for k in 0..=horizon {
            let n = 2 * k as i64 - horizon as i64;
            writeln!(
                w,
                "{n},{},{},{}",
                formats::fmt_num(exact.rho(n, horizon)),
                formats::fmt_num(estimate.rho(n, horizon)),
                formats::fmt_num(stderr.stderr(n, horizon)),
            )?;
        }
        Ok(())
    })?;
    eprintln!(
        "{:.1}% of the {} sites at t={horizon} lie within 3 standard errors",
        100.0 * fraction,
        horizon + 1
    );
    Ok(if fraction >= 0.99 { Status::Pass } else { Status::CheckFailed })
}
