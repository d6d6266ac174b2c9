use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use xdof::dof::{self, parse_rational, ExactValue, Region, Table1Row, TradeoffPoint};
use xdof::misox::{self, misox_config};
use xdof::ria::{self, plan_ria};
use xdof::scheme::TrialOutcome;
use xdof::stia2::{self, stia_case};
use xdof::verify::{self, VerifyOptions, VerifyReport};

use crate::args::{need, resolve_seed, FileConfig, Format, RegionKind, Scheme, SimulateArgs, TableArgs, TradeoffArgs, VerifyArgs};
use crate::error::CliError;
use crate::output::{fixed, real, Sink};

/// Whether a command found every invariant it checks satisfied.
pub enum Outcome {
    Clean,
    InvariantFailure,
}

fn usage(e: xdof::Error) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Serialize)]
struct Dimensions {
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Aggregate {
    trials: usize,
    successes: usize,
    success_rate: f64,
    degenerate: usize,
    max_residual: f64,
    max_leakage: f64,
    symbols_per_set: usize,
    slots_per_set: usize,
    ratio: ExactValue,
    plateau: ExactValue,
    matches_plateau: bool,
}

#[derive(Debug, Serialize)]
struct TrialRow {
    trial: u64,
    seed: u64,
    success: bool,
    symbols: usize,
    slots: usize,
    decoded_symbols: usize,
    max_residual: f64,
    leakage: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    degenerate: Option<String>,
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    scheme: Scheme,
    dimensions: Dimensions,
    coherence: u64,
    feedback_delay: u64,
    seed: u64,
    aggregate: Aggregate,
    trials: Vec<TrialRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reports: Option<Vec<TrialOutcome>>,
}

type TrialFn = Box<dyn Fn(u64) -> xdof::Result<TrialOutcome> + Sync>;

pub fn simulate(args: SimulateArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let scheme = args
        .scheme
        .or(file.scheme)
        .ok_or_else(|| CliError::Usage("missing --scheme".into()))?;
    let dims = file.fill_dims(&args.dims);
    let trials = args.trials.or(file.trials).unwrap_or(100);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = resolve_seed(args.seed, file)?;
    let default_timing = match scheme {
        Scheme::Stia2 => stia2::DEFAULT_TIMING,
        Scheme::Ria => ria::DEFAULT_TIMING,
        Scheme::Misox => misox::DEFAULT_TIMING,
    };
    let timing = (
        args.coherence.or(file.coherence).unwrap_or(default_timing.0),
        args.feedback_delay.or(file.feedback_delay).unwrap_or(default_timing.1),
    );
    let zero = Rational64::from_integer(0);

    let (shown, plateau, run): (Dimensions, Rational64, TrialFn) = match scheme {
        Scheme::Stia2 => {
            let (a, b) = (need(dims.a, "A")?, need(dims.b, "B")?);
            let cfg = stia_case(a, b).map_err(usage)?;
            let plateau = dof::theorem1_region(a, b, zero).map_err(usage)?.dof;
            let shown = Dimensions { a: Some(a), b: Some(b), k: None, m: None, n: None };
            (shown, plateau, Box::new(move |t| stia2::stia_trial(&cfg, timing, seed, t)))
        }
        Scheme::Ria => {
            let k = need(dims.k, "K")?;
            let plan = plan_ria(k, timing.0, timing.1).map_err(usage)?;
            let plateau = dof::theorem2_region(k, zero).map_err(usage)?.dof;
            let shown = Dimensions { a: None, b: None, k: Some(k), m: None, n: None };
            (shown, plateau, Box::new(move |t| ria::ria_trial_with_plan(&plan, seed, t)))
        }
        Scheme::Misox => {
            let (m, n) = (need(dims.m, "M")?, need(dims.n, "N")?);
            let cfg = misox_config(m, n).map_err(usage)?;
            let plateau = dof::theorem3_region(m, n, zero).map_err(usage)?.dof;
            let shown = Dimensions { a: None, b: None, k: None, m: Some(m), n: Some(n) };
            (shown, plateau, Box::new(move |t| misox::misox_trial(&cfg, timing, seed, t)))
        }
    };
    if timing.1 >= timing.0 {
        return Err(CliError::Usage("--feedback-delay must be shorter than --coherence".into()));
    }

    let threads = args.threads.or(file.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    // Results come back in trial order regardless of scheduling.
    let outcomes: Vec<TrialOutcome> =
        pool.install(|| (0..trials as u64).into_par_iter().map(&run).collect::<xdof::Result<_>>())?;

    let successes = outcomes.iter().filter(|o| o.success()).count();
    let degenerate = outcomes.iter().filter(|o| o.degenerate.is_some()).count();
    let clean = outcomes.iter().find(|o| o.degenerate.is_none());
    let (symbols, slots) = clean.map_or((0, 0), |o| (o.symbols, o.slots));
    let ratio = if slots == 0 { zero } else { Rational64::new(symbols as i64, slots as i64) };
    let aggregate = Aggregate {
        trials,
        successes,
        success_rate: fixed(successes as f64 / trials as f64),
        degenerate,
        max_residual: fixed(outcomes.iter().map(TrialOutcome::max_residual).fold(0.0, f64::max)),
        max_leakage: fixed(outcomes.iter().map(|o| o.leakage).filter(|x| x.is_finite()).fold(0.0, f64::max)),
        symbols_per_set: symbols,
        slots_per_set: slots,
        ratio: ratio.into(),
        plateau: plateau.into(),
        matches_plateau: ratio == plateau,
    };
    let passed = successes == trials && aggregate.matches_plateau;
    let rows: Vec<TrialRow> = outcomes
        .iter()
        .map(|o| TrialRow {
            trial: o.trial,
            seed: o.seed,
            success: o.success(),
            symbols: o.symbols,
            slots: o.slots,
            decoded_symbols: o.decoded_symbols(),
            max_residual: fixed(o.max_residual()),
            leakage: fixed(o.leakage),
            degenerate: o.degenerate.clone(),
        })
        .collect();

    let sink = Sink { path: args.output.or(file.output.clone()) };
    match args.format.or(file.format).unwrap_or(Format::Json) {
        Format::Json => sink.json(&SimulateReport {
            scheme,
            dimensions: shown,
            coherence: timing.0,
            feedback_delay: timing.1,
            seed,
            aggregate,
            trials: rows,
            reports: args.reports.then_some(outcomes),
        })?,
        Format::Csv => {
            let header = ["trial", "seed", "success", "symbols", "slots", "decoded_symbols", "max_residual", "leakage"];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.trial.to_string(),
                        r.seed.to_string(),
                        r.success.to_string(),
                        r.symbols.to_string(),
                        r.slots.to_string(),
                        r.decoded_symbols.to_string(),
                        format!("{:e}", r.max_residual),
                        format!("{:e}", r.leakage),
                    ]
                })
                .collect();
            sink.csv(&header, &body)?
        }
        Format::Text => sink.text(&format!(
            "{scheme:?}: {successes}/{trials} trials decoded, {symbols} symbols over {slots} slots = {ratio} (plateau {plateau}), max residual {:e}\n",
            aggregate.max_residual
        ))?,
    }
    Ok(if passed { Outcome::Clean } else { Outcome::InvariantFailure })
}

fn parse_grid(grid: Option<&str>, steps: Option<u32>) -> Result<Vec<Rational64>, CliError> {
    if let Some(g) = grid {
        let values = g
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_rational(s).map_err(usage))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(CliError::Usage("--grid is empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| **v < Rational64::from_integer(0)) {
            return Err(CliError::Usage(format!("grid value {bad} is negative")));
        }
        return Ok(values);
    }
    let steps = steps.unwrap_or(20);
    if steps == 0 {
        return Err(CliError::Usage("--steps must be positive".into()));
    }
    Ok((0..=steps as i64).map(|i| Rational64::new(i, steps as i64)).collect())
}

#[derive(Debug, Serialize)]
struct TradeoffReport {
    region: Region,
    scale: u64,
    points: Vec<TradeoffPoint>,
}

pub fn tradeoff(args: TradeoffArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let kind = args
        .region
        .or(file.region)
        .or(file.scheme.map(|s| match s {
            Scheme::Stia2 => RegionKind::Theorem1,
            Scheme::Ria => RegionKind::Theorem2,
            Scheme::Misox => RegionKind::Theorem3,
        }))
        .ok_or_else(|| CliError::Usage("missing --region".into()))?;
    let dims = file.fill_dims(&args.dims);
    let region = match kind {
        RegionKind::Theorem1 => Region::Theorem1 { a: need(dims.a, "A")?, b: need(dims.b, "B")? },
        RegionKind::Theorem2 => Region::Theorem2 { k: need(dims.k, "K")? },
        RegionKind::Theorem3 => Region::Theorem3 { m: need(dims.m, "M")?, n: need(dims.n, "N")? },
        RegionKind::Corollary1 => Region::Corollary1 { a: need(dims.a, "A")?, b: need(dims.b, "B")? },
    };
    let grid = parse_grid(args.grid.as_deref().or(file.grid.as_deref()), args.steps.or(file.steps))?;
    let scale = args.scale.or(file.scale).unwrap_or(1);
    let points = region
        .sample(&grid)
        .and_then(|ps| ps.iter().map(|p| dof::scale_dof(p, scale)).collect::<xdof::Result<Vec<_>>>())
        .map_err(usage)?;

    let sink = Sink { path: args.output.or(file.output.clone()) };
    match args.format.or(file.format).unwrap_or(Format::Json) {
        Format::Json => sink.json(&TradeoffReport { region, scale, points })?,
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| {
                    vec![
                        real(dof::to_real(p.lambda)),
                        p.dof.numer().to_string(),
                        p.dof.denom().to_string(),
                        real(dof::to_real(p.dof)),
                        p.regime.to_string(),
                    ]
                })
                .collect();
            sink.csv(&["lambda", "dof_num", "dof_den", "dof_real", "regime"], &rows)?
        }
    }
    Ok(Outcome::Clean)
}

pub fn table(args: TableArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let a_list = if args.a.is_empty() { file.a.as_ref().map(|v| v.all()).unwrap_or_default() } else { args.a };
    let b_list = if args.b.is_empty() { file.b.as_ref().map(|v| v.all()).unwrap_or_default() } else { args.b };
    if a_list.is_empty() || b_list.is_empty() {
        return Err(CliError::Usage("--A and --B need at least one value each".into()));
    }
    let rows: Vec<Table1Row> = a_list
        .iter()
        .flat_map(|&a| b_list.iter().map(move |&b| (a, b)))
        .map(|(a, b)| dof::table1_row(a, b).map_err(usage))
        .collect::<Result<_, _>>()?;

    let sink = Sink { path: args.output.or(file.output.clone()) };
    match args.format.or(file.format).unwrap_or(Format::Json) {
        Format::Json => sink.json(&rows)?,
        Format::Csv | Format::Text => {
            let header = [
                "A", "B", "case", "stia_num", "stia_den", "stia_real", "gak_num", "gak_den", "gak_real", "ia_num",
                "ia_den", "ia_real", "vv_num", "vv_den", "vv_real",
            ];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut row = vec![r.a.to_string(), r.b.to_string(), r.case.label().to_string()];
                    for v in [r.stia, r.gak, r.ia, r.vv] {
                        row.extend([v.numer().to_string(), v.denom().to_string(), real(dof::to_real(v))]);
                    }
                    row
                })
                .collect();
            sink.csv(&header, &body)?
        }
    }
    Ok(Outcome::Clean)
}

pub fn verify(args: VerifyArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let suites = if args.suites.is_empty() { file.suites.clone().unwrap_or_default() } else { args.suites };
    let opts = VerifyOptions {
        seed: args.seed.or(file.seed).unwrap_or(VerifyOptions::default().seed),
        trials: args.trials.or(file.trials),
        canary: args.canary,
    };
    for s in &suites {
        if !verify::SUITES.contains(&s.as_str()) {
            return Err(CliError::Usage(format!("unknown suite {s:?}; known: {}", verify::SUITES.join(", "))));
        }
    }
    let report: VerifyReport = verify::run(&suites, &opts)?;

    let sink = Sink { path: args.output.or(file.output.clone()) };
    match args.format.or(file.format).unwrap_or(Format::Text) {
        Format::Json => sink.json(&report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| vec![c.suite.clone(), c.name.clone(), c.passed.to_string(), c.detail.clone()])
                .collect();
            sink.csv(&["suite", "check", "passed", "detail"], &rows)?
        }
        Format::Text => {
            let mut text = String::new();
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag} {}/{}: {}\n", c.suite, c.name, c.detail));
            }
            let failed = report.failures().count();
            text.push_str(&format!("{} checks, {failed} failed\n", report.checks.len()));
            sink.text(&text)?
        }
    }
    Ok(if report.passed() { Outcome::Clean } else { Outcome::InvariantFailure })
}
