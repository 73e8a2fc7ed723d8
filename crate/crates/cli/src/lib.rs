//! The `hypwave` command-line driver: configuration, subcommands, CSV and
//! manifest output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use args::{Cli, Command};
use clap::Parser;
use config::RunConfig;
use error::{CliError, CliResult};
use hypwave_core::specfun::gamma_real;
use hypwave_core::transforms::inversion_constant;
use output::{Assertion, Calibration, Manifest, OutputDir, SpaceInfo};
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

/// Radius of the exponential chart used by the pushforward.
pub const ISOMETRY_RADIUS: f64 = 1.0;

/// Parse `argv`, run the subcommand and return the process exit code:
/// 0 when every assertion passes, 2 when one fails, 1 on usage,
/// configuration or i/o errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(argv, true)
}

/// As [`run`], without the per-assertion summary on standard output.
pub fn run_quiet<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_inner(argv, false)
}

fn run_inner<I, T>(argv: I, echo: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run_cli(cli, echo) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hypwave: {e}");
            e.exit_code()
        }
    }
}

/// Fold subcommand flags into the configuration so the digest covers them.
fn apply_command(cfg: &mut RunConfig, cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Specfun { route, lambda, s } => {
            if let Some(r) = route {
                cfg.specfun.route = *r;
            }
            if !lambda.is_empty() {
                cfg.specfun.lambdas = lambda.clone();
            }
            if !s.is_empty() {
                cfg.specfun.s = s.clone();
            }
        }
        Command::Transform { width } => {
            if let Some(w) = width {
                cfg.transform.width = *w;
            }
        }
        Command::Propagate { band, gaussian } => {
            if let Some(n) = band {
                cfg.propagate.band = Some(*n);
            }
            if let Some(g) = gaussian {
                let v: Vec<f64> = g
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Usage(format!("--gaussian expects centre,width, got '{g}'")))?;
                if v.len() != 2 {
                    return Err(CliError::Usage(format!("--gaussian expects centre,width, got '{g}'")));
                }
                cfg.propagate.band = None;
                cfg.propagate.gaussian = [v[0], v[1]];
            }
        }
        Command::Curvecheck => {}
        Command::Counterexample { k } => {
            if let Some(k) = k {
                cfg.counterexample.k = *k;
            }
        }
        Command::Maxest { n, random_phase } => {
            if !n.is_empty() {
                cfg.maxest.n = n.clone();
            }
            cfg.maxest.random_phase |= *random_phase;
        }
        Command::Converge { tau } => {
            if !tau.is_empty() {
                cfg.converge.taus = tau.clone();
            }
        }
    }
    Ok(())
}

fn run_cli(cli: Cli, echo: bool) -> CliResult<()> {
    let mut cfg = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&cli.common)?;
    apply_command(&mut cfg, &cli.command)?;
    let space = cfg.space()?;
    cfg.annulus()?;
    cfg.curve()?;
    let name = cli.command.name();
    let dir = output::resolve_out(&cfg, name);
    let mut out = OutputDir::prepare(&dir)?;
    let start = Instant::now();
    let (outcome, threads) = with_threads(cfg.run.threads, || {
        let threads = current_threads();
        let r = match &cli.command {
            Command::Specfun { .. } => commands::specfun(&cfg, &mut out),
            Command::Transform { .. } => commands::transform(&cfg, &mut out),
            Command::Propagate { .. } => commands::propagate(&cfg, &mut out),
            Command::Curvecheck => commands::curvecheck(&cfg, &mut out),
            Command::Counterexample { .. } => commands::counterexample(&cfg, &mut out),
            Command::Maxest { .. } => commands::maxest(&cfg, &mut out),
            Command::Converge { .. } => commands::converge(&cfg, &mut out),
        };
        (r, threads)
    })?;
    let wall = start.elapsed().as_secs_f64();
    let (outcome, failure) = match outcome {
        Ok(o) => (o, None),
        Err(e) => {
            let mut o = commands::Outcome::default();
            o.assertions.push(Assertion::new("completed", false, e.to_string()));
            (o, Some(e))
        }
    };
    let passed = failure.is_none() && outcome.assertions.iter().all(|a| a.passed);
    let manifest = Manifest {
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: cfg.digest(),
        config: cfg.clone(),
        space: SpaceInfo { label: space.label(), dim: space.dim(), homogeneous_dim: space.q(), rho: space.rho() },
        calibration: Calibration {
            inversion_constant: inversion_constant(&space)?,
            c0_star: 1.0,
            c_beta: 2.0 * gamma_real(0.25) * (std::f64::consts::PI / 8.0).cos(),
            c_beta_calibrated: outcome.c_beta_calibrated,
            isometry_radius: ISOMETRY_RADIUS,
        },
        tol: cfg.run.tol,
        seed: cfg.run.seed,
        threads,
        parallel: hypwave_core::par::is_parallel(),
        wall_clock_seconds: wall,
        outputs: out.files().to_vec(),
        assertions: outcome.assertions.clone(),
        passed,
    };
    out.finish(&manifest)?;
    if echo {
        let mut stdout = std::io::stdout().lock();
        for a in &outcome.assertions {
            let _ = writeln!(stdout, "{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
        }
        let _ = writeln!(stdout, "wrote {}", dir.display());
    }
    if let Some(e) = failure {
        return Err(e);
    }
    if !passed {
        let failed = outcome.assertions.iter().filter(|a| !a.passed).map(|a| a.name.clone()).collect();
        return Err(CliError::Assertion(failed));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn current_threads() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn current_threads() -> usize {
    1
}

/// Run `f` on a dedicated pool of `n` workers (the global pool when `n = 0`).
#[cfg(feature = "parallel")]
fn with_threads<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    if n == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_n: usize, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    Ok(f())
}
