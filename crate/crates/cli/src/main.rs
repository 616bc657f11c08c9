#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::fs::File;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use riemann_accel::experiments::{fig1, fig2, fig3, MAX_MATRIX_SIZE};
use riemann_accel::objective::{half_squared_distance, ill_conditioned, Objective, Quadratic, Rayleigh};
use riemann_accel::optimizer::{run, Method, SirnagOption};
use riemann_accel::suites::{defect_sweep, run_suite, Suite};
use riemann_accel::{Error, Manifold};

use config::{ObjectiveKind, Overrides, Settings};
use output::Table;

/// Accelerated Riemannian optimization experiments and verification suites.
#[derive(Debug, Parser)]
#[command(name = "riemann-accel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for initial points and generated matrices.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use the full-size problem settings (m = 5000, h_ref = 1e-5).
    #[arg(long, global = true)]
    paper_scale: bool,
    /// Disable the thread pool.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hyperbolic rate experiment: SIRNAG (both options) vs RGD with the convex bound.
    Fig1,
    /// Leading eigenvector of an ill-conditioned matrix.
    Fig2 {
        /// Read Q from this matrix file.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Write the matrix that was used to this file.
        #[arg(long)]
        save_matrix: Option<PathBuf>,
    },
    /// Distance of SIRNAG iterates to the continuous-time trajectory.
    Fig3,
    /// Run a verification suite (geometry, lyapunov, shadowing, reduction or all).
    Check { suite: Option<String> },
    /// A single optimizer run, written as a trajectory CSV.
    Run,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit code 2).
    Config(String),
    /// A check or run failed (exit code 1).
    Failure(String),
}

impl CliError {
    /// Library errors raised while validating inputs are configuration errors.
    pub fn from_validation(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    fn from_run(e: Error) -> Self {
        match e {
            Error::Contract(_) | Error::Domain(_) | Error::Dimension { .. } => CliError::Config(e.to_string()),
            e => CliError::Failure(e.to_string()),
        }
    }

    fn io(e: io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

fn emit(settings: &Settings, table: &Table) -> Result<(), CliError> {
    match &settings.out {
        Some(p) => table.write_to(File::create(p).map_err(CliError::io)?).map_err(CliError::io),
        // A closed downstream pipe (e.g. `| head`) is not an error.
        None => match table.write_to(io::stdout().lock()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::io(e)),
            _ => Ok(()),
        },
    }
}

fn emit_text(settings: &Settings, text: &str) -> Result<(), CliError> {
    match &settings.out {
        Some(p) => std::fs::write(p, text).map_err(CliError::io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_fig1(s: &Settings) -> Result<(), CliError> {
    let cfg = s.fig1()?;
    let out = fig1(&cfg, s.exec).map_err(CliError::from_run)?;
    emit(s, &output::fig1_table(&out, cfg.seed))
}

fn cmd_fig2(s: &Settings) -> Result<(), CliError> {
    let mut cfg = s.fig2()?;
    if cfg.m > MAX_MATRIX_SIZE {
        return Err(CliError::Config(format!("m = {} exceeds the limit of {MAX_MATRIX_SIZE}", cfg.m)));
    }
    if let Some(p) = &s.matrix {
        cfg.matrix = Some(output::read_matrix(p, MAX_MATRIX_SIZE).map_err(CliError::Config)?);
    }
    let out = fig2(&cfg, s.exec).map_err(CliError::from_run)?;
    if let Some(p) = &s.save_matrix {
        output::write_matrix(p, &out.matrix).map_err(CliError::io)?;
    }
    emit(s, &output::fig2_table(&out, cfg.seed))
}

fn cmd_fig3(s: &Settings) -> Result<(), CliError> {
    let cfg = s.fig3()?;
    let out = fig3(&cfg, s.exec).map_err(CliError::from_run)?;
    emit(s, &output::fig3_table(&out, cfg.h_ref, cfg.horizon, cfg.fig1.seed))
}

fn cmd_check(s: &Settings) -> Result<(), CliError> {
    let suites: Vec<Suite> = match s.suite.as_deref() {
        None | Some("all") => Suite::ALL.to_vec(),
        Some(name) => vec![name.parse().map_err(CliError::from_validation)?],
    };
    if s.seed.is_some() {
        eprintln!("note: suites use fixed seeds; --seed is ignored");
    }
    let opts = s.suite_options()?;
    let mut text = String::new();
    let mut failed = Vec::new();
    for suite in suites {
        let report = run_suite(suite, &opts).map_err(CliError::from_run)?;
        if !report.passed() {
            failed.push(suite.name());
        }
        text.push_str(&report.to_text());
        text.push('\n');
        if suite == Suite::Shadowing {
            if let Some(out) = &s.out {
                let sweep = defect_sweep(&[0.01, 0.005, 0.0025, 0.00125], 1.0, opts.exec).map_err(CliError::from_run)?;
                let path = out.with_extension("defects.csv");
                output::defect_table(&sweep).write_to(File::create(&path).map_err(CliError::io)?).map_err(CliError::io)?;
            }
        }
    }
    emit_text(s, &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!("failed suites: {}", failed.join(", "))))
    }
}

fn cmd_run(s: &Settings) -> Result<(), CliError> {
    let rs = s.run()?;
    let m = Manifold::new(rs.spec).map_err(CliError::from_validation)?;
    let obj: Box<dyn Objective> = match rs.objective {
        ObjectiveKind::HalfSquaredDistance => Box::new(half_squared_distance(&m, &m.origin()).map_err(CliError::from_run)?),
        ObjectiveKind::Quadratic => Box::new(Quadratic::isotropic(m.clone(), rs.mu).map_err(CliError::from_run)?),
        ObjectiveKind::Rayleigh => {
            let ic = ill_conditioned(m.ambient_dim(), rs.cond, rs.seed).map_err(CliError::from_run)?;
            Box::new(Rayleigh::with_leading(m.clone(), ic.matrix, ic.eigenvalues[0], ic.leading).map_err(CliError::from_run)?)
        }
    };
    let center = obj.metadata().minimizer.clone().unwrap_or_else(|| m.origin());
    let x0 = m.point_at_distance(&center, rs.initial_distance, rs.seed).map_err(CliError::from_run)?;
    let tr = run(&x0, obj.as_ref(), &rs.config).map_err(CliError::from_run)?;
    let method = match rs.config.method {
        Method::Rgd => "rgd",
        Method::Sirnag if rs.config.option == SirnagOption::I => "sirnag_opt1",
        Method::Sirnag => "sirnag_opt2",
    };
    let r0 = obj.metadata().minimizer.as_ref().map(|xs| m.distance(&x0, xs));
    emit(s, &output::trajectory_table(&tr, method, r0, rs.seed))?;
    match tr.diagnostic {
        Some(d) => Err(CliError::Failure(format!("run aborted: {d}"))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = config::load(cli.config.as_deref()).and_then(|file| {
        let (matrix, save_matrix, suite) = match &cli.command {
            Command::Fig2 { matrix, save_matrix } => (matrix.clone(), save_matrix.clone(), None),
            Command::Check { suite } => (None, None, suite.clone()),
            _ => (None, None, None),
        };
        let flags = Overrides {
            seed: cli.seed,
            out: cli.out.clone(),
            paper_scale: cli.paper_scale,
            sequential: cli.sequential,
            matrix,
            save_matrix,
            suite,
        };
        let s = Settings::new(file, flags);
        match cli.command {
            Command::Fig1 => cmd_fig1(&s),
            Command::Fig2 { .. } => cmd_fig2(&s),
            Command::Fig3 => cmd_fig3(&s),
            Command::Check { .. } => cmd_check(&s),
            Command::Run => cmd_run(&s),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
