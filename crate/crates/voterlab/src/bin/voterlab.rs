//! Command-line front end: sweeps from JSON configs, phase-region scans,
//! the exact-oracle invariant suite, and graph dumps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use voterlab::harness::{
    self, emit, run_check, run_sweep_with, EmitFormat, ExperimentConfig, ScalingResult,
};
use voterlab::netgen::{generate, NetworkParams, Variant};
use voterlab::theory::{region_scan, write_region_csv};

#[derive(Parser)]
#[command(name = "voterlab", version, about = "Voter-model scaling experiments on rank-one random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a JSON config file.
    Sweep {
        /// Path to the JSON experiment config.
        #[arg(long)]
        config: PathBuf,
    },
    /// Scan the (beta, gamma) plane and write a phase-region CSV.
    Region {
        /// Largest beta of the scan grid.
        #[arg(long, default_value_t = 4.0)]
        beta_max: f64,
        /// Number of beta grid points.
        #[arg(long, default_value_t = 80)]
        beta_steps: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the exact-oracle invariant suite.
    Check,
    /// Sample one graph and write its edge list.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Variant::Snr)]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    harness::init_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> voterlab::Result<ExitCode> {
    match command {
        Command::Sweep { config } => {
            let cfg = ExperimentConfig::from_json_reader(File::open(&config)?)?;
            let result = sweep_with_partial_csv(&cfg)?;
            if let Some(path) = &cfg.out_json {
                emit(&result, EmitFormat::Json, path.as_ref())?;
            }
            if let Some(path) = &cfg.out_svg {
                emit(&result, EmitFormat::Svg, path.as_ref())?;
            }
            match result.predicted_exponent {
                Some(p) => println!(
                    "fitted exponent {:.4} +/- {:.4} (predicted {:.4})",
                    result.fitted_exponent, result.fit_stderr, p
                ),
                None => println!(
                    "fitted exponent {:.4} +/- {:.4} (critical line, no prediction)",
                    result.fitted_exponent, result.fit_stderr
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Region {
            beta_max,
            beta_steps,
            out,
        } => {
            if !(beta_max > 0.0) || beta_steps < 2 {
                return Err(voterlab::Error::InvalidParams(
                    "need beta-max > 0 and at least 2 beta steps".into(),
                ));
            }
            let betas: Vec<f64> = (1..=beta_steps)
                .map(|k| beta_max * k as f64 / beta_steps as f64)
                .collect();
            let points = region_scan(&betas, &voterlab::theory::gamma_grid())?;
            let mut file = BufWriter::new(File::create(&out)?);
            write_region_csv(&points, &mut file)?;
            file.flush()?;
            println!("wrote {} region points to {}", points.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Check => {
            let report = run_check();
            let mut stdout = std::io::stdout().lock();
            report.write_lines(&mut stdout)?;
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Graph {
            n,
            beta,
            gamma,
            variant,
            seed,
            out,
        } => {
            let g = generate(&NetworkParams::new(n, beta, gamma, variant, seed))?;
            match out {
                Some(path) => {
                    let mut file = BufWriter::new(File::create(&path)?);
                    g.write_edge_list(&mut file)?;
                    file.flush()?;
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    g.write_edge_list(&mut stdout)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Runs the sweep, streaming each finished size into the CSV so an
/// interrupted run still leaves its completed rows on disk.
fn sweep_with_partial_csv(cfg: &ExperimentConfig) -> voterlab::Result<ScalingResult> {
    let mut csv = match &cfg.out_csv {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };
    let result = run_sweep_with(cfg, |point| {
        if let Some(file) = csv.as_mut() {
            let _ = writeln!(
                file,
                "{},{},{},{}",
                point.n, point.mean, point.stderr, point.replicas
            );
            let _ = file.flush();
        }
        eprintln!(
            "n = {:>8}: mean {:.6e} (se {:.1e}, {} replicas)",
            point.n, point.mean, point.stderr, point.replicas
        );
    })?;
    if let Some(file) = csv.as_mut() {
        writeln!(
            file,
            "fit,{},{},{}",
            result.fitted_exponent, result.fit_stderr, result.polylog_coefficient
        )?;
        file.flush()?;
    }
    Ok(result)
}
