use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dirac_pollution::analysis::{format_sig, SweepTrace};
use dirac_pollution::config::{resolve_output, write_atomic, OutputFormat, RunConfig};
use dirac_pollution::run::{run_check_intervals, run_spectrum, run_sweep};
use dirac_pollution::{scenario, Error};

const EXIT_NUMERICAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

#[derive(Parser)]
#[command(version, about = "Finite-basis Dirac spectra and spurious-eigenvalue diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Configuration file of `key = value` lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set basis.scheme=upper-lower`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.overrides {
            cfg.apply_override(kv)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Fig2,
    Fig5,
    Ground,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one pencil and print its gap eigenvalues.
    Spectrum(ConfigArgs),
    /// Sweep a trap or balance parameter and classify the trajectories.
    Sweep(ConfigArgs),
    /// Check unmatched gap eigenvalues against the scheme's pollution intervals.
    CheckIntervals(ConfigArgs),
    /// Run a named reproduction.
    Reproduce {
        name: Scenario,
        /// CSV destination for sweeps (default `<name>.csv`).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print the effective configuration.
    PrintConfig(ConfigArgs),
}

enum Failure {
    Error(Error),
    Tolerance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn emit(cfg: &RunConfig, csv: impl FnOnce() -> String, json: impl FnOnce() -> Result<String, Error>) -> Result<(), Error> {
    let text = match cfg.format {
        OutputFormat::Csv => csv(),
        OutputFormat::Json => json()?,
    };
    match cfg.output_path() {
        Some(p) => {
            write_atomic(&p, &text)?;
            println!("wrote {}", p.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn summarize(trace: &SweepTrace) {
    let flagged: Vec<usize> = trace.spurious().map(|(j, _)| j).collect();
    eprintln!(
        "{} trajectories over {} points of {}; spurious: {:?}",
        trace.trajectories.len(),
        trace.grid.len(),
        trace.parameter,
        flagged
    );
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(args) => {
            let cfg = args.load()?;
            let run = run_spectrum(&cfg)?;
            eprintln!(
                "{} basis of {} vectors, {} discarded, overlap condition {:.3e}",
                run.scheme.name(),
                run.basis_size,
                run.result.n_discarded,
                run.result.s_condition
            );
            if cfg.output.is_some() {
                emit(
                    &cfg,
                    || {
                        let mut s = String::from("index,eigenvalue\n");
                        for (k, l) in run.result.eigenvalues.iter().enumerate() {
                            s.push_str(&format!("{k},{}\n", format_sig(*l)));
                        }
                        s
                    },
                    || run.result.to_json(),
                )?;
            }
            println!("gap_eigenvalue,oracle_distance");
            for g in &run.gap {
                println!("{},{}", format_sig(g.value), format_sig(g.oracle_distance));
            }
        }
        Command::Sweep(args) => {
            let cfg = args.load()?;
            let trace = run_sweep(&cfg)?;
            summarize(&trace);
            emit(&cfg, || trace.to_csv(), || trace.to_json())?;
        }
        Command::CheckIntervals(args) => {
            let cfg = args.load()?;
            let report = run_check_intervals(&cfg)?;
            let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            match cfg.output_path() {
                Some(p) => write_atomic(&p, &json)?,
                None => println!("{json}"),
            }
            if !report.compliant() {
                return Err(Failure::Tolerance(format!(
                    "{} eigenvalue(s) outside the pollution intervals: {:?}",
                    report.violations.len(),
                    report.violations
                )));
            }
        }
        Command::Reproduce { name, out } => match name {
            Scenario::Ground => {
                let report = scenario::ground()?;
                for l in &report.lines {
                    println!(
                        "{:<24} {:>14} target {} ± {:e}  {}",
                        l.name,
                        l.value.map_or("none".into(), format_sig),
                        l.target,
                        l.tolerance,
                        if l.passed() { "PASS" } else { "FAIL" }
                    );
                }
                eprintln!("gap eigenvalues with trap at theta=0.5: {:?}", report.trapped_gap);
                if !report.passed() {
                    return Err(Failure::Tolerance("ground values outside tolerance".into()));
                }
            }
            Scenario::Fig2 | Scenario::Fig5 => {
                let (trace, default) = match name {
                    Scenario::Fig2 => (scenario::fig2()?, "fig2.csv"),
                    _ => (scenario::fig5()?, "fig5.csv"),
                };
                summarize(&trace);
                let path = resolve_output(out.as_deref().unwrap_or(default.as_ref()));
                write_atomic(&path, &trace.to_csv())?;
                println!("wrote {}", path.display());
            }
        },
        Command::PrintConfig(args) => print!("{}", args.load()?.to_text()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_TOLERANCE)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Config { .. } | Error::Parameter { .. } | Error::UnknownBasis(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            };
            ExitCode::from(code)
        }
    }
}
