use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stadesign_cli::{algebra_report, load_algebra, parse_scenario, read_batch, run_batch, run_design, run_min_time, CliError, RunReport};

#[derive(Parser, Debug)]
#[command(name = "stadesign", version, about = "Design and verify invariant-based shortcuts to adiabaticity")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Design a scenario and write trajectory.csv, verify.csv and report.json
    Design {
        scenario: PathBuf,
        /// output directory (default: ./<scenario name>)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bisect for the smallest feasible final time
    MinTime {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_bracket)]
        bracket: (f64, f64),
    },
    /// Print structure constants and center of a built-in algebra or representation file
    AlgebraCheck { algebra: String },
    /// Design every scenario listed in a JSON array
    Batch {
        list: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

fn parse_bracket(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn summary(r: &RunReport) -> String {
    let fid = r
        .branches
        .iter()
        .map(|b| b.fidelity.map_or("ambiguous".to_string(), |f| format!("{:.3e}", 1.0 - f)))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "{}: feasible={} residual={:.3e} 1-fidelity=[{}] exit={}",
        r.scenario,
        r.feasible,
        r.invariant_residual.unwrap_or(f64::NAN),
        fid,
        r.exit_code()
    )
}

fn run(args: Args) -> Result<i32, CliError> {
    match args.cmd {
        Cmd::Design { scenario, output } => {
            let spec = parse_scenario(&scenario)?;
            let out = output.unwrap_or_else(|| PathBuf::from(&spec.name));
            let report = run_design(&spec, &out)?;
            if let Some(t) = report.first_violation_time {
                println!("{}: infeasible, first violation at t = {t}", report.scenario);
            } else {
                println!("{}", summary(&report));
            }
            Ok(report.exit_code())
        }
        Cmd::MinTime { scenario, bracket: (lo, hi) } => {
            let spec = parse_scenario(&scenario)?;
            let report = run_min_time(&spec, lo, hi)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(report.exit_code())
        }
        Cmd::AlgebraCheck { algebra } => {
            print!("{}", algebra_report(&load_algebra(&algebra)?));
            Ok(0)
        }
        Cmd::Batch { list, jobs, output } => {
            let paths = read_batch(&list)?;
            let mut worst = 0;
            for (path, r) in run_batch(&paths, &output, jobs)? {
                let code = match r {
                    Ok(report) => {
                        println!("{}", summary(&report));
                        report.exit_code()
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        e.exit_code()
                    }
                };
                worst = worst.max(code);
            }
            Ok(worst)
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage exit code (2) would collide with "infeasible"
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = run(args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
