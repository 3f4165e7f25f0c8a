use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qns_core::diagnostics::rate_fit;
use qns_core::harness::checks::{acoustic_checks, bohm_check, euler_checks, Check};
use qns_core::harness::{parse_config, run_single, run_sweep, HarnessError, RunConfig};

#[derive(Parser)]
#[command(name = "qns", about = "Low-Mach limit laboratory for the quantum Navier-Stokes system on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run; writes the diagnostic CSV and a final snapshot.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Epsilon-ladder sweep with the rate fit.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads; falls back to QNS_THREADS, then to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Skip the solver and inject exact power laws.
        #[arg(long)]
        synthetic: bool,
    },
    /// Agreement of the two Bohm force forms on random densities.
    BohmCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Acoustic energy conservation and the single-mode oracle.
    AcousticTest,
    /// Taylor-Green residual and solver stationarity.
    EulerTest,
    /// Power-law fit of every column of a CSV against its `epsilon` column.
    RateFit { csv: PathBuf },
}

fn load(config: &Path, output: Option<PathBuf>) -> Result<RunConfig, HarnessError> {
    let text = std::fs::read_to_string(config)?;
    let mut cfg = parse_config(&text)?;
    if let Some(dir) = output {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn threads(flag: Option<usize>) -> Result<usize, HarnessError> {
    match flag {
        Some(k) => Ok(k),
        None => match std::env::var("QNS_THREADS") {
            Ok(v) => v
                .parse()
                .map_err(|_| HarnessError::Config(format!("QNS_THREADS = {v:?} is not a thread count"))),
            Err(_) => Ok(0),
        },
    }
}

fn report_checks(checks: &[Check]) -> Result<bool, HarnessError> {
    for c in checks {
        println!("{c}");
    }
    Ok(checks.iter().all(Check::pass))
}

fn fit_csv(path: &Path) -> Result<bool, HarnessError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    let headers = reader
        .headers()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e)))?
        .clone();
    let eps_col = headers
        .iter()
        .position(|h| h == "epsilon")
        .ok_or_else(|| HarnessError::Config(format!("{} has no epsilon column", path.display())))?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for row in reader.records() {
        let row = row.map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
        for (k, cell) in row.iter().enumerate() {
            let v = cell
                .parse()
                .map_err(|_| HarnessError::Config(format!("{}: cannot parse {cell:?}", path.display())))?;
            columns[k].push(v);
        }
    }
    let eps = &columns[eps_col];
    for (k, name) in headers.iter().enumerate() {
        if k == eps_col {
            continue;
        }
        match rate_fit(eps, &columns[k]) {
            Ok(f) => println!("{name:<22} slope {:>9.5} intercept {:>9.5} residual {:.3e}", f.slope, f.intercept, f.residual),
            Err(e) => println!("{name:<22} skipped: {e}"),
        }
    }
    Ok(true)
}

fn execute(cmd: Command) -> Result<bool, HarnessError> {
    match cmd {
        Command::Run { config, output } => {
            let cfg = load(&config, output)?;
            let out = run_single(&cfg)?;
            if let Some(r) = out.terminal() {
                println!(
                    "t = {:.6} steps = {} rel_entropy = {:.6e} theorem = [{:.4e}, {:.4e}, {:.4e}]",
                    r.report.t, out.steps, r.report.rel_entropy, r.report.theorem_lhs[0], r.report.theorem_lhs[1], r.report.theorem_lhs[2]
                );
            }
            let ok = out.energy_inequality_holds();
            println!("energy inequality {}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
        Command::Sweep {
            config,
            output,
            threads: flag,
            synthetic,
        } => {
            let cfg = load(&config, output)?;
            let res = run_sweep(&cfg, threads(flag)?, synthetic, Some(&cfg.output_dir))?;
            print!("{}", res.report());
            if res.failed {
                let first = res.rungs.iter().find_map(|r| r.aborted.clone()).unwrap_or_default();
                return Err(HarnessError::SweepAborted(first));
            }
            Ok(res.pass())
        }
        Command::BohmCheck { seed } => report_checks(&[bohm_check(128, 20, seed)?]),
        Command::AcousticTest => report_checks(&acoustic_checks()?),
        Command::EulerTest => report_checks(&euler_checks()?),
        Command::RateFit { csv } => fit_csv(&csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qns: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
