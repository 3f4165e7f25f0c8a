//! Epsilon ladders and the rate study.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;

use super::config::RunConfig;
use super::csv::format_row;
use super::run::{simulate, write_outputs, RunOutput};
use super::HarnessError;
use crate::diagnostics::{density_deviation_norms, rate_fit, EntropyReport, RateFit};

/// Fitted quantities, as functions of the terminal report. The first two
/// carry the verdict; the rest are reported for inspection.
pub const QUANTITIES: [&str; 5] = ["sqrt_rel_entropy", "sqrt_thm_sum", "sqrt_thm_vel", "sqrt_thm_dens", "sqrt_thm_grad"];
pub const TRACKED: usize = 2;
/// Allowed shortfall of a fitted slope below the rate exponent.
pub const SLOPE_SLACK: f64 = 0.1;

pub fn quantities(r: &EntropyReport) -> [f64; 5] {
    let t = r.theorem_lhs;
    [r.rel_entropy.sqrt(), (t[0] + t[1] + t[2]).sqrt(), t[0].sqrt(), t[1].sqrt(), t[2].sqrt()]
}

#[derive(Debug, Clone)]
pub struct Rung {
    pub epsilon: f64,
    pub terminal: Option<EntropyReport>,
    /// `||n - 1||_{L^lambda} / eps` at the final time.
    pub lambda_norm_over_eps: f64,
    pub energy_ok: bool,
    pub aborted: Option<String>,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct QuantityFit {
    pub name: &'static str,
    pub fit: Option<RateFit>,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rate: f64,
    pub rungs: Vec<Rung>,
    pub fits: Vec<QuantityFit>,
    pub failed: bool,
}

impl SweepResult {
    /// Every run completed, every energy inequality held and every tracked
    /// slope cleared its threshold.
    pub fn pass(&self) -> bool {
        !self.failed && self.rungs.iter().all(|r| r.energy_ok) && self.fits[..TRACKED].iter().all(|f| f.pass)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("epsilon");
        for q in QUANTITIES {
            write!(out, ",{q}").unwrap();
        }
        out.push_str(",lambda_norm_over_eps,energy_ok\n");
        for r in &self.rungs {
            let mut vals = vec![r.epsilon];
            match &r.terminal {
                Some(t) => vals.extend(quantities(t)),
                None => vals.extend([f64::NAN; 5]),
            }
            vals.push(r.lambda_norm_over_eps);
            writeln!(out, "{},{}", format_row(&vals), r.energy_ok as u8).unwrap();
        }
        out
    }

    pub fn report(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{:>10} {:>14} {:>14} {:>12} {:>7} {:>9}", "epsilon", "rel_entropy", "thm_sum", "L^lam/eps", "energy", "wall_s").unwrap();
        for r in &self.rungs {
            let (e, s) = r
                .terminal
                .map(|t| (t.rel_entropy, t.theorem_lhs.iter().sum::<f64>()))
                .unwrap_or((f64::NAN, f64::NAN));
            let energy = match (&r.aborted, r.energy_ok) {
                (Some(_), _) => "ABORT",
                (None, true) => "PASS",
                (None, false) => "FAIL",
            };
            writeln!(
                out,
                "{:>10} {:>14.6e} {:>14.6e} {:>12.4} {:>7} {:>9.2}",
                r.epsilon,
                e,
                s,
                r.lambda_norm_over_eps,
                energy,
                r.wall.as_secs_f64()
            )
            .unwrap();
        }
        writeln!(out, "rate exponent {:.6}, slope threshold {:.6}", self.rate, self.rate - SLOPE_SLACK).unwrap();
        for (k, f) in self.fits.iter().enumerate() {
            let role = if k < TRACKED { "verdict" } else { "info" };
            match &f.fit {
                Some(fit) => writeln!(
                    out,
                    "{:<18} slope {:>8.4} residual {:.3e} {} ({role})",
                    f.name,
                    fit.slope,
                    fit.residual,
                    if f.pass { "PASS" } else { "FAIL" }
                ),
                None => writeln!(out, "{:<18} no fit ({role})", f.name),
            }
            .unwrap();
        }
        writeln!(out, "sweep {}", if self.pass() { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

fn rung_of(out: &RunOutput) -> Rung {
    let norms = density_deviation_norms(&out.final_state);
    Rung {
        epsilon: out.epsilon,
        terminal: if out.aborted.is_some() { None } else { out.terminal().map(|r| r.report) },
        lambda_norm_over_eps: norms.full_llambda / out.epsilon,
        energy_ok: out.aborted.is_none() && out.energy_inequality_holds(),
        aborted: out.aborted.as_ref().map(|e| e.to_string()),
        wall: out.wall,
    }
}

/// Stand-in rung whose tracked quantities are exactly `eps^rate`.
fn synthetic_rung(eps: f64, rate: f64) -> Rung {
    let e = eps.powf(2.0 * rate);
    Rung {
        epsilon: eps,
        terminal: Some(EntropyReport {
            t: 0.0,
            rel_entropy: e,
            kinetic_part: e,
            quantum_part: 0.0,
            internal_part: 0.0,
            theorem_lhs: [e / 3.0, e / 3.0, e / 3.0],
            corollary_lhs: [e / 3.0, e / 3.0, e / 3.0],
        }),
        lambda_norm_over_eps: 1.0,
        energy_ok: true,
        aborted: None,
        wall: Duration::ZERO,
    }
}

fn fits(rungs: &[Rung], rate: f64) -> Vec<QuantityFit> {
    let eps: Vec<f64> = rungs.iter().map(|r| r.epsilon).collect();
    QUANTITIES
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let vals: Option<Vec<f64>> = rungs.iter().map(|r| r.terminal.map(|t| quantities(&t)[k])).collect();
            let fit = vals.and_then(|v| rate_fit(&eps, &v).ok());
            let threshold = rate - SLOPE_SLACK;
            let pass = fit.as_ref().is_some_and(|f| f.slope >= threshold);
            QuantityFit { name, fit, threshold, pass }
        })
        .collect()
}

/// Runs every ladder rung on `threads` workers (0 picks rayon's default) and
/// fits the terminal quantities. Aborted rungs fail the sweep but the others
/// still run. With an output directory, per-rung CSVs and snapshots plus
/// `summary.csv` and `report.txt` are written there.
pub fn run_sweep(cfg: &RunConfig, threads: usize, synthetic: bool, output: Option<&Path>) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let ladder = cfg.plan();
    if ladder.len() < 3 {
        return Err(HarnessError::Config(format!("a sweep needs at least 3 epsilons, got {}", ladder.len())));
    }
    let rate = cfg.rate();
    let rungs: Vec<Rung> = if synthetic {
        ladder.iter().map(|&e| synthetic_rung(e, rate)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
        let outs: Vec<Result<RunOutput, HarnessError>> =
            pool.install(|| ladder.par_iter().map(|&e| simulate(&cfg.with_epsilon(e))).collect());
        let mut rungs = Vec::with_capacity(outs.len());
        for out in outs {
            let out = out?;
            if let Some(dir) = output {
                write_outputs(&out, dir)?;
            }
            rungs.push(rung_of(&out));
        }
        rungs
    };
    let failed = rungs.iter().any(|r| r.aborted.is_some());
    let result = SweepResult {
        rate,
        fits: fits(&rungs, rate),
        rungs,
        failed,
    };
    if let Some(dir) = output {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.csv"), result.summary_csv())?;
        fs::write(dir.join("report.txt"), result.report())?;
    }
    Ok(result)
}
