//! Single runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::config::{DtPolicy, RunConfig};
use super::csv::{write_aborted_csv, write_csv, Record};
use super::profiles::build_initial;
use super::snapshot::write_snapshot;
use super::HarnessError;
use crate::acoustic::{acoustic_evolve, acoustic_init};
use crate::constitutive::LimitParams;
use crate::diagnostics::relative_entropy;
use crate::error::QnsError;
use crate::grid::Grid2D;
use crate::solver::{cfl_dt, qns_init, qns_step, EnergyLedger, QnsState};

/// Relative allowance on `E(0)` in the energy inequality.
pub const ENERGY_REL_TOL: f64 = 1e-6;
/// Scheme allowance `C dt^2 E(0)` on top of `ENERGY_REL_TOL`.
pub const ENERGY_SCHEME_CONST: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub epsilon: f64,
    pub records: Vec<Record>,
    pub ledger: EnergyLedger,
    pub final_state: QnsState,
    pub steps: usize,
    pub max_dt: f64,
    pub aborted: Option<QnsError>,
    pub wall: Duration,
}

impl RunOutput {
    pub fn terminal(&self) -> Option<&Record> {
        self.records.last()
    }

    pub fn energy_tolerance(&self) -> f64 {
        let e0 = self.ledger.entries().first().map_or(0.0, |e| e.total);
        ENERGY_SCHEME_CONST * self.max_dt * self.max_dt * e0
    }

    pub fn energy_inequality_holds(&self) -> bool {
        self.ledger.inequality_holds(ENERGY_REL_TOL, self.energy_tolerance())
    }
}

/// Runs the configured single-epsilon experiment in memory.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let eps = match cfg.plan().as_slice() {
        [e] => *e,
        _ => return Err(HarnessError::Config("run_single needs a single epsilon".into())),
    };
    let started = Instant::now();
    let grid = Grid2D::new(cfg.grid_n)?;
    let params = LimitParams::new(eps, cfg.gamma)?;
    let (data, mut reference) = build_initial(cfg, grid)?;
    let ac0 = acoustic_init(&data, params);
    let mut state = qns_init(params, &data)?;
    let mut ledger = EnergyLedger::new();
    let mut records = Vec::new();
    let mut steps = 0usize;
    let mut max_dt: f64 = 0.0;

    let observe = |s: &QnsState, r: &super::profiles::Reference, ledger: &mut EnergyLedger, record: bool| -> Result<Option<Record>, QnsError> {
        let energy = ledger.observe(s, record)?;
        if !record {
            return Ok(None);
        }
        let ac = acoustic_evolve(&ac0, s.time)?;
        let report = relative_entropy(s, r.current(), &ac)?;
        Ok(Some(Record { report, energy }))
    };

    let fixed_steps = match cfg.dt_policy {
        DtPolicy::Fixed(dt) => Some(((cfg.t_end / dt).round() as usize).max(1)),
        DtPolicy::Auto => None,
    };
    let finish_tol = 1e-12 * cfg.t_end;
    let mut aborted = None;
    match observe(&state, &reference, &mut ledger, true) {
        Ok(rec) => records.extend(rec),
        Err(e) => aborted = Some(e),
    }
    while aborted.is_none() {
        let done = match fixed_steps {
            Some(k) => steps >= k,
            None => state.time >= cfg.t_end - finish_tol,
        };
        if done {
            break;
        }
        let dt = match (cfg.dt_policy, fixed_steps) {
            (DtPolicy::Fixed(_), Some(k)) => cfg.t_end / k as f64,
            _ => cfl_dt(&state).min(cfg.t_end - state.time),
        };
        let result = qns_step(&state, dt).and_then(|next| {
            let t = next.time;
            reference.advance_to(t)?;
            Ok(next)
        });
        match result {
            Ok(next) => {
                state = next;
                steps += 1;
                max_dt = max_dt.max(dt);
            }
            Err(e) => {
                aborted = Some(e);
                break;
            }
        }
        let last = match fixed_steps {
            Some(k) => steps >= k,
            None => state.time >= cfg.t_end - finish_tol,
        };
        let record = last || steps.is_multiple_of(cfg.record_every);
        match observe(&state, &reference, &mut ledger, record) {
            Ok(rec) => records.extend(rec),
            Err(e) => aborted = Some(e),
        }
    }
    Ok(RunOutput {
        epsilon: eps,
        records,
        ledger,
        final_state: state,
        steps,
        max_dt,
        aborted,
        wall: started.elapsed(),
    })
}

pub fn csv_path(dir: &Path, eps: f64) -> PathBuf {
    dir.join(format!("run_eps_{eps}.csv"))
}

pub fn snapshot_path(dir: &Path, eps: f64) -> PathBuf {
    dir.join(format!("final_eps_{eps}.qnsf"))
}

/// Writes the CSV (with the sentinel row if the run aborted) and the final
/// state snapshot.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    let path = csv_path(dir, out.epsilon);
    if out.aborted.is_some() {
        write_aborted_csv(&out.records, &path)?;
    } else {
        write_csv(&out.records, &path)?;
    }
    let s = &out.final_state;
    write_snapshot(&[("n", &s.n), ("mx", &s.m.x), ("my", &s.m.y)], &snapshot_path(dir, out.epsilon))?;
    Ok(())
}

/// Simulates, writes outputs to `cfg.output_dir`, and reports an aborted run
/// as a numerical error after its partial CSV is on disk.
pub fn run_single(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    let out = simulate(cfg)?;
    write_outputs(&out, &cfg.output_dir)?;
    match &out.aborted {
        Some(e) => Err(HarnessError::Numerical(e.clone())),
        None => Ok(out),
    }
}
