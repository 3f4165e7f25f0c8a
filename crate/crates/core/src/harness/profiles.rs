//! Initial profiles and the matching incompressible references.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Profile, RunConfig};
use super::snapshot::read_snapshot;
use super::HarnessError;
use crate::acoustic::{mollify, InitialData};
use crate::error::QnsError;
use crate::euler::{taylor_green_scaled, EulerReference, EulerStepper};
use crate::grid::{Grid2D, ScalarField, VectorField};
use crate::spectral::{self, Spectrum};

/// Real trigonometric polynomial with modes `1 <= |k|_inf <= kmax`, random
/// amplitudes in `[-1, 1]` and random phases.
pub fn random_band_limited(grid: Grid2D, kmax: i64, rng: &mut impl Rng) -> ScalarField {
    let mut terms = Vec::new();
    for kx in 0..=kmax {
        for ky in -kmax..=kmax {
            if kx == 0 && ky <= 0 {
                continue;
            }
            let amp: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            terms.push((kx as f64, ky as f64, amp, phase));
        }
    }
    ScalarField::from_fn(grid, |x, y| {
        terms
            .iter()
            .map(|&(kx, ky, a, ph)| a * (kx * x + ky * y + ph).cos())
            .sum()
    })
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The incompressible limit the run is compared against.
#[derive(Debug, Clone)]
pub enum Reference {
    Steady(EulerReference),
    Evolving(EulerReference),
}

impl Reference {
    pub fn current(&self) -> &EulerReference {
        match self {
            Reference::Steady(r) | Reference::Evolving(r) => r,
        }
    }

    /// Advances to `t`, substepping under the Euler CFL limit.
    pub fn advance_to(&mut self, t: f64) -> Result<(), QnsError> {
        if let Reference::Evolving(r) = self {
            let span = t - r.time;
            if span <= 0.0 {
                return Ok(());
            }
            let vmax = r.v.max_magnitude();
            let limit = if vmax > 0.0 { 0.4 * r.v.grid().spacing() / vmax } else { span };
            let subs = (span / limit).ceil().max(1.0) as usize;
            let mut stepper = EulerStepper::new(&r.v, span / subs as f64)?;
            for _ in 0..subs {
                stepper.step()?;
            }
            let mut next = stepper.reference();
            next.time = t;
            *r = next;
        }
        Ok(())
    }
}

fn taylor_green_data(grid: Grid2D) -> VectorField {
    taylor_green_scaled(grid, 1.0).v
}

/// Initial data and reference for `cfg`; the Taylor-Green reference is damped
/// by the same mollifier as the data.
pub fn build_initial(cfg: &RunConfig, grid: Grid2D) -> Result<(InitialData, Reference), HarnessError> {
    let tg_amp = (-cfg.eta * cfg.eta).exp();
    let (n1, u0, reference) = match &cfg.initial_profile {
        Profile::Rest => (
            ScalarField::zeros(grid),
            VectorField::zeros(grid),
            Reference::Steady(taylor_green_scaled(grid, 0.0)),
        ),
        Profile::SineDensity(a) => {
            let a = *a;
            let n1 = ScalarField::from_fn(grid, |x, _| a * x.sin());
            let grad = VectorField::from_fn(grid, |_, _| 0.0, |_, y| a * y.cos());
            (n1, &taylor_green_data(grid) + &grad, Reference::Steady(taylor_green_scaled(grid, tg_amp)))
        }
        Profile::TgPlusGradient(a) => {
            let mut rng = seeded_rng(cfg.seed);
            let phi = random_band_limited(grid, 3, &mut rng);
            let g = spectral::gradient(&phi);
            let rms = (g.magnitude_sq().mean()).sqrt();
            let g = g.scale(a / rms);
            (ScalarField::zeros(grid), &taylor_green_data(grid) + &g, Reference::Steady(taylor_green_scaled(grid, tg_amp)))
        }
        Profile::FromSnapshot(path) => {
            let snap = read_snapshot(path)?;
            if snap.grid_n as usize != grid.n() {
                return Err(HarnessError::Config(format!(
                    "snapshot {} has grid {} but grid_n = {}",
                    path.display(),
                    snap.grid_n,
                    grid.n()
                )));
            }
            let get = |name: &str| {
                snap.scalar(name)
                    .ok_or_else(|| HarnessError::Config(format!("snapshot {} lacks field {name}", path.display())))
            };
            let n1 = get("n1")?;
            let u0 = VectorField { x: get("ux")?, y: get("uy")? };
            let smooth = VectorField {
                x: mollify(&u0.x, cfg.eta),
                y: mollify(&u0.y, cfg.eta),
            };
            let (p_part, _) = spectral::helmholtz_project(&smooth);
            let v = VectorField {
                x: Spectrum::forward(&p_part.x).dealiased().to_field(),
                y: Spectrum::forward(&p_part.y).dealiased().to_field(),
            };
            let pi = crate::euler::pressure_recover(&v);
            (n1, u0, Reference::Evolving(EulerReference { v, pi, time: 0.0 }))
        }
    };
    let data = InitialData::new(n1, u0, cfg.eta, cfg.bound_m)?;
    Ok((data, reference))
}
