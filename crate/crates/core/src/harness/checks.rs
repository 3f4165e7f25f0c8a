//! Named verification runs behind the `bohm-check`, `acoustic-test` and
//! `euler-test` subcommands.

use std::fmt;

use super::profiles::{random_band_limited, seeded_rng};
use crate::acoustic::{acoustic_energy, acoustic_evolve, AcousticState};
use crate::constitutive::{bohm_force, BohmForm, LimitParams};
use crate::error::Result;
use crate::euler::{euler_residual, euler_solve, taylor_green};
use crate::grid::{Grid2D, ScalarField};
use crate::spectral::norm;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.value < self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {:.3e} (< {:.0e})", self.name, self.value, self.tolerance)
    }
}

/// Random band-limited density with `min n > 0.5`.
pub fn random_density(grid: Grid2D, seed: u64) -> ScalarField {
    let f = random_band_limited(grid, 3, &mut seeded_rng(seed));
    let scale = 0.45 / f.max_abs();
    f.map(|v| 1.0 + scale * v)
}

/// Worst relative sup-difference between the two Bohm forms over `count`
/// random densities on an `n x n` grid.
pub fn bohm_check(n: usize, count: u64, seed: u64) -> Result<Check> {
    let grid = Grid2D::new(n)?;
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let rho = random_density(grid, seed.wrapping_add(k));
        let pot = bohm_force(&rho, BohmForm::Potential)?;
        let div = bohm_force(&rho, BohmForm::Divergence)?;
        worst = worst.max((&pot - &div).max_magnitude() / pot.max_magnitude());
    }
    Ok(Check::new(format!("bohm forms, {count} densities at N = {n}"), worst, 1e-8))
}

/// `(sigma_k, psi_k)' = (|k|^2 psi_k, -c^2 sigma_k) / eps` by RK4 with `steps` steps.
pub fn mode_oracle(k2: f64, c2: f64, eps: f64, sigma0: f64, psi0: f64, t: f64, steps: usize) -> (f64, f64) {
    let rhs = |s: f64, p: f64| (k2 * p / eps, -c2 * s / eps);
    let h = t / steps as f64;
    let (mut s, mut p) = (sigma0, psi0);
    for _ in 0..steps {
        let (a1, b1) = rhs(s, p);
        let (a2, b2) = rhs(s + 0.5 * h * a1, p + 0.5 * h * b1);
        let (a3, b3) = rhs(s + 0.5 * h * a2, p + 0.5 * h * b2);
        let (a4, b4) = rhs(s + h * a3, p + h * b3);
        s += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    (s, p)
}

pub fn acoustic_checks() -> Result<Vec<Check>> {
    let grid = Grid2D::new(32)?;
    let mut out = Vec::new();
    for (i, eps) in [0.1, 0.01].into_iter().enumerate() {
        let params = LimitParams::new(eps, 1.4)?;
        let mut s0 = AcousticState::zeros(grid, params);
        let mut rng = seeded_rng(11 + i as u64);
        s0.sigma = random_band_limited(grid, 5, &mut rng);
        s0.psi = random_band_limited(grid, 5, &mut rng);
        let e0 = acoustic_energy(&s0);
        let mut drift: f64 = 0.0;
        for step in 1..=100 {
            let s = acoustic_evolve(&s0, 10.0 * eps * step as f64 / 100.0)?;
            drift = drift.max((acoustic_energy(&s) - e0).abs() / e0);
        }
        out.push(Check::new(format!("acoustic energy drift over [0, 10 eps], eps = {eps}"), drift, 1e-12));
    }

    let eps = 0.05;
    let params = LimitParams::new(eps, 2.0)?;
    let mut s0 = AcousticState::zeros(grid, params);
    s0.sigma = ScalarField::from_fn(grid, |x, y| (2.0 * x + y).cos());
    s0.psi = ScalarField::from_fn(grid, |x, y| 0.3 * (2.0 * x + y).cos());
    let t = 0.37;
    let s = acoustic_evolve(&s0, t)?;
    let (sig, psi) = mode_oracle(5.0, params.sound_speed_sq(), eps, 1.0, 0.3, t, 200_000);
    let sig_ref = ScalarField::from_fn(grid, |x, y| sig * (2.0 * x + y).cos());
    let psi_ref = ScalarField::from_fn(grid, |x, y| psi * (2.0 * x + y).cos());
    let err = (&s.sigma - &sig_ref).max_abs().max((&s.psi - &psi_ref).max_abs());
    out.push(Check::new("single mode against RK4 oracle", err, 1e-10));
    Ok(out)
}

pub fn euler_checks() -> Result<Vec<Check>> {
    let grid = Grid2D::new(64)?;
    let tg = taylor_green(grid);
    let residual = euler_residual(&tg, 0.0)?;
    let traj = euler_solve(&tg.v, 1.0, 1e-3, 1000)?;
    let last = traj.last().expect("trajectory keeps its final state");
    let drift = norm(&(&last.v - &tg.v), 2.0, 0)?;
    Ok(vec![
        Check::new("Taylor-Green residual at N = 64", residual, 1e-10),
        Check::new("Taylor-Green drift over t = 1, dt = 1e-3", drift, 1e-8),
    ])
}
