//! Incompressible Euler reference solutions.
//!
//! The analytic Taylor-Green cell is the default limit solution. General
//! divergence-free data is evolved in vorticity form with a dealiased
//! Fourier-Galerkin discretization and classical RK4.

use rustfft::num_complex::Complex64;

use crate::error::{QnsError, Result};
use crate::grid::{Grid2D, ScalarField, VectorField};
use crate::spectral::{self, grad_sq_symbol, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct EulerReference {
    pub v: VectorField,
    /// Mean-free pressure.
    pub pi: ScalarField,
    pub time: f64,
}

/// Steady cell `v = (sin x cos y, -cos x sin y)` with its pressure.
pub fn taylor_green(grid: Grid2D) -> EulerReference {
    taylor_green_scaled(grid, 1.0)
}

/// `amplitude` times the Taylor-Green velocity; still steady, pressure scales
/// with `amplitude^2`.
pub fn taylor_green_scaled(grid: Grid2D, amplitude: f64) -> EulerReference {
    let a = amplitude;
    EulerReference {
        v: VectorField::from_fn(grid, |x, y| a * x.sin() * y.cos(), |x, y| -a * x.cos() * y.sin()),
        pi: ScalarField::from_fn(grid, |x, y| a * a * ((2.0 * x).cos() + (2.0 * y).cos()) / 4.0),
        time: 0.0,
    }
}

/// Dealiased `(v . grad) v`.
fn advection(v: &VectorField) -> (Spectrum, Spectrum) {
    let sx = Spectrum::forward(&v.x);
    let sy = Spectrum::forward(&v.y);
    let dxvx = sx.derivative(1, 0).to_field();
    let dyvx = sx.derivative(0, 1).to_field();
    let dxvy = sy.derivative(1, 0).to_field();
    let dyvy = sy.derivative(0, 1).to_field();
    let ax = &(&v.x * &dxvx) + &(&v.y * &dyvx);
    let ay = &(&v.x * &dxvy) + &(&v.y * &dyvy);
    (Spectrum::forward(&ax).dealiased(), Spectrum::forward(&ay).dealiased())
}

fn pressure_from_advection(ax: &Spectrum, ay: &Spectrum) -> Spectrum {
    let grid = ax.grid();
    ax.map_modes(|p, q, cx| {
        let k2 = grad_sq_symbol(&grid, p, q);
        if k2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let dot = cx * grid.odd_wavenumber(p) + ay.coeff(p, q) * grid.odd_wavenumber(q);
        Complex64::new(0.0, 1.0) * dot / k2
    })
}

/// Mean-free `pi` solving `-lap pi = div((v . grad) v)`.
pub fn pressure_recover(v: &VectorField) -> ScalarField {
    let (ax, ay) = advection(v);
    pressure_from_advection(&ax, &ay).to_field()
}

/// L2 norm of `d_t v + (v . grad) v + grad pi`.
///
/// `dt_probe = 0` treats the reference as steady; otherwise `d_t v` is a
/// central difference of two RK4 probes of size `dt_probe` about `reference`.
pub fn euler_residual(reference: &EulerReference, dt_probe: f64) -> Result<f64> {
    let v = &reference.v;
    let grid = v.grid();
    let (ax, ay) = advection(v);
    let pi = Spectrum::forward(&reference.pi);
    let mut rx = ax.add(&pi.derivative(1, 0)).to_field();
    let mut ry = ay.add(&pi.derivative(0, 1)).to_field();
    if dt_probe != 0.0 {
        let mut fwd = EulerStepper::new(v, dt_probe)?;
        fwd.step()?;
        let mut bwd = EulerStepper::new(v, -dt_probe)?;
        bwd.step()?;
        let dv = &fwd.velocity() - &bwd.velocity();
        let dv = dv.scale(0.5 / dt_probe);
        rx = &rx + &dv.x;
        ry = &ry + &dv.y;
    }
    debug_assert_eq!(rx.grid(), grid);
    spectral::norm(&VectorField { x: rx, y: ry }, 2.0, 0)
}

/// RK4 integrator for `d_t omega + v . grad omega = 0`.
#[derive(Debug, Clone)]
pub struct EulerStepper {
    grid: Grid2D,
    omega: Spectrum,
    mean: (f64, f64),
    dt: f64,
    time: f64,
    initial_max: f64,
}

impl EulerStepper {
    pub fn new(v0: &VectorField, dt: f64) -> Result<Self> {
        let grid = v0.grid();
        let w = spectral::curl(v0);
        let initial_max = w.max_abs();
        let stepper = Self {
            grid,
            omega: Spectrum::forward(&w),
            mean: (v0.x.mean(), v0.y.mean()),
            dt,
            time: 0.0,
            initial_max,
        };
        stepper.check_cfl(v0)?;
        Ok(stepper)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    fn check_cfl(&self, v: &VectorField) -> Result<()> {
        let vmax = v.max_magnitude();
        if vmax > 0.0 {
            let limit = 0.5 * self.grid.spacing() / vmax;
            if self.dt.abs() > limit {
                return Err(QnsError::Cfl { dt: self.dt.abs(), limit });
            }
        }
        Ok(())
    }

    fn velocity_of(&self, omega: &Spectrum) -> VectorField {
        let grid = self.grid;
        let stream = omega.map_modes(|p, q, c| {
            let k2 = grad_sq_symbol(&grid, p, q);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / k2
            }
        });
        let vx = stream.derivative(0, 1).to_field();
        let vy = stream.derivative(1, 0).to_field();
        VectorField {
            x: vx.map(|a| a + self.mean.0),
            y: vy.map(|a| -a + self.mean.1),
        }
    }

    fn rhs(&self, omega: &Spectrum) -> Spectrum {
        let v = self.velocity_of(omega);
        let wx = omega.derivative(1, 0).to_field();
        let wy = omega.derivative(0, 1).to_field();
        let adv = &(&v.x * &wx) + &(&v.y * &wy);
        Spectrum::forward(&adv).dealiased().scale(-1.0)
    }

    pub fn step(&mut self) -> Result<()> {
        let w0 = &self.omega;
        let dt = self.dt;
        let k1 = self.rhs(w0);
        let k2 = self.rhs(&w0.add(&k1.scale(0.5 * dt)));
        let k3 = self.rhs(&w0.add(&k2.scale(0.5 * dt)));
        let k4 = self.rhs(&w0.add(&k3.scale(dt)));
        let incr = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(dt / 6.0);
        self.omega = w0.add(&incr);
        self.time += dt;

        let w = self.omega.to_field();
        if !w.is_finite() {
            return Err(QnsError::NonFinite { time: self.time });
        }
        let max = w.max_abs();
        if max > 10.0 * self.initial_max.max(f64::MIN_POSITIVE) {
            return Err(QnsError::BlowUp {
                time: self.time,
                max,
                initial: self.initial_max,
            });
        }
        self.check_cfl(&self.velocity())
    }

    pub fn velocity(&self) -> VectorField {
        self.velocity_of(&self.omega)
    }

    pub fn vorticity(&self) -> ScalarField {
        self.omega.to_field()
    }

    pub fn reference(&self) -> EulerReference {
        let v = self.velocity();
        let pi = pressure_recover(&v);
        EulerReference { v, pi, time: self.time }
    }
}

/// Evolves `v0` to `t_end`, keeping every `record_every`-th state plus the
/// initial and final ones.
pub fn euler_solve(v0: &VectorField, t_end: f64, dt: f64, record_every: usize) -> Result<Vec<EulerReference>> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(QnsError::InvalidParameter(format!("euler_solve needs dt > 0, t_end >= 0 (dt = {dt}, t_end = {t_end})")));
    }
    let every = record_every.max(1);
    let mut stepper = EulerStepper::new(v0, dt)?;
    let mut out = vec![stepper.reference()];
    let steps = (t_end / dt).round() as usize;
    for k in 1..=steps {
        stepper.step()?;
        if k % every == 0 || k == steps {
            out.push(stepper.reference());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n).unwrap()
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        let tg = taylor_green(grid(32));
        assert!(spectral::divergence(&tg.v).max_abs() < 1e-12);
        assert!(tg.pi.mean().abs() < 1e-15);
    }

    #[test]
    fn taylor_green_energy() {
        let tg = taylor_green(grid(32));
        let e = tg.v.magnitude_sq().integral();
        assert!((e - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn taylor_green_residual() {
        let tg = taylor_green(grid(64));
        assert!(euler_residual(&tg, 0.0).unwrap() < 1e-10);
    }

    #[test]
    fn pressure_of_taylor_green() {
        let tg = taylor_green(grid(32));
        let pi = pressure_recover(&tg.v);
        assert!((&pi - &tg.pi).max_abs() < 1e-10);
    }

    #[test]
    fn trivial_pressures() {
        let g = grid(16);
        assert_eq!(pressure_recover(&VectorField::zeros(g)).max_abs(), 0.0);
        assert!(pressure_recover(&VectorField::constant(g, 0.3, -1.2)).max_abs() < 1e-15);
        let zero = EulerReference {
            v: VectorField::zeros(g),
            pi: ScalarField::zeros(g),
            time: 0.0,
        };
        assert_eq!(euler_residual(&zero, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_velocity_stays_zero() {
        let g = grid(16);
        let traj = euler_solve(&VectorField::zeros(g), 0.1, 0.01, 5).unwrap();
        assert!(traj.iter().all(|r| r.v.max_magnitude() == 0.0));
    }

    #[test]
    fn cfl_violation_is_refused() {
        let tg = taylor_green(grid(32));
        let err = euler_solve(&tg.v, 1.0, 0.5, 1).unwrap_err();
        assert!(matches!(err, QnsError::Cfl { .. }));
    }

    #[test]
    fn rigid_translation_keeps_mean() {
        let g = grid(16);
        let v0 = VectorField::constant(g, 0.4, -0.1);
        let traj = euler_solve(&v0, 0.2, 0.01, 100).unwrap();
        let last = traj.last().unwrap();
        assert!((last.v.x.mean() - 0.4).abs() < 1e-14);
        assert!((last.v.y.mean() + 0.1).abs() < 1e-14);
    }
}
