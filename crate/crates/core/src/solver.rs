//! Time integration of the Mach-scaled quantum Navier-Stokes system
//!
//! ```text
//! d_t n + div m = 0
//! d_t m + div(m (x) m / n) + grad p(n) / eps^2 - 2 eps^2 n grad(lap sqrt(n) / sqrt(n)) = 2 eps div(n D(u))
//! ```
//!
//! with `m = n u`. Each step is a Strang splitting: half a step of the linear
//! acoustic flow (solved exactly per Fourier mode), one RK4 step of the
//! remaining terms, and another acoustic half step. The remainder never
//! changes `n`, so the density is frozen during the RK4 stage.

use rustfft::num_complex::Complex64;

use crate::acoustic::InitialData;
use crate::constitutive::{self, BohmForm, LimitParams, DENSITY_FLOOR};
use crate::error::{QnsError, Result};
use crate::grid::{Grid2D, ScalarField, VectorField};
use crate::spectral::{self, grad_sq_symbol, Spectrum};

const CFL_SAFETY: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct QnsState {
    pub n: ScalarField,
    /// Momentum `n u`.
    pub m: VectorField,
    pub time: f64,
    pub params: LimitParams,
}

impl QnsState {
    pub fn rest(grid: Grid2D, params: LimitParams) -> Self {
        Self {
            n: ScalarField::constant(grid, 1.0),
            m: VectorField::zeros(grid),
            time: 0.0,
            params,
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.n.grid()
    }

    /// Pointwise `u = m / n`, checked against the density floor.
    pub fn velocity(&self) -> Result<VectorField> {
        self.check_vacuum()?;
        Ok(VectorField {
            x: self.m.x.zip_map(&self.n, |m, n| m / n),
            y: self.m.y.zip_map(&self.n, |m, n| m / n),
        })
    }

    pub fn mass(&self) -> f64 {
        self.n.integral()
    }

    pub fn momentum(&self) -> (f64, f64) {
        (self.m.x.integral(), self.m.y.integral())
    }

    fn check_vacuum(&self) -> Result<()> {
        let (i, j, value) = self.n.argmin();
        if !(value >= DENSITY_FLOOR) {
            return Err(QnsError::Vacuum {
                time: self.time,
                i,
                j,
                value,
            });
        }
        Ok(())
    }
}

/// `n = 1 + eps n1`, `m = n u0`, both from the mollified data and dealiased.
pub fn qns_init(params: LimitParams, data: &InitialData) -> Result<QnsState> {
    let eps = params.epsilon();
    let n1 = data.mollified_density();
    let u0 = data.mollified_velocity();
    let n = spectral::dealias(&n1.map(|v| 1.0 + eps * v));
    let min = n.min();
    if !(min >= 0.5) {
        return Err(QnsError::InitialVacuum { min });
    }
    let m = spectral::dealias_vector(&u0.mul_scalar(&n));
    Ok(QnsState {
        n,
        m,
        time: 0.0,
        params,
    })
}

/// Which non-acoustic terms the explicit stage includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Terms {
    pub advection: bool,
    pub nonlinear_pressure: bool,
    pub bohm: bool,
    pub viscosity: bool,
}

impl Terms {
    pub const FULL: Terms = Terms {
        advection: true,
        nonlinear_pressure: true,
        bohm: true,
        viscosity: true,
    };

    /// Linear acoustics only; the explicit stage is skipped.
    pub const ACOUSTIC_ONLY: Terms = Terms {
        advection: false,
        nonlinear_pressure: false,
        bohm: false,
        viscosity: false,
    };

    fn any(&self) -> bool {
        self.advection || self.nonlinear_pressure || self.bohm || self.viscosity
    }
}

/// Exact flow of `d_t rho + div m = 0`, `d_t m + (p'(1)/eps^2) grad rho = 0`
/// with `rho = n - 1`, applied per Fourier mode.
pub(crate) fn acoustic_stage(n: &ScalarField, m: &VectorField, params: &LimitParams, dt: f64) -> (ScalarField, VectorField) {
    let grid = n.grid();
    let c = params.sound_speed_sq().sqrt();
    let eps = params.epsilon();
    let rho = Spectrum::forward(n);
    let mx = Spectrum::forward(&m.x);
    let my = Spectrum::forward(&m.y);
    let size = grid.n();
    let i = Complex64::new(0.0, 1.0);
    let (rho_c, mx_c, my_c) = (rho.coeffs(), mx.coeffs(), my.coeffs());
    let mut new_rho = rho_c.to_vec();
    let mut new_mx = mx_c.to_vec();
    let mut new_my = my_c.to_vec();
    for q in 0..size {
        for p in 0..size {
            let k2 = grad_sq_symbol(&grid, p, q);
            if k2 == 0.0 {
                continue;
            }
            let idx = q * size + p;
            let kx = grid.odd_wavenumber(p);
            let ky = grid.odd_wavenumber(q);
            let omega = c * k2.sqrt() / eps;
            let (sin, cos) = (omega * dt).sin_cos();
            let d0 = i * (mx_c[idx] * kx + my_c[idx] * ky);
            let r0 = rho_c[idx];
            let r1 = r0 * cos - d0 * (sin / omega);
            let d1 = d0 * cos + r0 * (omega * sin);
            // Only the gradient part of m oscillates.
            let dm = -i * (d1 - d0) / k2;
            new_rho[idx] = r1;
            new_mx[idx] = mx_c[idx] + dm * kx;
            new_my[idx] = my_c[idx] + dm * ky;
        }
    }
    let rebuild = |coeffs: &[Complex64]| Spectrum::zeros(grid).map_modes(|p, q, _| coeffs[q * size + p]).to_field();
    (
        rebuild(&new_rho),
        VectorField {
            x: rebuild(&new_mx),
            y: rebuild(&new_my),
        },
    )
}

/// Momentum forcing that depends on `n` alone: nonlinear pressure remainder
/// and the Bohm force.
fn density_forcing(n: &ScalarField, params: &LimitParams, terms: Terms) -> Result<VectorField> {
    let grid = n.grid();
    let eps = params.epsilon();
    let gamma = params.gamma();
    let mut force = VectorField::zeros(grid);
    if terms.nonlinear_pressure {
        let c2 = params.sound_speed_sq();
        let p = constitutive::pressure(n, gamma)?;
        let remainder = p.zip_map(n, |p, n| p - c2 * (n - 1.0) - 1.0);
        let g = spectral::gradient_of(&Spectrum::forward(&remainder).dealiased());
        force = &force - &g.scale(1.0 / (eps * eps));
    }
    if terms.bohm {
        let b = constitutive::bohm_force(n, BohmForm::Divergence)?;
        force = &force + &b.scale(eps * eps);
    }
    Ok(force)
}

struct Remainder<'a> {
    n: &'a ScalarField,
    eps: f64,
    terms: Terms,
    fixed: VectorField,
}

impl Remainder<'_> {
    /// `-div(m (x) u) + 2 eps div(n D(u)) + fixed`.
    fn eval(&self, m: &VectorField) -> VectorField {
        let grid = self.n.grid();
        if !(self.terms.advection || self.terms.viscosity) {
            return self.fixed.clone();
        }
        let ux = Spectrum::forward(&m.x.zip_map(self.n, |m, n| m / n)).dealiased();
        let uy = Spectrum::forward(&m.y.zip_map(self.n, |m, n| m / n)).dealiased();
        let mut sxx = ScalarField::zeros(grid);
        let mut sxy = ScalarField::zeros(grid);
        let mut syy = ScalarField::zeros(grid);
        if self.terms.advection {
            let (ufx, ufy) = (ux.to_field(), uy.to_field());
            sxx = &sxx - &(&m.x * &ufx);
            sxy = &sxy - &(&m.x * &ufy);
            syy = &syy - &(&m.y * &ufy);
        }
        if self.terms.viscosity {
            let two_eps_n = self.n.scale(2.0 * self.eps);
            let dxx = ux.derivative(1, 0).to_field();
            let dyy = uy.derivative(0, 1).to_field();
            let dxy = ux.derivative(0, 1).add(&uy.derivative(1, 0)).scale(0.5).to_field();
            sxx = &sxx + &(&two_eps_n * &dxx);
            sxy = &sxy + &(&two_eps_n * &dxy);
            syy = &syy + &(&two_eps_n * &dyy);
        }
        let txx = Spectrum::forward(&sxx).dealiased();
        let txy = Spectrum::forward(&sxy).dealiased();
        let tyy = Spectrum::forward(&syy).dealiased();
        let fx = txx.derivative(1, 0).add(&txy.derivative(0, 1)).to_field();
        let fy = txy.derivative(1, 0).add(&tyy.derivative(0, 1)).to_field();
        &VectorField { x: fx, y: fy } + &self.fixed
    }
}

fn axpy(m: &VectorField, k: &VectorField, a: f64) -> VectorField {
    VectorField {
        x: m.x.zip_map(&k.x, |m, k| m + a * k),
        y: m.y.zip_map(&k.y, |m, k| m + a * k),
    }
}

pub fn qns_step(s: &QnsState, dt: f64) -> Result<QnsState> {
    qns_step_with(s, dt, Terms::FULL)
}

/// One Strang step with a selectable set of explicit terms.
pub fn qns_step_with(s: &QnsState, dt: f64, terms: Terms) -> Result<QnsState> {
    if !(dt > 0.0) {
        return Err(QnsError::InvalidParameter(format!("time step {dt} must be positive")));
    }
    s.check_vacuum()?;
    let params = s.params;
    let (n_half, m_half) = acoustic_stage(&s.n, &s.m, &params, 0.5 * dt);
    let half = QnsState {
        n: n_half,
        m: m_half,
        time: s.time + 0.5 * dt,
        params,
    };
    half.check_vacuum()?;

    let m_star = if terms.any() {
        let rem = Remainder {
            n: &half.n,
            eps: params.epsilon(),
            terms,
            fixed: density_forcing(&half.n, &params, terms)?,
        };
        let m0 = &half.m;
        let k1 = rem.eval(m0);
        let k2 = rem.eval(&axpy(m0, &k1, 0.5 * dt));
        let k3 = rem.eval(&axpy(m0, &k2, 0.5 * dt));
        let k4 = rem.eval(&axpy(m0, &k3, dt));
        let mut m = axpy(m0, &k1, dt / 6.0);
        m = axpy(&m, &k2, dt / 3.0);
        m = axpy(&m, &k3, dt / 3.0);
        axpy(&m, &k4, dt / 6.0)
    } else {
        half.m
    };

    let (n1, m1) = acoustic_stage(&half.n, &m_star, &params, 0.5 * dt);
    let next = QnsState {
        n: n1,
        m: m1,
        time: s.time + dt,
        params,
    };
    if !next.n.is_finite() || !next.m.is_finite() {
        return Err(QnsError::NonFinite { time: next.time });
    }
    next.check_vacuum()?;
    Ok(next)
}

/// Stable explicit step; the acoustic scale is integrated exactly and does
/// not enter.
pub fn cfl_dt(s: &QnsState) -> f64 {
    let h = s.grid().spacing();
    let eps = s.params.epsilon();
    let umax = s
        .m
        .x
        .values()
        .iter()
        .zip(s.m.y.values())
        .zip(s.n.values())
        .fold(0.0f64, |acc, ((mx, my), n)| acc.max((mx * mx + my * my).sqrt() / n));
    let advective = if umax > 0.0 { h / umax } else { f64::INFINITY };
    let dispersive = h * h / (2.0 * eps * eps * std::f64::consts::PI.powi(2));
    let viscous = h * h / (2.0 * eps * s.n.max());
    CFL_SAFETY * advective.min(dispersive).min(viscous)
}

/// Kinetic, internal and quantum parts of the total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub internal: f64,
    pub quantum: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.internal + self.quantum
    }
}

/// `int (|m|^2 / (2n) + H(n)/eps^2 + 2 eps^2 |grad sqrt(n)|^2)`.
pub fn total_energy(s: &QnsState) -> Result<EnergyParts> {
    s.check_vacuum()?;
    let eps = s.params.epsilon();
    let kinetic = s
        .m
        .magnitude_sq()
        .zip_map(&s.n, |m2, n| 0.5 * m2 / n)
        .integral();
    let internal = constitutive::free_energy(&s.n, s.params.gamma(), 0)?.integral() / (eps * eps);
    let root = constitutive::sqrt_density(&s.n);
    let g = spectral::gradient_of(&root);
    let quantum = 2.0 * eps * eps * g.magnitude_sq().integral();
    Ok(EnergyParts {
        kinetic,
        internal,
        quantum,
    })
}

/// Viscous dissipation rate `2 eps int n |D(u)|^2`.
pub fn dissipation_rate(s: &QnsState) -> Result<f64> {
    let u = s.velocity()?;
    let ux = Spectrum::forward(&u.x);
    let uy = Spectrum::forward(&u.y);
    let dxx = ux.derivative(1, 0).to_field();
    let dyy = uy.derivative(0, 1).to_field();
    let dxy = ux.derivative(0, 1).add(&uy.derivative(1, 0)).scale(0.5).to_field();
    let mut d2 = &(&dxx * &dxx) + &(&dyy * &dyy);
    d2 = &d2 + &(&dxy * &dxy).scale(2.0);
    Ok(2.0 * s.params.epsilon() * (&d2 * &s.n).integral())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEntry {
    pub t: f64,
    pub total: f64,
    pub kinetic: f64,
    pub internal: f64,
    pub quantum: f64,
    pub dissipation_cumulative: f64,
}

/// Energy time series with trapezoidal accumulation of the dissipation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    entries: Vec<EnergyEntry>,
    cumulative: f64,
    last: Option<(f64, f64)>,
    latest: Option<EnergyEntry>,
}

impl EnergyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in the state after a step; call once per step so the dissipation
    /// integral sees every step. `record` keeps the entry in the series.
    pub fn observe(&mut self, s: &QnsState, record: bool) -> Result<EnergyEntry> {
        let parts = total_energy(s)?;
        let rate = dissipation_rate(s)?;
        if let Some((t_prev, r_prev)) = self.last {
            self.cumulative += 0.5 * (rate + r_prev) * (s.time - t_prev);
        }
        self.last = Some((s.time, rate));
        let entry = EnergyEntry {
            t: s.time,
            total: parts.total(),
            kinetic: parts.kinetic,
            internal: parts.internal,
            quantum: parts.quantum,
            dissipation_cumulative: self.cumulative,
        };
        if record {
            self.entries.push(entry);
        }
        self.latest = Some(entry);
        Ok(entry)
    }

    pub fn entries(&self) -> &[EnergyEntry] {
        &self.entries
    }

    pub fn latest(&self) -> Option<EnergyEntry> {
        self.latest
    }

    /// Largest excess `E(t) + D(t) - E(0) (1 + rel_tol)` over the recorded series.
    pub fn worst_excess(&self, rel_tol: f64) -> f64 {
        let Some(first) = self.entries.first() else {
            return f64::NEG_INFINITY;
        };
        let bound = first.total * (1.0 + rel_tol);
        self.entries
            .iter()
            .map(|e| e.total + e.dissipation_cumulative - bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete energy inequality with an additive scheme allowance.
    pub fn inequality_holds(&self, rel_tol: f64, scheme_tol: f64) -> bool {
        self.worst_excess(rel_tol) <= scheme_tol
    }
}
