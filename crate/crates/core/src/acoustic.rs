//! Exact Fourier-mode solution of the Mach-scaled acoustic system
//!
//! ```text
//! d_t sigma + (1/eps) lap psi = 0,    d_t grad psi + (p'(1)/eps) grad sigma = 0
//! ```
//!
//! Each nonzero mode is a harmonic oscillator with frequency
//! `sqrt(p'(1)) |k| / eps`, so evolution is a closed-form rotation of
//! `(sqrt(p'(1)) sigma_k, |k| psi_k)` and never time-steps.

use rustfft::num_complex::Complex64;

use crate::constitutive::LimitParams;
use crate::error::{QnsError, Result};
use crate::grid::{ScalarField, VectorField};
use crate::spectral::{self, grad_sq_symbol, Spectrum};

/// Initial perturbation data shared by the QNS run and its acoustic correction.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub n1_0: ScalarField,
    pub u_0: VectorField,
    pub eta: f64,
    pub bound_m: f64,
}

impl InitialData {
    /// Checks `||n1_0||_{H^1} + ||u_0||_{L^2} <= bound_m`.
    pub fn new(n1_0: ScalarField, u_0: VectorField, eta: f64, bound_m: f64) -> Result<Self> {
        n1_0.grid().check_same(&u_0.grid())?;
        if !(eta >= 0.0) {
            return Err(QnsError::InvalidParameter(format!("mollification width {eta} < 0")));
        }
        let size = spectral::norm(&n1_0, 2.0, 1)? + spectral::norm(&u_0, 2.0, 0)?;
        if !(size <= bound_m) {
            return Err(QnsError::BoundExceeded { norm: size, bound: bound_m });
        }
        Ok(Self { n1_0, u_0, eta, bound_m })
    }

    pub fn mollified_density(&self) -> ScalarField {
        mollify(&self.n1_0, self.eta)
    }

    pub fn mollified_velocity(&self) -> VectorField {
        VectorField {
            x: mollify(&self.u_0.x, self.eta),
            y: mollify(&self.u_0.y, self.eta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticState {
    pub sigma: ScalarField,
    /// Mean-free acoustic potential.
    pub psi: ScalarField,
    pub time: f64,
    pub params: LimitParams,
}

impl AcousticState {
    pub fn zeros(grid: crate::grid::Grid2D, params: LimitParams) -> Self {
        Self {
            sigma: ScalarField::zeros(grid),
            psi: ScalarField::zeros(grid),
            time: 0.0,
            params,
        }
    }

    pub fn grad_psi(&self) -> VectorField {
        spectral::gradient(&self.psi)
    }
}

/// Smoothing by the spectral Gaussian multiplier `exp(-eta^2 |k|^2 / 2)`.
pub fn mollify(f: &ScalarField, eta: f64) -> ScalarField {
    if eta == 0.0 {
        return f.clone();
    }
    let grid = f.grid();
    Spectrum::forward(f)
        .map_modes(|p, q, c| {
            let kx = grid.wavenumber(p) as f64;
            let ky = grid.wavenumber(q) as f64;
            c * (-0.5 * eta * eta * (kx * kx + ky * ky)).exp()
        })
        .to_field()
}

/// `sigma(0)` is the mollified density perturbation and `grad psi(0)` the
/// gradient part of the mollified velocity.
pub fn acoustic_init(data: &InitialData, params: LimitParams) -> AcousticState {
    let sigma = data.mollified_density();
    let u = data.mollified_velocity();
    let (_, q) = spectral::helmholtz_project(&u);
    AcousticState {
        sigma,
        psi: potential_of_gradient(&q),
        time: 0.0,
        params,
    }
}

/// Mean-free `psi` with `grad psi = q` for a curl-free `q`.
fn potential_of_gradient(q: &VectorField) -> ScalarField {
    let grid = q.grid();
    let qx = Spectrum::forward(&q.x);
    let qy = Spectrum::forward(&q.y);
    qx.map_modes(|p, r, cx| {
        let k2 = grad_sq_symbol(&grid, p, r);
        if k2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let dot = cx * grid.odd_wavenumber(p) + qy.coeff(p, r) * grid.odd_wavenumber(r);
        Complex64::new(0.0, -1.0) * dot / k2
    })
    .to_field()
}

/// Advances the acoustic state by `t >= 0`.
pub fn acoustic_evolve(s0: &AcousticState, t: f64) -> Result<AcousticState> {
    if !(t >= 0.0) {
        return Err(QnsError::InvalidParameter(format!("acoustic evolution time {t} < 0")));
    }
    Ok(propagate(s0, t))
}

/// Exact flow for any signed `t`.
pub(crate) fn propagate(s0: &AcousticState, t: f64) -> AcousticState {
    let grid = s0.sigma.grid();
    let c = s0.params.sound_speed_sq().sqrt();
    let eps = s0.params.epsilon();
    let sig = Spectrum::forward(&s0.sigma);
    let psi = Spectrum::forward(&s0.psi);
    let k_of = |p: usize, q: usize| grad_sq_symbol(&grid, p, q).sqrt();
    let sig_t = sig.map_modes(|p, q, s| {
        let k = k_of(p, q);
        if k == 0.0 {
            return s;
        }
        let (sin, cos) = (c * k * t / eps).sin_cos();
        s * cos + psi.coeff(p, q) * (k / c * sin)
    });
    let psi_t = psi.map_modes(|p, q, y| {
        let k = k_of(p, q);
        if k == 0.0 {
            return y;
        }
        let (sin, cos) = (c * k * t / eps).sin_cos();
        y * cos - sig.coeff(p, q) * (c / k * sin)
    });
    AcousticState {
        sigma: sig_t.to_field(),
        psi: psi_t.to_field(),
        time: s0.time + t,
        params: s0.params,
    }
}

/// `1/2 int (p'(1) sigma^2 + |grad psi|^2)`.
pub fn acoustic_energy(s: &AcousticState) -> f64 {
    let c2 = s.params.sound_speed_sq();
    let grad = s.grad_psi();
    let density = s.sigma.zip_map(&grad.magnitude_sq(), |sg, g| c2 * sg * sg + g);
    0.5 * density.integral()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveRow {
    pub t: f64,
    /// `||grad psi||_{W^{k,p}} + ||sigma||_{W^{k,p}}` at time `t`.
    pub lhs_norm: f64,
    /// `(1 + t/eps)^{1/p - 1/q}` with `1/p + 1/q = 1`.
    pub bound_shape: f64,
}

/// Measures the dispersive norms at each requested time. Reports only; the
/// decay shape is not expected to bound periodic waves.
pub fn dispersive_report(s0: &AcousticState, times: &[f64], k: u32, p: f64) -> Result<Vec<DispersiveRow>> {
    if !(p >= 2.0) {
        return Err(QnsError::InvalidExponent(p));
    }
    if k > 1 {
        return Err(QnsError::InvalidNormOrder(k));
    }
    let exponent = dispersive_exponent(p);
    let eps = s0.params.epsilon();
    times
        .iter()
        .map(|&t| {
            let s = acoustic_evolve(s0, t)?;
            let lhs_norm = spectral::norm(&s.grad_psi(), p, k)? + spectral::norm(&s.sigma, p, k)?;
            Ok(DispersiveRow {
                t,
                lhs_norm,
                bound_shape: (1.0 + t / eps).powf(exponent),
            })
        })
        .collect()
}

/// `1/p - 1/q` for the conjugate exponent `q`.
fn dispersive_exponent(p: f64) -> f64 {
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    inv_p - (1.0 - inv_p)
}
