//! Pressure law `p(n) = n^gamma`, the Helmholtz free energy and the quantum
//! Bohm force.

use crate::error::{QnsError, Result};
use crate::grid::{ScalarField, VectorField};
use crate::spectral::{self, Spectrum};

/// Densities below this make the Bohm quotient meaningless.
pub const DENSITY_FLOOR: f64 = 1e-8;

/// Mach number and adiabatic exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    epsilon: f64,
    gamma: f64,
}

impl LimitParams {
    pub fn new(epsilon: f64, gamma: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(QnsError::InvalidParameter(format!("epsilon = {epsilon} must lie in (0, 1)")));
        }
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(QnsError::InvalidParameter(format!("gamma = {gamma} must exceed 1")));
        }
        Ok(Self { epsilon, gamma })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `min{2, gamma}`.
    pub fn lambda(&self) -> f64 {
        self.gamma.min(2.0)
    }

    /// Convergence-rate exponent `min{1 - 1/gamma, 1/gamma}`.
    pub fn rate(&self) -> f64 {
        rate_exponent(self.gamma)
    }

    /// `p'(1)`, taken from `H''(1)`.
    pub fn sound_speed_sq(&self) -> f64 {
        free_energy_scalar(1.0, self.gamma, 2)
    }
}

pub fn rate_exponent(gamma: f64) -> f64 {
    (1.0 - 1.0 / gamma).min(1.0 / gamma)
}

/// `(1 + r)^gamma - 1 - gamma r` without cancellation for small `r`.
fn power_remainder(r: f64, gamma: f64) -> f64 {
    if r.abs() < 0.1 {
        let mut coeff = gamma * (gamma - 1.0) / 2.0;
        let mut power = r * r;
        let mut sum = 0.0;
        for j in 2..80 {
            let term = coeff * power;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coeff *= (gamma - j as f64) / (j as f64 + 1.0);
            power *= r;
        }
        sum
    } else {
        (gamma * r.ln_1p()).exp_m1() - gamma * r
    }
}

/// `H(n) - H(b) - H'(b)(n - b)` for positive `n`, `b`.
pub fn relative_free_energy(n: f64, b: f64, gamma: f64) -> f64 {
    b.powf(gamma) * power_remainder((n - b) / b, gamma) / (gamma - 1.0)
}

/// `H(n)`, `H'(n)` or `H''(n)` at a single density.
pub fn free_energy_scalar(n: f64, gamma: f64, order: u8) -> f64 {
    match order {
        0 => power_remainder(n - 1.0, gamma) / (gamma - 1.0),
        1 => gamma * (n.powf(gamma - 1.0) - 1.0) / (gamma - 1.0),
        2 => gamma * n.powf(gamma - 2.0),
        _ => panic!("free energy order {order} not supported"),
    }
}

fn check_positive(n: &ScalarField) -> Result<()> {
    let (i, j, value) = n.argmin();
    if value <= 0.0 || value.is_nan() {
        return Err(QnsError::NonPositiveDensity { i, j, value });
    }
    Ok(())
}

pub fn pressure(n: &ScalarField, gamma: f64) -> Result<ScalarField> {
    check_positive(n)?;
    Ok(n.map(|v| v.powf(gamma)))
}

/// Pointwise `H^{(order)}(n)` for `order` in 0..=2.
pub fn free_energy(n: &ScalarField, gamma: f64, order: u8) -> Result<ScalarField> {
    if order > 2 {
        return Err(QnsError::InvalidParameter(format!("free energy order {order} > 2")));
    }
    check_positive(n)?;
    Ok(n.map(|v| free_energy_scalar(v, gamma, order)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BohmForm {
    /// `2 n grad(lap sqrt(n) / sqrt(n))`
    Potential,
    /// `grad lap n - 4 div(grad sqrt(n) (x) grad sqrt(n))`
    Divergence,
}

/// Dealiased pointwise square root, ready for differentiation.
pub(crate) fn sqrt_density(n: &ScalarField) -> Spectrum {
    Spectrum::forward(&n.map(f64::sqrt)).dealiased()
}

fn check_floor(n: &ScalarField) -> Result<()> {
    let min = n.min();
    if !(min >= DENSITY_FLOOR) {
        return Err(QnsError::BelowFloor { min });
    }
    Ok(())
}

/// Quantum Bohm force, both forms dealiased.
pub fn bohm_force(n: &ScalarField, form: BohmForm) -> Result<VectorField> {
    check_floor(n)?;
    let root = sqrt_density(n);
    let force = match form {
        BohmForm::Potential => {
            let lap = root.derivative(2, 0).add(&root.derivative(0, 2)).to_field();
            let quotient = lap.zip_map(&root.to_field(), |l, s| l / s);
            let grad = spectral::gradient(&quotient);
            let two_n = n.scale(2.0);
            VectorField {
                x: &grad.x * &two_n,
                y: &grad.y * &two_n,
            }
        }
        BohmForm::Divergence => {
            let ns = Spectrum::forward(n);
            let sx = root.derivative(1, 0).to_field();
            let sy = root.derivative(0, 1).to_field();
            let txx = Spectrum::forward(&(&sx * &sx)).dealiased();
            let txy = Spectrum::forward(&(&sx * &sy)).dealiased();
            let tyy = Spectrum::forward(&(&sy * &sy)).dealiased();
            let fx = ns
                .derivative(3, 0)
                .add(&ns.derivative(1, 2))
                .sub(&txx.derivative(1, 0).add(&txy.derivative(0, 1)).scale(4.0));
            let fy = ns
                .derivative(2, 1)
                .add(&ns.derivative(0, 3))
                .sub(&txy.derivative(1, 0).add(&tyy.derivative(0, 1)).scale(4.0));
            VectorField {
                x: fx.to_field(),
                y: fy.to_field(),
            }
        }
    };
    Ok(spectral::dealias_vector(&force))
}
