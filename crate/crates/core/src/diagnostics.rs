//! Relative entropy and the norms that measure the distance between a QNS
//! state and its incompressible-plus-acoustic approximation.

use crate::acoustic::AcousticState;
use crate::constitutive::{self, relative_free_energy};
use crate::error::{QnsError, Result};
use crate::euler::EulerReference;
use crate::grid::{ScalarField, VectorField};
use crate::solver::QnsState;
use crate::spectral::{self, gradient_of};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    pub t: f64,
    pub rel_entropy: f64,
    pub kinetic_part: f64,
    pub quantum_part: f64,
    pub internal_part: f64,
    /// `||sqrt(n)(u - v - grad psi)||^2`, `||(n - 1 - eps sigma)/eps||^2`,
    /// `eps^2 ||grad sqrt(n) - grad sqrt(1 + eps sigma)||^2`.
    pub theorem_lhs: [f64; 3],
    /// `||P(sqrt(n) u) - v||^2`, `||(n - 1)/eps||^2`, `eps^2 ||grad sqrt(n)||^2`.
    pub corollary_lhs: [f64; 3],
}

fn grad_sqrt(n: &ScalarField) -> VectorField {
    gradient_of(&constitutive::sqrt_density(n))
}

/// `1 + eps sigma`, refused where it is not positive.
fn reference_density(ac: &AcousticState, eps: f64) -> Result<ScalarField> {
    let b = ac.sigma.map(|s| 1.0 + eps * s);
    let (i, j, value) = b.argmin();
    if !(value > 0.0) {
        return Err(QnsError::ReferenceVacuum { i, j, value });
    }
    Ok(b)
}

fn check_grids(s: &QnsState, reference: &EulerReference, ac: Option<&AcousticState>) -> Result<()> {
    let g = s.grid();
    g.check_same(&reference.v.grid())?;
    if let Some(ac) = ac {
        g.check_same(&ac.sigma.grid())?;
    }
    Ok(())
}

struct Pieces {
    kinetic_density: ScalarField,
    weighted_vel_sq: f64,
    grad_gap_sq: f64,
    density_gap_sq: f64,
    internal: f64,
}

fn pieces(s: &QnsState, reference: &EulerReference, ac: &AcousticState) -> Result<Pieces> {
    check_grids(s, reference, Some(ac))?;
    let eps = s.params.epsilon();
    let gamma = s.params.gamma();
    let b = reference_density(ac, eps)?;
    let u = s.velocity()?;
    let w = &(&u - &reference.v) - &ac.grad_psi();
    let n_w2 = &w.magnitude_sq() * &s.n;
    let grad_gap = &grad_sqrt(&s.n) - &grad_sqrt(&b);
    let internal_density = s.n.zip_map(&b, |n, b| relative_free_energy(n, b, gamma));
    let density_gap = s.n.zip_map(&b, |n, b| ((n - b) / eps).powi(2));
    Ok(Pieces {
        weighted_vel_sq: n_w2.integral(),
        kinetic_density: n_w2.scale(0.5),
        grad_gap_sq: grad_gap.magnitude_sq().integral(),
        density_gap_sq: density_gap.integral(),
        internal: internal_density.integral() / (eps * eps),
    })
}

/// Relative entropy of `s` against `v + grad psi`, `1 + eps sigma`.
pub fn relative_entropy(s: &QnsState, reference: &EulerReference, ac: &AcousticState) -> Result<EntropyReport> {
    let eps = s.params.epsilon();
    let pc = pieces(s, reference, ac)?;
    let kinetic_part = pc.kinetic_density.integral();
    let quantum_part = 2.0 * eps * eps * pc.grad_gap_sq;
    let internal_part = pc.internal;
    Ok(EntropyReport {
        t: s.time,
        rel_entropy: kinetic_part + quantum_part + internal_part,
        kinetic_part,
        quantum_part,
        internal_part,
        theorem_lhs: [pc.weighted_vel_sq, pc.density_gap_sq, eps * eps * pc.grad_gap_sq],
        corollary_lhs: corollary_lhs(s, reference)?,
    })
}

pub fn theorem_lhs(s: &QnsState, reference: &EulerReference, ac: &AcousticState) -> Result<[f64; 3]> {
    let eps = s.params.epsilon();
    let pc = pieces(s, reference, ac)?;
    Ok([pc.weighted_vel_sq, pc.density_gap_sq, eps * eps * pc.grad_gap_sq])
}

pub fn corollary_lhs(s: &QnsState, reference: &EulerReference) -> Result<[f64; 3]> {
    check_grids(s, reference, None)?;
    let eps = s.params.epsilon();
    let u = s.velocity()?;
    let root = s.n.map(f64::sqrt);
    let (p_part, _) = spectral::helmholtz_project(&u.mul_scalar(&root));
    let vel = (&p_part - &reference.v).magnitude_sq().integral();
    let dens = s.n.map(|n| ((n - 1.0) / eps).powi(2)).integral();
    let grad = eps * eps * grad_sqrt(&s.n).magnitude_sq().integral();
    Ok([vel, dens, grad])
}

/// Density deviation norms split by `|n - 1| < 1` (ties go to the large part).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityNorms {
    pub small_part_l2: f64,
    pub large_part_lgamma: f64,
    pub full_lgamma: f64,
    pub full_llambda: f64,
}

pub fn density_deviation_norms(s: &QnsState) -> DensityNorms {
    let gamma = s.params.gamma();
    let lambda = s.params.lambda();
    let cell = s.grid().cell_area();
    let (mut small, mut large, mut full_g, mut full_l) = (0.0, 0.0, 0.0, 0.0);
    for &n in s.n.values() {
        let d = (n - 1.0).abs();
        if d < 1.0 {
            small += d * d;
        } else {
            large += d.powf(gamma);
        }
        full_g += d.powf(gamma);
        full_l += d.powf(lambda);
    }
    DensityNorms {
        small_part_l2: (small * cell).sqrt(),
        large_part_lgamma: (large * cell).powf(1.0 / gamma),
        full_lgamma: (full_g * cell).powf(1.0 / gamma),
        full_llambda: (full_l * cell).powf(1.0 / lambda),
    }
}

/// `int H(n) / int (|n-1|^2 1_{|n-1|<1} + |n-1|^gamma 1_{|n-1|>=1})`, or
/// `None` when the denominator vanishes.
pub fn free_energy_ratio(n: &ScalarField, gamma: f64) -> Result<Option<f64>> {
    let h = constitutive::free_energy(n, gamma, 0)?.integral();
    let denom = n
        .map(|v| {
            let d = (v - 1.0).abs();
            if d < 1.0 {
                d * d
            } else {
                d.powf(gamma)
            }
        })
        .integral();
    Ok(if denom > 0.0 { Some(h / denom) } else { None })
}

/// Least-squares power law through `(log eps, log value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log residuals.
    pub residual: f64,
}

pub fn rate_fit(eps: &[f64], vals: &[f64]) -> Result<RateFit> {
    if eps.len() != vals.len() {
        return Err(QnsError::InvalidFitData(format!("{} epsilons but {} values", eps.len(), vals.len())));
    }
    if eps.len() < 3 {
        return Err(QnsError::TooFewPoints(eps.len()));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(QnsError::InvalidFitData("epsilons must be positive and strictly decreasing".into()));
    }
    if let Some(v) = vals.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(QnsError::InvalidFitData(format!("non-positive value {v}")));
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(RateFit {
        epsilons: eps.to_vec(),
        values: vals.to_vec(),
        slope,
        intercept,
        residual,
    })
}
