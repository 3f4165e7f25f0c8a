//! Fourier-spectral calculus on the periodic grid.
//!
//! The forward transform is normalized by `1/N^2`, so the zero mode of a
//! spectrum equals the mean of the field. Bins are stored with the same
//! layout as grid values: bin `(p, q)` (x-wavenumber bin `p`, y-wavenumber
//! bin `q`) sits at `q * n + p`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{QnsError, Result};
use crate::grid::{Grid2D, ScalarField, VectorField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|planner| {
        let mut planner = planner.borrow_mut();
        if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        }
    })
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in 0..n {
            dst[i * n + j] = src[j * n + i];
        }
    }
}

/// Unnormalized 2D transform in place.
fn fft2(buf: &mut [Complex64], n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    fft.process(buf);
    let mut scratch = vec![Complex64::new(0.0, 0.0); buf.len()];
    transpose(buf, &mut scratch, n);
    fft.process(&mut scratch);
    transpose(&scratch, buf, n);
}

/// Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn forward(f: &ScalarField) -> Self {
        let grid = f.grid();
        let mut coeffs: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut coeffs, grid.n(), false);
        let norm = 1.0 / grid.len() as f64;
        for c in &mut coeffs {
            *c *= norm;
        }
        Self { grid, coeffs }
    }

    /// Inverse transform, dropping the (round-off) imaginary residue.
    pub fn to_field(&self) -> ScalarField {
        let mut buf = self.coeffs.clone();
        fft2(&mut buf, self.grid.n(), true);
        if cfg!(debug_assertions) {
            let scale: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
            let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
            debug_assert!(
                residue <= 1e-10 * scale.max(1.0),
                "imaginary residue {residue} exceeds tolerance for magnitude {scale}"
            );
        }
        let values = buf.into_iter().map(|c| c.re).collect();
        ScalarField::from_values(self.grid, values).expect("spectrum and grid sizes agree")
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize, q: usize) -> Complex64 {
        self.coeffs[q * self.grid.n() + p]
    }

    /// Applies `f(p, q, c)` to every bin.
    pub fn map_modes(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let n = self.grid.n();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| f(idx % n, idx / n, c))
            .collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Spectrum) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Spectrum) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    /// Spectral derivative `d^a/dx^a d^b/dy^b`. No order check.
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let grid = self.grid;
        let kx_pow = |p: usize| axis_power(&grid, p, a);
        let ky_pow = |q: usize| axis_power(&grid, q, b);
        let phase = i_pow(a + b);
        self.map_modes(|p, q, c| c * phase * (kx_pow(p) * ky_pow(q)))
    }

    /// Zeroes every bin with `|k_x| > N/3` or `|k_y| > N/3`.
    pub fn dealiased(&self) -> Self {
        let grid = self.grid;
        self.map_modes(|p, q, c| {
            if retained(&grid, p) && retained(&grid, q) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Sum of squared coefficient magnitudes.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `k^order` along one axis with the Nyquist convention for odd orders.
fn axis_power(grid: &Grid2D, p: usize, order: u32) -> f64 {
    if order == 0 {
        return 1.0;
    }
    let k = if order % 2 == 1 {
        grid.odd_wavenumber(p)
    } else {
        grid.wavenumber(p) as f64
    };
    k.powi(order as i32)
}

fn i_pow(e: u32) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn retained(grid: &Grid2D, p: usize) -> bool {
    3 * grid.wavenumber(p).unsigned_abs() as usize <= grid.n()
}

/// Spectral derivative of `f` of order `(a, b)` with `a + b <= 3`.
pub fn differentiate(f: &ScalarField, order: (u32, u32)) -> Result<ScalarField> {
    let (a, b) = order;
    if a + b > 3 {
        return Err(QnsError::UnsupportedOrder(a, b));
    }
    if a + b == 0 {
        return Ok(f.clone());
    }
    Ok(Spectrum::forward(f).derivative(a, b).to_field())
}

pub fn gradient(f: &ScalarField) -> VectorField {
    gradient_of(&Spectrum::forward(f))
}

pub(crate) fn gradient_of(s: &Spectrum) -> VectorField {
    VectorField {
        x: s.derivative(1, 0).to_field(),
        y: s.derivative(0, 1).to_field(),
    }
}

pub fn divergence(w: &VectorField) -> ScalarField {
    divergence_spectrum(w).to_field()
}

pub(crate) fn divergence_spectrum(w: &VectorField) -> Spectrum {
    Spectrum::forward(&w.x)
        .derivative(1, 0)
        .add(&Spectrum::forward(&w.y).derivative(0, 1))
}

/// Scalar curl `d_x w_y - d_y w_x`.
pub fn curl(w: &VectorField) -> ScalarField {
    Spectrum::forward(&w.y)
        .derivative(1, 0)
        .sub(&Spectrum::forward(&w.x).derivative(0, 1))
        .to_field()
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let s = Spectrum::forward(f);
    s.derivative(2, 0).add(&s.derivative(0, 2)).to_field()
}

/// `|k|^2` built from the odd-order wavenumbers, i.e. the symbol of `-div grad`.
pub(crate) fn grad_sq_symbol(grid: &Grid2D, p: usize, q: usize) -> f64 {
    let kx = grid.odd_wavenumber(p);
    let ky = grid.odd_wavenumber(q);
    kx * kx + ky * ky
}

/// Mean-free solution `u` of `-div grad u = f` (zero mode and modes with a
/// vanishing gradient symbol set to 0).
pub fn inverse_neg_laplacian(f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    Spectrum::forward(f)
        .map_modes(|p, q, c| {
            let k2 = grad_sq_symbol(&grid, p, q);
            if k2 == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                c / k2
            }
        })
        .to_field()
}

pub fn dealias(f: &ScalarField) -> ScalarField {
    Spectrum::forward(f).dealiased().to_field()
}

pub fn dealias_vector(w: &VectorField) -> VectorField {
    VectorField {
        x: dealias(&w.x),
        y: dealias(&w.y),
    }
}

/// Splits `w` into its divergence-free part `P w` and gradient part `Q w`.
///
/// `Q` acts per mode as `k (k . w_k) / |k|^2` using the odd-order wavenumbers,
/// so `div P w` and `curl Q w` vanish identically on the grid. Modes where the
/// gradient symbol is zero (the mean and the pure-Nyquist corner) go to `P`.
pub fn helmholtz_project(w: &VectorField) -> (VectorField, VectorField) {
    let grid = w.grid();
    let wx = Spectrum::forward(&w.x);
    let wy = Spectrum::forward(&w.y);
    let n = grid.n();
    let mut qx = Spectrum::zeros(grid);
    let mut qy = Spectrum::zeros(grid);
    for q in 0..n {
        for p in 0..n {
            let kx = grid.odd_wavenumber(p);
            let ky = grid.odd_wavenumber(q);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let idx = q * n + p;
            let dot = wx.coeffs[idx] * kx + wy.coeffs[idx] * ky;
            qx.coeffs[idx] = dot * (kx / k2);
            qy.coeffs[idx] = dot * (ky / k2);
        }
    }
    let px = wx.sub(&qx);
    let py = wy.sub(&qy);
    (
        VectorField {
            x: px.to_field(),
            y: py.to_field(),
        },
        VectorField {
            x: qx.to_field(),
            y: qy.to_field(),
        },
    )
}

/// Things that have a pointwise magnitude and spectral derivatives.
pub trait Normed {
    fn components(&self) -> Vec<&ScalarField>;
}

impl Normed for ScalarField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Normed for VectorField {
    fn components(&self) -> Vec<&ScalarField> {
        vec![&self.x, &self.y]
    }
}

/// Discrete `W^{k,p}` norm with uniform quadrature.
///
/// For finite `p` this is `(sum_{|a|<=k} int |d^a f|^p)^{1/p}`; `p = inf`
/// (pass `f64::INFINITY`) takes the largest sup-norm over the same
/// multi-indices. Vector fields use the pointwise Euclidean magnitude.
pub fn norm<F: Normed + ?Sized>(f: &F, p: f64, k: u32) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(QnsError::InvalidExponent(p));
    }
    if k > 2 {
        return Err(QnsError::InvalidNormOrder(k));
    }
    let components = f.components();
    let grid = components[0].grid();
    let spectra: Vec<Spectrum> = if k > 0 {
        components.iter().map(|c| Spectrum::forward(c)).collect()
    } else {
        Vec::new()
    };
    let mut total = 0.0;
    for order in 0..=k {
        for a in 0..=order {
            let b = order - a;
            let derived: Vec<ScalarField> = if order == 0 {
                components.iter().map(|c| (*c).clone()).collect()
            } else {
                spectra.iter().map(|s| s.derivative(a, b).to_field()).collect()
            };
            let mag: Vec<f64> = (0..grid.len())
                .map(|idx| derived.iter().map(|d| d.values()[idx].powi(2)).sum::<f64>().sqrt())
                .collect();
            if p.is_infinite() {
                total = mag.iter().copied().fold(total, f64::max);
            } else {
                total += mag.iter().map(|m| m.powf(p)).sum::<f64>() * grid.cell_area();
            }
        }
    }
    Ok(if p.is_infinite() { total } else { total.powf(1.0 / p) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TORUS_AREA;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid2D {
        Grid2D::new(n).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(32);
        let f = ScalarField::from_fn(g, |x, _| x.sin());
        let d = differentiate(&f, (1, 0)).unwrap();
        let expected = ScalarField::from_fn(g, |x, _| x.cos());
        assert!((&d - &expected).max_abs() < 1e-12);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let g = grid(16);
        let f = ScalarField::constant(g, 3.5);
        for order in [(1, 0), (0, 1), (2, 1), (0, 3), (1, 1)] {
            assert!(differentiate(&f, order).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_fourth_order() {
        let g = grid(16);
        let f = ScalarField::zeros(g);
        assert_eq!(differentiate(&f, (2, 2)), Err(QnsError::UnsupportedOrder(2, 2)));
    }

    /// Central differences of the closed form at 8x resolution.
    #[test]
    fn mixed_third_derivative_matches_finite_differences() {
        let g = grid(32);
        let f = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (2.0 * y).cos());
        let d = differentiate(&f, (2, 1)).unwrap();
        let func = |x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos();
        // 4th-order stencils for d_xx then d_y, Richardson-extrapolated in h
        let stencil = |x: f64, y: f64, h: f64| {
            let dxx = |yy: f64| {
                (-func(x + 2.0 * h, yy) + 16.0 * func(x + h, yy) - 30.0 * func(x, yy)
                    + 16.0 * func(x - h, yy)
                    - func(x - 2.0 * h, yy))
                    / (12.0 * h * h)
            };
            (-dxx(y + 2.0 * h) + 8.0 * dxx(y + h) - 8.0 * dxx(y - h) + dxx(y - 2.0 * h)) / (12.0 * h)
        };
        let h = g.spacing() / 8.0;
        let mut max_err = 0.0f64;
        let mut max_ref = 0.0f64;
        for j in 0..32 {
            for i in 0..32 {
                let (x, y) = (g.coord(i), g.coord(j));
                let fd = (16.0 * stencil(x, y, h / 2.0) - stencil(x, y, h)) / 15.0;
                max_err = max_err.max((fd - d.at(i, j)).abs());
                max_ref = max_ref.max(fd.abs());
            }
        }
        assert!(max_err / max_ref < 1e-8, "relative error {}", max_err / max_ref);
    }

    #[test]
    fn mixed_derivatives_commute_exactly() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |x, y| (x + 2.0 * y).sin() + (3.0 * x).cos() * y.sin());
        let s = Spectrum::forward(&f);
        let a = s.derivative(1, 0).derivative(0, 1);
        let b = s.derivative(1, 1);
        for (ca, cb) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((ca - cb).norm() <= 1e-15 * cb.norm());
        }
    }

    #[test]
    fn derivative_zero_mode_is_exactly_zero() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |x, y| 2.0 + (x - y).sin());
        let s = Spectrum::forward(&f).derivative(1, 2);
        assert_eq!(s.coeff(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn helmholtz_of_pure_gradient() {
        let g = grid(32);
        let w = VectorField::from_fn(g, |x, _| x.cos(), |_, _| 0.0);
        let (p, q) = helmholtz_project(&w);
        assert!(norm(&p, f64::INFINITY, 0).unwrap() < 1e-12);
        assert!(norm(&(&q - &w), f64::INFINITY, 0).unwrap() < 1e-12);
    }

    #[test]
    fn helmholtz_of_solenoidal_field() {
        let g = grid(32);
        let w = VectorField::from_fn(g, |x, y| x.sin() * y.cos(), |x, y| -x.cos() * y.sin());
        let (p, q) = helmholtz_project(&w);
        assert!(norm(&q, f64::INFINITY, 0).unwrap() < 1e-12);
        assert!(norm(&(&p - &w), f64::INFINITY, 0).unwrap() < 1e-12);
    }

    /// w = (sin(x+y), 0): the only modes are k = +-(1,1), where
    /// k (k . w_k)/|k|^2 = (1/2)(w_x, w_x). So Q w = (sin(x+y), sin(x+y))/2.
    #[test]
    fn helmholtz_matches_per_mode_formula() {
        let g = grid(32);
        let w = VectorField::from_fn(g, |x, y| (x + y).sin(), |_, _| 0.0);
        let (p, q) = helmholtz_project(&w);
        let q_expected = VectorField::from_fn(g, |x, y| 0.5 * (x + y).sin(), |x, y| 0.5 * (x + y).sin());
        let p_expected = VectorField::from_fn(g, |x, y| 0.5 * (x + y).sin(), |x, y| -0.5 * (x + y).sin());
        assert!(norm(&(&q - &q_expected), f64::INFINITY, 0).unwrap() < 1e-12);
        assert!(norm(&(&p - &p_expected), f64::INFINITY, 0).unwrap() < 1e-12);
    }

    #[test]
    fn helmholtz_assigns_mean_to_p() {
        let g = grid(16);
        let w = VectorField::constant(g, 1.5, -0.5);
        let (p, q) = helmholtz_project(&w);
        assert!(norm(&q, f64::INFINITY, 0).unwrap() < 1e-14);
        assert!((p.x.mean() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn norm_examples() {
        let g = grid(32);
        let one = ScalarField::constant(g, 1.0);
        assert!((norm(&one, 2.0, 0).unwrap() - 2.0 * PI).abs() < 1e-12);
        let s = ScalarField::from_fn(g, |x, _| x.sin());
        assert!((norm(&s, f64::INFINITY, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((norm(&s, 2.0, 0).unwrap() - PI * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(norm(&s, 0.5, 0), Err(QnsError::InvalidExponent(0.5)));
        assert_eq!(norm(&s, 2.0, 3), Err(QnsError::InvalidNormOrder(3)));
    }

    #[test]
    fn h1_norm_of_sine() {
        // ||sin x||^2 + ||cos x||^2 = 4 pi^2
        let g = grid(32);
        let s = ScalarField::from_fn(g, |x, _| x.sin());
        assert!((norm(&s, 2.0, 1).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn dealias_examples() {
        let g = grid(32);
        let low = ScalarField::from_fn(g, |x, y| (3.0 * x).sin() + (10.0 * y).cos());
        assert!((&dealias(&low) - &low).max_abs() < 1e-13);
        let high = ScalarField::from_fn(g, |x, _| (15.0 * x).sin());
        assert!(dealias(&high).max_abs() < 1e-13);
        let mixed = ScalarField::from_fn(g, |x, y| (x * 12.0).cos() + (x + y).sin());
        let once = dealias(&mixed);
        assert!((&dealias(&once) - &once).max_abs() < 1e-15);
    }

    #[test]
    fn parseval_with_normalized_transform() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |x, y| 1.0 + (x - 2.0 * y).sin() + 0.3 * (4.0 * y).cos());
        let lhs = norm(&f, 2.0, 0).unwrap().powi(2);
        let rhs = TORUS_AREA * Spectrum::forward(&f).energy();
        assert!((lhs - rhs).abs() / lhs < 1e-12);
    }

    #[test]
    fn inverse_laplacian_is_mean_free() {
        let g = grid(16);
        let f = ScalarField::from_fn(g, |x, y| 2.0 * (x.sin() * y.sin()));
        let u = inverse_neg_laplacian(&f);
        let expected = ScalarField::from_fn(g, |x, y| x.sin() * y.sin());
        assert!((&u - &expected).max_abs() < 1e-13);
    }
}
