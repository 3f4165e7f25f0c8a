//! Three interactive views of the solver for the browser page in `www/`:
//! the Bohm force of a chosen density, frames of the exact acoustic flow, and
//! a stepping QNS run with its relative entropy.
//!
//! Fields cross the boundary as flat `Float64Array`s, row-major with x
//! fastest, for the page to paint.

use wasm_bindgen::prelude::*;

use qns_core::acoustic::{acoustic_evolve, acoustic_init, AcousticState};
use qns_core::constitutive::bohm_force;
use qns_core::diagnostics::relative_entropy;
use qns_core::harness::config::{Epsilon, Profile, RunConfig};
use qns_core::harness::profiles::{build_initial, random_band_limited, seeded_rng, Reference};
use qns_core::solver::{cfl_dt, qns_init, qns_step, total_energy, QnsState};
use qns_core::{BohmForm, Grid2D, LimitParams, ScalarField};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// `|2 n grad(lap sqrt n / sqrt n)|` for `n = 1 + a cos(kx x + ky y) + a/2 sin(x)`.
#[derive(Debug, Clone)]
pub struct BohmView {
    pub magnitude: Vec<f64>,
    /// Relative sup gap between the potential and divergence forms.
    pub form_gap: f64,
}

pub fn bohm_view(n: usize, amplitude: f64, kx: i32, ky: i32) -> Result<BohmView, qns_core::QnsError> {
    let grid = Grid2D::new(n)?;
    let (kx, ky) = (kx as f64, ky as f64);
    let rho = ScalarField::from_fn(grid, |x, y| 1.0 + amplitude * (kx * x + ky * y).cos() + 0.5 * amplitude * x.sin());
    let pot = bohm_force(&rho, BohmForm::Potential)?;
    let div = bohm_force(&rho, BohmForm::Divergence)?;
    Ok(BohmView {
        magnitude: pot.magnitude_sq().map(f64::sqrt).into_values(),
        form_gap: (&pot - &div).max_magnitude() / pot.max_magnitude().max(f64::MIN_POSITIVE),
    })
}

#[wasm_bindgen]
pub fn bohm_magnitude(n: usize, amplitude: f64, kx: i32, ky: i32) -> Result<Vec<f64>, JsError> {
    bohm_view(n, amplitude, kx, ky).map(|v| v.magnitude).map_err(js_err)
}

#[wasm_bindgen]
pub fn bohm_form_gap(n: usize, amplitude: f64, kx: i32, ky: i32) -> Result<f64, JsError> {
    bohm_view(n, amplitude, kx, ky).map(|v| v.form_gap).map_err(js_err)
}

/// Random acoustic data evaluated in closed form at any time.
#[wasm_bindgen]
pub struct AcousticMovie {
    initial: AcousticState,
}

#[wasm_bindgen]
impl AcousticMovie {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, epsilon: f64, gamma: f64, seed: u64) -> Result<AcousticMovie, JsError> {
        let grid = Grid2D::new(n).map_err(js_err)?;
        let params = LimitParams::new(epsilon, gamma).map_err(js_err)?;
        let mut rng = seeded_rng(seed);
        let mut initial = AcousticState::zeros(grid, params);
        initial.sigma = random_band_limited(grid, 3, &mut rng);
        Ok(Self { initial })
    }

    /// `sigma` at time `t`.
    pub fn frame(&self, t: f64) -> Result<Vec<f64>, JsError> {
        let s = acoustic_evolve(&self.initial, t.abs()).map_err(js_err)?;
        Ok(s.sigma.into_values())
    }

    /// Period of the slowest nonzero mode.
    pub fn period(&self) -> f64 {
        let c = self.initial.params.sound_speed_sq().sqrt();
        std::f64::consts::TAU * self.initial.params.epsilon() / c
    }
}

/// A running QNS simulation from the sine-density profile.
#[wasm_bindgen]
pub struct QnsSession {
    state: QnsState,
    acoustic: AcousticState,
    reference: Reference,
}

impl QnsSession {
    pub fn start(n: usize, epsilon: f64, amplitude: f64) -> Result<Self, qns_core::harness::HarnessError> {
        let cfg = RunConfig {
            grid_n: n,
            epsilon: Epsilon::Single(epsilon),
            initial_profile: Profile::SineDensity(amplitude),
            ..RunConfig::default()
        };
        cfg.validate()?;
        let grid = Grid2D::new(n)?;
        let params = LimitParams::new(epsilon, cfg.gamma)?;
        let (data, reference) = build_initial(&cfg, grid)?;
        Ok(Self {
            acoustic: acoustic_init(&data, params),
            state: qns_init(params, &data)?,
            reference,
        })
    }

    /// CFL step, further capped to resolve the acoustic period.
    pub fn dt(&self) -> f64 {
        cfl_dt(&self.state).min(self.state.params.epsilon() / 40.0)
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), qns_core::QnsError> {
        for _ in 0..steps {
            self.state = qns_step(&self.state, self.dt())?;
        }
        Ok(())
    }

    pub fn relative_entropy(&self) -> Result<f64, qns_core::QnsError> {
        let ac = acoustic_evolve(&self.acoustic, self.state.time)?;
        Ok(relative_entropy(&self.state, self.reference.current(), &ac)?.rel_entropy)
    }
}

#[wasm_bindgen]
impl QnsSession {
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, epsilon: f64, amplitude: f64) -> Result<QnsSession, JsError> {
        Self::start(n, epsilon, amplitude).map_err(js_err)
    }

    pub fn step(&mut self, steps: usize) -> Result<(), JsError> {
        self.advance(steps).map_err(js_err)
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    /// `(n - 1) / eps`.
    pub fn density(&self) -> Vec<f64> {
        let eps = self.state.params.epsilon();
        self.state.n.map(|v| (v - 1.0) / eps).into_values()
    }

    pub fn entropy(&self) -> Result<f64, JsError> {
        self.relative_entropy().map_err(js_err)
    }

    pub fn energy(&self) -> Result<f64, JsError> {
        total_energy(&self.state).map(|e| e.total()).map_err(js_err)
    }
}
