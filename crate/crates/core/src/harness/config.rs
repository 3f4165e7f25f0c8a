//! `key = value` run configuration.

use std::collections::HashSet;
use std::path::PathBuf;
use std::str::FromStr;

use super::HarnessError;
use crate::constitutive::rate_exponent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Rest,
    /// `n1 = a sin x`, `u = v_TG + a grad(sin y)`.
    SineDensity(f64),
    /// `n1 = 0`, `u = v_TG + a grad(phi)` with a seeded random band-limited `phi`.
    TgPlusGradient(f64),
    /// Fields `n1`, `ux`, `uy` read from a snapshot.
    FromSnapshot(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Epsilon {
    Single(f64),
    Ladder(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub gamma: f64,
    pub epsilon: Epsilon,
    pub t_end: f64,
    pub dt_policy: DtPolicy,
    pub initial_profile: Profile,
    pub eta: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub record_every: usize,
    pub bound_m: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_n: 64,
            gamma: 2.0,
            epsilon: Epsilon::Single(0.1),
            t_end: 0.5,
            dt_policy: DtPolicy::Auto,
            initial_profile: Profile::SineDensity(0.5),
            eta: 0.0,
            output_dir: PathBuf::from("out"),
            seed: 0,
            record_every: 10,
            bound_m: 100.0,
        }
    }
}

impl RunConfig {
    pub fn rate(&self) -> f64 {
        rate_exponent(self.gamma)
    }

    pub fn lambda(&self) -> f64 {
        self.gamma.min(2.0)
    }

    /// The epsilons this config will run, in order.
    pub fn plan(&self) -> Vec<f64> {
        match &self.epsilon {
            Epsilon::Single(e) => vec![*e],
            Epsilon::Ladder(l) => l.clone(),
        }
    }

    /// Copy with a single epsilon, as used for one ladder rung.
    pub fn with_epsilon(&self, eps: f64) -> Self {
        Self {
            epsilon: Epsilon::Single(eps),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.grid_n < 8 || !self.grid_n.is_multiple_of(2) {
            return bad(format!("grid_n must be even and >= 8, got {}", self.grid_n));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if let DtPolicy::Fixed(dt) = self.dt_policy {
            if !(dt > 0.0) {
                return bad(format!("fixed dt must be positive, got {dt}"));
            }
        }
        if !(self.eta >= 0.0) || !(self.bound_m > 0.0) || self.record_every == 0 {
            return bad("eta >= 0, bound_m > 0 and record_every >= 1 are required".into());
        }
        let eps = self.plan();
        if eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad(format!("epsilon values must lie in (0, 1): {eps:?}"));
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            return bad(format!("epsilon_ladder must be strictly decreasing: {eps:?}"));
        }
        Ok(())
    }
}

fn parse_num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse()
        .map_err(|_| HarnessError::Config(format!("line {line}: {key}: cannot parse {v:?}")))
}

/// `NAME(arg)` or `NAME`.
fn call(v: &str) -> (&str, Option<&str>) {
    match (v.find('('), v.ends_with(')')) {
        (Some(i), true) => (v[..i].trim(), Some(v[i + 1..v.len() - 1].trim())),
        _ => (v, None),
    }
}

fn parse_profile(line: usize, v: &str) -> Result<Profile, HarnessError> {
    let err = || HarnessError::Config(format!("line {line}: unknown initial_profile {v:?}"));
    match call(v) {
        ("REST", None) => Ok(Profile::Rest),
        ("SINE_DENSITY", Some(a)) => Ok(Profile::SineDensity(parse_num(line, "SINE_DENSITY", a)?)),
        ("TG_PLUS_GRADIENT", Some(a)) => Ok(Profile::TgPlusGradient(parse_num(line, "TG_PLUS_GRADIENT", a)?)),
        ("FROM_SNAPSHOT", Some(p)) if !p.is_empty() => Ok(Profile::FromSnapshot(PathBuf::from(p))),
        _ => Err(err()),
    }
}

fn parse_dt(line: usize, v: &str) -> Result<DtPolicy, HarnessError> {
    match call(v) {
        ("AUTO", None) => Ok(DtPolicy::Auto),
        ("FIXED", Some(dt)) => Ok(DtPolicy::Fixed(parse_num(line, "FIXED", dt)?)),
        _ => Err(HarnessError::Config(format!("line {line}: unknown dt_policy {v:?}"))),
    }
}

/// Parses a config; unset keys take the [`RunConfig::default`] values, except
/// that one of `epsilon` / `epsilon_ladder` is required.
pub fn parse_config(text: &str) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| HarnessError::Config(format!("line {line}: expected key = value")))?;
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::Config(format!("line {line}: duplicate key {key}")));
        }
        match key {
            "grid_n" => cfg.grid_n = parse_num(line, key, value)?,
            "gamma" => cfg.gamma = parse_num(line, key, value)?,
            "epsilon" => cfg.epsilon = Epsilon::Single(parse_num(line, key, value)?),
            "epsilon_ladder" => {
                let rungs = value
                    .split(',')
                    .map(|s| parse_num(line, key, s.trim()))
                    .collect::<Result<Vec<f64>, _>>()?;
                cfg.epsilon = Epsilon::Ladder(rungs);
            }
            "t_end" => cfg.t_end = parse_num(line, key, value)?,
            "dt_policy" => cfg.dt_policy = parse_dt(line, value)?,
            "initial_profile" => cfg.initial_profile = parse_profile(line, value)?,
            "eta" => cfg.eta = parse_num(line, key, value)?,
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "seed" => cfg.seed = parse_num(line, key, value)?,
            "record_every" => cfg.record_every = parse_num(line, key, value)?,
            "bound_m" => cfg.bound_m = parse_num(line, key, value)?,
            _ => return Err(HarnessError::Config(format!("line {line}: unknown key {key}"))),
        }
    }
    if seen.contains("epsilon") && seen.contains("epsilon_ladder") {
        return Err(HarnessError::Config("epsilon and epsilon_ladder are exclusive".into()));
    }
    if !seen.contains("epsilon") && !seen.contains("epsilon_ladder") {
        return Err(HarnessError::Config("missing epsilon or epsilon_ladder".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}
