//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use qns_core::acoustic::{acoustic_energy, acoustic_evolve, AcousticState};
use qns_core::constitutive::bohm_force;
use qns_core::diagnostics::relative_entropy;
use qns_core::euler::{euler_residual, euler_solve, taylor_green};
use qns_core::harness::snapshot::{Snapshot, SnapshotError};
use qns_core::harness::sweep::{SweepResult, TRACKED};
use qns_core::harness::{parse_config, run_sweep, simulate};
use qns_core::solver::QnsState;
use qns_core::spectral::norm;
use qns_core::{BohmForm, Grid2D, LimitParams, ScalarField, VectorField};

const BOHM_TOL: f64 = 1e-8;
const ACOUSTIC_ENERGY_TOL: f64 = 1e-12;
const ACOUSTIC_MODE_TOL: f64 = 1e-10;
const TG_RESIDUAL_TOL: f64 = 1e-10;
const TG_DRIFT_TOL: f64 = 1e-8;
const ZERO_POINT_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-12;
const LEMMA_BAND: f64 = 10.0;
const SPLITTING_MIN_RATIO: f64 = 3.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, title: &str, elapsed: Duration, budget: Option<Duration>, outcome: Outcome) -> bool {
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = outcome.pass && in_time;
    let time = match budget {
        Some(b) => format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), b.as_secs_f64()),
        None => format!("{:.2}s", elapsed.as_secs_f64()),
    };
    println!("criterion {id} [{}] {title}: {} ({time})", if pass { "PASS" } else { "FAIL" }, outcome.detail);
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

/// Sum of random modes `|k|_inf <= kmax` with a mean-free shift of size `amp`.
fn trig_field(grid: Grid2D, kmax: i32, amp: f64, rng: &mut impl Rng) -> ScalarField {
    let mut modes = Vec::new();
    for kx in -kmax..=kmax {
        for ky in 0..=kmax {
            if (kx, ky) != (0, 0) {
                modes.push((kx as f64, ky as f64, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
    }
    let f = ScalarField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|&(kx, ky, a, b)| a * (kx * x + ky * y).cos() + b * (kx * x + ky * y).sin())
            .sum()
    });
    let s = amp / f.max_abs();
    f.map(|v| s * v)
}

fn criterion_bohm() -> Outcome {
    let grid = Grid2D::new(128).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut min_n = f64::INFINITY;
    for _ in 0..20 {
        let n = trig_field(grid, 3, 0.45, &mut rng).map(|v| 1.0 + v);
        min_n = min_n.min(n.min());
        let a = bohm_force(&n, BohmForm::Potential).unwrap();
        let b = bohm_force(&n, BohmForm::Divergence).unwrap();
        worst = worst.max((&a - &b).max_magnitude() / a.max_magnitude());
    }
    Outcome {
        pass: worst < BOHM_TOL && min_n > 0.5,
        detail: format!("worst relative sup gap {worst:.3e} < {BOHM_TOL:.0e}, min n {min_n:.3}"),
    }
}

/// `exp(t A) x` for a 2x2 `A` by scaling and squaring a 30-term Taylor series.
fn expm_apply(a: [[f64; 2]; 2], t: f64, x: [f64; 2]) -> [f64; 2] {
    let norm = a.iter().flatten().map(|v| v.abs()).sum::<f64>() * t.abs();
    let squarings = norm.log2().ceil().max(0.0) as i32 + 4;
    let h = t / 2f64.powi(squarings);
    let mul = |p: [[f64; 2]; 2], q: [[f64; 2]; 2]| {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
            }
        }
        r
    };
    let ah = [[a[0][0] * h, a[0][1] * h], [a[1][0] * h, a[1][1] * h]];
    let mut e = [[1.0, 0.0], [0.0, 1.0]];
    let mut term = e;
    for k in 1..30 {
        term = mul(term, ah);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        e = mul(e, e);
    }
    [e[0][0] * x[0] + e[0][1] * x[1], e[1][0] * x[0] + e[1][1] * x[1]]
}

fn criterion_acoustic() -> Outcome {
    let grid = Grid2D::new(32).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    let mut drift: f64 = 0.0;
    for eps in [0.1, 0.01] {
        let params = LimitParams::new(eps, 2.0).unwrap();
        let mut s0 = AcousticState::zeros(grid, params);
        s0.sigma = trig_field(grid, 6, 1.0, &mut rng);
        s0.psi = trig_field(grid, 6, 1.0, &mut rng);
        let e0 = acoustic_energy(&s0);
        for k in 0..=50 {
            let s = acoustic_evolve(&s0, 10.0 * eps * k as f64 / 50.0).unwrap();
            drift = drift.max((acoustic_energy(&s) - e0).abs() / e0);
        }
    }

    // sigma_k' = |k|^2 psi_k / eps, psi_k' = -p'(1) sigma_k / eps on the mode (3, -2)
    let (eps, gamma) = (0.02, 1.7);
    let params = LimitParams::new(eps, gamma).unwrap();
    let k2 = 13.0;
    let wave = |x: f64, y: f64| (3.0 * x - 2.0 * y).sin();
    let mut s0 = AcousticState::zeros(grid, params);
    s0.sigma = ScalarField::from_fn(grid, |x, y| 0.8 * wave(x, y));
    s0.psi = ScalarField::from_fn(grid, |x, y| -0.25 * wave(x, y));
    let mut mode_err: f64 = 0.0;
    for t in [0.013, 0.2, 1.0] {
        let s = acoustic_evolve(&s0, t).unwrap();
        let [sig, psi] = expm_apply([[0.0, k2 / eps], [-gamma / eps, 0.0]], t, [0.8, -0.25]);
        let es = (&s.sigma - &ScalarField::from_fn(grid, |x, y| sig * wave(x, y))).max_abs();
        let ep = (&s.psi - &ScalarField::from_fn(grid, |x, y| psi * wave(x, y))).max_abs();
        mode_err = mode_err.max(es).max(ep);
    }
    Outcome {
        pass: drift < ACOUSTIC_ENERGY_TOL && mode_err < ACOUSTIC_MODE_TOL,
        detail: format!("energy drift {drift:.3e} < {ACOUSTIC_ENERGY_TOL:.0e}, single mode vs exponential {mode_err:.3e} < {ACOUSTIC_MODE_TOL:.0e}"),
    }
}

fn criterion_euler() -> Outcome {
    let grid = Grid2D::new(64).unwrap();
    let tg = taylor_green(grid);
    let residual = euler_residual(&tg, 0.0).unwrap();
    let traj = euler_solve(&tg.v, 1.0, 1e-3, 250).unwrap();
    let last = traj.last().unwrap();
    let drift = norm(&(&last.v - &tg.v), 2.0, 0).unwrap();
    Outcome {
        pass: residual < TG_RESIDUAL_TOL && drift < TG_DRIFT_TOL && (last.time - 1.0).abs() < 1e-9,
        detail: format!("residual {residual:.3e} < {TG_RESIDUAL_TOL:.0e}, L2 drift at t = {:.3} {drift:.3e} < {TG_DRIFT_TOL:.0e}", last.time),
    }
}

fn criterion_energy(sweeps: &[(f64, SweepResult)]) -> Outcome {
    let mut line = Vec::new();
    let mut pass = true;
    for (gamma, res) in sweeps {
        for r in &res.rungs {
            pass &= r.energy_ok && r.aborted.is_none();
            line.push(format!("g{gamma}/e{}:{}", r.epsilon, if r.energy_ok { "ok" } else { "VIOLATED" }));
        }
    }
    Outcome {
        pass,
        detail: line.join(" "),
    }
}

fn criterion_zero_point() -> Outcome {
    let grid = Grid2D::new(32).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut zero: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for trial in 0..100 {
        let eps = [0.2, 0.1, 0.05, 0.01][trial % 4];
        let params = LimitParams::new(eps, 2.0).unwrap();
        let mut ac = AcousticState::zeros(grid, params);
        ac.sigma = trig_field(grid, 3, 1.0, &mut rng);
        ac.psi = trig_field(grid, 3, 1.0, &mut rng);
        ac.time = 0.1 * trial as f64;
        let tg = taylor_green(grid);
        let b = ac.sigma.map(|s| 1.0 + eps * s);
        let u = &tg.v + &ac.grad_psi();

        if trial < 10 {
            let at_ref = QnsState {
                m: u.mul_scalar(&b),
                n: b.clone(),
                time: ac.time,
                params,
            };
            let rep = relative_entropy(&at_ref, &tg, &ac).unwrap();
            zero = zero.max(rep.rel_entropy.abs());
        }

        let n = &b + &trig_field(grid, 4, 0.5 * eps, &mut rng);
        let du = VectorField::new(trig_field(grid, 2, 0.3, &mut rng), trig_field(grid, 2, 0.3, &mut rng)).unwrap();
        let s = QnsState {
            m: (&u + &du).mul_scalar(&n),
            n: n.clone(),
            time: ac.time,
            params,
        };
        let rep = relative_entropy(&s, &tg, &ac).unwrap();
        let h = grid.spacing();
        let oracle: f64 = n
            .values()
            .iter()
            .zip(b.values())
            .map(|(n, b)| ((n - b) / eps).powi(2))
            .sum::<f64>()
            * h
            * h;
        identity = identity.max((rep.internal_part - oracle).abs() / oracle);
    }
    Outcome {
        pass: zero < ZERO_POINT_TOL && identity < IDENTITY_TOL,
        detail: format!("|E| at reference {zero:.3e} < {ZERO_POINT_TOL:.0e}, gamma = 2 identity rel err {identity:.3e} < {IDENTITY_TOL:.0e} over 100 states"),
    }
}

fn criterion_lemma(sweeps: &[(f64, SweepResult)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (gamma, res) in sweeps {
        let vals: Vec<f64> = res.rungs.iter().map(|r| r.lambda_norm_over_eps).collect();
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let band = max / min;
        pass &= band < LEMMA_BAND && min > 0.0;
        let txt: Vec<String> = vals.iter().map(|v| format!("{v:.3}")).collect();
        parts.push(format!("gamma {gamma}: ||n-1||_L^lambda/eps = [{}], band {band:.2} < {LEMMA_BAND}", txt.join(", ")));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_rates(sweeps: &[(f64, SweepResult)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (gamma, res) in sweeps {
        for f in &res.fits[..TRACKED] {
            let slope = f.fit.as_ref().map_or(f64::NAN, |x| x.slope);
            pass &= f.pass;
            parts.push(format!("gamma {gamma} {} slope {slope:.3} >= {:.3}", f.name, f.threshold));
        }
        pass &= !res.failed;
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_splitting() -> Outcome {
    let run = |dt: f64| {
        let cfg = parse_config(&format!(
            "epsilon = 0.1\ngamma = 2\nt_end = 0.1\ndt_policy = FIXED({dt})\ninitial_profile = SINE_DENSITY(0.5)\nrecord_every = 1000"
        ))
        .unwrap();
        let out = simulate(&cfg).unwrap();
        assert!(out.aborted.is_none());
        out.final_state
    };
    let (coarse, fine, reference) = (run(0.01), run(0.005), run(0.0025));
    let err = |s: &QnsState| norm(&(&s.n - &reference.n), 2.0, 0).unwrap() + norm(&(&s.m - &reference.m), 2.0, 0).unwrap();
    let (e1, e2) = (err(&coarse), err(&fine));
    let ratio = e1 / e2;
    Outcome {
        pass: ratio >= SPLITTING_MIN_RATIO,
        detail: format!("error dt = 0.01: {e1:.3e}, dt = 0.005: {e2:.3e}, ratio {ratio:.3} >= {SPLITTING_MIN_RATIO} (second order: 5)"),
    }
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let cfg = parse_config(&format!(
            "epsilon = 0.1\ngrid_n = 32\nt_end = 0.05\ninitial_profile = TG_PLUS_GRADIENT(0.3)\nseed = 99\nrecord_every = 3\noutput_dir = {}",
            out.display()
        ))
        .unwrap();
        qns_core::harness::run_single(&cfg).unwrap();
        let csv = std::fs::read(qns_core::harness::run::csv_path(&out, 0.1)).unwrap();
        let snap = std::fs::read(qns_core::harness::run::snapshot_path(&out, 0.1)).unwrap();
        bytes.push((csv, snap));
    }
    let identical = bytes[0] == bytes[1];

    let grid = Grid2D::new(16).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let a = ScalarField::from_values(grid, (0..256).map(|_| f64::from_bits(rng.gen::<u64>() >> 2)).collect()).unwrap();
    let b = ScalarField::from_fn(grid, |x, y| (x * y).sin() / 3.0 - PI);
    let snap = Snapshot::from_fields(&[("a", &a), ("b", &b)]);
    let path = dir.path().join("rt.qnsf");
    qns_core::harness::write_snapshot(&[("a", &a), ("b", &b)], &path).unwrap();
    let back = qns_core::harness::read_snapshot(&path).unwrap();
    let bitwise = back.fields.len() == 2
        && snap.fields.iter().zip(&back.fields).all(|((na, va), (nb, vb))| {
            na == nb && va.iter().zip(vb).all(|(x, y)| x.to_bits() == y.to_bits())
        });

    let good = snap.encode();
    let mut foreign = good.clone();
    foreign[..4].copy_from_slice(b"XXXX");
    let mut newer = good.clone();
    newer[4..6].copy_from_slice(&7u16.to_le_bytes());
    let errors = [
        Snapshot::decode(&good[..good.len() - 5]),
        Snapshot::decode(&foreign),
        Snapshot::decode(&newer),
    ];
    let classes = matches!(errors[0], Err(SnapshotError::Truncated { .. }))
        && matches!(errors[1], Err(SnapshotError::BadMagic(_)))
        && matches!(errors[2], Err(SnapshotError::VersionMismatch(7)));
    let messages: Vec<String> = errors
        .iter()
        .map(|e| e.as_ref().err().map(|e| e.to_string()).unwrap_or_default())
        .collect();
    let distinct = messages[0] != messages[1] && messages[1] != messages[2] && messages[0] != messages[2];
    Outcome {
        pass: identical && bitwise && classes && distinct,
        detail: format!("byte-identical rerun {identical}, snapshot bitwise {bitwise}, TRUNCATED/BAD_MAGIC/VERSION_MISMATCH distinct {}", classes && distinct),
    }
}

fn headline(gamma: f64) -> SweepResult {
    let cfg = parse_config(&format!(
        "gamma = {gamma}\ngrid_n = 64\nepsilon_ladder = 0.2,0.1,0.05,0.025\nt_end = 0.25\ndt_policy = FIXED(1e-3)\ninitial_profile = SINE_DENSITY(0.5)\nrecord_every = 25"
    ))
    .unwrap();
    run_sweep(&cfg, 0, false, None).unwrap()
}

fn main() -> ExitCode {
    let mut all = true;

    let (o, t) = timed(criterion_bohm);
    all &= report(1, "Bohm identity", t, Some(Duration::from_secs(10)), o);
    let (o, t) = timed(criterion_acoustic);
    all &= report(2, "acoustic exactness and conservation", t, Some(Duration::from_secs(5)), o);
    let (o, t) = timed(criterion_euler);
    all &= report(3, "Euler reference validity", t, Some(Duration::from_secs(60)), o);

    let (sweeps, sweep_time) = timed(|| vec![(2.0, headline(2.0)), (3.0, headline(3.0))]);
    for (gamma, res) in &sweeps {
        println!("headline sweep gamma = {gamma}:");
        for line in res.report().lines() {
            println!("    {line}");
        }
    }
    all &= report(4, "energy inequality on the headline sweeps", sweep_time, None, criterion_energy(&sweeps));
    let (o, t) = timed(criterion_zero_point);
    all &= report(5, "relative-entropy zero point and gamma = 2 identity", t, None, o);
    all &= report(6, "density deviation boundedness", sweep_time, None, criterion_lemma(&sweeps));
    all &= report(7, "headline rate study", sweep_time, Some(Duration::from_secs(900)), criterion_rates(&sweeps));
    let (o, t) = timed(criterion_splitting);
    all &= report(8, "Strang splitting order", t, None, o);
    let (o, t) = timed(criterion_determinism);
    all &= report(9, "determinism and snapshot IO", t, None, o);

    println!("acceptance {}", if all { "PASS" } else { "FAIL" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
