use proptest::prelude::*;

use qns_core::acoustic::AcousticState;
use qns_core::diagnostics::{free_energy_ratio, relative_entropy, theorem_lhs};
use qns_core::euler::taylor_green;
use qns_core::solver::QnsState;
use qns_core::{Grid2D, LimitParams, ScalarField, VectorField};

fn grid() -> Grid2D {
    Grid2D::new(16).unwrap()
}

fn modes() -> impl Strategy<Value = Vec<(i32, i32, f64, f64)>> {
    prop::collection::vec((-4i32..=4, -4i32..=4, -1.0f64..1.0, -1.0f64..1.0), 1..5)
}

fn field(modes: &[(i32, i32, f64, f64)], amp: f64) -> ScalarField {
    let f = ScalarField::from_fn(grid(), |x, y| {
        modes
            .iter()
            .map(|&(kx, ky, a, b)| {
                let ph = kx as f64 * x + ky as f64 * y;
                a * ph.cos() + b * ph.sin()
            })
            .sum()
    });
    let m = f.max_abs();
    if m == 0.0 {
        f
    } else {
        f.scale(amp / m)
    }
}

struct Case {
    state: QnsState,
    ac: AcousticState,
    /// `u - v - grad psi`.
    gap: VectorField,
}

fn case(eps: f64, gamma: f64, sig: &[(i32, i32, f64, f64)], dn: &[(i32, i32, f64, f64)], du: &[(i32, i32, f64, f64)], s: f64) -> Case {
    let g = grid();
    let params = LimitParams::new(eps, gamma).unwrap();
    let mut ac = AcousticState::zeros(g, params);
    ac.sigma = field(sig, 1.0);
    ac.psi = field(du, 0.5);
    let b = ac.sigma.map(|v| 1.0 + eps * v);
    let n = &b + &field(dn, 0.5 * eps);
    let gap = VectorField {
        x: field(du, s),
        y: field(sig, s),
    };
    let u = &(&taylor_green(g).v + &ac.grad_psi()) + &gap;
    Case {
        state: QnsState {
            m: u.mul_scalar(&n),
            n,
            time: 0.0,
            params,
        },
        ac,
        gap,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_nonnegative_and_dominates(
        eps in 0.02f64..0.5, gamma in 1.2f64..3.0,
        sig in modes(), dn in modes(), du in modes(), s in -1.0f64..1.0,
    ) {
        let c = case(eps, gamma, &sig, &dn, &du, s);
        let tg = taylor_green(grid());
        let r = relative_entropy(&c.state, &tg, &c.ac).unwrap();
        prop_assert!(r.kinetic_part >= 0.0 && r.quantum_part >= 0.0);
        prop_assert!(r.internal_part >= -1e-14);
        prop_assert!(r.theorem_lhs[0] <= 2.0 * r.rel_entropy * (1.0 + 1e-12) + 1e-14);
        prop_assert!(r.theorem_lhs[2] <= r.rel_entropy * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn kinetic_entry_scales_quadratically(
        eps in 0.02f64..0.5, sig in modes(), dn in modes(), du in modes(), s in 0.1f64..1.0, k in 0.2f64..4.0,
    ) {
        let tg = taylor_green(grid());
        let a = case(eps, 2.0, &sig, &dn, &du, s);
        let b = case(eps, 2.0, &sig, &dn, &du, k * s);
        let la = theorem_lhs(&a.state, &tg, &a.ac).unwrap()[0];
        let lb = theorem_lhs(&b.state, &tg, &b.ac).unwrap()[0];
        prop_assert!(a.gap.max_magnitude() > 0.0);
        prop_assert!((lb - k * k * la).abs() <= 1e-9 * lb.max(la));
    }

    #[test]
    fn quadratic_pressure_identity(eps in 0.02f64..0.5, sig in modes(), dn in modes(), du in modes()) {
        let c = case(eps, 2.0, &sig, &dn, &du, 0.3);
        let tg = taylor_green(grid());
        let r = relative_entropy(&c.state, &tg, &c.ac).unwrap();
        prop_assert!((r.internal_part - r.theorem_lhs[1]).abs() <= 1e-12 * r.theorem_lhs[1].max(1e-300));
    }

    #[test]
    fn free_energy_two_sided(gamma in 1.2f64..3.0, dn in modes(), amp in 0.01f64..4.0) {
        let n = field(&dn, amp).map(|v| (1.0 + v).max(1e-3));
        if let Some(ratio) = free_energy_ratio(&n, gamma).unwrap() {
            prop_assert!(ratio >= 1e-3);
            prop_assert!(ratio.is_finite());
        }
    }
}
