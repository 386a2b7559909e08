use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotational_orbits::sampling::random_loop;
use rotational_orbits::{
    ActionProblem, BuiltinSystem, FourierLoop, PhaseLayout, RotationVector, Subspace, TruncatedHamiltonian,
};

const MODES: usize = 6;

fn layouts() -> [PhaseLayout; 3] {
    [
        PhaseLayout::new(1, 1).unwrap(),
        PhaseLayout::new(2, 2).unwrap(),
        PhaseLayout::new(2, 3).unwrap(),
    ]
}

type Cells = [OnceLock<ActionProblem<TruncatedHamiltonian>>; 3];

fn problem(which: usize) -> &'static ActionProblem<TruncatedHamiltonian> {
    static CELLS: Cells = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CELLS[which].get_or_init(|| build(which, 4 * MODES + 1))
}

// dense enough that the quadrature resolves H along smooth loops
fn fine_problem(which: usize) -> &'static ActionProblem<TruncatedHamiltonian> {
    static CELLS: Cells = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CELLS[which].get_or_init(|| build(which, 32 * MODES + 1))
}

fn build(which: usize, nodes: usize) -> ActionProblem<TruncatedHamiltonian> {
    {
        let layout = layouts()[which];
        let (system, v) = match which {
            0 => (BuiltinSystem::PerturbedPendulumProduct { mu: 2.0, epsilon: 0.1 }, vec![1]),
            1 => (BuiltinSystem::PerturbedPendulumProduct { mu: 2.5, epsilon: 0.1 }, vec![1, 0]),
            _ => (
                BuiltinSystem::CoupledGrowthPendulum {
                    mu: 1.5,
                    epsilon: 0.01,
                    s: 0.9,
                },
                vec![0, 1, 0],
            ),
        };
        let model = system.build(layout, None).unwrap();
        let (hk, _) = TruncatedHamiltonian::construct(model, 3.0, 512).unwrap();
        ActionProblem::new(hk, 0.8, RotationVector::new(v), MODES, nodes).unwrap()
    }
}

fn loop_for(which: usize, seed: u64, amplitude: f64) -> FourierLoop {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_loop(layouts()[which], MODES, amplitude, &mut rng)
}

// |z_I|^mu is not smooth at z_I = 0, so quadrature-exactness tests keep away from it
fn offset_loop(which: usize, seed: u64) -> FourierLoop {
    let mut x = loop_for(which, seed, 0.25);
    let layout = layouts()[which];
    for c in layout.free_range() {
        x.mode_mut(0)[c] = 1.5;
    }
    x
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn spectral_subspaces_are_orthogonal(which in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = loop_for(which, s1, 1.0);
        let y = loop_for(which, s2, 1.0);
        let parts = [Subspace::Eplus, Subspace::Eminus, Subspace::E0];
        for (i, a) in parts.iter().enumerate() {
            for b in &parts[i + 1..] {
                let ip = x.project(*a).unwrap().inner_product(&y.project(*b).unwrap()).unwrap();
                prop_assert!(ip.abs() <= 1e-12, "{a:?} vs {b:?}: {ip}");
            }
        }
        let ip = x.project(Subspace::EI).unwrap().inner_product(&y.project(Subspace::EII).unwrap()).unwrap();
        prop_assert!(ip.abs() <= 1e-12);
    }

    #[test]
    fn pythagoras(which in 0usize..3, seed in any::<u64>()) {
        let x = loop_for(which, seed, 1.0);
        let total = x.norm().powi(2);
        let sum: f64 = [Subspace::Eplus, Subspace::Eminus, Subspace::E0]
            .iter()
            .map(|s| x.project(*s).unwrap().norm().powi(2))
            .sum();
        prop_assert!((total - sum).abs() <= 1e-12 * (1.0 + total));
        let split: f64 = [Subspace::E0, Subspace::EI, Subspace::EII]
            .iter()
            .map(|s| x.project(*s).unwrap().norm().powi(2))
            .sum();
        prop_assert!((total - split).abs() <= 1e-12 * (1.0 + total));
    }

    #[test]
    fn projections_are_idempotent(which in 0usize..3, seed in any::<u64>()) {
        let x = loop_for(which, seed, 1.0);
        let layout = layouts()[which];
        for s in Subspace::ALL.iter().filter(|s| s.valid_for(&layout)) {
            let once = x.project(*s).unwrap();
            let twice = once.project(*s).unwrap();
            prop_assert!(once.sub(&twice).unwrap().norm() <= 1e-12 * (1.0 + once.norm()), "{s:?}");
        }
    }

    #[test]
    fn l_is_self_adjoint(which in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = loop_for(which, s1, 1.0);
        let y = loop_for(which, s2, 1.0);
        let lhs = x.apply_l().inner_product(&y).unwrap();
        let rhs = x.inner_product(&y.apply_l()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        let p = problem(which);
        let a = 0.5 * x.apply_l().inner_product(&x).unwrap();
        prop_assert!((p.action(&x) - a).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn wirtinger(which in 0usize..3, seed in any::<u64>()) {
        let x = loop_for(which, seed, 1.0);
        let mean_free = x.sub(&x.project(Subspace::E0).unwrap()).unwrap();
        let lhs = 2.0 * std::f64::consts::PI * mean_free.l2_norm().powi(2);
        prop_assert!(lhs <= mean_free.norm().powi(2) * (1.0 + 1e-12));
    }

    #[test]
    fn functional_is_symmetry_invariant(which in 0usize..3, seed in any::<u64>(), theta in 0.0f64..1.0, w in prop::collection::vec(-3i64..=3, 3)) {
        let p = fine_problem(which);
        let x = offset_loop(which, seed);
        let base = p.phi(&x);
        let shifted = p.phi(&x.s1_shift(theta, p.rotation()).unwrap());
        prop_assert!(rel(base, shifted) <= 1e-9, "S1: {base} vs {shifted}");
        let w = &w[..layouts()[which].k()];
        let moved = p.phi(&x.zk_translate(w).unwrap());
        prop_assert!(rel(base, moved) <= 1e-9, "Zk: {base} vs {moved}");
    }

    #[test]
    fn node_shifts_leave_discrete_functional_invariant(which in 0usize..3, seed in any::<u64>(), m in 0usize..25) {
        let p = problem(which);
        let x = loop_for(which, seed, 0.5);
        let theta = m as f64 / p.grid().nodes() as f64;
        let base = p.phi(&x);
        let shifted = p.phi(&x.s1_shift(theta, p.rotation()).unwrap());
        prop_assert!(rel(base, shifted) <= 1e-12, "{base} vs {shifted}");
    }

    #[test]
    fn gradient_matches_finite_differences(which in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let p = problem(which);
        let x = loop_for(which, s1, 0.5);
        let y = loop_for(which, s2, 1.0);
        let y = y.scaled(1.0 / y.norm());
        let h = 1e-5;
        let plus = { let mut z = x.clone(); z.axpy(h, &y).unwrap(); p.phi(&z) };
        let minus = { let mut z = x.clone(); z.axpy(-h, &y).unwrap(); p.phi(&z) };
        let fd = (plus - minus) / (2.0 * h);
        let analytic = p.gradient(&x).inner_product(&y).unwrap();
        prop_assert!((fd - analytic).abs() <= 1e-5 * (1.0 + analytic.abs()), "{fd} vs {analytic}");
    }
}

#[test]
fn gradient_vanishes_on_decoupled_closed_form() {
    let layout = PhaseLayout::new(1, 1).unwrap();
    let model = BuiltinSystem::DecoupledPower { mu: 2.0 }.build(layout, None).unwrap();
    let p = ActionProblem::new(model, 1.0, RotationVector::new(vec![1]), 4, 17).unwrap();
    let x = FourierLoop::constant(layout, 4, &[0.5, 0.3]).unwrap();
    assert!(p.gradient(&x).norm() < 1e-14);
    assert!(p.collocation_residual(&x) < 1e-14);
    assert!((p.phi(&x) - 0.25).abs() < 1e-15);
}
