use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotational_orbits::estimates::EstimateInputs;
use rotational_orbits::sampling::{halton, random_loop};
use rotational_orbits::solver::{accept_filter, dedupe, newton_search, ps_telemetry, solve_multistart};
use rotational_orbits::truncation::growth_constants;
use rotational_orbits::verifier::verify_loop;
use rotational_orbits::{
    ActionProblem, BuiltinSystem, EstimateBundle, Hamiltonian, PhaseLayout, RotationVector, SolverConfig, Subspace,
    TruncatedHamiltonian,
};

struct Run {
    value: f64,
    free: f64,
    gamma: f64,
    shot_residual: f64,
    energy_drift: f64,
    winding_ok: bool,
}

fn decoupled_run(mu: f64, period: f64) -> Vec<Run> {
    let layout = PhaseLayout::new(1, 1).unwrap();
    let model = BuiltinSystem::DecoupledPower { mu }.build(layout, None).unwrap();
    let v = RotationVector::prime(vec![1]).unwrap();
    let cfg = SolverConfig::with_modes(8);
    let base = ActionProblem::new(model.clone(), period, v.clone(), cfg.modes, cfg.nodes).unwrap();
    let consts = growth_constants(&model).unwrap();
    let bundle = EstimateBundle::compute(EstimateInputs {
        period,
        v_norm: 1.0,
        mu,
        constants: consts.conservative,
        growth: None,
        mixed: false,
        beta: base.beta_bound(64),
    })
    .unwrap();
    let (hk, _) = TruncatedHamiltonian::construct(model.clone(), 2.0 * bundle.apriori_bound(), 1024).unwrap();
    let problem = base.with_hamiltonian(hk.clone()).unwrap();
    let report = solve_multistart(&problem, &cfg, mu, bundle.r_link).unwrap();
    let distinct = dedupe(&report.points, &v, cfg.dedup_tol, cfg.theta_grid);
    accept_filter(&distinct, &bundle, &hk)
        .into_iter()
        .filter(|c| c.accepted)
        .map(|c| {
            let orbit = verify_loop(&base, &c.x, 64, 1000, 10.0 * hk.cutoff().k2()).unwrap();
            let shot = orbit.shooting.clone().unwrap();
            assert!(orbit.free_part_constant(1e-9));
            Run {
                value: c.value,
                free: orbit.z0[0],
                gamma: bundle.gamma,
                shot_residual: shot.residual,
                energy_drift: shot.energy_drift,
                winding_ok: shot.winding_matches,
            }
        })
        .collect()
}

#[test]
fn decoupled_orbits_match_closed_form() {
    for &(mu, t) in &[(2.0f64, 1.0f64), (3.0, 1.0), (2.0, 2.0)] {
        let p_star = (1.0 / (mu * t)).powf(1.0 / (mu - 1.0));
        let runs = decoupled_run(mu, t);
        assert_eq!(runs.len(), 1, "mu = {mu}, T = {t}");
        let r = &runs[0];
        assert!((r.free - p_star).abs() <= 1e-6 * p_star, "{} vs {p_star}", r.free);
        let value = t * (mu - 1.0) * p_star.powf(mu);
        assert!((r.value - value).abs() <= 1e-9);
        assert!(r.value <= r.gamma);
        assert!(r.shot_residual <= 1e-6 && r.energy_drift <= 1e-8 && r.winding_ok);
    }
}

#[test]
fn truncation_is_exact_on_plateaus() {
    let layout = PhaseLayout::new(2, 2).unwrap();
    let model = BuiltinSystem::PerturbedPendulumProduct { mu: 2.0, epsilon: 0.1 }
        .build(layout, None)
        .unwrap();
    let (hk, report) = TruncatedHamiltonian::construct(model.clone(), 3.0, 2048).unwrap();
    assert!(report.max_inside < report.min_outside);
    let (k1, k2) = (hk.cutoff().k1(), hk.cutoff().k2());
    for i in 0..2000 {
        let u = halton(i, 5);
        let dir = [2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0];
        let len = dir[0].hypot(dir[1]);
        if len < 1e-6 {
            continue;
        }
        let inner = k1 * u[2];
        let outer = k2 * (1.0 + 3.0 * u[2]);
        let point = |r: f64| vec![dir[0] / len * r, dir[1] / len * r, u[3] * 3.0, u[4] - 7.0];
        let z = point(inner);
        assert_eq!(hk.value(&z), model.value(&z));
        let z = point(outer);
        let expected = hk.rho() * layout.free_norm(&z).powf(2.0);
        assert!((hk.value(&z) - expected).abs() <= 4.0 * f64::EPSILON * expected);
    }
    let consts = growth_constants(&model).unwrap();
    assert!(hk.check_sandwich(&consts.conservative, 10_000, 4.0 * k2) <= 0.0);
}

#[test]
fn torus_gradient_stays_bounded() {
    let layout = PhaseLayout::new(2, 3).unwrap();
    let model = BuiltinSystem::CoupledGrowthPendulum {
        mu: 1.5,
        epsilon: 0.01,
        s: 0.9,
    }
    .build(layout, None)
    .unwrap();
    let (hk, _) = TruncatedHamiltonian::construct(model, 4.0, 2048).unwrap();
    let worst = hk.check_torus_gradient(10_000, 4.0 * hk.cutoff().k2()).unwrap();
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn telemetry_separates_converging_and_diverging_traces() {
    let layout = PhaseLayout::new(1, 1).unwrap();
    let model = BuiltinSystem::PerturbedPendulumProduct { mu: 2.0, epsilon: 0.1 }
        .build(layout, None)
        .unwrap();
    let (hk, _) = TruncatedHamiltonian::construct(model, 3.0, 512).unwrap();
    let problem = ActionProblem::new(hk, 1.0, RotationVector::new(vec![1]), 6, 25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x0 = random_loop(layout, 6, 0.2, &mut rng);

    // descending along E^- makes -‖x^-‖^2 ever more negative
    let mut x = x0.clone();
    let mut trace = vec![x.clone()];
    for _ in 0..40 {
        let step = problem.gradient(&x).project(Subspace::Eminus).unwrap();
        x.axpy(-0.5, &step).unwrap();
        trace.push(x.clone());
    }
    let report = ps_telemetry(&trace, 2.0);
    assert!(report.diverging, "{:?}", report.norms.last());

    let cfg = SolverConfig::with_modes(6);
    let (_, rn, _, trace) = newton_search(&problem, &x0, &cfg);
    assert!(rn <= cfg.tol_g);
    assert!(!ps_telemetry(&trace, 2.0).diverging);
}
