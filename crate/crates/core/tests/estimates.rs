use proptest::prelude::*;
use rotational_orbits::estimates::{
    apriori_bound_case2, c_constant, gamma, linking_bound, linking_radius, ordering_check, period_interval,
    GrowthCase, IntervalKind, PeriodCoefficients,
};
use rotational_orbits::hamiltonian::TorusGrowth;
use rotational_orbits::sampling::golden_section_min;
use rotational_orbits::truncation::GrowthConstants;

// gamma retyped in exp/log form
fn gamma_oracle(t: f64, v: f64, mu: f64, a1: f64, a2: f64) -> f64 {
    let rot = ((mu * v.ln() - (mu * a1).ln()) / (mu - 1.0) - t.ln() / (mu - 1.0)).exp() * (mu - 1.0) / mu;
    if mu < 2.0 {
        (2.0 / (2.0 - mu) * (t.ln() + (mu * a1 / 2.0).ln())).exp() + 2.0 * rot + t * a2
    } else {
        rot + t * a2
    }
}

fn sup_on_half_line(f: impl Fn(f64) -> f64, hi: f64) -> f64 {
    let (arg, _) = golden_section_min(|x| -f(x), 0.0, hi, 1e-13);
    f(arg)
}

#[test]
fn gamma_at_closed_form_points() {
    // decoupled |p|^mu has a1 = 1, a2 = 0 and critical value T (mu - 1) p*^mu
    for &(mu, t, expected) in &[(2.0, 1.0, 0.25), (3.0, 1.0, 2.0 * 3f64.powf(-1.5)), (2.0, 2.0, 0.125)] {
        let g = gamma(t, 1.0, mu, 1.0, 0.0).unwrap();
        assert!((g - expected).abs() < 1e-15, "{mu} {t}: {g}");
    }
}

#[test]
fn rotational_term_is_a_legendre_maximum() {
    for &(mu, t, v, a1) in &[(2.5, 1.0, 1.0, 0.8), (3.0, 0.5, 2.0, 1.2), (1.5, 1.0, 1.0, 0.9), (1.2, 2.0, 1.4, 0.5)] {
        let c = if mu < 2.0 { 2f64.powf(1.0 - mu) * t * a1 } else { t * a1 };
        let sup = sup_on_half_line(|b| b * v - c * b.powf(mu), 1e3);
        let head = if mu < 2.0 { (t * mu * a1 / 2.0).powf(2.0 / (2.0 - mu)) } else { 0.0 };
        let g = gamma(t, v, mu, a1, 0.0).unwrap();
        assert!(((g - head) - sup).abs() < 1e-9 * (1.0 + sup), "{mu}: {} vs {sup}", g - head);
        if mu < 2.0 {
            // the head bounds the free-part contribution from above
            let free = sup_on_half_line(|a| -a * a + t * a1 * a.powf(mu), 1e3);
            assert!(head >= free);
        }
    }
}

#[test]
fn linking_radius_example() {
    let r = linking_radius(1.0, 2.0, 1.0, 0.0, 1.0, 0.0).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((r - std::f64::consts::SQRT_2 * golden).abs() < 1e-12, "{r}");
    assert!(linking_bound(r, 1.0, 2.0, 1.0, 0.0, 1.0) <= -1.0);
    assert!(linking_radius(2.0, 2.0, 1.0, 0.0, 1.0, 0.0).unwrap() < r);
    let f = |t: f64| (1.0 + t).powf(1.5) / (1.0 + t.powf(1.5));
    assert!((sup_on_half_line(f, 50.0) - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn critical_growth_threshold() {
    let consts = GrowthConstants { a1: 1.0, a2: 0.0, a3: 0.0 };
    let growth = TorusGrowth { a: 1.0, b: 0.0, s: 1.0 };
    let i = period_interval(2.0, &consts, &growth, 1.0).unwrap();
    assert_eq!(i.kind, IntervalKind::Bounded);
    assert!((i.delta - 0.5).abs() < 1e-15);
    let g = gamma(0.4, 1.0, 2.0, 1.0, 0.0).unwrap();
    assert!(apriori_bound_case2(g, 0.4, 2.0, &consts, &growth).unwrap().r1.is_finite());
    let g = gamma(0.6, 1.0, 2.0, 1.0, 0.0).unwrap();
    assert!(apriori_bound_case2(g, 0.6, 2.0, &consts, &growth).is_err());
}

#[test]
fn subcritical_root_solves_the_scalar_inequality() {
    let consts = GrowthConstants { a1: 0.9, a2: 0.2, a3: 0.1 };
    let growth = TorusGrowth { a: 0.5, b: 0.3, s: 0.0 };
    let (t, mu) = (1.0, 2.0);
    let g = gamma(t, 1.0, mu, consts.a1, consts.a2).unwrap();
    let bound = apriori_bound_case2(g, t, mu, &consts, &growth).unwrap();
    assert_eq!(bound.case, GrowthCase::Sub);
    // with s = 0 the inequality is linear in l^mu
    let c = c_constant(g, t, mu, consts.a2, consts.a3, growth.b);
    let direct = ((c + 2.0 * t * t * growth.a * growth.a) / (t * (mu - 1.0) * consts.a1)).powf(1.0 / mu);
    assert!((bound.r1 - direct).abs() < 1e-12 * direct);
}

#[test]
fn interval_is_full_below_half_mu() {
    let consts = GrowthConstants { a1: 1.0, a2: 0.1, a3: 0.1 };
    let growth = TorusGrowth { a: 1.0, b: 1.0, s: 0.0 };
    let i = period_interval(2.0, &consts, &growth, 1.0).unwrap();
    assert_eq!((i.kind, i.delta), (IntervalKind::Full, f64::INFINITY));
}

fn super_case() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64, f64, f64)> {
    (1.4f64..3.0, 0.1f64..0.9, 0.5f64..2.0, 0.0f64..0.5, 0.0f64..0.5, 0.01f64..0.5, 0.0f64..0.2, 1.0f64..3.0)
        .prop_map(|(mu, frac, a1, a2, a3, a, b, v)| {
            // 2s strictly inside (mu, 2 mu - 1)
            let s = 0.5 * (mu + frac * (mu - 1.0));
            (mu, s, a1, a2, a3, a, b, v)
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 100,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn gamma_matches_oracle(t in 0.05f64..5.0, v in 0.5f64..3.0, mu in 1.05f64..4.0, a1 in 0.1f64..3.0, a2 in 0.0f64..2.0) {
        let g = gamma(t, v, mu, a1, a2).unwrap();
        let o = gamma_oracle(t, v, mu, a1, a2);
        prop_assert!((g - o).abs() <= 1e-12 * (1.0 + o.abs()), "{g} vs {o}");
    }

    #[test]
    fn super_case_roots_and_ordering((mu, s, a1, a2, a3, a, b, v) in super_case()) {
        let consts = GrowthConstants { a1, a2, a3 };
        let growth = TorusGrowth { a, b, s };
        let interval = period_interval(mu, &consts, &growth, v).unwrap();
        prop_assert_eq!(interval.kind, IntervalKind::Bounded);
        let coeffs = interval.coefficients.unwrap();
        let delta = interval.delta;
        prop_assume!(delta > 1e-9 && delta < 1e9);
        prop_assert!(coeffs.holds(0.99 * delta));
        prop_assert!(!coeffs.holds(1.01 * delta));

        let t = 0.5 * delta;
        let g = gamma(t, v, mu, a1, a2).unwrap();
        let bound = apriori_bound_case2(g, t, mu, &consts, &growth).unwrap();
        prop_assert_eq!(bound.case, GrowthCase::Super);
        let (l0, r2) = (bound.lambda0.unwrap(), bound.r2.unwrap());
        let phi = |l: f64| t * (mu - 1.0) * a1 * l.powf(mu) - 2.0 * t * t * a * a * l.powf(2.0 * s);
        // phi(R2) cancels two terms of size A R2^mu; f64 resolves C to 1e-9 only while that ratio is moderate
        let scale = t * (mu - 1.0) * a1 * r2.powf(mu);
        let tol = if scale <= 1e5 * bound.c { 1e-9 * bound.c } else { 1e-12 * scale };
        prop_assert!((phi(bound.r1) - bound.c).abs() <= tol, "R1 {} C {} l0 {l0}", bound.r1, bound.c);
        prop_assert!((phi(r2) - bound.c).abs() <= tol, "R2 {r2} phi {} C {}", phi(r2), bound.c);
        prop_assert!(bound.r1 < l0 && l0 < r2);
        prop_assert!(ordering_check(bound.k1, l0, r2, bound.c, t, mu, a1, a, s));
    }

    #[test]
    fn coefficients_are_positive((mu, s, a1, a2, a3, a, b, v) in super_case()) {
        let c = PeriodCoefficients::new(mu, s, &GrowthConstants { a1, a2, a3 }, &TorusGrowth { a, b, s }, v);
        prop_assert!(c.d.iter().all(|d| *d >= 0.0) && c.d[0] > 0.0);
    }
}
