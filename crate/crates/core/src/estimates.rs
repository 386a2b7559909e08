//! Closed-form constants: the critical-value cap `gamma`, a priori bounds on
//! `|z_I|`, the admissible period interval, and the linking radius.

use crate::error::{Error, Result};
use crate::hamiltonian::TorusGrowth;
use crate::sampling::bisect;
use crate::truncation::GrowthConstants;

const EXPONENT_TOL: f64 = 1e-12;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {value} must be positive")))
    }
}

/// Critical-value cap; the `mu < 2` and `mu >= 2` branches differ.
pub fn gamma(t: f64, v_norm: f64, mu: f64, a1: f64, a2: f64) -> Result<f64> {
    check_positive("T", t)?;
    check_positive("a1", a1)?;
    if !(mu > 1.0) {
        return Err(Error::Parameter(format!("mu = {mu} must exceed 1")));
    }
    let rot = (v_norm.powf(mu) / (mu * a1)).powf(1.0 / (mu - 1.0)) * (1.0 - 1.0 / mu);
    let tail = t.powf(-1.0 / (mu - 1.0));
    Ok(if mu < 2.0 {
        let e = 2.0 / (2.0 - mu);
        (t * mu * a1 / 2.0).powf(e) + tail * 2.0 * rot + t * a2
    } else {
        tail * rot + t * a2
    })
}

/// Maximizer and maximum of `phi(l) = A l^alpha - B l^beta` on `l > 0`.
pub fn phi_lambda_extremum(a: f64, b: f64, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    check_positive("A", a)?;
    check_positive("B", b)?;
    if !(alpha > 0.0 && alpha < beta) {
        return Err(Error::Parameter(format!(
            "exponents need 0 < alpha < beta, got {alpha}, {beta}"
        )));
    }
    let lambda0 = (a * alpha / (b * beta)).powf(1.0 / (beta - alpha));
    Ok((lambda0, b * lambda0.powf(beta) * (beta / alpha - 1.0)))
}

/// Bound `K` on `|z_I|` along critical points with value at most `gamma` when `k = n`.
pub fn apriori_bound_case1(gamma: f64, t: f64, mu: f64, a1: f64, a2: f64, a3: f64) -> f64 {
    ((gamma / t + (mu - 1.0) * a2 + a3) / ((mu - 1.0) * a1)).powf(1.0 / mu)
}

/// `C = gamma + T(mu - 1) a2 + T a3 + 2 T^2 b^2`.
pub fn c_constant(gamma: f64, t: f64, mu: f64, a2: f64, a3: f64, b: f64) -> f64 {
    gamma + t * (mu - 1.0) * a2 + t * a3 + 2.0 * t * t * b * b
}

/// Position of `2s` relative to `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCase {
    /// `2s < mu`
    Sub,
    /// `2s = mu`
    Critical,
    /// `mu < 2s < 2mu - 1`
    Super,
}

impl GrowthCase {
    pub fn classify(mu: f64, s: f64) -> Result<Self> {
        if !(s < mu - 0.5) {
            return Err(Error::Hypothesis(format!(
                "torus growth exponent s = {s} must be below mu - 1/2 = {}",
                mu - 0.5
            )));
        }
        Ok(if (2.0 * s - mu).abs() <= EXPONENT_TOL {
            GrowthCase::Critical
        } else if 2.0 * s < mu {
            GrowthCase::Sub
        } else {
            GrowthCase::Super
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            GrowthCase::Sub => "2s<mu",
            GrowthCase::Critical => "2s=mu",
            GrowthCase::Super => "mu<2s<2mu-1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case2Bound {
    pub case: GrowthCase,
    pub c: f64,
    pub r1: f64,
    pub lambda0: Option<f64>,
    pub r2: Option<f64>,
    pub phi_max: Option<f64>,
    pub k1: f64,
}

/// `phi(l) = A l^mu - B l^{2s}` with `A = T(mu - 1) a1`, `B = 2 T^2 a^2`.
fn phi_coefficients(t: f64, mu: f64, a1: f64, a: f64) -> (f64, f64) {
    (t * (mu - 1.0) * a1, 2.0 * t * t * a * a)
}

/// Bound `K1` on `|z_I|` along critical points with value at most `gamma` when `k > n`.
///
/// Fails with [`Error::PeriodOutsideInterval`] (with `delta` unknown here, `NaN`)
/// when `T` is too large for the growth case.
pub fn apriori_bound_case2(
    gamma: f64,
    t: f64,
    mu: f64,
    constants: &GrowthConstants,
    growth: &TorusGrowth,
) -> Result<Case2Bound> {
    let GrowthConstants { a1, a2, a3 } = *constants;
    let TorusGrowth { a, b, s } = *growth;
    let case = GrowthCase::classify(mu, s)?;
    let c = c_constant(gamma, t, mu, a2, a3, b);
    let (big_a, big_b) = phi_coefficients(t, mu, a1, a);
    let phi = |l: f64| big_a * l.powf(mu) - big_b * l.powf(2.0 * s);
    let outside = || Error::PeriodOutsideInterval {
        period: t,
        delta: f64::NAN,
    };

    let (r1, lambda0, r2, phi_max) = match case {
        GrowthCase::Sub => {
            let mut hi = 1.0;
            while phi(hi) <= c {
                hi *= 2.0;
            }
            (bisect(|l| phi(l) - c, 0.0, hi, 1e-15), None, None, None)
        }
        GrowthCase::Critical => {
            if big_a <= big_b {
                return Err(outside());
            }
            ((c / (big_a - big_b)).powf(1.0 / mu), None, None, None)
        }
        GrowthCase::Super => {
            let (lambda0, max) = phi_lambda_extremum(big_a, big_b, mu, 2.0 * s)?;
            if !(c < max) {
                return Err(outside());
            }
            let r1 = bisect(|l| phi(l) - c, 0.0, lambda0, 1e-15);
            let mut hi = 2.0 * lambda0;
            while phi(hi) >= c {
                hi *= 2.0;
            }
            let r2 = bisect(|l| phi(l) - c, lambda0, hi, 1e-15);
            (r1, Some(lambda0), Some(r2), Some(max))
        }
    };
    let k1 = ((c + big_b * r1.powf(2.0 * s)) / big_a).powf(1.0 / mu);
    Ok(Case2Bound {
        case,
        c,
        r1,
        lambda0,
        r2,
        phi_max,
        k1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalKind {
    Full,
    Bounded,
}

impl IntervalKind {
    pub fn tag(&self) -> &'static str {
        match self {
            IntervalKind::Full => "full",
            IntervalKind::Bounded => "bounded",
        }
    }
}

/// Coefficients of the period inequality
/// `T^{2/(2-mu)} D1 + T^{-1/(mu-1)} D2 + T D3 + T^2 D4 < T^{(2s-2mu)/(2s-mu)} D0`.
///
/// For `mu >= 2` the left side follows the other `gamma` branch: `D1 = 0` and `D2` loses its factor 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodCoefficients {
    pub mu: f64,
    pub s: f64,
    pub d: [f64; 5],
}

impl PeriodCoefficients {
    pub fn new(mu: f64, s: f64, constants: &GrowthConstants, growth: &TorusGrowth, v_norm: f64) -> Self {
        let GrowthConstants { a1, a2, a3 } = *constants;
        let a = growth.a;
        let two_a2 = 2.0 * a * a;
        let two_s = 2.0 * s;
        let d0 = two_a2.powf(-mu / (two_s - mu))
            * ((mu - 1.0) * a1 * mu / two_s).powf(two_s / (two_s - mu))
            * (two_s / mu - 1.0);
        let rot = (v_norm.powf(mu) / (mu * a1)).powf(1.0 / (mu - 1.0)) * (1.0 - 1.0 / mu);
        let (d1, d2) = if mu < 2.0 {
            ((mu * a1 / 2.0).powf(2.0 / (2.0 - mu)), 2.0 * rot)
        } else {
            (0.0, rot)
        };
        Self {
            mu,
            s,
            d: [d0, d1, d2, mu * a2 + a3, 2.0 * growth.b * growth.b],
        }
    }

    pub fn lhs(&self, t: f64) -> f64 {
        let mu = self.mu;
        let [_, d1, d2, d3, d4] = self.d;
        let first = if d1 > 0.0 { t.powf(2.0 / (2.0 - mu)) * d1 } else { 0.0 };
        first + t.powf(-1.0 / (mu - 1.0)) * d2 + t * d3 + t * t * d4
    }

    pub fn rhs(&self, t: f64) -> f64 {
        let e = (2.0 * self.s - 2.0 * self.mu) / (2.0 * self.s - self.mu);
        t.powf(e) * self.d[0]
    }

    pub fn holds(&self, t: f64) -> bool {
        self.lhs(t) < self.rhs(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodInterval {
    pub kind: IntervalKind,
    pub delta: f64,
    pub coefficients: Option<PeriodCoefficients>,
}

impl PeriodInterval {
    pub fn contains(&self, t: f64) -> bool {
        t > 0.0 && t < self.delta
    }
}

/// Periods `T in (0, delta)` for which the `k > n` bound closes.
pub fn period_interval(
    mu: f64,
    constants: &GrowthConstants,
    growth: &TorusGrowth,
    v_norm: f64,
) -> Result<PeriodInterval> {
    let s = growth.s;
    let full = PeriodInterval {
        kind: IntervalKind::Full,
        delta: f64::INFINITY,
        coefficients: None,
    };
    match GrowthCase::classify(mu, s)? {
        GrowthCase::Sub => Ok(full),
        GrowthCase::Critical => Ok(PeriodInterval {
            kind: IntervalKind::Bounded,
            delta: (mu - 1.0) * constants.a1 / (2.0 * growth.a * growth.a),
            coefficients: None,
        }),
        GrowthCase::Super => {
            let coeffs = PeriodCoefficients::new(mu, s, constants, growth, v_norm);
            let holds = |t: f64| coeffs.holds(t);
            let (mut lo, mut hi) = (1.0, 1.0);
            if holds(1.0) {
                while holds(hi) {
                    hi *= 10.0;
                    if hi > 1e12 {
                        return Ok(PeriodInterval {
                            kind: IntervalKind::Bounded,
                            delta: hi,
                            coefficients: Some(coeffs),
                        });
                    }
                }
                lo = hi / 10.0;
            } else {
                while !holds(lo) {
                    lo /= 10.0;
                    if lo < 1e-12 {
                        return Ok(PeriodInterval {
                            kind: IntervalKind::Bounded,
                            delta: 0.0,
                            coefficients: Some(coeffs),
                        });
                    }
                }
                hi = lo * 10.0;
            }
            let delta = bisect(|t| coeffs.rhs(t) - coeffs.lhs(t), lo, hi, 1e-15);
            Ok(PeriodInterval {
                kind: IntervalKind::Bounded,
                delta,
                coefficients: Some(coeffs),
            })
        }
    }
}

/// Upper bound of `Phi_K` on the sphere `‖w‖ = R` in the linking space.
///
/// Splits `w = w^- + w^0` and takes the worse of `‖w^-‖ >= R/√2` and `|w^0| >= R/√2`.
pub fn linking_bound(r: f64, t: f64, mu: f64, a1: f64, a2: f64, v_norm: f64) -> f64 {
    let x = r / std::f64::consts::SQRT_2;
    let sub = mu < 2.0;
    // for mu >= 2 the ‖w^-‖^mu term is absorbed by Jensen and drops out
    let h = |a: f64| -0.5 * a * a + if sub { t * a1 * a.powf(mu) } else { 0.0 };
    let a_star = if sub { (mu * t * a1).powf(1.0 / (2.0 - mu)) } else { 0.0 };
    let c = if sub { 2f64.powf(1.0 - mu) * t * a1 } else { t * a1 };
    let g = |b: f64| b * v_norm - c * b.powf(mu);
    let b_star = (v_norm / (c * mu)).powf(1.0 / (mu - 1.0));
    let minus_heavy = h(x.max(a_star)) + g(b_star);
    let mean_heavy = h(a_star) + g(x.max(b_star));
    t * a2 + minus_heavy.max(mean_heavy)
}

/// Smallest `R` (to bisection accuracy) with `linking_bound(R) <= beta - 1`.
pub fn linking_radius(t: f64, mu: f64, a1: f64, a2: f64, v_norm: f64, beta: f64) -> Result<f64> {
    let target = beta - 1.0;
    let ok = |r: f64| linking_bound(r, t, mu, a1, a2, v_norm) <= target;
    let mut hi = 1.0;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 2f64.powi(40) {
            return Err(Error::Config(
                "linking radius search exceeded 2^40".into(),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(hi)
}

/// `K1 < ((C + B lambda0^{2s}) / A)^{1/mu} < lambda0 < R2`.
#[allow(clippy::too_many_arguments)]
pub fn ordering_check(k1: f64, lambda0: f64, r2: f64, c: f64, t: f64, mu: f64, a1: f64, a: f64, s: f64) -> bool {
    let (big_a, big_b) = phi_coefficients(t, mu, a1, a);
    let middle = ((c + big_b * lambda0.powf(2.0 * s)) / big_a).powf(1.0 / mu);
    k1 < middle && middle < lambda0 && lambda0 < r2
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateInputs {
    pub period: f64,
    pub v_norm: f64,
    pub mu: f64,
    pub constants: GrowthConstants,
    pub growth: Option<TorusGrowth>,
    /// `k > n`
    pub mixed: bool,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateBundle {
    pub inputs: EstimateInputs,
    pub gamma: f64,
    pub c: f64,
    pub k_bound: Option<f64>,
    pub case2: Option<Case2Bound>,
    pub interval: PeriodInterval,
    pub r_link: f64,
    pub beta: f64,
    pub k1_ordering: Option<bool>,
}

impl EstimateBundle {
    pub fn compute(inputs: EstimateInputs) -> Result<Self> {
        let EstimateInputs {
            period: t,
            v_norm,
            mu,
            constants,
            growth,
            mixed,
            beta,
        } = inputs.clone();
        let GrowthConstants { a1, a2, a3 } = constants;
        let gamma = gamma(t, v_norm, mu, a1, a2)?;
        let r_link = linking_radius(t, mu, a1, a2, v_norm, beta)?;
        let b = growth.map_or(0.0, |g| g.b);

        if !mixed {
            return Ok(Self {
                inputs,
                gamma,
                c: c_constant(gamma, t, mu, a2, a3, b),
                k_bound: Some(apriori_bound_case1(gamma, t, mu, a1, a2, a3)),
                case2: None,
                interval: PeriodInterval {
                    kind: IntervalKind::Full,
                    delta: f64::INFINITY,
                    coefficients: None,
                },
                r_link,
                beta,
                k1_ordering: None,
            });
        }

        let growth = growth.ok_or_else(|| {
            Error::Hypothesis("k > n needs the torus-gradient bound |H_{z_II}| <= a|z_I|^s + b".into())
        })?;
        let interval = period_interval(mu, &constants, &growth, v_norm)?;
        if !interval.contains(t) {
            return Err(Error::PeriodOutsideInterval {
                period: t,
                delta: interval.delta,
            });
        }
        let case2 = apriori_bound_case2(gamma, t, mu, &constants, &growth).map_err(|e| match e {
            Error::PeriodOutsideInterval { period, .. } => Error::PeriodOutsideInterval {
                period,
                delta: interval.delta,
            },
            other => other,
        })?;
        let k1_ordering = match (case2.lambda0, case2.r2) {
            (Some(l0), Some(r2)) => Some(ordering_check(case2.k1, l0, r2, case2.c, t, mu, a1, growth.a, growth.s)),
            _ => None,
        };
        Ok(Self {
            inputs,
            gamma,
            c: case2.c,
            k_bound: None,
            case2: Some(case2),
            interval,
            r_link,
            beta,
            k1_ordering,
        })
    }

    /// The bound on `|z_I|` used by the acceptance filter.
    pub fn apriori_bound(&self) -> f64 {
        self.k_bound
            .or(self.case2.map(|c| c.k1))
            .expect("bundle carries one of the two bounds")
    }
}
