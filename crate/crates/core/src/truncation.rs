//! Truncated Hamiltonian `H_K = chi(|z_I|) H + (1 - chi(|z_I|)) rho |z_I|^mu`
//! and sampled estimates of the growth constants.

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, HamiltonianModel, TorusGrowth};
use crate::sampling::{halton, into_unit_ball, maximize_in_box, minimize_in_box, unit_direction};
use crate::spectral::PhaseLayout;

/// Relative safety margin applied to every sampled constant.
pub const SAFETY_MARGIN: f64 = 0.05;

const SEARCH_SAMPLES: usize = 1500;

/// Quintic smoothstep cutoff, `1` on `[0, K1]` and `0` on `[K2, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffFunction {
    k1: f64,
    k2: f64,
}

impl CutoffFunction {
    pub fn new(k1: f64, k2: f64) -> Result<Self> {
        if !(k1 > 0.0 && k2 > k1 && k2.is_finite()) {
            return Err(Error::Parameter(format!(
                "cutoff needs 0 < K1 < K2, got K1 = {k1}, K2 = {k2}"
            )));
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.k1 {
            1.0
        } else if t >= self.k2 {
            0.0
        } else {
            let u = (t - self.k1) / (self.k2 - self.k1);
            1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if t <= self.k1 || t >= self.k2 {
            0.0
        } else {
            let w = self.k2 - self.k1;
            let u = (t - self.k1) / w;
            -30.0 * u * u * (1.0 - u) * (1.0 - u) / w
        }
    }
}

pub fn make_cutoff(k1: f64, k2: f64) -> Result<CutoffFunction> {
    CutoffFunction::new(k1, k2)
}

/// `a1 = min_{|z_I| >= r} H / |z_I|^mu`, `a2 = max_{|z_I| <= r} |H|`,
/// `a3 = max_{|z_I| <= r} (mu - 1) H - min_{|z_I| <= r} z_I . H_{z_I}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl GrowthConstants {
    /// Pushes each constant by the safety margin in the direction that loosens the estimates.
    pub fn with_margin(&self) -> Self {
        Self {
            a1: self.a1 * (1.0 - SAFETY_MARGIN),
            a2: self.a2 * (1.0 + SAFETY_MARGIN),
            a3: self.a3 + SAFETY_MARGIN * self.a3.abs(),
        }
    }
}

/// Sampled constants together with their margin-adjusted counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSet {
    pub sampled: GrowthConstants,
    pub conservative: GrowthConstants,
}

/// Point with `|z_I| = radius * u_r`, direction and torus phase taken from `p`.
///
/// `p` holds `free_dim` direction parameters in `[-1, 1]`, then `k` torus phases in `[0, 1]`.
fn point_from_params(layout: &PhaseLayout, p: &[f64], radius: f64, ball: bool) -> Vec<f64> {
    let d = layout.free_dim();
    let dir = if ball {
        into_unit_ball(&p[..d])
    } else {
        unit_direction(&p[..d]).unwrap_or_else(|| {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        })
    };
    let mut z = vec![0.0; layout.dim()];
    for (c, e) in dir.iter().enumerate() {
        z[c] = radius * e;
    }
    z[layout.torus_range()].copy_from_slice(&p[d..]);
    z
}

fn param_box(layout: &PhaseLayout) -> (Vec<f64>, Vec<f64>) {
    let d = layout.free_dim();
    let k = layout.k();
    let mut lo = vec![-1.0; d];
    let mut hi = vec![1.0; d];
    lo.extend(std::iter::repeat_n(0.0, k));
    hi.extend(std::iter::repeat_n(1.0, k));
    (lo, hi)
}

fn radial_dot<H: Hamiltonian + ?Sized>(h: &H, z: &[f64]) -> f64 {
    let g = h.grad(z);
    h.layout().free_range().map(|c| z[c] * g[c]).sum()
}

pub fn growth_constants(m: &HamiltonianModel) -> Result<ConstantSet> {
    let layout = m.layout();
    let mu = m.mu();
    let r = m.r();
    let (lo, hi) = param_box(&layout);

    // H / |z_I|^mu is nondecreasing along rays for |z_I| >= r, so the sphere suffices
    let a1 = minimize_in_box(
        |p| m.value(&point_from_params(&layout, p, r, false)) / r.powf(mu),
        &lo,
        &hi,
        SEARCH_SAMPLES,
    )
    .value;
    if !(a1 > 0.0) {
        return Err(Error::Hypothesis(format!(
            "a1 = {a1} is not positive: H must be positive on |z_I| = r"
        )));
    }
    let a2 = maximize_in_box(
        |p| m.value(&point_from_params(&layout, p, r, true)).abs(),
        &lo,
        &hi,
        SEARCH_SAMPLES,
    )
    .value;
    let max_h = maximize_in_box(
        |p| m.value(&point_from_params(&layout, p, r, true)),
        &lo,
        &hi,
        SEARCH_SAMPLES,
    )
    .value;
    let min_radial = minimize_in_box(
        |p| radial_dot(m, &point_from_params(&layout, p, r, true)),
        &lo,
        &hi,
        SEARCH_SAMPLES,
    )
    .value;
    let sampled = GrowthConstants {
        a1,
        a2,
        a3: (mu - 1.0) * max_h - min_radial,
    };
    Ok(ConstantSet {
        sampled,
        conservative: sampled.with_margin(),
    })
}

/// Margin-inflated estimate of `max |H| / |z_I|^mu` over `K1 <= |z_I| <= K2`.
pub fn estimate_rho(m: &HamiltonianModel, k1: f64, k2: f64) -> Result<f64> {
    if !(k1 > 0.0 && k2 > k1) {
        return Err(Error::Parameter(format!("annulus needs 0 < K1 < K2, got {k1}, {k2}")));
    }
    let layout = m.layout();
    let mu = m.mu();
    let (mut lo, mut hi) = param_box(&layout);
    lo.push(k1);
    hi.push(k2);
    let last = lo.len() - 1;
    let best = maximize_in_box(
        |p| {
            let rad = p[last];
            m.value(&point_from_params(&layout, &p[..last], rad, false)).abs() / rad.powf(mu)
        },
        &lo,
        &hi,
        SEARCH_SAMPLES,
    );
    Ok(best.value * (1.0 + SAFETY_MARGIN))
}

#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    base: HamiltonianModel,
    cutoff: CutoffFunction,
    rho: f64,
}

/// Sampled checks run after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub superquadratic_violation: f64,
    pub max_inside: f64,
    pub min_outside: f64,
    pub rho_raised: f64,
}

impl TruncatedHamiltonian {
    pub fn new(base: HamiltonianModel, cutoff: CutoffFunction, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Parameter(format!("rho = {rho} must be positive")));
        }
        if cutoff.k1() < base.r() {
            return Err(Error::Parameter(format!(
                "K1 = {} must be at least r = {}",
                cutoff.k1(),
                base.r()
            )));
        }
        Ok(Self { base, cutoff, rho })
    }

    /// Builds `H_K` with `K1 = max(r, k1_target)` and `K2 = 2 K1`, raising `rho` until
    /// superquadraticity holds on samples and enlarging `K2` until levels separate.
    pub fn construct(base: HamiltonianModel, k1_target: f64, samples: usize) -> Result<(Self, TruncationReport)> {
        let k1 = base.r().max(k1_target);
        let mut k2 = 2.0 * k1;
        for _ in 0..24 {
            let rho0 = estimate_rho(&base, k1, k2)?;
            let mut rho = rho0;
            let mut hk = Self::new(base.clone(), make_cutoff(k1, k2)?, rho)?;
            let mut violation = hk.check_superquadratic(samples, 3.0 * k2);
            while violation > 0.0 && rho < 4.0 * rho0 {
                rho *= 1.25;
                hk = Self::new(base.clone(), make_cutoff(k1, k2)?, rho)?;
                violation = hk.check_superquadratic(samples, 3.0 * k2);
            }
            let (max_inside, min_outside) = hk.check_level_separation(samples);
            if violation <= 0.0 && max_inside < min_outside {
                let report = TruncationReport {
                    superquadratic_violation: violation,
                    max_inside,
                    min_outside,
                    rho_raised: rho / rho0,
                };
                return Ok((hk, report));
            }
            if violation > 0.0 {
                return Err(Error::Hypothesis(format!(
                    "truncated Hamiltonian is not superquadratic (violation {violation:.3e}) even with rho = {rho}"
                )));
            }
            k2 *= 1.5;
        }
        Err(Error::Parameter("level separation never held while enlarging K2".into()))
    }

    pub fn base(&self) -> &HamiltonianModel {
        &self.base
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.cutoff
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> f64 {
        self.base.mu()
    }

    /// True where `H_K` coincides with `H`.
    pub fn is_untruncated(&self, z: &[f64]) -> bool {
        self.base.layout().free_norm(z) <= self.cutoff.k1()
    }

    /// Global bound `a K2^s + b` on `|(H_K)_{z_II}|`, when the torus growth is declared.
    pub fn torus_gradient_bound(&self) -> Option<f64> {
        self.base
            .torus_growth()
            .map(|TorusGrowth { a, b, s }| a * self.cutoff.k2().powf(s) + b)
    }

    fn sample_point(&self, i: usize, radius: f64) -> Vec<f64> {
        let layout = self.base.layout();
        let d = layout.free_dim();
        let u = halton(i as u64, d + 1 + layout.k());
        let mut p: Vec<f64> = u[..d].iter().map(|c| 2.0 * c - 1.0).collect();
        p.extend_from_slice(&u[d + 1..]);
        point_from_params(&layout, &p, radius * u[d], false)
    }

    /// Largest relative violation of `0 < mu H_K <= z_I . (H_K)_{z_I}` on `|z_I| >= r`
    /// (`0` when the sampled check passes).
    pub fn check_superquadratic(&self, samples: usize, radius: f64) -> f64 {
        let mu = self.mu();
        let r = self.base.r();
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let z = self.sample_point(i, radius);
            if self.base.layout().free_norm(&z) < r {
                continue;
            }
            let h = self.value(&z);
            let radial = radial_dot(self, &z);
            let v = if h > 0.0 {
                (mu * h - radial) / (1.0 + h.abs()) - 1e-12
            } else {
                1.0 - h
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Sampled `(max_{|z_I| < K2} H_K, min_{|z_I| >= K2} H_K)`.
    pub fn check_level_separation(&self, samples: usize) -> (f64, f64) {
        let k2 = self.cutoff.k2();
        let mut inside = f64::NEG_INFINITY;
        let mut outside = f64::INFINITY;
        for i in 0..samples {
            let z = self.sample_point(i, k2);
            inside = inside.max(self.value(&z));
            let norm = self.base.layout().free_norm(&z);
            if norm > 1e-12 {
                let scale = k2 * (1.0 + 2.0 * halton(i as u64, 1)[0]) / norm;
                let mut far = z.clone();
                for c in self.base.layout().free_range() {
                    far[c] *= scale;
                }
                outside = outside.min(self.value(&far));
            }
        }
        // H_K = rho |z_I|^mu beyond K2, whose minimum sits on the sphere |z_I| = K2
        outside = outside.min(self.rho * k2.powf(self.mu()));
        (inside, outside)
    }

    /// Largest violation of the sandwich `a1 |z_I|^mu - a2 <= H_K <= rho |z_I|^mu + a2`.
    pub fn check_sandwich(&self, constants: &GrowthConstants, samples: usize, radius: f64) -> f64 {
        let mu = self.mu();
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let z = self.sample_point(i, radius);
            let p = self.base.layout().free_norm(&z).powf(mu);
            let h = self.value(&z);
            let lower = constants.a1 * p - constants.a2;
            let upper = self.rho * p + constants.a2;
            worst = worst.max((lower - h) / (1.0 + h.abs())).max((h - upper) / (1.0 + h.abs()));
        }
        worst
    }

    /// Largest violation of both `|(H_K)_{z_II}| <= a |z_I|^s + b` and the global bound.
    pub fn check_torus_gradient(&self, samples: usize, radius: f64) -> Option<f64> {
        let TorusGrowth { a, b, s } = self.base.torus_growth()?;
        let cap = self.torus_gradient_bound()?;
        let layout = self.base.layout();
        let mut worst: f64 = 0.0;
        for i in 0..samples {
            let z = self.sample_point(i, radius);
            let g = self.grad(&z);
            let norm = layout.torus_range().map(|c| g[c] * g[c]).sum::<f64>().sqrt();
            let local = a * layout.free_norm(&z).powf(s) + b;
            worst = worst.max(norm - local).max(norm - cap);
        }
        Some(worst)
    }
}

impl Hamiltonian for TruncatedHamiltonian {
    fn layout(&self) -> PhaseLayout {
        self.base.layout()
    }

    fn value(&self, z: &[f64]) -> f64 {
        let layout = self.base.layout();
        let t = layout.free_norm(z);
        if t <= self.cutoff.k1() {
            return self.base.value(z);
        }
        let outer = self.rho * t.powf(self.mu());
        if t >= self.cutoff.k2() {
            return outer;
        }
        let chi = self.cutoff.value(t);
        chi * self.base.value(z) + (1.0 - chi) * outer
    }

    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let layout = self.base.layout();
        let t = layout.free_norm(z);
        let mu = self.mu();
        if t <= self.cutoff.k1() {
            return self.base.gradient(z, out);
        }
        let outer_slope = self.rho * mu * t.powf(mu - 2.0);
        if t >= self.cutoff.k2() {
            out.fill(0.0);
            for c in layout.free_range() {
                out[c] = outer_slope * z[c];
            }
            return;
        }
        self.base.gradient(z, out);
        let chi = self.cutoff.value(t);
        let dchi = self.cutoff.derivative(t);
        let h = self.base.value(z);
        let outer = self.rho * t.powf(mu);
        let radial = dchi * (h - outer) / t;
        for c in layout.free_range() {
            out[c] = chi * out[c] + (1.0 - chi) * outer_slope * z[c] + radial * z[c];
        }
        for c in layout.torus_range() {
            out[c] *= chi;
        }
    }
}
