//! Hamiltonians on `R^{2n}` that are `Z^k`-periodic in `z_II`, builtin test
//! systems, and sampled checks of the growth hypotheses.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sampling::{halton, unit_direction};
use crate::spectral::{PhaseLayout, TWO_PI};

/// Energy function with gradient `H' = (H_{z_I}, H_{z_II})`.
pub trait Hamiltonian: Send + Sync {
    fn layout(&self) -> PhaseLayout;

    fn value(&self, z: &[f64]) -> f64;

    fn gradient(&self, z: &[f64], out: &mut [f64]);

    /// Row-major `2n x 2n` Hessian; central differences of the gradient by default.
    fn hessian(&self, z: &[f64], out: &mut [f64]) {
        let d = z.len();
        let mut zp = z.to_vec();
        let mut gp = vec![0.0; d];
        let mut gm = vec![0.0; d];
        for c in 0..d {
            let h = 1e-5 * z[c].abs().max(1.0);
            zp[c] = z[c] + h;
            self.gradient(&zp, &mut gp);
            zp[c] = z[c] - h;
            self.gradient(&zp, &mut gm);
            zp[c] = z[c];
            for r in 0..d {
                out[r * d + c] = (gp[r] - gm[r]) / (2.0 * h);
            }
        }
        for r in 0..d {
            for c in r + 1..d {
                let s = 0.5 * (out[r * d + c] + out[c * d + r]);
                out[r * d + c] = s;
                out[c * d + r] = s;
            }
        }
    }

    fn grad(&self, z: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; z.len()];
        self.gradient(z, &mut g);
        g
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for Arc<H> {
    fn layout(&self) -> PhaseLayout {
        (**self).layout()
    }
    fn value(&self, z: &[f64]) -> f64 {
        (**self).value(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        (**self).gradient(z, out)
    }
    fn hessian(&self, z: &[f64], out: &mut [f64]) {
        (**self).hessian(z, out)
    }
}

/// Constants of the torus-gradient bound `|H_{z_II}(z)| <= a |z_I|^s + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrowth {
    pub a: f64,
    pub b: f64,
    pub s: f64,
}

/// Declared growth data: superquadratic exponent `mu > 1` valid for `|z_I| >= r`,
/// and optionally the torus-gradient bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: f64,
    pub r: f64,
    pub torus_growth: Option<TorusGrowth>,
}

impl ModelParams {
    fn validate(&self) -> Result<()> {
        if !(self.mu > 1.0) {
            return Err(Error::Parameter(format!("mu = {} must exceed 1", self.mu)));
        }
        if !(self.r > 0.0) {
            return Err(Error::Parameter(format!("r = {} must be positive", self.r)));
        }
        if let Some(g) = self.torus_growth {
            if !(g.a > 0.0 && g.b > 0.0 && g.s >= 0.0) {
                return Err(Error::Parameter(format!(
                    "torus growth needs a, b > 0 and s >= 0, got {g:?}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct HamiltonianModel {
    name: String,
    layout: PhaseLayout,
    params: ModelParams,
    energy: Arc<dyn Hamiltonian>,
}

impl fmt::Debug for HamiltonianModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianModel")
            .field("name", &self.name)
            .field("layout", &self.layout)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl HamiltonianModel {
    pub fn new(name: impl Into<String>, params: ModelParams, energy: Arc<dyn Hamiltonian>) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            name: name.into(),
            layout: energy.layout(),
            params,
            energy,
        })
    }

    /// Model from plain closures, mostly for experiments and tests.
    pub fn from_fns<V, G>(
        name: impl Into<String>,
        layout: PhaseLayout,
        params: ModelParams,
        value: V,
        gradient: G,
    ) -> Result<Self>
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        let energy = FnHamiltonian {
            layout,
            value: Box::new(value),
            gradient: Box::new(gradient),
        };
        Self::new(name, params, Arc::new(energy))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn r(&self) -> f64 {
        self.params.r
    }

    pub fn torus_growth(&self) -> Option<TorusGrowth> {
        self.params.torus_growth
    }
}

impl Hamiltonian for HamiltonianModel {
    fn layout(&self) -> PhaseLayout {
        self.layout
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.energy.value(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        self.energy.gradient(z, out)
    }
    fn hessian(&self, z: &[f64], out: &mut [f64]) {
        self.energy.hessian(z, out)
    }
}

type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

struct FnHamiltonian {
    layout: PhaseLayout,
    value: ValueFn,
    gradient: GradientFn,
}

impl Hamiltonian for FnHamiltonian {
    fn layout(&self) -> PhaseLayout {
        self.layout
    }
    fn value(&self, z: &[f64]) -> f64 {
        (self.value)(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        (self.gradient)(z, out)
    }
}

/// `H(z) = |z_I|^mu + eps (1 + |z_I|^2)^{s/2} sum_i (cos(2 pi z_II,i) - 1)`.
///
/// `eps = 0` gives the decoupled power law, `s = 0` the pendulum product.
#[derive(Debug, Clone, Copy)]
struct PendulumFamily {
    layout: PhaseLayout,
    mu: f64,
    eps: f64,
    s: f64,
}

impl PendulumFamily {
    fn torus_sum(&self, z: &[f64]) -> f64 {
        self.layout
            .torus_part(z)
            .iter()
            .map(|q| (TWO_PI * q).cos() - 1.0)
            .sum()
    }

    fn weight(&self, rho2: f64) -> f64 {
        if self.s == 0.0 {
            1.0
        } else {
            (1.0 + rho2).powf(0.5 * self.s)
        }
    }
}

impl Hamiltonian for PendulumFamily {
    fn layout(&self) -> PhaseLayout {
        self.layout
    }

    fn value(&self, z: &[f64]) -> f64 {
        let rho2: f64 = self.layout.free_part(z).iter().map(|c| c * c).sum();
        let mut h = rho2.powf(0.5 * self.mu);
        if self.eps != 0.0 {
            h += self.eps * self.weight(rho2) * self.torus_sum(z);
        }
        h
    }

    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let free = self.layout.free_range();
        let rho2: f64 = self.layout.free_part(z).iter().map(|c| c * c).sum();
        // d|z|^mu / dz = mu |z|^{mu-2} z, which vanishes at the origin for mu > 1
        let radial = if rho2 > 0.0 {
            self.mu * rho2.powf(0.5 * self.mu - 1.0)
        } else {
            0.0
        };
        let weight_slope = if self.eps != 0.0 && self.s != 0.0 {
            self.eps * self.s * (1.0 + rho2).powf(0.5 * self.s - 1.0) * self.torus_sum(z)
        } else {
            0.0
        };
        for c in free {
            out[c] = (radial + weight_slope) * z[c];
        }
        let amp = self.eps * self.weight(rho2);
        for c in self.layout.torus_range() {
            out[c] = -amp * TWO_PI * (TWO_PI * z[c]).sin();
        }
    }
}

/// Builtin test systems satisfying the periodicity and growth hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinSystem {
    /// `H = |z_I|^mu`.
    DecoupledPower { mu: f64 },
    /// `H = |z_I|^mu + eps sum_i (cos(2 pi z_II,i) - 1)`.
    PerturbedPendulumProduct { mu: f64, epsilon: f64 },
    /// Pendulum product whose torus forcing grows like `|z_I|^s`:
    /// `H = |z_I|^mu + eps (1 + |z_I|^2)^{s/2} sum_i (cos(2 pi z_II,i) - 1)`, `0 <= s <= 1`.
    CoupledGrowthPendulum { mu: f64, epsilon: f64, s: f64 },
}

impl BuiltinSystem {
    pub fn tag(&self) -> &'static str {
        match self {
            BuiltinSystem::DecoupledPower { .. } => "decoupled_power",
            BuiltinSystem::PerturbedPendulumProduct { .. } => "perturbed_pendulum_product",
            BuiltinSystem::CoupledGrowthPendulum { .. } => "coupled_growth_pendulum",
        }
    }

    pub fn mu(&self) -> f64 {
        match *self {
            BuiltinSystem::DecoupledPower { mu }
            | BuiltinSystem::PerturbedPendulumProduct { mu, .. }
            | BuiltinSystem::CoupledGrowthPendulum { mu, .. } => mu,
        }
    }

    fn family(&self, layout: PhaseLayout) -> PendulumFamily {
        let (mu, eps, s) = match *self {
            BuiltinSystem::DecoupledPower { mu } => (mu, 0.0, 0.0),
            BuiltinSystem::PerturbedPendulumProduct { mu, epsilon } => (mu, epsilon, 0.0),
            BuiltinSystem::CoupledGrowthPendulum { mu, epsilon, s } => (mu, epsilon, s),
        };
        PendulumFamily { layout, mu, eps, s }
    }

    /// A radius beyond which the system is positive with margin.
    ///
    /// The decoupled law is homogeneous, so any radius works; a small one keeps
    /// `max_{|z_I| <= r} |H|` negligible.
    pub fn default_radius(&self, layout: PhaseLayout) -> f64 {
        let fam = self.family(layout);
        if fam.eps == 0.0 {
            return 1e-3;
        }
        let floor = 2.0 * fam.eps * layout.k() as f64;
        let mut r: f64 = 1.0;
        while r.powf(fam.mu) <= 1.2 * floor * fam.weight(r * r) {
            r *= 1.25;
        }
        r
    }

    pub fn build(&self, layout: PhaseLayout, r: Option<f64>) -> Result<HamiltonianModel> {
        let fam = self.family(layout);
        if fam.eps < 0.0 {
            return Err(Error::Parameter(format!("epsilon = {} must be >= 0", fam.eps)));
        }
        if !(0.0..=1.0).contains(&fam.s) {
            return Err(Error::Parameter(format!("s = {} must lie in [0, 1]", fam.s)));
        }
        let r = r.unwrap_or_else(|| self.default_radius(layout));
        let torus_growth = match self {
            BuiltinSystem::DecoupledPower { .. } => None,
            _ => {
                let bound = TWO_PI * fam.eps * layout.k() as f64;
                // (1 + x^2)^{s/2} <= 1 + x^s for s in [0, 1]
                (bound > 0.0).then_some(TorusGrowth {
                    a: bound,
                    b: bound,
                    s: fam.s,
                })
            }
        };
        let params = ModelParams {
            mu: fam.mu,
            r,
            torus_growth,
        };
        HamiltonianModel::new(self.tag(), params, Arc::new(fam))
    }
}

/// Largest violation of one hypothesis with the offending sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub amount: f64,
    pub sample: Vec<f64>,
}

impl Violation {
    fn none() -> Self {
        Self {
            amount: 0.0,
            sample: Vec::new(),
        }
    }

    fn record(&mut self, amount: f64, z: &[f64]) {
        if amount > self.amount || (amount.is_nan() && !self.amount.is_nan()) {
            self.amount = amount;
            self.sample = z.to_vec();
        }
    }
}

#[derive(Debug, Clone)]
pub struct HypothesisReport {
    pub samples: usize,
    pub radius: f64,
    /// Periodicity in `z_II` under integer translations.
    pub periodicity: Violation,
    /// Superquadratic condition on `|z_I| >= r`.
    pub superquadratic: Violation,
    /// Smallest relative slack `(z_I . H_{z_I} - mu H) / (1 + |H|)` seen on `|z_I| >= r`.
    pub superquadratic_min_slack: f64,
    pub torus_growth: Option<Violation>,
    pub passed: bool,
}

impl HypothesisReport {
    pub fn worst(&self) -> Option<(&'static str, &Violation)> {
        let mut all = vec![("periodicity", &self.periodicity), ("superquadratic", &self.superquadratic)];
        if let Some(v) = &self.torus_growth {
            all.push(("torus_growth", v));
        }
        all.into_iter()
            .filter(|(_, v)| !(v.amount <= HYPOTHESIS_TOLERANCE))
            .max_by(|a, b| a.1.amount.total_cmp(&b.1.amount))
    }
}

pub const HYPOTHESIS_TOLERANCE: f64 = 1e-9;

/// Samples `sample_count` quasi-random points with `|z_I| <= radius` and
/// `z_II` in the unit cell and records the worst violation of each hypothesis.
pub fn check_hypotheses(model: &HamiltonianModel, sample_count: usize, radius: f64) -> Result<HypothesisReport> {
    if sample_count == 0 {
        return Err(Error::Parameter("sample_count must be at least 1".into()));
    }
    let layout = model.layout();
    let d = layout.free_dim();
    let k = layout.k();
    let mu = model.mu();
    let r = model.r();

    let mut periodicity = Violation::none();
    let mut superquadratic = Violation::none();
    let mut torus_growth = model.torus_growth().map(|_| Violation::none());
    let mut min_slack = f64::INFINITY;
    let mut grad = vec![0.0; layout.dim()];

    for i in 0..sample_count {
        let u = halton(i as u64, d + 1 + k);
        let y: Vec<f64> = u[..d].iter().map(|c| 2.0 * c - 1.0).collect();
        let dir = unit_direction(&y).unwrap_or_else(|| {
            let mut e = vec![0.0; d];
            e[0] = 1.0;
            e
        });
        let rho = radius * u[d];
        let mut z = vec![0.0; layout.dim()];
        for (c, e) in dir.iter().enumerate() {
            z[c] = rho * e;
        }
        for (slot, q) in z[layout.torus_range()].iter_mut().zip(&u[d + 1..]) {
            *slot = *q;
        }

        let h = model.value(&z);
        model.gradient(&z, &mut grad);

        let mut shifted = z.clone();
        for (c, slot) in shifted[layout.torus_range()].iter_mut().enumerate() {
            *slot += ((i * (c + 3)) % 5) as f64 - 2.0;
        }
        let drift = (model.value(&shifted) - h).abs() / (1.0 + h.abs());
        periodicity.record(drift, &z);

        if rho >= r {
            let radial: f64 = layout
                .free_range()
                .map(|c| z[c] * grad[c])
                .sum();
            let slack = (radial - mu * h) / (1.0 + h.abs());
            min_slack = min_slack.min(slack);
            let amount = if h > 0.0 { (-slack).max(0.0) } else { 1.0 - h };
            superquadratic.record(amount, &z);
        }

        if let (Some(g), Some(v)) = (model.torus_growth(), torus_growth.as_mut()) {
            let torus_grad = layout
                .torus_range()
                .map(|c| grad[c] * grad[c])
                .sum::<f64>()
                .sqrt();
            let bound = g.a * rho.powf(g.s) + g.b;
            v.record(((torus_grad - bound) / (1.0 + bound)).max(0.0), &z);
        }
    }

    let passed = periodicity.amount <= HYPOTHESIS_TOLERANCE
        && superquadratic.amount <= HYPOTHESIS_TOLERANCE
        && torus_growth
            .as_ref()
            .is_none_or(|v| v.amount <= HYPOTHESIS_TOLERANCE);

    Ok(HypothesisReport {
        samples: sample_count,
        radius,
        periodicity,
        superquadratic,
        superquadratic_min_slack: min_slack,
        torus_growth,
        passed,
    })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime rotation vectors: nonzero, and either a single `±1` coordinate with the
/// others zero or some pair of coprime coordinates.
pub fn is_prime_rotation(v: &[i64]) -> bool {
    let nonzero: Vec<u64> = v.iter().filter(|&&c| c != 0).map(|c| c.unsigned_abs()).collect();
    match nonzero.len() {
        0 => false,
        1 => nonzero[0] == 1,
        _ => (0..v.len()).any(|i| {
            (i + 1..v.len()).any(|j| gcd(v[i].unsigned_abs(), v[j].unsigned_abs()) == 1)
        }),
    }
}
