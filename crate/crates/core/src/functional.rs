//! The action functional `Phi_K(x) = A(x) - B_K(x)` on truncated Fourier loops.
//!
//! `B_K` is integrated with the uniform trapezoid rule on `N >= 4M + 1` nodes;
//! its linear part `x . J(0, v)` only sees the mean and is taken exactly.

use std::borrow::Cow;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::sampling::{maximize_in_box, random_loop};
use crate::spectral::{mode_weight, FourierLoop, PhaseLayout, RotationVector, Subspace, TWO_PI};
use crate::truncation::{TruncatedHamiltonian, SAFETY_MARGIN};

/// Uniform nodes `t_i = i / N` with a table of `exp(2 pi r / N J)` for every residue `r`.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    modes: usize,
    nodes: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(modes: usize, nodes: usize) -> Result<Self> {
        if nodes < 4 * modes + 1 {
            return Err(Error::Parameter(format!(
                "{nodes} quadrature nodes for {modes} modes; at least {} needed",
                4 * modes + 1
            )));
        }
        let (sin, cos) = (0..nodes)
            .map(|r| (TWO_PI * r as f64 / nodes as f64).sin_cos())
            .unzip();
        Ok(Self {
            modes,
            nodes,
            cos,
            sin,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.nodes as f64
    }

    /// `(cos, sin)` of `2 pi j t_i`.
    #[inline]
    fn phase(&self, j: i64, i: usize) -> (f64, f64) {
        let r = (j * i as i64).rem_euclid(self.nodes as i64) as usize;
        (self.cos[r], self.sin[r])
    }

    /// `x(t_i)` for all nodes, row-major `N x 2n`.
    pub fn evaluate(&self, x: &FourierLoop) -> Vec<f64> {
        let layout = x.layout();
        let (n, d) = (layout.n(), layout.dim());
        let mut out = vec![0.0; self.nodes * d];
        for i in 0..self.nodes {
            let row = &mut out[i * d..(i + 1) * d];
            for j in x.mode_indices() {
                let (c, s) = self.phase(j, i);
                let xi = x.mode(j);
                for a in 0..n {
                    row[a] += xi[a] * c - xi[a + n] * s;
                    row[a + n] += xi[a + n] * c + xi[a] * s;
                }
            }
        }
        out
    }

    /// Coefficients `(1/N) sum_i exp(-2 pi j t_i J) g_i` for `|j| <= M`.
    pub fn project(&self, layout: PhaseLayout, g: &[f64]) -> FourierLoop {
        let (n, d) = (layout.n(), layout.dim());
        let mut out = FourierLoop::zeros(layout, self.modes);
        let inv = 1.0 / self.nodes as f64;
        for j in out.mode_indices() {
            let block = out.mode_mut(j);
            for i in 0..self.nodes {
                let (c, s) = self.phase(j, i);
                let row = &g[i * d..(i + 1) * d];
                for a in 0..n {
                    block[a] += inv * (row[a] * c + row[a + n] * s);
                    block[a + n] += inv * (row[a + n] * c - row[a] * s);
                }
            }
        }
        out
    }
}

/// `A(x) = (1/2)(‖x+‖² - ‖x-‖²)`.
pub fn action_a(x: &FourierLoop) -> f64 {
    x.mode_indices()
        .filter(|&j| j != 0)
        .map(|j| {
            let sq: f64 = x.mode(j).iter().map(|c| c * c).sum();
            0.5 * (j.signum() as f64) * mode_weight(j) * sq
        })
        .sum()
}

/// The boundary value problem `x' + (0, v) = T J H'(x + t(0, v))` in variational form.
#[derive(Debug, Clone)]
pub struct ActionProblem<H: Hamiltonian = TruncatedHamiltonian> {
    h: H,
    period: f64,
    v: RotationVector,
    grid: SpectralGrid,
    layout: PhaseLayout,
    shift: Vec<f64>,
    jv: Vec<f64>,
}

/// `J z` with `z = (p, q)`, `J (p, q) = (-q, p)`.
pub fn apply_j(z: &[f64]) -> Vec<f64> {
    let n = z.len() / 2;
    let mut out = vec![0.0; z.len()];
    for i in 0..n {
        out[i] = -z[i + n];
        out[i + n] = z[i];
    }
    out
}

impl<H: Hamiltonian> ActionProblem<H> {
    pub fn new(h: H, period: f64, v: RotationVector, modes: usize, nodes: usize) -> Result<Self> {
        let layout = h.layout();
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Parameter(format!("period T = {period} must be positive")));
        }
        if v.len() != layout.k() {
            return Err(Error::Structure(format!(
                "rotation vector of length {} for k = {}",
                v.len(),
                layout.k()
            )));
        }
        if !v.is_prime() {
            return Err(Error::NotPrime(v.components().to_vec()));
        }
        let grid = SpectralGrid::new(modes, nodes)?;
        let shift = layout.embed_torus(&v.as_f64());
        let jv = apply_j(&shift);
        Ok(Self {
            h,
            period,
            v,
            grid,
            layout,
            shift,
            jv,
        })
    }

    pub fn hamiltonian(&self) -> &H {
        &self.h
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn rotation(&self) -> &RotationVector {
        &self.v
    }

    pub fn layout(&self) -> PhaseLayout {
        self.layout
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.grid.modes()
    }

    /// `(0, v)` as a phase-space vector.
    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// `J(0, v)`.
    pub fn j_shift(&self) -> &[f64] {
        &self.jv
    }

    /// Same problem with another Hamiltonian, e.g. the untruncated one.
    pub fn with_hamiltonian<G: Hamiltonian>(&self, g: G) -> Result<ActionProblem<G>> {
        ActionProblem::new(g, self.period, self.v.clone(), self.grid.modes(), self.grid.nodes())
    }

    fn fit<'a>(&self, x: &'a FourierLoop) -> Cow<'a, FourierLoop> {
        if x.modes() == self.grid.modes() {
            Cow::Borrowed(x)
        } else {
            Cow::Owned(x.with_modes(self.grid.modes()))
        }
    }

    /// States `x(t_i) + t_i (0, v)`, row-major `N x 2n`.
    pub fn node_states(&self, x: &FourierLoop) -> Vec<f64> {
        let x = self.fit(x);
        let d = self.layout.dim();
        let mut z = self.grid.evaluate(&x);
        for i in 0..self.grid.nodes() {
            let t = self.grid.time(i);
            for (zc, sc) in z[i * d..(i + 1) * d].iter_mut().zip(&self.shift) {
                *zc += t * sc;
            }
        }
        z
    }

    pub fn action(&self, x: &FourierLoop) -> f64 {
        action_a(x)
    }

    /// `B_K(x) = int_0^1 [T H_K(x + t(0, v)) + x . J(0, v)] dt`.
    pub fn nonlinear(&self, x: &FourierLoop) -> f64 {
        let x = self.fit(x);
        let d = self.layout.dim();
        let z = self.node_states(&x);
        let energy: f64 = z.chunks_exact(d).map(|zi| self.h.value(zi)).sum();
        let linear: f64 = x.mean().iter().zip(&self.jv).map(|(a, b)| a * b).sum();
        self.period * energy / self.grid.nodes() as f64 + linear
    }

    pub fn phi(&self, x: &FourierLoop) -> f64 {
        self.action(x) - self.nonlinear(x)
    }

    /// Riesz representative of `Phi_K'(x)` in the `W^{1/2,2}` inner product.
    pub fn gradient(&self, x: &FourierLoop) -> FourierLoop {
        let x = self.fit(x);
        let d = self.layout.dim();
        let z = self.node_states(&x);
        let mut g = vec![0.0; z.len()];
        for (zi, gi) in z.chunks_exact(d).zip(g.chunks_exact_mut(d)) {
            self.h.gradient(zi, gi);
            for (gc, jc) in gi.iter_mut().zip(&self.jv) {
                *gc = self.period * *gc + jc;
            }
        }
        let ghat = self.grid.project(self.layout, &g);
        let mut out = FourierLoop::zeros(self.layout, self.grid.modes());
        for j in out.mode_indices() {
            let w = mode_weight(j);
            let sign = j.signum() as f64;
            let (xi, gh) = (x.mode(j), ghat.mode(j));
            for (c, o) in out.mode_mut(j).iter_mut().enumerate() {
                *o = sign * xi[c] - gh[c] / w;
            }
        }
        out
    }

    /// Jacobian of the scaled residual `r = sqrt(w) grad` in the scaled unknowns
    /// `u = sqrt(w) xi`, ordered as the loop coefficients. Symmetric.
    pub fn scaled_jacobian(&self, x: &FourierLoop) -> DMatrix<f64> {
        let x = self.fit(x);
        let (n, d) = (self.layout.n(), self.layout.dim());
        let modes = self.grid.modes() as i64;
        let size = (2 * modes as usize + 1) * d;
        let z = self.node_states(&x);
        let inv_sqrt_w: Vec<f64> = (-modes..=modes)
            .flat_map(|j| std::iter::repeat_n(1.0 / mode_weight(j).sqrt(), d))
            .collect();

        let mut jac = DMatrix::<f64>::zeros(size, size);
        for (a, j) in (-modes..=modes).flat_map(|j| std::iter::repeat_n(j, d)).enumerate() {
            jac[(a, a)] = j.signum() as f64;
        }

        let mut hess = vec![0.0; d * d];
        let mut basis = DMatrix::<f64>::zeros(d, size);
        let scale = -self.period / self.grid.nodes() as f64;
        for i in 0..self.grid.nodes() {
            self.h.hessian(&z[i * d..(i + 1) * d], &mut hess);
            basis.fill(0.0);
            for (jm, j) in (-modes..=modes).enumerate() {
                let (c, s) = self.grid.phase(j, i);
                for a in 0..n {
                    let col_p = jm * d + a;
                    let col_q = jm * d + a + n;
                    basis[(a, col_p)] = c * inv_sqrt_w[col_p];
                    basis[(a + n, col_p)] = s * inv_sqrt_w[col_p];
                    basis[(a, col_q)] = -s * inv_sqrt_w[col_q];
                    basis[(a + n, col_q)] = c * inv_sqrt_w[col_q];
                }
            }
            let h = DMatrix::from_row_slice(d, d, &hess);
            let hb = &h * &basis;
            jac.gemm_tr(scale, &basis, &hb, 1.0);
        }
        jac
    }

    /// `max_i |x'(t_i) + (0, v) - T J H'(x(t_i) + t_i (0, v))|`.
    pub fn collocation_residual(&self, x: &FourierLoop) -> f64 {
        let x = self.fit(x);
        let d = self.layout.dim();
        let z = self.node_states(&x);
        let mut g = vec![0.0; d];
        let mut worst: f64 = 0.0;
        for i in 0..self.grid.nodes() {
            let zi = &z[i * d..(i + 1) * d];
            self.h.gradient(zi, &mut g);
            let jg = apply_j(&g);
            let xdot = x.derivative(self.grid.time(i));
            let r = (0..d)
                .map(|c| (xdot[c] + self.shift[c] - self.period * jg[c]).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    /// The certified lower bound `beta = -T max H(0, .)` on the `Y x T^k` side,
    /// with the safety margin applied to the sampled maximum.
    pub fn beta_bound(&self, samples: usize) -> f64 {
        let k = self.layout.k();
        let lo = vec![0.0; k];
        let hi = vec![1.0; k];
        let dim = self.layout.dim();
        let layout = self.layout;
        let best = maximize_in_box(
            |q| {
                let mut z = vec![0.0; dim];
                z[layout.torus_range()].copy_from_slice(q);
                self.h.value(&z)
            },
            &lo,
            &hi,
            samples,
        );
        -self.period * (best.value + SAFETY_MARGIN * best.value.abs())
    }

    /// Sampled linking geometry: `inf Phi_K` on `Y x T^k` and `sup Phi_K` on `∂Q x T^k`.
    pub fn check_linking_conditions(&self, radius: f64, samples: usize, seed: u64) -> Result<LinkingReport> {
        if !(radius > 0.0) {
            return Err(Error::Parameter(format!("linking radius {radius} must be positive")));
        }
        let x_space = Subspace::linking_space(&self.layout)?;
        let modes = self.grid.modes();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alpha_hat = f64::NEG_INFINITY;
        let mut beta_hat = f64::INFINITY;
        for _ in 0..samples.max(1) {
            let theta: Vec<f64> = (0..self.layout.k()).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let torus = self.layout.embed_torus(&theta);

            let mut y = random_loop(self.layout, modes, 1.0, &mut rng).project(Subspace::Y)?;
            let amp: f64 = rand::Rng::random_range(&mut rng, 0.0..3.0);
            let norm = y.norm();
            if norm > 0.0 {
                y = y.scaled(amp / norm);
            }
            add_mean(&mut y, &torus);
            beta_hat = beta_hat.min(self.phi(&y));

            let mut w = random_loop(self.layout, modes, 1.0, &mut rng).project(x_space)?;
            let norm = w.norm();
            if norm == 0.0 {
                continue;
            }
            w = w.scaled(radius / norm);
            add_mean(&mut w, &torus);
            alpha_hat = alpha_hat.max(self.phi(&w));
        }
        Ok(LinkingReport {
            radius,
            alpha_hat,
            beta_hat,
            beta_bound: self.beta_bound(256),
            satisfied: alpha_hat < beta_hat,
        })
    }
}

fn add_mean(x: &mut FourierLoop, offset: &[f64]) {
    for (m, o) in x.mode_mut(0).iter_mut().zip(offset) {
        *m += o;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkingReport {
    pub radius: f64,
    /// Sampled `sup` of `Phi_K` over `∂Q x T^k`.
    pub alpha_hat: f64,
    /// Sampled `inf` of `Phi_K` over `Y x T^k`.
    pub beta_hat: f64,
    pub beta_bound: f64,
    pub satisfied: bool,
}
