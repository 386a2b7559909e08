//! Multi-start Newton search for critical points of `Phi_K`, symmetry
//! deduplication, and the acceptance filter.

use nalgebra::{DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimates::EstimateBundle;
use crate::functional::ActionProblem;
use crate::hamiltonian::Hamiltonian;
use crate::sampling::random_loop;
use crate::spectral::{mode_weight, FourierLoop, RotationVector, Subspace};
use crate::truncation::TruncatedHamiltonian;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub modes: usize,
    pub nodes: usize,
    pub max_iterations: usize,
    pub tol_g: f64,
    /// Extra starts of each random family.
    pub random_starts: usize,
    /// Points per torus axis for the offset grid.
    pub torus_grid: usize,
    pub dedup_tol: f64,
    pub theta_grid: usize,
    pub polish_steps: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            modes: 32,
            nodes: 129,
            max_iterations: 60,
            tol_g: 1e-9,
            random_starts: 4,
            torus_grid: 2,
            dedup_tol: 1e-4,
            theta_grid: 64,
            polish_steps: 3,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Uses `modes` and the smallest admissible node count `4M + 1`.
    pub fn with_modes(modes: usize) -> Self {
        Self {
            modes,
            nodes: 4 * modes + 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_g > 0.0) {
            return Err(Error::Parameter(format!("tol_g = {} must be positive", self.tol_g)));
        }
        if self.nodes < 4 * self.modes + 1 {
            return Err(Error::Parameter(format!(
                "{} nodes for {} modes; at least {} needed",
                self.nodes,
                self.modes,
                4 * self.modes + 1
            )));
        }
        if self.torus_grid == 0 || self.theta_grid == 0 {
            return Err(Error::Parameter("grid resolutions must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub x: FourierLoop,
    pub value: f64,
    pub grad_norm: f64,
    /// Canonical `Z^k` representative of `x`.
    pub symmetry_class: FourierLoop,
    /// `max_i |z_I(t_i)|` over the quadrature nodes.
    pub max_free_norm: f64,
    pub accepted: bool,
    pub start: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    TorusOffset,
    LinkingDirection,
    Perturbed,
}

#[derive(Debug, Clone)]
pub struct StartPoint {
    pub kind: StartKind,
    pub x: FourierLoop,
}

/// Boundedness diagnostics along one search.
#[derive(Debug, Clone, PartialEq)]
pub struct PSReport {
    pub norms: Vec<f64>,
    /// Log-scale fit of `|w_I^0| / ‖w‖^{1/mu}`.
    pub b_zero: f64,
    /// Log-scale fit of `‖w^±‖ / ‖w‖^{(mu-1)/mu}`.
    pub b_pm: f64,
    /// Largest `‖w‖ / (1 + ‖w‖^kappa)` after the first window.
    pub max_envelope_ratio: f64,
    pub diverging: bool,
}

const FIT_WINDOW: usize = 5;

fn geometric_mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((0.0, 0usize), |(s, c), v| (s + v.ln(), c + 1));
    if count == 0 {
        0.0
    } else {
        (sum / count as f64).exp()
    }
}

/// Fits the bounds `|w_I^0| <~ ‖w‖^{1/mu}` and `‖w^±‖ <~ ‖w‖^{(mu-1)/mu}` along a trace
/// and flags traces whose norm outgrows the envelope fitted on the first iterates.
pub fn ps_telemetry(trace: &[FourierLoop], mu: f64) -> PSReport {
    let mut norms = Vec::with_capacity(trace.len());
    let mut zero_ratio = Vec::new();
    let mut pm_ratio = Vec::new();
    for w in trace {
        let norm = w.norm();
        norms.push(norm);
        if norm > 0.0 {
            let w0 = w.project(Subspace::E0I).map_or(0.0, |p| p.norm());
            let plus = w.project(Subspace::Eplus).map_or(0.0, |p| p.norm());
            let minus = w.project(Subspace::Eminus).map_or(0.0, |p| p.norm());
            zero_ratio.push(w0 / norm.powf(1.0 / mu));
            pm_ratio.push(plus.max(minus) / norm.powf((mu - 1.0) / mu));
        }
    }
    let kappa = (1.0 / mu).max((mu - 1.0) / mu);
    let envelope: Vec<f64> = norms.iter().map(|n| n / (1.0 + n.powf(kappa))).collect();
    let window = FIT_WINDOW.min(envelope.len());
    let fitted = envelope[..window].iter().cloned().fold(0.0, f64::max);
    let later = envelope[window..].iter().cloned().fold(0.0, f64::max);
    let diverging = later > 10.0 * fitted.max(1.0) || norms.iter().any(|n| !n.is_finite());
    PSReport {
        norms,
        b_zero: geometric_mean(zero_ratio.into_iter()),
        b_pm: geometric_mean(pm_ratio.into_iter()),
        max_envelope_ratio: later,
        diverging,
    }
}

/// Result of one Newton search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub start: usize,
    pub kind: StartKind,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    pub x: FourierLoop,
    pub telemetry: PSReport,
}

fn scale_of(x: &FourierLoop) -> Vec<f64> {
    let d = x.layout().dim();
    x.mode_indices()
        .flat_map(|j| std::iter::repeat_n(mode_weight(j).sqrt(), d))
        .collect()
}

/// Newton iteration on the scaled gradient `sqrt(w) grad Phi`, whose Jacobian is symmetric.
///
/// A pseudo-inverse Newton step is tried first; when it fails to reduce the
/// residual, Levenberg-Marquardt steps with growing damping are tried.
pub fn newton_search<H: Hamiltonian>(
    problem: &ActionProblem<H>,
    x0: &FourierLoop,
    cfg: &SolverConfig,
) -> (FourierLoop, f64, usize, Vec<FourierLoop>) {
    let mut x = x0.with_modes(problem.modes());
    let sqrt_w = scale_of(&x);
    let residual = |x: &FourierLoop| -> DVector<f64> {
        let g = problem.gradient(x);
        DVector::from_iterator(sqrt_w.len(), g.coefficients().iter().zip(&sqrt_w).map(|(c, s)| c * s))
    };
    let step_to = |x: &FourierLoop, du: &DVector<f64>| -> FourierLoop {
        let mut y = x.clone();
        for ((c, d), s) in y.coefficients_mut().iter_mut().zip(du.iter()).zip(&sqrt_w) {
            *c += d / s;
        }
        y
    };

    let mut trace = vec![x.clone()];
    let mut r = residual(&x);
    let mut rn = r.norm();
    let mut polish = 0;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        if rn <= cfg.tol_g {
            if polish >= cfg.polish_steps {
                break;
            }
            polish += 1;
        }
        if !rn.is_finite() || x.norm() > 1e8 {
            break;
        }
        iterations += 1;
        let eig = SymmetricEigen::new(problem.scaled_jacobian(&x));
        let c = eig.eigenvectors.transpose() * &r;
        let lmax = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let cut = 1e-12 * lmax;

        let mut accepted = None;
        let newton_coeffs = DVector::from_iterator(
            c.len(),
            c.iter().zip(eig.eigenvalues.iter()).map(|(ci, li)| if li.abs() > cut { -ci / li } else { 0.0 }),
        );
        let newton = &eig.eigenvectors * newton_coeffs;
        for alpha in [1.0, 0.5, 0.25] {
            let y = step_to(&x, &(&newton * alpha));
            let ry = residual(&y);
            if ry.norm() < rn {
                accepted = Some((y, ry));
                break;
            }
        }
        if accepted.is_none() {
            for damping in [1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2] {
                let mu = damping * lmax * lmax;
                let coeffs = DVector::from_iterator(
                    c.len(),
                    c.iter().zip(eig.eigenvalues.iter()).map(|(ci, li)| -li * ci / (li * li + mu)),
                );
                let y = step_to(&x, &(&eig.eigenvectors * coeffs));
                let ry = residual(&y);
                if ry.norm() < rn {
                    accepted = Some((y, ry));
                    break;
                }
            }
        }
        match accepted {
            Some((y, ry)) => {
                x = y;
                r = ry;
                rn = r.norm();
                trace.push(x.clone());
            }
            None => break,
        }
    }
    (x, rn, iterations, trace)
}

/// Solves the averaged `z_I` equation of a constant loop with torus mean `theta`.
fn constant_start<H: Hamiltonian>(problem: &ActionProblem<H>, theta: &[f64], mu: f64) -> FourierLoop {
    let layout = problem.layout();
    let modes = problem.modes();
    let free = layout.free_range();
    let jv_free: Vec<f64> = free.clone().map(|c| problem.j_shift()[c]).collect();
    let drive = jv_free.iter().map(|c| c * c).sum::<f64>().sqrt();
    let mut xi0 = layout.embed_torus(theta);
    if drive > 0.0 {
        let radius = (drive / (mu * problem.period())).powf(1.0 / (mu - 1.0));
        for (i, c) in free.clone().enumerate() {
            xi0[c] = -radius * jv_free[i] / drive;
        }
    }
    let guess = xi0.clone();
    let eval = |xi: &[f64]| -> Vec<f64> {
        let x = FourierLoop::constant(layout, modes, xi).expect("layout-sized mean");
        let g = problem.gradient(&x);
        free.clone().map(|c| g.mean()[c]).collect()
    };
    let d = layout.free_dim();
    for _ in 0..30 {
        let f = eval(&xi0);
        let fnorm = f.iter().map(|c| c * c).sum::<f64>().sqrt();
        if fnorm < 1e-12 {
            break;
        }
        let mut jac = nalgebra::DMatrix::<f64>::zeros(d, d);
        for b in 0..d {
            let h = 1e-7 * (1.0 + xi0[b].abs());
            let mut xp = xi0.clone();
            xp[b] += h;
            let fp = eval(&xp);
            for a in 0..d {
                jac[(a, b)] = (fp[a] - f[a]) / h;
            }
        }
        let Some(step) = jac.lu().solve(&DVector::from_vec(f)) else {
            break;
        };
        for b in 0..d {
            xi0[b] -= step[b];
        }
        if !xi0.iter().all(|c| c.is_finite()) {
            xi0 = guess.clone();
            break;
        }
    }
    FourierLoop::constant(layout, modes, &xi0).expect("layout-sized mean")
}

/// Torus offsets on the diagonal and on a uniform grid, random linking-space
/// directions at `r_link / 2`, and perturbed constant loops.
pub fn start_points<H: Hamiltonian>(
    problem: &ActionProblem<H>,
    cfg: &SolverConfig,
    mu: f64,
    r_link: f64,
) -> Result<Vec<StartPoint>> {
    let layout = problem.layout();
    let k = layout.k();
    let mut offsets: Vec<Vec<f64>> = (0..=k).map(|m| vec![m as f64 / (k + 1) as f64; k]).collect();
    let g = cfg.torus_grid;
    for idx in 0..g.pow(k as u32) {
        let mut rest = idx;
        let theta: Vec<f64> = (0..k)
            .map(|_| {
                let c = rest % g;
                rest /= g;
                c as f64 / g as f64
            })
            .collect();
        if !offsets.iter().any(|o| o == &theta) {
            offsets.push(theta);
        }
    }

    let mut starts: Vec<StartPoint> = offsets
        .iter()
        .map(|theta| StartPoint {
            kind: StartKind::TorusOffset,
            x: constant_start(problem, theta, mu),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x_space = Subspace::linking_space(&layout).ok();
    for _ in 0..cfg.random_starts {
        let theta: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        if let Some(space) = x_space {
            let mut w = random_loop(layout, problem.modes(), 1.0, &mut rng).project(space)?;
            let norm = w.norm();
            if norm > 0.0 {
                w = w.scaled(0.5 * r_link / norm);
            }
            for (m, t) in w.mode_mut(0)[layout.torus_range()].iter_mut().zip(&theta) {
                *m += t;
            }
            starts.push(StartPoint {
                kind: StartKind::LinkingDirection,
                x: w,
            });
        }
    }
    let base_count = starts.iter().filter(|s| s.kind == StartKind::TorusOffset).count();
    for i in 0..cfg.random_starts {
        let base = &starts[i % base_count].x;
        let amp = 0.05 * (1.0 + base.norm());
        let noise = random_loop(layout, problem.modes(), amp, &mut rng);
        starts.push(StartPoint {
            kind: StartKind::Perturbed,
            x: base.add(&noise)?,
        });
    }
    Ok(starts)
}

fn max_free_norm<H: Hamiltonian>(problem: &ActionProblem<H>, x: &FourierLoop) -> f64 {
    let layout = problem.layout();
    let d = layout.dim();
    problem
        .node_states(x)
        .chunks_exact(d)
        .map(|z| layout.free_norm(z))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Converged points, before deduplication, in start order.
    pub points: Vec<CriticalPoint>,
    pub outcomes: Vec<SearchOutcome>,
}

impl SolveReport {
    pub fn converged(&self) -> usize {
        self.points.len()
    }
}

/// Runs [`newton_search`] from every start in parallel; results are in start order
/// and independent of the thread count.
pub fn solve_multistart<H: Hamiltonian>(
    problem: &ActionProblem<H>,
    cfg: &SolverConfig,
    mu: f64,
    r_link: f64,
) -> Result<SolveReport> {
    cfg.validate()?;
    if problem.modes() != cfg.modes {
        return Err(Error::Parameter(format!(
            "problem uses {} modes, configuration {}",
            problem.modes(),
            cfg.modes
        )));
    }
    let starts = start_points(problem, cfg, mu, r_link)?;
    let outcomes: Vec<SearchOutcome> = starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let (x, grad_norm, iterations, trace) = newton_search(problem, &s.x, cfg);
            SearchOutcome {
                start: i,
                kind: s.kind,
                converged: grad_norm <= cfg.tol_g,
                iterations,
                grad_norm,
                x,
                telemetry: ps_telemetry(&trace, mu),
            }
        })
        .collect();
    let points = outcomes
        .iter()
        .filter(|o| o.converged)
        .map(|o| CriticalPoint {
            value: problem.phi(&o.x),
            grad_norm: o.grad_norm,
            symmetry_class: o.x.canonicalize(),
            max_free_norm: max_free_norm(problem, &o.x),
            accepted: false,
            start: o.start,
            iterations: o.iterations,
            x: o.x.clone(),
        })
        .collect();
    Ok(SolveReport { points, outcomes })
}

fn lexicographic(a: &FourierLoop, b: &FourierLoop) -> std::cmp::Ordering {
    a.coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// One representative per `S^1 x Z^k` orbit: smallest value, then lexicographically
/// smallest canonical coefficients.
pub fn dedupe(points: &[CriticalPoint], v: &RotationVector, tol: f64, theta_grid: usize) -> Vec<CriticalPoint> {
    let mut sorted: Vec<&CriticalPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| lexicographic(&a.symmetry_class, &b.symmetry_class))
    });
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in sorted {
        let duplicate = kept.iter().any(|q| {
            q.x.quotient_distance(&p.x, v, theta_grid)
                .map(|d| d <= tol)
                .unwrap_or(false)
        });
        if !duplicate {
            kept.push(p.clone());
        }
    }
    kept
}

/// Marks points with value at most `gamma` whose `z_I` stays within the a priori
/// bound and inside the untruncated region.
pub fn accept_filter(points: &[CriticalPoint], bundle: &EstimateBundle, hk: &TruncatedHamiltonian) -> Vec<CriticalPoint> {
    let bound = bundle.apriori_bound().min(hk.cutoff().k1());
    points
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.accepted = p.value <= bundle.gamma && p.max_free_norm <= bound;
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{BuiltinSystem, HamiltonianModel};
    use crate::spectral::PhaseLayout;

    fn decoupled_problem(mu: f64, period: f64, modes: usize) -> ActionProblem<HamiltonianModel> {
        let m = BuiltinSystem::DecoupledPower { mu }
            .build(PhaseLayout::new(1, 1).unwrap(), None)
            .unwrap();
        ActionProblem::new(m, period, RotationVector::new(vec![1]), modes, 4 * modes + 1).unwrap()
    }

    #[test]
    fn constant_start_solves_decoupled_mean_equation() {
        let p = decoupled_problem(3.0, 1.0, 4);
        let x = constant_start(&p, &[0.3], 3.0);
        assert!((x.mean()[0] - (1.0f64 / 3.0).sqrt()).abs() < 1e-10);
        assert_eq!(x.mean()[1], 0.3);
    }

    #[test]
    fn newton_converges_from_perturbed_loop() {
        let p = decoupled_problem(2.0, 1.0, 6);
        let cfg = SolverConfig::with_modes(6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let start = FourierLoop::constant(p.layout(), 6, &[0.45, 0.1])
            .unwrap()
            .add(&random_loop(p.layout(), 6, 0.02, &mut rng))
            .unwrap();
        let (x, g, _, _) = newton_search(&p, &start, &cfg);
        assert!(g <= 1e-9, "residual {g}");
        assert!((x.mean()[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn telemetry_flags_growth_only() {
        let layout = PhaseLayout::new(1, 1).unwrap();
        let base = FourierLoop::generator(layout, 2, -1, 0).unwrap();
        let steady: Vec<_> = (0..10).map(|_| base.clone()).collect();
        assert!(!ps_telemetry(&steady, 2.0).diverging);
        let growing: Vec<_> = (0..20).map(|m| base.scaled(2f64.powi(m))).collect();
        assert!(ps_telemetry(&growing, 2.0).diverging);
    }

    #[test]
    fn telemetry_fit_is_scale_covariant() {
        let layout = PhaseLayout::new(1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trace: Vec<_> = (0..6).map(|_| random_loop(layout, 3, 1.0, &mut rng)).collect();
        let doubled: Vec<_> = trace.iter().map(|x| x.scaled(2.0)).collect();
        let (a, b) = (ps_telemetry(&trace, 1.5), ps_telemetry(&doubled, 1.5));
        assert!((b.b_zero / a.b_zero - 2f64.powf(1.0 - 1.0 / 1.5)).abs() < 1e-12);
        assert!((b.b_pm / a.b_pm - 2f64.powf(1.0 / 1.5)).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            nodes: 10,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
