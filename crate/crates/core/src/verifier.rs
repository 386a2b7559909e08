//! Independent checks of computed loops: back-transformation to orbits,
//! RK4 shooting of the original flow, and the collocation residual.

use crate::error::{Error, Result};
use crate::functional::{apply_j, ActionProblem};
use crate::hamiltonian::Hamiltonian;
use crate::spectral::{FourierLoop, RotationVector};

/// An orbit `z(T t) = x(t) + t (0, v)` sampled on a uniform grid of `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSolution {
    pub z0: Vec<f64>,
    pub period: f64,
    pub v: RotationVector,
    /// Physical times `T t_i`.
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
    /// `‖z(T) - z(0) - (0, v)‖` of the sampled trajectory.
    pub boundary_residual: f64,
    pub collocation_residual: Option<f64>,
    pub shooting: Option<ShotReport>,
    pub critical_value: Option<f64>,
}

impl OrbitSolution {
    /// `z_I` of every sample is within `tol` of the first sample.
    pub fn free_part_constant(&self, tol: f64) -> bool {
        let n_free = self.z0.len() - self.v.len();
        self.trajectory
            .iter()
            .all(|z| (0..n_free).all(|c| (z[c] - self.z0[c]).abs() <= tol))
    }
}

fn boundary_gap(z0: &[f64], z1: &[f64], v: &RotationVector) -> f64 {
    let offset = z0.len() - v.len();
    z0.iter()
        .zip(z1)
        .enumerate()
        .map(|(c, (a, b))| {
            let shift = if c >= offset { v.components()[c - offset] as f64 } else { 0.0 };
            (b - a - shift).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

pub fn back_transform(x: &FourierLoop, period: f64, v: &RotationVector, samples: usize) -> Result<OrbitSolution> {
    let layout = x.layout();
    if v.len() != layout.k() {
        return Err(Error::Structure(format!(
            "rotation vector of length {} for k = {}",
            v.len(),
            layout.k()
        )));
    }
    let samples = samples.max(1);
    let shift = layout.embed_torus(&v.as_f64());
    let mut times = Vec::with_capacity(samples + 1);
    let mut trajectory = Vec::with_capacity(samples + 1);
    for i in 0..=samples {
        let t = i as f64 / samples as f64;
        // evaluate reduces t modulo 1, which is exact at t = 1
        let mut z = x.evaluate(t);
        for (zc, sc) in z.iter_mut().zip(&shift) {
            *zc += t * sc;
        }
        times.push(period * t);
        trajectory.push(z);
    }
    let boundary_residual = boundary_gap(&trajectory[0], &trajectory[samples], v);
    Ok(OrbitSolution {
        z0: trajectory[0].clone(),
        period,
        v: v.clone(),
        times,
        trajectory,
        boundary_residual,
        collocation_residual: None,
        shooting: None,
        critical_value: None,
    })
}

/// Outcome of integrating `z' = J H'(z)` over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotReport {
    pub residual: f64,
    pub steps: usize,
    pub final_state: Vec<f64>,
    /// `|H(z(T)) - H(z(0))|`.
    pub energy_drift: f64,
    /// `round(z_II(T) - z_II(0))`.
    pub winding: Vec<i64>,
    pub winding_matches: bool,
}

const MAX_STEPS: usize = 1 << 20;

fn rk4<H: Hamiltonian + ?Sized>(h: &H, z0: &[f64], period: f64, steps: usize, escape: f64) -> Result<Vec<f64>> {
    let layout = h.layout();
    let dt = period / steps as f64;
    let d = z0.len();
    let field = |z: &[f64]| apply_j(&h.grad(z));
    let mut z = z0.to_vec();
    let mut tmp = vec![0.0; d];
    for step in 0..steps {
        let k1 = field(&z);
        for c in 0..d {
            tmp[c] = z[c] + 0.5 * dt * k1[c];
        }
        let k2 = field(&tmp);
        for c in 0..d {
            tmp[c] = z[c] + 0.5 * dt * k2[c];
        }
        let k3 = field(&tmp);
        for c in 0..d {
            tmp[c] = z[c] + dt * k3[c];
        }
        let k4 = field(&tmp);
        for c in 0..d {
            z[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        if !(layout.free_norm(&z) <= escape) {
            return Err(Error::Divergence {
                limit: escape,
                time: (step + 1) as f64 * dt,
            });
        }
    }
    Ok(z)
}

/// Integrates from `z0` with classical RK4, doubling the step count until the
/// boundary residual changes by less than `1e-10`.
pub fn shoot_and_check<H: Hamiltonian + ?Sized>(
    h: &H,
    z0: &[f64],
    period: f64,
    v: &RotationVector,
    steps: usize,
    escape: f64,
) -> Result<ShotReport> {
    if steps < 100 {
        return Err(Error::Parameter(format!("{steps} steps; at least 100 needed")));
    }
    if v.len() != h.layout().k() {
        return Err(Error::Structure("rotation vector length differs from k".into()));
    }
    let mut steps = steps;
    let mut end = rk4(h, z0, period, steps, escape)?;
    let mut residual = boundary_gap(z0, &end, v);
    while steps < MAX_STEPS {
        let finer = rk4(h, z0, period, 2 * steps, escape)?;
        let r = boundary_gap(z0, &finer, v);
        steps *= 2;
        let change = (r - residual).abs();
        end = finer;
        residual = r;
        if change < 1e-10 {
            break;
        }
    }
    let layout = h.layout();
    let winding: Vec<i64> = layout
        .torus_range()
        .map(|c| (end[c] - z0[c]).round() as i64)
        .collect();
    Ok(ShotReport {
        residual,
        steps,
        energy_drift: (h.value(&end) - h.value(z0)).abs(),
        winding_matches: winding == v.components(),
        winding,
        final_state: end,
    })
}

/// Collocation residual of `x` for the problem's own Hamiltonian.
pub fn collocation_residual<H: Hamiltonian>(problem: &ActionProblem<H>, x: &FourierLoop) -> f64 {
    problem.collocation_residual(x)
}

/// Back-transforms `x` and fills in the collocation residual for `original`
/// (the untruncated Hamiltonian) and an RK4 shot from `z(0)`.
pub fn verify_loop<H: Hamiltonian + Clone>(
    problem: &ActionProblem<H>,
    x: &FourierLoop,
    samples: usize,
    steps: usize,
    escape: f64,
) -> Result<OrbitSolution> {
    let mut orbit = back_transform(x, problem.period(), problem.rotation(), samples)?;
    orbit.collocation_residual = Some(problem.collocation_residual(x));
    orbit.shooting = Some(shoot_and_check(
        problem.hamiltonian(),
        &orbit.z0,
        problem.period(),
        problem.rotation(),
        steps,
        escape,
    )?);
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::BuiltinSystem;
    use crate::spectral::PhaseLayout;

    fn decoupled() -> crate::hamiltonian::HamiltonianModel {
        BuiltinSystem::DecoupledPower { mu: 2.0 }
            .build(PhaseLayout::new(1, 1).unwrap(), None)
            .unwrap()
    }

    #[test]
    fn shooting_examples() {
        let m = decoupled();
        let v = RotationVector::new(vec![1]);
        let exact = shoot_and_check(&m, &[0.5, 0.0], 1.0, &v, 1000, 100.0).unwrap();
        assert!(exact.residual <= 1e-10);
        assert!(exact.energy_drift <= 1e-12);
        assert!(exact.winding_matches);
        let off = shoot_and_check(&m, &[0.4, 0.0], 1.0, &v, 1000, 100.0).unwrap();
        assert!((off.residual - 0.2).abs() < 1e-10);
        assert!(shoot_and_check(&m, &[0.4, 0.0], 1.0, &v, 50, 100.0).is_err());
    }

    #[test]
    fn escape_is_reported() {
        let m = decoupled();
        let v = RotationVector::new(vec![1]);
        // the free coordinate is conserved, so start outside the escape radius
        let err = shoot_and_check(&m, &[5.0, 0.0], 1.0, &v, 100, 1.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn back_transform_of_closed_form_orbit() {
        let layout = PhaseLayout::new(1, 1).unwrap();
        let x = FourierLoop::constant(layout, 4, &[0.5, 0.25]).unwrap();
        let v = RotationVector::new(vec![1]);
        let orbit = back_transform(&x, 2.0, &v, 10).unwrap();
        assert_eq!(orbit.z0, vec![0.5, 0.25]);
        assert!(orbit.boundary_residual < 1e-15);
        assert!(orbit.free_part_constant(1e-15));
        assert!((orbit.trajectory[5][1] - 0.75).abs() < 1e-15);
        assert_eq!(orbit.times[10], 2.0);
    }
}
