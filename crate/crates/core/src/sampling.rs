//! Sampling and scalar search helpers shared by the constant estimators.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::spectral::{FourierLoop, PhaseLayout};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Point `index` of the Halton sequence in `[0, 1)^dim` (`dim <= 16`).
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton dimension {dim} unsupported");
    PRIMES[..dim].iter().map(|&b| radical_inverse(index + 1, b)).collect()
}

/// Result of a box-constrained search.
#[derive(Debug, Clone)]
pub struct BoxOptimum {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Maximizes `f` over the box `[lower, upper]` by quasi-random sampling followed
/// by compass search from the best few samples.
pub fn maximize_in_box<F>(f: F, lower: &[f64], upper: &[f64], samples: usize) -> BoxOptimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = lower.len();
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
    let to_box = |u: &[f64]| -> Vec<f64> {
        u.iter().zip(lower).zip(&width).map(|((s, l), w)| l + s * w).collect()
    };

    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(samples + 2);
    // include both corners so plateaus on the boundary are seen exactly
    scored.push((f(lower), lower.to_vec()));
    scored.push((f(upper), upper.to_vec()));
    for i in 0..samples as u64 {
        let p = to_box(&halton(i, dim));
        let v = f(&p);
        scored.push((v, p));
    }
    scored.retain(|(v, _)| v.is_finite());
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(8);

    let mut best = BoxOptimum {
        point: lower.to_vec(),
        value: f64::NEG_INFINITY,
    };
    for (value, point) in scored {
        let (p, v) = compass_search(&f, point, value, lower, upper, &width);
        if v > best.value {
            best = BoxOptimum { point: p, value: v };
        }
    }
    best
}

pub fn minimize_in_box<F>(f: F, lower: &[f64], upper: &[f64], samples: usize) -> BoxOptimum
where
    F: Fn(&[f64]) -> f64,
{
    let opt = maximize_in_box(|p| -f(p), lower, upper, samples);
    BoxOptimum {
        point: opt.point,
        value: -opt.value,
    }
}

fn compass_search<F>(
    f: &F,
    mut point: Vec<f64>,
    mut value: f64,
    lower: &[f64],
    upper: &[f64],
    width: &[f64],
) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut step = 0.05;
    while step > 1e-10 {
        let mut improved = false;
        for d in 0..point.len() {
            for dir in [1.0, -1.0] {
                let mut trial = point.clone();
                trial[d] = (trial[d] + dir * step * width[d]).clamp(lower[d], upper[d]);
                let v = f(&trial);
                if v > value {
                    point = trial;
                    value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (point, value)
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`; returns `(x, f(x))`.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx <= fc.min(fd) {
        (x, fx)
    } else if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]` (`f(lo)` and `f(hi)` of opposite sign).
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maps a direction parameter in `[-1, 1]^d` to the unit sphere (`None` at the origin).
pub fn unit_direction(y: &[f64]) -> Option<Vec<f64>> {
    let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
    (norm > 1e-12).then(|| y.iter().map(|c| c / norm).collect())
}

/// Maps a parameter in `[-1, 1]^d` into the closed unit ball.
pub fn into_unit_ball(y: &[f64]) -> Vec<f64> {
    let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 1.0 {
        y.iter().map(|c| c / norm).collect()
    } else {
        y.to_vec()
    }
}

/// Random smooth loop with Gaussian coefficients decaying like `(1 + |j|)^{-2}`.
pub fn random_loop<R: Rng + ?Sized>(layout: PhaseLayout, modes: usize, amplitude: f64, rng: &mut R) -> FourierLoop {
    let mut x = FourierLoop::zeros(layout, modes);
    for j in -(modes as i64)..=modes as i64 {
        let scale = amplitude / (1.0 + j.unsigned_abs() as f64).powi(2);
        for c in x.mode_mut(j) {
            let g: f64 = rng.sample(StandardNormal);
            *c = scale * g;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_in_unit_cube_and_spread() {
        let pts: Vec<_> = (0..256).map(|i| halton(i, 3)).collect();
        assert!(pts.iter().flatten().all(|&c| (0.0..1.0).contains(&c)));
        let mean: f64 = pts.iter().map(|p| p[0]).sum::<f64>() / 256.0;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn box_search_finds_interior_maximum() {
        let opt = maximize_in_box(
            |p| -(p[0] - 0.3).powi(2) - (p[1] + 0.2).powi(2),
            &[-1.0, -1.0],
            &[1.0, 1.0],
            200,
        );
        assert!((opt.point[0] - 0.3).abs() < 1e-6);
        assert!((opt.point[1] + 0.2).abs() < 1e-6);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_min(|x| (x - 0.7).powi(2) + 1.0, 0.0, 2.0, 1e-10);
        assert!((x - 0.7).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }
}
