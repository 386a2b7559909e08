//! Truncated Fourier loops in `E = W^{1/2,2}(S^1, R^{2n})`.
//!
//! A loop is stored through its coefficients `xi_j` in
//! `x(t) = sum_{|j| <= M} exp(2 pi j t J) xi_j`, where `J` is the standard
//! symplectic matrix. Since `J^2 = -I`, `exp(theta J) = cos(theta) I + sin(theta) J`
//! acts as a rotation on every conjugate pair `(z_i, z_{i+n})`.
//! Positive modes span `E^+`, negative modes span `E^-` and the mean is `E^0`.

use std::f64::consts::PI;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::hamiltonian::is_prime_rotation;
use crate::sampling::golden_section_min;

pub(crate) const TWO_PI: f64 = 2.0 * PI;

/// Phase space `R^{2n-k} x T^k` with the split `z = (z_I, z_II)`.
///
/// `z_I` collects the first `2n - k` coordinates, `z_II` the last `k`
/// (the torus directions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseLayout {
    n: usize,
    k: usize,
}

impl PhaseLayout {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("half dimension n must be positive".into()));
        }
        if k == 0 || k > 2 * n - 1 {
            return Err(Error::Parameter(format!(
                "torus dimension k = {k} must satisfy 1 <= k <= 2n-1 = {}",
                2 * n - 1
            )));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Full phase-space dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Number of non-periodic coordinates, `2n - k`.
    pub fn free_dim(&self) -> usize {
        2 * self.n - self.k
    }

    pub fn free_range(&self) -> Range<usize> {
        0..self.free_dim()
    }

    pub fn torus_range(&self) -> Range<usize> {
        self.free_dim()..self.dim()
    }

    pub fn is_free(&self, coordinate: usize) -> bool {
        coordinate < self.free_dim()
    }

    pub fn free_part<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.free_range()]
    }

    pub fn torus_part<'a>(&self, z: &'a [f64]) -> &'a [f64] {
        &z[self.torus_range()]
    }

    /// `|z_I|`.
    pub fn free_norm(&self, z: &[f64]) -> f64 {
        self.free_part(z).iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// The vector `(0, w)` of `R^{2n}` for `w` in `R^k`.
    pub fn embed_torus(&self, w: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        z[self.torus_range()].copy_from_slice(w);
        z
    }
}

/// Integer rotation vector `v` of the torus coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RotationVector(Vec<i64>);

impl RotationVector {
    pub fn new(components: Vec<i64>) -> Self {
        Self(components)
    }

    /// Builds a rotation vector that must be prime.
    pub fn prime(components: Vec<i64>) -> Result<Self> {
        if !is_prime_rotation(&components) {
            return Err(Error::NotPrime(components));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prime(&self) -> bool {
        is_prime_rotation(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&c| c as f64).collect()
    }
}

/// Closed subspaces of `E` used by the variational setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subspace {
    Eplus,
    Eminus,
    E0,
    /// Means of the `z_I` coordinates.
    E0I,
    /// Means of the `z_II` coordinates (the torus directions).
    E0II,
    /// Mean-zero loops supported on the `z_I` coordinates.
    EI,
    /// Mean-zero loops supported on the `z_II` coordinates.
    EII,
    /// Mean-zero loops supported on the pairs `(p_i, q_i)`, `i < 2n - k` (only for `k > n`).
    X1,
    /// `E^- + E0_I`, the linking space when `k = n`.
    XCase1,
    /// `(E^- ∩ X1) + E0_I`, the linking space when `k > n`.
    XCase2,
    /// `E_II`.
    Y,
}

impl Subspace {
    pub const ALL: [Subspace; 11] = [
        Subspace::Eplus,
        Subspace::Eminus,
        Subspace::E0,
        Subspace::E0I,
        Subspace::E0II,
        Subspace::EI,
        Subspace::EII,
        Subspace::X1,
        Subspace::XCase1,
        Subspace::XCase2,
        Subspace::Y,
    ];

    /// Whether the tag is meaningful for `layout`.
    pub fn valid_for(&self, layout: &PhaseLayout) -> bool {
        match self {
            Subspace::X1 | Subspace::XCase2 => layout.k() > layout.n(),
            Subspace::XCase1 => layout.k() == layout.n(),
            _ => true,
        }
    }

    /// The linking subspace `X` for a layout, if the layout has one.
    pub fn linking_space(layout: &PhaseLayout) -> Result<Subspace> {
        use std::cmp::Ordering;
        match layout.k().cmp(&layout.n()) {
            Ordering::Equal => Ok(Subspace::XCase1),
            Ordering::Greater => Ok(Subspace::XCase2),
            Ordering::Less => Err(Error::Structure(format!(
                "no linking splitting for k = {} < n = {}",
                layout.k(),
                layout.n()
            ))),
        }
    }
}

/// Weight of mode `j` in the `W^{1/2,2}` inner product.
#[inline]
pub(crate) fn mode_weight(j: i64) -> f64 {
    if j == 0 {
        1.0
    } else {
        TWO_PI * j.unsigned_abs() as f64
    }
}

/// `out = exp(angle J) xi`.
#[inline]
pub(crate) fn rotate_into(xi: &[f64], n: usize, angle: f64, out: &mut [f64]) {
    let (s, c) = angle.sin_cos();
    for i in 0..n {
        let a = xi[i];
        let b = xi[i + n];
        out[i] = a * c - b * s;
        out[i + n] = b * c + a * s;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    layout: PhaseLayout,
    modes: usize,
    coeffs: Vec<f64>,
}

impl FourierLoop {
    pub fn zeros(layout: PhaseLayout, modes: usize) -> Self {
        Self {
            layout,
            modes,
            coeffs: vec![0.0; (2 * modes + 1) * layout.dim()],
        }
    }

    pub fn constant(layout: PhaseLayout, modes: usize, xi0: &[f64]) -> Result<Self> {
        if xi0.len() != layout.dim() {
            return Err(Error::Structure(format!(
                "constant of length {} for phase dimension {}",
                xi0.len(),
                layout.dim()
            )));
        }
        let mut x = Self::zeros(layout, modes);
        x.mode_mut(0).copy_from_slice(xi0);
        Ok(x)
    }

    /// Coefficients ordered by mode `j = -M..=M`, each a block of `2n` reals.
    pub fn from_coefficients(layout: PhaseLayout, modes: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (2 * modes + 1) * layout.dim();
        if coeffs.len() != expected {
            return Err(Error::Structure(format!(
                "{} coefficients given, {expected} expected",
                coeffs.len()
            )));
        }
        Ok(Self { layout, modes, coeffs })
    }

    /// The basis loop `exp(2 pi j t J) e_c`.
    pub fn generator(layout: PhaseLayout, modes: usize, j: i64, c: usize) -> Result<Self> {
        if j.unsigned_abs() as usize > modes || c >= layout.dim() {
            return Err(Error::Structure(format!("generator ({j}, {c}) out of range")));
        }
        let mut x = Self::zeros(layout, modes);
        x.mode_mut(j)[c] = 1.0;
        Ok(x)
    }

    pub fn layout(&self) -> PhaseLayout {
        self.layout
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    fn offset(&self, j: i64) -> usize {
        debug_assert!(j.unsigned_abs() as usize <= self.modes);
        (j + self.modes as i64) as usize * self.layout.dim()
    }

    pub fn mode(&self, j: i64) -> &[f64] {
        let o = self.offset(j);
        &self.coeffs[o..o + self.layout.dim()]
    }

    pub fn mode_mut(&mut self, j: i64) -> &mut [f64] {
        let o = self.offset(j);
        let d = self.layout.dim();
        &mut self.coeffs[o..o + d]
    }

    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let m = self.modes as i64;
        -m..=m
    }

    /// The mean `xi_0`.
    pub fn mean(&self) -> &[f64] {
        self.mode(0)
    }

    /// `x(t)`; `t` is taken modulo 1.
    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let n = self.layout.n();
        let mut out = vec![0.0; self.layout.dim()];
        let mut tmp = vec![0.0; self.layout.dim()];
        let t = t.rem_euclid(1.0);
        for j in self.mode_indices() {
            rotate_into(self.mode(j), n, TWO_PI * j as f64 * t, &mut tmp);
            out.iter_mut().zip(&tmp).for_each(|(o, v)| *o += v);
        }
        out
    }

    /// `x'(t)`.
    pub fn derivative(&self, t: f64) -> Vec<f64> {
        let n = self.layout.n();
        let mut out = vec![0.0; self.layout.dim()];
        let mut tmp = vec![0.0; self.layout.dim()];
        let t = t.rem_euclid(1.0);
        for j in self.mode_indices().filter(|&j| j != 0) {
            let freq = TWO_PI * j as f64;
            rotate_into(self.mode(j), n, freq * t, &mut tmp);
            // J (a, b) = (-b, a)
            for i in 0..n {
                out[i] -= freq * tmp[i + n];
                out[i + n] += freq * tmp[i];
            }
        }
        out
    }

    fn check_layout(&self, other: &FourierLoop) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Structure(format!(
                "layout mismatch: {:?} vs {:?}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    /// `<x, y> = x_0 . y_0 + sum_{j != 0} 2 pi |j| x_j . y_j`; differing
    /// mode cutoffs are zero-padded.
    pub fn inner_product(&self, other: &FourierLoop) -> Result<f64> {
        self.check_layout(other)?;
        let m = self.modes.min(other.modes) as i64;
        Ok((-m..=m)
            .map(|j| {
                let dot: f64 = self.mode(j).iter().zip(other.mode(j)).map(|(a, b)| a * b).sum();
                mode_weight(j) * dot
            })
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.mode_indices()
            .map(|j| mode_weight(j) * self.mode(j).iter().map(|c| c * c).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Same loop with a different mode cutoff (zero-padded or truncated).
    pub fn with_modes(&self, modes: usize) -> Self {
        let mut out = Self::zeros(self.layout, modes);
        let m = self.modes.min(modes) as i64;
        for j in -m..=m {
            out.mode_mut(j).copy_from_slice(self.mode(j));
        }
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &FourierLoop) -> Result<()> {
        self.check_layout(other)?;
        if self.modes != other.modes {
            return Err(Error::Structure(format!(
                "mode cutoff mismatch: {} vs {}",
                self.modes, other.modes
            )));
        }
        self.coeffs.iter_mut().zip(&other.coeffs).for_each(|(s, o)| *s += a * o);
        Ok(())
    }

    pub fn sub(&self, other: &FourierLoop) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &FourierLoop) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    /// `L x = P^+ x - P^- x`.
    pub fn apply_l(&self) -> Self {
        let mut out = self.clone();
        for j in self.mode_indices() {
            let sign = (j.signum()) as f64;
            out.mode_mut(j).iter_mut().for_each(|c| *c *= sign);
        }
        out
    }

    fn keep_modes(&self, keep: impl Fn(i64) -> bool) -> Self {
        let mut out = self.clone();
        for j in self.mode_indices().filter(|&j| !keep(j)) {
            out.mode_mut(j).fill(0.0);
        }
        out
    }

    /// Restricts the mean-zero part to coordinates with `keep(c)`, removing the mean.
    ///
    /// Component restriction mixes modes `j` and `-j`: it is carried out in the
    /// real cosine/sine coefficients of every coordinate, where the `E` norm is
    /// diagonal, so the result is the orthogonal projection.
    fn restrict_coordinates(&self, keep: impl Fn(usize) -> bool) -> Self {
        let n = self.layout.n();
        let mut out = Self::zeros(self.layout, self.modes);
        for m in 1..=self.modes as i64 {
            let pos = self.mode(m).to_vec();
            let neg = self.mode(-m).to_vec();
            let mut new_pos = vec![0.0; 2 * n];
            let mut new_neg = vec![0.0; 2 * n];
            for i in 0..n {
                let (ap, bp, an, bn) = (pos[i], pos[i + n], neg[i], neg[i + n]);
                let mut c_p = ap + an;
                let mut s_p = bn - bp;
                let mut c_q = bp + bn;
                let mut s_q = ap - an;
                if !keep(i) {
                    c_p = 0.0;
                    s_p = 0.0;
                }
                if !keep(i + n) {
                    c_q = 0.0;
                    s_q = 0.0;
                }
                new_pos[i] = 0.5 * (c_p + s_q);
                new_neg[i] = 0.5 * (c_p - s_q);
                new_pos[i + n] = 0.5 * (c_q - s_p);
                new_neg[i + n] = 0.5 * (c_q + s_p);
            }
            out.mode_mut(m).copy_from_slice(&new_pos);
            out.mode_mut(-m).copy_from_slice(&new_neg);
        }
        out
    }

    fn mean_only(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = Self::zeros(self.layout, self.modes);
        for (c, v) in self.mean().iter().enumerate() {
            if keep(c) {
                out.mode_mut(0)[c] = *v;
            }
        }
        out
    }

    /// Mean-zero part on the pairs `(p_i, q_i)` with `i < 2n - k`.
    fn x1_part(&self) -> Self {
        let n = self.layout.n();
        let pairs = self.layout.free_dim();
        let mut out = self.clone();
        out.mode_mut(0).fill(0.0);
        for j in self.mode_indices() {
            let block = out.mode_mut(j);
            for i in pairs..n {
                block[i] = 0.0;
                block[i + n] = 0.0;
            }
        }
        out
    }

    /// Orthogonal projection onto the tagged subspace.
    pub fn project(&self, s: Subspace) -> Result<Self> {
        let layout = self.layout;
        if !s.valid_for(&layout) {
            return Err(Error::Structure(format!(
                "subspace {s:?} undefined for n = {}, k = {}",
                layout.n(),
                layout.k()
            )));
        }
        let free = |c: usize| layout.is_free(c);
        let torus = |c: usize| !layout.is_free(c);
        let out = match s {
            Subspace::Eplus => self.keep_modes(|j| j > 0),
            Subspace::Eminus => self.keep_modes(|j| j < 0),
            Subspace::E0 => self.keep_modes(|j| j == 0),
            Subspace::E0I => self.mean_only(free),
            Subspace::E0II => self.mean_only(torus),
            Subspace::EI => self.restrict_coordinates(free),
            Subspace::EII | Subspace::Y => self.restrict_coordinates(torus),
            Subspace::X1 => self.x1_part(),
            Subspace::XCase1 => {
                let mut x = self.keep_modes(|j| j < 0);
                x.axpy(1.0, &self.mean_only(free))?;
                x
            }
            Subspace::XCase2 => {
                let mut x = self.x1_part().keep_modes(|j| j < 0);
                x.axpy(1.0, &self.mean_only(free))?;
                x
            }
        };
        Ok(out)
    }

    /// `(theta . x)(t) = x(t + theta) + (0, theta v)`.
    pub fn s1_shift(&self, theta: f64, v: &RotationVector) -> Result<Self> {
        if v.len() != self.layout.k() {
            return Err(Error::Structure(format!(
                "rotation vector of length {} for k = {}",
                v.len(),
                self.layout.k()
            )));
        }
        let n = self.layout.n();
        let mut out = self.clone();
        let mut tmp = vec![0.0; self.layout.dim()];
        for j in self.mode_indices().filter(|&j| j != 0) {
            rotate_into(self.mode(j), n, TWO_PI * j as f64 * theta, &mut tmp);
            out.mode_mut(j).copy_from_slice(&tmp);
        }
        let torus = self.layout.torus_range();
        for (slot, vc) in out.mode_mut(0)[torus].iter_mut().zip(v.components()) {
            *slot += theta * *vc as f64;
        }
        Ok(out)
    }

    /// Adds `(0, w)` to the mean.
    pub fn zk_translate(&self, w: &[i64]) -> Result<Self> {
        if w.len() != self.layout.k() {
            return Err(Error::Structure(format!(
                "translation of length {} for k = {}",
                w.len(),
                self.layout.k()
            )));
        }
        let mut out = self.clone();
        let torus = self.layout.torus_range();
        for (slot, wc) in out.mode_mut(0)[torus].iter_mut().zip(w) {
            *slot += *wc as f64;
        }
        Ok(out)
    }

    /// Representative of the `Z^k` class with torus means in `[0, 1)`.
    pub fn canonicalize(&self) -> Self {
        let mut out = self.clone();
        let torus = self.layout.torus_range();
        for slot in out.mode_mut(0)[torus].iter_mut() {
            *slot = slot.rem_euclid(1.0);
            if *slot >= 1.0 {
                *slot = 0.0;
            }
        }
        out
    }

    /// `‖x - theta.y‖` after moving `theta.y` to the nearest `Z^k` translate of `x`.
    fn orbit_gap(&self, other: &FourierLoop, v: &RotationVector, theta: f64) -> Result<f64> {
        let shifted = other.s1_shift(theta, v)?;
        let w: Vec<i64> = self
            .layout
            .torus_range()
            .map(|c| (self.mean()[c] - shifted.mean()[c]).round() as i64)
            .collect();
        Ok(self.sub(&shifted.zk_translate(&w)?)?.norm())
    }

    /// Distance between the `S^1 x Z^k` orbits of `self` and `other`.
    ///
    /// Minimizes over a uniform grid of `theta_grid` shifts, then refines the
    /// best grid cell by golden-section search.
    pub fn quotient_distance(
        &self,
        other: &FourierLoop,
        v: &RotationVector,
        theta_grid: usize,
    ) -> Result<f64> {
        self.check_layout(other)?;
        let other = if other.modes == self.modes {
            other.clone()
        } else {
            other.with_modes(self.modes)
        };
        let grid = theta_grid.max(1);
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..grid {
            let theta = i as f64 / grid as f64;
            let gap = self.orbit_gap(&other, v, theta)?;
            if gap < best.0 {
                best = (gap, theta);
            }
        }
        let h = 1.0 / grid as f64;
        let (_, refined) = golden_section_min(
            |theta| self.orbit_gap(&other, v, theta).unwrap_or(f64::INFINITY),
            best.1 - h,
            best.1 + h,
            1e-12,
        );
        Ok(best.0.min(refined))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n: usize, k: usize) -> PhaseLayout {
        PhaseLayout::new(n, k).unwrap()
    }

    #[test]
    fn layout_bounds() {
        assert!(PhaseLayout::new(1, 0).is_err());
        assert!(PhaseLayout::new(1, 2).is_err());
        assert!(PhaseLayout::new(2, 3).is_ok());
        let l = layout(2, 3);
        assert_eq!(l.free_range(), 0..1);
        assert_eq!(l.torus_range(), 1..4);
    }

    #[test]
    fn inner_product_examples() {
        let l = layout(1, 1);
        let c = FourierLoop::constant(l, 4, &[0.6, 0.8]).unwrap();
        assert!((c.inner_product(&c).unwrap() - 1.0).abs() < 1e-15);
        let g = FourierLoop::generator(l, 4, 1, 0).unwrap();
        assert!((g.inner_product(&g).unwrap() - TWO_PI).abs() < 1e-14);
        let h = FourierLoop::generator(l, 4, -2, 1).unwrap();
        assert_eq!(g.inner_product(&h).unwrap(), 0.0);
    }

    #[test]
    fn layout_mismatch_is_structural() {
        let a = FourierLoop::zeros(layout(1, 1), 2);
        let b = FourierLoop::zeros(layout(2, 2), 2);
        assert!(matches!(a.inner_product(&b), Err(Error::Structure(_))));
    }

    #[test]
    fn inner_product_zero_pads() {
        let l = layout(1, 1);
        let a = FourierLoop::generator(l, 2, 1, 0).unwrap();
        let b = FourierLoop::generator(l, 5, 1, 0).unwrap();
        assert!((a.inner_product(&b).unwrap() - TWO_PI).abs() < 1e-14);
    }

    #[test]
    fn listed_generators_have_the_expected_sign() {
        // sin(2 pi t) e_1 - cos(2 pi t) e_2 is the mode j = 1 with xi = -e_2.
        let l = layout(1, 1);
        let mut x = FourierLoop::zeros(l, 3);
        x.mode_mut(1)[1] = -1.0;
        for &t in &[0.0, 0.1, 0.37, 0.8] {
            let z = x.evaluate(t);
            assert!((z[0] - (TWO_PI * t).sin()).abs() < 1e-14);
            assert!((z[1] + (TWO_PI * t).cos()).abs() < 1e-14);
        }
        assert_eq!(x.project(Subspace::Eplus).unwrap(), x);
        assert_eq!(x.project(Subspace::Eminus).unwrap().norm(), 0.0);
    }

    #[test]
    fn constant_loop_has_no_plus_part() {
        let l = layout(1, 1);
        let c = FourierLoop::constant(l, 3, &[1.0, 2.0]).unwrap();
        assert_eq!(c.project(Subspace::Eplus).unwrap().norm(), 0.0);
        assert_eq!(c.apply_l().norm(), 0.0);
    }

    #[test]
    fn evaluate_examples() {
        let l = layout(1, 1);
        let c = FourierLoop::constant(l, 3, &[0.3, -0.2]).unwrap();
        assert_eq!(c.evaluate(0.77), vec![0.3, -0.2]);
        let mut x = FourierLoop::zeros(l, 3);
        x.mode_mut(1).copy_from_slice(&[0.4, 1.3]);
        let half = x.evaluate(0.5);
        assert!((half[0] + 0.4).abs() < 1e-14 && (half[1] + 1.3).abs() < 1e-14);
    }

    #[test]
    fn x_tags_require_matching_layout() {
        let x = FourierLoop::zeros(layout(2, 2), 2);
        assert!(x.project(Subspace::XCase1).is_ok());
        assert!(x.project(Subspace::XCase2).is_err());
        assert!(x.project(Subspace::X1).is_err());
        let y = FourierLoop::zeros(layout(2, 3), 2);
        assert!(y.project(Subspace::XCase1).is_err());
        assert!(y.project(Subspace::XCase2).is_ok());
        assert!(Subspace::linking_space(&layout(2, 1)).is_err());
    }

    #[test]
    fn component_restriction_matches_time_domain() {
        let l = layout(1, 1);
        let mut x = FourierLoop::zeros(l, 2);
        x.mode_mut(1).copy_from_slice(&[0.3, -0.7]);
        x.mode_mut(-1).copy_from_slice(&[1.1, 0.2]);
        x.mode_mut(2).copy_from_slice(&[0.5, 0.4]);
        x.mode_mut(0).copy_from_slice(&[2.0, 3.0]);
        let p = x.project(Subspace::EI).unwrap();
        for &t in &[0.0, 0.13, 0.5, 0.71] {
            let full = x.evaluate(t);
            let restricted = p.evaluate(t);
            assert!((restricted[0] - (full[0] - 2.0)).abs() < 1e-13);
            assert!(restricted[1].abs() < 1e-13);
        }
    }

    #[test]
    fn zk_translate_only_moves_the_mean() {
        let l = layout(2, 2);
        let mut x = FourierLoop::zeros(l, 2);
        x.coefficients_mut().iter_mut().enumerate().for_each(|(i, c)| *c = (i as f64 * 0.37).sin());
        let y = x.zk_translate(&[3, -1]).unwrap();
        for j in x.mode_indices().filter(|&j| j != 0) {
            assert_eq!(x.mode(j), y.mode(j));
        }
        let back = y.zk_translate(&[-3, 1]).unwrap();
        assert!(back.sub(&x).unwrap().l2_norm() < 1e-15);
        assert_eq!(x.zk_translate(&[0, 0]).unwrap(), x);
    }

    #[test]
    fn s1_shift_examples() {
        let l = layout(1, 1);
        let v = RotationVector::new(vec![1]);
        let mut x = FourierLoop::zeros(l, 3);
        x.coefficients_mut().iter_mut().enumerate().for_each(|(i, c)| *c = (i as f64).cos());
        assert_eq!(x.s1_shift(0.0, &v).unwrap(), x);
        let full = x.s1_shift(1.0, &v).unwrap();
        let translated = x.zk_translate(&[1]).unwrap();
        assert!(full.sub(&translated).unwrap().norm() < 1e-12);
        let twice = x.s1_shift(0.25, &v).unwrap().s1_shift(0.25, &v).unwrap();
        let once = x.s1_shift(0.5, &v).unwrap();
        assert!(twice.sub(&once).unwrap().norm() < 1e-12);
    }

    #[test]
    fn quotient_distance_examples() {
        let l = layout(1, 1);
        let v = RotationVector::new(vec![1]);
        let mut x = FourierLoop::zeros(l, 3);
        x.coefficients_mut().iter_mut().enumerate().for_each(|(i, c)| *c = 0.2 * (i as f64 * 1.7).sin());
        assert!(x.quotient_distance(&x, &v, 64).unwrap() < 1e-12);
        let t = x.zk_translate(&[2]).unwrap();
        assert!(x.quotient_distance(&t, &v, 64).unwrap() < 1e-12);
        let s = x.s1_shift(5.0 / 64.0, &v).unwrap();
        assert!(x.quotient_distance(&s, &v, 64).unwrap() < 1e-9);
        let off_grid = x.s1_shift(0.3711, &v).unwrap();
        assert!(x.quotient_distance(&off_grid, &v, 64).unwrap() < 1e-6);
        let other = x.scaled(1.5);
        assert!(x.quotient_distance(&other, &v, 64).unwrap() > 1e-3);
    }

    #[test]
    fn canonical_torus_means_in_unit_cell() {
        let l = layout(1, 1);
        let x = FourierLoop::constant(l, 1, &[0.5, -2.25]).unwrap().canonicalize();
        assert_eq!(x.mean(), &[0.5, 0.75]);
    }
}
