//! Uniform periodic grids and spectrally represented fields.
//!
//! Every field lives on `[-π, π)` sampled at `x_j = -π + 2πj/n`, so `x = 0`
//! sits on node `n/2`. Coefficients are true Fourier coefficients with respect
//! to `x`, `u(x) = Σ_k û_k e^{ikx}`, stored in FFT order: index `j` holds mode
//! `j` for `j < n/2` and mode `j - n` otherwise (the Nyquist slot is `k = -n/2`).
//! The forward transform carries the `1/n`.
//!
//! Fields keep both representations eagerly; linear operations act on both
//! without transforms, and only genuinely nonlinear products pay for an FFT
//! round trip.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Fractional order α of the dispersion, restricted to `(0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 2.0 {
            Ok(Self(alpha))
        } else {
            Err(invalid("alpha", format!("{alpha} is outside (0, 2]")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The symbol `|k|^α` of `D^α` at an integer wave number.
    #[inline]
    pub fn symbol(self, k: i64) -> f64 {
        if k == 0 {
            0.0
        } else {
            (k.unsigned_abs() as f64).powf(self.0)
        }
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = crate::error::Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Uniform grid of `n` nodes on `[-π, π)`, `n` a power of two.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid").field("n_points", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Grid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(invalid("n_points", format!("{n_points} is not a power of two ≥ 4")));
        }
        let (forward, inverse) = plans(n_points);
        Ok(Self {
            n: n_points,
            forward,
            inverse,
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    #[inline]
    pub fn node(&self, j: usize) -> f64 {
        -PI + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Index of the node at `x = 0`.
    #[inline]
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Wave number stored at FFT slot `j`.
    #[inline]
    pub fn mode(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// FFT slot of wave number `k`, if it is resolved on this grid.
    #[inline]
    pub fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k >= -half && k < half {
            Some(if k >= 0 {
                k as usize
            } else {
                (k + self.n as i64) as usize
            })
        } else {
            None
        }
    }

    /// Largest |k| that is not the Nyquist mode.
    #[inline]
    pub fn k_max(&self) -> usize {
        self.n / 2 - 1
    }

    /// Samples → FFT-ordered Fourier coefficients.
    pub fn analyze(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (j, c) in buf.iter_mut().enumerate() {
            // x_0 = -π contributes the phase (-1)^k.
            let sign = if j % 2 == 0 { scale } else { -scale };
            *c *= sign;
        }
        buf
    }

    /// FFT-ordered coefficients → real samples (real part of the synthesis).
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
            .collect();
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Real 2π-periodic field with its Fourier coefficients.
#[derive(Debug, Clone)]
pub struct PeriodicField {
    grid: Grid,
    samples: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl PeriodicField {
    pub fn from_samples(grid: &Grid, samples: Vec<f64>) -> Self {
        assert_eq!(samples.len(), grid.n, "sample count must match the grid");
        let coeffs = grid.analyze(&samples);
        Self {
            grid: grid.clone(),
            samples,
            coeffs,
        }
    }

    /// Builds a field from FFT-ordered coefficients. The input must be
    /// conjugate symmetric (with a real Nyquist entry) for the result to
    /// represent a real field; the samples are the real part of the synthesis.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.n, "coefficient count must match the grid");
        let samples = grid.synthesize(&coeffs);
        Self {
            grid: grid.clone(),
            samples,
            coeffs,
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let samples = (0..grid.n).map(|j| f(grid.node(j))).collect();
        Self::from_samples(grid, samples)
    }

    /// Even cosine series `Σ_{k≥1} b_k cos(kx)` plus an optional mean.
    pub fn from_cosine_series(grid: &Grid, mean: f64, b: &[f64]) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n];
        coeffs[0] = Complex64::new(mean, 0.0);
        for (i, &bk) in b.iter().enumerate() {
            let k = i as i64 + 1;
            if let (Some(p), Some(m)) = (grid.slot(k), grid.slot(-k)) {
                if p != m {
                    coeffs[p] = Complex64::new(bk / 2.0, 0.0);
                    coeffs[m] = Complex64::new(bk / 2.0, 0.0);
                }
            }
        }
        Self::from_coeffs(grid, coeffs)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            samples: vec![0.0; grid.n],
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n];
        coeffs[0] = Complex64::new(value, 0.0);
        Self {
            grid: grid.clone(),
            samples: vec![value; grid.n],
            coeffs,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Coefficient of wave number `k`; zero for unresolved modes.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.grid
            .slot(k)
            .map(|j| self.coeffs[j])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Cosine coefficients `b_k = 2 Re û_k`, k = 1..=k_max.
    pub fn cosine_coefficients(&self, k_max: usize) -> Vec<f64> {
        (1..=k_max as i64).map(|k| 2.0 * self.coeff(k).re).collect()
    }

    /// Applies a real Fourier multiplier `m(k)`; the Nyquist slot is
    /// multiplied like any other mode.
    pub fn apply_symbol(&self, m: impl Fn(i64) -> f64) -> Self {
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| c * m(self.grid.mode(j)))
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    /// Applies a complex multiplier. The Nyquist slot is zeroed because an
    /// odd symbol cannot be represented on it by a real field.
    pub fn apply_complex_symbol(&self, m: impl Fn(i64) -> Complex64) -> Self {
        let nyq = self.grid.n / 2;
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                if j == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    c * m(self.grid.mode(j))
                }
            })
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    pub fn fractional_derivative(&self, alpha: FractionalOrder) -> Self {
        self.apply_symbol(|k| alpha.symbol(k))
    }

    /// Spatial derivative `∂ₓ`.
    pub fn derivative(&self) -> Self {
        self.apply_complex_symbol(|k| Complex64::new(0.0, k as f64))
    }

    /// Translate: returns `x ↦ u(x - y)` by Fourier interpolation.
    pub fn translated(&self, y: f64) -> Self {
        let nyq = self.grid.n / 2;
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let k = self.grid.mode(j) as f64;
                if j == nyq {
                    c * (k * y).cos()
                } else {
                    c * Complex64::from_polar(1.0, -k * y)
                }
            })
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    pub fn zero_mean_project(&self) -> Self {
        let m = self.coeffs[0].re;
        let mut out = self.clone();
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out.samples.iter_mut().for_each(|s| *s -= m);
        out
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `∫_{-π}^{π} u dx`, i.e. 2π times the k = 0 coefficient.
    #[inline]
    pub fn integral(&self) -> f64 {
        2.0 * PI * self.coeffs[0].re
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `∫ u v dx` via Parseval on the coefficients.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        2.0 * PI
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
    }

    /// `∫ u² dx`.
    pub fn norm_sq(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `∫ |k|^s |û_k|²`-weighted energy, i.e. `∫ (D^{s/2} u)² dx`.
    pub fn weighted_norm_sq(&self, weight: impl Fn(i64) -> f64) -> f64 {
        2.0 * PI
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| weight(self.grid.mode(j)) * c.norm_sqr())
                .sum::<f64>()
    }

    /// Pointwise product, with the Nyquist mode zeroed afterwards.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let samples: Vec<f64> = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Self::from_samples(&self.grid, samples).without_nyquist()
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Maps samples pointwise, with the Nyquist mode zeroed afterwards.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let samples = self.samples.iter().map(|&s| f(s)).collect();
        Self::from_samples(&self.grid, samples).without_nyquist()
    }

    pub fn without_nyquist(mut self) -> Self {
        let nyq = self.grid.n / 2;
        let c = self.coeffs[nyq];
        if c.norm_sqr() != 0.0 {
            self.coeffs[nyq] = Complex64::new(0.0, 0.0);
            // The Nyquist mode samples as (-1)^j c on x_j = -π + jh with phase (-1)^{n/2}.
            let phase = if (self.grid.n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            for (j, s) in self.samples.iter_mut().enumerate() {
                let sign = if j % 2 == 0 { phase } else { -phase };
                *s -= sign * c.re;
            }
        }
        self
    }

    /// Zeroes every mode with `|k| > k_cut`.
    pub fn truncated(&self, k_cut: usize) -> Self {
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                if self.grid.mode(j).unsigned_abs() as usize > k_cut {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        Self::from_coeffs(&self.grid, coeffs)
    }

    /// Spectral interpolation (or truncation) onto another grid. The Nyquist
    /// mode of the coarser grid is dropped.
    pub fn resampled(&self, grid: &Grid) -> Self {
        if *grid == self.grid {
            return self.clone();
        }
        let k_cut = (grid.n.min(self.grid.n) / 2 - 1) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n];
        for k in -k_cut..=k_cut {
            coeffs[grid.slot(k).expect("mode resolved")] = self.coeff(k);
        }
        Self::from_coeffs(grid, coeffs)
    }

    /// `a·self + b·other`, without transforms.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|x| a * x).collect(),
            coeffs: self.coeffs.iter().map(|x| x * a).collect(),
        }
    }

    pub fn add_constant(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += a;
        out.samples.iter_mut().for_each(|s| *s += a);
        out
    }

    /// Largest imaginary part of the coefficients relative to their largest
    /// modulus: zero for fields that are even about `x = 0`.
    pub fn odd_part_ratio(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.im.abs())) / scale
    }

    /// Modulus of the coefficients for k = 0..n/2-1.
    pub fn spectrum(&self) -> Vec<f64> {
        (0..self.grid.n / 2).map(|j| self.coeffs[j].norm()).collect()
    }

    /// Evaluates the Fourier interpolant at an arbitrary point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let k = self.grid.mode(j) as f64;
                if j == self.grid.n / 2 {
                    c.re * (k * x).cos()
                } else {
                    (c * Complex64::from_polar(1.0, k * x)).re
                }
            })
            .sum()
    }
}

/// `D^α u`, the Fourier multiplier `|k|^α`.
pub fn fractional_derivative(u: &PeriodicField, alpha: FractionalOrder) -> PeriodicField {
    u.fractional_derivative(alpha)
}

/// `Π₀ u = u − mean(u)`.
pub fn zero_mean_project(u: &PeriodicField) -> PeriodicField {
    u.zero_mean_project()
}

/// `∫ (D^{α/2} u)² dx`.
pub fn half_derivative_energy(u: &PeriodicField, alpha: FractionalOrder) -> f64 {
    u.weighted_norm_sq(|k| alpha.symbol(k))
}

/// `B_c(u) = ½∫[c (D^{α/2}u)² + (c−1) u²] dx`.
pub fn b_functional(u: &PeriodicField, c: f64, alpha: FractionalOrder) -> f64 {
    0.5 * (c * half_derivative_energy(u, alpha) + (c - 1.0) * u.norm_sq())
}

/// `∫ u³ dx`, spectrally (2π times the mean of the pointwise cube).
pub fn cubic_integral(u: &PeriodicField) -> f64 {
    let n = u.samples.len() as f64;
    2.0 * PI * u.samples.iter().map(|s| s * s * s).sum::<f64>() / n
}

/// The three conserved quantities of the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    /// `E = ½∫[(D^{α/2}u)² − u³/3]`
    pub e: f64,
    /// `P = ½∫[(D^{α/2}u)² + u²]`
    pub p: f64,
    /// `M = ∫u`
    pub m: f64,
}

pub fn conserved_quantities(u: &PeriodicField, alpha: FractionalOrder) -> Conserved {
    let d = half_derivative_energy(u, alpha);
    Conserved {
        e: 0.5 * (d - cubic_integral(u) / 3.0),
        p: 0.5 * (d + u.norm_sq()),
        m: u.integral(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn grid_rejects_non_powers_of_two() {
        assert!(Grid::new(100).is_err());
        assert!(Grid::new(2).is_err());
        let g = Grid::new(64).unwrap();
        assert!(close(g.spacing(), 2.0 * PI / 64.0, 0.0));
        assert_eq!(g.node(g.origin_index()), 0.0);
    }

    #[test]
    fn alpha_range() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(2.5).is_err());
        assert!(FractionalOrder::new(2.0).is_ok());
    }

    #[test]
    fn cosine_has_real_unit_half_coefficients() {
        let g = Grid::new(32).unwrap();
        let u = PeriodicField::from_fn(&g, f64::cos);
        assert!(close(u.coeff(1).re, 0.5, 1e-15));
        assert!(close(u.coeff(-1).re, 0.5, 1e-15));
        assert!(u.coeff(1).im.abs() < 1e-15);
        let s = PeriodicField::from_fn(&g, f64::sin);
        assert!(close(s.coeff(1).im, -0.5, 1e-15));
    }

    #[test]
    fn fractional_derivative_examples() {
        let g = Grid::new(64).unwrap();
        for &a in &[0.3, 1.0, 1.7] {
            let alpha = FractionalOrder::new(a).unwrap();
            let u = PeriodicField::from_fn(&g, f64::cos);
            let d = fractional_derivative(&u, alpha);
            for (x, y) in d.samples().iter().zip(u.samples()) {
                assert!(close(*x, *y, 1e-13));
            }
            let c = PeriodicField::constant(&g, 5.0);
            assert!(fractional_derivative(&c, alpha).sup_norm() < 1e-14);
        }
        let u = PeriodicField::from_fn(&g, |x| (2.0 * x).cos());
        let d = u.fractional_derivative(FractionalOrder::new(2.0).unwrap());
        for (j, v) in d.samples().iter().enumerate() {
            assert!(close(*v, 4.0 * (2.0 * g.node(j)).cos(), 1e-12));
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new(64).unwrap();
        let u = PeriodicField::from_fn(&g, |x| (3.0 * x).sin());
        let du = u.derivative();
        for (j, v) in du.samples().iter().enumerate() {
            assert!(close(*v, 3.0 * (3.0 * g.node(j)).cos(), 1e-12));
        }
    }

    #[test]
    fn projection_examples() {
        let g = Grid::new(32).unwrap();
        let u = PeriodicField::from_fn(&g, |x| 1.0 + x.cos());
        let p = zero_mean_project(&u);
        for (j, v) in p.samples().iter().enumerate() {
            assert!(close(*v, g.node(j).cos(), 1e-14));
        }
        assert!(zero_mean_project(&PeriodicField::constant(&g, 7.0)).sup_norm() < 1e-14);
        let c2 = PeriodicField::from_fn(&g, |x| x.cos().powi(2));
        let p = zero_mean_project(&c2);
        for (j, v) in p.samples().iter().enumerate() {
            assert!(close(*v, (2.0 * g.node(j)).cos() / 2.0, 1e-14));
        }
    }

    #[test]
    fn b_functional_of_cosine() {
        let g = Grid::new(64).unwrap();
        let u = PeriodicField::from_fn(&g, f64::cos);
        for &(a, c) in &[(0.5, 0.7), (1.0, 1.2), (2.0, 3.0)] {
            let alpha = FractionalOrder::new(a).unwrap();
            let b = b_functional(&u, c, alpha);
            assert!(close(b, PI * (2.0 * c - 1.0) / 2.0, 1e-13));
        }
        let z = PeriodicField::zeros(&g);
        assert_eq!(b_functional(&z, 1.3, FractionalOrder::new(1.0).unwrap()), 0.0);
    }

    #[test]
    fn conserved_quantities_of_cosine_and_zero() {
        let g = Grid::new(64).unwrap();
        let alpha = FractionalOrder::new(0.8).unwrap();
        let q = conserved_quantities(&PeriodicField::zeros(&g), alpha);
        assert_eq!((q.e, q.p, q.m), (0.0, 0.0, 0.0));
        let q = conserved_quantities(&PeriodicField::from_fn(&g, f64::cos), alpha);
        assert!(close(q.e, PI / 2.0, 1e-13));
        assert!(close(q.p, PI, 1e-13));
        assert!(q.m.abs() < 1e-14);
    }

    #[test]
    fn conserved_quantities_two_mode_against_quadrature() {
        // u = 0.3 cos x + 0.1 cos 2x at α = 1:
        // ∫(D^{1/2}u)² = π(0.09 + 2·0.01), ∫u² = π(0.09 + 0.01),
        // ∫u³ = 3π·a²b/2·... computed by fine midpoint quadrature below.
        let g = Grid::new(64).unwrap();
        let alpha = FractionalOrder::new(1.0).unwrap();
        let u = PeriodicField::from_fn(&g, |x| 0.3 * x.cos() + 0.1 * (2.0 * x).cos());
        let q = conserved_quantities(&u, alpha);
        let n = 200_000;
        let h = 2.0 * PI / n as f64;
        let cube: f64 = (0..n)
            .map(|j| {
                let x = -PI + (j as f64 + 0.5) * h;
                (0.3 * x.cos() + 0.1 * (2.0 * x).cos()).powi(3)
            })
            .sum::<f64>()
            * h;
        let d = PI * (0.09 + 2.0 * 0.01);
        let l2 = PI * (0.09 + 0.01);
        assert!(close(q.e, 0.5 * (d - cube / 3.0), 1e-10));
        assert!(close(q.p, 0.5 * (d + l2), 1e-10));
        assert!(q.m.abs() < 1e-12);
    }

    #[test]
    fn translation_and_eval() {
        let g = Grid::new(64).unwrap();
        let u = PeriodicField::from_fn(&g, |x| (x.cos()).exp());
        let v = u.translated(0.3);
        for j in 0..g.n_points() {
            let x = g.node(j);
            assert!(close(v.samples()[j], ((x - 0.3).cos()).exp(), 1e-12));
        }
        assert!(close(u.eval(0.123), (0.123_f64.cos()).exp(), 1e-12));
    }

    #[test]
    fn nyquist_removed_from_products() {
        let g = Grid::new(16).unwrap();
        let u = PeriodicField::from_fn(&g, |x| (4.0 * x).cos());
        let sq = u.square();
        assert_eq!(sq.coeff(-8).norm(), 0.0);
        let back = PeriodicField::from_samples(&g, sq.samples().to_vec());
        assert!(back.coeff(-8).norm() < 1e-15);
    }
}
