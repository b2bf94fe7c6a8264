//! Newton's method for the zero-mean profile equation on even cosine series.
//!
//! With `φ = Σ_{k=1}^{K} b_k cos kx` the equation
//! `cD^αφ + (c−1)φ = ½Π₀φ²` becomes `F(b) = 0` with
//!
//! ```text
//! F_k = (c k^α + c − 1) b_k − ½[φ²]_k,
//! J_kj = (c k^α + c − 1) δ_kj − ½(b_{k+j} + b_{|k−j|}),   b_0 = 0, b_{>K} = 0,
//! ```
//!
//! where `[·]_k` is the `cos kx` coefficient. The quadratic term is formed on
//! a grid of at least `3K + 1` points, which makes it alias-free for `k ≤ K`,
//! so the Jacobian above is the exact derivative of the discrete residual.
//!
//! This solver fills the speed range where the Petviashvili iteration does
//! not converge, by continuation from the small-amplitude branch at `c = 1/2`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::spectral::{FractionalOrder, Grid, PeriodicField};
use crate::wave::{w_from, ConvergenceTrace, Method, TraceEntry, WaveSolution};

/// Settings for the Newton solver and its continuation driver.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NewtonConfig {
    /// Number of cosine modes K.
    pub k_modes: usize,
    /// Stopping tolerance on `‖F‖_∞`.
    pub tol: f64,
    /// Iteration cap per solve.
    pub max_iters: usize,
    /// Largest continuation step in c.
    pub max_step: f64,
    /// Smallest continuation step before giving up.
    pub min_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            k_modes: 256,
            tol: 1e-12,
            max_iters: 50,
            max_step: 0.02,
            min_step: 1e-7,
        }
    }
}

impl NewtonConfig {
    /// Default truncation for a physical grid: `K = n/4`.
    pub fn for_grid(n_points: usize) -> Self {
        Self {
            k_modes: (n_points / 4).max(2),
            ..Self::default()
        }
    }
}

/// Truncated cosine coefficients `b_1..b_K` of an even zero-mean field.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineVector {
    pub b: Vec<f64>,
}

impl CosineVector {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }

    pub fn zeros(k: usize) -> Self {
        Self { b: vec![0.0; k] }
    }

    pub fn k_modes(&self) -> usize {
        self.b.len()
    }

    /// Cosine coefficients of an even field, truncated to K modes.
    pub fn from_field(f: &PeriodicField, k: usize) -> Self {
        Self {
            b: f.cosine_coefficients(k),
        }
    }

    /// Synthesis on a grid.
    pub fn to_field(&self, grid: &Grid) -> PeriodicField {
        PeriodicField::from_cosine_series(grid, 0.0, &self.b)
    }

    /// `b_k` with the conventions `b_0 = 0` and `b_k = 0` beyond K.
    #[inline]
    fn at(&self, k: usize) -> f64 {
        if k == 0 || k > self.b.len() {
            0.0
        } else {
            self.b[k - 1]
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.b.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// `A = (1/4π)∫φ² = Σ b_k² / 4`.
    pub fn integration_constant(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum::<f64>() / 4.0
    }
}

/// Smallest power-of-two grid that makes the quadratic term alias-free.
pub fn dealiased_grid(k: usize) -> Grid {
    let n = (3 * k + 2).next_power_of_two().max(8);
    Grid::new(n).expect("power of two")
}

fn linear_diag(k: usize, c: f64, alpha: FractionalOrder) -> f64 {
    c * alpha.symbol(k as i64) + c - 1.0
}

/// `F(b)` for the zero-mean profile equation.
pub fn residual_f(b: &CosineVector, c: f64, alpha: FractionalOrder) -> CosineVector {
    let k = b.k_modes();
    let grid = dealiased_grid(k);
    let sq = b.to_field(&grid).square();
    let quad = sq.cosine_coefficients(k);
    CosineVector {
        b: (1..=k)
            .map(|kk| linear_diag(kk, c, alpha) * b.at(kk) - 0.5 * quad[kk - 1])
            .collect(),
    }
}

/// The exact Jacobian of [`residual_f`]; symmetric by construction.
pub fn jacobian(b: &CosineVector, c: f64, alpha: FractionalOrder) -> DMatrix<f64> {
    let k = b.k_modes();
    DMatrix::from_fn(k, k, |i, j| {
        let (kk, jj) = (i + 1, j + 1);
        let conv = 0.5 * (b.at(kk + jj) + b.at(kk.abs_diff(jj)));
        let diag = if i == j { linear_diag(kk, c, alpha) } else { 0.0 };
        diag - conv
    })
}

/// Largest truncation solved with a dense LU factorisation; beyond it the
/// Newton systems go through preconditioned GMRES.
pub const DENSE_LIMIT: usize = 512;

/// Modes kept in the dense block of the Krylov preconditioner.
const PRECONDITIONER_BLOCK: usize = 256;

/// `J v` without forming `J`: `(ck^α + c − 1)v_k − [φ v]_k`, with `φ` given
/// on the dealiased grid.
pub fn jacobian_apply(phi: &PeriodicField, c: f64, alpha: FractionalOrder, v: &[f64]) -> Vec<f64> {
    let k = v.len();
    let vf = PeriodicField::from_cosine_series(phi.grid(), 0.0, v);
    let prod = phi.mul(&vf).cosine_coefficients(k);
    (1..=k)
        .map(|kk| linear_diag(kk, c, alpha) * v[kk - 1] - prod[kk - 1])
        .collect()
}

fn solve_jacobian(
    b: &CosineVector,
    phi: &PeriodicField,
    c: f64,
    alpha: FractionalOrder,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let k = b.k_modes();
    if k <= DENSE_LIMIT {
        let jac = jacobian(b, c, alpha);
        let x = jac
            .lu()
            .solve(&DVector::from_column_slice(rhs))
            .ok_or(Error::SingularJacobian)?;
        return Ok(x.iter().copied().collect());
    }
    // Block preconditioner: exact Jacobian on the low modes, diagonal above.
    let m = PRECONDITIONER_BLOCK;
    let block = DMatrix::from_fn(m, m, |i, j| {
        let (kk, jj) = (i + 1, j + 1);
        let conv = 0.5 * (b.at(kk + jj) + b.at(kk.abs_diff(jj)));
        let diag = if i == j { linear_diag(kk, c, alpha) } else { 0.0 };
        diag - conv
    })
    .lu();
    let diag: Vec<f64> = (1..=k).map(|kk| linear_diag(kk, c, alpha)).collect();
    let precond = |r: &[f64]| -> Option<Vec<f64>> {
        let low = block.solve(&DVector::from_column_slice(&r[..m]))?;
        let mut z: Vec<f64> = low.iter().copied().collect();
        z.extend((m..k).map(|i| r[i] / diag[i]));
        Some(z)
    };
    crate::krylov::gmres(|v| jacobian_apply(phi, c, alpha, v), precond, rhs, 1e-14, 60, 40)
        .ok_or(Error::SingularJacobian)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|1 − M|` of the positive form associated with `φ`, for the trace.
fn m_defect(phi: &PeriodicField, alpha: FractionalOrder, c: f64, a: f64) -> f64 {
    let w = w_from(c, a);
    let psi = phi.add_constant(c * w - (c - 1.0)).scale(1.0 / (2.0 * c));
    let num = psi.fractional_derivative(alpha).lin_comb(1.0, &psi, w).inner(&psi);
    let den = psi.square().inner(&psi);
    (1.0 - num / den).abs()
}

/// Damped Newton iteration on the coefficients; converges to the trivial
/// solution from `b0 = 0`.
pub fn newton_iterate(
    c: f64,
    alpha: FractionalOrder,
    b0: &CosineVector,
    tol: f64,
    max_iters: usize,
) -> Result<(CosineVector, ConvergenceTrace)> {
    if !(c.is_finite() && c > 0.5) {
        return Err(invalid("c", format!("{c} must exceed 1/2")));
    }
    let k = b0.k_modes();
    if k == 0 {
        return Err(invalid("k_modes", "must be positive"));
    }
    let grid = dealiased_grid(k);
    let mut b = b0.clone();
    let mut f = residual_f(&b, c, alpha);
    let mut trace = ConvergenceTrace::default();
    let mut last_step = f64::NAN;
    for _ in 0..=max_iters {
        let fnorm = sup(&f.b);
        let phi = b.to_field(&grid);
        let a = b.integration_constant();
        let md = if a > 0.0 { m_defect(&phi, alpha, c, a) } else { 0.0 };
        trace.push(TraceEntry {
            error: last_step,
            m_defect: md,
            res: fnorm,
        });
        if fnorm <= tol {
            return Ok((b, trace));
        }
        if trace.iters() > max_iters {
            break;
        }
        let rhs: Vec<f64> = f.b.iter().map(|x| -x).collect();
        let delta = solve_jacobian(&b, &phi, c, alpha, &rhs)?;
        if delta.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularJacobian);
        }
        // Backtracking: halve until the residual decreases.
        let f0 = l2(&f.b);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=30 {
            let trial = CosineVector {
                b: b.b.iter().zip(delta.iter()).map(|(x, d)| x + t * d).collect(),
            };
            let ft = residual_f(&trial, c, alpha);
            if l2(&ft.b) < f0 {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nb, nf)) => {
                last_step = t * delta.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                b = nb;
                f = nf;
            }
            None => break,
        }
    }
    let iters = trace.iters();
    Err(Error::MaxItersExceeded { iters, trace })
}

/// Newton solve at speed `c` returning a validated nontrivial wave.
///
/// The profile is synthesised on a grid of `4K` points.
pub fn newton_solve(
    c: f64,
    alpha: FractionalOrder,
    b0: &CosineVector,
    tol: f64,
    max_iters: usize,
) -> Result<WaveSolution> {
    if b0.sup_norm() == 0.0 {
        return Err(invalid(
            "b0",
            "initial coefficients must be nonzero (b0 = 0 is the trivial solution)",
        ));
    }
    let (b, trace) = newton_iterate(c, alpha, b0, tol, max_iters)?;
    let k = b.k_modes();
    if b.sup_norm() <= 1e-10 {
        return Err(Error::ValidationFailed(format!(
            "Newton at c = {c} collapsed onto the trivial solution"
        )));
    }
    let grid = Grid::new((4 * k).next_power_of_two()).expect("power of two");
    let phi = b.to_field(&grid);
    let sol = WaveSolution::from_phi(phi, alpha, c, trace, Method::Newton);
    sol.validate(1e-8)?;
    Ok(sol)
}

/// Amplitude of the `cos x` mode on the bifurcating branch at speed `c`,
/// from the balance of the first two modes: `a² = 8(2^α − 1)(c − 1/2)`.
pub fn bifurcation_amplitude(c: f64, alpha: FractionalOrder) -> f64 {
    (8.0 * (2f64.powf(alpha.value()) - 1.0) * (c - 0.5)).max(0.0).sqrt()
}

/// Two-mode seed on the bifurcating branch at speed `c`.
pub fn bifurcation_seed(c: f64, alpha: FractionalOrder, k: usize) -> CosineVector {
    let a = bifurcation_amplitude(c, alpha);
    let mut b = vec![0.0; k];
    b[0] = a;
    if k > 1 {
        b[1] = a * a / (2.0 * (2f64.powf(alpha.value()) - 1.0));
    }
    CosineVector { b }
}

/// Speed at which continuation starts from the bifurcation seed.
pub const BRANCH_START: f64 = 0.505;

/// Natural-parameter continuation of the single-lobe branch in c, with a
/// secant predictor and step halving on failure.
#[derive(Debug, Clone)]
pub struct Continuation {
    pub alpha: FractionalOrder,
    pub cfg: NewtonConfig,
    prev: Option<(f64, CosineVector)>,
    curr: (f64, CosineVector),
}

impl Continuation {
    /// Starts on the bifurcating branch at `min(c0, BRANCH_START)`.
    pub fn start(alpha: FractionalOrder, cfg: NewtonConfig, c0: f64) -> Result<Self> {
        let c = c0.min(BRANCH_START);
        let seed = bifurcation_seed(c, alpha, cfg.k_modes);
        let (b, _) = newton_iterate(c, alpha, &seed, cfg.tol, cfg.max_iters)?;
        if b.sup_norm() <= 1e-10 {
            return Err(Error::ValidationFailed(
                "branch seed collapsed onto the trivial solution".into(),
            ));
        }
        Ok(Self {
            alpha,
            cfg,
            prev: None,
            curr: (c, b),
        })
    }

    pub fn current_speed(&self) -> f64 {
        self.curr.0
    }

    fn predict(&self, c: f64) -> CosineVector {
        match &self.prev {
            Some((cp, bp)) if (self.curr.0 - cp).abs() > 0.0 => {
                let s = (c - self.curr.0) / (self.curr.0 - cp);
                CosineVector {
                    b: self.curr.1.b.iter().zip(&bp.b).map(|(x, y)| x + s * (x - y)).collect(),
                }
            }
            _ => self.curr.1.clone(),
        }
    }

    fn try_step(&self, c: f64) -> Option<CosineVector> {
        let guess = self.predict(c);
        match newton_iterate(c, self.alpha, &guess, self.cfg.tol, self.cfg.max_iters) {
            Ok((b, _)) if b.sup_norm() > 1e-10 => {
                // Reject jumps to a different branch.
                let jump = b.b.iter().zip(&guess.b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
                if jump <= 0.5 * guess.sup_norm().max(self.curr.1.sup_norm()) {
                    Some(b)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Advances the branch to speed `target` and returns the solution there.
    pub fn advance_to(&mut self, target: f64) -> Result<WaveSolution> {
        if !(target > 0.5) {
            return Err(invalid("c", format!("{target} must exceed 1/2")));
        }
        let mut h = self.cfg.max_step;
        while (target - self.curr.0).abs() > 0.0 {
            let dir = (target - self.curr.0).signum();
            let c = if (target - self.curr.0).abs() <= h {
                target
            } else {
                self.curr.0 + dir * h
            };
            match self.try_step(c) {
                Some(b) => {
                    let old = std::mem::replace(&mut self.curr, (c, b));
                    self.prev = Some(old);
                    h = (h * 1.5).min(self.cfg.max_step);
                }
                None => {
                    h *= 0.5;
                    if h < self.cfg.min_step {
                        return Err(Error::SpeedUnreachable { target });
                    }
                }
            }
        }
        newton_solve(target, self.alpha, &self.curr.1, self.cfg.tol, self.cfg.max_iters).map(|mut s| {
            s.method = Method::Newton;
            s
        })
    }
}

/// Convenience: Newton continuation from the bifurcation point to speed `c`.
pub fn continue_to(c: f64, alpha: FractionalOrder, cfg: NewtonConfig) -> Result<WaveSolution> {
    Continuation::start(alpha, cfg, c)?.advance_to(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{dnoidal_profile, small_amplitude_phi};

    fn alpha(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn zero_is_the_trivial_root() {
        let f = residual_f(&CosineVector::zeros(8), 0.9, alpha(1.0));
        assert!(f.b.iter().all(|&x| x == 0.0));
        let (b, _) = newton_iterate(0.9, alpha(1.0), &CosineVector::zeros(8), 1e-12, 10).unwrap();
        assert_eq!(b.sup_norm(), 0.0);
        assert!(newton_solve(0.9, alpha(1.0), &CosineVector::zeros(8), 1e-12, 10).is_err());
    }

    #[test]
    fn jacobian_of_zero_is_diagonal() {
        let j = jacobian(&CosineVector::zeros(5), 0.8, alpha(1.5));
        for r in 0..5 {
            for s in 0..5 {
                let expect = if r == s {
                    0.8 * ((r + 1) as f64).powf(1.5) - 0.2
                } else {
                    0.0
                };
                assert!((j[(r, s)] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn toy_convolution_entries() {
        let b = CosineVector::new(vec![1.0, 0.0]);
        let j = jacobian(&b, 1.0, alpha(1.0));
        assert!((j[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((j[(1, 0)] + 0.5).abs() < 1e-15);
        assert!((j[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((j[(1, 1)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dnoidal_coefficients_are_a_root() {
        let g = Grid::new(256).unwrap();
        let o = dnoidal_profile(1.2181, &g).unwrap();
        let b = CosineVector::from_field(&o.field, 64);
        let f = residual_f(&b, 1.2181, alpha(2.0));
        assert!(f.sup_norm() <= 1e-8, "{}", f.sup_norm());
    }

    #[test]
    fn small_amplitude_coefficients_have_cubic_residual() {
        let g = Grid::new(64).unwrap();
        let o = small_amplitude_phi(0.05, alpha(1.0), &g).unwrap();
        let b = CosineVector::from_field(&o.field, 16);
        let f = residual_f(&b, o.c, alpha(1.0));
        assert!(f.sup_norm() <= 10.0 * 0.05_f64.powi(3));
    }

    #[test]
    fn polishing_a_petviashvili_wave_is_quadratic() {
        use crate::petviashvili::{solve_wave_at_speed, SolverConfig};
        let cfg = SolverConfig::default().with_n_points(512);
        let p = solve_wave_at_speed(1.2181, alpha(2.0), &cfg, None, None).unwrap();
        let b0 = CosineVector::from_field(&p.phi, 128);
        let (b, trace) = newton_iterate(1.2181, alpha(2.0), &b0, 1e-11, 10).unwrap();
        assert!(trace.iters() - 1 <= 3);
        let sol = newton_solve(1.2181, alpha(2.0), &b, 1e-11, 10).unwrap();
        assert!(sol.phi.resampled(&Grid::new(512).unwrap()).sub(&p.phi).sup_norm() < 1e-8);
    }

    #[test]
    fn continuation_reaches_the_gap_at_alpha_045() {
        // Profiles at small α decay slowly in k; 512 modes resolve them.
        let cfg = NewtonConfig {
            k_modes: 512,
            ..NewtonConfig::default()
        };
        let sol = continue_to(0.9, alpha(0.45), cfg).unwrap();
        assert!((sol.c - 0.9).abs() < 1e-15);
        assert!(sol.residual() <= 1e-9);
        assert_eq!(sol.method, Method::Newton);
        // single lobe, max at the origin
        let s = sol.phi.samples();
        let o = sol.phi.grid().origin_index();
        assert!(s[o] >= sol.phi.max() - 1e-14);
    }

    #[test]
    fn truncation_independence() {
        let cases = [(0.8, 0.7), (0.8, 0.9), (1.0, 0.7), (1.0, 1.5), (2.0, 0.9), (2.0, 1.5)];
        for &(a, c) in &cases {
            let solve = |k: usize| {
                let cfg = NewtonConfig {
                    k_modes: k,
                    ..NewtonConfig::default()
                };
                continue_to(c, alpha(a), cfg).unwrap().phi.cosine_coefficients(64)
            };
            let (x, y) = (solve(64), solve(128));
            let diff = x.iter().zip(&y).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(diff < 1e-9, "α={a} c={c}: {diff}");
        }
    }
}
