//! Petviashvili iteration for the positive-form profile equation
//!
//! ```text
//! D^α ψ + w ψ − ψ² = 0,   ψ = (φ − (c−1) + c w) / (2c),   w = √((c−1)² + 2A) / c,
//! ```
//!
//! iterating `ψ̂ₙ₊₁ = Mₙ^ν ψ̂ₙ² / (|k|^α + w)` with the stabilising ratio
//! `Mₙ = ⟨(D^α + w)ψₙ, ψₙ⟩ / ⟨ψₙ², ψₙ⟩`. The speed and integration constant are
//! recovered afterwards from `ψ` and `w`.
//!
//! All three diagnostics (successive difference, `|1 − M|`, equation residual)
//! are evaluated on the stored spectral coefficients; the residual in
//! particular is formed as `(|k|^α + w)ψ̂ − (ψ²)^` before a single synthesis,
//! which keeps its round-off floor near machine precision even at n = 4096.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::oracles::initial_guess_psi;
use crate::spectral::{FractionalOrder, Grid, PeriodicField};
use crate::wave::{ConvergenceTrace, Method, TraceEntry, WaveSolution};

/// Settings of the Petviashvili iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stabilising exponent ν.
    pub nu: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Tolerance on `sup|ψₙ₊₁ − ψₙ|`.
    pub tol_error: f64,
    /// Tolerance on `|1 − Mₙ|`.
    pub tol_m: f64,
    /// Tolerance on the sup-norm residual of the ψ equation.
    pub tol_res: f64,
    /// Grid size.
    pub n_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nu: 2.0,
            max_iters: 5000,
            tol_error: 1e-13,
            tol_m: 1e-13,
            tol_res: 1e-10,
            n_points: 4096,
        }
    }
}

impl SolverConfig {
    pub fn with_n_points(mut self, n: usize) -> Self {
        self.n_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 1.0 && self.nu < 3.0) {
            return Err(invalid("nu", format!("{} is outside (1, 3)", self.nu)));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be positive"));
        }
        for (name, v) in [
            ("tol_error", self.tol_error),
            ("tol_m", self.tol_m),
            ("tol_res", self.tol_res),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("{v} must be a positive number")));
            }
        }
        Grid::new(self.n_points).map(|_| ())
    }
}

/// Number of iterations over which error growth signals divergence.
const DIVERGENCE_WINDOW: usize = 50;
/// Growth factor over the window that signals divergence.
const DIVERGENCE_GROWTH: f64 = 10.0;

fn sup_of_synthesis(grid: &Grid, coeffs: &[Complex64]) -> f64 {
    grid.synthesize(coeffs).iter().fold(0.0_f64, |m, s| m.max(s.abs()))
}

/// Runs the stabilised fixed-point iteration from `psi0` at fixed `w`.
pub fn iterate_psi(
    w: f64,
    alpha: FractionalOrder,
    psi0: &PeriodicField,
    cfg: &SolverConfig,
) -> Result<(PeriodicField, ConvergenceTrace)> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(invalid("w", format!("{w} must be positive")));
    }
    if psi0.sup_norm() == 0.0 {
        return Err(invalid("psi0", "initial guess must be nonzero"));
    }
    let grid = psi0.grid().clone();
    let n = grid.n_points();
    let nyq = n / 2;
    let sym: Vec<f64> = (0..n).map(|j| alpha.symbol(grid.mode(j)) + w).collect();
    let mut coeffs = psi0.coeffs().to_vec();
    let mut samples = psi0.samples().to_vec();
    let mut trace = ConvergenceTrace::default();
    let zero = Complex64::new(0.0, 0.0);

    for iter in 0..cfg.max_iters {
        let sq: Vec<f64> = samples.iter().map(|s| s * s).collect();
        let mut sq_hat = grid.analyze(&sq);
        sq_hat[nyq] = zero;

        let num: f64 = coeffs.iter().zip(&sym).map(|(c, s)| s * c.norm_sqr()).sum();
        let den: f64 = sq_hat.iter().zip(&coeffs).map(|(q, c)| (q * c.conj()).re).sum();
        let m = num / den;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::DivergenceDetected { iters: iter, trace });
        }

        let residual: Vec<Complex64> = coeffs
            .iter()
            .zip(&sym)
            .zip(&sq_hat)
            .map(|((c, s), q)| c * *s - q)
            .collect();
        let res = sup_of_synthesis(&grid, &residual);

        let factor = m.powf(cfg.nu);
        let next: Vec<Complex64> = sq_hat.iter().zip(&sym).map(|(q, s)| q * (factor / s)).collect();
        let diff: Vec<Complex64> = next.iter().zip(&coeffs).map(|(a, b)| a - b).collect();
        let error = sup_of_synthesis(&grid, &diff);

        let scale = next.iter().fold(0.0_f64, |a, c| a.max(c.norm()));
        let odd = next.iter().fold(0.0_f64, |a, c| a.max(c.im.abs()));
        if scale > 0.0 {
            trace.max_asymmetry = trace.max_asymmetry.max(odd / scale);
        }
        trace.push(TraceEntry {
            error,
            m_defect: (1.0 - m).abs(),
            res,
        });

        coeffs = next;
        samples = grid.synthesize(&coeffs);

        if !error.is_finite() || !res.is_finite() {
            return Err(Error::DivergenceDetected { iters: iter + 1, trace });
        }
        if error <= cfg.tol_error && (1.0 - m).abs() <= cfg.tol_m && res <= cfg.tol_res {
            return Ok((PeriodicField::from_coeffs(&grid, coeffs), trace));
        }
        if iter >= DIVERGENCE_WINDOW {
            let before = trace.entries[iter - DIVERGENCE_WINDOW].error;
            if error > DIVERGENCE_GROWTH * before {
                return Err(Error::DivergenceDetected { iters: iter + 1, trace });
            }
        }
    }
    let iters = trace.iters();
    Err(Error::MaxItersExceeded { iters, trace })
}

/// `c = (1 − w + (1/π)∫ψ)^{-1}`.
pub fn recover_speed(psi: &PeriodicField, w: f64) -> Result<f64> {
    let den = 1.0 - w + psi.integral() / std::f64::consts::PI;
    if !(den.abs() >= 1e-12) {
        return Err(Error::SingularSpeed { denominator: den });
    }
    Ok(1.0 / den)
}

/// `A = ½[c²w² − (c−1)²]`.
pub fn recover_a(c: f64, w: f64) -> f64 {
    0.5 * (c * c * w * w - (c - 1.0) * (c - 1.0))
}

/// Location of the maximum of the Fourier interpolant, refined from the grid
/// argmax by Newton's method on the derivative.
fn peak_location(f: &PeriodicField) -> f64 {
    let grid = f.grid();
    let j = f
        .samples()
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |(bj, bv), (j, &v)| if v > bv { (j, v) } else { (bj, bv) },
        )
        .0;
    let mut y = grid.node(j);
    for _ in 0..8 {
        let (mut d1, mut d2) = (0.0, 0.0);
        for (jj, c) in f.coeffs().iter().enumerate() {
            if jj == grid.n_points() / 2 {
                continue;
            }
            let k = grid.mode(jj) as f64;
            let e = c * Complex64::from_polar(1.0, k * y);
            d1 += (e * Complex64::new(0.0, k)).re;
            d2 -= k * k * e.re;
        }
        if d2 >= 0.0 {
            break;
        }
        let step = d1 / d2;
        y -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    y
}

/// Shifts the field so its maximum sits at `x = 0`.
pub fn recenter(f: &PeriodicField) -> PeriodicField {
    let y = peak_location(f);
    if y.abs() < 1e-13 {
        f.clone()
    } else {
        f.translated(-y)
    }
}

/// True when the field is constant to within round-off.
fn is_constant(f: &PeriodicField) -> bool {
    let osc = f.max() - f.min();
    osc <= 1e-8 * f.sup_norm().max(1e-300)
}

/// Full pipeline at fixed `w`: iterate, re-centre, recover `(c, A)`, map back
/// to the zero-mean profile and validate.
pub fn solve_wave(
    w: f64,
    alpha: FractionalOrder,
    cfg: &SolverConfig,
    guess: Option<&PeriodicField>,
) -> Result<WaveSolution> {
    cfg.validate()?;
    let grid = Grid::new(cfg.n_points)?;
    let psi0 = match guess {
        Some(g) => g.resampled(&grid),
        None => initial_guess_psi(0.2, alpha, &grid)?,
    };
    let (psi, trace) = iterate_psi(w, alpha, &psi0, cfg)?;
    if is_constant(&psi) {
        return Err(Error::ValidationFailed(format!(
            "iteration at w = {w} converged to a constant state (trivial wave)"
        )));
    }
    let psi = recenter(&psi);
    let c = recover_speed(&psi, w)?;
    if !(c > 0.5) {
        return Err(Error::ValidationFailed(format!(
            "recovered speed c = {c} at w = {w} is not above 1/2"
        )));
    }
    let a = recover_a(c, w);
    let phi = psi.scale(2.0 * c).add_constant((c - 1.0) - c * w).zero_mean_project();
    let sol = WaveSolution {
        phi,
        psi,
        alpha,
        c,
        w,
        a,
        trace,
        method: Method::Petviashvili,
    };
    sol.validate(10.0 * cfg.tol_res)?;
    Ok(sol)
}

/// Solves for the wave of prescribed speed by searching over `w > 1`.
///
/// The branch reachable by the iteration has `c` increasing in `w`; the
/// search brackets the target (expanding upward or halving `w − 1` downward)
/// and then runs an Illinois-modified regula falsi, warm-starting every solve
/// from the closest converged ψ.
pub fn solve_wave_at_speed(
    c_target: f64,
    alpha: FractionalOrder,
    cfg: &SolverConfig,
    w_hint: Option<f64>,
    guess: Option<&PeriodicField>,
) -> Result<WaveSolution> {
    if !(c_target.is_finite() && c_target > 0.5) {
        return Err(invalid("c", format!("{c_target} must exceed 1/2")));
    }
    cfg.validate()?;
    let tol = 1e-12 * c_target;
    let mut warm: Option<PeriodicField> = guess.cloned();

    // A failed or invalid solve is treated as lying above the target: on the
    // reachable branch this happens only past the large-w end.
    let eval = |w: f64, warm: &mut Option<PeriodicField>| -> (f64, Option<WaveSolution>) {
        let attempt = solve_wave(w, alpha, cfg, warm.as_ref());
        let attempt = match attempt {
            Ok(s) => Ok(s),
            Err(_) if warm.is_some() => solve_wave(w, alpha, cfg, None),
            Err(e) => Err(e),
        };
        match attempt {
            Ok(sol) => {
                *warm = Some(sol.psi.clone());
                (sol.c, Some(sol))
            }
            Err(_) => (f64::INFINITY, None),
        }
    };

    let hinted = w_hint.filter(|w| *w > 1.0);
    let mut w = hinted.unwrap_or(1.5);
    // Bracket expansion factor on w − 1: cautious near a hint, then geometric.
    let mut grow: f64 = if hinted.is_some() { 1.02 } else { 1.6 };
    let (mut c, mut sol) = eval(w, &mut warm);
    if let Some(s) = sol.as_ref() {
        if (c - c_target).abs() <= tol {
            return Ok(s.clone());
        }
    }
    let (mut lo, mut hi): ((f64, f64), (f64, f64));
    let mut best = sol.take();
    if c < c_target {
        lo = (w, c);
        loop {
            w = 1.0 + grow * (w - 1.0);
            grow = (grow * grow).min(1.6);
            if w > 1e6 {
                return Err(Error::SpeedUnreachable { target: c_target });
            }
            let (cn, s) = eval(w, &mut warm);
            c = cn;
            if c >= c_target {
                hi = (w, c);
                if s.is_some() {
                    best = s;
                }
                break;
            }
            lo = (w, c);
            best = s;
        }
    } else {
        hi = (w, c);
        loop {
            w = 1.0 + (w - 1.0) / grow.min(2.0);
            grow = (grow * grow).min(2.0);
            if w - 1.0 < 1e-6 {
                return Err(Error::SpeedUnreachable { target: c_target });
            }
            let (cn, s) = eval(w, &mut warm);
            c = cn;
            if c < c_target {
                lo = (w, c);
                best = s;
                break;
            }
            hi = (w, c);
        }
    }

    // Illinois iteration on f(w) = c(w) − target.
    let mut side = 0i8;
    let (mut flo, mut fhi) = (lo.1 - c_target, hi.1 - c_target);
    for _ in 0..200 {
        let wn = if fhi.is_finite() {
            (lo.0 * fhi - hi.0 * flo) / (fhi - flo)
        } else {
            0.5 * (lo.0 + hi.0)
        };
        let wn = if wn > lo.0 && wn < hi.0 {
            wn
        } else {
            0.5 * (lo.0 + hi.0)
        };
        let (cn, s) = eval(wn, &mut warm);
        let f = cn - c_target;
        if let Some(s) = s {
            if f.abs() <= tol {
                return Ok(s);
            }
            let better = best.as_ref().map(|b| f.abs() < (b.c - c_target).abs()).unwrap_or(true);
            if better {
                best = Some(s);
            }
        }
        if f < 0.0 {
            lo = (wn, cn);
            flo = f;
            if side == -1 && fhi.is_finite() {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = (wn, cn);
            fhi = f;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if hi.0 - lo.0 <= 4.0 * f64::EPSILON * hi.0 {
            break;
        }
    }
    match best {
        Some(s) if (s.c - c_target).abs() <= 1e-9 * c_target => Ok(s),
        _ => Err(Error::SpeedUnreachable { target: c_target }),
    }
}
