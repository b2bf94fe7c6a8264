//! Parameter sweeps in c: solve, differentiate `A(c)`, count eigenvalues.

use std::fmt::Write as _;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::indicators::{
    b_c, gamma, gamma_prime_crosscheck, indicator_d, indicator_d_richardson, GammaSample, SpeedSample,
};
use super::{analyze, AnalysisConfig, Verdict};
use crate::error::{invalid, Error, Result};
use crate::newton::{Continuation, NewtonConfig};
use crate::petviashvili::{solve_wave_at_speed, SolverConfig};
use crate::spectral::FractionalOrder;
use crate::wave::{Method, WaveSolution};

/// Settings shared by every row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub solver: SolverConfig,
    pub newton: NewtonConfig,
    pub analysis: AnalysisConfig,
    /// Half-width `h` of the centred difference for `A′`.
    pub fd_step: f64,
    /// Rows with `|d|` below this are recomputed with Richardson extrapolation.
    pub richardson_below: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let solver = SolverConfig::default().with_n_points(4096);
        Self {
            solver,
            // Large-amplitude waves at small α need about 2000 cosine modes.
            newton: NewtonConfig {
                k_modes: 2048,
                ..NewtonConfig::default()
            },
            analysis: AnalysisConfig::default(),
            fd_step: 1e-3,
            richardson_below: 0.1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.fd_step > 0.0 && self.fd_step < 0.05) {
            return Err(invalid("fd_step", format!("{} must lie in (0, 0.05)", self.fd_step)));
        }
        if !(self.richardson_below >= 0.0) {
            return Err(invalid("richardson_below", "must be non-negative"));
        }
        if self.newton.k_modes < 2 {
            return Err(invalid("newton.k_modes", "must be at least 2"));
        }
        Ok(())
    }
}

/// One row of a [`ContinuationTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationRow {
    pub c: f64,
    pub w: f64,
    pub a: f64,
    pub a_prime: f64,
    pub d: f64,
    pub b_c: f64,
    pub gamma: f64,
    /// Sign of `det S(0)`; zero when `|d|` is degenerate.
    pub det_s0_sign: i8,
    pub n_neg: usize,
    pub n_zero: usize,
    pub method: Method,
    pub richardson: bool,
    pub residual: f64,
    pub kernel_residual: f64,
    pub gamma_prime_fd: f64,
    pub gamma_prime_identity: f64,
    pub verdict: Verdict,
}

/// Rows of a sweep in increasing c, plus the speeds that could not be solved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationTable {
    pub alpha: f64,
    pub rows: Vec<ContinuationRow>,
    pub failures: Vec<(f64, String)>,
}

impl ContinuationTable {
    pub const CSV_HEADER: &'static str = "c,w,A,Aprime,d,Bc,gamma,detS0sign,n_neg,n_zero,method";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{},{}",
                r.c, r.w, r.a, r.a_prime, r.d, r.b_c, r.gamma, r.det_s0_sign, r.n_neg, r.n_zero, r.method
            );
        }
        out
    }

    /// Rows produced by the given solver.
    pub fn by_method(&self, m: Method) -> impl Iterator<Item = &ContinuationRow> {
        self.rows.iter().filter(move |r| r.method == m)
    }
}

/// The solved stencil around one speed.
#[derive(Debug, Clone)]
struct Stencil {
    centre: WaveSolution,
    a_prime: f64,
    d: f64,
    richardson: bool,
    gamma_lo: GammaSample,
    gamma_hi: GammaSample,
}

/// Runs sweeps for one fractional order. Petviashvili is tried first at
/// every speed; speeds it cannot reach fall back to Newton continuation
/// along the branch from the bifurcation point.
pub struct Sweeper {
    pub alpha: FractionalOrder,
    pub cfg: SweepConfig,
    branch: Mutex<Option<Continuation>>,
}

impl Sweeper {
    pub fn new(alpha: FractionalOrder, cfg: SweepConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            alpha,
            cfg,
            branch: Mutex::new(None),
        })
    }

    fn stencil_with(
        &self,
        c: f64,
        force_richardson: bool,
        solve: &mut dyn FnMut(f64) -> Result<WaveSolution>,
    ) -> Result<Stencil> {
        let h = self.cfg.fd_step;
        if !(c - h > 0.5) {
            return Err(invalid(
                "c",
                format!("{c} is too close to 1/2 for a stencil of width {h}"),
            ));
        }
        let centre = solve(c)?;
        let lo = solve(c - h)?;
        let hi = solve(c + h)?;
        let sample = |s: &WaveSolution, at: f64| SpeedSample {
            c: at,
            a: s.a,
            method: s.method,
        };
        let (mut d, mut a_prime) = indicator_d(&[sample(&lo, c - h), sample(&centre, c), sample(&hi, c + h)])?;
        let mut richardson = false;
        if force_richardson || d.abs() < self.cfg.richardson_below {
            let lh = solve(c - h / 2.0)?;
            let hh = solve(c + h / 2.0)?;
            (d, a_prime) = indicator_d_richardson(&[
                sample(&lo, c - h),
                sample(&lh, c - h / 2.0),
                sample(&centre, c),
                sample(&hh, c + h / 2.0),
                sample(&hi, c + h),
            ])?;
            richardson = true;
        }
        Ok(Stencil {
            gamma_lo: GammaSample {
                c: c - h,
                gamma: gamma(&lo.phi),
            },
            gamma_hi: GammaSample {
                c: c + h,
                gamma: gamma(&hi.phi),
            },
            centre,
            a_prime,
            d,
            richardson,
        })
    }

    fn petviashvili_stencil(&self, c: f64, force_richardson: bool) -> Result<Stencil> {
        let centre = solve_wave_at_speed(c, self.alpha, &self.cfg.solver, None, None)?;
        let (w0, psi0) = (centre.w, centre.psi.clone());
        let mut first = Some(centre);
        let mut solve = |ci: f64| -> Result<WaveSolution> {
            if let Some(s) = first.take() {
                return Ok(s);
            }
            solve_wave_at_speed(ci, self.alpha, &self.cfg.solver, Some(w0), Some(&psi0))
        };
        self.stencil_with(c, force_richardson, &mut solve)
    }

    fn newton_stencil(&self, c: f64, force_richardson: bool) -> Result<Stencil> {
        let mut guard = self.branch.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(Continuation::start(self.alpha, self.cfg.newton, c)?);
        }
        let branch = guard.as_mut().expect("initialised above");
        let mut solve = |ci: f64| branch.advance_to(ci);
        self.stencil_with(c, force_richardson, &mut solve)
    }

    fn stencil(&self, c: f64, force_richardson: bool) -> Result<Stencil> {
        self.petviashvili_stencil(c, force_richardson)
            .or_else(|_| self.newton_stencil(c, force_richardson))
    }

    /// Solves the wave at speed `c` with whichever solver reaches it.
    pub fn solve(&self, c: f64) -> Result<WaveSolution> {
        solve_wave_at_speed(c, self.alpha, &self.cfg.solver, None, None).or_else(|_| {
            let mut guard = self.branch.lock().unwrap_or_else(|p| p.into_inner());
            if guard.is_none() {
                *guard = Some(Continuation::start(self.alpha, self.cfg.newton, c)?);
            }
            guard.as_mut().expect("initialised above").advance_to(c)
        })
    }

    /// `(d, A′)` at `c`, Richardson-extrapolated.
    pub fn d_at(&self, c: f64) -> Result<(f64, f64)> {
        let s = self.stencil(c, true)?;
        Ok((s.d, s.a_prime))
    }

    fn row(&self, s: &Stencil) -> Result<ContinuationRow> {
        let sol = &s.centre;
        let report = analyze(sol, s.a_prime, &self.cfg.analysis)?;
        let check = gamma_prime_crosscheck(
            &[
                s.gamma_lo,
                GammaSample {
                    c: sol.c,
                    gamma: gamma(&sol.phi),
                },
                s.gamma_hi,
            ],
            &sol.phi,
            self.alpha,
            sol.a,
        );
        Ok(ContinuationRow {
            c: sol.c,
            w: sol.w,
            a: sol.a,
            a_prime: s.a_prime,
            d: s.d,
            b_c: b_c(&sol.phi, sol.c, self.alpha),
            gamma: gamma(&sol.phi),
            det_s0_sign: report.det_s0.map(|v| v.signum() as i8).unwrap_or(0),
            n_neg: report.n_neg,
            n_zero: report.n_zero,
            method: sol.method,
            richardson: s.richardson,
            residual: sol.residual(),
            kernel_residual: report.kernel_residual,
            gamma_prime_fd: check.finite_difference,
            gamma_prime_identity: check.identity,
            verdict: report.verdict,
        })
    }

    /// Sweeps the given speeds (sorted internally).
    pub fn run(&self, speeds: &[f64]) -> ContinuationTable {
        let mut cs: Vec<f64> = speeds.to_vec();
        cs.sort_by(|a, b| a.total_cmp(b));
        cs.dedup();
        let first: Vec<Result<Stencil>> = cs.par_iter().map(|&c| self.petviashvili_stencil(c, false)).collect();
        let stencils: Vec<Result<Stencil>> = cs
            .iter()
            .zip(first)
            .map(|(&c, r)| r.or_else(|_| self.newton_stencil(c, false)))
            .collect();
        let rows: Vec<std::result::Result<ContinuationRow, (f64, String)>> = cs
            .par_iter()
            .zip(stencils.par_iter())
            .map(|(&c, s)| match s {
                Ok(s) => self.row(s).map_err(|e| (c, e.to_string())),
                Err(e) => Err((c, e.to_string())),
            })
            .collect();
        let mut table = ContinuationTable {
            alpha: self.alpha.value(),
            rows: Vec::new(),
            failures: Vec::new(),
        };
        for r in rows {
            match r {
                Ok(row) => table.rows.push(row),
                Err(f) => table.failures.push(f),
            }
        }
        table
    }

    /// `steps + 1` equally spaced speeds on `[c_min, c_max]`.
    pub fn sweep(&self, c_min: f64, c_max: f64, steps: usize) -> Result<ContinuationTable> {
        if !(c_min > 0.5 && c_max > c_min && steps >= 1) {
            return Err(invalid(
                "range",
                format!("need 1/2 < c_min < c_max, steps ≥ 1; got [{c_min}, {c_max}], {steps}"),
            ));
        }
        let cs: Vec<f64> = (0..=steps)
            .map(|i| c_min + (c_max - c_min) * i as f64 / steps as f64)
            .collect();
        Ok(self.run(&cs))
    }
}

/// Locates the first sign change of `d` in the table and refines it with an
/// Illinois iteration until `|d| ≤ tol`. `None` when `d` keeps one sign.
pub fn critical_speed(sweeper: &Sweeper, table: &ContinuationTable, tol: f64) -> Result<Option<f64>> {
    let Some(pair) = table.rows.windows(2).find(|p| p[0].d.signum() != p[1].d.signum()) else {
        return Ok(None);
    };
    let (mut lo, mut hi) = ((pair[0].c, pair[0].d), (pair[1].c, pair[1].d));
    let mut side = 0i8;
    for _ in 0..60 {
        let c = (lo.0 * hi.1 - hi.0 * lo.1) / (hi.1 - lo.1);
        let c = if c > lo.0 && c < hi.0 { c } else { 0.5 * (lo.0 + hi.0) };
        let (d, _) = sweeper.d_at(c)?;
        if d.abs() <= tol || hi.0 - lo.0 <= 1e-12 {
            return Ok(Some(c));
        }
        if d.signum() == lo.1.signum() {
            lo = (c, d);
            if side == -1 {
                hi.1 *= 0.5;
            }
            side = -1;
        } else {
            hi = (c, d);
            if side == 1 {
                lo.1 *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::MaxItersExceeded {
        iters: 60,
        trace: Default::default(),
    })
}
