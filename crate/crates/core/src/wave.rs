//! Converged traveling waves and the bookkeeping shared by both solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{FractionalOrder, PeriodicField};

/// Which solver produced a wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Petviashvili,
    Newton,
    Hybrid,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Petviashvili => "petviashvili",
            Method::Newton => "newton",
            Method::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "petviashvili" => Ok(Method::Petviashvili),
            "newton" => Ok(Method::Newton),
            "hybrid" => Ok(Method::Hybrid),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// One iteration's diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Sup-norm of the change produced by this iteration.
    pub error: f64,
    /// `|1 − M|` for the stabilising ratio at the current iterate.
    pub m_defect: f64,
    /// Sup-norm residual of the profile equation at the current iterate.
    pub res: f64,
}

/// Per-iteration diagnostics of an iterative solve.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub entries: Vec<TraceEntry>,
    /// Largest odd-part ratio seen across iterates (zero for even runs).
    pub max_asymmetry: f64,
}

impl ConvergenceTrace {
    pub fn push(&mut self, entry: TraceEntry) {
        self.entries.push(entry);
    }

    pub fn iters(&self) -> usize {
        self.entries.len()
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }
}

/// A converged zero-mean periodic traveling wave.
#[derive(Debug, Clone)]
pub struct WaveSolution {
    /// Zero-mean profile φ.
    pub phi: PeriodicField,
    /// Positive form ψ solving `D^α ψ + w ψ − ψ² = 0`.
    pub psi: PeriodicField,
    pub alpha: FractionalOrder,
    pub c: f64,
    pub w: f64,
    /// Integration constant, `A = (1/4π)∫φ²`.
    pub a: f64,
    pub trace: ConvergenceTrace,
    pub method: Method,
}

/// `w = (1/c)√((c−1)² + 2A)`.
pub fn w_from(c: f64, a: f64) -> f64 {
    ((c - 1.0).powi(2) + 2.0 * a).sqrt() / c
}

/// Sup-norm of `cD^αφ + (c−1)φ − φ²/2 + A`.
pub fn phi_residual(phi: &PeriodicField, alpha: FractionalOrder, c: f64, a: f64) -> f64 {
    let lin = phi.fractional_derivative(alpha).lin_comb(c, phi, c - 1.0);
    let r = lin.sub(&phi.square().scale(0.5)).add_constant(a);
    r.sup_norm()
}

impl WaveSolution {
    /// Assembles a solution from φ and the speed; ψ, w and A follow from the
    /// transformation between the two forms.
    pub fn from_phi(
        phi: PeriodicField,
        alpha: FractionalOrder,
        c: f64,
        trace: ConvergenceTrace,
        method: Method,
    ) -> Self {
        let a = phi.norm_sq() / (4.0 * std::f64::consts::PI);
        let w = w_from(c, a);
        let psi = phi.add_constant(c * w - (c - 1.0)).scale(1.0 / (2.0 * c));
        Self {
            phi,
            psi,
            alpha,
            c,
            w,
            a,
            trace,
            method,
        }
    }

    /// Residual of the zero-mean profile equation in sup norm.
    pub fn residual(&self) -> f64 {
        phi_residual(&self.phi, self.alpha, self.c, self.a)
    }

    /// Checks the structural invariants; `res_bound` bounds the φ-equation
    /// residual relative to `‖φ‖_∞`.
    pub fn validate(&self, res_bound: f64) -> Result<()> {
        let fail = |m: String| Err(Error::ValidationFailed(m));
        if !(self.c.is_finite() && self.c > 0.5) {
            return fail(format!("speed c = {} is not above 1/2", self.c));
        }
        let w = w_from(self.c, self.a);
        if (w - self.w).abs() > 1e-10 * self.w.abs().max(1.0) {
            return fail(format!("w = {} inconsistent with (c, A) (expected {w})", self.w));
        }
        let a = 0.5 * (self.c * self.c * self.w * self.w - (self.c - 1.0).powi(2));
        if (a - self.a).abs() > 1e-10 * self.a.abs().max(1e-300) && (a - self.a).abs() > 1e-14 {
            return fail(format!("A = {} inconsistent with (c, w) (expected {a})", self.a));
        }
        if self.phi.mean().abs() > 1e-10 {
            return fail(format!("mean(phi) = {:e} is not zero", self.phi.mean()));
        }
        let amp = self.phi.sup_norm();
        if amp <= 1e-8 {
            return fail("profile is trivial (phi = 0)".into());
        }
        let res = self.residual();
        if res > res_bound * amp {
            return fail(format!("profile residual {res:e} exceeds {:e}", res_bound * amp));
        }
        Ok(())
    }

    /// `(1/2)(max φ − min φ)`.
    pub fn amplitude(&self) -> f64 {
        0.5 * (self.phi.max() - self.phi.min())
    }
}
