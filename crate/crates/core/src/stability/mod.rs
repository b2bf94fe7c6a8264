//! Orbital stability of periodic waves.
//!
//! The count is `n(L̃) − n(S(0)) − z(S(0))`, where `L̃ = L/c` is the
//! linearised operator and `S(0)` the 2×2 matrix of `L̃⁻¹` tested against the
//! constraint directions `1` and `(D^α + 1)φ`. Its sign structure is fixed by
//! `d(c) = 1 + 2A − c − cA′` and `det S(0)`.

pub mod indicators;
pub mod operator;
pub mod sweep;

use serde::{Deserialize, Serialize};

pub use indicators::{
    b_c, d_from, det_s0, det_s0_closed_form, gamma, gamma_prime_crosscheck, indicator_d, indicator_d_richardson,
    momentum, s0_by_inversion, s0_closed_form, s11_sign_form, GammaCheck, GammaSample, SpeedSample, D_DEGENERATE,
};
pub use operator::{adaptive_truncation, assemble_operator, eigen_counts, Basis, EigenCounts, OperatorMatrix, Scaling};
pub use sweep::{critical_speed, ContinuationRow, ContinuationTable, SweepConfig, Sweeper};

use crate::error::{Error, Result};
use crate::wave::WaveSolution;

/// Outcome of the index count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    /// `|d|` is too small for `S(0)` to be inverted reliably.
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Number of negative and zero eigenvalues of `S(0)` from `det` and the
/// first diagonal entry.
pub fn s0_inertia(det: f64, s11: f64) -> (usize, usize) {
    if det < 0.0 {
        (1, 0)
    } else if det > 0.0 {
        if s11 < 0.0 {
            (2, 0)
        } else {
            (0, 0)
        }
    } else {
        (usize::from(s11 < 0.0), 1)
    }
}

/// Verdict from the negative count of `L̃` and `(d, det S(0))`.
pub fn verdict(n_neg: usize, d: f64, det: Option<f64>, c: f64) -> Verdict {
    let (Some(det), Ok(s11)) = (det, s11_sign_form(d, c)) else {
        return Verdict::Degenerate;
    };
    let (n0, z0) = s0_inertia(det, s11);
    if n_neg == n0 + z0 {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

/// Full spectral report for one wave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub c: f64,
    pub alpha: f64,
    pub k_operator: usize,
    pub basis: Basis,
    pub n_neg: usize,
    pub n_zero: usize,
    pub eigen_tail: Vec<f64>,
    /// `‖L̃φ′‖ / (‖L̃‖‖φ′‖)`.
    pub kernel_residual: f64,
    pub a_prime: f64,
    pub d: f64,
    pub b_c: f64,
    pub det_s0: Option<f64>,
    pub verdict: Verdict,
}

/// Options for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Smallest operator truncation; refined while the profile is under-resolved.
    pub k_min: usize,
    pub k_cap: usize,
    /// Zero-eigenvalue tolerance; the scale-aware default when `None`.
    pub zero_tol: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            k_min: 64,
            k_cap: 1024,
            zero_tol: None,
        }
    }
}

/// Spectral analysis of `L̃` at a solved wave, given `A′(c)` at that speed.
pub fn analyze(sol: &WaveSolution, a_prime: f64, cfg: &AnalysisConfig) -> Result<StabilityReport> {
    let k_cap = cfg.k_cap.min(sol.phi.grid().k_max().saturating_sub(1) / 2).max(1);
    let k = adaptive_truncation(&sol.phi, cfg.k_min.min(k_cap), k_cap);
    let lt = assemble_operator(&sol.phi, sol.c, sol.alpha, k)?.tilde();
    let tol = cfg.zero_tol.unwrap_or_else(|| lt.default_zero_tol());
    let counts = eigen_counts(&lt, tol)?;
    let (lphi, nphi) = lt.apply_norms(&sol.phi.derivative());
    let kernel_residual = lphi / (counts.norm * nphi).max(1e-300);
    let d = d_from(sol.c, sol.a, a_prime);
    let bc = b_c(&sol.phi, sol.c, sol.alpha);
    let det = match det_s0(d, a_prime, bc, sol.c) {
        Ok(v) => Some(v),
        Err(Error::DegenerateD { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(StabilityReport {
        c: sol.c,
        alpha: sol.alpha.value(),
        k_operator: k,
        basis: lt.basis,
        n_neg: counts.n_neg,
        n_zero: counts.n_zero,
        eigen_tail: counts.eigen_tail,
        kernel_residual,
        a_prime,
        d,
        b_c: bc,
        det_s0: det,
        verdict: verdict(counts.n_neg, d, det, sol.c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inertia_cases() {
        assert_eq!(s0_inertia(-1.0, -1.0), (1, 0));
        assert_eq!(s0_inertia(1.0, -1.0), (2, 0));
        assert_eq!(s0_inertia(1.0, 1.0), (0, 0));
    }

    #[test]
    fn verdict_matches_sign_pattern() {
        // d > 0 and positive determinant: two negative directions absorbed
        assert_eq!(verdict(2, 0.3, Some(5.0), 0.7), Verdict::Stable);
        assert_eq!(verdict(1, 0.3, Some(5.0), 0.7), Verdict::Unstable);
        // d < 0: determinant negative, one absorbed
        assert_eq!(verdict(1, -0.3, Some(-5.0), 0.7), Verdict::Stable);
        assert_eq!(verdict(2, -0.3, Some(-5.0), 0.7), Verdict::Unstable);
        assert_eq!(verdict(1, 1e-10, None, 0.7), Verdict::Degenerate);
    }
}
