//! Scalar indicators along the branch: `A′(c)`, `d(c)`, `γ(c)` and the
//! constraint matrix `S(0)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{b_functional, cubic_integral, half_derivative_energy, FractionalOrder, PeriodicField};
use crate::wave::Method;

/// `|d|` below which the constraint matrix is treated as singular.
pub const D_DEGENERATE: f64 = 1e-8;

/// Integration constant of a solved wave, tagged with the solver that made it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedSample {
    pub c: f64,
    pub a: f64,
    pub method: Method,
}

fn check_stencil(samples: &[SpeedSample]) -> Result<()> {
    let m = samples[0].method;
    if samples.iter().any(|s| s.method != m) {
        return Err(Error::InconsistentSpacing);
    }
    let span = samples[samples.len() - 1].c - samples[0].c;
    if !(span > 0.0) {
        return Err(Error::InconsistentSpacing);
    }
    let h = span / (samples.len() - 1) as f64;
    for (i, s) in samples.iter().enumerate() {
        if (s.c - samples[0].c - i as f64 * h).abs() > 1e-9 * span {
            return Err(Error::InconsistentSpacing);
        }
    }
    Ok(())
}

/// `d = 1 + 2A − c − cA′`.
pub fn d_from(c: f64, a: f64, a_prime: f64) -> f64 {
    1.0 + 2.0 * a - c - c * a_prime
}

/// Central-difference `(d, A′)` at the middle of three equally spaced samples.
pub fn indicator_d(samples: &[SpeedSample; 3]) -> Result<(f64, f64)> {
    check_stencil(samples)?;
    let [lo, mid, hi] = samples;
    let a_prime = (hi.a - lo.a) / (hi.c - lo.c);
    Ok((d_from(mid.c, mid.a, a_prime), a_prime))
}

/// Richardson-extrapolated `(d, A′)` from samples at `c − h, c − h/2, c, c + h/2, c + h`.
pub fn indicator_d_richardson(samples: &[SpeedSample; 5]) -> Result<(f64, f64)> {
    check_stencil(samples)?;
    let wide = (samples[4].a - samples[0].a) / (samples[4].c - samples[0].c);
    let narrow = (samples[3].a - samples[1].a) / (samples[3].c - samples[1].c);
    let a_prime = (4.0 * narrow - wide) / 3.0;
    let mid = samples[2];
    Ok((d_from(mid.c, mid.a, a_prime), a_prime))
}

/// `γ(c) = ∫ φ³ dx`.
pub fn gamma(phi: &PeriodicField) -> f64 {
    cubic_integral(phi)
}

/// `B_c(φ)`.
pub fn b_c(phi: &PeriodicField, c: f64, alpha: FractionalOrder) -> f64 {
    b_functional(phi, c, alpha)
}

/// `P(φ) = ½∫[(D^{α/2}φ)² + φ²]`.
pub fn momentum(phi: &PeriodicField, alpha: FractionalOrder) -> f64 {
    0.5 * (half_derivative_energy(phi, alpha) + phi.norm_sq())
}

/// Determinant of `S(0)` in the form `(4π²/(dc))(A′ + B_c/π)`.
pub fn det_s0(d: f64, a_prime: f64, b_c: f64, c: f64) -> Result<f64> {
    if d.abs() < D_DEGENERATE {
        return Err(Error::DegenerateD { d });
    }
    Ok(4.0 * PI * PI / (d * c) * (a_prime + b_c / PI))
}

/// First entry `⟨L̃⁻¹1, 1⟩` in the form `−2π/(dc)`; only its sign is used.
pub fn s11_sign_form(d: f64, c: f64) -> Result<f64> {
    if d.abs() < D_DEGENERATE {
        return Err(Error::DegenerateD { d });
    }
    Ok(-2.0 * PI / (d * c))
}

/// The constraint matrix `S(0)` for `L̃ = L/c` and constraint directions
/// `1, (D^α + 1)φ`, written through `A′`, `d` and `P(φ)`.
pub fn s0_closed_form(c: f64, a: f64, a_prime: f64, p: f64) -> Result<[[f64; 2]; 2]> {
    let d = d_from(c, a, a_prime);
    if d.abs() < D_DEGENERATE {
        return Err(Error::DegenerateD { d });
    }
    let s11 = -2.0 * PI * c / d;
    let s12 = 2.0 * PI * c * a_prime / d;
    let s22 = -2.0 * p + (c - 1.0 - 2.0 * a) * 2.0 * PI * a_prime / d;
    Ok([[s11, s12], [s12, s22]])
}

/// `det S(0) = (4π²c/d)(A′ + P(φ)/π)`, the determinant of [`s0_closed_form`].
pub fn det_s0_closed_form(d: f64, a_prime: f64, p: f64, c: f64) -> Result<f64> {
    if d.abs() < D_DEGENERATE {
        return Err(Error::DegenerateD { d });
    }
    Ok(4.0 * PI * PI * c / d * (a_prime + p / PI))
}

/// `S(0)` computed directly: solves `L̃ g = f` on the even cosine subspace
/// (modes `0..=K`) for both constraint directions.
pub fn s0_by_inversion(phi: &PeriodicField, c: f64, alpha: FractionalOrder, k_max: usize) -> Result<[[f64; 2]; 2]> {
    if k_max == 0 {
        return Err(invalid("k_max", "must be positive"));
    }
    let h = |k: i64, j: i64| -> f64 {
        let diag = if k == j { alpha.symbol(k) + 1.0 - 1.0 / c } else { 0.0 };
        diag - phi.coeff(k - j).re / c
    };
    let r = DMatrix::from_fn(k_max + 1, k_max + 1, |k, j| {
        let (k, j) = (k as i64, j as i64);
        if j == 0 {
            h(k, 0)
        } else {
            h(k, j) + h(k, -j)
        }
    });
    let one = DVector::from_fn(k_max + 1, |k, _| if k == 0 { 1.0 } else { 0.0 });
    let dphi = phi.apply_symbol(|k| alpha.symbol(k) + 1.0);
    let f2 = DVector::from_fn(k_max + 1, |k, _| dphi.coeff(k as i64).re);
    let lu = r.lu();
    let g1 = lu.solve(&one).ok_or(Error::SingularJacobian)?;
    let g2 = lu.solve(&f2).ok_or(Error::SingularJacobian)?;
    // ⟨g, f⟩ for even fields from their non-negative modes
    let inner = |x: &DVector<f64>, y: &DVector<f64>| {
        2.0 * PI * (x[0] * y[0] + 2.0 * (1..=k_max).map(|k| x[k] * y[k]).sum::<f64>())
    };
    let s11 = inner(&g1, &one);
    let s12 = inner(&g1, &f2);
    let s21 = inner(&g2, &one);
    let s22 = inner(&g2, &f2);
    Ok([[s11, 0.5 * (s12 + s21)], [0.5 * (s12 + s21), s22]])
}

/// `γ(c)` sample for a finite-difference derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSample {
    pub c: f64,
    pub gamma: f64,
}

/// Finite-difference `γ′` against two closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCheck {
    pub finite_difference: f64,
    /// `12 P(φ)`, which follows from `∫φ = 0`, the profile equation and its c-derivative.
    pub identity: f64,
    /// `3(8πA/c − γ/c)`.
    pub alternative_identity: f64,
}

impl GammaCheck {
    pub fn relative_error(&self) -> f64 {
        (self.finite_difference - self.identity).abs() / self.identity.abs().max(1e-300)
    }

    pub fn alternative_relative_error(&self) -> f64 {
        (self.finite_difference - self.alternative_identity).abs() / self.alternative_identity.abs().max(1e-300)
    }
}

/// Compares the centred difference of `γ` with the closed forms at the middle sample.
pub fn gamma_prime_crosscheck(
    samples: &[GammaSample; 3],
    phi: &PeriodicField,
    alpha: FractionalOrder,
    a: f64,
) -> GammaCheck {
    let [lo, mid, hi] = samples;
    let c = mid.c;
    GammaCheck {
        finite_difference: (hi.gamma - lo.gamma) / (hi.c - lo.c),
        identity: 12.0 * momentum(phi, alpha),
        alternative_identity: 3.0 * (8.0 * PI * a / c - mid.gamma / c),
    }
}
