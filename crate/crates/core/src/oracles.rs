//! Closed-form reference waves.
//!
//! * α = 2: the dnoidal wave `φ = a*(dn²(Kx/π, κ) − E/K)` with `a* = 12cK²/π²`.
//! * α = 1: the regularised Benjamin–Ono wave `ψ = sinh γ / (cosh γ − cos x)`.
//! * any α: the Stokes-type small-amplitude expansion about `c = 1/2`.
//!
//! These serve as initial guesses and as oracles in tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_elliptic_ke, integration_constant_alpha2, jacobi_dn, modulus_from_speed};
use crate::error::{invalid, Result};
use crate::spectral::{FractionalOrder, Grid, PeriodicField};
use crate::wave::phi_residual;

/// Largest amplitude for which the small-amplitude expansion is trusted.
pub const SMALL_AMPLITUDE_CAP: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Dnoidal,
    Rbo,
    SmallAmplitude,
}

/// A closed-form zero-mean profile together with its speed and constant.
#[derive(Debug, Clone)]
pub struct OracleProfile {
    pub field: PeriodicField,
    pub alpha: FractionalOrder,
    pub c: f64,
    pub a: f64,
    pub kind: OracleKind,
    /// Set when the expansion is used beyond its validity cap.
    pub beyond_validity: bool,
}

impl OracleProfile {
    /// Sup-norm residual of `cD^αφ + (c−1)φ − φ²/2 + A`.
    pub fn residual(&self) -> f64 {
        phi_residual(&self.field, self.alpha, self.c, self.a)
    }
}

/// Exact α = 2 wave travelling at speed `c > 1/2`.
pub fn dnoidal_profile(c: f64, grid: &Grid) -> Result<OracleProfile> {
    let kappa = modulus_from_speed(c)?;
    let (k, e) = complete_elliptic_ke(kappa)?;
    let amp = 12.0 * c * k * k / (PI * PI);
    let samples = grid
        .nodes()
        .into_iter()
        .map(|x| jacobi_dn(k * x / PI, kappa).map(|dn| amp * (dn * dn - e / k)))
        .collect::<Result<Vec<f64>>>()?;
    let field = PeriodicField::from_samples(grid, samples);
    Ok(OracleProfile {
        field,
        alpha: FractionalOrder::new(2.0)?,
        c,
        a: integration_constant_alpha2(kappa)?,
        kind: OracleKind::Dnoidal,
        beyond_validity: false,
    })
}

/// `arcoth(w) = ½ ln((w+1)/(w−1))` for `w > 1`.
pub fn arcoth(w: f64) -> Result<f64> {
    if !(w > 1.0 + 1e-12) {
        return Err(invalid("w", format!("{w} must exceed 1")));
    }
    Ok(0.5 * ((w + 1.0) / (w - 1.0)).ln())
}

/// Positive-form α = 1 wave `ψ = sinh γ / (cosh γ − cos x)`, `γ = arcoth w`.
pub fn rbo_psi(w: f64, grid: &Grid) -> Result<PeriodicField> {
    let g = arcoth(w)?;
    let (s, ch) = (g.sinh(), g.cosh());
    Ok(PeriodicField::from_fn(grid, |x| s / (ch - x.cos())))
}

/// Exact α = 1 wave at speed `c`, with `w = 3 − 1/c`.
pub fn rbo_profile(c: f64, grid: &Grid) -> Result<OracleProfile> {
    let w = 3.0 - 1.0 / c;
    if !(c.is_finite() && w > 1.0 + 1e-12) {
        return Err(invalid("c", format!("{c} gives w = {w} ≤ 1")));
    }
    let psi = rbo_psi(w, grid)?;
    let field = psi.add_constant(-1.0).scale(2.0 * c);
    Ok(OracleProfile {
        field,
        alpha: FractionalOrder::new(1.0)?,
        c,
        a: 4.0 * c * c - 2.0 * c,
        kind: OracleKind::Rbo,
        beyond_validity: false,
    })
}

/// Speed paired with amplitude `a` in the small-amplitude expansion.
pub fn small_amplitude_speed(a: f64, alpha: FractionalOrder) -> f64 {
    let p = 2f64.powf(alpha.value());
    0.5 + a * a / (4.0 * (p + 1.0) * (p - 1.0))
}

/// Two-term Stokes profile `a cos x + a² cos 2x / (2(2^α − 1))`.
pub fn small_amplitude_phi(a: f64, alpha: FractionalOrder, grid: &Grid) -> Result<OracleProfile> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("a", format!("amplitude {a} must be non-negative")));
    }
    let p = 2f64.powf(alpha.value());
    let b2 = a * a / (2.0 * (p - 1.0));
    let field = PeriodicField::from_cosine_series(grid, 0.0, &[a, b2]);
    Ok(OracleProfile {
        field,
        alpha,
        c: small_amplitude_speed(a, alpha),
        a: a * a / 4.0,
        kind: OracleKind::SmallAmplitude,
        beyond_validity: a > SMALL_AMPLITUDE_CAP,
    })
}

/// Default Petviashvili starting guess in the positive form ψ.
pub fn initial_guess_psi(a: f64, alpha: FractionalOrder, grid: &Grid) -> Result<PeriodicField> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid("a", format!("amplitude {a} must be non-negative")));
    }
    let p2 = 2f64.powf(alpha.value()) - 1.0;
    let p3 = 3f64.powf(alpha.value()) - 1.0;
    let mean = 1.0 + a * a * (0.5 - 1.0 / (2.0 * p2));
    let b = [a, a * a / (2.0 * p2), a.powi(3) / (2.0 * p2 * p3)];
    Ok(PeriodicField::from_cosine_series(grid, mean, &b))
}

/// Leading-order value of the indicator d at the bifurcation point, in the
/// closed form `½(−16^α + 14·2^{2α−2} − 3)/(4^α − 1)`.
pub fn small_amplitude_d(alpha: FractionalOrder) -> f64 {
    let a = alpha.value();
    0.5 * (-(16f64.powf(a)) + 14.0 * 2f64.powf(2.0 * a - 2.0) - 3.0) / (4f64.powf(a) - 1.0)
}

/// Slope `A′(c)` at the bifurcation point paired with [`small_amplitude_d`]:
/// `(2^α + 1)(2^α − 1)`.
pub fn small_amplitude_a_prime(alpha: FractionalOrder) -> f64 {
    let p = 2f64.powf(alpha.value());
    (p + 1.0) * (p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn dnoidal_is_zero_mean_and_solves_the_ode() {
        let g = Grid::new(1024).unwrap();
        for &c in &[0.6, 1.0, 1.2181, 2.0] {
            let o = dnoidal_profile(c, &g).unwrap();
            assert!(o.field.mean().abs() < 1e-10, "mean at c={c}");
            assert!(o.residual() < 1e-8, "residual {} at c={c}", o.residual());
            let a_int = o.field.norm_sq() / (4.0 * PI);
            assert!((a_int - o.a).abs() <= 1e-8 * o.a);
        }
        assert!(dnoidal_profile(0.5, &g).is_err());
    }

    #[test]
    fn dnoidal_amplitude_vanishes_at_bifurcation() {
        let g = Grid::new(256).unwrap();
        let o = dnoidal_profile(0.5 + 1e-8, &g).unwrap();
        assert!(o.field.sup_norm() < 1e-3);
    }

    #[test]
    fn exact_profiles_are_single_lobe() {
        let g = Grid::new(512).unwrap();
        let fields = [
            dnoidal_profile(1.2181, &g).unwrap().field,
            rbo_profile(1.2192, &g).unwrap().field,
        ];
        for f in &fields {
            let s = f.samples();
            let o = g.origin_index();
            for j in o..g.n_points() - 1 {
                assert!(s[j + 1] < s[j]);
            }
            for j in 1..o {
                assert!((s[o - j] - s[o + j]).abs() < 1e-10 * f.sup_norm());
            }
        }
    }

    #[test]
    fn cubic_integral_increases_with_speed() {
        let g = Grid::new(1024).unwrap();
        let speeds = [0.65, 0.8, 1.0, 1.3, 1.6, 1.95];
        let gam: Vec<f64> = speeds
            .iter()
            .map(|&c| crate::spectral::cubic_integral(&dnoidal_profile(c, &g).unwrap().field))
            .collect();
        assert!(gam.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rbo_oracle() {
        let g = Grid::new(512).unwrap();
        let o = rbo_profile(1.2192, &g).unwrap();
        assert!((3.0_f64 - 1.0 / 1.2192 - 2.1798).abs() < 1e-4);
        assert!(o.residual() < 1e-8);
        assert!(o.field.mean().abs() < 1e-10);
        let psi = rbo_psi(3.0 - 1.0 / 1.2192, &g).unwrap();
        assert!((psi.integral() / PI - 2.0).abs() < 1e-12);
        assert_eq!(rbo_profile(1.0, &g).unwrap().a, 2.0);
        assert!(rbo_profile(0.5, &g).is_err());
    }

    #[test]
    fn small_amplitude_examples() {
        let g = Grid::new(128).unwrap();
        let z = small_amplitude_phi(0.0, alpha(1.0), &g).unwrap();
        assert_eq!(z.field.sup_norm(), 0.0);
        assert_eq!((z.c, z.a), (0.5, 0.0));
        let o = small_amplitude_phi(0.1, alpha(1.0), &g).unwrap();
        assert!((o.c - (0.5 + 0.01 / 12.0)).abs() < 1e-15);
        assert!(small_amplitude_phi(-0.1, alpha(1.0), &g).is_err());
        assert!(small_amplitude_phi(0.3, alpha(1.0), &g).unwrap().beyond_validity);
    }

    #[test]
    fn small_amplitude_residual_is_cubic() {
        let g = Grid::new(128).unwrap();
        for &a in &[0.3, 0.75, 1.0, 1.5, 2.0] {
            let r: Vec<f64> = [0.05, 0.1, 0.2]
                .iter()
                .map(|&amp| small_amplitude_phi(amp, alpha(a), &g).unwrap().residual())
                .collect();
            for (amp, res) in [0.05, 0.1, 0.2].iter().zip(&r) {
                assert!(*res <= 10.0 * amp * amp * amp, "α={a} a={amp} res={res}");
            }
            let ratio = r[2] / r[1];
            assert!((6.0..=10.0).contains(&ratio), "α={a} ratio={ratio}");
        }
    }

    #[test]
    fn initial_guess_coefficients() {
        let g = Grid::new(64).unwrap();
        let one = initial_guess_psi(0.0, alpha(2.0), &g).unwrap();
        assert!(one.samples().iter().all(|&s| (s - 1.0).abs() < 1e-15));
        let psi = initial_guess_psi(0.2, alpha(2.0), &g).unwrap();
        let b = psi.cosine_coefficients(4);
        assert!((b[0] - 0.2).abs() < 1e-15);
        assert!((b[1] - 0.04 / 6.0).abs() < 1e-15);
        assert!((b[2] - 0.008 / (2.0 * 3.0 * 8.0)).abs() < 1e-15);
        assert!(b[3].abs() < 1e-15);
        assert!((psi.mean() - (1.0 + 0.04 * (0.5 - 1.0 / 6.0))).abs() < 1e-15);
    }

    #[test]
    fn small_amplitude_d_formula() {
        assert!(small_amplitude_d(alpha(0.5)).abs() < 1e-14);
        assert!((small_amplitude_d(alpha(2.0)) + 203.0 / 30.0).abs() < 1e-12);
        assert!(small_amplitude_d(alpha(0.29)) * small_amplitude_d(alpha(0.30)) < 0.0);
    }
}
