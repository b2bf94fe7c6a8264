//! Complete elliptic integrals, the Jacobi `dn` function and the speed–modulus
//! relation of the exact α = 2 (KdV-type) periodic waves.
//!
//! `K` and `E` use the arithmetic–geometric mean; `dn` uses the descending
//! Landen transformation. The modulus convention is `κ` (not the parameter
//! `m = κ²`): `K(κ) = ∫₀^{π/2} dθ / √(1 − κ² sin²θ)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

const AGM_TOL: f64 = 1e-16;

fn check_modulus(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa < 0.0 {
        Err(Error::ModulusOutOfRange {
            kappa,
            reason: "modulus must be non-negative",
        })
    } else if kappa >= 1.0 {
        Err(Error::ModulusOutOfRange {
            kappa,
            reason: "K diverges at κ = 1",
        })
    } else {
        Ok(())
    }
}

/// Both complete integrals at once: `(K(κ), E(κ))`.
pub fn complete_elliptic_ke(kappa: f64) -> Result<(f64, f64)> {
    check_modulus(kappa)?;
    let mut a = 1.0_f64;
    let mut b = (1.0 - kappa * kappa).sqrt();
    let mut c = kappa;
    // E = K (1 − Σ 2^{n−1} c_n²)
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..64 {
        if c.abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow *= 2.0;
        sum += pow * c * c;
    }
    let k = PI / (2.0 * a);
    Ok((k, k * (1.0 - sum)))
}

/// Complete elliptic integral of the first kind.
pub fn complete_elliptic_k(kappa: f64) -> Result<f64> {
    complete_elliptic_ke(kappa).map(|(k, _)| k)
}

/// Complete elliptic integral of the second kind.
pub fn complete_elliptic_e(kappa: f64) -> Result<f64> {
    complete_elliptic_ke(kappa).map(|(_, e)| e)
}

/// Jacobi `(sn, cn, dn)(u, κ)` by descending Landen / AGM.
pub fn jacobi_sn_cn_dn(u: f64, kappa: f64) -> Result<(f64, f64, f64)> {
    check_modulus(kappa)?;
    if kappa == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    let (a, c) = landen_sequences(kappa);
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] * phi.sin() / a[i]).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn ≥ √(1 − κ²), so the square-root form loses nothing for κ < 1 and,
    // unlike cos φ₀ / cos(φ₁ − φ₀), has no 0/0 at u = ±K.
    let dn = (1.0 - kappa * kappa * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

fn landen_sequences(kappa: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![1.0_f64];
    let mut b = (1.0 - kappa * kappa).sqrt();
    let mut c = vec![kappa];
    while c.last().unwrap().abs() > AGM_TOL && a.len() < 64 {
        let an = *a.last().unwrap();
        let next_a = 0.5 * (an + b);
        c.push(0.5 * (an - b));
        b = (an * b).sqrt();
        a.push(next_a);
    }
    (a, c)
}

/// Jacobi delta amplitude `dn(u, κ)`.
pub fn jacobi_dn(u: f64, kappa: f64) -> Result<f64> {
    jacobi_sn_cn_dn(u, kappa).map(|(_, _, dn)| dn)
}

/// `p(κ) = (4κ² − 8)K² + 12KE + π²`, whose unique zero bounds the modulus.
pub fn p_kappa(kappa: f64) -> Result<f64> {
    let (k, e) = complete_elliptic_ke(kappa)?;
    Ok((4.0 * kappa * kappa - 8.0) * k * k + 12.0 * k * e + PI * PI)
}

/// The unique zero `κ₀ ≈ 0.9948` of `p`, located once by bisection.
pub fn kappa_zero() -> f64 {
    static KAPPA0: OnceLock<f64> = OnceLock::new();
    *KAPPA0.get_or_init(|| {
        let (mut lo, mut hi) = (0.99_f64, 0.999_f64);
        // p > 0 below κ₀ and < 0 above
        while hi - lo > 1e-15 {
            let mid = 0.5 * (lo + hi);
            if p_kappa(mid).expect("bracket lies inside [0,1)") > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    })
}

fn check_below_kappa0(kappa: f64) -> Result<()> {
    check_modulus(kappa)?;
    if kappa >= kappa_zero() {
        return Err(Error::ModulusOutOfRange {
            kappa,
            reason: "speed denominator p(κ) is not positive for κ ≥ κ₀",
        });
    }
    Ok(())
}

/// Wave speed `c*(κ) = π² / p(κ)` of the exact α = 2 wave.
pub fn speed_from_modulus(kappa: f64) -> Result<f64> {
    check_below_kappa0(kappa)?;
    Ok(PI * PI / p_kappa(kappa)?)
}

/// Inverse of [`speed_from_modulus`] on `(0, κ₀)`.
pub fn modulus_from_speed(c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.5) {
        return Err(invalid("c", format!("{c} must exceed 1/2")));
    }
    let (mut lo, mut hi) = (0.0_f64, kappa_zero());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if speed_from_modulus(mid)? < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever endpoint has the smaller residual.
    let rl = (speed_from_modulus(lo)? - c).abs();
    let rh = if hi < kappa_zero() {
        (speed_from_modulus(hi)? - c).abs()
    } else {
        f64::INFINITY
    };
    Ok(if rl <= rh { lo } else { hi })
}

/// Integration constant `A(c*)` of the exact α = 2 wave at modulus κ.
pub fn integration_constant_alpha2(kappa: f64) -> Result<f64> {
    check_below_kappa0(kappa)?;
    let (k, e) = complete_elliptic_ke(kappa)?;
    let k2 = kappa * kappa;
    let num = (24.0 * k2 - 24.0) * k.powi(4) + (96.0 - 48.0 * k2) * e * k.powi(3) - 72.0 * k * k * e * e;
    let den = (k2 - 2.0) * k * k + 3.0 * e * k + PI * PI / 4.0;
    Ok(num / (16.0 * den * den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
            let m = 0.5 * (a + b);
            let fm = f(m);
            (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
        }
        #[allow(clippy::too_many_arguments)]
        fn rec(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            fa: f64,
            b: f64,
            fb: f64,
            m: f64,
            fm: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let (lm, flm, left) = simpson(f, a, fa, m, fm);
            let (rm, frm, right) = simpson(f, m, fm, b, fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
        let (fa, fb) = (f(a), f(b));
        let (m, fm, whole) = simpson(f, a, fa, b, fb);
        rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
    }

    #[test]
    fn k_and_e_at_zero() {
        let (k, e) = complete_elliptic_ke(0.0).unwrap();
        assert!((k - PI / 2.0).abs() < 1e-15);
        assert!((e - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn k_and_e_match_quadrature() {
        for &kappa in &[0.5, 0.9, 0.99] {
            let kq = adaptive_simpson(
                &|t: f64| 1.0 / (1.0 - kappa * kappa * t.sin().powi(2)).sqrt(),
                0.0,
                PI / 2.0,
                1e-14,
            );
            let eq = adaptive_simpson(
                &|t: f64| (1.0 - kappa * kappa * t.sin().powi(2)).sqrt(),
                0.0,
                PI / 2.0,
                1e-14,
            );
            let (k, e) = complete_elliptic_ke(kappa).unwrap();
            assert!((k - kq).abs() <= 1e-11 * kq, "K({kappa})");
            assert!((e - eq).abs() <= 1e-11 * eq, "E({kappa})");
        }
    }

    #[test]
    fn e_tends_to_one_and_k_rejects_one() {
        let e = complete_elliptic_e(1.0 - 1e-12).unwrap();
        assert!((e - 1.0).abs() < 1e-9);
        assert!(complete_elliptic_k(1.0).is_err());
        assert!(jacobi_dn(0.3, 1.0).is_err());
    }

    #[test]
    fn legendre_ordering() {
        for i in 1..100 {
            let kappa = i as f64 / 100.0;
            let (k, e) = complete_elliptic_ke(kappa).unwrap();
            assert!(e < k);
        }
    }

    #[test]
    fn dn_special_values() {
        for &kappa in &[0.0, 0.3, 0.5, 0.99] {
            assert!((jacobi_dn(0.0, kappa).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(jacobi_dn(1.7, 0.0).unwrap(), 1.0);
        let k = complete_elliptic_k(0.5).unwrap();
        let (sn, _, dn) = jacobi_sn_cn_dn(k, 0.5).unwrap();
        assert!((sn - 1.0).abs() < 1e-12);
        assert!((dn * dn - (1.0 - 0.25 * sn * sn)).abs() < 1e-12);
        assert!((dn - 0.75_f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn dn_periodic_and_bounded() {
        for &kappa in &[0.3, 0.8, 0.98] {
            let k = complete_elliptic_k(kappa).unwrap();
            let floor = (1.0 - kappa * kappa).sqrt();
            for i in 0..50 {
                let u = -3.0 + 0.17 * i as f64;
                let d = jacobi_dn(u, kappa).unwrap();
                let d2 = jacobi_dn(u + 2.0 * k, kappa).unwrap();
                assert!((d - d2).abs() < 1e-10);
                assert!(d <= 1.0 + 1e-14 && d >= floor - 1e-14);
            }
        }
    }

    #[test]
    fn dn_satisfies_its_ode() {
        // (dn')² = (1 − dn²)(dn² − (1 − κ²))
        let kappa = 0.7_f64;
        let h = 1e-5;
        for i in 0..10 {
            let u = 0.13 + 0.29 * i as f64;
            let d = jacobi_dn(u, kappa).unwrap();
            let dp = (jacobi_dn(u + h, kappa).unwrap() - jacobi_dn(u - h, kappa).unwrap()) / (2.0 * h);
            let rhs = (1.0 - d * d) * (d * d - (1.0 - kappa * kappa));
            assert!((dp * dp - rhs).abs() < 1e-8);
        }
    }

    #[test]
    fn kappa_zero_location() {
        let k0 = kappa_zero();
        assert!((k0 - 0.994).abs() < 1e-3);
        assert!(p_kappa(k0).unwrap().abs() < 1e-9);
        assert!(complete_elliptic_k(0.994).unwrap().is_finite());
        assert!(speed_from_modulus(k0).is_err());
    }

    #[test]
    fn speed_limits_and_monotonicity() {
        assert!((speed_from_modulus(1e-6).unwrap() - 0.5).abs() < 1e-10);
        assert!(speed_from_modulus(kappa_zero() - 1e-9).unwrap() > 1e5);
        let speeds: Vec<f64> = (1..10).map(|i| speed_from_modulus(i as f64 / 10.0).unwrap()).collect();
        assert!(speeds.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn modulus_inversion() {
        assert!(modulus_from_speed(0.5).is_err());
        let k = modulus_from_speed(0.5 + 1e-9).unwrap();
        // c − 1/2 scales like κ⁴ near the bifurcation
        assert!(k < 0.05);
        let c = speed_from_modulus(0.7).unwrap();
        assert!((modulus_from_speed(c).unwrap() - 0.7).abs() < 1e-10);
        for &c in &[0.6, 1.0, 1.2181, 2.0, 5.0] {
            let k = modulus_from_speed(c).unwrap();
            assert!((speed_from_modulus(k).unwrap() - c).abs() <= 1e-12 * c);
        }
        let k = modulus_from_speed(1.2181).unwrap();
        assert!((k - 0.98515).abs() < 1e-4);
    }

    #[test]
    fn integration_constant_limits_and_monotonicity() {
        let a_small = integration_constant_alpha2(1e-2).unwrap();
        assert!(a_small > 0.0 && a_small < 1e-8);
        let mut prev = 0.0;
        for i in 1..=20 {
            let kappa = kappa_zero() * i as f64 / 21.0;
            let a = integration_constant_alpha2(kappa).unwrap();
            assert!(a > prev);
            prev = a;
        }
        let k = modulus_from_speed(1.2181).unwrap();
        assert!((integration_constant_alpha2(k).unwrap() - 11.84613).abs() < 1e-4);
    }
}
