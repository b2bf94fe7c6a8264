//! Dense matrices of the linearised operator `L = cD^α + c − 1 − φ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{FractionalOrder, PeriodicField};

/// Whether the matrix represents `L` or `L̃ = L / c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    L,
    LTilde,
}

/// Coordinates the matrix is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    /// Complex exponentials `e^{ikx}`, k = −K..K; real because φ is even.
    FourierModes,
    /// `1, cos kx, sin kx` (unitarily normalised), for profiles that are not even.
    Trigonometric,
}

/// Symmetric matrix of the linearised operator on modes `|k| ≤ K`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: DMatrix<f64>,
    pub alpha: FractionalOrder,
    pub c: f64,
    pub k_max: usize,
    pub scaling: Scaling,
    pub basis: Basis,
}

fn complex_operator(phi: &PeriodicField, c: f64, alpha: FractionalOrder, k: usize) -> DMatrix<Complex64> {
    let dim = 2 * k + 1;
    let ki = k as i64;
    DMatrix::from_fn(dim, dim, |r, s| {
        let (kr, ks) = (r as i64 - ki, s as i64 - ki);
        let diag = if r == s { c * alpha.symbol(kr) + c - 1.0 } else { 0.0 };
        Complex64::new(diag, 0.0) - phi.coeff(kr - ks)
    })
}

/// Unitary map from `(1, cos, sin)` coordinates to complex mode coordinates.
fn realifier(k: usize) -> DMatrix<Complex64> {
    let dim = 2 * k + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    u[(k, 0)] = Complex64::new(1.0, 0.0);
    for m in 1..=k {
        // column 2m−1: (e_m + e_{−m})/√2, column 2m: (e_m − e_{−m})/(i√2)
        u[(k + m, 2 * m - 1)] = Complex64::new(s, 0.0);
        u[(k - m, 2 * m - 1)] = Complex64::new(s, 0.0);
        u[(k + m, 2 * m)] = Complex64::new(0.0, -s);
        u[(k - m, 2 * m)] = Complex64::new(0.0, s);
    }
    u
}

/// Assembles `L` with entries `(c|k|^α + c − 1)δ_kj − φ̂(k − j)`.
pub fn assemble_operator(phi: &PeriodicField, c: f64, alpha: FractionalOrder, k_max: usize) -> Result<OperatorMatrix> {
    if k_max == 0 {
        return Err(invalid("k_max", "operator truncation must be positive"));
    }
    let h = complex_operator(phi, c, alpha, k_max);
    let scale = phi.coeffs().iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let odd = (0..=2 * k_max as i64)
        .map(|m| phi.coeff(m).im.abs())
        .fold(0.0_f64, f64::max);
    let (matrix, basis) = if odd <= 1e-13 * scale.max(1e-300) {
        (h.map(|z| z.re), Basis::FourierModes)
    } else {
        let u = realifier(k_max);
        let r = u.adjoint() * h * &u;
        (r.map(|z| z.re), Basis::Trigonometric)
    };
    // remove round-off asymmetry
    let matrix = (&matrix + matrix.transpose()) * 0.5;
    Ok(OperatorMatrix {
        matrix,
        alpha,
        c,
        k_max,
        scaling: Scaling::L,
        basis,
    })
}

/// Sorted eigenvalue summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCounts {
    pub n_neg: usize,
    pub n_zero: usize,
    /// Smallest six eigenvalues, ascending.
    pub eigen_tail: Vec<f64>,
    /// Largest eigenvalue modulus (spectral norm of the symmetric matrix).
    pub norm: f64,
}

impl OperatorMatrix {
    /// `L̃ = L / c`.
    pub fn tilde(&self) -> Self {
        match self.scaling {
            Scaling::LTilde => self.clone(),
            Scaling::L => Self {
                matrix: &self.matrix / self.c,
                scaling: Scaling::LTilde,
                ..self.clone()
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `1e-6·(1 + cK^α)`, divided by c for `L̃`.
    pub fn default_zero_tol(&self) -> f64 {
        let t = 1e-6 * (1.0 + self.c * (self.k_max as f64).powf(self.alpha.value()));
        match self.scaling {
            Scaling::L => t,
            Scaling::LTilde => t / self.c,
        }
    }

    /// Real and imaginary parts of a field's coordinates in this basis.
    pub fn coordinates(&self, f: &PeriodicField) -> (DVector<f64>, DVector<f64>) {
        let k = self.k_max as i64;
        let v = DVector::from_iterator(self.dim(), (-k..=k).map(|m| f.coeff(m)));
        let v = match self.basis {
            Basis::FourierModes => v,
            Basis::Trigonometric => realifier(self.k_max).adjoint() * v,
        };
        (v.map(|z| z.re), v.map(|z| z.im))
    }

    /// `(‖M f‖, ‖f‖)` in the coefficient 2-norm of this basis.
    pub fn apply_norms(&self, f: &PeriodicField) -> (f64, f64) {
        let (re, im) = self.coordinates(f);
        let (mr, mi) = (&self.matrix * &re, &self.matrix * &im);
        (
            (mr.norm_squared() + mi.norm_squared()).sqrt(),
            (re.norm_squared() + im.norm_squared()).sqrt(),
        )
    }

    /// For an even profile the operator preserves parity: returns its blocks
    /// on `1, √2 cos kx` and on `√2 sin kx`, whose spectra together make up
    /// the full spectrum.
    pub fn parity_blocks(&self) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
        if self.basis != Basis::FourierModes {
            return None;
        }
        let k = self.k_max;
        let h = |a: i64, b: i64| self.matrix[((a + k as i64) as usize, (b + k as i64) as usize)];
        let r2 = std::f64::consts::SQRT_2;
        let even = DMatrix::from_fn(k + 1, k + 1, |i, j| {
            let (a, b) = (i as i64, j as i64);
            match (i, j) {
                (0, 0) => h(0, 0),
                (0, _) => r2 * h(0, b),
                (_, 0) => r2 * h(a, 0),
                _ => h(a, b) + h(a, -b),
            }
        });
        let odd = DMatrix::from_fn(k, k, |i, j| {
            let (a, b) = (i as i64 + 1, j as i64 + 1);
            h(a, b) - h(a, -b)
        });
        Some((even, odd))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.matrix.amax().max(1e-300);
        (&self.matrix - self.matrix.transpose()).amax() <= tol * scale
    }
}

/// Full symmetric eigensolve and sign classification.
pub fn eigen_counts(m: &OperatorMatrix, zero_tol: f64) -> Result<EigenCounts> {
    if !m.is_symmetric(1e-12) {
        return Err(invalid("matrix", "operator matrix is not symmetric"));
    }
    let mut ev: Vec<f64> = match m.parity_blocks() {
        Some((even, odd)) => {
            let mut v: Vec<f64> = even.symmetric_eigenvalues().iter().copied().collect();
            v.extend(odd.symmetric_eigenvalues().iter().copied());
            v
        }
        None => SymmetricEigen::try_new(m.matrix.clone(), f64::EPSILON, 0)
            .ok_or(Error::EigenFailure)?
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    };
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n_neg = ev.iter().filter(|&&x| x < -zero_tol).count();
    let n_zero = ev.iter().filter(|&&x| x.abs() <= zero_tol).count();
    let norm = ev.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    Ok(EigenCounts {
        n_neg,
        n_zero,
        eigen_tail: ev.iter().take(6).copied().collect(),
        norm,
    })
}

/// Smallest power-of-two truncation `K ≥ k_min` (capped at `k_cap`) beyond
/// which the derivative's spectrum is negligible: `|k φ̂_k| ≤ 1e-10 · max`.
pub fn adaptive_truncation(phi: &PeriodicField, k_min: usize, k_cap: usize) -> usize {
    let spec: Vec<f64> = phi.spectrum().iter().enumerate().map(|(k, a)| k as f64 * a).collect();
    let peak = spec.iter().copied().fold(0.0_f64, f64::max);
    let mut k = k_min.max(1);
    while k < k_cap {
        let tail = spec.iter().skip(k + 1).copied().fold(0.0_f64, f64::max);
        if tail <= 1e-10 * peak {
            break;
        }
        k *= 2;
    }
    k.min(k_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::dnoidal_profile;
    use crate::spectral::Grid;

    fn alpha(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn zero_profile_at_bifurcation() {
        let g = Grid::new(64).unwrap();
        let z = PeriodicField::zeros(&g);
        let m = assemble_operator(&z, 0.5, alpha(1.3), 8).unwrap();
        for r in 0..m.dim() {
            let k = r as i64 - 8;
            for s in 0..m.dim() {
                let e = if r == s {
                    ((k.unsigned_abs() as f64).powf(1.3) - 1.0) / 2.0
                } else {
                    0.0
                };
                assert!((m.matrix[(r, s)] - e).abs() < 1e-15);
            }
        }
        let counts = eigen_counts(&m, m.default_zero_tol()).unwrap();
        assert_eq!((counts.n_neg, counts.n_zero), (1, 2));
    }

    #[test]
    fn cosine_profile_off_diagonals() {
        let g = Grid::new(16).unwrap();
        let eps = 0.1;
        let phi = PeriodicField::from_fn(&g, |x| eps * x.cos());
        let m = assemble_operator(&phi, 1.0, alpha(2.0), 1).unwrap();
        assert!((m.matrix[(0, 1)] + eps / 2.0).abs() < 1e-15);
        assert!((m.matrix[(1, 2)] + eps / 2.0).abs() < 1e-15);
        assert!(m.matrix[(0, 2)].abs() < 1e-15);
        assert_eq!(m.basis, Basis::FourierModes);
    }

    #[test]
    fn dnoidal_translation_kernel() {
        let g = Grid::new(1024).unwrap();
        let o = dnoidal_profile(1.2181, &g).unwrap();
        let m = assemble_operator(&o.field, 1.2181, alpha(2.0), 128).unwrap();
        let (lphi, _) = m.apply_norms(&o.field.derivative());
        assert!(lphi <= 1e-7, "{lphi}");
        let counts = eigen_counts(&m, m.default_zero_tol()).unwrap();
        assert_eq!((counts.n_neg, counts.n_zero), (1, 1));
        let t = m.tilde();
        let ct = eigen_counts(&t, t.default_zero_tol()).unwrap();
        assert_eq!((ct.n_neg, ct.n_zero), (1, 1));
    }

    #[test]
    fn shifted_profile_uses_trigonometric_basis_with_same_spectrum() {
        let g = Grid::new(256).unwrap();
        let o = dnoidal_profile(0.9, &g).unwrap();
        let even = assemble_operator(&o.field, 0.9, alpha(2.0), 16).unwrap();
        let shifted = assemble_operator(&o.field.translated(0.4), 0.9, alpha(2.0), 16).unwrap();
        assert_eq!(shifted.basis, Basis::Trigonometric);
        assert!(shifted.is_symmetric(1e-12));
        let a = eigen_counts(&even, 1e-8).unwrap();
        let b = eigen_counts(&shifted, 1e-8).unwrap();
        for (x, y) in a.eigen_tail.iter().zip(&b.eigen_tail) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
