use fracwave_core::newton::{dealiased_grid, jacobian, jacobian_apply, residual_f, CosineVector};
use fracwave_core::spectral::conserved_quantities;
use fracwave_core::{FractionalOrder, Grid, PeriodicField};
use proptest::prelude::*;

/// Band-limited random field: mean plus `coeffs.len()` decaying modes.
fn field(n: usize, mean: f64, coeffs: &[(f64, f64)]) -> PeriodicField {
    let grid = Grid::new(n).unwrap();
    PeriodicField::from_fn(&grid, |x| {
        mean + coeffs
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let k = (k + 1) as f64;
                (a * (k * x).cos() + b * (k * x).sin()) / k
            })
            .sum::<f64>()
    })
}

fn modes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20)
}

fn order() -> impl Strategy<Value = FractionalOrder> {
    (0.05f64..=2.0).prop_map(|a| FractionalOrder::new(a).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(mean in -2.0f64..2.0, m in modes()) {
        let u = field(64, mean, &m);
        let trap = u.grid().spacing() * u.samples().iter().map(|v| v * v).sum::<f64>();
        prop_assert!((u.norm_sq() - trap).abs() <= 1e-12 * trap.max(1.0));
    }

    #[test]
    fn fractional_derivatives_compose(m in modes(), a in 0.05f64..1.0, b in 0.05f64..1.0) {
        let u = field(64, 0.3, &m);
        let fa = FractionalOrder::new(a).unwrap();
        let fb = FractionalOrder::new(b).unwrap();
        let lhs = u.fractional_derivative(fa).fractional_derivative(fb);
        let rhs = u.fractional_derivative(FractionalOrder::new(a + b).unwrap());
        prop_assert!(lhs.sub(&rhs).sup_norm() <= 1e-12 * rhs.sup_norm().max(1.0));
        // the mean is annihilated
        prop_assert!(rhs.mean().abs() <= 1e-14);
    }

    #[test]
    fn order_two_is_minus_second_derivative(m in modes()) {
        let u = field(64, 0.0, &m);
        let d2 = u.derivative().derivative().scale(-1.0);
        let frac = u.fractional_derivative(FractionalOrder::new(2.0).unwrap());
        prop_assert!(d2.sub(&frac).sup_norm() <= 1e-10 * frac.sup_norm().max(1.0));
    }

    #[test]
    fn zero_mean_projection_is_an_orthogonal_projector(mean in -2.0f64..2.0, m in modes(), m2 in modes()) {
        let u = field(64, mean, &m);
        let v = field(64, -0.5 * mean, &m2);
        let p = u.zero_mean_project();
        prop_assert!(p.mean().abs() <= 1e-14);
        prop_assert!(p.zero_mean_project().sub(&p).sup_norm() <= 1e-15);
        let lhs = p.inner(&v);
        let rhs = u.inner(&v.zero_mean_project());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn translation_commutes_with_multipliers(m in modes(), y in -4.0f64..4.0, alpha in order()) {
        let u = field(64, 0.1, &m);
        let a = u.translated(y).fractional_derivative(alpha);
        let b = u.fractional_derivative(alpha).translated(y);
        prop_assert!(a.sub(&b).sup_norm() <= 1e-12 * b.sup_norm().max(1.0));
        // and preserves the conserved quantities
        let q0 = conserved_quantities(&u, alpha);
        let q1 = conserved_quantities(&u.translated(y), alpha);
        prop_assert!((q0.p - q1.p).abs() <= 1e-12 * q0.p.abs().max(1.0));
        prop_assert!((q0.m - q1.m).abs() <= 1e-12 * q0.m.abs().max(1.0));
    }

    #[test]
    fn jacobian_is_symmetric_and_matches_differences(
        b in prop::collection::vec(-1.0f64..1.0, 4..24),
        c in 0.55f64..2.0,
        alpha in order(),
    ) {
        let b: Vec<f64> = b.iter().enumerate().map(|(k, x)| x / (k + 1) as f64).collect();
        let bv = CosineVector::new(b.clone());
        let j = jacobian(&bv, c, alpha);
        prop_assert!((&j - j.transpose()).amax() <= 1e-14 * j.amax());
        let h = 1e-5;
        for col in 0..b.len() {
            let mut p = b.clone();
            let mut q = b.clone();
            p[col] += h;
            q[col] -= h;
            let fp = residual_f(&CosineVector::new(p), c, alpha).b;
            let fq = residual_f(&CosineVector::new(q), c, alpha).b;
            for row in 0..b.len() {
                let fd = (fp[row] - fq[row]) / (2.0 * h);
                prop_assert!((fd - j[(row, col)]).abs() <= 1e-6 * j.amax());
            }
        }
    }

    #[test]
    fn matrix_free_product_matches_dense_jacobian(
        b in prop::collection::vec(-1.0f64..1.0, 4..40),
        v in prop::collection::vec(-1.0f64..1.0, 40),
        c in 0.55f64..2.0,
        alpha in order(),
    ) {
        let k = b.len();
        let bv = CosineVector::new(b);
        let phi = bv.to_field(&dealiased_grid(k));
        let v = &v[..k];
        let fast = jacobian_apply(&phi, c, alpha, v);
        let dense = jacobian(&bv, c, alpha) * nalgebra::DVector::from_column_slice(v);
        for (x, y) in fast.iter().zip(dense.iter()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }
}
