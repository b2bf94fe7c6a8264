//! The validation suite behind `fracwave validate`.
//!
//! Every check compares a measured quantity with a fixed target and reports
//! both, so a failing line says by how much it missed. Continuation tables
//! are expensive and shared by several checks; they are built on first use.

use std::sync::OnceLock;
use std::time::Instant;

use fracwave_core::elliptic::{complete_elliptic_ke, integration_constant_alpha2, jacobi_sn_cn_dn, modulus_from_speed};
use fracwave_core::evolution::{evolve, perturb, EvolutionConfig, EvolutionReport};
use fracwave_core::newton::{jacobian, residual_f, Continuation, CosineVector, NewtonConfig};
use fracwave_core::oracles::{
    dnoidal_profile, rbo_profile, small_amplitude_a_prime, small_amplitude_d, small_amplitude_speed,
};
use fracwave_core::petviashvili::{solve_wave, solve_wave_at_speed, SolverConfig};
use fracwave_core::stability::{critical_speed, d_from, ContinuationTable, SweepConfig, Sweeper, Verdict};
use fracwave_core::{ConvergenceTrace, FractionalOrder, Grid, Method, PeriodicField, WaveSolution};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::archive::{SolutionArchive, TraceSummary};

/// Result of one check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub measured: String,
    pub target: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} (target {}) [{:.1} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.target,
            self.seconds
        )
    }
}

/// What a check returns: pass flag, measured summary, target summary.
type Verdict3 = (bool, String, String);
type CheckFn = fn(&Suite) -> Result<Verdict3, String>;

struct Check {
    id: &'static str,
    name: &'static str,
    run: CheckFn,
}

/// A sweep table together with the sweeper that produced it.
struct SweepRun {
    sweeper: Sweeper,
    table: ContinuationTable,
    seconds: f64,
}

/// Speed sets of the shared sweeps: `(α, c_min, c_max, intervals)`.
const SWEEPS: [(f64, f64, f64, usize); 5] = [
    (1.0, 0.55, 2.0, 19),
    (2.0, 0.55, 2.0, 19),
    (0.55, 0.65, 2.0, 15),
    (0.45, 0.55, 1.95, 14),
    (0.5, 0.55, 1.5, 19),
];

/// Shared, lazily computed state.
#[derive(Default)]
pub struct Suite {
    sweeps: [OnceLock<Result<SweepRun, String>>; 5],
}

fn alpha(a: f64) -> Result<FractionalOrder, String> {
    FractionalOrder::new(a).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

impl Suite {
    fn sweep(&self, a: f64) -> Result<&SweepRun, String> {
        let i = SWEEPS
            .iter()
            .position(|s| s.0 == a)
            .expect("sweep defined for this order");
        let (a, lo, hi, steps) = SWEEPS[i];
        self.sweeps[i]
            .get_or_init(|| {
                let t0 = Instant::now();
                let sweeper = Sweeper::new(alpha(a)?, SweepConfig::default()).map_err(err)?;
                let table = sweeper.sweep(lo, hi, steps).map_err(err)?;
                Ok(SweepRun {
                    sweeper,
                    table,
                    seconds: t0.elapsed().as_secs_f64(),
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

fn last_entry(trace: &ConvergenceTrace) -> (f64, f64, f64) {
    trace
        .last()
        .map(|e| (e.error, e.m_defect, e.res))
        .unwrap_or((f64::NAN, f64::NAN, f64::NAN))
}

fn check_dnoidal(_: &Suite) -> Result<Verdict3, String> {
    let t0 = Instant::now();
    let c = 1.2181;
    let cfg = SolverConfig::default().with_n_points(4096);
    let sol = solve_wave_at_speed(c, alpha(2.0)?, &cfg, None, None).map_err(err)?;
    let exact = dnoidal_profile(c, sol.phi.grid()).map_err(err)?;
    let diff = sol.phi.sub(&exact.field).sup_norm();
    let (e, m, r) = last_entry(&sol.trace);
    let secs = t0.elapsed().as_secs_f64();
    let ok = e <= 1e-10 && m <= 1e-10 && r <= 1e-10 && diff <= 1e-6 && secs <= 10.0;
    Ok((
        ok,
        format!(
            "Error {}, |1-M| {}, RES {}, sup diff {}, {secs:.1} s",
            sci(e),
            sci(m),
            sci(r),
            sci(diff)
        ),
        "trace ≤ 1e-10, sup diff ≤ 1e-6, ≤ 10 s".into(),
    ))
}

fn check_rbo(_: &Suite) -> Result<Verdict3, String> {
    let t0 = Instant::now();
    let c = 1.2192;
    let w = 3.0 - 1.0 / c;
    let cfg = SolverConfig::default().with_n_points(512);
    let sol = solve_wave(w, alpha(1.0)?, &cfg, None).map_err(err)?;
    let exact = rbo_profile(sol.c, sol.phi.grid()).map_err(err)?;
    let diff = sol.phi.sub(&exact.field).sup_norm();
    let speed_err = (sol.c - 1.0 / (3.0 - sol.w)).abs();
    let secs = t0.elapsed().as_secs_f64();
    let ok = diff <= 1e-6 && speed_err <= 1e-8 && secs <= 5.0;
    Ok((
        ok,
        format!("sup diff {}, |c-1/(3-w)| {}, {secs:.1} s", sci(diff), sci(speed_err)),
        "sup diff ≤ 1e-6, speed ≤ 1e-8, ≤ 5 s".into(),
    ))
}

fn check_a_alpha1(s: &Suite) -> Result<Verdict3, String> {
    let run = s.sweep(1.0)?;
    let worst = run
        .table
        .rows
        .iter()
        .map(|r| (r.a - (4.0 * r.c * r.c - 2.0 * r.c)).abs())
        .fold(0.0, f64::max);
    let n = run.table.rows.len();
    let secs = run.seconds + s.sweep(2.0)?.seconds;
    Ok((
        n == 20 && worst <= 1e-6 && secs <= 120.0,
        format!("{n} rows, max |A - (4c²-2c)| {}, both sweeps {secs:.1} s", sci(worst)),
        "20 rows, ≤ 1e-6, ≤ 120 s".into(),
    ))
}

fn check_a_alpha2(s: &Suite) -> Result<Verdict3, String> {
    let run = s.sweep(2.0)?;
    let mut worst = 0.0_f64;
    for r in &run.table.rows {
        let exact = integration_constant_alpha2(modulus_from_speed(r.c).map_err(err)?).map_err(err)?;
        worst = worst.max((r.a - exact).abs() / exact.abs());
    }
    let n = run.table.rows.len();
    Ok((
        n == 20 && worst <= 1e-6,
        format!("{n} rows, max relative error {}", sci(worst)),
        "20 rows, ≤ 1e-6 relative".into(),
    ))
}

fn check_d_negative(s: &Suite) -> Result<Verdict3, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [1.0, 2.0, 0.55] {
        let run = s.sweep(a)?;
        let neg = run.table.rows.iter().filter(|r| r.d < 0.0).count();
        let total = run.table.rows.len() + run.table.failures.len();
        let max_d = run.table.rows.iter().map(|r| r.d).fold(f64::NEG_INFINITY, f64::max);
        ok &= neg == total && run.seconds <= 300.0;
        parts.push(format!(
            "α={a}: {neg}/{total} negative, max d {}, {:.0} s",
            sci(max_d),
            run.seconds
        ));
    }
    Ok((ok, parts.join("; "), "d < 0 on every row, ≤ 300 s per order".into()))
}

fn critical(s: &Suite, a: f64, expected: f64) -> Result<Verdict3, String> {
    let run = s.sweep(a)?;
    let t0 = Instant::now();
    let c_star = critical_speed(&run.sweeper, &run.table, 1e-6).map_err(err)?;
    let secs = run.seconds + t0.elapsed().as_secs_f64();
    let target = format!("c* = {expected} ± 0.01, ≤ 300 s");
    Ok(match c_star {
        Some(c) => (
            (c - expected).abs() <= 0.01 && secs <= 300.0,
            format!("c* = {c:.5}, {secs:.0} s"),
            target,
        ),
        None => (false, format!("no sign change of d, {secs:.0} s"), target),
    })
}

fn check_critical_045(s: &Suite) -> Result<Verdict3, String> {
    critical(s, 0.45, 0.953)
}

fn check_critical_05(s: &Suite) -> Result<Verdict3, String> {
    critical(s, 0.5, 0.67)
}

fn check_gap(s: &Suite) -> Result<Verdict3, String> {
    let run = s.sweep(0.45)?;
    let inside: Vec<_> = run.table.rows.iter().filter(|r| r.c > 0.5 && r.c < 1.8).collect();
    let petv = inside.iter().filter(|r| r.method == Method::Petviashvili).count();
    let worst = inside.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failed = run.table.failures.iter().filter(|f| f.0 < 1.8).count();
    Ok((
        !inside.is_empty() && petv == 0 && failed == 0 && worst <= 1e-10,
        format!(
            "{} rows in (0.5, 1.8): {petv} by Petviashvili, {failed} unsolved, max Newton residual {}",
            inside.len(),
            sci(worst)
        ),
        "no Petviashvili rows, Newton residual ≤ 1e-10".into(),
    ))
}

fn check_eigencounts(s: &Suite) -> Result<Verdict3, String> {
    let (mut checked, mut bad, mut worst_kernel) = (0, Vec::new(), 0.0_f64);
    for (a, ..) in SWEEPS {
        for r in &s.sweep(a)?.table.rows {
            if r.d.abs() <= 1e-4 {
                continue;
            }
            checked += 1;
            worst_kernel = worst_kernel.max(r.kernel_residual);
            let expected = if r.d < 0.0 { 1 } else { 2 };
            if r.n_neg != expected || r.n_zero != 1 || r.kernel_residual > 1e-6 {
                bad.push(format!("α={a} c={:.3} ({},{})", r.c, r.n_neg, r.n_zero));
            }
        }
    }
    Ok((
        bad.is_empty() && checked > 0,
        format!(
            "{checked} rows, {} mismatches{}, max kernel residual {}",
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(" [{}]", bad.join(", "))
            },
            sci(worst_kernel)
        ),
        "n_neg = 1 iff d < 0, 2 iff d > 0, n_zero = 1, kernel ≤ 1e-6".into(),
    ))
}

/// `(d, A′)` on the Newton branch at amplitude parameter `a`, by a centred
/// difference of width a quarter of the distance to the bifurcation point.
fn near_bifurcation(a_ord: FractionalOrder, amp: f64) -> Result<(f64, f64, f64), String> {
    let c = small_amplitude_speed(amp, a_ord);
    let h = 0.25 * (c - 0.5);
    let cfg = NewtonConfig {
        k_modes: 256,
        ..NewtonConfig::default()
    };
    let mut branch = Continuation::start(a_ord, cfg, 0.5 + 0.5 * (c - h - 0.5)).map_err(err)?;
    let lo = branch.advance_to(c - h).map_err(err)?;
    let mid = branch.advance_to(c).map_err(err)?;
    let hi = branch.advance_to(c + h).map_err(err)?;
    let a_prime = (hi.a - lo.a) / (2.0 * h);
    Ok((c, d_from(c, mid.a, a_prime), a_prime))
}

const SMALL_AMPLITUDE_ORDERS: [f64; 4] = [0.75, 1.0, 1.5, 2.0];

fn check_small_amplitude_d(_: &Suite) -> Result<Verdict3, String> {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for a in SMALL_AMPLITUDE_ORDERS {
        let ord = alpha(a)?;
        let formula = small_amplitude_d(ord);
        for amp in [0.05, 0.1] {
            let (_, d, _) = near_bifurcation(ord, amp)?;
            worst = worst.max(((d - formula) / formula).abs());
            if amp == 0.1 {
                parts.push(format!("α={a}: d {d:.4} vs {formula:.4}"));
            }
        }
    }
    Ok((
        worst <= 0.1,
        format!("{}; max relative deviation {worst:.3}", parts.join(", ")),
        "within 10% for a ≤ 0.1".into(),
    ))
}

fn check_small_amplitude_roots(_: &Suite) -> Result<Verdict3, String> {
    let f = |a: f64| alpha(a).map(small_amplitude_d);
    let (lo, hi, half) = (f(0.29)?, f(0.30)?, f(0.5)?);
    // bisect for the report
    let (mut l, mut h) = (0.29, 0.30);
    for _ in 0..60 {
        let m = 0.5 * (l + h);
        if f(m)?.signum() == lo.signum() {
            l = m;
        } else {
            h = m;
        }
    }
    Ok((
        lo.signum() != hi.signum() && half.abs() <= 1e-15,
        format!("root at α̃ = {:.6}, value at α = 1/2: {}", 0.5 * (l + h), sci(half)),
        "root in (0.29, 0.30), zero at α = 1/2".into(),
    ))
}

fn check_small_amplitude_slope(_: &Suite) -> Result<Verdict3, String> {
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for a in SMALL_AMPLITUDE_ORDERS {
        let ord = alpha(a)?;
        let formula = small_amplitude_a_prime(ord);
        let (_, _, ap) = near_bifurcation(ord, 0.05)?;
        worst = worst.max(((ap - formula) / formula).abs());
        parts.push(format!("α={a}: A' {ap:.4} vs {formula:.4}"));
    }
    Ok((
        worst <= 0.1,
        format!("{}; max relative deviation {worst:.3}", parts.join(", ")),
        "within 10%".into(),
    ))
}

fn stability_bound(s: &Suite, a: f64) -> Result<Verdict3, String> {
    let run = s.sweep(a)?;
    let stable: Vec<_> = run.table.rows.iter().filter(|r| r.verdict == Verdict::Stable).collect();
    let mut bad = Vec::new();
    let mut margin = f64::INFINITY;
    for r in &stable {
        let m1 = r.a - (r.c - 0.5);
        let m2 = r.a_prime + r.b_c / std::f64::consts::PI;
        margin = margin.min(m1);
        if m1 <= 0.0 || m2 <= 0.0 {
            bad.push(format!("c={:.3}", r.c));
        }
    }
    Ok((
        bad.is_empty(),
        format!(
            "α={a}: {} stable rows, {} violations{}, min A-(c-1/2) {}",
            stable.len(),
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(" [{}]", bad.join(", "))
            },
            sci(margin)
        ),
        "A > c - 1/2 and A' + Bc/π > 0 on stable rows".into(),
    ))
}

fn check_bound_1(s: &Suite) -> Result<Verdict3, String> {
    stability_bound(s, 1.0)
}
fn check_bound_2(s: &Suite) -> Result<Verdict3, String> {
    stability_bound(s, 2.0)
}
fn check_bound_055(s: &Suite) -> Result<Verdict3, String> {
    stability_bound(s, 0.55)
}
fn check_bound_045(s: &Suite) -> Result<Verdict3, String> {
    stability_bound(s, 0.45)
}
fn check_bound_05(s: &Suite) -> Result<Verdict3, String> {
    stability_bound(s, 0.5)
}

fn transport_run() -> Result<(EvolutionReport, f64), String> {
    let c = 1.2181;
    let o = dnoidal_profile(c, &Grid::new(512).map_err(err)?).map_err(err)?;
    let cfg = EvolutionConfig {
        dt: 0.01,
        t_final: 10.0,
        record_every: 100,
        ..EvolutionConfig::default()
    };
    let rep = evolve(&o.field, alpha(2.0)?, &cfg, Some(&o.field)).map_err(err)?;
    let e = rep.final_state.u.sub(&o.field.translated(c * 10.0)).sup_norm();
    Ok((rep, e))
}

fn perturbed_run(a: f64) -> Result<EvolutionReport, String> {
    let grid = Grid::new(256).map_err(err)?;
    let ord = alpha(a)?;
    let phi = if a == 2.0 {
        dnoidal_profile(1.2181, &grid).map_err(err)?.field
    } else {
        solve_wave_at_speed(1.2181, ord, &SolverConfig::default().with_n_points(256), None, None)
            .map_err(err)?
            .phi
    };
    let cfg = EvolutionConfig {
        dt: 0.005,
        t_final: 50.0,
        record_every: 200,
        ..EvolutionConfig::default()
    };
    evolve(&perturb(&phi, 2, 0.01), ord, &cfg, Some(&phi)).map_err(err)
}

fn check_transport(_: &Suite) -> Result<Verdict3, String> {
    let (rep, e) = transport_run()?;
    Ok((
        e <= 1e-5 && rep.max_drift() <= 1e-5,
        format!("transport error {}, drift {}", sci(e), sci(rep.max_drift())),
        "≤ 1e-5 over T = 10".into(),
    ))
}

fn check_conservation(_: &Suite) -> Result<Verdict3, String> {
    let (rep, _) = transport_run()?;
    let mut worst = rep.conservation_defect();
    for a in [1.5, 2.0] {
        let (p, m) = perturbed_run(a)?.conservation_defect();
        worst = (worst.0.max(p), worst.1.max(m));
    }
    Ok((
        worst.0 <= 1e-8 && worst.1 <= 1e-8,
        format!("P defect {}, M defect {}", sci(worst.0), sci(worst.1)),
        "≤ 1e-8 relative".into(),
    ))
}

fn check_orbital_drift(_: &Suite) -> Result<Verdict3, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [1.5, 2.0] {
        let rho = perturbed_run(a)?.max_drift();
        ok &= rho <= 0.1;
        parts.push(format!("α={a}: ρ {}", sci(rho)));
    }
    Ok((ok, parts.join(", "), "ρ ≤ 0.1 over T = 50, ε = 0.01".into()))
}

fn random_field(rng: &mut StdRng, grid: &Grid, modes: usize) -> PeriodicField {
    let amps: Vec<(f64, f64)> = (0..modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mean = rng.gen_range(-1.0..1.0);
    PeriodicField::from_fn(grid, |x| {
        mean + amps
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let k = (k + 1) as f64;
                (a * (k * x).cos() + b * (k * x).sin()) / k
            })
            .sum::<f64>()
    })
}

fn check_spectral_properties(_: &Suite) -> Result<Verdict3, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let grid = Grid::new(128).map_err(err)?;
    let (mut parseval, mut semigroup, mut projection) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let u = random_field(&mut rng, &grid, 40);
        let trap = grid.spacing() * u.samples().iter().map(|v| v * v).sum::<f64>();
        parseval = parseval.max((u.norm_sq() - trap).abs() / trap);
        let (a, b) = (rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0));
        let lhs = u.fractional_derivative(alpha(a)?).fractional_derivative(alpha(b)?);
        let rhs = u.fractional_derivative(alpha(a + b)?);
        semigroup = semigroup.max(lhs.sub(&rhs).sup_norm() / rhs.sup_norm());
        let p = u.zero_mean_project();
        let pp = p.zero_mean_project();
        let v = random_field(&mut rng, &grid, 40);
        let adj = (p.inner(&v) - u.inner(&v.zero_mean_project())).abs();
        projection = projection.max(pp.sub(&p).sup_norm()).max(p.mean().abs()).max(adj);
    }
    Ok((
        parseval <= 1e-12 && semigroup <= 1e-12 && projection <= 1e-12,
        format!(
            "Parseval {}, semigroup {}, projection {}",
            sci(parseval),
            sci(semigroup),
            sci(projection)
        ),
        "all ≤ 1e-12".into(),
    ))
}

fn check_jacobian(_: &Suite) -> Result<Verdict3, String> {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst = 0.0_f64;
    for &(a, c) in &[(0.45, 0.8), (1.0, 1.1), (1.7, 0.9)] {
        let ord = alpha(a)?;
        let k = 24;
        let b = CosineVector::new((1..=k).map(|kk| rng.gen_range(-1.0..1.0) / (kk * kk) as f64).collect());
        let jac = jacobian(&b, c, ord);
        let scale = jac.amax();
        let h = 1e-5;
        for j in 0..k {
            let shifted = |s: f64| {
                let mut v = b.b.clone();
                v[j] += s;
                residual_f(&CosineVector::new(v), c, ord).b
            };
            let (fp, fm) = (shifted(h), shifted(-h));
            for i in 0..k {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                worst = worst.max((fd - jac[(i, j)]).abs() / scale);
            }
        }
    }
    Ok((
        worst <= 1e-6,
        format!("max relative deviation {}", sci(worst)),
        "≤ 1e-6".into(),
    ))
}

/// Adaptive Simpson with Richardson correction.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn check_elliptic(_: &Suite) -> Result<Verdict3, String> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut worst = 0.0_f64;
    for &kappa in &[0.0, 0.2, 0.5, 0.8, 0.9, 0.95] {
        let k2 = kappa * kappa;
        let (k, e) = complete_elliptic_ke(kappa).map_err(err)?;
        let kq = integrate(&|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, half_pi, 1e-15);
        let eq = integrate(&|t: f64| (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, half_pi, 1e-15);
        worst = worst.max((k - kq).abs()).max((e - eq).abs());
        // dn at the point whose amplitude is `phi`: u = F(phi, κ).
        for &phi in &[0.3, 1.0, 1.4] {
            let u = integrate(&|t: f64| 1.0 / (1.0 - k2 * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-15);
            let (sn, cn, dn) = jacobi_sn_cn_dn(u, kappa).map_err(err)?;
            worst = worst
                .max((sn - phi.sin()).abs())
                .max((cn - phi.cos()).abs())
                .max((dn - (1.0 - k2 * phi.sin().powi(2)).sqrt()).abs());
        }
    }
    Ok((
        worst <= 1e-11,
        format!("max deviation {}", sci(worst)),
        "≤ 1e-11".into(),
    ))
}

fn check_archive(_: &Suite) -> Result<Verdict3, String> {
    let mut rng = StdRng::seed_from_u64(2024);
    let grid = Grid::new(256).map_err(err)?;
    let mut mismatches = 0usize;
    let mut values = 0usize;
    for trial in 0..8 {
        let mut samples: Vec<f64> = (0..256)
            .map(|_| rng.gen_range(-1.0..1.0) * 10f64.powi(rng.gen_range(-300..300)))
            .collect();
        if trial == 0 {
            samples[..4].copy_from_slice(&[0.1 + 0.2, f64::MIN_POSITIVE / 3.0, -0.0, f64::MAX]);
        }
        let phi = PeriodicField::from_samples(&grid, samples.clone());
        let mut sol = WaveSolution::from_phi(
            phi,
            alpha(rng.gen_range(0.1..2.0))?,
            0.5 + rng.gen::<f64>(),
            ConvergenceTrace::default(),
            Method::Newton,
        );
        sol.w = rng.gen();
        sol.a = rng.gen();
        let arch = SolutionArchive::from_solution(&sol);
        let back = SolutionArchive::from_json(&arch.to_json(), std::path::Path::new("<memory>")).map_err(err)?;
        values += samples.len() + 4;
        mismatches += samples
            .iter()
            .zip(&back.samples)
            .filter(|(x, y)| x.to_bits() != y.to_bits())
            .count();
        mismatches += [
            (arch.alpha, back.alpha),
            (arch.c, back.c),
            (arch.w, back.w),
            (arch.a, back.a),
        ]
        .iter()
        .filter(|(x, y)| x.to_bits() != y.to_bits())
        .count();
        if back.trace_summary != TraceSummary::of(&sol.trace) {
            mismatches += 1;
        }
    }
    Ok((
        mismatches == 0,
        format!("{mismatches} of {values} values differ"),
        "bit-identical".into(),
    ))
}

const CHECKS: &[Check] = &[
    Check {
        id: "1",
        name: "dnoidal oracle (α=2, c=1.2181, n=4096)",
        run: check_dnoidal,
    },
    Check {
        id: "2",
        name: "regularised Benjamin–Ono oracle (α=1, c=1.2192, n=512)",
        run: check_rbo,
    },
    Check {
        id: "3a",
        name: "A(c) = 4c²-2c at α=1",
        run: check_a_alpha1,
    },
    Check {
        id: "3b",
        name: "A(c) elliptic closed form at α=2",
        run: check_a_alpha2,
    },
    Check {
        id: "4a",
        name: "d < 0 for α ∈ {1, 2, 0.55}",
        run: check_d_negative,
    },
    Check {
        id: "4b",
        name: "critical speed at α=0.45",
        run: check_critical_045,
    },
    Check {
        id: "4c",
        name: "critical speed at α=0.5",
        run: check_critical_05,
    },
    Check {
        id: "5",
        name: "Petviashvili gap at α=0.45 filled by Newton",
        run: check_gap,
    },
    Check {
        id: "6",
        name: "eigenvalue counts agree with the sign of d",
        run: check_eigencounts,
    },
    Check {
        id: "7a",
        name: "small-amplitude d near c = 1/2",
        run: check_small_amplitude_d,
    },
    Check {
        id: "7b",
        name: "roots of the small-amplitude d formula",
        run: check_small_amplitude_roots,
    },
    Check {
        id: "7c",
        name: "small-amplitude slope A'(c)",
        run: check_small_amplitude_slope,
    },
    Check {
        id: "8a",
        name: "stability bound, α=1",
        run: check_bound_1,
    },
    Check {
        id: "8b",
        name: "stability bound, α=2",
        run: check_bound_2,
    },
    Check {
        id: "8c",
        name: "stability bound, α=0.55",
        run: check_bound_055,
    },
    Check {
        id: "8d",
        name: "stability bound, α=0.45",
        run: check_bound_045,
    },
    Check {
        id: "8e",
        name: "stability bound, α=0.5",
        run: check_bound_05,
    },
    Check {
        id: "9a",
        name: "rigid transport of the dnoidal wave",
        run: check_transport,
    },
    Check {
        id: "9b",
        name: "conservation of P and M",
        run: check_conservation,
    },
    Check {
        id: "9c",
        name: "orbital drift of perturbed waves (α ∈ {1.5, 2})",
        run: check_orbital_drift,
    },
    Check {
        id: "10a",
        name: "Parseval, semigroup and projection identities",
        run: check_spectral_properties,
    },
    Check {
        id: "10b",
        name: "Newton Jacobian vs finite differences",
        run: check_jacobian,
    },
    Check {
        id: "10c",
        name: "elliptic functions vs quadrature",
        run: check_elliptic,
    },
    Check {
        id: "10d",
        name: "archive round-trip",
        run: check_archive,
    },
];

/// All check ids, in run order.
pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

/// `4` selects 4a, 4b and 4c; `4b` selects only 4b.
fn selected(id: &str, only: &[String]) -> bool {
    only.is_empty()
        || only.iter().any(|s| {
            let s = s.trim();
            id == s || (id.starts_with(s) && id[s.len()..].chars().all(|ch| ch.is_ascii_alphabetic()))
        })
}

/// Runs the selected checks in order, calling `report` after each. A full
/// run (empty `only`) ends with a check on the total runtime.
pub fn run(only: &[String], mut report: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
    let suite = Suite::default();
    let start = Instant::now();
    let mut out = Vec::new();
    for check in CHECKS.iter().filter(|c| selected(c.id, only)) {
        let t0 = Instant::now();
        let (passed, measured, target) = match (check.run)(&suite) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}"), "completes without error".into()),
        };
        let outcome = CheckOutcome {
            id: check.id.to_string(),
            name: check.name.to_string(),
            passed,
            measured,
            target,
            seconds: t0.elapsed().as_secs_f64(),
        };
        report(&outcome);
        out.push(outcome);
    }
    if only.is_empty() {
        let secs = start.elapsed().as_secs_f64();
        let outcome = CheckOutcome {
            id: "10e".into(),
            name: "full validation runtime".into(),
            passed: secs <= 600.0,
            measured: format!("{secs:.0} s"),
            target: "≤ 600 s".into(),
            seconds: 0.0,
        };
        report(&outcome);
        out.push(outcome);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_by_prefix() {
        let only = vec!["4".to_string()];
        assert!(selected("4a", &only) && selected("4c", &only));
        assert!(!selected("1", &only));
        let only = vec!["1".to_string()];
        assert!(selected("1", &only) && !selected("10a", &only));
        assert!(selected("anything", &[]));
    }

    #[test]
    fn ids_are_unique() {
        let mut ids = check_ids();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn quadrature_is_accurate() {
        let v = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
