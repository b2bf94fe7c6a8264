//! One function per subcommand; each returns the process exit code.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fracwave_core::evolution::{evolve, ledger_csv, perturb, EvolutionConfig};
use fracwave_core::newton::{continue_to, NewtonConfig};
use fracwave_core::oracles::{dnoidal_profile, rbo_profile, small_amplitude_phi};
use fracwave_core::petviashvili::{solve_wave, solve_wave_at_speed, SolverConfig};
use fracwave_core::stability::{
    analyze, critical_speed, AnalysisConfig, ContinuationRow, ContinuationTable, SweepConfig, Sweeper,
};
use fracwave_core::{FractionalOrder, Grid, PeriodicField, WaveSolution};
use serde::Serialize;

use crate::archive::{profile_csv, trace_csv, write_text, SolutionArchive};
use crate::args::*;
use crate::error::{exit, CliError, CliResult};
use crate::validation;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialises") + "\n"
}

fn emit_json<T: Serialize>(v: &T, out: Option<&Path>) -> CliResult<()> {
    let text = to_json(v);
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn solver_config(n: usize, tol_res: f64, max_iters: usize) -> SolverConfig {
    SolverConfig {
        tol_res,
        max_iters,
        ..SolverConfig::default().with_n_points(n)
    }
}

fn solve_one(args: &SolveArgs, alpha: FractionalOrder) -> fracwave_core::Result<WaveSolution> {
    let cfg = solver_config(args.n, args.tol_res, args.max_iters);
    let newton = NewtonConfig {
        k_modes: args.newton_modes,
        ..NewtonConfig::default()
    };
    match (args.c, args.w) {
        (None, Some(w)) => solve_wave(w, alpha, &cfg, None),
        (Some(c), _) => match args.method {
            SolveMethod::Petviashvili => solve_wave_at_speed(c, alpha, &cfg, None, None),
            SolveMethod::Newton => continue_to(c, alpha, newton),
            SolveMethod::Auto => {
                solve_wave_at_speed(c, alpha, &cfg, None, None).or_else(|_| continue_to(c, alpha, newton))
            }
        },
        (None, None) => unreachable!("validated"),
    }
}

pub fn solve(args: &SolveArgs) -> CliResult<i32> {
    let alpha = args.validate()?;
    match solve_one(args, alpha) {
        Ok(sol) => {
            SolutionArchive::from_solution(&sol).save(&args.out)?;
            if let Some(p) = &args.profile {
                write_text(p, &profile_csv(&sol.phi))?;
            }
            println!(
                "method={} c={:.12} w={:.12} A={:.12} residual={:.3e} iters={}",
                sol.method,
                sol.c,
                sol.w,
                sol.a,
                sol.residual(),
                sol.trace.iters()
            );
            Ok(exit::OK)
        }
        Err(e) => {
            if let Some(trace) = e.trace() {
                write_text(&sibling(&args.out, ".trace.csv"), &trace_csv(trace))?;
            }
            Err(e.into())
        }
    }
}

#[derive(Debug, Serialize)]
struct Fold {
    c_left: f64,
    c_right: f64,
    n_neg_left: usize,
    n_neg_right: usize,
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    alpha: f64,
    c_min: f64,
    c_max: f64,
    rows: usize,
    failures: Vec<(f64, String)>,
    critical_speed: Option<f64>,
    folds: Vec<Fold>,
    methods: BTreeMap<String, usize>,
    ranges: BTreeMap<&'static str, [f64; 2]>,
}

fn summarise(t: &ContinuationTable, args: &SweepArgs, c_star: Option<f64>) -> SweepSummary {
    let folds = t
        .rows
        .windows(2)
        .filter(|p| p[0].d.signum() != p[1].d.signum() || p[0].n_neg != p[1].n_neg)
        .map(|p| Fold {
            c_left: p[0].c,
            c_right: p[1].c,
            n_neg_left: p[0].n_neg,
            n_neg_right: p[1].n_neg,
        })
        .collect();
    let mut methods = BTreeMap::new();
    for r in &t.rows {
        *methods.entry(r.method.to_string()).or_insert(0) += 1;
    }
    let mut ranges = BTreeMap::new();
    type Column = (&'static str, fn(&ContinuationRow) -> f64);
    let cols: [Column; 6] = [
        ("w", |r| r.w),
        ("A", |r| r.a),
        ("Aprime", |r| r.a_prime),
        ("d", |r| r.d),
        ("Bc", |r| r.b_c),
        ("gamma", |r| r.gamma),
    ];
    if !t.rows.is_empty() {
        for (name, f) in cols {
            let lo = t.rows.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = t.rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            ranges.insert(name, [lo, hi]);
        }
    }
    SweepSummary {
        alpha: t.alpha,
        c_min: args.c_min,
        c_max: args.c_max,
        rows: t.rows.len(),
        failures: t.failures.clone(),
        critical_speed: c_star,
        folds,
        methods,
        ranges,
    }
}

pub fn sweep(args: &SweepArgs) -> CliResult<i32> {
    let alpha = args.validate()?;
    let cfg = SweepConfig {
        solver: SolverConfig::default().with_n_points(args.n),
        newton: NewtonConfig {
            k_modes: args.newton_modes,
            ..NewtonConfig::default()
        },
        fd_step: args.fd_step,
        ..SweepConfig::default()
    };
    let sweeper = Sweeper::new(alpha, cfg)?;
    let table = sweeper.sweep(args.c_min, args.c_max, args.steps)?;
    write_text(&args.out, &table.to_csv())?;
    // A failed refinement is reported in the summary rather than aborting the sweep.
    let (c_star, note) = if args.no_critical {
        (None, None)
    } else {
        match critical_speed(&sweeper, &table, args.critical_tol) {
            Ok(c) => (c, None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let mut summary = summarise(&table, args, c_star);
    if let Some(n) = note {
        summary
            .failures
            .push((f64::NAN, format!("critical speed refinement: {n}")));
    }
    let path = args
        .summary
        .clone()
        .unwrap_or_else(|| args.out.with_extension("summary.json"));
    write_text(&path, &to_json(&summary))?;
    println!(
        "rows={} failures={} c*={}",
        summary.rows,
        summary.failures.len(),
        c_star.map(|c| format!("{c:.8}")).unwrap_or_else(|| "none".into())
    );
    Ok(exit::OK)
}

pub fn stability(args: &StabilityArgs) -> CliResult<i32> {
    args.validate()?;
    let (sol, alpha) = match &args.input {
        Some(p) => {
            let sol = SolutionArchive::load(p)?.to_solution()?;
            let alpha = sol.alpha;
            (Some(sol), alpha)
        }
        None => (None, parse_alpha(args.alpha.expect("validated"))?),
    };
    let cfg = SweepConfig {
        solver: SolverConfig::default().with_n_points(args.n),
        analysis: AnalysisConfig {
            k_min: args.k_min,
            k_cap: args.k_cap,
            zero_tol: None,
        },
        ..SweepConfig::default()
    };
    let sweeper = Sweeper::new(alpha, cfg)?;
    let sol = match sol {
        Some(s) => s,
        None => sweeper.solve(args.c.expect("validated"))?,
    };
    let (_, a_prime) = sweeper.d_at(sol.c)?;
    let report = analyze(&sol, a_prime, &cfg.analysis)?;
    emit_json(&report, args.out.as_deref())?;
    eprintln!(
        "n_neg={} n_zero={} d={:.6e} verdict={}",
        report.n_neg, report.n_zero, report.d, report.verdict
    );
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
struct OracleReport {
    kind: &'static str,
    alpha: f64,
    c: f64,
    sup_diff: Option<f64>,
    l2_diff: Option<f64>,
    residual: f64,
    iterations: usize,
    /// Residual exponent estimated from amplitudes `a` and `a/2`.
    amplitude_exponent: Option<f64>,
}

pub fn oracle(args: &OracleArgs) -> CliResult<i32> {
    args.validate()?;
    let grid = Grid::new(args.n)?;
    let cfg = SolverConfig::default().with_n_points(args.n);
    let compare = |sol: &WaveSolution, exact: &PeriodicField| {
        let diff = sol.phi.sub(exact);
        (diff.sup_norm(), diff.norm_sq().sqrt())
    };
    let (report, trace) = match args.kind {
        OracleKind::Dnoidal => {
            let alpha = FractionalOrder::new(2.0)?;
            let sol = solve_wave_at_speed(args.c, alpha, &cfg, None, None)?;
            let exact = dnoidal_profile(args.c, &grid)?;
            let (s, l) = compare(&sol, &exact.field);
            (
                OracleReport {
                    kind: "dnoidal",
                    alpha: 2.0,
                    c: sol.c,
                    sup_diff: Some(s),
                    l2_diff: Some(l),
                    residual: sol.residual(),
                    iterations: sol.trace.iters(),
                    amplitude_exponent: None,
                },
                Some(sol.trace),
            )
        }
        OracleKind::Rbo => {
            let alpha = FractionalOrder::new(1.0)?;
            let w = 3.0 - 1.0 / args.c;
            let sol = solve_wave(w, alpha, &cfg, None)?;
            let exact = rbo_profile(args.c, &grid)?;
            let (s, l) = compare(&sol, &exact.field);
            (
                OracleReport {
                    kind: "rbo",
                    alpha: 1.0,
                    c: sol.c,
                    sup_diff: Some(s),
                    l2_diff: Some(l),
                    residual: sol.residual(),
                    iterations: sol.trace.iters(),
                    amplitude_exponent: None,
                },
                Some(sol.trace),
            )
        }
        OracleKind::SmallAmplitude => {
            let alpha = parse_alpha(args.alpha)?;
            let full = small_amplitude_phi(args.amplitude, alpha, &grid)?;
            let half = small_amplitude_phi(args.amplitude / 2.0, alpha, &grid)?;
            let (r1, r2) = (full.residual(), half.residual());
            (
                OracleReport {
                    kind: "small-amplitude",
                    alpha: args.alpha,
                    c: full.c,
                    sup_diff: None,
                    l2_diff: None,
                    residual: r1,
                    iterations: 0,
                    amplitude_exponent: Some((r1 / r2).log2()),
                },
                None,
            )
        }
    };
    if let (Some(p), Some(t)) = (&args.curves, &trace) {
        write_text(p, &trace_csv(t))?;
    }
    emit_json(&report, args.out.as_deref())?;
    Ok(exit::OK)
}

pub fn evolve_cmd(args: &EvolveArgs) -> CliResult<i32> {
    args.validate()?;
    let (reference, alpha) = match &args.input {
        Some(p) => {
            let arch = SolutionArchive::load(p)?;
            (arch.field()?, parse_alpha(arch.alpha)?)
        }
        None => {
            let alpha = parse_alpha(args.alpha.expect("validated"))?;
            (PeriodicField::zeros(&Grid::new(args.n)?), alpha)
        }
    };
    let u0 = if args.perturb_mode > 0 && args.perturb_eps != 0.0 {
        perturb(&reference, args.perturb_mode, args.perturb_eps)
    } else {
        reference.clone()
    };
    let cfg = EvolutionConfig {
        dt: args.dt,
        t_final: args.t_final,
        record_every: args.record_every,
        ..EvolutionConfig::default()
    };
    let rep = evolve(&u0, alpha, &cfg, Some(&reference))?;
    write_text(&args.ledger, &ledger_csv(&rep.ledger))?;
    let mut drift = String::from("t,rho,shift\n");
    for s in &rep.drift {
        drift.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", s.t, s.rho, s.shift));
    }
    write_text(&args.drift, &drift)?;
    let (dp, dm) = rep.conservation_defect();
    println!(
        "steps={} max_drift={:.6e} P_defect={:.3e} M_defect={:.3e}",
        cfg.n_steps(),
        rep.max_drift(),
        dp,
        dm
    );
    Ok(exit::OK)
}

pub fn validate(args: &ValidateArgs) -> CliResult<i32> {
    let outcomes = validation::run(&args.only, |o| println!("{}", o.line()));
    let total: f64 = outcomes.iter().map(|o| o.seconds).sum();
    println!("total time {total:.1} s");
    if let Some(p) = &args.report {
        write_text(p, &to_json(&outcomes))?;
    }
    if outcomes.is_empty() {
        return Err(CliError::config("only", "no check matches the given ids"));
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        exit::OK
    } else {
        exit::CHECKS_FAILED
    })
}

pub fn dispatch(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Stability(a) => stability(a),
        Command::Oracle(a) => oracle(a),
        Command::Evolve(a) => evolve_cmd(a),
        Command::Validate(a) => validate(a),
    }
}
