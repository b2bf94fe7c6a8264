//! Command-line arguments and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracwave_core::FractionalOrder;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "fracwave",
    version,
    about = "Periodic travelling waves of the fractional BBM equation"
)]
pub struct Cli {
    /// Worker threads for sweeps (overridden by FRACWAVE_JOBS).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for one periodic wave and archive it.
    Solve(SolveArgs),
    /// Continuation table over a range of speeds.
    Sweep(SweepArgs),
    /// Eigenvalue counts and stability verdict for one wave.
    Stability(StabilityArgs),
    /// Compare the solver with a closed-form solution.
    Oracle(OracleArgs),
    /// Time-evolve a wave and record conserved quantities and orbital drift.
    Evolve(EvolveArgs),
    /// Run the full validation suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    /// Petviashvili, falling back to Newton continuation.
    Auto,
    Petviashvili,
    Newton,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Wave speed (c > 1/2).
    #[arg(long, conflicts_with = "w")]
    pub c: Option<f64>,
    /// Iteration parameter of the positive form; the speed is recovered.
    #[arg(long)]
    pub w: Option<f64>,
    /// Grid points (power of two).
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_res: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = SolveMethod::Auto)]
    pub method: SolveMethod,
    /// Cosine modes for Newton continuation.
    #[arg(long, default_value_t = 2048)]
    pub newton_modes: usize,
    #[arg(long, default_value = "solution.json")]
    pub out: PathBuf,
    /// Optional `x,phi` profile table.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub c_min: f64,
    #[arg(long)]
    pub c_max: f64,
    /// Number of intervals; `steps + 1` speeds are solved.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 2048)]
    pub newton_modes: usize,
    /// Half-width of the centred difference for A'(c).
    #[arg(long, default_value_t = 1e-3)]
    pub fd_step: f64,
    /// Refine the sign change of d to this tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub critical_tol: f64,
    /// Skip the refinement of the critical speed.
    #[arg(long)]
    pub no_critical: bool,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
    /// Summary JSON (default: next to the table).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    /// Archived solution to analyse.
    #[arg(long, conflicts_with_all = ["alpha", "c"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 64)]
    pub k_min: usize,
    #[arg(long, default_value_t = 1024)]
    pub k_cap: usize,
    /// Report JSON (printed to stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    Dnoidal,
    Rbo,
    SmallAmplitude,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub kind: OracleKind,
    /// Speed (dnoidal and rbo).
    #[arg(long, default_value_t = 1.2181)]
    pub c: f64,
    /// Fractional order (small-amplitude mode).
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    /// Amplitude (small-amplitude mode).
    #[arg(long, default_value_t = 0.05)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Per-iteration error curves `n,Error,M_defect,RES`.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    /// Report JSON (printed to stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Archived wave used as initial data and drift reference.
    #[arg(long, required_unless_present = "zero")]
    pub input: Option<PathBuf>,
    /// Start from u = 0 instead of an archive.
    #[arg(long, conflicts_with = "input", requires = "alpha")]
    pub zero: bool,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Add `eps cos(k x)` with this k.
    #[arg(long, default_value_t = 0)]
    pub perturb_mode: u32,
    #[arg(long, default_value_t = 0.0)]
    pub perturb_eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value = "ledger.csv")]
    pub ledger: PathBuf,
    #[arg(long, default_value = "drift.csv")]
    pub drift: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run only the checks with these ids (e.g. 1, 4b, 10).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Machine-readable results.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn parse_alpha(a: f64) -> CliResult<FractionalOrder> {
    FractionalOrder::new(a).map_err(|_| CliError::config("alpha", format!("{a} must lie in (0, 2]")))
}

pub fn check_speed(c: f64) -> CliResult<()> {
    if !(c.is_finite() && c > 0.5) {
        return Err(CliError::config(
            "c",
            format!("{c} is not above 1/2; periodic waves exist only for c > 1/2"),
        ));
    }
    Ok(())
}

pub fn check_grid(field: &'static str, n: usize) -> CliResult<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(CliError::config(field, format!("{n} must be a power of two ≥ 16")));
    }
    Ok(())
}

fn check_positive(field: &'static str, x: f64) -> CliResult<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(CliError::config(field, format!("{x} must be positive")));
    }
    Ok(())
}

impl SolveArgs {
    pub fn validate(&self) -> CliResult<FractionalOrder> {
        let alpha = parse_alpha(self.alpha)?;
        match (self.c, self.w) {
            (Some(c), None) => check_speed(c)?,
            (None, Some(w)) => check_positive("w", w)?,
            _ => return Err(CliError::config("c", "give exactly one of --c and --w")),
        }
        if self.w.is_some() && self.method == SolveMethod::Newton {
            return Err(CliError::config("method", "Newton continuation is parametrised by --c"));
        }
        check_grid("n", self.n)?;
        check_positive("tol_res", self.tol_res)?;
        if self.max_iters == 0 {
            return Err(CliError::config("max_iters", "must be positive"));
        }
        if self.newton_modes < 2 {
            return Err(CliError::config("newton_modes", "must be at least 2"));
        }
        Ok(alpha)
    }
}

impl SweepArgs {
    pub fn validate(&self) -> CliResult<FractionalOrder> {
        let alpha = parse_alpha(self.alpha)?;
        check_speed(self.c_min).map_err(|_| {
            CliError::config(
                "c_min",
                format!("{} is not above 1/2; periodic waves exist only for c > 1/2", self.c_min),
            )
        })?;
        if !(self.c_max > self.c_min) {
            return Err(CliError::config("c_max", format!("{} must exceed c_min", self.c_max)));
        }
        if self.steps == 0 {
            return Err(CliError::config("steps", "must be at least 1"));
        }
        check_grid("n", self.n)?;
        check_positive("fd_step", self.fd_step)?;
        check_positive("critical_tol", self.critical_tol)?;
        if self.c_min - self.fd_step <= 0.5 {
            return Err(CliError::config(
                "fd_step",
                "the difference stencil at c_min reaches c ≤ 1/2",
            ));
        }
        Ok(alpha)
    }
}

impl StabilityArgs {
    pub fn validate(&self) -> CliResult<()> {
        if self.input.is_none() {
            let a = self
                .alpha
                .ok_or_else(|| CliError::config("alpha", "required without --input"))?;
            parse_alpha(a)?;
            check_speed(
                self.c
                    .ok_or_else(|| CliError::config("c", "required without --input"))?,
            )?;
        }
        check_grid("n", self.n)?;
        if self.k_min == 0 || self.k_cap < self.k_min {
            return Err(CliError::config("k_cap", "need 0 < k_min ≤ k_cap"));
        }
        Ok(())
    }
}

impl OracleArgs {
    pub fn validate(&self) -> CliResult<()> {
        check_grid("n", self.n)?;
        match self.kind {
            OracleKind::Dnoidal | OracleKind::Rbo => check_speed(self.c),
            OracleKind::SmallAmplitude => {
                parse_alpha(self.alpha)?;
                check_positive("amplitude", self.amplitude)
            }
        }
    }
}

impl EvolveArgs {
    pub fn validate(&self) -> CliResult<()> {
        if self.zero {
            parse_alpha(self.alpha.unwrap_or(f64::NAN))?;
            check_grid("n", self.n)?;
        }
        check_positive("dt", self.dt)?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(CliError::config("t_final", "must be non-negative"));
        }
        if self.record_every == 0 {
            return Err(CliError::config("record_every", "must be at least 1"));
        }
        if !self.perturb_eps.is_finite() {
            return Err(CliError::config("perturb_eps", "must be finite"));
        }
        Ok(())
    }
}
