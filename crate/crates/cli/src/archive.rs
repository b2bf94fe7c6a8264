//! JSON archives of solved waves.
//!
//! Floats are written by `serde_json` with round-trip formatting, so loading
//! an archive reproduces every sample bit for bit.

use std::path::Path;

use fracwave_core::{ConvergenceTrace, FractionalOrder, Grid, Method, PeriodicField, WaveSolution};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const ARCHIVE_VERSION: &str = "1";

/// Last entry of the convergence trace. Missing values (e.g. no step taken
/// yet) are stored as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub final_error: Option<f64>,
    pub final_m_defect: Option<f64>,
    pub final_res: Option<f64>,
    pub iters: usize,
}

impl TraceSummary {
    pub fn of(trace: &ConvergenceTrace) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        match trace.last() {
            Some(e) => Self {
                final_error: finite(e.error),
                final_m_defect: finite(e.m_defect),
                final_res: finite(e.res),
                iters: trace.iters(),
            },
            None => Self {
                final_error: None,
                final_m_defect: None,
                final_res: None,
                iters: 0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionArchive {
    pub version: String,
    pub alpha: f64,
    pub c: f64,
    pub w: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub method: Method,
    pub n_points: usize,
    pub samples: Vec<f64>,
    pub trace_summary: TraceSummary,
}

impl SolutionArchive {
    pub fn from_solution(sol: &WaveSolution) -> Self {
        Self {
            version: ARCHIVE_VERSION.to_string(),
            alpha: sol.alpha.value(),
            c: sol.c,
            w: sol.w,
            a: sol.a,
            method: sol.method,
            n_points: sol.phi.grid().n_points(),
            samples: sol.phi.samples().to_vec(),
            trace_summary: TraceSummary::of(&sol.trace),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("archive serialises") + "\n"
    }

    pub fn from_json(text: &str, origin: &Path) -> CliResult<Self> {
        let arch: Self = serde_json::from_str(text).map_err(|source| CliError::Archive {
            path: origin.to_path_buf(),
            source,
        })?;
        if arch.version != ARCHIVE_VERSION {
            return Err(CliError::ArchiveVersion(arch.version));
        }
        if arch.samples.len() != arch.n_points {
            return Err(CliError::config(
                "samples",
                format!("{} samples but n_points = {}", arch.samples.len(), arch.n_points),
            ));
        }
        Ok(arch)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    /// The profile as a field on its grid.
    pub fn field(&self) -> CliResult<PeriodicField> {
        let grid = Grid::new(self.n_points)?;
        Ok(PeriodicField::from_samples(&grid, self.samples.clone()))
    }

    /// Rebuilds the wave; only the trace summary survives archiving.
    pub fn to_solution(&self) -> CliResult<WaveSolution> {
        let alpha = FractionalOrder::new(self.alpha)?;
        let mut sol = WaveSolution::from_phi(self.field()?, alpha, self.c, ConvergenceTrace::default(), self.method);
        // keep the archived scalars exactly
        sol.w = self.w;
        sol.a = self.a;
        Ok(sol)
    }
}

/// `x,phi` profile table.
pub fn profile_csv(phi: &PeriodicField) -> String {
    let mut out = String::from("x,phi\n");
    for (j, v) in phi.samples().iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e}\n", phi.grid().node(j), v));
    }
    out
}

/// Per-iteration convergence table `n,Error,M_defect,RES`.
pub fn trace_csv(trace: &ConvergenceTrace) -> String {
    let mut out = String::from("n,Error,M_defect,RES\n");
    for (i, e) in trace.entries.iter().enumerate() {
        out.push_str(&format!("{},{:.16e},{:.16e},{:.16e}\n", i, e.error, e.m_defect, e.res));
    }
    out
}

/// Writes `text` to `path`, mapping failures to the I/O exit code.
pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
