//! Periodic traveling waves of the fractional Benjamin–Bona–Mahony equation
//!
//! ```text
//! u_t + u_x + u u_x + (D^α u)_t = 0,   D^α ↔ |k|^α,   0 < α ≤ 2,
//! ```
//!
//! on the 2π-periodic domain: pseudospectral profile solvers (Petviashvili
//! and cosine-basis Newton), closed-form reference waves, spectral-stability
//! indicators of the linearised operator, speed continuation, and an RK4
//! evolution with conservation monitoring.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod evolution;
mod krylov;
pub mod newton;
pub mod oracles;
pub mod petviashvili;
pub mod spectral;
pub mod stability;
pub mod wave;

pub use error::{Error, Result};
pub use spectral::{FractionalOrder, Grid, PeriodicField};
pub use wave::{ConvergenceTrace, Method, TraceEntry, WaveSolution};
