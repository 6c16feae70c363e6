//! Stochastic simulation and analysis of sub-shot-noise imaging with
//! multi-mode twin beams.
//!
//! A traveling-wave parametric amplifier emits pairs of photons into
//! symmetric transverse modes of its two output arms (signal and idler).
//! Because the pair emission is perfectly correlated, the *difference*
//! between the photon counts of two symmetric detector pixels fluctuates
//! less than shot noise, and an absorbing object placed in one arm can be
//! imaged with a signal-to-noise ratio beyond the classical limit.
//!
//! The crate has three layers:
//!
//! * [`analytic`] — closed-form two-mode formulas for the difference
//!   variance, the differential SNR, the quantum improvement factor and
//!   their operating limits, plus [`oracle`], a discrete-mode Monte Carlo
//!   that checks them independently of any field simulation.
//! * field simulation — stochastic phase-space (Wigner) trajectories of the
//!   full multi-mode parametric interaction, propagated through the crystal
//!   and imaged onto a far-field detection plane.
//! * detection and harness — pixel-level counting statistics, estimators
//!   with standard errors, and a scenario runner with file outputs.
//!
//! Start with the examples directory; each example exercises one capability
//! end to end.

pub mod analytic;
pub mod commands;
pub mod config;
pub mod crystal;
pub mod error;
pub mod estimate;
pub mod field;
mod fft;
pub mod grid;
pub mod object;
pub mod oracle;
pub mod output;
pub mod pixel;
pub mod propagate;
pub mod pump;
pub mod pwp;
pub mod runner;

pub use error::{Result, TwinError};

/// Which beam of the twin pair an operation addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    One,
    Two,
}

/// A point estimate with its one-standard-error uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(value: f64, stderr: f64) -> Self {
        Self { value, stderr }
    }

    /// Whether `truth` lies within `k` standard errors of the estimate.
    pub fn consistent_with(&self, truth: f64, k: f64) -> bool {
        (self.value - truth).abs() <= k * self.stderr
    }
}

impl std::fmt::Display for Estimate {
    /// Rounds to two significant digits of the standard error, the usual
    /// convention for quoting measurements (e.g. `0.2031 ± 0.0071`).
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !(self.value.is_finite() && self.stderr.is_finite()) || self.stderr <= 0.0 {
            return write!(f, "{} ± {}", self.value, self.stderr);
        }
        let digits = (1 - self.stderr.abs().log10().floor() as i32).max(0) as usize;
        write!(f, "{:.digits$} ± {:.digits$}", self.value, self.stderr)
    }
}
