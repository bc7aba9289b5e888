use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Geometric,
}

/// `lo:hi:steps` grid specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts.as_slice() else {
            return Err(format!("expected lo:hi:steps, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let steps: usize = steps.trim().parse().map_err(|e| format!("{steps:?}: {e}"))?;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(format!("grid bounds must be finite with lo <= hi, got {lo}:{hi}"));
        }
        if steps == 0 {
            return Err("grid needs at least one step".into());
        }
        if steps == 1 && lo != hi {
            return Err("a one-point grid needs lo == hi".into());
        }
        Ok(GridSpec { lo, hi, steps })
    }
}

impl GridSpec {
    pub fn points(&self, spacing: Spacing) -> Result<Vec<f64>> {
        if self.steps == 1 {
            return Ok(vec![self.lo]);
        }
        let last = (self.steps - 1) as f64;
        match spacing {
            Spacing::Linear => Ok((0..self.steps)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / last)
                .collect()),
            Spacing::Geometric => {
                if self.lo <= 0.0 {
                    return Err(CliError::Usage(format!(
                        "geometric grid needs lo > 0, got {}",
                        self.lo
                    )));
                }
                let (a, b) = (self.lo.log10(), self.hi.log10());
                Ok((0..self.steps)
                    .map(|i| match i {
                        0 => self.lo,
                        i if i == self.steps - 1 => self.hi,
                        _ => 10f64.powf(a + (b - a) * i as f64 / last),
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub theta: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub alpha_grid: GridSpec,
    pub theta_grid: GridSpec,
    pub runs: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 1000.0,
            theta: 0.1,
            seed: 0,
            output_path: None,
            format: Format::Csv,
            alpha_grid: GridSpec {
                lo: 10.0,
                hi: 10_000.0,
                steps: 4,
            },
            theta_grid: GridSpec {
                lo: 0.05,
                hi: 0.3,
                steps: 6,
            },
            runs: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(CliError::Usage(format!("--alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.theta.is_finite() && (0.0..std::f64::consts::PI).contains(&self.theta)) {
            return Err(CliError::Usage(format!(
                "--theta must lie in [0, pi), got {}",
                self.theta
            )));
        }
        if self.runs == 0 {
            return Err(CliError::Usage("--runs must be >= 1".into()));
        }
        Ok(())
    }

    pub fn run_seed(&self, index: u64) -> u64 {
        self.seed ^ index
    }
}
