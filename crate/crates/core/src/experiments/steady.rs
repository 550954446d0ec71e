//! Running a scheme until its populations stop changing.

use crate::error::{Error, Result};
use crate::scheme::Evolve;

/// Declares a run steady once the max-norm change of the populations over
/// `check_every` steps, relative to their max-norm, drops below `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateCriterion {
    pub tolerance: f64,
    pub max_steps: usize,
    pub check_every: usize,
}

impl Default for SteadyStateCriterion {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_steps: 2_000_000,
            check_every: 100,
        }
    }
}

impl SteadyStateCriterion {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("steady tolerance must be positive, got {}", self.tolerance)));
        }
        if self.check_every == 0 || self.max_steps == 0 {
            return Err(Error::Config("check_every and max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyReport {
    pub steps: usize,
    pub change: f64,
}

/// Relative max-norm distance between two population snapshots.
pub fn relative_change(current: &[f64], previous: &[f64]) -> f64 {
    let mut diff = 0.0_f64;
    let mut scale = 0.0_f64;
    for (a, b) in current.iter().zip(previous) {
        diff = diff.max((a - b).abs());
        scale = scale.max(a.abs());
    }
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Steps `scheme` until `criterion` fires.
pub fn run_to_steady<S: Evolve>(scheme: &mut S, criterion: &SteadyStateCriterion) -> Result<SteadyReport> {
    criterion.validate()?;
    let mut snapshot = scheme.populations().to_vec();
    let mut change = f64::INFINITY;
    let mut taken = 0;
    while taken < criterion.max_steps {
        for _ in 0..criterion.check_every {
            scheme.step()?;
        }
        taken += criterion.check_every;
        let current = scheme.populations();
        if current.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence {
                steps: taken,
                change: f64::NAN,
            });
        }
        change = relative_change(current, &snapshot);
        if change < criterion.tolerance {
            return Ok(SteadyReport { steps: taken, change });
        }
        snapshot.copy_from_slice(current);
    }
    Err(Error::NonConvergence { steps: taken, change })
}
