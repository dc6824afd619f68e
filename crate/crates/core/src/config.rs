use crate::error::{invalid, Result};

/// Working precision used for rank-discard thresholds with double precision
/// inputs of desk-scale sizes.
pub const DEFAULT_WORKING_PRECISION: f64 = 1e-11;
/// Rows per block in the partitioned representation.
pub const DEFAULT_BLOCK_ROWS: usize = 1024;
/// Power-method iterations used by the error estimator.
pub const DEFAULT_POWER_ITERS: usize = 20;

/// Knobs shared by every algorithm run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Machine precision adjusted for accumulated roundoff; drives the
    /// rank-discard rules.
    pub working_precision: f64,
    pub seed: u64,
    pub block_rows: usize,
    pub power_iters: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            working_precision: DEFAULT_WORKING_PRECISION,
            seed: 0,
            block_rows: DEFAULT_BLOCK_ROWS,
            power_iters: DEFAULT_POWER_ITERS,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.working_precision > 0.0 && self.working_precision < 1.0) {
            return Err(invalid(format!(
                "working precision must lie in (0, 1), got {}",
                self.working_precision
            )));
        }
        if self.block_rows == 0 {
            return Err(invalid("block_rows must be at least 1"));
        }
        if self.power_iters == 0 {
            return Err(invalid("power_iters must be at least 1"));
        }
        Ok(())
    }
}
