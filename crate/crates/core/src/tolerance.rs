use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every numerical threshold used by the library, in one place.
///
/// `reality_tol`, `gap_tol` and `residual_tol` are relative; `series_tol`
/// is absolute; `rank_tol` is relative to the largest singular value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub reality_tol: f64,
    pub gap_tol: f64,
    pub residual_tol: f64,
    pub series_tol: f64,
    pub rank_tol: f64,
    /// Cap on QR sweeps per eigenvalue in the Schur iteration.
    pub max_qr_iterations: usize,
    /// Cap on the number of series terms in `gamma_series`.
    pub max_series_terms: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            reality_tol: 1e-9,
            gap_tol: 1e-9,
            residual_tol: 1e-9,
            series_tol: 1e-12,
            rank_tol: 1e-10,
            max_qr_iterations: 60,
            max_series_terms: 400,
        }
    }
}

impl ToleranceConfig {
    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("reality_tol", self.reality_tol),
            ("gap_tol", self.gap_tol),
            ("residual_tol", self.residual_tol),
            ("series_tol", self.series_tol),
            ("rank_tol", self.rank_tol),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        if self.max_qr_iterations == 0 {
            return Err(Error::InvalidTolerance {
                name: "max_qr_iterations",
                value: 0.0,
            });
        }
        if self.max_series_terms == 0 {
            return Err(Error::InvalidTolerance {
                name: "max_series_terms",
                value: 0.0,
            });
        }
        Ok(())
    }
}
