use serde::{Deserialize, Serialize};

use crate::lp::SolverOptions;
use crate::{Error, Result};

/// Numerical tolerances shared by every operation in the crate.
/// Deserializing fills missing fields from the defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Allowed deviation of a unit vector's norm from 1, and the duplicate-generator radius.
    pub unit_tol: f64,
    /// Threshold standing in for strict inequalities `P·Q > 0`.
    pub margin_tol: f64,
    /// Feasibility/optimality tolerance of the simplex solver.
    pub lp_tol: f64,
    /// Target hyperplane offset magnitude for the contraction loop.
    pub offset_tol: f64,
    /// Cap on epsilon halvings and on contraction rounds.
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            unit_tol: 1e-12,
            margin_tol: 1e-9,
            lp_tol: 1e-10,
            offset_tol: 1e-6,
            max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("unit_tol", self.unit_tol),
            ("margin_tol", self.margin_tol),
            ("lp_tol", self.lp_tol),
            ("offset_tol", self.offset_tol),
        ];
        for (name, value) in tols {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} must be positive, got {value}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidTolerance("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.lp_tol,
            ..SolverOptions::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ToleranceConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.unit_tol, 1e-12);
        assert_eq!(cfg.margin_tol, 1e-9);
        assert_eq!(cfg.lp_tol, 1e-10);
        assert_eq!(cfg.offset_tol, 1e-6);
        assert_eq!(cfg.max_iter, 200);
    }

    #[test]
    fn rejects_nonpositive() {
        let cfg = ToleranceConfig { margin_tol: 0.0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidTolerance(_))));
        let cfg = ToleranceConfig { max_iter: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = ToleranceConfig { lp_tol: f64::NAN, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
