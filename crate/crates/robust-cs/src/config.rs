//! Problem configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::influence::MomentOrder;

/// Parameters of a robust confidence-sequence problem.
///
/// `kappa` bounds the `p`-th absolute central moment of the clean
/// distribution; when `p = 2` it is the variance bound `σ²`. `epsilon` is the
/// total-variation contamination radius and `alpha` the miscoverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcsConfig {
    pub p: MomentOrder,
    pub kappa: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl RcsConfig {
    pub fn new(p: MomentOrder, kappa: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::domain(format!("kappa must be >= 0, got {kappa}")));
        }
        if !(epsilon.is_finite() && (0.0..1.0).contains(&epsilon)) {
            return Err(Error::domain(format!(
                "epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(RcsConfig {
            p,
            kappa,
            epsilon,
            alpha,
        })
    }

    /// Convenience constructor for the variance-bound case `p = 2`,
    /// where `kappa` is interpreted as `σ²`.
    pub fn with_variance(sigma2: f64, epsilon: f64, alpha: f64) -> Result<Self> {
        Self::new(MomentOrder::two(), sigma2, epsilon, alpha)
    }

    /// `σ = sqrt(kappa)`; meaningful as a standard deviation only at `p = 2`.
    pub fn sigma(&self) -> f64 {
        self.kappa.sqrt()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.p, self.kappa, self.epsilon, self.alpha).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_ranges() {
        assert!(RcsConfig::with_variance(9.0, 1.0 / 9.0, 0.05).is_ok());
        assert!(RcsConfig::with_variance(-1.0, 0.1, 0.05).is_err());
        assert!(RcsConfig::with_variance(1.0, 1.0, 0.05).is_err());
        assert!(RcsConfig::with_variance(1.0, 0.1, 0.0).is_err());
        assert!(RcsConfig::with_variance(1.0, 0.1, 1.0).is_err());
        assert!(RcsConfig::with_variance(1.0, 0.0, 0.5).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let cfg = RcsConfig::new(MomentOrder::new(1.5).unwrap(), 2.0, 0.06, 0.1).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RcsConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn json_rejects_bad_moment_order() {
        let text = r#"{"p": 2.5, "kappa": 1.0, "epsilon": 0.1, "alpha": 0.05}"#;
        assert!(serde_json::from_str::<RcsConfig>(text).is_err());
    }
}
