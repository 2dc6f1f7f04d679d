//! Predictable weight schedules.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A predictable weight schedule `t -> λ_t`, `t >= 1`.
///
/// Schedules are functions of the step index only, never of the data, so the
/// weight used at step `t` is known before the observation arrives.
#[derive(Clone)]
pub enum LambdaSchedule {
    /// `λ_t = value`.
    Constant(f64),
    /// `λ_t = coeff * t^exponent`.
    Power { coeff: f64, exponent: f64 },
    /// Arbitrary user schedule over the step index.
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl LambdaSchedule {
    pub fn constant(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::domain(format!(
                "constant lambda must be positive and finite, got {value}"
            )));
        }
        Ok(LambdaSchedule::Constant(value))
    }

    pub fn power(coeff: f64, exponent: f64) -> Result<Self> {
        if !(coeff.is_finite() && coeff > 0.0 && exponent.is_finite()) {
            return Err(Error::domain(format!(
                "power schedule needs a positive finite coefficient and finite exponent, got {coeff} * t^{exponent}"
            )));
        }
        Ok(LambdaSchedule::Power { coeff, exponent })
    }

    pub fn custom(f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        LambdaSchedule::Custom(Arc::new(f))
    }

    /// The weight used at step `t` (1-based).
    pub fn lambda_at(&self, t: u64) -> f64 {
        match self {
            LambdaSchedule::Constant(v) => *v,
            LambdaSchedule::Power { coeff, exponent } => coeff * (t as f64).powf(*exponent),
            LambdaSchedule::Custom(f) => f(t),
        }
    }

    /// Tag used in tracker checkpoints. Custom schedules serialize as
    /// `custom` and must be re-supplied on load.
    pub(crate) fn checkpoint_tag(&self) -> String {
        match self {
            LambdaSchedule::Constant(v) => format!("constant:{v}"),
            LambdaSchedule::Power { coeff, exponent } => format!("power:{coeff}:{exponent}"),
            LambdaSchedule::Custom(_) => "custom".to_string(),
        }
    }

    pub(crate) fn from_checkpoint_tag(tag: &str) -> Result<Option<Self>> {
        if tag == "custom" {
            return Ok(None);
        }
        let parts: Vec<&str> = tag.split(':').collect();
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad schedule number {s:?}")))
        };
        match parts.as_slice() {
            ["constant", v] => Ok(Some(LambdaSchedule::constant(parse(v)?)?)),
            ["power", c, u] => Ok(Some(LambdaSchedule::power(parse(c)?, parse(u)?)?)),
            _ => Err(Error::Config(format!("unknown schedule tag {tag:?}"))),
        }
    }
}

impl fmt::Debug for LambdaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSchedule::Constant(v) => write!(f, "Constant({v})"),
            LambdaSchedule::Power { coeff, exponent } => {
                write!(f, "Power {{ coeff: {coeff}, exponent: {exponent} }}")
            }
            LambdaSchedule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_power_values() {
        let c = LambdaSchedule::constant(0.25).unwrap();
        assert_eq!(c.lambda_at(1), 0.25);
        assert_eq!(c.lambda_at(1000), 0.25);

        let p = LambdaSchedule::power(0.5, -0.5).unwrap();
        assert_eq!(p.lambda_at(1), 0.5);
        assert_eq!(p.lambda_at(4), 0.25);
    }

    #[test]
    fn custom_schedule() {
        let s = LambdaSchedule::custom(|t| 1.0 / (1.0 + t as f64));
        assert_eq!(s.lambda_at(1), 0.5);
    }

    #[test]
    fn checkpoint_tags_round_trip() {
        let c = LambdaSchedule::constant(0.125).unwrap();
        let back = LambdaSchedule::from_checkpoint_tag(&c.checkpoint_tag())
            .unwrap()
            .unwrap();
        assert_eq!(back.lambda_at(7), 0.125);

        let p = LambdaSchedule::power(0.5, -0.25).unwrap();
        let back = LambdaSchedule::from_checkpoint_tag(&p.checkpoint_tag())
            .unwrap()
            .unwrap();
        assert_eq!(back.lambda_at(16), 0.25);

        assert!(LambdaSchedule::from_checkpoint_tag("custom")
            .unwrap()
            .is_none());
        assert!(LambdaSchedule::from_checkpoint_tag("nonsense").is_err());
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(LambdaSchedule::constant(0.0).is_err());
        assert!(LambdaSchedule::constant(-1.0).is_err());
        assert!(LambdaSchedule::power(0.0, 0.5).is_err());
    }
}
