//! Robust sequential hypothesis tests built on the supermartingale pair.
//!
//! A two-sided test of `μ = mu0` rejects once either process of the pair
//! exceeds `2/α` — exactly the event that `mu0` falls outside the confidence
//! sequence, since `log M_t = f_t(mu0) - G̃_t` and `log N_t = -f_t(mu0) - G̃_t`.
//! A one-sided test of `μ <= mu0` rejects once the `+phi` process alone
//! exceeds `1/α`. Decisions are stopping rules: once rejected, a test stays
//! rejected. Type-I error is controlled at level `α` uniformly over the
//! TV-enlarged null.

use crate::config::RcsConfig;
use crate::confseq::ConfidenceInterval;
use crate::error::Result;
use crate::martingales::SupermartingalePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// H0: `μ = mu0`; rejects when either process exceeds `2/α`.
    TwoSidedPoint,
    /// H0: `μ <= mu0`; rejects when `M > 1/α`.
    OneSidedGreater,
}

/// State of one sequential test anchored at a candidate mean.
#[derive(Debug, Clone)]
pub struct TestState {
    kind: TestKind,
    mu0: f64,
    cfg: RcsConfig,
    pair: SupermartingalePair,
    rejected_at: Option<u64>,
}

impl TestState {
    pub fn two_sided(mu0: f64, cfg: RcsConfig) -> Self {
        Self::with_kind(TestKind::TwoSidedPoint, mu0, cfg)
    }

    pub fn one_sided(mu0: f64, cfg: RcsConfig) -> Self {
        Self::with_kind(TestKind::OneSidedGreater, mu0, cfg)
    }

    fn with_kind(kind: TestKind, mu0: f64, cfg: RcsConfig) -> Self {
        TestState {
            kind,
            mu0,
            cfg,
            pair: SupermartingalePair::new(),
            rejected_at: None,
        }
    }

    /// Advance by one observation with a predictable weight.
    pub fn step(&mut self, x: f64, lambda: f64) -> Result<()> {
        self.pair.step(x, lambda, self.mu0, &self.cfg)?;
        if self.rejected_at.is_none() && self.crossed() {
            self.rejected_at = Some(self.pair.t);
        }
        Ok(())
    }

    fn crossed(&self) -> bool {
        match self.kind {
            TestKind::TwoSidedPoint => {
                // the two sides can never exceed the threshold simultaneously
                // (their product is below 1), so the rejection event is a
                // union over the pair
                let threshold = (2.0 / self.cfg.alpha).ln();
                self.pair.log_m.max(self.pair.log_n) > threshold
            }
            TestKind::OneSidedGreater => self.pair.log_m > (1.0 / self.cfg.alpha).ln(),
        }
    }

    pub fn rejected(&self) -> bool {
        self.rejected_at.is_some()
    }

    /// Time at which the test first rejected, if it has.
    pub fn rejected_at(&self) -> Option<u64> {
        self.rejected_at
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn t(&self) -> u64 {
        self.pair.t
    }

    pub fn pair(&self) -> &SupermartingalePair {
        &self.pair
    }

    /// Exponential growth certificate for the one-sided process:
    /// true iff `log M_t > log(δ/4) + t ε/4`.
    pub fn growth_certificate(&self, epsilon: f64, delta: f64) -> bool {
        self.pair.log_m > (delta / 4.0).ln() + self.pair.t as f64 * epsilon / 4.0
    }
}

/// Interval-duality rejection for the point null `μ = mu0`.
pub fn interval_rejects_point(ci: &ConfidenceInterval, mu0: f64) -> bool {
    !ci.contains(mu0)
}

/// Interval-duality rejection for the one-sided null `μ <= mu0`: the whole
/// interval must sit above `mu0`.
pub fn interval_rejects_one_sided(ci: &ConfidenceInterval, mu0: f64) -> bool {
    ci.lower > mu0
}
