//! Robust confidence sequences for the mean of a contaminated data stream.
//!
//! An unknown fraction `ε` of the stream may be arbitrarily corrupted (in the
//! total-variation sense); the clean distribution is only assumed to have its
//! `p`-th absolute central moment bounded by a known `κ` (variance `σ²` when
//! `p = 2`). The [`confseq::RcsTracker`] maintains an interval for the clean
//! mean that is valid at every time simultaneously, built from a pair of
//! nonnegative supermartingales with a bounded logarithmic influence
//! function. Widths stay within a constant factor of the `σ√ε` lower bound
//! and the construction tolerates contamination up to `ε < 8/13` under the
//! default tuning.
//!
//! The crate also ships the matching sequential tests ([`seqtest`]), a robust
//! betting process for bounded data ([`martingales::BettingState`]),
//! trimmed-mean and non-robust comparators ([`baselines`]), and a seeded
//! Monte Carlo harness ([`simulate`]) whose replications run in parallel by
//! default (feature `parallel`).
//!
//! ```
//! use robust_cs::{LambdaSchedule, RcsConfig, RcsTracker};
//!
//! let cfg = RcsConfig::with_variance(9.0, 1.0 / 9.0, 0.05)?;
//! let mut tracker = RcsTracker::with_default_lambda(cfg)?;
//! for x in [0.4, -2.1, 1.3, 0.0, 3.2] {
//!     tracker.update(x)?;
//! }
//! let ci = tracker.query_interval()?;
//! assert!(ci.lower < ci.upper);
//! # let _ = LambdaSchedule::constant(0.1);
//! # Ok::<(), robust_cs::Error>(())
//! ```

pub mod baselines;
pub mod config;
pub mod confseq;
pub mod error;
pub mod influence;
pub mod martingales;
mod rootfind;
pub mod schedule;
pub mod seqtest;
pub mod simulate;

pub use config::RcsConfig;
pub use confseq::{breakdown_feasible, default_lambda, ConfidenceInterval, RcsTracker};
pub use error::{Error, Result};
pub use influence::MomentOrder;
pub use schedule::LambdaSchedule;
