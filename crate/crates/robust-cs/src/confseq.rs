//! Streaming robust confidence-sequence tracker.
//!
//! The tracker keeps the full observation history and, on demand, computes
//! the level set `{ m : |f_t(m)| <= G_t }` where
//! `f_t(m) = Σ_i phi_p(λ_i (x_i - m))` and
//! `G_t = log(2/α) + Σ_i log(1 + λ_i^p κ/p + (p - 1/p) ε)`.
//! `f_t` is continuous and nonincreasing in `m`, so the set is an interval
//! whose endpoints are found by bracketed root-finding, warm-started at the
//! previous endpoints. Whenever `G_t >= t log p` the constraint is vacuous
//! and the interval is the whole real line.
//!
//! The full history is stored: `f_t` has no finite sufficient statistic since
//! the influence function is non-polynomial. An update is O(1); an interval
//! query costs a few `f_t` evaluations, each O(t), which is why updates and
//! queries are decoupled.

use std::io::Write;
use std::path::Path;

use crate::config::RcsConfig;
use crate::error::{Error, Result};
use crate::influence::phi_p_raw;
use crate::martingales::log_denominator_raw;
use crate::rootfind::solve_decreasing_with;
use crate::schedule::LambdaSchedule;

/// A possibly half-infinite or fully infinite real interval.
///
/// Finite endpoints are root-finder outputs rounded outward by `tolerance`,
/// so the reported interval always contains the exact level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// Outward-rounding radius used by the root finder; 0 for exact
    /// (infinite) endpoints.
    pub tolerance: f64,
}

impl ConfidenceInterval {
    pub fn unbounded() -> Self {
        ConfidenceInterval {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            tolerance: 0.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, m: f64) -> bool {
        self.lower <= m && m <= self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    /// Intersection, used for the running-intersection view of a sequence.
    pub fn intersect(&self, other: &ConfidenceInterval) -> ConfidenceInterval {
        ConfidenceInterval {
            lower: self.lower.max(other.lower),
            upper: self.upper.min(other.upper),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}

/// Default root-finder tolerance: `1e-9 * max(1, κ^{1/p})`.
pub fn default_tolerance(cfg: &RcsConfig) -> f64 {
    1e-9 * 1f64.max(cfg.kappa.powf(1.0 / cfg.p.get()))
}

/// The tuned constant weight: `0.5 sqrt(ε)/σ` at `p = 2`, `(ε/κ)^{1/p}` for
/// `p < 2`.
pub fn default_lambda(cfg: &RcsConfig) -> Result<f64> {
    if cfg.epsilon <= 0.0 {
        return Err(Error::domain(
            "default lambda is undefined at epsilon = 0; supply a schedule explicitly",
        ));
    }
    if cfg.kappa <= 0.0 {
        return Err(Error::domain(
            "default lambda requires kappa > 0; supply a schedule explicitly",
        ));
    }
    if cfg.p.is_two() {
        Ok(0.5 * cfg.epsilon.sqrt() / cfg.kappa.sqrt())
    } else {
        Ok((cfg.epsilon / cfg.kappa).powf(1.0 / cfg.p.get()))
    }
}

/// Whether the interval eventually becomes finite under the constant weight
/// `lambda`: true iff `p > 1 + λ^p κ/p + (p - 1/p) ε`, i.e. the per-step
/// threshold growth stays below the score saturation level `log p`.
pub fn breakdown_feasible(cfg: &RcsConfig, lambda: f64) -> bool {
    if !(lambda.is_finite() && lambda > 0.0) {
        return false;
    }
    let p = cfg.p.get();
    let lam_p = if p == 2.0 { lambda * lambda } else { lambda.powf(p) };
    p > 1.0 + lam_p * cfg.kappa / p + (p - 1.0 / p) * cfg.epsilon
}

/// Streaming state of one robust confidence sequence.
#[derive(Debug, Clone)]
pub struct RcsTracker {
    cfg: RcsConfig,
    schedule: LambdaSchedule,
    tol: f64,
    /// `(x_i, λ_i)` pairs in arrival order.
    history: Vec<(f64, f64)>,
    /// Accumulated `Σ log(1 + λ_i^p κ/p + (p - 1/p) ε)`; nondecreasing in t.
    log_den_sum: f64,
    /// Previous finite endpoints, used to warm-start the next query.
    warm: Option<(f64, f64)>,
}

impl RcsTracker {
    pub fn new(cfg: RcsConfig, schedule: LambdaSchedule) -> Result<Self> {
        cfg.validate()?;
        let tol = default_tolerance(&cfg);
        Ok(RcsTracker {
            cfg,
            schedule,
            tol,
            history: Vec::new(),
            log_den_sum: 0.0,
            warm: None,
        })
    }

    /// Tracker with the tuned constant weight from `default_lambda`.
    pub fn with_default_lambda(cfg: RcsConfig) -> Result<Self> {
        let lambda = default_lambda(&cfg)?;
        Self::new(cfg, LambdaSchedule::Constant(lambda))
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::domain(format!(
                "tolerance must be positive and finite, got {tol}"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn config(&self) -> &RcsConfig {
        &self.cfg
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn t(&self) -> u64 {
        self.history.len() as u64
    }

    pub fn history(&self) -> &[(f64, f64)] {
        &self.history
    }

    /// Ingest one observation; the weight comes from the schedule.
    pub fn update(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "observation must be finite, got {x}"
            )));
        }
        let t_next = self.history.len() as u64 + 1;
        let lambda = self.schedule.lambda_at(t_next);
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain(format!(
                "schedule produced a non-positive weight {lambda} at t = {t_next}"
            )));
        }
        self.history.push((x, lambda));
        self.log_den_sum += log_denominator_raw(lambda, &self.cfg);
        Ok(())
    }

    /// `f_t(m) = Σ_i phi_p(λ_i (x_i - m))`; nonincreasing in `m` with range
    /// inside `[-t log p, t log p]`.
    pub fn f_t(&self, m: f64) -> Result<f64> {
        if !m.is_finite() {
            return Err(Error::domain(format!(
                "candidate mean must be finite, got {m}"
            )));
        }
        Ok(self.f_value(m))
    }

    fn f_value(&self, m: f64) -> f64 {
        let p = self.cfg.p.get();
        self.history
            .iter()
            .map(|&(x, lambda)| phi_p_raw(lambda * (x - m), p))
            .sum()
    }

    /// The threshold `G_t = log(2/α) + Σ_i log(1 + λ_i^p κ/p + (p - 1/p) ε)`.
    pub fn threshold(&self) -> f64 {
        (2.0 / self.cfg.alpha).ln() + self.log_den_sum
    }

    /// Exact level-set membership: whether `m` lies in the current interval
    /// before outward rounding. O(t).
    pub fn covers(&self, m: f64) -> bool {
        self.f_value(m).abs() <= self.threshold()
    }

    /// Bracket guaranteed to contain every level point: at
    /// `min_i(x_i - 1/λ_i)` all scores saturate at `+log p`, and at
    /// `max_i(x_i + 1/λ_i)` at `-log p`.
    fn global_bracket(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(x, lambda) in &self.history {
            lo = lo.min(x - 1.0 / lambda);
            hi = hi.max(x + 1.0 / lambda);
        }
        (lo, hi)
    }

    /// Root of `f_t(m) = target` with an optional warm-start window around a
    /// previous endpoint, falling back to the guaranteed global bracket.
    fn level_point(&self, target: f64, warm_center: Option<f64>) -> Result<f64> {
        let g = |m: f64| self.f_value(m) - target;
        if let Some(center) = warm_center {
            let radius = 1.0 / self.history.last().map(|&(_, l)| l).unwrap_or(1.0);
            let (lo, hi) = (center - radius, center + radius);
            let (g_lo, g_hi) = (g(lo), g(hi));
            if g_lo >= 0.0 && g_hi <= 0.0 {
                return solve_decreasing_with(g, lo, hi, g_lo, g_hi, self.tol);
            }
        }
        let (lo, hi) = self.global_bracket();
        let (g_lo, g_hi) = (g(lo), g(hi));
        solve_decreasing_with(g, lo, hi, g_lo, g_hi, self.tol)
    }

    /// Current interval. Pure: reads but does not record warm-start state;
    /// safe to call concurrently on a snapshot.
    pub fn interval(&self) -> Result<ConfidenceInterval> {
        let g = self.threshold();
        let t = self.history.len() as f64;
        let cap = t * self.cfg.p.get().ln();
        if self.history.is_empty() || g >= cap {
            return Ok(ConfidenceInterval::unbounded());
        }
        // f_t is nonincreasing: the lower endpoint solves f_t(m) = +G and the
        // upper solves f_t(m) = -G.
        let lower = self.level_point(g, self.warm.map(|(lo, _)| lo))?;
        let upper = self.level_point(-g, self.warm.map(|(_, hi)| hi))?;
        Ok(ConfidenceInterval {
            lower: lower - self.tol,
            upper: upper + self.tol,
            tolerance: self.tol,
        })
    }

    /// Interval query that records the endpoints to warm-start the next one.
    pub fn query_interval(&mut self) -> Result<ConfidenceInterval> {
        let ci = self.interval()?;
        if ci.is_finite() {
            self.warm = Some((ci.lower, ci.upper));
        }
        Ok(ci)
    }

    /// The root of the estimating equation `f_t(m) = 0`; always contained in
    /// the current interval.
    pub fn point_estimate(&self) -> Result<f64> {
        if self.history.is_empty() {
            return Err(Error::domain("point estimate requires t >= 1"));
        }
        self.level_point(0.0, None)
    }

    /// Serialize to the versioned checkpoint format: one header line with
    /// the configuration, then one `t,x,lambda` row per step.
    pub fn to_checkpoint(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "rcs-tracker v1 p={} kappa={} epsilon={} alpha={} tol={} schedule={}\n",
            self.cfg.p.get(),
            self.cfg.kappa,
            self.cfg.epsilon,
            self.cfg.alpha,
            self.tol,
            self.schedule.checkpoint_tag(),
        ));
        for (i, &(x, lambda)) in self.history.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, x, lambda));
        }
        out
    }

    /// Restore from a checkpoint. Fails for `schedule=custom`, which cannot
    /// be reconstructed from text; use `from_checkpoint_with_schedule`.
    pub fn from_checkpoint(text: &str) -> Result<Self> {
        Self::parse_checkpoint(text, None)
    }

    /// Restore from a checkpoint, substituting `schedule` for future steps.
    pub fn from_checkpoint_with_schedule(text: &str, schedule: LambdaSchedule) -> Result<Self> {
        Self::parse_checkpoint(text, Some(schedule))
    }

    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(self.to_checkpoint().as_bytes())?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_checkpoint(&text)
    }

    fn parse_checkpoint(text: &str, schedule_override: Option<LambdaSchedule>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: "empty checkpoint".to_string(),
            })?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("rcs-tracker") || fields.next() != Some("v1") {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header starting with `rcs-tracker v1`".to_string(),
            });
        }
        let mut p = None;
        let mut kappa = None;
        let mut epsilon = None;
        let mut alpha = None;
        let mut tol = None;
        let mut schedule_tag = None;
        for field in fields {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("malformed header field {field:?}"),
            })?;
            let parse_num = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line: 1,
                    msg: format!("bad number {v:?} for {key}"),
                })
            };
            match key {
                "p" => p = Some(parse_num(value)?),
                "kappa" => kappa = Some(parse_num(value)?),
                "epsilon" => epsilon = Some(parse_num(value)?),
                "alpha" => alpha = Some(parse_num(value)?),
                "tol" => tol = Some(parse_num(value)?),
                "schedule" => schedule_tag = Some(value.to_string()),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unknown header field {other:?}"),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 1,
            msg: format!("missing header field {what}"),
        };
        let cfg = RcsConfig::new(
            crate::influence::MomentOrder::new(p.ok_or_else(|| missing("p"))?)?,
            kappa.ok_or_else(|| missing("kappa"))?,
            epsilon.ok_or_else(|| missing("epsilon"))?,
            alpha.ok_or_else(|| missing("alpha"))?,
        )?;
        let tag = schedule_tag.ok_or_else(|| missing("schedule"))?;
        let schedule = match (LambdaSchedule::from_checkpoint_tag(&tag)?, schedule_override) {
            (_, Some(s)) => s,
            (Some(s), None) => s,
            (None, None) => {
                return Err(Error::Config(
                    "checkpoint uses a custom schedule; restore with from_checkpoint_with_schedule"
                        .to_string(),
                ))
            }
        };
        let mut tracker = RcsTracker::new(cfg, schedule)?
            .with_tolerance(tol.ok_or_else(|| missing("tol"))?)?;
        for (idx, row) in lines {
            let line_no = idx + 1;
            let mut cols = row.split(',');
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            let t: u64 = cols
                .next()
                .ok_or_else(|| bad("missing t".into()))?
                .trim()
                .parse()
                .map_err(|_| bad("bad t".into()))?;
            let x: f64 = cols
                .next()
                .ok_or_else(|| bad("missing x".into()))?
                .trim()
                .parse()
                .map_err(|_| bad("bad x".into()))?;
            let lambda: f64 = cols
                .next()
                .ok_or_else(|| bad("missing lambda".into()))?
                .trim()
                .parse()
                .map_err(|_| bad("bad lambda".into()))?;
            if cols.next().is_some() {
                return Err(bad("too many columns".into()));
            }
            if t != tracker.history.len() as u64 + 1 {
                return Err(bad(format!(
                    "non-contiguous step index {t}, expected {}",
                    tracker.history.len() + 1
                )));
            }
            if !x.is_finite() || !(lambda.is_finite() && lambda > 0.0) {
                return Err(bad(format!("invalid row values x={x}, lambda={lambda}")));
            }
            tracker.history.push((x, lambda));
            tracker.log_den_sum += log_denominator_raw(lambda, &tracker.cfg);
        }
        Ok(tracker)
    }
}
