//! Log-space robust supermartingale increments.
//!
//! Two nonnegative processes are maintained per candidate mean `mu0`: one
//! accumulating `+phi_p` scores and one `-phi_p` scores, each divided by a
//! constant factor `1 + λ^p κ/p + (p - 1/p) ε` that makes them
//! supermartingales under every distribution within total-variation distance
//! `epsilon` of a clean distribution with `p`-th central moment at most
//! `kappa`. Everything is kept in log space: products over 10^5 steps under-
//! or overflow in linear space.
//!
//! A separate betting-style process for `[0, 1]`-valued data is also provided;
//! its per-step robustness cost scales with `|λ|` instead of being a constant
//! discount.

use crate::config::RcsConfig;
use crate::error::{Error, Result};
use crate::influence::{exp_phi_p_raw, phi_p_raw};

/// Log of the common denominator `1 + λ^p κ/p + (p - 1/p) ε`.
pub fn log_denominator(lambda: f64, cfg: &RcsConfig) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be a positive finite number, got {lambda}"
        )));
    }
    Ok(log_denominator_raw(lambda, cfg))
}

#[inline]
pub(crate) fn log_denominator_raw(lambda: f64, cfg: &RcsConfig) -> f64 {
    let p = cfg.p.get();
    let lam_p = if p == 2.0 { lambda * lambda } else { lambda.powf(p) };
    (lam_p * cfg.kappa / p + (p - 1.0 / p) * cfg.epsilon).ln_1p()
}

/// Linear-space denominator, used by the exact expectation oracle.
#[inline]
pub(crate) fn denominator_raw(lambda: f64, cfg: &RcsConfig) -> f64 {
    let p = cfg.p.get();
    let lam_p = if p == 2.0 { lambda * lambda } else { lambda.powf(p) };
    1.0 + lam_p * cfg.kappa / p + (p - 1.0 / p) * cfg.epsilon
}

/// Log-values of the supermartingale pair at a fixed candidate mean.
///
/// Both processes are issued at 1, so the logs start at 0. Every per-step
/// factor lies in `[(1/p)/D, p/D]` for a denominator `D > 1`, so the logs
/// stay finite for finite inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupermartingalePair {
    pub log_m: f64,
    pub log_n: f64,
    pub t: u64,
}

impl SupermartingalePair {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advance both processes by one observation.
    ///
    /// `log_m` gains `phi_p(λ(x - mu0)) - log D` and `log_n` the same with the
    /// score negated. `lambda` must come from a predictable schedule; this
    /// method never looks past the observation it is given.
    pub fn step(&mut self, x: f64, lambda: f64, mu0: f64, cfg: &RcsConfig) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "observation must be finite, got {x}"
            )));
        }
        if !mu0.is_finite() {
            return Err(Error::domain(format!(
                "candidate mean must be finite, got {mu0}"
            )));
        }
        let log_den = log_denominator(lambda, cfg)?;
        let score = phi_p_raw(lambda * (x - mu0), cfg.p.get());
        self.log_m += score - log_den;
        self.log_n += -score - log_den;
        self.t += 1;
        Ok(())
    }
}

/// Which side of the pair an expectation refers to: `M` uses `+phi_p`,
/// `N` uses `-phi_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    M,
    N,
}

/// A finite-support distribution, used as an exact expectation oracle and to
/// certify contamination levels in tests.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Build from `(value, weight)` atoms. Weights must be nonnegative and
    /// sum to 1 within 1e-12.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::domain("discrete distribution needs atoms"));
        }
        let mut total = 0.0;
        for &(x, w) in &atoms {
            if !x.is_finite() {
                return Err(Error::domain(format!("atom value must be finite, got {x}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain(format!("atom weight must be >= 0, got {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "atom weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(DiscreteDistribution { atoms })
    }

    pub fn point_mass(value: f64) -> Self {
        DiscreteDistribution {
            atoms: vec![(value, 1.0)],
        }
    }

    pub fn two_point(a: f64, b: f64, prob_a: f64) -> Result<Self> {
        Self::new(vec![(a, prob_a), (b, 1.0 - prob_a)])
    }

    pub fn uniform(values: &[f64]) -> Result<Self> {
        let w = 1.0 / values.len() as f64;
        Self::new(values.iter().map(|&v| (v, w)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * x).sum()
    }

    /// The `p`-th absolute central moment.
    pub fn central_moment(&self, p: f64) -> f64 {
        let mu = self.mean();
        self.atoms
            .iter()
            .map(|&(x, w)| w * (x - mu).abs().powf(p))
            .sum()
    }

    /// Exact total-variation distance to another finite-support distribution.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        let weight_at = |d: &Self, v: f64| -> f64 {
            d.atoms
                .iter()
                .filter(|&&(x, _)| x == v)
                .map(|&(_, w)| w)
                .sum()
        };
        let mut support: Vec<f64> = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|&(x, _)| x)
            .collect();
        support.sort_by(f64::total_cmp);
        support.dedup();
        0.5 * support
            .iter()
            .map(|&v| (weight_at(self, v) - weight_at(other, v)).abs())
            .sum::<f64>()
    }

    /// The mixture `(1 - epsilon) * self + epsilon * contaminant`.
    pub fn huber_mix(&self, contaminant: &Self, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::domain(format!(
                "mixture epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        let mut atoms: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|&(x, w)| (x, (1.0 - epsilon) * w))
            .chain(
                contaminant
                    .atoms
                    .iter()
                    .map(|&(x, w)| (x, epsilon * w)),
            )
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        DiscreteDistribution::new(merged)
    }
}

/// Exact one-step expectation of a pair factor under a finite-support
/// data distribution `q`, with the candidate mean set to the clean mean.
///
/// Returns `Σ_x q(x) exp(±phi_p(λ(x - mu0))) / (1 + λ^p κ/p + (p - 1/p) ε)`.
/// The supermartingale property says this is at most 1 whenever `q` lies in
/// the TV ball of radius `epsilon` around a distribution with mean `mu0` and
/// `p`-th central moment at most `kappa`.
pub fn exact_expected_factor(
    q: &DiscreteDistribution,
    lambda: f64,
    mu0: f64,
    cfg: &RcsConfig,
    side: PairSide,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be a positive finite number, got {lambda}"
        )));
    }
    let p = cfg.p.get();
    let den = denominator_raw(lambda, cfg);
    let sum: f64 = q
        .atoms()
        .iter()
        .map(|&(x, w)| {
            let z = lambda * (x - mu0);
            let arg = match side {
                PairSide::M => z,
                PairSide::N => -z,
            };
            w * exp_phi_p_raw(arg, p)
        })
        .sum();
    Ok(sum / den)
}

/// Log-wealth of the robust betting process for `[0, 1]`-valued data.
///
/// `log_l = -inf` is allowed: a wealth factor may be exactly zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettingState {
    pub log_l: f64,
    pub t: u64,
}

impl Default for BettingState {
    fn default() -> Self {
        BettingState { log_l: 0.0, t: 0 }
    }
}

impl BettingState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiply the wealth by `1 + λ(x - mu0) - ε|λ|`.
    ///
    /// The factor is provably nonnegative when `x, mu0 ∈ [0, 1]` and
    /// `|λ| <= 1/(1 + ε)`; both are enforced here.
    pub fn step(&mut self, x: f64, lambda: f64, mu0: f64, epsilon: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!(
                "betting observations must lie in [0, 1], got {x}"
            )));
        }
        if !(0.0..=1.0).contains(&mu0) {
            return Err(Error::domain(format!(
                "betting candidate mean must lie in [0, 1], got {mu0}"
            )));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::domain(format!(
                "epsilon must be >= 0, got {epsilon}"
            )));
        }
        if !(lambda.is_finite() && lambda.abs() <= 1.0 / (1.0 + epsilon)) {
            return Err(Error::domain(format!(
                "bet must satisfy |lambda| <= 1/(1 + epsilon), got {lambda}"
            )));
        }
        let factor = 1.0 + lambda * (x - mu0) - epsilon * lambda.abs();
        debug_assert!(factor >= -1e-12, "wealth factor went negative: {factor}");
        if factor <= 0.0 {
            self.log_l = f64::NEG_INFINITY;
        } else {
            self.log_l += factor.ln();
        }
        self.t += 1;
        Ok(())
    }

    /// The wealth factor a step would apply, without applying it.
    pub fn factor(x: f64, lambda: f64, mu0: f64, epsilon: f64) -> f64 {
        1.0 + lambda * (x - mu0) - epsilon * lambda.abs()
    }
}
