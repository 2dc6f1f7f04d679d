//! Data-generating distributions.
//!
//! The stable family is sampled with the Chambers–Mallows–Stuck transform in
//! the continuity-at-one (S0) parameterization; the stability-2 case reduces
//! to a Gaussian with twice the squared scale and is special-cased to the
//! exact `2 sin(U) sqrt(W)` form. Gaussians use Box–Muller. Every sampler
//! consumes a fixed number of uniforms per draw, so streams are fully
//! determined by the seed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingales::DiscreteDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionSpec {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    PointMass {
        value: f64,
    },
    TwoPoint {
        a: f64,
        b: f64,
        prob_a: f64,
    },
    /// α-stable law; `stability` in (0, 2], `skew` in [-1, 1], `scale` > 0.
    /// No mean exists when `stability <= 1`, so such specs are only valid as
    /// contaminants.
    StableLevy {
        stability: f64,
        skew: f64,
        location: f64,
        scale: f64,
    },
}

impl DistributionSpec {
    pub fn gaussian(mean: f64, variance: f64) -> Self {
        DistributionSpec::Gaussian { mean, variance }
    }

    pub fn point_mass(value: f64) -> Self {
        DistributionSpec::PointMass { value }
    }

    pub fn stable(stability: f64, skew: f64, location: f64, scale: f64) -> Self {
        DistributionSpec::StableLevy {
            stability,
            skew,
            location,
            scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Gaussian { mean, variance } => {
                if !mean.is_finite() || !(variance.is_finite() && variance > 0.0) {
                    return Err(Error::domain(format!(
                        "gaussian needs finite mean and variance > 0, got ({mean}, {variance})"
                    )));
                }
            }
            DistributionSpec::PointMass { value } => {
                if !value.is_finite() {
                    return Err(Error::domain(format!(
                        "point mass needs a finite value, got {value}"
                    )));
                }
            }
            DistributionSpec::TwoPoint { a, b, prob_a } => {
                if !a.is_finite() || !b.is_finite() || !(0.0..=1.0).contains(&prob_a) {
                    return Err(Error::domain(format!(
                        "two-point needs finite atoms and prob_a in [0, 1], got ({a}, {b}, {prob_a})"
                    )));
                }
            }
            DistributionSpec::StableLevy {
                stability,
                skew,
                location,
                scale,
            } => {
                if !(stability > 0.0 && stability <= 2.0) {
                    return Err(Error::domain(format!(
                        "stability index must lie in (0, 2], got {stability}"
                    )));
                }
                if !(-1.0..=1.0).contains(&skew) {
                    return Err(Error::domain(format!(
                        "skew must lie in [-1, 1], got {skew}"
                    )));
                }
                if !location.is_finite() || !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::domain(format!(
                        "stable needs finite location and scale > 0, got ({location}, {scale})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The mean, when it exists. Stable laws with stability <= 1 have none.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            DistributionSpec::Gaussian { mean, .. } => Some(mean),
            DistributionSpec::PointMass { value } => Some(value),
            DistributionSpec::TwoPoint { a, b, prob_a } => Some(a * prob_a + b * (1.0 - prob_a)),
            DistributionSpec::StableLevy {
                stability,
                skew,
                location,
                scale,
            } => {
                if stability > 1.0 {
                    if stability == 2.0 {
                        Some(location)
                    } else {
                        // S0 parameterization: the location is the mean only
                        // after removing the skew shift
                        Some(location - skew * scale * (std::f64::consts::PI * stability / 2.0).tan())
                    }
                } else {
                    None
                }
            }
        }
    }

    /// Finite-support view for exact TV and moment computations.
    pub fn as_discrete(&self) -> Option<DiscreteDistribution> {
        match *self {
            DistributionSpec::PointMass { value } => Some(DiscreteDistribution::point_mass(value)),
            DistributionSpec::TwoPoint { a, b, prob_a } => {
                DiscreteDistribution::two_point(a, b, prob_a).ok()
            }
            _ => None,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            DistributionSpec::Gaussian { mean, variance } => {
                mean + variance.sqrt() * standard_normal(rng)
            }
            DistributionSpec::PointMass { value } => value,
            DistributionSpec::TwoPoint { a, b, prob_a } => {
                if rng.random::<f64>() < prob_a {
                    a
                } else {
                    b
                }
            }
            DistributionSpec::StableLevy {
                stability,
                skew,
                location,
                scale,
            } => {
                let x0 = standard_stable(stability, skew, rng);
                if (stability - 1.0).abs() < 1e-12 {
                    location
                        + scale * x0
                        + 2.0 / std::f64::consts::PI * skew * scale * scale.ln()
                } else {
                    location + scale * x0
                }
            }
        }
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box–Muller; 1 - u keeps the log argument in (0, 1]
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Standardized stable draw (location 0, scale 1) in the S0 parameterization.
fn standard_stable(alpha: f64, beta: f64, rng: &mut impl Rng) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let u = PI * (rng.random::<f64>() - 0.5); // uniform on (-π/2, π/2)
    let w = -(1.0 - rng.random::<f64>()).ln(); // Exp(1)
    if alpha == 2.0 {
        return 2.0 * u.sin() * w.sqrt();
    }
    if (alpha - 1.0).abs() < 1e-12 {
        let a = FRAC_PI_2 + beta * u;
        let ratio = (FRAC_PI_2 * w * u.cos() / a).max(f64::MIN_POSITIVE);
        return 2.0 / PI * (a * u.tan() - beta * ratio.ln());
    }
    let zeta = beta * (FRAC_PI_2 * alpha).tan();
    let theta0 = zeta.atan() / alpha;
    let s = (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha));
    let num = (alpha * (u + theta0)).sin();
    let den = u.cos().powf(1.0 / alpha);
    let tail = ((u - alpha * (u + theta0)).cos() / w).max(f64::MIN_POSITIVE);
    s * num / den * tail.powf((1.0 - alpha) / alpha) - zeta
}

/// The two-distribution fixture behind the width lower bound: a point mass
/// at 0 and its ε-mixture with a point mass at `σ/sqrt(ε)`. Both have
/// variance at most `σ²` and their means differ by exactly `σ sqrt(ε)`.
pub fn dirac_lower_bound_pair(
    sigma: f64,
    epsilon: f64,
) -> Result<(DistributionSpec, DistributionSpec)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!(
            "lower-bound pair needs epsilon in (0, 0.5), got {epsilon}"
        )));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be > 0, got {sigma}")));
    }
    let p1 = DistributionSpec::point_mass(0.0);
    let p2 = DistributionSpec::TwoPoint {
        a: 0.0,
        b: sigma / epsilon.sqrt(),
        prob_a: 1.0 - epsilon,
    };
    Ok((p1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn point_mass_is_constant() {
        let spec = DistributionSpec::point_mass(3.0);
        let mut r = rng(1);
        for _ in 0..10 {
            assert_eq!(spec.sample(&mut r), 3.0);
        }
    }

    #[test]
    fn gaussian_sample_mean_is_near_zero() {
        let spec = DistributionSpec::gaussian(0.0, 9.0);
        let mut r = rng(7);
        let n = 1_000_000;
        let mean = (0..n).map(|_| spec.sample(&mut r)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "sample mean {mean}");
    }

    #[test]
    fn two_point_frequencies() {
        let spec = DistributionSpec::TwoPoint {
            a: -1.0,
            b: 1.0,
            prob_a: 0.25,
        };
        let mut r = rng(3);
        let n = 200_000;
        let count_a = (0..n).filter(|_| spec.sample(&mut r) == -1.0).count();
        let freq = count_a as f64 / n as f64;
        assert!((freq - 0.25).abs() < 0.01, "freq {freq}");
        assert_relative_eq!(spec.mean().unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn stable_index_two_matches_gaussian_by_ks() {
        // StableLevy(2, 0, 0, 1) equals N(0, 2): two-sample KS below the 1%
        // critical value 1.628 sqrt((n+m)/(nm)) at n = m = 10^4
        let n = 10_000;
        let stable = DistributionSpec::stable(2.0, 0.0, 0.0, 1.0);
        let gauss = DistributionSpec::gaussian(0.0, 2.0);
        let mut r1 = rng(11);
        let mut r2 = rng(12);
        let mut a: Vec<f64> = (0..n).map(|_| stable.sample(&mut r1)).collect();
        let mut b: Vec<f64> = (0..n).map(|_| gauss.sample(&mut r2)).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let gap = (i as f64 / n as f64 - j as f64 / n as f64).abs();
            d = d.max(gap);
        }
        let critical = 1.628 * ((2 * n) as f64 / (n * n) as f64).sqrt();
        assert!(d < critical, "KS statistic {d} >= critical {critical}");
    }

    #[test]
    fn stable_heavy_tail_draws_are_finite() {
        let spec = DistributionSpec::stable(0.75, 0.5, 0.0, 1.0);
        let mut r = rng(5);
        for _ in 0..100_000 {
            let x = spec.sample(&mut r);
            assert!(x.is_finite());
        }
        let spec = DistributionSpec::stable(0.3, 0.5, 1000.0, 1.0);
        for _ in 0..100_000 {
            assert!(spec.sample(&mut r).is_finite());
        }
        let spec = DistributionSpec::stable(1.0, 0.5, 0.0, 2.0);
        for _ in 0..100_000 {
            assert!(spec.sample(&mut r).is_finite());
        }
    }

    #[test]
    fn stable_mean_rules() {
        assert_eq!(DistributionSpec::stable(0.75, 0.5, 0.0, 1.0).mean(), None);
        assert_eq!(DistributionSpec::stable(1.0, 0.0, 5.0, 1.0).mean(), None);
        assert_eq!(DistributionSpec::stable(2.0, 0.0, 5.0, 1.0).mean(), Some(5.0));
        // symmetric case: mean equals location for any stability > 1
        assert_eq!(DistributionSpec::stable(1.5, 0.0, 2.0, 3.0).mean(), Some(2.0));
    }

    #[test]
    fn stable_mean_matches_sample_mean_for_skewed_law() {
        // stability 1.8 > 1: the S0 mean formula should match simulation
        let spec = DistributionSpec::stable(1.8, 0.6, 1.0, 2.0);
        let mut r = rng(19);
        let n = 2_000_000;
        let sample_mean = (0..n).map(|_| spec.sample(&mut r)).sum::<f64>() / n as f64;
        let mean = spec.mean().unwrap();
        assert!(
            (sample_mean - mean).abs() < 0.05,
            "sample {sample_mean} vs formula {mean}"
        );
    }

    #[test]
    fn validation_rules() {
        assert!(DistributionSpec::gaussian(0.0, 0.0).validate().is_err());
        assert!(DistributionSpec::stable(2.1, 0.0, 0.0, 1.0).validate().is_err());
        assert!(DistributionSpec::stable(1.5, 1.5, 0.0, 1.0).validate().is_err());
        assert!(DistributionSpec::stable(1.5, 0.0, 0.0, 0.0).validate().is_err());
        assert!(DistributionSpec::TwoPoint {
            a: 0.0,
            b: 1.0,
            prob_a: 1.2
        }
        .validate()
        .is_err());
    }

    #[test]
    fn dirac_pair_worked_values() {
        let (p1, p2) = dirac_lower_bound_pair(3.0, 1.0 / 9.0).unwrap();
        assert_eq!(p1.mean(), Some(0.0));
        assert_relative_eq!(p2.mean().unwrap(), 1.0, epsilon = 1e-15);
        // v2(P2) = (1 - ε) σ²
        let d2 = p2.as_discrete().unwrap();
        assert_relative_eq!(d2.central_moment(2.0), (1.0 - 1.0 / 9.0) * 9.0, epsilon = 1e-12);

        let (_, p2) = dirac_lower_bound_pair(1.0, 0.25).unwrap();
        match p2 {
            DistributionSpec::TwoPoint { b, .. } => assert_eq!(b, 2.0),
            _ => panic!("expected two-point"),
        }
        assert_relative_eq!(p2.mean().unwrap(), 0.5, epsilon = 1e-15);
        let d2 = p2.as_discrete().unwrap();
        assert!(d2.central_moment(2.0) <= 1.0);

        assert!(dirac_lower_bound_pair(1.0, 0.5).is_err());
        assert!(dirac_lower_bound_pair(1.0, 0.0).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DistributionSpec::stable(0.75, 0.5, 0.0, 1.0);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("stable_levy"));
        let back: DistributionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
