//! Fixed-time and non-robust comparators.
//!
//! Two baselines are provided: a sample-splitting trimmed-mean robust
//! confidence interval (a fixed-time object, evaluated on a grid of times),
//! and a non-robust Catoni-style confidence sequence used as the ε = 0
//! reference. The latter is deliberately an independent second
//! implementation — its influence function, threshold arithmetic, and root
//! solver are written here from scratch so it can serve as an oracle for the
//! robust tracker's ε = 0 reduction.

use crate::confseq::ConfidenceInterval;
use crate::error::{Error, Result};

/// `ε' = 8ε + 12 log(4/α) / (t/2)`: the effective trimming level.
pub fn eps_prime(t: u64, epsilon: f64, alpha: f64) -> f64 {
    8.0 * epsilon + 12.0 * (4.0 / alpha).ln() / (t as f64 / 2.0)
}

/// Result of one trimmed-mean evaluation.
///
/// `defined` is false when the trimming level leaves no usable observations
/// (`2ε' >= 1`: the lower and upper truncation quantiles cross); the
/// estimate is NaN and the half-width infinite in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimmedMeanReport {
    pub estimate: f64,
    pub half_width: f64,
    pub eps_prime: f64,
    pub defined: bool,
}

/// Sample-splitting trimmed mean: the first half of the data supplies the
/// empirical `ε'` and `1 - ε'` quantiles as truncation levels, the second
/// half is clamped to those levels and averaged. `sigma` only scales the
/// reported half-width.
pub fn trimmed_mean_estimate(
    data: &[f64],
    sigma: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<TrimmedMeanReport> {
    let t = data.len() as u64;
    if t < 2 {
        return Err(Error::domain(format!(
            "trimmed mean requires t >= 2, got {t}"
        )));
    }
    if (t as f64 / 2.0) < (1.0 / (4.0 * alpha)).ln() {
        return Err(Error::domain(format!(
            "trimmed mean requires t/2 >= log(1/(4 alpha)); t = {t}, alpha = {alpha}"
        )));
    }
    let ep = eps_prime(t, epsilon, alpha);
    if 2.0 * ep >= 1.0 {
        return Ok(TrimmedMeanReport {
            estimate: f64::NAN,
            half_width: f64::INFINITY,
            eps_prime: ep,
            defined: false,
        });
    }
    let k = data.len() / 2;
    let mut first: Vec<f64> = data[..k].to_vec();
    first.sort_by(f64::total_cmp);
    let idx_lo = ((ep * k as f64).floor() as usize).min(k - 1);
    let idx_hi = (((1.0 - ep) * k as f64).ceil() as usize)
        .saturating_sub(1)
        .clamp(idx_lo, k - 1);
    let cut_lo = first[idx_lo];
    let cut_hi = first[idx_hi];
    let second = &data[k..];
    let estimate =
        second.iter().map(|&x| x.clamp(cut_lo, cut_hi)).sum::<f64>() / second.len() as f64;
    Ok(TrimmedMeanReport {
        estimate,
        half_width: half_width_from_eps_prime(t, sigma, alpha, ep),
        eps_prime: ep,
        defined: true,
    })
}

/// Concentration half-width `12 sqrt(2ε') σ + 2σ sqrt(log(4/α)/(t/2))`,
/// the authoritative interval radius for figure reproduction.
pub fn trimmed_mean_half_width(t: u64, sigma: f64, epsilon: f64, alpha: f64) -> f64 {
    half_width_from_eps_prime(t, sigma, alpha, eps_prime(t, epsilon, alpha))
}

fn half_width_from_eps_prime(t: u64, sigma: f64, alpha: f64, ep: f64) -> f64 {
    12.0 * (2.0 * ep).sqrt() * sigma + 2.0 * sigma * ((4.0 / alpha).ln() / (t as f64 / 2.0)).sqrt()
}

/// Parameters for simulating a TV-robust interval with a replacement-robust
/// one: run the replacement method at level `2ε`; the result is then an
/// `(ε, 1 - (α + e^{-2tε²}))` interval.
pub fn rrci_to_rci_params(epsilon: f64, alpha: f64, t: u64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::domain(format!(
            "replacement simulation needs epsilon in (0, 0.5), got {epsilon}"
        )));
    }
    if t < 1 {
        return Err(Error::domain("replacement simulation needs t >= 1"));
    }
    let alpha_rci = alpha + (-2.0 * t as f64 * epsilon * epsilon).exp();
    Ok((2.0 * epsilon, alpha_rci))
}

/// Non-robust Catoni confidence sequence (`p = 2`, ε = 0) with a constant
/// weight. Independent of the robust tracker: used to check the ε = 0
/// reduction and as the comparison series in figures.
#[derive(Debug, Clone)]
pub struct NonRobustCatoni {
    sigma2: f64,
    alpha: f64,
    lambda: f64,
    xs: Vec<f64>,
}

impl NonRobustCatoni {
    pub fn new(sigma2: f64, alpha: f64, lambda: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::domain(format!("sigma2 must be >= 0, got {sigma2}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(NonRobustCatoni {
            sigma2,
            alpha,
            lambda,
            xs: Vec::new(),
        })
    }

    pub fn update(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "observation must be finite, got {x}"
            )));
        }
        self.xs.push(x);
        Ok(())
    }

    pub fn t(&self) -> u64 {
        self.xs.len() as u64
    }

    fn score_sum(&self, m: f64) -> f64 {
        // the four-branch logarithmic influence score, written out directly
        self.xs
            .iter()
            .map(|&x| {
                let z = self.lambda * (x - m);
                if z >= 1.0 {
                    std::f64::consts::LN_2
                } else if z >= 0.0 {
                    -(1.0 - z + 0.5 * z * z).ln()
                } else if z >= -1.0 {
                    (1.0 + z + 0.5 * z * z).ln()
                } else {
                    -std::f64::consts::LN_2
                }
            })
            .sum()
    }

    pub fn threshold(&self) -> f64 {
        let t = self.xs.len() as f64;
        (2.0 / self.alpha).ln() + t * (1.0 + self.lambda * self.lambda * self.sigma2 / 2.0).ln()
    }

    pub fn covers(&self, m: f64) -> bool {
        self.score_sum(m).abs() <= self.threshold()
    }

    /// Level points by plain bisection to absolute tolerance `tol`, rounded
    /// outward by `tol`.
    pub fn interval(&self, tol: f64) -> Result<ConfidenceInterval> {
        let t = self.xs.len() as f64;
        let g = self.threshold();
        if self.xs.is_empty() || g >= t * std::f64::consts::LN_2 {
            return Ok(ConfidenceInterval::unbounded());
        }
        let lo_bound = self
            .xs
            .iter()
            .fold(f64::INFINITY, |acc, &x| acc.min(x - 1.0 / self.lambda));
        let hi_bound = self
            .xs
            .iter()
            .fold(f64::NEG_INFINITY, |acc, &x| acc.max(x + 1.0 / self.lambda));
        let bisect = |target: f64| -> Result<f64> {
            let (mut lo, mut hi) = (lo_bound, hi_bound);
            if self.score_sum(lo) < target || self.score_sum(hi) > target {
                return Err(Error::Bracketing(format!(
                    "no level point for target {target} in [{lo}, {hi}]"
                )));
            }
            // iteration cap: outliers can blow the initial bracket past the
            // point where f64 spacing beats tol
            for _ in 0..256 {
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.score_sum(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        };
        Ok(ConfidenceInterval {
            lower: bisect(g)? - tol,
            upper: bisect(-g)? + tol,
            tolerance: tol,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eps_prime_formula_is_exact() {
        // t = 2000, ε = 1/36, α = 0.05
        let ep = eps_prime(2000, 1.0 / 36.0, 0.05);
        let expected = 8.0 / 36.0 + 12.0 * 80f64.ln() / 1000.0;
        assert!((ep - expected).abs() <= 1e-12);
        assert_relative_eq!(ep, 0.27480, epsilon = 1e-4);
    }

    #[test]
    fn half_width_worked_value() {
        // 12 sqrt(2 ε') σ + 2 σ sqrt(ln 80 / 1000) at t=2000, σ=6, ε=1/36
        let hw = trimmed_mean_half_width(2000, 6.0, 1.0 / 36.0, 0.05);
        let ep = eps_prime(2000, 1.0 / 36.0, 0.05);
        let expected = 12.0 * (2.0 * ep).sqrt() * 6.0 + 12.0 * (80f64.ln() / 1000.0).sqrt();
        assert_relative_eq!(hw, expected, epsilon = 1e-12);
        assert_relative_eq!(hw, 54.2, epsilon = 0.05);
    }

    #[test]
    fn half_width_limits_and_monotonicity() {
        // t → ∞: ε' → 8ε, half-width → 12 sqrt(16 ε) σ = 48 sqrt(ε) σ
        let eps = 0.01;
        let hw = trimmed_mean_half_width(u64::MAX / 2, 1.0, eps, 0.05);
        assert_relative_eq!(hw, 48.0 * eps.sqrt(), epsilon = 1e-3);

        let narrow = trimmed_mean_half_width(5000, 2.0, 0.01, 0.05);
        let wide = trimmed_mean_half_width(5000, 2.0, 0.02, 0.05);
        assert!(wide > narrow);
    }

    #[test]
    fn trimmed_mean_symmetric_data() {
        // t must be large enough that the t-dependent part of ε' is small
        let data: Vec<f64> = (0..10_000)
            .map(|i| if i % 2 == 0 { -1.0 } else { 1.0 })
            .collect();
        let report = trimmed_mean_estimate(&data, 1.0, 0.001, 0.05).unwrap();
        assert!(report.defined);
        assert!(report.estimate.abs() <= 1e-12);
    }

    #[test]
    fn trimmed_mean_on_clean_gaussian_is_near_the_mean() {
        use rand::SeedableRng;
        let spec = crate::simulate::dist::DistributionSpec::gaussian(0.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(88);
        let data: Vec<f64> = (0..10_000).map(|_| spec.sample(&mut rng)).collect();
        let report = trimmed_mean_estimate(&data, 1.0, 0.01, 0.05).unwrap();
        assert!(report.defined);
        assert!(report.estimate.abs() <= 0.1, "estimate {}", report.estimate);
    }

    #[test]
    fn trimmed_mean_undefined_when_everything_is_trimmed() {
        // large ε makes 2ε' >= 1
        let data: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let report = trimmed_mean_estimate(&data, 1.0, 0.1, 0.05).unwrap();
        assert!(!report.defined);
        assert!(report.estimate.is_nan());
        assert!(report.half_width.is_infinite());
    }

    #[test]
    fn trimmed_mean_preconditions() {
        assert!(trimmed_mean_estimate(&[1.0], 1.0, 0.01, 0.05).is_err());
        // t/2 < log(1/(4α)) for tiny alpha
        let data = [0.0, 1.0, 2.0, 3.0];
        assert!(trimmed_mean_estimate(&data, 1.0, 0.01, 1e-6).is_err());
    }

    #[test]
    fn trimmed_mean_clamps_outliers() {
        // second half has wild values; truncation limits their pull
        let mut data: Vec<f64> = (0..5000).map(|i| (i % 7) as f64 / 7.0 - 0.5).collect();
        data.extend((0..4950).map(|i| (i % 7) as f64 / 7.0 - 0.5));
        data.extend(vec![1e9; 50]);
        let report = trimmed_mean_estimate(&data, 1.0, 0.001, 0.05).unwrap();
        assert!(report.defined);
        assert!(report.estimate.abs() <= 0.1, "estimate {}", report.estimate);
    }

    #[test]
    fn rrci_params_worked_values() {
        let (e2, a2) = rrci_to_rci_params(0.1, 0.05, 10_000).unwrap();
        assert_eq!(e2, 0.2);
        assert_relative_eq!(a2, 0.05 + (-200.0f64).exp(), epsilon = 1e-15);

        let (e2, a2) = rrci_to_rci_params(1.0 / 36.0, 0.05, 2000).unwrap();
        assert_eq!(e2, 2.0 / 36.0);
        assert_relative_eq!(
            a2,
            0.05 + (-2.0 * 2000.0 / 1296.0f64).exp(),
            epsilon = 1e-15
        );

        assert!(rrci_to_rci_params(0.6, 0.05, 100).is_err());
        assert!(rrci_to_rci_params(0.0, 0.05, 100).is_err());
    }

    #[test]
    fn nonrobust_interval_on_symmetric_stream() {
        let mut cs = NonRobustCatoni::new(1.0, 0.05, 1.0).unwrap();
        for i in 0..300 {
            cs.update(if i % 2 == 0 { 0.5 } else { -0.5 }).unwrap();
        }
        let ci = cs.interval(1e-9).unwrap();
        assert!(ci.is_finite());
        assert!(ci.contains(0.0));
        assert!((-ci.lower - ci.upper).abs() <= 1e-6, "symmetric interval");
    }

    #[test]
    fn nonrobust_is_tighter_than_robust_on_same_stream() {
        // same λ, same data: the robust threshold and denominator are larger
        let lambda = 0.3;
        let mut nr = NonRobustCatoni::new(1.0, 0.05, lambda).unwrap();
        let cfg = crate::config::RcsConfig::with_variance(1.0, 0.1, 0.05).unwrap();
        let mut robust = crate::confseq::RcsTracker::new(
            cfg,
            crate::schedule::LambdaSchedule::constant(lambda).unwrap(),
        )
        .unwrap();
        let mut x = 0.9f64;
        for _ in 0..500 {
            x = (x * 1.7).sin();
            nr.update(x).unwrap();
            robust.update(x).unwrap();
        }
        let nr_ci = nr.interval(1e-9).unwrap();
        let rob_ci = robust.interval().unwrap();
        assert!(nr_ci.is_finite());
        assert!(rob_ci.is_finite());
        assert!(nr_ci.lower >= rob_ci.lower - 2e-9);
        assert!(nr_ci.upper <= rob_ci.upper + 2e-9);
    }
}
