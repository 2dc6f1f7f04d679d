//! Piecewise-logarithmic influence functions.
//!
//! The score of an observation is curbed through a bounded, odd, nondecreasing
//! function built from four logarithmic branches. `phi` handles the bounded
//! second-moment case; `phi_p` generalizes to a bound on the `p`-th absolute
//! central moment for `p` in `(1, 2]` and coincides with `phi` at `p = 2`.
//!
//! Both functions satisfy the two-sided sandwich
//! `-log(1 - x + |x|^p/p) <= phi_p(x) <= log(1 + x + |x|^p/p)`
//! and saturate at `±log p` for `|x| >= 1`, which is what makes a single
//! corrupted observation contribute a bounded amount to any downstream sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moment order `p` restricted to `(1, 2]`.
///
/// `p = 2` corresponds to a variance bound; lower `p` admits heavier tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MomentOrder(f64);

impl MomentOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 && p <= 2.0 {
            Ok(MomentOrder(p))
        } else {
            Err(Error::domain(format!(
                "moment order p must lie in (1, 2], got {p}"
            )))
        }
    }

    /// The variance-bound case `p = 2`.
    pub fn two() -> Self {
        MomentOrder(2.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }
}

impl TryFrom<f64> for MomentOrder {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        MomentOrder::new(p)
    }
}

impl From<MomentOrder> for f64 {
    fn from(p: MomentOrder) -> f64 {
        p.0
    }
}

/// Four-branch influence function for the variance-bound case.
///
/// Odd, nondecreasing, bounded by `log 2` in absolute value, and saturated
/// for `|x| >= 1`.
pub fn phi(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("phi requires finite input, got {x}")));
    }
    Ok(phi_raw(x))
}

/// Influence function under a `p`-th central moment bound; equals `phi`
/// exactly when `p = 2`.
pub fn phi_p(x: f64, p: MomentOrder) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "phi_p requires finite input, got {x}"
        )));
    }
    Ok(phi_p_raw(x, p.get()))
}

/// `exp(phi_p(x))` evaluated through the closed-form branch values,
/// avoiding the exp-of-log round trip near `x = 0`.
pub fn exp_phi_p(x: f64, p: MomentOrder) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "exp_phi_p requires finite input, got {x}"
        )));
    }
    Ok(exp_phi_p_raw(x, p.get()))
}

// branch ties at ±1 are continuous, so assigning both to the saturated
// branch keeps saturation and oddness exact in floating point
#[inline]
pub(crate) fn phi_raw(x: f64) -> f64 {
    if x >= 1.0 {
        std::f64::consts::LN_2
    } else if x >= 0.0 {
        // -log(1 - x + x^2/2)
        -(-x + 0.5 * x * x).ln_1p()
    } else if x > -1.0 {
        // log(1 + x + x^2/2)
        (x + 0.5 * x * x).ln_1p()
    } else {
        -std::f64::consts::LN_2
    }
}

#[inline]
pub(crate) fn phi_p_raw(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        return phi_raw(x);
    }
    if x >= 1.0 {
        p.ln()
    } else if x >= 0.0 {
        -(-x + x.powf(p) / p).ln_1p()
    } else if x > -1.0 {
        (x + (-x).powf(p) / p).ln_1p()
    } else {
        -p.ln()
    }
}

#[inline]
pub(crate) fn exp_phi_p_raw(x: f64, p: f64) -> f64 {
    let abs_pow = |y: f64| {
        if p == 2.0 {
            0.5 * y * y
        } else {
            y.abs().powf(p) / p
        }
    };
    if x >= 1.0 {
        p
    } else if x >= 0.0 {
        1.0 / (1.0 - x + abs_pow(x))
    } else if x > -1.0 {
        1.0 + x + abs_pow(x)
    } else {
        1.0 / p
    }
}
