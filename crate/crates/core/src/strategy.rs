//! Roger's mixed strategy against two-sided errors.
//!
//! With error rates `p_s` (equal inputs) and `p_d` (unequal inputs) for the pure guess,
//! flipping a "same" verdict with probability `pi0` and a "different" verdict with
//! probability `pi1` gives success rates
//!
//! ```text
//! S_diff = pi0 * p_d + (1 - pi1) * (1 - p_d)
//! S_same = pi1 * p_s + (1 - pi0) * (1 - p_s)
//! ```
//!
//! Both are linear in `(pi0, pi1)`, so the best worst case is where they meet.
//!
//! Derivation of the optimum for `p_s + p_d <= 1` and `p_d >= p_s`: raising `pi1` costs
//! `S_diff` at rate `1 - p_d` and gains `S_same` at rate `p_s`, which never beats raising
//! `pi0`'s trade (`S_same` loses `1 - p_s`, `S_diff` gains `p_d`) when `S_same > S_diff`.
//! With `pi1 = 0`, equating the rates gives
//!
//! ```text
//! pi0 = (p_d - p_s) / (1 + p_d - p_s),   success = (1 - p_s) / (1 + p_d - p_s).
//! ```
//!
//! The case `p_s > p_d` is the mirror image with `pi0 = 0`. When `p_s + p_d > 1` the
//! pure guess is worse than its negation; inverting it maps the rates to
//! `(1 - p_s, 1 - p_d)` and the flip probabilities to `(1 - pi1, 1 - pi0)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Success probability above which a one-bit fingerprint beats every classical protocol.
pub const CLASSICAL_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    pub pi0: f64,
    pub pi1: f64,
    /// Worst-case success rate, equal for both kinds of input.
    pub success: f64,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} outside [0, 1]")))
    }
}

/// `(S_diff, S_same)`.
pub fn success_rates(p_same_err: f64, p_diff_err: f64, pi0: f64, pi1: f64) -> Result<(f64, f64)> {
    check_probability("p_same_err", p_same_err)?;
    check_probability("p_diff_err", p_diff_err)?;
    check_probability("pi0", pi0)?;
    check_probability("pi1", pi1)?;
    Ok(success_rates_unchecked(p_same_err, p_diff_err, pi0, pi1))
}

fn success_rates_unchecked(p_s: f64, p_d: f64, pi0: f64, pi1: f64) -> (f64, f64) {
    let s_diff = pi0 * p_d + (1.0 - pi1) * (1.0 - p_d);
    let s_same = pi1 * p_s + (1.0 - pi0) * (1.0 - p_s);
    (s_diff, s_same)
}

/// Flip probabilities maximizing `min(S_diff, S_same)`, in closed form.
pub fn optimize_mixed(p_same_err: f64, p_diff_err: f64) -> Result<MixedStrategy> {
    check_probability("p_same_err", p_same_err)?;
    check_probability("p_diff_err", p_diff_err)?;
    Ok(optimize_informative(p_same_err, p_diff_err))
}

fn optimize_informative(p_s: f64, p_d: f64) -> MixedStrategy {
    if p_s + p_d > 1.0 {
        let inv = optimize_informative(1.0 - p_s, 1.0 - p_d);
        return MixedStrategy { pi0: 1.0 - inv.pi1, pi1: 1.0 - inv.pi0, success: inv.success };
    }
    if p_d > p_s {
        let gap = p_d - p_s;
        MixedStrategy { pi0: gap / (1.0 + gap), pi1: 0.0, success: (1.0 - p_s) / (1.0 + gap) }
    } else if p_s > p_d {
        let gap = p_s - p_d;
        MixedStrategy { pi0: 0.0, pi1: gap / (1.0 + gap), success: (1.0 - p_d) / (1.0 + gap) }
    } else {
        MixedStrategy { pi0: 0.0, pi1: 0.0, success: 1.0 - p_s }
    }
}

/// Strictly above the classical one-bit threshold of 1/2.
pub fn beats_classical(success: f64) -> bool {
    success > CLASSICAL_THRESHOLD
}
