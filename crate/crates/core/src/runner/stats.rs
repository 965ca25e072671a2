//! Binomial proportion estimates.

use serde::Serialize;
use thiserror::Error;

use crate::num::Probability;

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959964;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<F> {
    pub lo: F,
    pub hi: F,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no runs: the interval is undefined for n = 0")]
    NoRuns,
    #[error("{k} failures out of {n} runs")]
    TooManyFailures { k: u64, n: u64 },
}

/// Wilson score interval at 95%, clamped to `[0, 1]` and to contain `k/n`.
pub fn wilson95<F: Probability>(k: u64, n: u64) -> Result<Interval<F>, StatsError> {
    if n == 0 {
        return Err(StatsError::NoRuns);
    }
    if k > n {
        return Err(StatsError::TooManyFailures { k, n });
    }
    let f = |x: f64| F::from_f64(x).expect("representable");
    let (kf, nf) = (F::from_u64(k).unwrap(), F::from_u64(n).unwrap());
    let one = F::one();
    let two = f(2.0);
    let z = f(Z95);
    let z2 = z * z;
    let p = kf / nf;
    let denom = one + z2 / nf;
    let center = (p + z2 / (two * nf)) / denom;
    let half = (z / denom) * (p * (one - p) / nf + z2 / (f(4.0) * nf * nf)).sqrt();
    let lo = (center - half).max(F::zero()).min(p);
    let hi = (center + half).min(one).max(p);
    Ok(Interval { lo, hi })
}
