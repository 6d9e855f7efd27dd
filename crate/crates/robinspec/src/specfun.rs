//! Series evaluation of the confluent hypergeometric (Kummer) function and
//! modified Bessel functions of integer order.
//!
//! These are the analytic building blocks of the radial secular equation.
//! Plain ascending series only: across the supported scan range (b ≤ 64) the
//! Kummer argument stays at z = b r²/2 ≤ 32, where the series is benign in
//! 64-bit arithmetic. For the eigenvalue work the first parameter `a` is
//! positive (λ < 0), so all terms are positive and there is no cancellation.

use thiserror::Error;

/// Stopping control for the ascending series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesAccuracy {
    /// Tail bound relative to the partial sum.
    pub rel_tol: f64,
    /// Hard cap on the number of summed terms.
    pub max_terms: usize,
}

impl Default for SeriesAccuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 5000,
        }
    }
}

impl SeriesAccuracy {
    fn validate(&self) {
        assert!(
            self.rel_tol > 0.0 && self.max_terms >= 10,
            "SeriesAccuracy requires rel_tol > 0 and max_terms >= 10"
        );
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpecFunError {
    /// Kummer's M(a,c,z) has poles at c = 0, -1, -2, ...
    #[error("kummer parameter c = {c} is zero or a negative integer")]
    PoleParameter { c: f64 },
    #[error("series did not converge within {max_terms} terms (last term {last_term:e})")]
    NoConvergence { max_terms: usize, last_term: f64 },
}

/// Number of consecutive below-tolerance terms required before the series is
/// declared converged. Guards against alternating-term stalls when a < 0.
const QUIET_TERMS: usize = 10;

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Kummer's confluent hypergeometric function `M(a, c, z) = Σ (a)_k/(c)_k z^k/k!`.
pub fn kummer_m(a: f64, c: f64, z: f64, acc: SeriesAccuracy) -> Result<f64, SpecFunError> {
    kummer_m_counted(a, c, z, acc).map(|(v, _)| v)
}

/// As [`kummer_m`], also returning the number of terms summed (for the
/// polynomial-truncation tests).
pub(crate) fn kummer_m_counted(
    a: f64,
    c: f64,
    z: f64,
    acc: SeriesAccuracy,
) -> Result<(f64, usize), SpecFunError> {
    acc.validate();
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::PoleParameter { c });
    }
    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut quiet = 0usize;
    let mut used = 1usize;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        term *= (a + kf) / (c + kf) * z / (kf + 1.0);
        sum += term;
        if term != 0.0 {
            used = k + 2;
        }
        if term.abs() <= acc.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok((sum, used));
            }
        } else {
            quiet = 0;
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: acc.max_terms,
        last_term: term,
    })
}

/// Derivative of Kummer's function: `dM/dz = (a/c) M(a+1, c+1, z)`.
pub fn kummer_m_dz(a: f64, c: f64, z: f64, acc: SeriesAccuracy) -> Result<f64, SpecFunError> {
    if is_nonpositive_integer(c) {
        return Err(SpecFunError::PoleParameter { c });
    }
    Ok(a / c * kummer_m(a + 1.0, c + 1.0, z, acc)?)
}

/// Modified Bessel function of the first kind, integer order, by ascending
/// series: `I_n(x) = Σ_k (x/2)^(n+2k) / (k! (n+k)!)`.
pub fn bessel_i(order: u32, x: f64, acc: SeriesAccuracy) -> Result<f64, SpecFunError> {
    acc.validate();
    debug_assert!(x >= 0.0);
    let half = 0.5 * x;
    // term_0 = (x/2)^n / n!
    let mut term = 1.0_f64;
    for j in 1..=order {
        term *= half / j as f64;
    }
    let mut sum = term;
    let h2 = half * half;
    let mut quiet = 0usize;
    for k in 0..acc.max_terms {
        let kf = k as f64;
        term *= h2 / ((kf + 1.0) * (kf + 1.0 + order as f64));
        sum += term;
        if term.abs() <= acc.rel_tol * sum.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(SpecFunError::NoConvergence {
        max_terms: acc.max_terms,
        last_term: term,
    })
}
