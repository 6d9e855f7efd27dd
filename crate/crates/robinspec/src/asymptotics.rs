//! Closed-form asymptotics of the ground energy and the boundary-layer trial
//! apparatus.
//!
//! As γ → −∞ the disc ground energy expands as
//! `λ₁(b,γ) = −γ² + γ + e(b) − 1/2 + o(1)` with the 2-periodic oscillatory
//! term `e(b) = inf_m (m − b/2)²`; in the semiclassical variable h = γ⁻² the
//! same statement reads `μ₁(h,b) = −h − h^{3/2} + (e(b) − 1/2)h² + o(h²)`.
//! This module evaluates those polynomials, the angular-momentum truncation
//! bound, and the explicit three-term trial state for the weighted half-line
//! operator together with its defect norm.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AsymptoticsError {
    #[error("quadrature under-resolved: {coarse} vs {fine} after doubling the panel count")]
    QuadratureUnderResolved { coarse: f64, fine: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// The four pieces of the γ → −∞ expansion: −γ², γ, e(b), −1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionTerms {
    pub leading: f64,
    pub boundary: f64,
    pub oscillatory: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    pub b: f64,
    pub gamma_or_h: f64,
    pub value: f64,
    pub terms: PredictionTerms,
}

/// The oscillatory term `e(b) = inf_m (m − b/2)²` and its minimizer. Exact
/// half-integer ties return the smaller integer.
pub fn e_inf(b: f64) -> (f64, i64) {
    let x = 0.5 * b;
    let lo = x.floor();
    let m_star = if x - lo <= lo + 1.0 - x { lo } else { lo + 1.0 };
    let d = m_star - x;
    (d * d, m_star as i64)
}

/// Infimum of (m − b/2)² restricted to |m| ≤ A. Equals `e_inf(b)` whenever
/// A ≥ b/2 + 1.
pub fn beta_hat(b: f64, a_limit: f64) -> f64 {
    assert!(a_limit >= 0.0, "beta_hat requires A >= 0");
    let bound = a_limit.floor();
    let (_, m_free) = e_inf(b);
    let m = (m_free as f64).clamp(-bound, bound);
    let d = m - 0.5 * b;
    d * d
}

/// Ground-energy prediction `−γ² + γ + e(b) − 1/2` with its term breakdown.
pub fn lambda1_prediction(b: f64, gamma: f64) -> AsymptoticPrediction {
    assert!(gamma < 0.0, "lambda1_prediction requires gamma < 0");
    let terms = PredictionTerms {
        leading: -gamma * gamma,
        boundary: gamma,
        oscillatory: e_inf(b).0,
        constant: -0.5,
    };
    AsymptoticPrediction {
        b,
        gamma_or_h: gamma,
        value: terms.leading + terms.boundary + terms.oscillatory + terms.constant,
        terms,
    }
}

/// Semiclassical form of the same prediction: `−h − h^{3/2} + (e(b) − 1/2)h²`.
pub fn mu1_prediction(b: f64, h: f64) -> f64 {
    assert!(h > 0.0, "mu1_prediction requires h > 0");
    -h - h.powf(1.5) + (e_inf(b).0 - 0.5) * h * h
}

/// Two-term-plus-constant expansion of the weighted half-line ground energy:
/// `−1 − √h − h/2`.
pub fn hh_expansion(h: f64) -> f64 {
    -1.0 - h.sqrt() - 0.5 * h
}

/// Largest |m| not excluded from minimizing the fiber family:
/// `floor((1 + √2)·b/2)`.
pub fn m_truncation_bound(b: f64) -> i64 {
    ((1.0 + std::f64::consts::SQRT_2) * 0.5 * b).floor() as i64
}

/// C² quintic smooth-step cutoff: 1 on [0, 1/4], 0 on [1/2, ∞), monotone
/// quintic bridge between.
pub fn cutoff(s: f64) -> f64 {
    if s <= 0.25 {
        1.0
    } else if s >= 0.5 {
        0.0
    } else {
        1.0 - smooth_step(4.0 * s - 1.0)
    }
}

pub fn cutoff_d1(s: f64) -> f64 {
    if s <= 0.25 || s >= 0.5 {
        0.0
    } else {
        -4.0 * smooth_step_d1(4.0 * s - 1.0)
    }
}

pub fn cutoff_d2(s: f64) -> f64 {
    if s <= 0.25 || s >= 0.5 {
        0.0
    } else {
        -16.0 * smooth_step_d2(4.0 * s - 1.0)
    }
}

fn smooth_step(t: f64) -> f64 {
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

fn smooth_step_d1(t: f64) -> f64 {
    30.0 * t * t * (t - 1.0) * (t - 1.0)
}

fn smooth_step_d2(t: f64) -> f64 {
    60.0 * t * (t - 1.0) * (2.0 * t - 1.0)
}

/// Boundary-layer profile `u₀(τ) = √2 e^{−τ}`, the normalized half-line
/// Robin ground state.
pub fn trial_u0(tau: f64) -> f64 {
    std::f64::consts::SQRT_2 * (-tau).exp()
}

/// Second-order profile `u₂(τ) = (τ²/4 − 1/8) u₀(τ)`, solving
/// `(−d²/dτ² + 1)u₂ = (τ − 1/2)u₀` with `u₂'(0) = −u₂(0)`.
pub fn trial_u2(tau: f64) -> f64 {
    (0.25 * tau * tau - 0.125) * trial_u0(tau)
}

/// Cut-off three-term trial state for the weighted half-line operator:
/// `f(τ) = χ(τ/δ)(u₀ + h·u₂)` with implicit energy coefficients
/// (−1, −1, −1/2).
#[derive(Debug, Clone, Copy)]
pub struct TrialState {
    pub h: f64,
    pub rho: f64,
    /// Simpson panels per subinterval of the defect integral.
    pub quadrature_nodes: usize,
}

impl TrialState {
    pub fn new(h: f64, rho: f64, quadrature_nodes: usize) -> Result<Self, AsymptoticsError> {
        if !(h > 0.0 && h < 1.0) {
            return Err(AsymptoticsError::InvalidParams(format!("h = {h} not in (0,1)")));
        }
        if !(rho > 0.25 && rho < 0.5) {
            return Err(AsymptoticsError::InvalidParams(format!(
                "rho = {rho} not in (1/4,1/2)"
            )));
        }
        if quadrature_nodes < 8 {
            return Err(AsymptoticsError::InvalidParams(
                "quadrature_nodes must be >= 8".into(),
            ));
        }
        Ok(Self {
            h,
            rho,
            quadrature_nodes,
        })
    }

    pub fn delta(&self) -> f64 {
        self.h.powf(self.rho - 0.5)
    }
}

/// g = u₀ + h u₂ and its first two derivatives, in closed form.
fn trial_profile(h: f64, tau: f64) -> (f64, f64, f64) {
    let e = std::f64::consts::SQRT_2 * (-tau).exp();
    let p = 1.0 + h * (0.25 * tau * tau - 0.125);
    let dp = 0.5 * h * tau;
    let d2p = 0.5 * h;
    (e * p, e * (dp - p), e * (d2p - 2.0 * dp + p))
}

/// Weighted L² norm of `(H_h − (−1 − √h − h/2)) f` over (0, δ), where
/// `H_h = −d²/dτ² + √h/(1 − √h τ) d/dτ` and f is the cut-off trial state.
/// Composite Simpson quadrature; doubling the panel count must agree to 1%.
pub fn trial_residual(ts: &TrialState) -> Result<f64, AsymptoticsError> {
    let delta = ts.delta();
    let sq = ts.h.sqrt();
    let energy = hh_expansion(ts.h);
    let defect = |tau: f64| -> f64 {
        let (g, dg, d2g) = trial_profile(ts.h, tau);
        let s = tau / delta;
        let (c, dc, d2c) = (
            cutoff(s),
            cutoff_d1(s) / delta,
            cutoff_d2(s) / (delta * delta),
        );
        let f = c * g;
        let df = dc * g + c * dg;
        let d2f = d2c * g + 2.0 * dc * dg + c * d2g;
        let w = 1.0 - sq * tau;
        let r = -d2f + sq / w * df - energy * f;
        r * r * w
    };
    // f vanishes beyond δ/2; split at δ/4 where the cutoff starts varying.
    let half = ts.quadrature_nodes.div_ceil(2).max(4);
    let integrate = |panels: usize| {
        simpson(&defect, 0.0, 0.25 * delta, panels)
            + simpson(&defect, 0.25 * delta, 0.5 * delta, panels)
    };
    let coarse = integrate(half).sqrt();
    let fine = integrate(2 * half).sqrt();
    if (fine - coarse).abs() > 0.01 * fine.abs().max(f64::MIN_POSITIVE) {
        return Err(AsymptoticsError::QuadratureUnderResolved { coarse, fine });
    }
    Ok(fine)
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let step = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let x0 = a + i as f64 * step;
        let x1 = x0 + step;
        sum += (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1)) * step / 6.0;
    }
    sum
}
