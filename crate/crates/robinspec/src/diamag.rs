//! Disc-level ground energy as a minimum over angular-momentum fibers,
//! field scans, and the failure of strong diamagnetism.
//!
//! Only finitely many fibers can minimize: |m| beyond
//! [`m_truncation_bound`](crate::asymptotics::m_truncation_bound) is
//! excluded, so the disc minimum is taken over a finite ring with a safety
//! margin. Fibers are independent and solved in parallel; output ordering is
//! deterministic.

use crate::asymptotics::{self, lambda1_prediction};
use crate::fiber::{solve_fiber_ground, EigResult, FiberError, FiberParams, SolveOpts};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiamagError {
    #[error("fiber m = {m} (b = {b}, gamma = {gamma}) failed: {source}")]
    Fiber {
        m: i32,
        b: f64,
        gamma: f64,
        #[source]
        source: FiberError,
    },
    #[error(
        "angular-momentum truncation unstable at b = {b}, gamma = {gamma}: \
         widening the ring moved the minimum from {lambda} to {wider} (|Δ| > 1e-9)"
    )]
    TruncationUnstable {
        b: f64,
        gamma: f64,
        lambda: f64,
        wider: f64,
    },
    #[error("invalid scan parameters: {0}")]
    InvalidParams(String),
}

/// One row of a field scan: disc ground energy, its fiber index, and the gap
/// to the asymptotic prediction.
#[derive(Debug, Clone, Copy)]
pub struct ScanRow {
    pub b: f64,
    pub lambda1: f64,
    pub m_star: i32,
    pub prediction: f64,
    pub gap: f64,
}

/// Witness triple b₁ < b₂ < b₃ for the failure of strong diamagnetism:
/// `holds` records λ₁(b₁) < λ₁(b₂) > λ₁(b₃). A false result is a finding
/// (moderate |γ| may be outside the asymptotic regime), not an error.
#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub n0: i64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub holds: bool,
}

/// Per-field margin of the diamagnetic inequality λ₁(b,γ) ≥ λ₁(0,γ).
#[derive(Debug, Clone, Copy)]
pub struct DiamagRow {
    pub b: f64,
    pub lambda1: f64,
    pub margin: f64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct DiamagReport {
    pub gamma: f64,
    pub lambda0: f64,
    pub rows: Vec<DiamagRow>,
    pub all_ok: bool,
}

fn solve_one(m: i32, b: f64, gamma: f64, opts: &SolveOpts) -> Result<EigResult, DiamagError> {
    let p = FiberParams { m, b, gamma };
    solve_fiber_ground(&p, opts).map_err(|source| DiamagError::Fiber {
        m,
        b,
        gamma,
        source,
    })
}

/// Ground states of every fiber with m in [m_lo, m_hi], in ascending m
/// order, solved in parallel.
pub fn solve_fiber_range(
    b: f64,
    gamma: f64,
    m_lo: i32,
    m_hi: i32,
    opts: &SolveOpts,
) -> Result<Vec<EigResult>, DiamagError> {
    (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| solve_one(m, b, gamma, opts))
        .collect()
}

fn min_result(results: &[EigResult]) -> EigResult {
    // ascending m with strict comparison: the smallest m wins exact ties
    let mut best = results[0];
    for r in &results[1..] {
        if r.lambda < best.lambda {
            best = *r;
        }
    }
    best
}

/// Disc ground energy λ₁(b,γ) = min over fibers, with the minimizing fiber.
///
/// The ring is |m| ≤ m_truncation_bound(b) + 2 (+4 in paranoid mode, which
/// additionally verifies that two extra fibers on each side leave the
/// minimum unchanged to 1e-9).
pub fn lambda1_disc(b: f64, gamma: f64, opts: &SolveOpts) -> Result<EigResult, DiamagError> {
    if !(gamma < 0.0) {
        return Err(DiamagError::InvalidParams(format!(
            "gamma = {gamma} must be < 0"
        )));
    }
    if !(b >= 0.0) {
        return Err(DiamagError::InvalidParams(format!("b = {b} must be >= 0")));
    }
    let margin = if opts.paranoid { 4 } else { 2 };
    let m_max = (asymptotics::m_truncation_bound(b) + margin) as i32;
    let results = solve_fiber_range(b, gamma, -m_max, m_max, opts)?;
    let best = min_result(&results);
    if opts.paranoid {
        let ring = solve_fiber_range(b, gamma, m_max + 1, m_max + 2, opts)?;
        let ring_neg = solve_fiber_range(b, gamma, -m_max - 2, -m_max - 1, opts)?;
        let wider = ring
            .iter()
            .chain(&ring_neg)
            .fold(best, |acc, r| if r.lambda < acc.lambda { *r } else { acc });
        if (wider.lambda - best.lambda).abs() > 1e-9 {
            return Err(DiamagError::TruncationUnstable {
                b,
                gamma,
                lambda: best.lambda,
                wider: wider.lambda,
            });
        }
    }
    Ok(best)
}

/// Uniform inclusive scan of λ₁(b,γ) against the asymptotic prediction.
/// Rows are computed in parallel but returned in ascending b order.
pub fn scan_b(
    gamma: f64,
    b_min: f64,
    b_max: f64,
    steps: usize,
    opts: &SolveOpts,
) -> Result<Vec<ScanRow>, DiamagError> {
    if steps < 2 {
        return Err(DiamagError::InvalidParams(format!("steps = {steps} < 2")));
    }
    if !(b_min >= 0.0 && b_min < b_max) {
        return Err(DiamagError::InvalidParams(format!(
            "need 0 <= b_min < b_max, got [{b_min}, {b_max}]"
        )));
    }
    let grid: Vec<f64> = (0..steps)
        .map(|i| b_min + (b_max - b_min) * i as f64 / (steps - 1) as f64)
        .collect();
    grid.par_iter()
        .map(|&b| {
            let r = lambda1_disc(b, gamma, opts)?;
            let prediction = lambda1_prediction(b, gamma).value;
            Ok(ScanRow {
                b,
                lambda1: r.lambda,
                m_star: r.m,
                prediction,
                gap: r.lambda - prediction,
            })
        })
        .collect()
}

/// Witness construction: n₀ the smallest natural number exceeding A, then
/// b₁ = 2n₀, b₂ = 2n₀ + 1, b₃ = 2n₀ + 3/2. The oscillatory term predicts
/// λ₁(b₁) < λ₁(b₂) > λ₁(b₃) for γ negative enough.
pub fn find_nonmonotone_witness(
    gamma: f64,
    a_threshold: f64,
    opts: &SolveOpts,
) -> Result<Witness, DiamagError> {
    if !(gamma < 0.0) {
        return Err(DiamagError::InvalidParams(format!(
            "gamma = {gamma} must be < 0"
        )));
    }
    if !(a_threshold > 0.0) {
        return Err(DiamagError::InvalidParams(format!(
            "A = {a_threshold} must be > 0"
        )));
    }
    let n0 = a_threshold.floor() as i64 + 1;
    let b1 = 2.0 * n0 as f64;
    let b2 = b1 + 1.0;
    let b3 = b1 + 1.5;
    let v = [b1, b2, b3]
        .into_par_iter()
        .map(|b| lambda1_disc(b, gamma, opts).map(|r| r.lambda))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Witness {
        n0,
        b1,
        b2,
        b3,
        v1: v[0],
        v2: v[1],
        v3: v[2],
        holds: v[0] < v[1] && v[1] > v[2],
    })
}

/// Diamagnetic inequality report: λ₁(b,γ) ≥ λ₁(0,γ) − 1e-7 for each listed b.
pub fn check_diamagnetic(
    gamma: f64,
    b_list: &[f64],
    opts: &SolveOpts,
) -> Result<DiamagReport, DiamagError> {
    let lambda0 = lambda1_disc(0.0, gamma, opts)?.lambda;
    let rows = b_list
        .par_iter()
        .map(|&b| {
            let r = lambda1_disc(b, gamma, opts)?;
            let margin = r.lambda - lambda0;
            Ok(DiamagRow {
                b,
                lambda1: r.lambda,
                margin,
                ok: margin >= -1e-7,
            })
        })
        .collect::<Result<Vec<DiamagRow>, DiamagError>>()?;
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(DiamagReport {
        gamma,
        lambda0,
        rows,
        all_ok,
    })
}
