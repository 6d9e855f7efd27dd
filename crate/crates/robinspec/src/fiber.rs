//! Analytic solution of one radial fiber problem on the disc.
//!
//! The fiber operator for angular momentum m and field b is
//! `-u'' - u'/r + (m/r - br/2)² u` on (0,1) with Robin condition
//! `u'(1) + γ u(1) = 0`. The solution regular at the origin is
//! `u(r) = r^|m| e^{-br²/4} M(a, |m|+1, br²/2)` with
//! `a = (|m| - m + 1)/2 - λ/(2b)`, so eigenvalues are roots of the scalar
//! secular function `S(λ) = u'(1;λ) + γ u(1;λ)`. Roots are bracketed from a
//! finite-element seed, bisected, and certified by an independent inertia
//! count on a finer pencil.

use crate::fdsolver::{self, FdError};
use crate::specfun::{self, SeriesAccuracy, SpecFunError};
use thiserror::Error;

/// One radial fiber problem: angular momentum, field intensity, Robin
/// parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    pub m: i32,
    pub b: f64,
    pub gamma: f64,
}

impl FiberParams {
    pub fn new(m: i32, b: f64, gamma: f64) -> Result<Self, FiberError> {
        let p = Self { m, b, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FiberError> {
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(FiberError::InvalidParams(format!("b = {} must be >= 0", self.b)));
        }
        if !(self.gamma <= 0.0 && self.gamma.is_finite()) {
            return Err(FiberError::InvalidParams(format!(
                "gamma = {} must be <= 0",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// How an eigenvalue was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    FiniteDifference,
}

/// An eigenvalue with its fiber index, method tag, residual and
/// certification flag. `certified` means an independent inertia count found
/// exactly one eigenvalue at or below `lambda` (plus slack).
#[derive(Debug, Clone, Copy)]
pub struct EigResult {
    pub lambda: f64,
    pub m: i32,
    pub method: Method,
    pub residual: f64,
    pub certified: bool,
}

#[derive(Debug, Error)]
pub enum FiberError {
    #[error("invalid fiber parameters: {0}")]
    InvalidParams(String),
    #[error("zero-field analytic branch requires lambda < 0 (got lambda = {lambda})")]
    UnsupportedBranch { lambda: f64 },
    #[error(
        "no secular sign change in [{lo}, {hi}] after {widenings} widenings \
         (m={m}, b={b}, gamma={gamma})"
    )]
    BracketFailure {
        m: i32,
        b: f64,
        gamma: f64,
        lo: f64,
        hi: f64,
        widenings: u32,
    },
    #[error(
        "certification failed: inertia count {count} (expected 1) at lambda = {lambda} \
         with slack {slack:e} (m={m}, b={b}, gamma={gamma})"
    )]
    CertificationFailure {
        m: i32,
        b: f64,
        gamma: f64,
        lambda: f64,
        slack: f64,
        count: usize,
    },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Fd(#[from] FdError),
}

/// Bracketing and certification controls for [`solve_fiber_ground`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    /// Resolution of the finite-element seed solve.
    pub seed_cells: usize,
    /// Base resolution of the certification pencil (scaled up with γ²).
    pub certify_cells: usize,
    /// Absolute bisection tolerance on λ.
    pub bisect_tol: f64,
    /// Bracket widenings tried before giving up.
    pub max_bracket_doublings: u32,
    /// Re-solve with a wider angular-momentum ring and fail loudly if the
    /// disc minimum moves.
    pub paranoid: bool,
    pub accuracy: SeriesAccuracy,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self {
            seed_cells: 2000,
            certify_cells: 8000,
            bisect_tol: 1e-10,
            max_bracket_doublings: 3,
            paranoid: false,
            accuracy: SeriesAccuracy::default(),
        }
    }
}

/// Value and r-derivative of the regular radial solution at `r` for spectral
/// parameter `lambda`. Requires b > 0; the zero-field problem goes through
/// [`secular_value`]'s Bessel branch or the finite-element path.
pub fn radial_solution(
    p: &FiberParams,
    lambda: f64,
    r: f64,
    acc: SeriesAccuracy,
) -> Result<(f64, f64), FiberError> {
    p.validate()?;
    if p.b <= 0.0 {
        return Err(FiberError::InvalidParams(
            "radial_solution requires b > 0".into(),
        ));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(FiberError::InvalidParams(format!("r = {r} not in (0,1]")));
    }
    let am = f64::from(p.m.abs());
    let a = 0.5 * (am - f64::from(p.m) + 1.0) - lambda / (2.0 * p.b);
    let c = am + 1.0;
    let z = 0.5 * p.b * r * r;
    let mv = specfun::kummer_m(a, c, z, acc)?;
    let dm = specfun::kummer_m_dz(a, c, z, acc)?;
    let pre = r.powf(am) * (-0.25 * p.b * r * r).exp();
    let value = pre * mv;
    // u' = pre * ( (|m|/r - br/2) M + br M'(z) )
    let derivative = pre * ((am / r - 0.5 * p.b * r) * mv + p.b * r * dm);
    Ok((value, derivative))
}

/// The secular function S(λ) = u'(1;λ) + γ u(1;λ) whose zeros are the fiber
/// eigenvalues. For b = 0 the regular solution is I_|m|(√(-λ) r), available
/// for λ < 0 only.
pub fn secular_value(p: &FiberParams, lambda: f64, acc: SeriesAccuracy) -> Result<f64, FiberError> {
    p.validate()?;
    if p.b > 0.0 {
        let (u, du) = radial_solution(p, lambda, 1.0, acc)?;
        return Ok(du + p.gamma * u);
    }
    if lambda >= 0.0 {
        return Err(FiberError::UnsupportedBranch { lambda });
    }
    let k = (-lambda).sqrt();
    let n = p.m.unsigned_abs();
    let u = specfun::bessel_i(n, k, acc)?;
    // I_n'(x) = I_{n+1}(x) + (n/x) I_n(x); u(r) = I_n(kr) so u'(1) = k I_n'(k).
    let du = k * specfun::bessel_i(n + 1, k, acc)? + f64::from(n) * u;
    Ok(du + p.gamma * u)
}

/// Smallest root of the secular function, certified against the
/// finite-element pencil.
///
/// Strategy: seed λ from a coarse pencil, bracket with Δ = max(1, 0.1|λ|),
/// widen up to `max_bracket_doublings` times if the secular function does
/// not change sign, bisect to `bisect_tol`, then certify by an inertia count
/// on a fine pencil. Zero-field inputs whose seed is not clearly negative
/// (the Neumann regime) are answered by the finite-element route directly.
pub fn solve_fiber_ground(p: &FiberParams, opts: &SolveOpts) -> Result<EigResult, FiberError> {
    p.validate()?;
    let seed_pencil = fdsolver::build_disc_fiber_system(p, opts.seed_cells)?;
    let seed = fdsolver::lowest_eigenvalues(&seed_pencil, 1, 1e-8)?[0];

    // Modified-Bessel branch needs a clearly negative target; the Neumann
    // regime (ground state at zero) is answered by the pencil directly.
    if p.b == 0.0 && seed >= -1e-6 {
        return fd_ground(p, opts);
    }

    let mut width = (0.1 * seed.abs()).max(1.0);
    let clamp_hi = |x: f64| if p.b == 0.0 { x.min(-1e-12) } else { x };
    let mut lo = seed - width;
    let mut hi = clamp_hi(seed + width);
    let mut s_lo = secular_value(p, lo, opts.accuracy)?;
    let mut s_hi = secular_value(p, hi, opts.accuracy)?;
    let mut widenings = 0u32;
    while s_lo * s_hi > 0.0 {
        if widenings >= opts.max_bracket_doublings {
            return Err(FiberError::BracketFailure {
                m: p.m,
                b: p.b,
                gamma: p.gamma,
                lo,
                hi,
                widenings,
            });
        }
        width *= 2.0;
        lo = seed - width;
        hi = clamp_hi(seed + width);
        s_lo = secular_value(p, lo, opts.accuracy)?;
        s_hi = secular_value(p, hi, opts.accuracy)?;
        widenings += 1;
    }

    while hi - lo > opts.bisect_tol {
        let mid = 0.5 * (lo + hi);
        let s_mid = secular_value(p, mid, opts.accuracy)?;
        if s_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if s_lo * s_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            s_lo = s_mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = secular_value(p, root, opts.accuracy)?.abs();

    certify(p, opts, root)?;
    Ok(EigResult {
        lambda: root,
        m: p.m,
        method: Method::Analytic,
        residual,
        certified: true,
    })
}

/// Inertia certification: exactly one pencil eigenvalue at or below
/// root + slack. The slack covers the discretization bias of the pencil
/// (which scales like (Δγ²)²) and stays far below the fiber spectral gap.
fn certify(p: &FiberParams, opts: &SolveOpts, root: f64) -> Result<(), FiberError> {
    let n_cert = certification_cells(opts.certify_cells, p.gamma);
    let pencil = fdsolver::build_disc_fiber_system(p, n_cert)?;
    let slack = certification_slack(root);
    let count = pencil.eigenvalue_count_below(root + slack)?;
    if count != 1 {
        return Err(FiberError::CertificationFailure {
            m: p.m,
            b: p.b,
            gamma: p.gamma,
            lambda: root,
            slack,
            count,
        });
    }
    Ok(())
}

fn certification_cells(base: usize, gamma: f64) -> usize {
    base.max((10.0 * gamma * gamma).ceil() as usize)
}

fn certification_slack(lambda: f64) -> f64 {
    (2.0 * (1e-6 * lambda.abs() + 1e-4)).max(1e-6)
}

/// Finite-element answer for inputs outside the analytic branch. These are
/// near-zero Neumann-regime states with smooth eigenfunctions: moderate
/// resolution suffices, and the Sturm-count noise floor grows like ε·n² in
/// absolute λ, so finer pencils would be strictly less accurate here.
fn fd_ground(p: &FiberParams, opts: &SolveOpts) -> Result<EigResult, FiberError> {
    let n = opts.seed_cells.clamp(1000, 4000);
    let pencil = fdsolver::build_disc_fiber_system(p, n)?;
    let lambda = fdsolver::lowest_eigenvalues(&pencil, 1, opts.bisect_tol)?[0];
    let v = fdsolver::ground_vector(&pencil, lambda)?;
    let residual = pencil_residual(&pencil, lambda, &v);
    let count = pencil.eigenvalue_count_below(lambda + certification_slack(lambda))?;
    Ok(EigResult {
        lambda,
        m: p.m,
        method: Method::FiniteDifference,
        residual,
        certified: count == 1,
    })
}

fn pencil_residual(pencil: &fdsolver::TridiagonalPencil, lambda: f64, v: &[f64]) -> f64 {
    let n = pencil.len();
    let apply = |d: &[f64], o: &[f64], x: &[f64], i: usize| {
        let mut s = d[i] * x[i];
        if i > 0 {
            s += o[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            s += o[i] * x[i + 1];
        }
        s
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let kv = apply(&pencil.stiff_diag, &pencil.stiff_off, v, i);
        let mv = apply(&pencil.mass_diag, &pencil.mass_off, v, i);
        num += (kv - lambda * mv) * (kv - lambda * mv);
        den += mv * mv;
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}
