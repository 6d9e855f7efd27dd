//! Independent discretization oracle: weighted P1 finite elements on a line
//! mesh, discretizing both the disc radial fibers and the boundary-layer
//! operators in the stretched variable τ, with Sturm-type bisection for the
//! generalized pencil (K, M).
//!
//! P1 with midpoint quadrature on the potential keeps both matrices
//! symmetric tridiagonal, makes Robin/Dirichlet boundary handling one-entry
//! edits, and never evaluates the 1/r² singularity at r = 0. The mass matrix
//! uses the exact affine-weight formulas so it is positive definite for
//! every mesh.

use crate::fiber::FiberParams;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FdError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("mass matrix is not positive definite (pivot {pivot:e} at row {index})")]
    MassNotPositiveDefinite { index: usize, pivot: f64 },
    #[error("LDLT pivot breakdown persisted after shift perturbation near lambda = {shift}")]
    PivotBreakdown { shift: f64 },
    #[error("inverse iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("zero vector supplied")]
    ZeroVector,
}

/// Which weighted measure the pencil discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightTag {
    /// Disc fiber in r, weight r dr on (r_in, 1].
    DiscRadial,
    /// Boundary-layer coordinate τ, weight (1 - √h τ) dτ on [0, δ).
    AnnulusWeight,
}

/// Symmetric tridiagonal stiffness/mass pair over the retained mesh nodes.
#[derive(Debug, Clone)]
pub struct TridiagonalPencil {
    pub stiff_diag: Vec<f64>,
    pub stiff_off: Vec<f64>,
    pub mass_diag: Vec<f64>,
    pub mass_off: Vec<f64>,
    /// Coordinates of the retained nodes, in mesh order.
    pub grid: Vec<f64>,
    pub weight_tag: WeightTag,
}

/// Semiclassical data for the boundary-layer operators: h ∈ (0,1),
/// ρ ∈ (1/4,1/2), δ = h^(ρ-1/2), and optionally an angular momentum and
/// field for the fiber potential.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusParams {
    pub h: f64,
    pub rho: f64,
    pub delta: f64,
    pub m: Option<i32>,
    pub b: Option<f64>,
}

impl AnnulusParams {
    pub fn new(h: f64, rho: f64) -> Result<Self, FdError> {
        if !(h > 0.0 && h < 1.0) {
            return Err(FdError::InvalidParams(format!("h = {h} not in (0,1)")));
        }
        if !(rho > 0.25 && rho < 0.5) {
            return Err(FdError::InvalidParams(format!("rho = {rho} not in (1/4,1/2)")));
        }
        if h.powf(0.5 - rho) >= 1.0 / 3.0 {
            return Err(FdError::InvalidParams(format!(
                "h^(1/2-rho) = {} must be < 1/3",
                h.powf(0.5 - rho)
            )));
        }
        Ok(Self {
            h,
            rho,
            delta: h.powf(rho - 0.5),
            m: None,
            b: None,
        })
    }

    pub fn with_fiber(h: f64, rho: f64, m: i32, b: f64) -> Result<Self, FdError> {
        let mut ap = Self::new(h, rho)?;
        ap.m = Some(m);
        ap.b = Some(b);
        Ok(ap)
    }
}

/// Assemble a P1 pencil on `nodes` for the form
/// ∫ (u'v' + V u v) w dx with affine weight w per element, midpoint rule for
/// the potential, exact mass. `grad_coeff(j)` supplies the per-cell factor
/// w(midpoint)/Δ; builders compute it by index arithmetic so that constant
/// vectors are annihilated exactly when the form has no potential or
/// boundary term. `robin` entries are added to the first/last stiffness
/// diagonal; `drop_*` imposes Dirichlet by removing the node.
fn assemble_p1(
    nodes: &[f64],
    grad_coeff: impl Fn(usize) -> f64,
    weight: impl Fn(f64) -> f64,
    potential: impl Fn(f64) -> f64,
    robin_first: f64,
    robin_last: f64,
    drop_first: bool,
    drop_last: bool,
    tag: WeightTag,
) -> TridiagonalPencil {
    let n_nodes = nodes.len();
    let mut kd = vec![0.0; n_nodes];
    let mut ko = vec![0.0; n_nodes - 1];
    let mut md = vec![0.0; n_nodes];
    let mut mo = vec![0.0; n_nodes - 1];
    for j in 0..n_nodes - 1 {
        let (a, b) = (nodes[j], nodes[j + 1]);
        let dx = b - a;
        let (wl, wr) = (weight(a), weight(b));
        let mid = 0.5 * (a + b);
        let g = grad_coeff(j);
        kd[j] += g;
        kd[j + 1] += g;
        ko[j] -= g;
        // potential by midpoint rule
        let p = potential(mid) * weight(mid) * dx * 0.25;
        kd[j] += p;
        kd[j + 1] += p;
        ko[j] += p;
        // exact P1 mass with affine weight
        md[j] += dx * (3.0 * wl + wr) / 12.0;
        md[j + 1] += dx * (wl + 3.0 * wr) / 12.0;
        mo[j] += dx * (wl + wr) / 12.0;
    }
    kd[0] += robin_first;
    kd[n_nodes - 1] += robin_last;

    let lo = usize::from(drop_first);
    let hi = n_nodes - usize::from(drop_last);
    TridiagonalPencil {
        stiff_diag: kd[lo..hi].to_vec(),
        stiff_off: ko[lo..hi - 1].to_vec(),
        mass_diag: md[lo..hi].to_vec(),
        mass_off: mo[lo..hi - 1].to_vec(),
        grid: nodes[lo..hi].to_vec(),
        weight_tag: tag,
    }
}

/// Pencil for one disc radial fiber on (0, 1]: form
/// ∫ (|u'|² + (m/r - br/2)² |u|²) r dr + γ |u(1)|², mass ∫ |u|² r dr.
///
/// Uniform nodes r_j = j/n_cells. For m = 0 the origin node carries a degree
/// of freedom (the weight vanishes there, natural condition); for m ≠ 0 it
/// is removed (eigenfunctions vanish like r^|m|).
pub fn build_disc_fiber_system(
    p: &FiberParams,
    n_cells: usize,
) -> Result<TridiagonalPencil, FdError> {
    build_disc_fiber_system_on(p, 0.0, n_cells)
}

/// As [`build_disc_fiber_system`] but on the annulus (r_inner, 1] with a hard
/// Dirichlet condition at r_inner > 0. Used to measure how little the ground
/// energy changes when the fiber problem is restricted to a boundary collar.
pub fn build_disc_fiber_system_on(
    p: &FiberParams,
    r_inner: f64,
    n_cells: usize,
) -> Result<TridiagonalPencil, FdError> {
    if n_cells < 16 {
        return Err(FdError::InvalidParams(format!(
            "n_cells = {n_cells} < 16"
        )));
    }
    if !(0.0..1.0).contains(&r_inner) {
        return Err(FdError::InvalidParams(format!(
            "r_inner = {r_inner} not in [0,1)"
        )));
    }
    p.validate().map_err(|e| FdError::InvalidParams(e.to_string()))?;
    let m = f64::from(p.m);
    let b = p.b;
    let width = 1.0 - r_inner;
    let nodes: Vec<f64> = (0..=n_cells)
        .map(|j| r_inner + width * j as f64 / n_cells as f64)
        .collect();
    let drop_first = p.m != 0 || r_inner > 0.0;
    // r_mid/Δ = r_inner·n/width + (j + 1/2); exact when r_inner = 0, which
    // keeps constants exactly in the kernel of the zero-potential Neumann K
    let grad_offset = r_inner * n_cells as f64 / width;
    Ok(assemble_p1(
        &nodes,
        |j| grad_offset + (j as f64 + 0.5),
        |r| r,
        |r| {
            let t = m / r - 0.5 * b * r;
            t * t
        },
        0.0,
        p.gamma, // boundary weight at r = 1 is 1
        drop_first,
        false,
        WeightTag::DiscRadial,
    ))
}

/// Pencil for the boundary-layer operator on [0, δ): form
/// ∫ (|u'|² + [pot] h (1-√h τ)⁻² (m - (b/2)(1-√h τ)²)² |u|²)(1-√h τ) dτ − |u(0)|²,
/// mass ∫ |u|² (1-√h τ) dτ, Dirichlet at τ = δ.
pub fn build_annulus_system(
    ap: &AnnulusParams,
    n_cells: usize,
    include_potential: bool,
) -> Result<TridiagonalPencil, FdError> {
    if n_cells < 16 {
        return Err(FdError::InvalidParams(format!(
            "n_cells = {n_cells} < 16"
        )));
    }
    if include_potential && (ap.m.is_none() || ap.b.is_none()) {
        return Err(FdError::InvalidParams(
            "include_potential requires m and b".into(),
        ));
    }
    let sq = ap.h.sqrt();
    let h = ap.h;
    let m = f64::from(ap.m.unwrap_or(0));
    let b = ap.b.unwrap_or(0.0);
    let nodes: Vec<f64> = (0..=n_cells)
        .map(|j| ap.delta * j as f64 / n_cells as f64)
        .collect();
    // w(τ_mid)/Δ = n/δ − √h (j + ½)
    let n_over_delta = n_cells as f64 / ap.delta;
    Ok(assemble_p1(
        &nodes,
        |j| n_over_delta - sq * (j as f64 + 0.5),
        |t| 1.0 - sq * t,
        |t| {
            if include_potential {
                let w = 1.0 - sq * t;
                let q = m - 0.5 * b * w * w;
                h * q * q / (w * w)
            } else {
                0.0
            }
        },
        -1.0, // Robin term at τ = 0, boundary weight 1
        0.0,
        false,
        true,
        WeightTag::AnnulusWeight,
    ))
}

impl TridiagonalPencil {
    pub fn len(&self) -> usize {
        self.stiff_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stiff_diag.is_empty()
    }

    /// LDLᵀ pivots of M must all be positive.
    pub fn mass_is_positive_definite(&self) -> bool {
        let mut q = 0.0_f64;
        for i in 0..self.len() {
            let off = if i == 0 {
                0.0
            } else {
                let e = self.mass_off[i - 1];
                e * e / q
            };
            q = self.mass_diag[i] - off;
            if q <= 0.0 {
                return false;
            }
        }
        true
    }

    /// Negative-pivot count of LDLᵀ applied to K − λM, i.e. the number of
    /// pencil eigenvalues strictly below λ. `None` on an exact zero pivot.
    fn negative_pivots(&self, lambda: f64) -> Option<usize> {
        let mut count = 0usize;
        let mut q = 0.0_f64;
        for i in 0..self.len() {
            let t = self.stiff_diag[i] - lambda * self.mass_diag[i];
            let corr = if i == 0 {
                0.0
            } else {
                let s = self.stiff_off[i - 1] - lambda * self.mass_off[i - 1];
                s * s / q
            };
            q = t - corr;
            if q == 0.0 {
                return None;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        Some(count)
    }

    /// Count with exact-zero pivots replaced by a tiny negative value, i.e.
    /// an exactly singular leading minor counts its eigenvalue as below λ.
    /// `None` only when the recursion produced NaN.
    fn negative_pivots_zero_below(&self, lambda: f64) -> Option<usize> {
        let mut scale = 0.0_f64;
        for i in 0..self.len() {
            scale = scale.max((self.stiff_diag[i] - lambda * self.mass_diag[i]).abs());
        }
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut count = 0usize;
        let mut q = 0.0_f64;
        for i in 0..self.len() {
            let t = self.stiff_diag[i] - lambda * self.mass_diag[i];
            let corr = if i == 0 {
                0.0
            } else {
                let s = self.stiff_off[i - 1] - lambda * self.mass_off[i - 1];
                s * s / q
            };
            q = t - corr;
            if q.is_nan() {
                return None;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        Some(count)
    }

    /// Inertia count with zero-pivot recovery: perturb λ by 1e-13·(1+|λ|)
    /// and recount; when the perturbation is below the working precision of
    /// the shifted matrix (so the recount hits the same pivot), fall back to
    /// the signed-tiny replacement. Errors only on NaN breakdown.
    pub fn eigenvalue_count_below(&self, lambda: f64) -> Result<usize, FdError> {
        if let Some(c) = self.negative_pivots(lambda) {
            return Ok(c);
        }
        let shifted = lambda + 1e-13 * (1.0 + lambda.abs());
        if let Some(c) = self.negative_pivots(shifted) {
            return Ok(c);
        }
        self.negative_pivots_zero_below(lambda)
            .ok_or(FdError::PivotBreakdown { shift: lambda })
    }

    fn quadratic_form(diag: &[f64], off: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..diag.len() {
            s += diag[i] * v[i] * v[i];
        }
        for i in 0..off.len() {
            s += 2.0 * off[i] * v[i] * v[i + 1];
        }
        s
    }

    fn mass_apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.mass_diag[i] * v[i];
            if i > 0 {
                s += self.mass_off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.mass_off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }
}

/// The k smallest generalized eigenvalues of (K, M), each bracketed to width
/// `tol` by bisection on the LDLᵀ inertia of K − λM. Deterministic.
pub fn lowest_eigenvalues(
    pencil: &TridiagonalPencil,
    k: usize,
    tol: f64,
) -> Result<Vec<f64>, FdError> {
    if k < 1 {
        return Err(FdError::InvalidParams("k must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(FdError::InvalidParams("tol must be > 0".into()));
    }
    if let Some((index, pivot)) = mass_pivot_failure(pencil) {
        return Err(FdError::MassNotPositiveDefinite { index, pivot });
    }

    // Exponential expansion until [lo, hi] brackets the k lowest.
    let mut lo = -1.0_f64;
    while pencil.eigenvalue_count_below(lo)? > 0 {
        lo = 2.0 * lo - 1.0;
        if !lo.is_finite() {
            return Err(FdError::InvalidParams("bracket expansion diverged".into()));
        }
    }
    let mut hi = 1.0_f64;
    while pencil.eigenvalue_count_below(hi)? < k {
        hi = 2.0 * hi + 1.0;
        if !hi.is_finite() {
            return Err(FdError::InvalidParams(format!(
                "pencil has fewer than {k} eigenvalues"
            )));
        }
    }

    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let (mut a, mut b) = (lo, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if pencil.eigenvalue_count_below(mid)? >= j + 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

fn mass_pivot_failure(p: &TridiagonalPencil) -> Option<(usize, f64)> {
    let mut q = 0.0_f64;
    for i in 0..p.len() {
        let corr = if i == 0 {
            0.0
        } else {
            let e = p.mass_off[i - 1];
            e * e / q
        };
        q = p.mass_diag[i] - corr;
        if q <= 0.0 {
            return Some((i, q));
        }
    }
    None
}

/// Eigenvector for a certified eigenvalue by inverse iteration on K − λM,
/// M-normalized, sign fixed so the largest-magnitude entry is positive.
pub fn ground_vector(pencil: &TridiagonalPencil, lambda: f64) -> Result<Vec<f64>, FdError> {
    const MAX_ITS: usize = 50;
    let n = pencil.len();
    if n == 0 {
        return Err(FdError::ZeroVector);
    }
    let solver = GuardedLdlt::factor(pencil, lambda);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    m_normalize(pencil, &mut v)?;
    let mut rhs = vec![0.0; n];
    for _ in 0..MAX_ITS {
        pencil.mass_apply(&v, &mut rhs);
        let mut w = rhs.clone();
        solver.solve_in_place(&mut w);
        m_normalize(pencil, &mut w)?;
        // direction change, up to sign
        let mut dp = 0.0;
        let mut dm = 0.0;
        for i in 0..n {
            dp += (w[i] - v[i]) * (w[i] - v[i]);
            dm += (w[i] + v[i]) * (w[i] + v[i]);
        }
        let delta = dp.min(dm).sqrt();
        v = w;
        if delta <= 1e-10 {
            fix_sign(&mut v);
            return Ok(v);
        }
    }
    Err(FdError::NoConvergence(MAX_ITS))
}

fn m_normalize(pencil: &TridiagonalPencil, v: &mut [f64]) -> Result<(), FdError> {
    let norm2 = TridiagonalPencil::quadratic_form(&pencil.mass_diag, &pencil.mass_off, v);
    if !(norm2 > 0.0) {
        return Err(FdError::ZeroVector);
    }
    let inv = 1.0 / norm2.sqrt();
    for x in v.iter_mut() {
        *x *= inv;
    }
    Ok(())
}

fn fix_sign(v: &mut [f64]) {
    let mut imax = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// LDLᵀ of the (near-singular) shifted matrix with tiny-pivot replacement,
/// the standard inverse-iteration safeguard.
struct GuardedLdlt {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl GuardedLdlt {
    fn factor(p: &TridiagonalPencil, lambda: f64) -> Self {
        let n = p.len();
        let mut scale = 0.0_f64;
        for i in 0..n {
            scale = scale.max((p.stiff_diag[i] - lambda * p.mass_diag[i]).abs());
        }
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let t = p.stiff_diag[i] - lambda * p.mass_diag[i];
            let mut q = if i == 0 {
                t
            } else {
                let s = p.stiff_off[i - 1] - lambda * p.mass_off[i - 1];
                l[i - 1] = s / d[i - 1];
                t - l[i - 1] * s
            };
            if q.abs() < tiny {
                q = if q < 0.0 { -tiny } else { tiny };
            }
            d[i] = q;
        }
        Self { d, l }
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }
}

/// Rayleigh quotient (vᵀKv)/(vᵀMv).
pub fn rayleigh_quotient(pencil: &TridiagonalPencil, v: &[f64]) -> Result<f64, FdError> {
    assert_eq!(v.len(), pencil.len());
    let m = TridiagonalPencil::quadratic_form(&pencil.mass_diag, &pencil.mass_off, v);
    if !(m > 0.0) {
        return Err(FdError::ZeroVector);
    }
    let k = TridiagonalPencil::quadratic_form(&pencil.stiff_diag, &pencil.stiff_off, v);
    Ok(k / m)
}

/// Boundary-weighted mass ‖Dv‖²_M with D = diag(exp(α(1−r_j)/√h)): the
/// discrete analogue of ∫ |v|² exp(2α·dist(x,∂Ω)/√h) dx for a disc fiber
/// ground vector. Measures how strongly the state localizes at the boundary.
pub fn agmon_mass(pencil: &TridiagonalPencil, v: &[f64], h: f64, alpha: f64) -> f64 {
    assert_eq!(v.len(), pencil.len());
    let sq = h.sqrt();
    let w: Vec<f64> = v
        .iter()
        .zip(&pencil.grid)
        .map(|(&vi, &r)| vi * (alpha * (1.0 - r) / sq).exp())
        .collect();
    TridiagonalPencil::quadratic_form(&pencil.mass_diag, &pencil.mass_off, &w)
}
