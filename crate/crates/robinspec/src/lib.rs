//! Spectral library for the magnetic Robin Laplacian on the unit disc.
//!
//! The two-dimensional operator `-(∇ - ibA₀)²` with boundary condition
//! `∂_ν u + γ u = 0` (γ < 0) decomposes over angular momenta `m ∈ ℤ` into a
//! family of radial Sturm–Liouville problems. This crate computes fiber
//! eigenvalues by two independent routes — a Kummer-function secular equation
//! ([`fiber`]) and a weighted P1 finite-element pencil ([`fdsolver`]) — and
//! builds on them:
//!
//! - [`asymptotics`]: closed-form expansions of the ground energy for
//!   γ → −∞, the oscillatory term `e(b) = inf_m (m - b/2)²`, angular-momentum
//!   truncation bounds, and boundary-layer trial states.
//! - [`diamag`]: the disc ground energy as a minimum over fibers, field
//!   scans, and the non-monotonicity witness showing that strong
//!   diamagnetism fails on the disc.
//! - [`littleparks`]: critical-temperature curves `T_c(b)` from the
//!   linearized Ginzburg–Landau criterion.

pub mod asymptotics;
pub mod diamag;
pub mod fdsolver;
pub mod fiber;
pub mod littleparks;
pub mod specfun;

pub use diamag::{lambda1_disc, scan_b, ScanRow, Witness};
pub use fiber::{EigResult, FiberParams, Method, SolveOpts};
