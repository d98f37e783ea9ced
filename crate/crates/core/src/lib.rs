//! Greedy low-complexity approximations of the 8-point DCT.
//!
//! The crate is `no_std` (it needs `alloc`) and holds only the numerical
//! parts of the laboratory:
//!
//! * [`linalg`]: dense matrices, the exact DCT, vector angles, SPD inverse
//!   square roots and the orthogonalization `Ĉ = S·T`.
//! * [`catalog`]: the low-complexity matrices used for comparison.
//! * [`search`]: the angle-driven greedy row search over integer spaces.
//! * [`metrics`] and [`circular`]: figures of merit for an approximation.
//! * [`plan`]: multiplierless add/shift programs for `T1` and its 16- and
//!   32-point scalings.
//! * [`codec`]: the JPEG-like block experiment (transform, zig-zag
//!   truncation, MSE/PSNR/SSIM).
//!
//! File formats, the CLI and parallel drivers live in the `dctlab` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod circular;
pub mod codec;
mod error;
pub mod linalg;
pub mod metrics;
pub mod plan;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{ApproxTransform, IntMatrix, RealMatrix, ScalingKind};

/// Tolerance for algebraic identities (orthonormality, `Ĉ = S·T`).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for results that go through an eigendecomposition.
pub const EIGEN_TOL: f64 = 1e-10;
