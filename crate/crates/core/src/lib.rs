//! Numerical kernels and difference schemes for the time-fractional diffusion
//! equation
//!
//! ```text
//! ∂^α_t u = ∂x(k(x,t) ∂x u) − q(x,t) u + f(x,t),   0 < x < l, 0 < t ≤ T,
//! u(0,t) = u(l,t) = 0,  u(x,0) = u0(x),
//! ```
//!
//! where `∂^α_t` is the Caputo derivative of order `0 < α < 1`.
//!
//! * [`caputo`]: the L2-1σ and L1 discrete Caputo operators, their weight
//!   audits, and a quadrature reference oracle.
//! * [`grid`]: meshes, grid functions, discrete norms and convergence orders.
//! * [`tridiag`]: the Thomas algorithm used by both implicit schemes.
//! * [`schemes`]: the weighted scheme family, the second-order scheme, the
//!   fourth-order compact scheme and the stability/energy probes.
//! * [`problems`]: manufactured test problems with exact solutions.
//! * [`harness`]: refinement studies and CSV/markdown reports.

pub mod caputo;
mod error;
pub mod grid;
pub mod harness;
pub mod problems;
pub mod schemes;
pub mod tridiag;

pub use error::{Error, Result};

/// Real gamma function.
///
/// Backed by the musl `tgamma` port, whose relative error on `(0, 7)` is
/// below `1e-15`.
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
