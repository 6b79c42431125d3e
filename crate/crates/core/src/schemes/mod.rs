//! Difference schemes for the time-fractional diffusion equation.
//!
//! Every scheme here belongs to the weighted family
//!
//! ```text
//! Σ_{s=0}^{j} g_s^{j+1} (y^{s+1} − y^s) = Λ(σ_{j+1} y^{j+1} + (1 − σ_{j+1}) y^j) + φ^{j+1},
//! ```
//!
//! with the time weights supplied by a [`WeightProvider`]. The second-order
//! scheme uses `Λy = (a y_x̄)_x − d y`; the compact scheme applies the
//! averaging operator `H_h v = v + h² v_x̄x / 12` to the time derivative, the
//! reaction term and the source.

mod provider;
mod solver;
mod stability;

use std::fmt;
use std::sync::Arc;

pub use provider::{L1Provider, L21SigmaProvider, SigmaOverride, WeightProvider};
pub use solver::{
    apply_flux_operator, apply_mass_operator, run_compact, run_second_order, simulate, step_compact,
    step_second_order, ErrorNorms, Run, Scheme,
};
pub use stability::{
    a_priori_bound, check_stability_conditions, coercivity, energy_inequality_probe, AprioriProbe,
    EnergyMargins, StabilityReport, ENERGY_SLACK,
};

use crate::{Error, Result};

pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Data of one initial-boundary value problem with homogeneous Dirichlet
/// conditions.
///
/// Defaults: `k ≡ 1` (with `c1 = 1`), `q ≡ 0`, `f ≡ 0`, `u0 ≡ 0`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub k: SpaceTimeFn,
    pub q: SpaceTimeFn,
    pub f: SpaceTimeFn,
    pub u0: ProfileFn,
    pub length: f64,
    pub horizon: f64,
    /// Declared lower bound `k ≥ c1 > 0`.
    pub c1: f64,
    pub exact: Option<SpaceTimeFn>,
    /// Whether `k` and `q` depend on time only (required by the compact scheme).
    pub time_only_coefficients: bool,
}

impl ProblemSpec {
    pub fn new(length: f64, horizon: f64) -> Self {
        Self {
            k: Arc::new(|_, _| 1.0),
            q: Arc::new(|_, _| 0.0),
            f: Arc::new(|_, _| 0.0),
            u0: Arc::new(|_| 0.0),
            length,
            horizon,
            c1: 1.0,
            exact: None,
            time_only_coefficients: true,
        }
    }

    pub fn with_conductivity(mut self, c1: f64, k: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.k = Arc::new(k);
        self.c1 = c1;
        self.time_only_coefficients = false;
        self
    }

    pub fn with_time_conductivity(mut self, c1: f64, k: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.k = Arc::new(move |_, t| k(t));
        self.c1 = c1;
        self
    }

    pub fn with_absorption(mut self, q: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.q = Arc::new(q);
        self.time_only_coefficients = false;
        self
    }

    pub fn with_time_absorption(mut self, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.q = Arc::new(move |_, t| q(t));
        self
    }

    pub fn with_source(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.f = Arc::new(f);
        self
    }

    pub fn with_initial(mut self, u0: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.u0 = Arc::new(u0);
        self
    }

    pub fn with_exact(mut self, u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(u));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !(self.horizon > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "domain extents must be positive (l={}, T={})",
                self.length, self.horizon
            )));
        }
        if !(self.c1 > 0.0) {
            return Err(Error::InvalidProblem(format!("c1 must be positive, got {}", self.c1)));
        }
        let (left, right) = ((self.u0)(0.0), (self.u0)(self.length));
        let scale = 1e-12 * (1.0 + (self.u0)(0.5 * self.length).abs());
        if left.abs() > scale || right.abs() > scale {
            return Err(Error::InvalidProblem(format!(
                "initial profile must vanish at both ends (u0(0)={left}, u0(l)={right})"
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("length", &self.length)
            .field("horizon", &self.horizon)
            .field("c1", &self.c1)
            .field("has_exact", &self.exact.is_some())
            .field("time_only_coefficients", &self.time_only_coefficients)
            .finish_non_exhaustive()
    }
}
