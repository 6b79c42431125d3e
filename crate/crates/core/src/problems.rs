//! Manufactured test problems with known exact solutions.
//!
//! Each PDE problem has a separable exact solution `u = X(x)·P(t)` with a
//! polynomial time factor, which lets [`NamedProblem::residual`] check the
//! stored source against an independently computed Caputo derivative.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::caputo::{
    caputo_quadrature, weights, weights_l1, FractionalOrder, PowerSum, TimeGrid, WeightKind, QUADRATURE_REL_TOL,
};
use crate::schemes::{ProblemSpec, ProfileFn, SpaceTimeFn};
use crate::{gamma, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// Scalar `u(t) = t^{4+α}` for the Caputo approximation study.
    CaputoMonomial,
    /// Variable `k(x,t)`, `q(x,t)`; second-order scheme only.
    VarcoeffSecond,
    /// `k = e^t`, `q = 1 − sin 2t`; suitable for the compact scheme.
    TimecoeffCompact,
}

impl ProblemId {
    pub const ALL: [ProblemId; 3] = [ProblemId::CaputoMonomial, ProblemId::VarcoeffSecond, ProblemId::TimecoeffCompact];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemId::CaputoMonomial => "caputo-monomial",
            ProblemId::VarcoeffSecond => "varcoeff-2nd",
            ProblemId::TimecoeffCompact => "timecoeff-compact",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// `u(t) = t^{4+α}` with its exact Caputo derivative at `t = 1`.
#[derive(Debug, Clone)]
pub struct MonomialBundle {
    pub order: FractionalOrder,
    pub function: PowerSum,
    /// `Γ(5+α)/24`.
    pub exact: f64,
}

impl MonomialBundle {
    /// The grid on which step `M` of the given formula lands on `t = 1`:
    /// `τ = 1/(M−1+σ)` for L2-1σ, `τ = 1/M` for L1.
    pub fn grid(&self, m: usize, kind: WeightKind) -> Result<TimeGrid> {
        match kind {
            WeightKind::L21Sigma => TimeGrid::unit_collocation(self.order, m),
            WeightKind::L1 => TimeGrid::uniform(1.0, m),
        }
    }

    /// Discrete derivative at `t = 1` from `M` steps.
    pub fn approximate(&self, m: usize, kind: WeightKind) -> Result<f64> {
        let grid = self.grid(m, kind)?;
        let j = m - 1;
        let w = match kind {
            WeightKind::L21Sigma => weights(self.order, j, grid.tau()),
            WeightKind::L1 => weights_l1(self.order, j, grid.tau()),
        };
        let samples: Vec<f64> = (0..=m).map(|s| self.function.value(grid.time(s))).collect();
        crate::caputo::apply(&w, &samples)
    }

    /// `|approximate − exact|` and the step size used.
    pub fn error(&self, m: usize, kind: WeightKind) -> Result<(f64, f64)> {
        let tau = self.grid(m, kind)?.tau();
        Ok((tau, (self.approximate(m, kind)? - self.exact).abs()))
    }
}

pub fn problem_caputo_monomial(order: FractionalOrder) -> MonomialBundle {
    let alpha = order.alpha();
    MonomialBundle {
        order,
        function: PowerSum::monomial(4.0 + alpha).expect("positive power"),
        exact: gamma(5.0 + alpha) / 24.0,
    }
}

/// Analytic pieces of a separable exact solution, kept apart from the
/// closures of [`ProblemSpec`] for residual checks.
#[derive(Clone)]
pub struct Manufactured {
    /// `X`, `X'`, `X''`.
    pub space: [ProfileFn; 3],
    pub time: PowerSum,
    /// `∂k/∂x`.
    pub k_x: SpaceTimeFn,
}

#[derive(Clone)]
pub struct NamedProblem {
    pub id: ProblemId,
    pub order: FractionalOrder,
    pub spec: ProblemSpec,
    pub notes: &'static str,
    pub manufactured: Manufactured,
}

impl fmt::Debug for NamedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NamedProblem")
            .field("id", &self.id)
            .field("alpha", &self.order.alpha())
            .field("spec", &self.spec)
            .finish_non_exhaustive()
    }
}

impl NamedProblem {
    /// `∂^α u − ∂x(k ∂x u) + q u − f` at `(x, t)`, with the time derivative
    /// from adaptive quadrature.
    pub fn residual(&self, x: f64, t: f64) -> Result<f64> {
        let m = &self.manufactured;
        let [xs, dxs, d2xs] = &m.space;
        let p = m.time.value(t);
        let cap = caputo_quadrature(self.order, |s| m.time.derivative(s), t, QUADRATURE_REL_TOL)?;
        let k = (self.spec.k)(x, t);
        let flux = ((m.k_x)(x, t) * dxs(x) + k * d2xs(x)) * p;
        let q = (self.spec.q)(x, t);
        Ok(xs(x) * cap - flux + q * xs(x) * p - (self.spec.f)(x, t))
    }
}

/// Looks up a PDE problem by id; the scalar monomial has no [`ProblemSpec`].
pub fn named_problem(id: ProblemId, order: FractionalOrder) -> Result<NamedProblem> {
    match id {
        ProblemId::VarcoeffSecond => Ok(problem_varcoeff_2nd(order)),
        ProblemId::TimecoeffCompact => Ok(problem_timecoeff_compact(order)),
        ProblemId::CaputoMonomial => Err(Error::SchemeMismatch(
            "caputo-monomial is a scalar test function, not a boundary value problem".into(),
        )),
    }
}

fn sine_profile() -> [ProfileFn; 3] {
    [
        Arc::new(|x| (PI * x).sin()),
        Arc::new(|x| PI * (PI * x).cos()),
        Arc::new(|x| -PI * PI * (PI * x).sin()),
    ]
}

/// `u = sin(πx)(t³ + 3t² + 1)`, `k = 2 − sin(xt)`, `q = 1 − cos(xt)` on the
/// unit square; `f` follows from substituting `u` into the equation.
pub fn problem_varcoeff_2nd(order: FractionalOrder) -> NamedProblem {
    let alpha = order.alpha();
    let (g4, g3) = (gamma(4.0 - alpha), gamma(3.0 - alpha));
    let g = |t: f64| t * t * t + 3.0 * t * t + 1.0;
    let source = move |x: f64, t: f64| {
        let caputo = 6.0 * t.powf(3.0 - alpha) / g4 + 6.0 * t.powf(2.0 - alpha) / g3;
        let (s, c) = ((PI * x).sin(), (PI * x).cos());
        let flux = t * (x * t).cos() * PI * c + (2.0 - (x * t).sin()) * PI * PI * s;
        s * caputo + flux * g(t) + (1.0 - (x * t).cos()) * s * g(t)
    };
    let spec = ProblemSpec::new(1.0, 1.0)
        .with_conductivity(1.0, |x, t| 2.0 - (x * t).sin())
        .with_absorption(|x, t| 1.0 - (x * t).cos())
        .with_source(source)
        .with_initial(|x| (PI * x).sin())
        .with_exact(move |x, t| (PI * x).sin() * g(t));
    NamedProblem {
        id: ProblemId::VarcoeffSecond,
        order,
        spec,
        notes: "u = sin(pi x)(t^3 + 3t^2 + 1), k = 2 - sin(xt), q = 1 - cos(xt); f manufactured from u",
        manufactured: Manufactured {
            space: sine_profile(),
            time: PowerSum::new(vec![(1.0, 3.0), (3.0, 2.0), (1.0, 0.0)]).expect("nonnegative powers"),
            k_x: Arc::new(|x, t| -t * (x * t).cos()),
        },
    }
}

/// `u = t² sin(πx)`, `k = e^t`, `q = 1 − sin 2t` on the unit square, zero
/// initial data.
pub fn problem_timecoeff_compact(order: FractionalOrder) -> NamedProblem {
    let alpha = order.alpha();
    let g3 = gamma(3.0 - alpha);
    let source = move |x: f64, t: f64| {
        let t2 = t * t;
        (PI * PI * t2 * t.exp() + t2 * (1.0 - (2.0 * t).sin()) + 2.0 * t.powf(2.0 - alpha) / g3) * (PI * x).sin()
    };
    let spec = ProblemSpec::new(1.0, 1.0)
        .with_time_conductivity(1.0, f64::exp)
        .with_time_absorption(|t| 1.0 - (2.0 * t).sin())
        .with_source(source)
        .with_exact(|x, t| t * t * (PI * x).sin());
    NamedProblem {
        id: ProblemId::TimecoeffCompact,
        order,
        spec,
        notes: "u = t^2 sin(pi x), k = e^t, q = 1 - sin 2t",
        manufactured: Manufactured {
            space: sine_profile(),
            time: PowerSum::monomial(2.0).expect("nonnegative power"),
            k_x: Arc::new(|_, _| 0.0),
        },
    }
}
