//! Discrete Caputo derivatives on uniform time meshes.
//!
//! The L2-1σ operator approximates `∂^α u` at the shifted node
//! `t_{j+σ} = (j + σ)τ`, `σ = 1 − α/2`, as
//!
//! ```text
//! Δ^α u = τ^{−α} / Γ(2−α) · Σ_{s=0}^{j} c_{j−s} (u^{s+1} − u^s)
//! ```
//!
//! with weights `c_s` built from the sequences `a_l` and `b_l` below. The L1
//! operator has the same shape, evaluated at `t_{j+1}`.

mod audit;
mod reference;

pub use audit::{audit_sweep, audit_weights, AuditCheck, WeightAudit};
pub use reference::{
    caputo_power_rule, caputo_quadrature, caputo_reference, PowerSum, SmoothFunction,
    QUADRATURE_REL_TOL,
};

use crate::{gamma, Error, Result};

/// Caputo order `α ∈ (0, 1)` together with the collocation shift `σ = 1 − α/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    sigma: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidOrder(alpha));
        }
        Ok(Self { alpha, sigma: 1.0 - 0.5 * alpha })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `τ^{−α} / Γ(2−α)`, the factor turning weighted first differences into
    /// the derivative approximation.
    pub fn scale(&self, tau: f64) -> f64 {
        tau.powf(-self.alpha) / gamma(2.0 - self.alpha)
    }
}

/// Uniform time mesh `t_s = s·τ`, `s = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    steps: usize,
    tau: f64,
    horizon: f64,
}

impl TimeGrid {
    /// `steps` equal steps covering `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "time grid needs steps >= 1 and a positive horizon (steps={steps}, T={horizon})"
            )));
        }
        Ok(Self { steps, tau: horizon / steps as f64, horizon })
    }

    /// The mesh with `τ = 1/(M − 1 + σ)`, so that the collocation point of the
    /// last step, `t_{M−1+σ}`, is exactly 1.
    pub fn unit_collocation(order: FractionalOrder, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidGrid("time grid needs at least one step".into()));
        }
        let tau = 1.0 / (steps as f64 - 1.0 + order.sigma());
        Ok(Self { steps, tau, horizon: 1.0 })
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The time the grid is built to reach: `τ·M` for uniform grids, `1` for
    /// the unit-collocation grid.
    #[inline]
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    #[inline]
    pub fn time(&self, s: usize) -> f64 {
        s as f64 * self.tau
    }

    /// `t_{j+σ}`.
    #[inline]
    pub fn shifted_time(&self, j: usize, sigma: f64) -> f64 {
        (j as f64 + sigma) * self.tau
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|s| self.time(s)).collect()
    }
}

/// `(x + 1)^p − x^p` for `x > 0`, evaluated without cancellation.
#[inline]
pub(crate) fn forward_power_difference(x: f64, p: f64) -> f64 {
    x.powf(p) * (p * (1.0 / x).ln_1p()).exp_m1()
}

/// `a_0 = σ^{1−α}`, `a_l = (l+σ)^{1−α} − (l−1+σ)^{1−α}` for `l ≥ 1`.
pub fn coeff_a(order: FractionalOrder, l: usize) -> f64 {
    let p = 1.0 - order.alpha;
    if l == 0 {
        order.sigma.powf(p)
    } else {
        forward_power_difference(l as f64 - 1.0 + order.sigma, p)
    }
}

/// `b_l = [(l+σ)^{2−α} − (l−1+σ)^{2−α}]/(2−α) − [(l+σ)^{1−α} + (l−1+σ)^{1−α}]/2`,
/// `l ≥ 1`.
///
/// `b_l` is the trapezoid-rule defect of `∫ y^{1−α} dy` over `[l−1+σ, l+σ]`,
/// roughly `α(1−α)/12 · l^{−1−α}`, so the two brackets above cancel to about
/// `2·log10(l)` digits when evaluated as written. Expanding `y^p`, `p = 1−α`,
/// about the midpoint `m = l − 1/2 + σ` instead gives
///
/// ```text
/// b_l = m^p · Σ_{k≥1} C(p, 2k) (2m)^{−2k} · (−2k/(2k+1)),
/// ```
///
/// whose terms are all positive and shrink by at least `1/(2m)^2 ≤ 1/4`.
///
/// # Panics
///
/// If `l == 0`.
pub fn coeff_b(order: FractionalOrder, l: usize) -> f64 {
    assert!(l >= 1, "b_l is defined for l >= 1");
    let p = 1.0 - order.alpha;
    let m = l as f64 - 0.5 + order.sigma;
    let r = 0.5 / m;
    // binom_pow = C(p, n) r^n
    let mut binom_pow = p * r;
    let mut sum = 0.0;
    let mut n = 1.0;
    loop {
        n += 1.0;
        binom_pow *= (p - n + 1.0) / n * r;
        let even_term = binom_pow * (-n / (n + 1.0));
        sum += even_term;
        if even_term <= 0.25 * f64::EPSILON * sum || n > 400.0 {
            break;
        }
        n += 1.0;
        binom_pow *= (p - n + 1.0) / n * r;
    }
    m.powf(p) * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    L21Sigma,
    L1,
}

/// Convolution weights of one discrete Caputo evaluation.
///
/// `coefficients[k]` multiplies the increment `u^{j+1−k} − u^{j−k}`; the
/// most recent increment comes first.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub kind: WeightKind,
    pub order: FractionalOrder,
    pub target_index: usize,
    pub coefficients: Vec<f64>,
    pub scale: f64,
}

impl WeightVector {
    /// Wraps arbitrary coefficients, e.g. to audit a hand-built vector.
    pub fn from_raw(
        kind: WeightKind,
        order: FractionalOrder,
        coefficients: Vec<f64>,
        scale: f64,
    ) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::LengthMismatch { expected: 1, actual: 0 });
        }
        Ok(Self { kind, order, target_index: coefficients.len() - 1, coefficients, scale })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `g_s = scale · c_{j−s}`, ordered by increment index `s = 0..=j`.
    pub fn increment_weights(&self) -> Vec<f64> {
        self.coefficients.iter().rev().map(|c| self.scale * c).collect()
    }
}

/// L2-1σ weights `c_0..c_j` for the evaluation at `t_{j+σ}`.
pub fn weights(order: FractionalOrder, j: usize, tau: f64) -> WeightVector {
    let coefficients = if j == 0 {
        vec![coeff_a(order, 0)]
    } else {
        let mut c = Vec::with_capacity(j + 1);
        c.push(coeff_a(order, 0) + coeff_b(order, 1));
        for s in 1..j {
            c.push(coeff_a(order, s) + coeff_b(order, s + 1) - coeff_b(order, s));
        }
        c.push(coeff_a(order, j) - coeff_b(order, j));
        c
    };
    WeightVector {
        kind: WeightKind::L21Sigma,
        order,
        target_index: j,
        coefficients,
        scale: order.scale(tau),
    }
}

/// Uniform-mesh L1 weights for the evaluation at `t_{j+1}`:
/// `c_k = (k+1)^{1−α} − k^{1−α}`.
pub fn weights_l1(order: FractionalOrder, j: usize, tau: f64) -> WeightVector {
    let p = 1.0 - order.alpha;
    let coefficients = (0..=j).map(|k| l1_coefficient(p, k)).collect();
    WeightVector { kind: WeightKind::L1, order, target_index: j, coefficients, scale: order.scale(tau) }
}

#[inline]
fn l1_coefficient(p: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        forward_power_difference(k as f64, p)
    }
}

/// Applies a weight vector to samples `u^0..u^{j+1}`.
pub fn apply(weights: &WeightVector, series: &[f64]) -> Result<f64> {
    let j = weights.target_index;
    if series.len() != j + 2 {
        return Err(Error::LengthMismatch { expected: j + 2, actual: series.len() });
    }
    let mut acc = 0.0;
    for s in 0..=j {
        acc += weights.coefficients[j - s] * (series[s + 1] - series[s]);
    }
    Ok(weights.scale * acc)
}

/// Cached `a_l`, `b_l` for one order.
///
/// Only `c_0` (through `j = 0` vs `j ≥ 1`) and the tail `c_j` depend on the
/// target index; interior weights are shared between all `j`. Vectors built
/// here are bit-identical to [`weights`].
#[derive(Debug, Clone)]
pub struct L21SigmaTable {
    order: FractionalOrder,
    a: Vec<f64>,
    // b[0] is unused padding so that b[l] = b_l.
    b: Vec<f64>,
}

impl L21SigmaTable {
    pub fn new(order: FractionalOrder, max_index: usize) -> Self {
        let a = (0..=max_index).map(|l| coeff_a(order, l)).collect();
        let b = std::iter::once(0.0).chain((1..=max_index + 1).map(|l| coeff_b(order, l))).collect();
        Self { order, a, b }
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// Largest `j` servable without recomputation.
    pub fn max_index(&self) -> usize {
        self.a.len() - 1
    }

    #[inline]
    pub fn a(&self, l: usize) -> f64 {
        self.a[l]
    }

    #[inline]
    pub fn b(&self, l: usize) -> f64 {
        self.b[l]
    }

    /// `c_s` of the vector with target index `j`.
    #[inline]
    pub fn coefficient(&self, j: usize, s: usize) -> f64 {
        debug_assert!(s <= j && j <= self.max_index());
        if j == 0 {
            self.a[0]
        } else if s == 0 {
            self.a[0] + self.b[1]
        } else if s < j {
            self.a[s] + self.b[s + 1] - self.b[s]
        } else {
            self.a[j] - self.b[j]
        }
    }

    pub fn coefficients(&self, j: usize) -> Vec<f64> {
        if j > self.max_index() {
            return weights(self.order, j, 1.0).coefficients;
        }
        (0..=j).map(|s| self.coefficient(j, s)).collect()
    }

    pub fn weights(&self, j: usize, tau: f64) -> WeightVector {
        WeightVector {
            kind: WeightKind::L21Sigma,
            order: self.order,
            target_index: j,
            coefficients: self.coefficients(j),
            scale: self.order.scale(tau),
        }
    }
}

/// Cached L1 coefficients `c_k`, `k = 0..=max_index`.
#[derive(Debug, Clone)]
pub struct L1Table {
    order: FractionalOrder,
    c: Vec<f64>,
}

impl L1Table {
    pub fn new(order: FractionalOrder, max_index: usize) -> Self {
        let p = 1.0 - order.alpha;
        Self { order, c: (0..=max_index).map(|k| l1_coefficient(p, k)).collect() }
    }

    pub fn max_index(&self) -> usize {
        self.c.len() - 1
    }

    #[inline]
    pub fn coefficient(&self, k: usize) -> f64 {
        self.c[k]
    }

    pub fn weights(&self, j: usize, tau: f64) -> WeightVector {
        if j > self.max_index() {
            return weights_l1(self.order, j, tau);
        }
        WeightVector {
            kind: WeightKind::L1,
            order: self.order,
            target_index: j,
            coefficients: self.c[..=j].to_vec(),
            scale: self.order.scale(tau),
        }
    }
}
