//! Reference values of the continuous Caputo derivative.
//!
//! Power sums use the closed-form power rule. Everything else goes through
//! adaptive Gauss–Kronrod quadrature after the change of variables
//! `η = t − ζ^{1/(1−α)}`, which turns the weakly singular kernel
//! `(t − η)^{−α}` into a constant:
//!
//! ```text
//! ∫_0^t u'(η)(t − η)^{−α} dη = 1/(1−α) · ∫_0^{t^{1−α}} u'(t − ζ^{1/(1−α)}) dζ.
//! ```

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::FractionalOrder;
use crate::{gamma, Error, Result};

/// Relative accuracy requested from the quadrature oracle.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;

const MAX_INTERVALS: usize = 4000;

/// `Σ coef · t^power` with nonnegative powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    terms: Vec<(f64, f64)>,
}

impl PowerSum {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(&(_, p)) = terms.iter().find(|(_, p)| !(*p >= 0.0)) {
            return Err(Error::InvalidProblem(format!("negative power {p} in power sum")));
        }
        Ok(Self { terms })
    }

    pub fn monomial(power: f64) -> Result<Self> {
        Self::new(vec![(1.0, power)])
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| if p == 0.0 { c } else { c * t.powf(p) }).sum()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(_, p)| *p != 0.0)
            .map(|&(c, p)| c * p * t.powf(p - 1.0))
            .sum()
    }
}

/// A scalar function of time whose Caputo derivative we want exactly.
pub enum SmoothFunction {
    Power(PowerSum),
    /// Any function with an analytic first derivative.
    General {
        value: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        derivative: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl SmoothFunction {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            SmoothFunction::Power(ps) => ps.value(t),
            SmoothFunction::General { value, .. } => value(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            SmoothFunction::Power(ps) => ps.derivative(t),
            SmoothFunction::General { derivative, .. } => derivative(t),
        }
    }
}

/// `∂^α t^p = Γ(p+1)/Γ(p+1−α) · t^{p−α}`, summed over the terms; constants
/// contribute nothing.
pub fn caputo_power_rule(order: FractionalOrder, u: &PowerSum, t: f64) -> f64 {
    let alpha = order.alpha();
    u.terms
        .iter()
        .filter(|(_, p)| *p != 0.0)
        .map(|&(c, p)| c * gamma(p + 1.0) / gamma(p + 1.0 - alpha) * t.powf(p - alpha))
        .sum()
}

/// `(1/Γ(1−α)) ∫_0^t u'(η)(t−η)^{−α} dη` by adaptive quadrature.
pub fn caputo_quadrature<F>(order: FractionalOrder, derivative: F, t: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if t == 0.0 {
        return Ok(0.0);
    }
    let p = 1.0 - order.alpha();
    let inv_p = 1.0 / p;
    let integrand = |zeta: f64| derivative(t - zeta.powf(inv_p));
    let integral = adaptive_gauss_kronrod(integrand, 0.0, t.powf(p), rel_tol)?;
    Ok(integral * inv_p / gamma(1.0 - order.alpha()))
}

/// Exact Caputo derivative of `u` at `t`: power rule for power sums,
/// quadrature at [`QUADRATURE_REL_TOL`] otherwise.
pub fn caputo_reference(order: FractionalOrder, u: &SmoothFunction, t: f64) -> Result<f64> {
    match u {
        SmoothFunction::Power(ps) => Ok(caputo_power_rule(order, ps, t)),
        SmoothFunction::General { derivative, .. } => {
            caputo_quadrature(order, derivative, t, QUADRATURE_REL_TOL)
        }
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    Segment { lo, hi, value: kronrod * half, error: ((kronrod - gauss) * half).abs() }
}

fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    let first = gauss_kronrod_15(&f, lo, hi);
    let mut total = first.value;
    let mut total_error = first.error;
    heap.push(first);
    loop {
        if total_error <= rel_tol * total.abs() || total_error <= f64::MIN_POSITIVE {
            break;
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNotConverged { estimate: total_error, intervals: heap.len() });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gauss_kronrod_15(&f, worst.lo, mid);
        let right = gauss_kronrod_15(&f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    Ok(heap.iter().map(|s| s.value).sum())
}
