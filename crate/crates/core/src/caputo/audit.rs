//! Executable checks of the L2-1σ weight inequalities.
//!
//! Every check records its worst (smallest) margin; a check passes when that
//! margin is strictly positive. Checks with nothing to compare are vacuous
//! and pass.

use std::fmt;

use super::{coeff_a, coeff_b, FractionalOrder, L21SigmaTable, WeightKind, WeightVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub name: &'static str,
    /// `None` when the check is vacuous.
    pub worst_margin: Option<f64>,
    /// Index at which the worst margin occurred.
    pub worst_index: Option<usize>,
}

impl AuditCheck {
    fn new(name: &'static str) -> Self {
        Self { name, worst_margin: None, worst_index: None }
    }

    fn observe(&mut self, margin: f64, index: usize) {
        // NaN margins count as failures.
        let worse = match self.worst_margin {
            None => true,
            Some(w) => margin < w || margin.is_nan(),
        };
        if worse && !self.worst_margin.is_some_and(f64::is_nan) {
            self.worst_margin = Some(margin);
            self.worst_index = Some(index);
        }
    }

    pub fn passed(&self) -> bool {
        self.worst_margin.map_or(true, |m| m > 0.0)
    }

    pub fn is_vacuous(&self) -> bool {
        self.worst_margin.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightAudit {
    pub checks: Vec<AuditCheck>,
}

impl WeightAudit {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AuditCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Smallest margin over all non-vacuous checks.
    pub fn worst_margin(&self) -> Option<f64> {
        self.checks.iter().filter_map(|c| c.worst_margin).reduce(f64::min)
    }
}

impl fmt::Display for WeightAudit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            match (c.worst_margin, c.worst_index) {
                (Some(m), Some(i)) => {
                    writeln!(f, "{status}  {:<18} worst margin {m:.6e} at index {i}", c.name)?
                }
                _ => writeln!(f, "{status}  {:<18} vacuous", c.name)?,
            }
        }
        Ok(())
    }
}

pub const POSITIVITY: &str = "positivity";
pub const MONOTONE: &str = "monotone";
pub const TAIL_LOWER_BOUND: &str = "tail-lower-bound";
pub const GATE: &str = "gate";
pub const B_POSITIVE: &str = "b-positive";
pub const KAPPA_LOWER: &str = "kappa-lower";
pub const KAPPA_UPPER: &str = "kappa-upper";

fn tail_bound(order: FractionalOrder, j: usize) -> f64 {
    0.5 * (1.0 - order.alpha()) * (j as f64 + order.sigma()).powf(-order.alpha())
}

fn gate(order: FractionalOrder, c0: f64, c1: f64) -> f64 {
    let s = order.sigma();
    (2.0 * s - 1.0) * c0 - s * c1
}

/// `κ_s = 1/2 + b_s/a_s` bounds and `b_s > 0` for `s = 1..=s_max`.
fn kappa_checks(order: FractionalOrder, s_max: usize, a: impl Fn(usize) -> f64, b: impl Fn(usize) -> f64) -> [AuditCheck; 3] {
    let mut b_pos = AuditCheck::new(B_POSITIVE);
    let mut lower = AuditCheck::new(KAPPA_LOWER);
    let mut upper = AuditCheck::new(KAPPA_UPPER);
    let upper_limit = 1.0 / (2.0 - order.alpha());
    for s in 1..=s_max {
        let (a_s, b_s) = (a(s), b(s));
        let kappa = 0.5 + b_s / a_s;
        b_pos.observe(b_s, s);
        lower.observe(kappa - 0.5, s);
        upper.observe(upper_limit - kappa, s);
    }
    [b_pos, lower, upper]
}

/// Audits one weight vector.
///
/// All kinds get positivity and strict decrease `c_0 > c_1 > … > c_j`. L2-1σ
/// vectors additionally get the tail bound `c_j > (1−α)/2·(j+σ)^{−α}`, the
/// gate `(2σ−1)c_0 − σc_1 > 0` (both for `j ≥ 1`), and the `κ_s`/`b_s`
/// bounds for `s = 1..=j`, recomputed from `a_s`, `b_s` of the vector's
/// order rather than read from the coefficients.
pub fn audit_weights(weights: &WeightVector) -> WeightAudit {
    let c = &weights.coefficients;
    let j = weights.target_index;
    let order = weights.order;

    let mut positivity = AuditCheck::new(POSITIVITY);
    for (s, &cs) in c.iter().enumerate() {
        positivity.observe(cs, s);
    }
    let mut monotone = AuditCheck::new(MONOTONE);
    for s in 0..c.len().saturating_sub(1) {
        monotone.observe(c[s] - c[s + 1], s);
    }
    let mut checks = vec![positivity, monotone];

    if weights.kind == WeightKind::L21Sigma {
        let mut tail = AuditCheck::new(TAIL_LOWER_BOUND);
        let mut gate_check = AuditCheck::new(GATE);
        if j >= 1 {
            tail.observe(c[j] - tail_bound(order, j), j);
            gate_check.observe(gate(order, c[0], c[1]), j);
        }
        checks.push(tail);
        checks.push(gate_check);
        checks.extend(kappa_checks(order, j, |s| coeff_a(order, s), |s| coeff_b(order, s)));
    }
    WeightAudit { checks }
}

/// Audits the L2-1σ vectors of every target index `j = 0..=j_max` in
/// `O(j_max)`.
///
/// Interior weights `c_s`, `1 ≤ s ≤ j−1`, do not depend on `j`, so the
/// union of all vectors consists of the shared interior sequence, the two
/// possible leading weights and the per-`j` tails. The result equals the
/// elementwise worst case of [`audit_weights`] over all those vectors.
pub fn audit_sweep(order: FractionalOrder, j_max: usize) -> WeightAudit {
    let table = L21SigmaTable::new(order, j_max.max(1));
    let c = |j: usize, s: usize| table.coefficient(j, s);

    let mut positivity = AuditCheck::new(POSITIVITY);
    let mut monotone = AuditCheck::new(MONOTONE);
    let mut tail = AuditCheck::new(TAIL_LOWER_BOUND);
    let mut gate_check = AuditCheck::new(GATE);

    positivity.observe(c(0, 0), 0);
    if j_max >= 1 {
        positivity.observe(c(j_max, 0), 0);
    }
    for s in 1..j_max {
        positivity.observe(c(j_max, s), s);
    }
    for j in 1..=j_max {
        positivity.observe(c(j, j), j);
        monotone.observe(c(j, j - 1) - c(j, j), j - 1);
        tail.observe(c(j, j) - tail_bound(order, j), j);
    }
    // Pairs with both members off the tail are shared by all j > s + 1.
    for s in 0..j_max.saturating_sub(1) {
        monotone.observe(c(j_max, s) - c(j_max, s + 1), s);
    }
    if j_max >= 1 {
        gate_check.observe(gate(order, c(1, 0), c(1, 1)), 1);
    }
    if j_max >= 2 {
        gate_check.observe(gate(order, c(j_max, 0), c(j_max, 1)), 2);
    }

    let mut checks = vec![positivity, monotone, tail, gate_check];
    checks.extend(kappa_checks(order, j_max, |s| table.a(s), |s| table.b(s)));
    WeightAudit { checks }
}
