use super::{ProblemSpec, Run, Scheme, WeightProvider};
use crate::caputo::FractionalOrder;
use crate::gamma;
use crate::grid::l2_norm_sq_values;

/// Relative slack allowed on the energy inequalities for rounding.
pub const ENERGY_SLACK: f64 = 1e-12;

/// Lower bound of `−Λ` on grid functions vanishing at both ends: `4 c1 / l²`.
pub fn coercivity(c1: f64, length: f64) -> f64 {
    4.0 * c1 / (length * length)
}

/// Result of checking the weight conditions of the generic stability
/// estimate over a range of steps.
///
/// The conditions are `g_j > g_{j−1} > … > g_0 ≥ c2 > 0` and
/// `g_j / (2 g_j − g_{j−1}) ≤ σ_{j+1} ≤ 1` (with `g_{−1} = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub steps: usize,
    /// Smallest `g_{s+1} − g_s` over every step (`+∞` if only one weight).
    pub worst_increase: f64,
    /// Smallest `g_0` over every step; the witnessed `c2`.
    pub floor: f64,
    /// Smallest `min(σ − g_j/(2g_j − g_{j−1}), 1 − σ)` over every step.
    pub worst_sigma_margin: f64,
    /// First step violating any condition.
    pub first_failure: Option<usize>,
    pub kappa: f64,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    /// `‖y^0‖² + max‖φ‖² / (2 κ c2)`.
    pub fn bound(&self, initial_sq: f64, max_source_sq: f64) -> f64 {
        initial_sq + max_source_sq / (2.0 * self.kappa * self.floor)
    }
}

/// Checks the weight conditions for the steps `j = 0..steps`.
pub fn check_stability_conditions<P: WeightProvider + ?Sized>(provider: &P, steps: usize, kappa: f64) -> StabilityReport {
    let mut report = StabilityReport {
        steps,
        worst_increase: f64::INFINITY,
        floor: f64::INFINITY,
        worst_sigma_margin: f64::INFINITY,
        first_failure: None,
        kappa,
    };
    for j in 0..steps {
        let g = provider.weights(j);
        let sigma = provider.sigma(j);
        let increase = g.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let previous = if j == 0 { 0.0 } else { g[j - 1] };
        let lower = g[j] / (2.0 * g[j] - previous);
        let sigma_margin = (sigma - lower).min(1.0 - sigma);
        report.worst_increase = report.worst_increase.min(increase);
        report.floor = report.floor.min(g[0]);
        report.worst_sigma_margin = report.worst_sigma_margin.min(sigma_margin);
        let ok = increase > 0.0 && g[0] > 0.0 && sigma_margin >= 0.0;
        if !ok && report.first_failure.is_none() {
            report.first_failure = Some(j);
        }
    }
    report
}

/// Margins of the three energy inequalities for one step; each should be
/// nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMargins {
    pub step: usize,
    /// `v^{j+1} D − ½ D(v²) − D² / (2 g_j)`.
    pub newest: f64,
    /// `v^j D − ½ D(v²) + D² / (2 (g_j − g_{j−1}))`.
    pub previous: f64,
    /// `(σ v^{j+1} + (1 − σ) v^j) D − ½ D(v²)`.
    pub blended: f64,
    /// Size of the largest term entering any margin, for relative slack.
    pub magnitude: f64,
}

impl EnergyMargins {
    pub fn holds(&self, slack: f64) -> bool {
        let tol = -slack * self.magnitude;
        self.newest >= tol && self.previous >= tol && self.blended >= tol
    }
}

/// Evaluates the energy inequalities of a scalar series `v^0, v^1, …` for
/// every step `j` with `v^{j+1}` available. `D` is the discrete derivative
/// `Σ g_s (v^{s+1} − v^s)`.
pub fn energy_inequality_probe<P: WeightProvider + ?Sized>(provider: &P, series: &[f64]) -> Vec<EnergyMargins> {
    (0..series.len().saturating_sub(1))
        .map(|j| {
            let g = provider.weights(j);
            let sigma = provider.sigma(j);
            let (mut d, mut d_sq) = (0.0, 0.0);
            for s in 0..=j {
                let (a, b) = (series[s], series[s + 1]);
                d += g[s] * (b - a);
                d_sq += g[s] * (b * b - a * a);
            }
            let (new, old) = (series[j + 1], series[j]);
            let gap = g[j] - if j == 0 { 0.0 } else { g[j - 1] };
            let pieces = [
                new * d,
                old * d,
                0.5 * d_sq,
                d * d / (2.0 * g[j]),
                d * d / (2.0 * gap),
                (sigma * new + (1.0 - sigma) * old) * d,
            ];
            EnergyMargins {
                step: j,
                newest: pieces[0] - pieces[2] - pieces[3],
                previous: pieces[1] - pieces[2] + pieces[4],
                blended: pieces[5] - pieces[2],
                magnitude: pieces.iter().fold(0.0_f64, |m, p| m.max(p.abs())),
            }
        })
        .collect()
}

/// Observed norms of a run against its a priori bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AprioriProbe {
    /// `‖y^j‖²` (second order) or `‖H_h y^j‖²` (compact) for every layer.
    pub observed: Vec<f64>,
    pub bound: f64,
}

impl AprioriProbe {
    pub fn holds(&self) -> bool {
        let limit = self.bound * (1.0 + 1e-12);
        self.observed.iter().all(|&v| v <= limit)
    }

    /// `max_j observed_j / bound` (0 for a zero bound with zero data).
    pub fn worst_ratio(&self) -> f64 {
        let peak = self.observed.iter().copied().fold(0.0, f64::max);
        if peak == 0.0 {
            0.0
        } else {
            peak / self.bound
        }
    }
}

/// Evaluates the a priori estimate of the L2-1σ schemes on a finished run.
///
/// Second order: `‖y^j‖² ≤ ‖y^0‖² + l² T^α Γ(1−α) / (4 c1) · max‖φ‖²`.
/// Compact: `‖H y^j‖² ≤ ‖H y^0‖² + l² T^α Γ(1−α) / c1 · max‖H φ‖²`.
pub fn a_priori_bound(problem: &ProblemSpec, order: FractionalOrder, run: &Run) -> AprioriProbe {
    let h = run.grid.h();
    let norm_sq = |values: &[f64]| match run.scheme {
        Scheme::SecondOrder => l2_norm_sq_values(values, h),
        Scheme::Compact => {
            let mut hv = vec![0.0; values.len()];
            hv[1..values.len() - 1].copy_from_slice(&super::apply_mass_operator(values));
            l2_norm_sq_values(&hv, h)
        }
    };
    let observed: Vec<f64> = run.history.iter().map(|l| norm_sq(&l.values)).collect();
    let alpha = order.alpha();
    let base = problem.length.powi(2) * run.horizon().powf(alpha) * gamma(1.0 - alpha) / problem.c1;
    let constant = match run.scheme {
        Scheme::SecondOrder => base / 4.0,
        Scheme::Compact => base,
    };
    let max_source = run.source_norms_sq.iter().copied().fold(0.0, f64::max);
    AprioriProbe { bound: observed[0] + constant * max_source, observed }
}
