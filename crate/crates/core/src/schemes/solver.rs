use std::fmt;
use std::str::FromStr;

use super::{L21SigmaProvider, ProblemSpec, WeightProvider};
use crate::caputo::FractionalOrder;
use crate::grid::{l2_norm_sq_values, GridLayer, SolutionHistory, SpaceGrid};
use crate::tridiag::solve_in_place;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Three-point flux operator, `O(τ² + h²)`.
    SecondOrder,
    /// Averaged operator for time-only coefficients, `O(τ² + h⁴)`.
    Compact,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::SecondOrder => "second",
            Scheme::Compact => "compact",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "second" => Ok(Scheme::SecondOrder),
            "compact" => Ok(Scheme::Compact),
            other => Err(Error::SchemeMismatch(format!("unknown scheme `{other}` (expected second|compact)"))),
        }
    }
}

/// A completed simulation.
#[derive(Debug, Clone)]
pub struct Run {
    pub scheme: Scheme,
    pub grid: SpaceGrid,
    pub tau: f64,
    pub history: SolutionHistory,
    /// Squared discrete norm of the source actually used in each step:
    /// `‖φ‖²` for the second-order scheme, `‖H_h φ‖²` for the compact one.
    pub source_norms_sq: Vec<f64>,
    /// Smallest diagonal-dominance margin seen over all rows and steps.
    pub min_dominance_margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `max_j ‖u(t_j) − y^j‖`.
    pub max_l2: f64,
    /// Largest nodal error over all layers.
    pub sup: f64,
}

impl Run {
    pub fn steps(&self) -> usize {
        self.history.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.tau * self.steps() as f64
    }

    /// Pointwise error `u(x_i, t_j) − y_i^j` on every layer.
    pub fn error_history(&self, exact: &dyn Fn(f64, f64) -> f64) -> SolutionHistory {
        let mut errors = SolutionHistory::new();
        for layer in self.history.iter() {
            let values = (0..self.grid.nodes())
                .map(|i| exact(self.grid.x(i), layer.time) - layer.values[i])
                .collect();
            errors.push(GridLayer::new(values, layer.time));
        }
        errors
    }

    pub fn errors(&self, exact: &dyn Fn(f64, f64) -> f64) -> Result<ErrorNorms> {
        let errors = self.error_history(exact);
        let max_l2 = errors
            .iter()
            .map(|l| l2_norm_sq_values(&l.values, self.grid.h()).sqrt())
            .fold(0.0, f64::max);
        Ok(ErrorNorms { max_l2, sup: crate::grid::max_norm(&errors)? })
    }
}

/// `(a y_x̄)_x − d y` at the interior nodes.
///
/// `a[i]` is the flux coefficient at `x_{i−1/2}` for `i = 1..=N` (`a[0]` is
/// unused); `d` and `y` hold all `N + 1` nodes.
pub fn apply_flux_operator(a: &[f64], d: &[f64], y: &[f64], h: f64) -> Vec<f64> {
    let h2 = h * h;
    (1..y.len() - 1)
        .map(|i| (a[i + 1] * (y[i + 1] - y[i]) - a[i] * (y[i] - y[i - 1])) / h2 - d[i] * y[i])
        .collect()
}

/// `H_h v = (v_{i−1} + 10 v_i + v_{i+1}) / 12` at the interior nodes.
pub fn apply_mass_operator(v: &[f64]) -> Vec<f64> {
    (1..v.len() - 1).map(|i| mass(v, i)).collect()
}

#[inline]
fn mass(v: &[f64], i: usize) -> f64 {
    (v[i - 1] + 10.0 * v[i] + v[i + 1]) / 12.0
}

struct Workspace {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
    /// Node-indexed scratch (flux coefficients or source values).
    nodal: Vec<f64>,
    /// History sum padded with zero boundary values.
    padded: Vec<f64>,
}

impl Workspace {
    fn new(grid: &SpaceGrid) -> Self {
        let n = grid.interior();
        Self {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
            scratch: vec![0.0; n],
            nodal: vec![0.0; grid.nodes()],
            padded: vec![0.0; grid.nodes()],
        }
    }
}

struct StepData<'a> {
    step: usize,
    prev: &'a [f64],
    /// `Σ_{s<j} g_s (y^{s+1} − y^s)` at interior nodes.
    history: &'a [f64],
    g_last: f64,
    sigma: f64,
    time: f64,
}

/// Assembles and solves one step; returns the new interior values and the
/// squared norm of the source term used.
fn advance(problem: &ProblemSpec, grid: &SpaceGrid, scheme: Scheme, data: &StepData, ws: &mut Workspace) -> Result<f64> {
    match scheme {
        Scheme::SecondOrder => assemble_second_order(problem, grid, data, ws)?,
        Scheme::Compact => assemble_compact(problem, grid, data, ws)?,
    };
    let source_sq = ws.scratch.iter().map(|v| v * v).sum::<f64>() * grid.h();
    solve_in_place(&ws.sub, &ws.diag, &ws.sup, &mut ws.rhs, &mut ws.scratch)?;
    Ok(source_sq)
}

fn check_dominance(step: usize, row: usize, margin: f64) -> Result<()> {
    if margin > 0.0 {
        Ok(())
    } else {
        Err(Error::LostDominance { step, row, margin })
    }
}

// Both assemblers leave the per-row source values in `ws.scratch`.
fn assemble_second_order(problem: &ProblemSpec, grid: &SpaceGrid, d: &StepData, ws: &mut Workspace) -> Result<()> {
    let (h2, t, s, g) = (grid.h() * grid.h(), d.time, d.sigma, d.g_last);
    let y = d.prev;
    for i in 1..grid.nodes() {
        ws.nodal[i] = (problem.k)(grid.x_half(i), t);
    }
    let a = &ws.nodal;
    for r in 0..grid.interior() {
        let i = r + 1;
        let x = grid.x(i);
        let (al, ar) = (a[i], a[i + 1]);
        let q = (problem.q)(x, t);
        let phi = (problem.f)(x, t);
        let lambda = (ar * (y[i + 1] - y[i]) - al * (y[i] - y[i - 1])) / h2 - q * y[i];
        ws.sub[r] = -s * al / h2;
        ws.sup[r] = -s * ar / h2;
        ws.diag[r] = g + s * ((al + ar) / h2 + q);
        check_dominance(d.step, r, ws.diag[r] - ws.sub[r].abs() - ws.sup[r].abs())?;
        ws.rhs[r] = g * y[i] - d.history[r] + (1.0 - s) * lambda + phi;
        ws.scratch[r] = phi;
    }
    Ok(())
}

fn assemble_compact(problem: &ProblemSpec, grid: &SpaceGrid, d: &StepData, ws: &mut Workspace) -> Result<()> {
    let (h2, t, s, g) = (grid.h() * grid.h(), d.time, d.sigma, d.g_last);
    let y = d.prev;
    let a = (problem.k)(0.0, t);
    let q = (problem.q)(0.0, t);
    let mu = g + s * q;
    let diag = 10.0 * mu / 12.0 + 2.0 * s * a / h2;
    let off = mu / 12.0 - s * a / h2;
    check_dominance(d.step, 0, diag - 2.0 * off.abs())?;
    for i in 0..grid.nodes() {
        ws.nodal[i] = (problem.f)(grid.x(i), t);
    }
    ws.padded[1..grid.nodes() - 1].copy_from_slice(d.history);
    for r in 0..grid.interior() {
        let i = r + 1;
        let my = mass(y, i);
        let yxx = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / h2;
        let hphi = mass(&ws.nodal, i);
        ws.sub[r] = off;
        ws.sup[r] = off;
        ws.diag[r] = diag;
        ws.rhs[r] = g * my - mass(&ws.padded, i) + (1.0 - s) * (a * yxx - q * my) + hphi;
        ws.scratch[r] = hphi;
    }
    Ok(())
}

fn check_scheme(problem: &ProblemSpec, scheme: Scheme) -> Result<()> {
    if scheme == Scheme::Compact && !problem.time_only_coefficients {
        return Err(Error::SchemeMismatch(
            "compact scheme requires k=k(t) and q=q(t)".into(),
        ));
    }
    Ok(())
}

fn initial_layer(problem: &ProblemSpec, grid: &SpaceGrid) -> GridLayer {
    let mut values = grid.sample(|x| (problem.u0)(x));
    values[0] = 0.0;
    values[grid.intervals()] = 0.0;
    GridLayer::new(values, 0.0)
}

/// Runs `steps` steps of a weighted scheme from the problem's initial data.
///
/// The history sum is accumulated in ascending `s`, so runs are
/// bit-reproducible and agree exactly with repeated single steps.
pub fn simulate<P: WeightProvider + ?Sized>(
    problem: &ProblemSpec,
    provider: &P,
    grid: SpaceGrid,
    steps: usize,
    scheme: Scheme,
) -> Result<Run> {
    problem.validate()?;
    check_scheme(problem, scheme)?;
    let tau = provider.tau();
    let n = grid.interior();
    let mut history = SolutionHistory::with_initial(initial_layer(problem, &grid));
    let mut increments: Vec<f64> = Vec::with_capacity(steps * n);
    let mut sum = vec![0.0; n];
    let mut source_norms_sq = Vec::with_capacity(steps);
    let mut ws = Workspace::new(&grid);
    let mut min_margin = f64::INFINITY;

    for j in 0..steps {
        let g = provider.weights(j);
        sum.fill(0.0);
        for (s, inc) in increments.chunks_exact(n).enumerate() {
            let gs = g[s];
            for (acc, v) in sum.iter_mut().zip(inc) {
                *acc += gs * v;
            }
        }
        let prev = &history.layer(j).values;
        let data = StepData {
            step: j,
            prev,
            history: &sum,
            g_last: g[j],
            sigma: provider.sigma(j),
            time: provider.collocation_time(j),
        };
        source_norms_sq.push(advance(problem, &grid, scheme, &data, &mut ws)?);
        min_margin = min_margin.min(row_margin(&ws));

        let mut values = vec![0.0; grid.nodes()];
        values[1..=n].copy_from_slice(&ws.rhs);
        increments.extend((1..=n).map(|i| values[i] - prev[i]));
        history.push(GridLayer::new(values, (j + 1) as f64 * tau));
    }

    Ok(Run { scheme, grid, tau, history, source_norms_sq, min_dominance_margin: min_margin })
}

fn row_margin(ws: &Workspace) -> f64 {
    (0..ws.diag.len())
        .map(|r| ws.diag[r] - ws.sub[r].abs() - ws.sup[r].abs())
        .fold(f64::INFINITY, f64::min)
}

fn step_from_history<P: WeightProvider + ?Sized>(
    problem: &ProblemSpec,
    provider: &P,
    grid: &SpaceGrid,
    history: &SolutionHistory,
    scheme: Scheme,
) -> Result<GridLayer> {
    check_scheme(problem, scheme)?;
    let last = history.last().ok_or(Error::EmptyHistory)?;
    if last.len() != grid.nodes() {
        return Err(Error::LengthMismatch { expected: grid.nodes(), actual: last.len() });
    }
    let j = history.len() - 1;
    let n = grid.interior();
    let g = provider.weights(j);
    let mut sum = vec![0.0; n];
    for s in 0..j {
        let (old, new) = (&history.layer(s).values, &history.layer(s + 1).values);
        for r in 0..n {
            sum[r] += g[s] * (new[r + 1] - old[r + 1]);
        }
    }
    let data = StepData {
        step: j,
        prev: &last.values,
        history: &sum,
        g_last: g[j],
        sigma: provider.sigma(j),
        time: provider.collocation_time(j),
    };
    let mut ws = Workspace::new(grid);
    advance(problem, grid, scheme, &data, &mut ws)?;
    let mut values = vec![0.0; grid.nodes()];
    values[1..=n].copy_from_slice(&ws.rhs);
    Ok(GridLayer::new(values, (j + 1) as f64 * provider.tau()))
}

/// Computes the next layer of the second-order scheme from a history.
pub fn step_second_order<P: WeightProvider + ?Sized>(
    problem: &ProblemSpec,
    provider: &P,
    grid: &SpaceGrid,
    history: &SolutionHistory,
) -> Result<GridLayer> {
    step_from_history(problem, provider, grid, history, Scheme::SecondOrder)
}

/// Computes the next layer of the compact scheme from a history.
pub fn step_compact<P: WeightProvider + ?Sized>(
    problem: &ProblemSpec,
    provider: &P,
    grid: &SpaceGrid,
    history: &SolutionHistory,
) -> Result<GridLayer> {
    step_from_history(problem, provider, grid, history, Scheme::Compact)
}

fn run_l21sigma(problem: &ProblemSpec, order: FractionalOrder, nx: usize, nt: usize, scheme: Scheme) -> Result<Run> {
    if nt == 0 {
        return Err(Error::InvalidGrid("need at least one time step".into()));
    }
    let grid = SpaceGrid::new(problem.length, nx)?;
    let tau = problem.horizon / nt as f64;
    let provider = L21SigmaProvider::new(order, tau, nt);
    simulate(problem, &provider, grid, nt, scheme)
}

/// L2-1σ second-order scheme on `nx` subintervals and `nt` steps.
pub fn run_second_order(problem: &ProblemSpec, order: FractionalOrder, nx: usize, nt: usize) -> Result<Run> {
    run_l21sigma(problem, order, nx, nt, Scheme::SecondOrder)
}

/// L2-1σ compact scheme on `nx` subintervals and `nt` steps.
pub fn run_compact(problem: &ProblemSpec, order: FractionalOrder, nx: usize, nt: usize) -> Result<Run> {
    run_l21sigma(problem, order, nx, nt, Scheme::Compact)
}
