//! Refinement studies: run a table's grid schedule for every order, measure
//! errors, and compute observed convergence orders.

mod emit;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use emit::{emit, OutputFormat, CSV_HEADER};

use crate::caputo::{FractionalOrder, WeightKind};
use crate::grid::convergence_order;
use crate::problems::{named_problem, problem_caputo_monomial, ProblemId};
use crate::schemes::{a_priori_bound, run_compact, run_second_order, Scheme};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
}

impl TableId {
    pub const ALL: [TableId; 7] =
        [TableId::T1, TableId::T2, TableId::T3, TableId::T4, TableId::T5, TableId::T6, TableId::T7];

    pub fn number(&self) -> u8 {
        *self as u8 + 1
    }

    pub fn from_number(n: u8) -> Result<Self> {
        TableId::ALL
            .get((n as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::InvalidPlan(format!("table must be 1..=7, got {n}")))
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.number())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.strip_prefix(['T', 't']).unwrap_or(s);
        let n: u8 = digits.parse().map_err(|_| Error::InvalidPlan(format!("unknown table `{s}`")))?;
        Self::from_number(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    /// `max_j ‖z^j‖` in the discrete `L2` norm.
    L2Max,
    /// Largest nodal error over the space-time grid.
    Sup,
}

/// Which step size the observed order is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    Space,
    Time,
}

/// What a study level runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    /// The discrete Caputo derivative of `t^{4+α}` at `t = 1`.
    CaputoKernel,
    Solver(Scheme),
}

/// One refinement level: `nx` subintervals (unused for the kernel study) and
/// `nt` time steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Level {
    pub nx: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub table: TableId,
    pub workload: Workload,
    pub alphas: Vec<f64>,
    pub levels: Vec<Level>,
    pub norms: Vec<Norm>,
    pub refinement: Refinement,
    pub fast: bool,
}

fn levels(pairs: impl IntoIterator<Item = (usize, usize)>) -> Vec<Level> {
    pairs.into_iter().map(|(nx, nt)| Level { nx, nt }).collect()
}

impl StudyPlan {
    /// The grid schedule of a table. `fast` shortens the fixed-τ study of
    /// table 5 from `τ = 1/20000` to `τ = 1/5000`.
    pub fn for_table(table: TableId, fast: bool) -> Self {
        use Refinement::*;
        let both = vec![Norm::L2Max, Norm::Sup];
        let second = Workload::Solver(Scheme::SecondOrder);
        let compact = Workload::Solver(Scheme::Compact);
        let (workload, alphas, levels, norms, refinement) = match table {
            TableId::T1 => (
                Workload::CaputoKernel,
                vec![0.9, 0.5, 0.1],
                levels((0..10).map(|k| (0, 10 << k))),
                vec![Norm::Sup],
                Time,
            ),
            TableId::T2 => (second, vec![0.1, 0.5, 0.9, 0.99], levels([160, 320, 640].map(|n| (n, n))), both, Space),
            TableId::T3 => (second, vec![0.1, 0.5, 0.9, 0.99], levels([10, 20, 40].map(|m| (1000, m))), both, Time),
            TableId::T4 => (compact, vec![0.75, 0.85, 0.95], levels([10, 20, 40, 80].map(|m| (100, m))), both, Time),
            TableId::T5 => {
                let nt = if fast { 5000 } else { 20000 };
                (compact, vec![0.1, 0.5, 0.9], levels([4, 8, 16, 32].map(|n| (n, nt))), both, Space)
            }
            TableId::T6 => (compact, vec![0.1, 0.5, 0.9], levels([10, 20, 40, 80].map(|n| (n, n * n))), both, Space),
            TableId::T7 => (
                compact,
                vec![0.7, 0.8, 0.9],
                levels((0..6).map(|k| {
                    let m = 10 * 3usize.pow(k);
                    ((m as f64).sqrt().ceil() as usize, m)
                })),
                vec![Norm::Sup],
                Time,
            ),
        };
        Self { table, workload, alphas, levels, norms, refinement, fast }
    }

    /// Checks that the schedule follows the regime of its table.
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.levels.is_empty() {
            return Err(Error::InvalidPlan("plan needs at least one order and one level".into()));
        }
        for &a in &self.alphas {
            FractionalOrder::new(a)?;
        }
        let regime_ok = |pred: &dyn Fn(&Level) -> bool| self.levels.iter().all(pred);
        let first = self.levels[0];
        let ok = match self.table {
            TableId::T1 => regime_ok(&|l| l.nt >= 1),
            TableId::T2 => regime_ok(&|l| l.nx == l.nt),
            TableId::T3 | TableId::T4 => regime_ok(&|l| l.nx == first.nx),
            TableId::T5 => regime_ok(&|l| l.nt == first.nt),
            TableId::T6 => regime_ok(&|l| l.nt == l.nx * l.nx),
            TableId::T7 => regime_ok(&|l| l.nx == (l.nt as f64).sqrt().ceil() as usize),
        };
        if !ok {
            return Err(Error::InvalidPlan(format!("schedule does not follow the regime of table {}", self.table)));
        }
        if let Workload::Solver(_) = self.workload {
            if self.levels.iter().any(|l| l.nx < 2 || l.nt == 0) {
                return Err(Error::InvalidPlan("solver levels need nx >= 2 and nt >= 1".into()));
            }
        }
        Ok(())
    }

    /// The problem a solver study runs.
    pub fn problem(&self) -> Option<ProblemId> {
        match self.workload {
            Workload::CaputoKernel => None,
            Workload::Solver(Scheme::SecondOrder) => Some(ProblemId::VarcoeffSecond),
            Workload::Solver(Scheme::Compact) => Some(ProblemId::TimecoeffCompact),
        }
    }
}

/// One line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub alpha: f64,
    /// 1-based position within the order's block.
    pub level: usize,
    pub nx: usize,
    pub nt: usize,
    pub h: Option<f64>,
    pub tau: f64,
    pub err_l2max: Option<f64>,
    pub co_l2max: Option<f64>,
    pub err_sup: Option<f64>,
    pub co_sup: Option<f64>,
    pub seconds: f64,
    /// Whether the run respected its a priori bound (`None` for the kernel study).
    pub bound_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub table: TableId,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    pub fn empty(table: TableId) -> Self {
        Self { table, rows: Vec::new() }
    }

    pub fn rows_for(&self, alpha: f64) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.alpha == alpha)
    }

    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.bound_holds != Some(false))
    }
}

struct LevelResult {
    h: Option<f64>,
    tau: f64,
    err_l2max: Option<f64>,
    err_sup: Option<f64>,
    seconds: f64,
    bound_holds: Option<bool>,
}

fn run_level(plan: &StudyPlan, alpha: f64, level: Level) -> Result<LevelResult> {
    let order = FractionalOrder::new(alpha)?;
    let started = Instant::now();
    match plan.workload {
        Workload::CaputoKernel => {
            let bundle = problem_caputo_monomial(order);
            let (tau, err) = bundle.error(level.nt, WeightKind::L21Sigma)?;
            Ok(LevelResult {
                h: None,
                tau,
                err_l2max: None,
                err_sup: Some(err),
                seconds: started.elapsed().as_secs_f64(),
                bound_holds: None,
            })
        }
        Workload::Solver(scheme) => {
            let id = plan.problem().expect("solver plans name a problem");
            let problem = named_problem(id, order)?;
            let run = match scheme {
                Scheme::SecondOrder => run_second_order(&problem.spec, order, level.nx, level.nt)?,
                Scheme::Compact => run_compact(&problem.spec, order, level.nx, level.nt)?,
            };
            let seconds = started.elapsed().as_secs_f64();
            let exact = problem.spec.exact.as_ref().expect("registered problems have exact solutions");
            let errors = run.errors(exact.as_ref())?;
            let bound = a_priori_bound(&problem.spec, order, &run);
            let wants = |n| plan.norms.contains(&n);
            Ok(LevelResult {
                h: Some(run.grid.h()),
                tau: run.tau,
                err_l2max: wants(Norm::L2Max).then_some(errors.max_l2),
                err_sup: wants(Norm::Sup).then_some(errors.sup),
                seconds,
                bound_holds: Some(bound.holds()),
            })
        }
    }
}

fn orders(steps: &[f64], errors: &[Option<f64>]) -> Result<Vec<Option<f64>>> {
    let mut out = vec![None; steps.len()];
    for i in 1..steps.len() {
        if let (Some(e0), Some(e1)) = (errors[i - 1], errors[i]) {
            out[i] = Some(convergence_order(&[(steps[i - 1], e0), (steps[i], e1)])?[0]);
        }
    }
    Ok(out)
}

/// Runs every (order, level) pair of a plan and assembles the report in plan
/// order.
///
/// `threads` sizes the worker pool (`None` uses one worker per logical
/// processor). Results do not depend on the thread count apart from the
/// timing column.
pub fn run_study(plan: &StudyPlan, threads: Option<usize>) -> Result<ConvergenceReport> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    let jobs: Vec<(f64, usize, Level)> = plan
        .alphas
        .iter()
        .flat_map(|&a| plan.levels.iter().enumerate().map(move |(i, &l)| (a, i, l)))
        .collect();
    // Largest jobs first keeps the pool busy until the end.
    let mut schedule: Vec<usize> = (0..jobs.len()).collect();
    schedule.sort_by_key(|&i| std::cmp::Reverse(jobs[i].2.nt.pow(2) * jobs[i].2.nx.max(1)));
    let mut results: Vec<(usize, Result<LevelResult>)> = pool.install(|| {
        schedule
            .par_iter()
            .map(|&i| {
                let (alpha, index, level) = jobs[i];
                let result = run_level(plan, alpha, level).map_err(|e| {
                    e.context(format!("table {} alpha {alpha} level {}", plan.table, index + 1))
                });
                (i, result)
            })
            .collect()
    });
    results.sort_by_key(|(i, _)| *i);

    let mut rows = Vec::with_capacity(jobs.len());
    let per_alpha = plan.levels.len();
    let mut results = results.into_iter().map(|(_, r)| r);
    for &alpha in &plan.alphas {
        let block: Vec<LevelResult> = results.by_ref().take(per_alpha).collect::<Result<_>>()?;
        let steps: Vec<f64> = block
            .iter()
            .map(|r| match plan.refinement {
                Refinement::Space => r.h.unwrap_or(r.tau),
                Refinement::Time => r.tau,
            })
            .collect();
        let co_l2 = orders(&steps, &block.iter().map(|r| r.err_l2max).collect::<Vec<_>>())?;
        let co_sup = orders(&steps, &block.iter().map(|r| r.err_sup).collect::<Vec<_>>())?;
        for (i, r) in block.into_iter().enumerate() {
            let level = plan.levels[i];
            rows.push(ReportRow {
                alpha,
                level: i + 1,
                nx: level.nx,
                nt: level.nt,
                h: r.h,
                tau: r.tau,
                err_l2max: r.err_l2max,
                co_l2max: co_l2[i],
                err_sup: r.err_sup,
                co_sup: co_sup[i],
                seconds: r.seconds,
                bound_holds: r.bound_holds,
            });
        }
    }
    Ok(ConvergenceReport { table: plan.table, rows })
}
