use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tfde::caputo::{audit_sweep, audit_weights, weights_l1, FractionalOrder, WeightKind};
use tfde::grid::convergence_order;
use tfde::harness::{emit, run_study, OutputFormat, StudyPlan, TableId};
use tfde::problems::{named_problem, problem_caputo_monomial, ProblemId};
use tfde::schemes::{
    a_priori_bound, check_stability_conditions, coercivity, run_compact, run_second_order, L1Provider,
    L21SigmaProvider, Scheme, StabilityReport,
};

#[derive(Parser)]
#[command(name = "tfde", version, about = "Finite difference schemes for the time-fractional diffusion equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the Caputo derivative of t^(4+α) at t = 1 and report errors.
    Caputo {
        /// Fractional order in (0, 1).
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        /// Number of time steps; a comma-separated list prints observed orders.
        #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(2..))]
        m: Vec<u64>,
        /// Discretization of the fractional derivative.
        #[arg(long, value_enum, default_value_t = Formula::L21sigma)]
        formula: Formula,
        /// Test function.
        #[arg(long, value_enum, default_value_t = Function::Monomial)]
        function: Function,
    },
    /// Solve a registered test problem and print its errors.
    Solve {
        /// Problem id: varcoeff-2nd or timecoeff-compact.
        #[arg(long, value_parser = parse_problem)]
        problem: ProblemId,
        /// Fractional order in (0, 1).
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        /// Number of spatial subintervals.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        nx: u64,
        /// Number of time steps.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nt: u64,
        /// Spatial discretization.
        #[arg(long, value_enum, default_value_t = SchemeArg::Second)]
        scheme: SchemeArg,
        /// Write the final layer as `x,value` CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce one of the convergence tables.
    Study {
        /// Table number, 1 to 7.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        table: u8,
        /// Use τ = 1/5000 instead of 1/20000 for table 5.
        #[arg(long)]
        fast: bool,
        /// Output format.
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: one per logical processor).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
    },
    /// Check the weight inequalities behind the stability estimates.
    Audit {
        /// Fractional order in (0, 1).
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        /// Largest target index to audit.
        #[arg(long, default_value_t = 1000)]
        jmax: usize,
        /// Weight family.
        #[arg(long, value_enum, default_value_t = Formula::L21sigma)]
        weights: Formula,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    L21sigma,
    L1,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    Monomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Second,
    Compact,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let alpha: f64 = s.parse().map_err(|e| format!("{e}"))?;
    FractionalOrder::new(alpha).map(|o| o.alpha()).map_err(|e| e.to_string())
}

fn parse_problem(s: &str) -> Result<ProblemId, String> {
    s.parse().map_err(|e: tfde::Error| {
        let known: Vec<&str> = ProblemId::ALL.iter().map(ProblemId::name).collect();
        format!("{e} (known: {})", known.join(", "))
    })
}

/// Command failures: computation errors or failed checks.
type CmdResult = Result<bool, tfde::Error>;

fn caputo(alpha: f64, ms: &[u64], formula: Formula) -> CmdResult {
    let bundle = problem_caputo_monomial(FractionalOrder::new(alpha)?);
    let kind = match formula {
        Formula::L21sigma => WeightKind::L21Sigma,
        Formula::L1 => WeightKind::L1,
    };
    println!("exact {:.10e}", bundle.exact);
    let mut previous: Option<(f64, f64)> = None;
    for &m in ms {
        let (tau, err) = bundle.error(m as usize, kind)?;
        match previous {
            Some(p) if p.0 > tau => {
                let co = convergence_order(&[p, (tau, err)])?[0];
                println!("M={m} tau={tau:.6e} E={err:.6e} CO={co:.2}");
            }
            _ => println!("M={m} tau={tau:.6e} E={err:.6e}"),
        }
        previous = Some((tau, err));
    }
    Ok(true)
}

fn solve(problem: ProblemId, alpha: f64, nx: usize, nt: usize, scheme: SchemeArg, out: Option<PathBuf>) -> CmdResult {
    let order = FractionalOrder::new(alpha)?;
    let named = named_problem(problem, order)?;
    let scheme = match scheme {
        SchemeArg::Second => Scheme::SecondOrder,
        SchemeArg::Compact => Scheme::Compact,
    };
    let run = match scheme {
        Scheme::SecondOrder => run_second_order(&named.spec, order, nx, nt)?,
        Scheme::Compact => run_compact(&named.spec, order, nx, nt)?,
    };
    let bound = a_priori_bound(&named.spec, order, &run);
    if let Some(exact) = &named.spec.exact {
        let e = run.errors(exact.as_ref())?;
        println!("max_l2 {:.4e}", e.max_l2);
        println!("sup {:.4e}", e.sup);
    }
    println!("a priori bound {} (ratio {:.3e})", if bound.holds() { "holds" } else { "VIOLATED" }, bound.worst_ratio());
    if let Some(path) = out {
        let last = run.history.last().expect("history has the initial layer");
        let mut csv = String::from("x,value\n");
        for (i, v) in last.values.iter().enumerate() {
            csv.push_str(&format!("{},{:.16e}\n", run.grid.x(i), v));
        }
        write_output(&path, &csv)?;
    }
    Ok(bound.holds())
}

fn study(table: u8, fast: bool, format: Format, out: Option<PathBuf>, threads: Option<u64>) -> CmdResult {
    let plan = StudyPlan::for_table(TableId::from_number(table)?, fast);
    let report = run_study(&plan, threads.map(|t| t as usize))?;
    let format = match format {
        Format::Csv => OutputFormat::Csv,
        Format::Markdown => OutputFormat::Markdown,
    };
    let text = emit(&report, format);
    match out {
        Some(path) => write_output(&path, &text)?,
        None => print!("{text}"),
    }
    if !report.bounds_hold() {
        eprintln!("a priori bound violated in at least one run");
    }
    Ok(report.bounds_hold())
}

fn print_stability(report: &StabilityReport) {
    let status = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "{status}  {:<18} worst increase {:.6e}, floor {:.6e}, worst sigma margin {:.6e}",
        "stability", report.worst_increase, report.floor, report.worst_sigma_margin
    );
}

fn audit(alpha: f64, jmax: usize, formula: Formula) -> CmdResult {
    let order = FractionalOrder::new(alpha)?;
    let kappa = coercivity(1.0, 1.0);
    let (audit, stability) = match formula {
        Formula::L21sigma => {
            let provider = L21SigmaProvider::new(order, 1.0, jmax + 1);
            (audit_sweep(order, jmax), check_stability_conditions(&provider, jmax + 1, kappa))
        }
        Formula::L1 => {
            let provider = L1Provider::new(order, 1.0, jmax + 1);
            (audit_weights(&weights_l1(order, jmax, 1.0)), check_stability_conditions(&provider, jmax + 1, kappa))
        }
    };
    print!("{audit}");
    print_stability(&stability);
    Ok(audit.passed() && stability.passed())
}

fn write_output(path: &PathBuf, text: &str) -> Result<(), tfde::Error> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| tfde::Error::InvalidPlan(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Caputo { alpha, m, formula, function: Function::Monomial } => caputo(alpha, &m, formula),
        Command::Solve { problem, alpha, nx, nt, scheme, out } => {
            solve(problem, alpha, nx as usize, nt as usize, scheme, out)
        }
        Command::Study { table, fast, format, out, threads } => study(table, fast, format, out, threads),
        Command::Audit { alpha, jmax, weights } => audit(alpha, jmax, weights),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
