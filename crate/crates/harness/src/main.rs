use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use rcm_harness::checks::{run_continuous_check, verify, CheckReport, ContinuousCheck, ContinuousParams};
use rcm_harness::{run_experiment, write_csv, write_report, ExperimentConfig, HarnessError, Method, Problem};

#[derive(Parser)]
#[command(name = "rcm", version, about = "Restart-conservative methods: benchmarks and theory checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark family and write one CSV row per iteration.
    Bench {
        /// quadratic, logistic or logsumexp
        problem: Problem,
        /// Add the l1 term and use the composite methods.
        #[arg(long)]
        l1: bool,
        /// Dimension [default: 1000 quadratic, 100 logistic, 50 logsumexp]
        #[arg(long)]
        n: Option<usize>,
        /// Number of data points [default: 500 logistic, 200 logsumexp]
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        /// Base seed; repetition r uses seed + r.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated method names [default: the family's roster]
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Step h of the conservative methods [default: 1/sqrt(L)]
        #[arg(long)]
        h: Option<f64>,
        /// Step s of the gradient, Nesterov and FISTA methods [default: 1/L]
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, default_value = "bench.csv")]
        out: PathBuf,
    },
    /// Check one continuous-time estimate on ½xᵀdiag(λ)x, λ spread over [mu, L].
    Continuous {
        #[arg(value_enum)]
        check: ContinuousCheck,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        lipschitz: f64,
        /// Dimension [default: 1 if mu = L, else 2]
        #[arg(long)]
        n: Option<usize>,
        /// Integrator step [default: 1e-3/sqrt(L)]
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full invariant suite; exits 1 on any violation.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit<T: serde::Serialize + ?Sized>(report: &T, out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => write_report(report, path).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", serde_json::to_string_pretty(report)?),
    }
    Ok(())
}

fn exit_for(reports: &[CheckReport]) -> ExitCode {
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("violation: {}", r.check);
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Bench { problem, l1, n, m, reps, iters, seed, methods, h, s, out } => {
            let mut cfg = ExperimentConfig::new(problem, l1);
            let (dn, dm) = problem.default_size();
            cfg.n = n.unwrap_or(dn);
            cfg.m = m.unwrap_or(dm);
            cfg.reps = reps;
            cfg.max_iter = iters;
            cfg.base_seed = seed;
            cfg.h = h;
            cfg.s = s;
            if let Some(names) = methods {
                cfg.methods = names.iter().map(|s| s.trim().parse::<Method>()).collect::<Result<_, _>>()?;
            }
            let result = run_experiment(&cfg)?;
            write_csv(&result.rows, &out).with_context(|| format!("writing {}", out.display()))?;
            log::info!("wrote {} rows to {}", result.rows.len(), out.display());
            if !result.diverged.is_empty() {
                eprintln!("{} run(s) diverged", result.diverged.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Continuous { check, mu, lipschitz, n, dt, restarts, out } => {
            let params = ContinuousParams { mu, lipschitz, n, dt, restarts };
            let report = run_continuous_check(check, &params)?;
            emit(&report, out.as_ref())?;
            Ok(exit_for(std::slice::from_ref(&report)))
        }
        Command::Verify { out } => {
            let reports = verify()?;
            for r in &reports {
                eprintln!("{} {}", if r.pass { "ok  " } else { "FAIL" }, r.check);
            }
            if let Some(path) = out.as_ref() {
                emit(&reports, Some(path))?;
            }
            Ok(exit_for(&reports))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err.downcast_ref::<HarnessError>().is_some_and(HarnessError::is_usage);
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
