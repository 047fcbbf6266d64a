use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ofw_core::harness::{
    emit_csv, parse_config, run_experiment, sweep, verify_suite, Algo, BoundModel, ExperimentSpec, Scope,
};
use ofw_core::learners::{Baseline, Ofw};
use ofw_core::Error;

#[derive(Parser)]
#[command(name = "ofw", version, about = "Projection-free online convex optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its per-round CSV trace.
    Run {
        config: PathBuf,
        /// Output path; defaults to the config's `output` key, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment once per horizon and fit the log-log regret slope.
    Sweep {
        config: PathBuf,
        /// Comma-separated horizons.
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048,4096,8192,16384")]
        horizons: Vec<usize>,
        /// Comma-separated seeds; defaults to the config's seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
    /// Print the constants and bound values a config is checked against.
    Bounds { config: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    All,
    Sets,
    Learners,
    Bounds,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Self {
        match s {
            ScopeArg::All => Scope::All,
            ScopeArg::Sets => Scope::Sets,
            ScopeArg::Learners => Scope::Learners,
            ScopeArg::Bounds => Scope::Bounds,
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Sweep {
            config,
            horizons,
            seeds,
            out,
        } => cmd_sweep(&config, &horizons, seeds, out),
        Command::Verify { scope } => cmd_verify(scope.into()),
        Command::Bounds { config } => cmd_bounds(&config),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } | Error::InvalidParameter { .. } => ExitCode::from(EXIT_CONFIG),
                _ => ExitCode::from(EXIT_FAILURE),
            }
        }
    }
}

fn load(path: &Path) -> Result<ExperimentSpec, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => Ok(fs::write(p, text)?),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn cmd_run(config: &Path, out: Option<PathBuf>) -> Result<bool, Error> {
    let spec = load(config)?;
    let trace = run_experiment(&spec)?;
    let out = out.or_else(|| spec.output.clone());
    write_or_print(out.as_deref(), &emit_csv(&trace))?;

    let s = &trace.summary;
    eprintln!("R({}) = {:.6e}", s.horizon, s.final_regret);
    match s.bound {
        Some(b) => eprintln!("bound({}) = {:.6e}", s.horizon, b),
        None => eprintln!("bound: none applies"),
    }
    for v in &trace.violations {
        eprintln!("violation: {} at t={} ({:e} vs limit {:e})", v.check, v.t, v.value, v.limit);
    }
    Ok(trace.passed())
}

fn cmd_sweep(config: &Path, horizons: &[usize], seeds: Vec<u64>, out: Option<PathBuf>) -> Result<bool, Error> {
    let spec = load(config)?;
    let seeds = if seeds.is_empty() { vec![spec.loss.seed] } else { seeds };
    let report = sweep(&spec, horizons, &seeds)?;
    if let Some(p) = &out {
        fs::write(p, report.to_csv())?;
    }
    println!("T,mean_regret,max_elapsed_s");
    for &(t, r) in &report.mean_regret {
        let elapsed = report
            .cells
            .iter()
            .filter(|c| c.horizon == t)
            .map(|c| c.elapsed_secs)
            .fold(0.0, f64::max);
        println!("{t},{r:.16e},{elapsed:.6}");
    }
    match report.slope {
        Some(k) => println!("slope,{k:.6}"),
        None => println!("slope,"),
    }
    for c in report.cells.iter().filter(|c| !c.passed) {
        eprintln!("failed: T={} seed={}", c.horizon, c.seed);
    }
    Ok(report.passed())
}

fn cmd_verify(scope: Scope) -> Result<bool, Error> {
    let report = verify_suite(scope);
    println!("{}", report.to_json());
    for c in report.failed() {
        eprintln!("FAIL {}: {}", c.name, c.counterexample.as_deref().unwrap_or(""));
    }
    Ok(report.passed)
}

fn cmd_bounds(config: &Path) -> Result<bool, Error> {
    let spec = load(config)?;
    let set = spec.feasible_set()?;
    let (g, lambda) = spec.constants()?;
    println!("set = {} (dim {})", set.kind(), set.dim());
    println!("D = {}", set.diameter());
    println!("alpha = {}", set.strong_convexity_modulus());
    println!("G = {g}");
    println!("lambda = {lambda}");
    match spec.algo {
        Algo::OfwLs => println!("eta = {}", Ofw::step_parameter(set.diameter(), g, spec.horizon)),
        Algo::OfwDecay => println!("eta = {}", Baseline::ofw_decay(set.clone(), spec.horizon, g)?.eta()),
        Algo::ScOfw | Algo::Ogd => {}
    }
    match BoundModel::for_spec(&spec) {
        Ok(m) => {
            println!("guarantee = {:?}", m.guarantee);
            println!("C = {}", m.c);
            println!("regret_bound(T={}) = {}", spec.horizon, m.regret(spec.horizon));
            for t in [1, 2, spec.horizon] {
                if let Some(e) = m.gap(t) {
                    println!("gap_bound(t={t}) = {e}");
                }
            }
        }
        Err(Error::NoBound(reason)) => println!("no bound: {reason}"),
        Err(e) => return Err(e),
    }
    Ok(true)
}
