use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use operad_lab::cli::{parse_mode, run_compose, run_dims, run_verify, summary, Bounds, CliError, Config, TheoremId};

#[derive(Parser)]
#[command(name = "operad-lab", version, about = "Exact homology checks for deformation and twisted complexes of the pre-Lie operad")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone, Copy, Default)]
struct BoundArgs {
    #[arg(long)]
    max_arity: Option<usize>,
    #[arg(long)]
    max_weight: Option<usize>,
    #[arg(long)]
    max_alphas: Option<usize>,
}

impl From<BoundArgs> for Bounds {
    fn from(b: BoundArgs) -> Bounds {
        Bounds { max_arity: b.max_arity, max_weight: b.max_weight, max_alphas: b.max_alphas }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one theorem check and print (or write) its JSON report.
    Verify {
        theorem: String,
        #[command(flatten)]
        bounds: BoundArgs,
        /// exact or modular
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dimension tables of a complex or operad.
    Dims {
        #[arg(required = true)]
        ids: Vec<String>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Evaluate `<tree> o_<i> <tree>` in the pre-Lie operad.
    Compose { expr: String },
}

fn config() -> Result<Config, CliError> {
    match std::env::var_os("OPERAD_LAB_CONFIG") {
        Some(p) => Config::load(p.as_ref()),
        None => Ok(Config::default()),
    }
}

fn run(args: Args) -> Result<i32, CliError> {
    match args.cmd {
        Cmd::Verify { theorem, bounds, mode, out } => {
            let cfg = config()?;
            let theorem: TheoremId = theorem.parse()?;
            let mode = mode.as_deref().map(parse_mode).transpose()?;
            let job = cfg.job(theorem, bounds.into(), mode);
            let start = Instant::now();
            let report = run_verify(&job)?;
            let json = report.to_json();
            match out.or_else(|| cfg.out.map(PathBuf::from)) {
                Some(path) => std::fs::write(path, &json)?,
                None => print!("{json}"),
            }
            eprintln!("{} {} {:?} in {:.2?}", theorem, report.verdict, summary(&report), start.elapsed());
            for f in report.failures() {
                eprintln!("  {f}");
            }
            Ok(report.exit_code())
        }
        Cmd::Dims { ids, bounds } => {
            for id in ids {
                for (grade, dim) in run_dims(&id, bounds.into())? {
                    println!("{id}\t{grade}\t{dim}");
                }
            }
            Ok(0)
        }
        Cmd::Compose { expr } => {
            let start = Instant::now();
            println!("{}", run_compose(&expr)?);
            eprintln!("{:.2?}", start.elapsed());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
