use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use gkz_core::error::GkzError;
use gkz_core::pipeline::{run_analyze, run_subcommand, PipelineError, ProblemSpec, RationalText};

/// Exact rank certification for GKZ hypergeometric systems.
#[derive(Parser)]
#[command(name = "gkz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    spec: PathBuf,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated fiber coefficients, overriding the file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    fiber: Option<Vec<String>>,
    /// Comma-separated gamma entries, overriding the file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline and emit a rank report.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Leave out the timings field.
        #[arg(long)]
        no_timings: bool,
    },
    /// Normalized volume of the Newton polytope.
    Volume(Common),
    /// Face lattice, f-vector and the sets I_p.
    Faces(Common),
    /// Face-by-face nondegeneracy certificate.
    Nondegenerate(Common),
    /// Koszul cohomology of the graded semigroup ring.
    Koszul(Common),
    /// Top twisted de Rham cohomology and connection matrices.
    Derham(Common),
    /// Euler and box operators.
    GkzOps(Common),
    /// Poincaré series identity for the top Koszul cohomology.
    Poincare(Common),
    /// Facial complex and its exactness up to a weight bound.
    FaceComplex {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weight_bound: Option<i64>,
    },
}

fn load(common: &Common) -> Result<ProblemSpec, PipelineError> {
    let stage = |error| PipelineError { stage: "parse", error };
    let text = std::fs::read_to_string(&common.spec)
        .map_err(|e| stage(GkzError::InvalidInput(format!("{}: {e}", common.spec.display()))))?;
    let mut spec = ProblemSpec::from_json(&text).map_err(stage)?;
    let texts = |v: &[String]| v.iter().map(|s| RationalText::Text(s.clone())).collect();
    if let Some(f) = &common.fiber {
        spec.fiber = Some(texts(f));
    }
    if let Some(g) = &common.gamma {
        spec.gamma = Some(texts(g));
    }
    Ok(spec)
}

fn emit(value: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n";
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(Value, i32, Option<PathBuf>), (PipelineError, Option<PathBuf>)> {
    let (name, common, timings, weight_bound) = match cli.command {
        Command::Analyze { common, no_timings } => ("analyze", common, !no_timings, None),
        Command::Volume(c) => ("volume", c, false, None),
        Command::Faces(c) => ("faces", c, false, None),
        Command::Nondegenerate(c) => ("nondegenerate", c, false, None),
        Command::Koszul(c) => ("koszul", c, false, None),
        Command::Derham(c) => ("derham", c, false, None),
        Command::GkzOps(c) => ("gkz-ops", c, false, None),
        Command::Poincare(c) => ("poincare", c, false, None),
        Command::FaceComplex { common, weight_bound } => ("face-complex", common, false, weight_bound),
    };
    let out = common.out.clone();
    let fail = |e| (e, out.clone());
    let mut spec = load(&common).map_err(fail)?;
    if weight_bound.is_some() {
        spec.options.weight_bound = weight_bound;
    }
    if name == "analyze" {
        let report = run_analyze(spec, timings).map_err(fail)?;
        let code = report.exit_code();
        let value = serde_json::to_value(&report).expect("report serializes");
        Ok((value, code, out))
    } else {
        let r = run_subcommand(name, spec).map_err(fail)?;
        Ok((r.value, r.exit_code, out))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = match e.kind() {
                ErrorKind::InvalidSubcommand => {
                    let name = std::env::args().nth(1).unwrap_or_default();
                    GkzError::UnknownSubcommand(name)
                }
                _ => GkzError::InvalidInput(e.to_string().trim().to_string()),
            };
            eprintln!("{}", e.to_string().trim());
            let _ = emit(&PipelineError { stage: "arguments", error: err }.to_json(), None);
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok((value, code, out)) => {
            if let Err(e) = emit(&value, out.as_deref()) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code as u8)
        }
        Err((e, out)) => {
            eprintln!("error: {e}");
            let _ = emit(&e.to_json(), out.as_deref());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
