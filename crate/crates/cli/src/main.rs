mod commands;
mod config;
mod output;
mod ranges;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::{Format, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "czeros", version, about = "Certified enclosures for large zeros of cylinder and Airy functions")]
struct Cli {
    /// Working precision in decimal digits (20 to 200).
    #[arg(long, short = 'p', global = true)]
    precision: Option<u32>,
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key = value` file supplying precision, format and threads.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print exact coefficients of the expansions.
    Coeffs(CoeffsArgs),
    /// Enclose one zero between consecutive partial sums.
    Zero(ZeroArgs),
    /// Run a verification sweep and emit a report.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    /// m, t, c or T.
    #[arg(long)]
    pub family: String,
    /// Indices, e.g. `1..4` or `1,3,5`.
    #[arg(long)]
    pub n: String,
    /// Evaluate at this exact order instead of printing polynomials.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
}

#[derive(Args, Debug)]
pub struct ZeroArgs {
    /// cylinder, airy or bi-complex.
    #[arg(long)]
    pub family: String,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long, default_value = "0")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
    /// Number of terms in the partial sum; without it the truncation is chosen as for `--auto`.
    #[arg(long, conflicts_with = "auto")]
    pub terms: Option<usize>,
    /// Truncate near the smallest term.
    #[arg(long)]
    pub auto: bool,
    /// Append the zero computed by the independent root finder.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Subcommand, Debug)]
pub enum Suite {
    /// Error sign and size of the zero expansions against the root finder.
    Envelope {
        /// cylinder or airy.
        #[arg(long, default_value = "cylinder")]
        family: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value = "0")]
        alpha: String,
        #[arg(long, default_value = "1..10")]
        k: String,
        #[arg(long, default_value = "1..5")]
        terms: String,
    },
    /// Remainder bounds of the phase expansion on the real axis.
    Remainder {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value = "1,2,5,10,20", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value = "1..6")]
        terms: String,
    },
    /// Watson and Forster-Petras inequalities for the zeros of J.
    Classical {
        #[arg(long, default_value = "-0.4..0.4:9", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value = "1..50")]
        k: String,
    },
    /// Phase identities for cylinder and Airy functions.
    Identities {
        #[arg(long, default_value = "0.5,1,2,4,8")]
        z: String,
        #[arg(long, default_value = "0,0.25,0.5,0.75")]
        alpha: String,
    },
    /// Coefficients recovered by quadrature of integral representations.
    Quadcheck {
        /// t, c or T.
        #[arg(long)]
        coeff: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value = "1..3")]
        n: String,
        #[arg(long, default_value_t = 1e-12)]
        rel_tol: f64,
        #[arg(long, default_value_t = 40.0)]
        s_max: f64,
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[arg(long, default_value_t = 40)]
        panels: usize,
    },
    /// Sign pattern of McMahon coefficients for orders just beyond one half.
    Conjecture {
        #[arg(long, default_value = "0.55..1.05:11", allow_hyphen_values = true)]
        nu: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let flags = Overrides { precision: cli.precision, format: cli.format, threads: cli.threads, config: cli.config };
    let cfg = RunConfig::from_sources(&flags).map_err(Failure::Usage)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Usage(e.into()))?;
    }
    let (text, code) = match cli.command {
        Command::Coeffs(a) => (commands::coeffs(&a, &cfg)?, 0),
        Command::Zero(a) => (commands::zero(&a, &cfg)?, 0),
        Command::Verify { suite } => commands::verify(&suite, &cfg)?,
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(anyhow::anyhow!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(Failure::Usage(e.into())),
                _ => {}
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("czeros: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
