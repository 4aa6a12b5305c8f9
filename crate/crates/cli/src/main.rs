//! Command line front end. Results go to stdout as JSON (or a flat table);
//! diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 failed self-check or internal error, 2 invalid
//! input, 3 insufficient precision.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, OutputFormat};

#[derive(Parser, Debug)]
#[command(name = "dieudonne", version, about = "Witt vectors, Dieudonne modules and isocrystal slopes")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON config file with default_precision, field_table, threads, output.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Field table replacing the builtin one.
    #[arg(long, global = true, env = "DIEUDONNE_FIELD_TABLE")]
    field_table: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    output: Option<OutputFormat>,
}

/// Polynomial given inline or as a JSON file.
#[derive(Args, Debug)]
struct PolyInput {
    /// Surface syntax, e.g. "F^2 - (1+p)*F + p".
    #[arg(long, conflicts_with = "poly_json")]
    poly: Option<String>,
    /// JSON file {"ring", "coeffs"}; "-" reads stdin.
    #[arg(long)]
    poly_json: Option<String>,
    #[arg(short = 'p', long = "prime")]
    prime: Option<u64>,
    /// Residue degree of the coefficient ring.
    #[arg(short = 'm', long, default_value_t = 1)]
    degree: usize,
    /// Witt precision; defaults to the configured precision.
    #[arg(short = 'n', long)]
    precision: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Slope sequence of a polynomial (Newton polygon) or of an F-lattice.
    Slopes {
        /// JSON module file {"ring", "h", "A"}.
        #[arg(long)]
        matrix: Option<String>,
        #[command(flatten)]
        poly: PolyInput,
    },
    /// Isoclinic decomposition of a monic twisted polynomial.
    Decompose {
        #[command(flatten)]
        poly: PolyInput,
        /// Largest residue degree for splitting blocks into linear factors.
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        /// Stop after the isoclinic blocks.
        #[arg(long)]
        no_split: bool,
    },
    /// a-number of a Dieudonne module.
    ANumber {
        #[arg(long)]
        module: String,
    },
    /// Dual module.
    Dual {
        #[arg(long)]
        module: String,
    },
    /// Rank-two classification (M1 or M2).
    ClassifyRank2 {
        #[arg(long)]
        module: String,
    },
    /// First-order deformation and tangent Frobenius.
    Deform {
        /// {"ring", "g", "h", "A"} or {"ring", "superspecial": g}.
        #[arg(long)]
        base: String,
        /// {"universal": true} or {"d": [[..]]}.
        #[arg(long)]
        d: String,
    },
    /// Classify a degree-p quotient of E_0^2 by its parameter.
    ClassifySurface {
        #[arg(short = 'p', long = "prime")]
        prime: u64,
        /// "(a:b)" with entries n, g^k or [c0,..], or "generic".
        #[arg(short = 't', long)]
        t: String,
        /// Degree of the field the coordinates live in.
        #[arg(short = 'm', long, default_value_t = 4)]
        degree: usize,
        /// Also build the lattice M_t and report its a-number.
        #[arg(long)]
        lattice: bool,
        #[arg(short = 'n', long)]
        precision: Option<u32>,
    },
    /// GL_2(F_{p^2}) orbits on P^1(F_{p^4}).
    MobiusCheck {
        #[arg(short = 'p', long = "prime")]
        prime: u64,
    },
    /// The locus where Lambda_X is a singleton.
    YLocus {
        #[arg(short = 'p', long = "prime")]
        prime: u64,
    },
    /// Census of supersingular j-invariants.
    CountSs {
        #[arg(short = 'p', long = "prime")]
        prime: u64,
        #[arg(long)]
        compare_formulas: bool,
    },
    /// Invariant of End(N^lambda) for lambda = s/r.
    Invariant {
        /// "s/r" with r > 0 and gcd(s, r) = 1.
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
    },
    /// Witt oracle comparison and the randomized slope cross-check.
    SelfCheck {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match Config::load(&cli.global) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    match commands::run(&cli.command, &config) {
        Ok(out) => {
            let text = match config.output {
                OutputFormat::Json => serde_json::to_string(&out.value).expect("serializable"),
                OutputFormat::Table => config::render_table(&out.value),
            };
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &commands::CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code())
}
