use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mixdil::cli;

#[derive(Parser)]
#[command(
    name = "mixdil",
    about = "Framelet filter banks with mixed dilation factors: transforms, verification, frame bounds, cascade rendering",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check perfect reconstruction and related properties of a bank
    Verify(VerifyArgs),
    /// Multi-level analysis/synthesis on array files
    Transform(TransformArgs),
    /// Emit a composed filter or affine-system element as CSV
    Das(DasArgs),
    /// Frame-bound sweep on a periodic space
    Stability(StabilityArgs),
    /// Cascade rendering, Gram sequence, and Riesz bounds
    Refine(RefineArgs),
    /// Redundancy rate of the J-level transform
    Redundancy(RedundancyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Builtin bank name or descriptor path
    bank: String,
    /// Also run the frequency-side checker
    #[arg(long)]
    fourier: bool,
    /// Tolerance for the frequency-side checker
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Extra ξ-grid resolution for the frequency-side checker (0 = Laurent only)
    #[arg(long, default_value_t = 0)]
    grid: usize,
    /// Also check biorthogonality
    #[arg(long)]
    bi: bool,
    /// Also report the critical-sampling ratio
    #[arg(long)]
    critical: bool,
    /// Machine-readable output
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TransformArgs {
    /// `analyze` or `synthesize`
    direction: String,
    #[arg(long)]
    bank: String,
    /// Input array (analyze) or manifest path (synthesize)
    #[arg(long)]
    input: PathBuf,
    /// Output directory (analyze) or array path (synthesize)
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    /// Treat the input as periodic with this period (comma separated)
    #[arg(long, value_delimiter = ',')]
    periodic: Option<Vec<i64>>,
    /// Use 1-D CSV instead of MDF1 for the signal file
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct DasArgs {
    #[arg(long)]
    bank: String,
    #[arg(long)]
    channel: usize,
    #[arg(long)]
    level: usize,
    /// Emit the normalized shifted element instead of the composed filter
    #[arg(long, value_delimiter = ',')]
    shift: Option<Vec<i64>>,
    /// Use the dual filters
    #[arg(long)]
    dual: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    bank: String,
    /// Sweep J = 1..=levels
    #[arg(long)]
    levels: usize,
    #[arg(long, value_delimiter = ',')]
    period: Vec<i64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RefineArgs {
    #[arg(long)]
    bank: String,
    /// Grid level n of the cascade rendering
    #[arg(long)]
    iters: usize,
    /// Max Gram lag
    #[arg(long, default_value_t = 4)]
    gram: i64,
    /// ξ-grid size for the Riesz bound estimate
    #[arg(long, default_value_t = 64)]
    bounds: usize,
    /// Output file prefix
    #[arg(long)]
    output: String,
}

#[derive(Args)]
struct RedundancyArgs {
    #[arg(long)]
    bank: String,
    #[arg(long)]
    levels: usize,
    #[arg(long, value_delimiter = ',')]
    period: Option<Vec<i64>>,
}

fn run(cmd: Command) -> mixdil::Result<i32> {
    match cmd {
        Command::Verify(a) => cli::cmd_verify(&cli::VerifyOpts {
            bank: a.bank,
            fourier: a.fourier,
            tol: a.tol,
            bi: a.bi,
            critical: a.critical,
            grid: a.grid,
            json: a.json,
        }),
        Command::Transform(a) => {
            let analyze = match a.direction.as_str() {
                "analyze" => true,
                "synthesize" => false,
                other => {
                    return Err(mixdil::Error::InvalidArgument(format!(
                        "direction must be `analyze` or `synthesize`, got `{other}`"
                    )))
                }
            };
            cli::cmd_transform(&cli::TransformOpts {
                analyze,
                bank: a.bank,
                input: a.input,
                output: a.output,
                levels: a.levels,
                periodic: a.periodic,
                csv: a.csv,
            })
        }
        Command::Das(a) => cli::cmd_das(&cli::DasOpts {
            bank: a.bank,
            channel: a.channel,
            level: a.level,
            shift: a.shift,
            dual: a.dual,
            output: a.output,
        }),
        Command::Stability(a) => cli::cmd_stability(&cli::StabilityOpts {
            bank: a.bank,
            levels: a.levels,
            period: a.period,
            json: a.json,
        }),
        Command::Refine(a) => cli::cmd_refine(&cli::RefineOpts {
            bank: a.bank,
            iters: a.iters,
            gram_lag: a.gram,
            bounds_grid: a.bounds,
            output: a.output,
        }),
        Command::Redundancy(a) => cli::cmd_redundancy(&cli::RedundancyOpts {
            bank: a.bank,
            levels: a.levels,
            period: a.period,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code_for(&err) as u8)
        }
    }
}
