use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod problem;

#[derive(Parser)]
#[command(name = "schroeder", version, about = "Continuous iterates of 1-D maps via Schröder's equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct MapArgs {
    /// Catalog id or `poly:c1,c2,...` (coefficients of x, x², … about the fixed point).
    #[arg(long, default_value = "ricker")]
    pub map: String,

    /// Multiplier of the Ricker map `s·x·eˣ`.
    #[arg(long)]
    pub s: Option<String>,

    /// Solve with s = e^ε as Laurent jets keeping K regular orders; takes s → 1.
    #[arg(long = "eps-jet", value_name = "K", value_parser = clap::value_parser!(i64).range(0..))]
    pub eps_jet: Option<i64>,

    /// Use floating-point coefficients.
    #[arg(long, conflicts_with = "eps_jet")]
    pub float: bool,

    /// Truncation order N.
    #[arg(long, env = "SCHROEDER_ORDER", default_value_t = 10)]
    pub order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Schröder's equation and print Ψ (or Ψ⁻¹).
    Solve {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Print Ψ⁻¹ instead of Ψ.
        #[arg(long)]
        inverse: bool,
    },
    /// Print the flow series f_t.
    Iterate {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Time in steps of f1 (rational, or real in float mode).
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// In eps-jet mode, print the raw jets instead of the s → 1 limit.
        #[arg(long)]
        jets: bool,
    },
    /// Print the velocity profile v = ln s · Ψ/Ψ'.
    Velocity {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        profile: commands::ProfileArgs,
    },
    /// Print the effective potential V = -v² (or -(m/2)v²).
    Potential {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        profile: commands::ProfileArgs,
        /// Mass m in V = -(m/2)v².
        #[arg(long, allow_hyphen_values = true)]
        mass: Option<String>,
    },
    /// Sample f_t(x) on an (x, t) grid.
    Surface {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        grid: commands::GridArgs,
    },
    /// Koenigs-limit estimate of Ψ(x) for a catalog map.
    Koenigs {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, default_value_t = 30)]
        iterations: u32,
        /// Print every iteration, not just the last.
        #[arg(long)]
        trace: bool,
    },
    /// Print the polynomial p_n(s) of the Ricker map.
    Pn {
        #[arg(long)]
        n: usize,
        /// Also evaluate the x^n coefficient of Ψ at this s.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the conjugacy residual checks.
    Check {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the built-in maps.
    Catalog {
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve {
            map,
            output,
            inverse,
        } => commands::solve(&map, &output, inverse),
        Command::Iterate {
            map,
            output,
            t,
            jets,
        } => commands::iterate(&map, &output, &t, jets),
        Command::Velocity {
            map,
            output,
            profile,
        } => commands::velocity(&map, &output, &profile),
        Command::Potential {
            map,
            output,
            profile,
            mass,
        } => commands::potential(&map, &output, &profile, mass.as_deref()),
        Command::Surface { map, output, grid } => commands::surface(&map, &output, &grid),
        Command::Koenigs {
            map,
            output,
            x,
            iterations,
            trace,
        } => commands::koenigs(&map, &output, x, iterations, trace),
        Command::Pn { n, s, output } => commands::pn(n, s.as_deref(), &output),
        Command::Check { map, output } => commands::check(&map, &output),
        Command::Catalog { output } => commands::catalog(&output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = matches!(
                e.downcast_ref::<schroeder_core::Error>(),
                Some(schroeder_core::Error::InternalConsistency(_))
            );
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}
