mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "nrbattery", version, about = "Charger-battery moment dynamics, closed forms and optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the moment equations from vacuum and write the trajectory.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// End time (default: 20 / slowest rate).
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        dt_max: f64,
    },
    /// Evaluate the closed-form energy curves on a uniform time grid.
    ClosedForm {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
    },
    /// Compare every applicable closed form with the integrator.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Find the reservoir weighting that maximizes the stationary battery energy.
    Optimize {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan the minimal gap chi(r, y) over r in [0, 1], y in [0, y_max].
    Advantage {
        #[command(flatten)]
        output: OutputArgs,
        /// Grid size as "rN:yM".
        #[arg(long, default_value = "r101:y22")]
        grid: String,
        #[arg(long, default_value_t = 0.21)]
        y_max: f64,
    },
    /// Write the data files behind a figure (fig2, fig3, fig4, fig5, chi).
    Figures {
        id: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: std::path::PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct ConfigArgs {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<std::path::PathBuf>,
    /// Built-in parameter set (fig2, fig3, fig4, fig5).
    #[arg(long)]
    pub preset: Option<String>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print the validated config and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            output,
            t_end,
            dt_max,
        } => commands::simulate(&config, &output, t_end, dt_max),
        Command::ClosedForm {
            config,
            output,
            t_end,
            points,
        } => commands::closed_form(&config, &output, t_end, points),
        Command::Verify {
            config,
            output,
            t_end,
            points,
        } => commands::verify(&config, &output, t_end, points),
        Command::Optimize { config, output } => commands::optimize(&config, &output),
        Command::Advantage {
            output,
            grid,
            y_max,
        } => commands::advantage(&output, &grid, y_max),
        Command::Figures { id, out } => commands::figures(&id, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return CliError::Usage(e.kind().to_string()).report(&e.to_string());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(""),
    }
}
