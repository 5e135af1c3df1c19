use clap::{Parser, Subcommand};
use geostab_cli::commands::{self, Scenario};
use geostab_cli::Options;

#[derive(Parser)]
#[command(name = "geostab", version, about = "Point-cloud cipher and stability toolkit")]
struct Cli {
    /// More log output (repeatable)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt a point cloud and optionally write a full trace
    Encrypt(Options),
    /// Recover a plaintext, or diagnose why it cannot be recovered
    Decrypt(Options),
    /// Stability verdicts and deviation bounds for a ciphertext
    Analyze(Options),
    /// Monte Carlo check of the deviation bounds plus an instability census
    Verify(Options),
    /// Spheres, cubes and point sets for plotting a trace or analysis
    PlotData(Options),
    /// Run one of the bundled scenarios
    Reproduce {
        #[arg(value_enum)]
        scenario: Scenario,
        #[command(flatten)]
        options: Options,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Encrypt(o) => o.resolve().and_then(|o| commands::encrypt(&o)),
        Command::Decrypt(o) => o.resolve().and_then(|o| commands::decrypt(&o)),
        Command::Analyze(o) => o.resolve().and_then(|o| commands::analyze(&o)),
        Command::Verify(o) => o.resolve().and_then(|o| commands::verify(&o)),
        Command::PlotData(o) => o.resolve().and_then(|o| commands::plot_data(&o)),
        Command::Reproduce { scenario, options } => options.resolve().and_then(|o| commands::reproduce(scenario, o)),
    };
    match result {
        Ok(outcome) => std::process::exit(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
