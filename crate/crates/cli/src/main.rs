use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fractel::verify::summary_table;
use fractel_cli::{cmd_ml, cmd_solve, cmd_verify, configure_threads, CliError};

#[derive(Parser)]
#[command(name = "fractel", version, about = "Fractional telegraph equation solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a configured problem and write solution.csv, norms.json, field.csv.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the number of modes.
        #[arg(long)]
        modes: Option<usize>,
        /// Override the number of output time steps.
        #[arg(long)]
        time_steps: Option<usize>,
    },
    /// Run the verification battery and write a JSON-lines report.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Perturb the Mittag-Leffler evaluator; the battery must fail.
        #[arg(long)]
        fault_inject: bool,
    },
    /// Evaluate E_{rho,mu}(re + i im).
    #[command(allow_negative_numbers = true)]
    Ml {
        rho: f64,
        mu: f64,
        re: f64,
        im: f64,
        tol: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(std::env::var("FRACTEL_THREADS").ok().as_deref())?;
    match cli.command {
        Command::Solve {
            config,
            out,
            modes,
            time_steps,
        } => {
            for p in cmd_solve(&config, &out, modes, time_steps)? {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Verify {
            config,
            out,
            seed,
            fault_inject,
        } => {
            let reports = cmd_verify(config.as_deref(), &out, seed, fault_inject)?;
            print!("{}", summary_table(&reports));
            match reports.iter().filter(|r| !r.passed()).count() {
                0 => Ok(()),
                n => Err(CliError::ChecksFailed(n)),
            }
        }
        Command::Ml { rho, mu, re, im, tol } => {
            println!("{}", cmd_ml(rho, mu, re, im, tol)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fractel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
