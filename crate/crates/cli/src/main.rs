use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use levelt_cli::{run, Command, Settings};

#[derive(Parser)]
#[command(name = "levelt", version, about = "Monodromy and normal forms of logarithmic connections")]
struct Cli {
    /// Local relative error bound of the ODE integrator.
    #[arg(long, global = true, default_value_t = levelt_core::DEFAULT_RTOL)]
    rtol: f64,
    /// Clustering radius for algebraic decisions.
    #[arg(long, global = true, default_value_t = levelt_core::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = levelt_core::DEFAULT_TRIALS)]
    trials: usize,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Truncation order of gauge series.
    #[arg(long, global = true, default_value_t = levelt_core::DEFAULT_DEGREE)]
    degree: usize,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Residue, monodromy, linearizability and monodromy datum of a connection file.
    Analyze { file: PathBuf },
    /// Levelt normal form of a datum file, written as a connection file.
    NormalForm {
        datum: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Equivalence of two datum files.
    Equiv { first: PathBuf, second: PathBuf },
    /// Global monodromy and per-pole data of a Fuchsian system file.
    Global {
        system: PathBuf,
        /// Directory for per-pole CSV samples of the loop transports.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let settings = Settings {
        rtol: cli.rtol,
        tol: cli.tol,
        seed: cli.seed,
        trials: cli.trials,
        json: cli.json,
        degree: cli.degree,
    };
    let command = match cli.command {
        Sub::Analyze { file } => Command::Analyze { file },
        Sub::NormalForm { datum, output } => Command::NormalForm { datum, output },
        Sub::Equiv { first, second } => Command::Equiv { first, second },
        Sub::Global { system, samples } => Command::Global { system, samples },
    };
    let mut out = run(&command, &settings);
    for (path, contents) in &out.files {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if let Err(e) = std::fs::create_dir_all(parent) {
                out = levelt_cli::Output {
                    code: 1,
                    stderr: format!("error: cannot create {}: {e}\n", parent.display()),
                    ..Default::default()
                };
                break;
            }
        }
        if let Err(e) = std::fs::write(path, contents) {
            out = levelt_cli::Output {
                code: 1,
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
                ..Default::default()
            };
            break;
        }
    }
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}
