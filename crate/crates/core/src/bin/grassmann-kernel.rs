use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grassmann_kernel::dsl::{emit_report, parse_model, run_model, Model, RunOptions};

#[derive(Parser)]
#[command(name = "grassmann-kernel", version, about = "Exact Grassmann algebra, splitness and gluing computations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a document and run its commands.
    Run {
        file: PathBuf,
        /// Write the JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Seed for randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the truncation degree D of every presentation.
        #[arg(long)]
        max_degree: Option<u32>,
        /// Print odd generators as θ in the summary.
        #[arg(long)]
        unicode: bool,
    },
    /// Parse a document and print it in canonical form.
    Fmt { file: PathBuf },
}

fn load(file: &PathBuf) -> Result<Model, ExitCode> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", file.display());
        ExitCode::from(2)
    })?;
    parse_model(&text).map_err(|diags| {
        for d in diags {
            eprintln!("{}:{d}", file.display());
        }
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Cmd::Fmt { file } => match load(&file) {
            Ok(model) => {
                print!("{}", model.to_text());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Cmd::Run { file, json, seed, max_degree, unicode } => {
            let model = match load(&file) {
                Ok(m) => m,
                Err(code) => return code,
            };
            let report = run_model(&model, &RunOptions { seed, max_degree, unicode });
            let out = emit_report(&report.to_json());
            match json {
                Some(p) if p.as_os_str() == "-" => print!("{out}"),
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, out) {
                        eprintln!("error: cannot write {}: {e}", p.display());
                        return ExitCode::from(2);
                    }
                    print!("{}", report.summary());
                }
                None => print!("{}", report.summary()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
