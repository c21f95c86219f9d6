use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use acoustic_screen::cli::{
    generate_synthetic, run_pipeline, write_error_record, CliError, RunConfig, RunMode, RunOptions,
    SyntheticSpec,
};
use acoustic_screen::dataset::{write_csv, CsvSchema};

#[derive(Parser)]
#[command(name = "acoustic-screen", version, about = "Acoustic-feature dementia screening pipeline")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's mode (select, loso, holdout, sweep, full).
        #[arg(long)]
        mode: Option<RunMode>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a synthetic balanced dataset with planted informative features.
    GenSynthetic {
        #[arg(long, default_value_t = 108)]
        subjects: usize,
        #[arg(long, default_value_t = 500)]
        features: usize,
        #[arg(long, default_value_t = 10)]
        informative: usize,
        /// Class mean separation in standard deviations.
        #[arg(long, default_value_t = 2.0)]
        effect_size: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn fail(err: &CliError) -> ExitCode {
    eprintln!("acoustic-screen: {err}");
    println!("{}", err.to_json());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(&CliError::config("--threads must be at least 1"));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&CliError::runtime(format!("thread pool: {e}")));
        }
    }
    match cli.command {
        Command::Run { config, mode, seed } => {
            let cfg = match RunConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_pipeline(&cfg, RunOptions { mode, seed }) {
                Ok(artifacts) => {
                    for f in &artifacts.files {
                        eprintln!("wrote {}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    write_error_record(&cfg.paths.output_dir, &e);
                    fail(&e)
                }
            }
        }
        Command::GenSynthetic { subjects, features, informative, effect_size, seed, out } => {
            let spec = SyntheticSpec {
                n_subjects: subjects,
                n_features: features,
                n_informative: informative,
                effect_size,
                seed,
            };
            let ds = match generate_synthetic(&spec) {
                Ok(d) => d,
                Err(e) => return fail(&CliError::config(e.to_string())),
            };
            let file = match File::create(&out) {
                Ok(f) => f,
                Err(e) => return fail(&CliError::config(format!("cannot create {}: {e}", out.display()))),
            };
            match write_csv(&ds, BufWriter::new(file), &CsvSchema::default()) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail(&CliError::runtime(e.to_string())),
            }
        }
    }
}
