use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holonomy::experiment::{
    self, default_output_dir, execute, preset, preset_literal, summary_json, ExitStatus, ExperimentConfig,
    ExperimentKind,
};
use holonomy::two_qubit::{effective_couplings, validate_conditions};
use holonomy::Error;

/// Superatom holonomic gate experiments.
#[derive(Parser)]
#[command(name = "sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML experiment config and write its trace and summary.
    Run {
        config: PathBuf,
        /// Directory for relative output paths (default: $SIM_OUTPUT_DIR or ".").
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print a named preset config, or write it to a file.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the published parameter values without amendments.
        #[arg(long)]
        paper_literal: bool,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(ExitStatus::of(err).code() as u8)
}

fn run(config: PathBuf, out_dir: Option<PathBuf>) -> ExitCode {
    let cfg = match ExperimentConfig::from_path(&config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let dir = out_dir.unwrap_or_else(default_output_dir);
    match experiment::run(&cfg, &dir) {
        Ok((report, emitted)) => {
            if let Some(t) = &emitted.trace {
                println!("trace: {}", t.display());
            }
            println!("summary: {}", emitted.summary.display());
            if let Some(f) = report.summary.final_fidelity {
                println!("final fidelity: {f:.6}");
            }
            if let Some(m) = &report.summary.message {
                eprintln!("{m}");
            }
            ExitCode::from(report.status().code() as u8)
        }
        Err(e) => fail(&e),
    }
}

fn show_preset(name: &str, out: Option<PathBuf>, literal: bool) -> ExitCode {
    let cfg = if literal { preset_literal(name) } else { preset(name) };
    let text = match cfg.and_then(|c| c.to_toml()) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                return fail(&Error::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                });
            }
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

fn validate(config: PathBuf) -> ExitCode {
    let cfg = match ExperimentConfig::from_path(&config).and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(tq) = &cfg.parameters.two_qubit {
        if matches!(cfg.experiment, ExperimentKind::TwoQubit | ExperimentKind::Validate | ExperimentKind::Verify) {
            let params = match tq.to_params() {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let report = validate_conditions(&params, tq.condition_threshold);
            match summary_json(&report) {
                Ok(j) => print!("{j}"),
                Err(e) => return fail(&e),
            }
            if let Err(e) = effective_couplings(&params) {
                return fail(&e);
            }
        }
    }
    if cfg.experiment == ExperimentKind::Validate {
        return match execute(&cfg) {
            Ok(r) => ExitCode::from(r.status().code() as u8),
            Err(e) => fail(&e),
        };
    }
    println!("ok");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config, out_dir } => run(config, out_dir),
        Command::Preset { name, out, paper_literal } => show_preset(&name, out, paper_literal),
        Command::Validate { config } => validate(config),
    }
}
