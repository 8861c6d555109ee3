use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tendon_arm::config::{self, ModelConfig, ParseOptions, CONFIG_DIR_ENV};
use tendon_arm::experiment::{self, OutputFormat, RunOptions};

#[derive(Parser)]
#[command(name = "tendon-arm", version, about = "Tendon-driven actuator, joint and arm experiments")]
struct Cli {
    /// Reject unknown keys in config files.
    #[arg(long, global = true)]
    strict: bool,

    /// Fallback directory for relative config paths.
    #[arg(long, global = true, env = CONFIG_DIR_ENV, value_name = "DIR")]
    config_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a model config or experiment spec.
    Validate { config: PathBuf },
    /// Run an experiment spec and write its data and summary.
    Run {
        spec: PathBuf,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the available experiment kinds.
    ListExperiments,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(dir) = &cli.config_dir {
        // The loaders read the fallback directory from the environment.
        std::env::set_var(CONFIG_DIR_ENV, dir);
    }
    let opts = ParseOptions { strict: cli.strict };
    match run(cli.command, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, opts: ParseOptions) -> Result<(), String> {
    match command {
        Command::Validate { config } => {
            let model = config::parse_config(&config, opts).map_err(|e| e.to_string())?;
            println!("{}: ok ({})", config.display(), describe(&model));
        }
        Command::Run { spec, out, format, seed } => {
            let spec = config::load_experiment(&spec, opts).map_err(|e| e.to_string())?;
            let run_opts = RunOptions { out, format: format.map(Into::into), seed, strict: opts.strict };
            let report = experiment::run_experiment(&spec, &run_opts).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&report.summary).unwrap());
            eprintln!(
                "wrote {} rows to {} and {}",
                report.rows,
                report.output.display(),
                report.summary_path.display()
            );
        }
        Command::ListExperiments => {
            for (name, description) in experiment::list_experiments() {
                println!("{name:<26} {description}");
            }
        }
    }
    Ok(())
}

fn describe(model: &ModelConfig) -> String {
    match model {
        ModelConfig::Actuator(a) => format!(
            "actuator {}: d_m = {:.3} mm, F_tm = {} N",
            a.label(),
            a.limit_displacement(),
            a.limit_force()
        ),
        ModelConfig::Joint(j) => format!(
            "joint of two {} actuators, R = {} mm, delta = {} rad",
            j.joint.actuator().label(),
            j.joint.moment_arm(),
            j.delta
        ),
        ModelConfig::Chain(c) => format!("chain with reach {} m", c.links().total()),
        ModelConfig::Lift(s) => format!("lift with {} actuator(s)", s.actuators.len()),
        ModelConfig::Experiment(e) => format!("experiment {} over {} config(s)", e.kind.name(), e.configs.len()),
    }
}
