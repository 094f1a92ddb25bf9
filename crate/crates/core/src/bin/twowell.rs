use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twowell::sweep::{self, Command};
use twowell::error::ConfigErrors;
use twowell::{Config, Engine, Error};

#[derive(Parser)]
#[command(name = "twowell", version, about = "Entanglement sweeps for a two-well, two-component condensate")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Local spin squeezing versus tau.
    Squeeze(RunArgs),
    /// Nonlinear evolution followed by a beam splitter.
    TwoStep(RunArgs),
    /// Full dynamics with tunneling and losses (Wigner engine).
    Dynamic(RunArgs),
    /// Compare the engines against their oracles.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_engine)]
    engine: Option<Engine>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    traj: Option<u64>,
    #[arg(long, value_enum)]
    beam_splitter: Option<Switch>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

impl RunArgs {
    fn load(&self) -> Result<Config, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    let mut errors = ConfigErrors::default();
                    errors.push("--config", format!("cannot read {}: {e}", path.display()));
                    Error::Config(errors)
                })?;
                Config::from_json(&text)?
            }
            None => Config::default(),
        };
        if let Some(engine) = self.engine {
            cfg.sweep.engine = engine;
        }
        if let Some(seed) = self.seed {
            cfg.wigner.seed = seed;
        }
        if let Some(traj) = self.traj {
            cfg.wigner.n_traj = traj;
        }
        if let Some(bs) = self.beam_splitter {
            cfg.sweep.beam_splitter = matches!(bs, Switch::On);
        }
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, Error> {
    let (command, args) = match cmd {
        Cmd::Squeeze(a) => (Some(Command::Squeeze), a),
        Cmd::TwoStep(a) => (Some(Command::TwoStep), a),
        Cmd::Dynamic(a) => (Some(Command::Dynamic), a),
        Cmd::Validate(a) => (None, a),
    };
    let cfg = args.load()?;
    let validated = cfg.validate()?;
    for w in &validated.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = args.output()?;
    match command {
        Some(command) => {
            for w in sweep::command_warnings(command, &validated) {
                eprintln!("warning: {w}");
            }
            let result = sweep::run(command, &validated)?;
            sweep::write_csv(&mut out, &result, &cfg, &validated)?;
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let checks = sweep::run_validate(&validated)?;
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            out.flush()?;
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
