use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dflab::lab::{run, Command, LabConfig};

#[derive(Parser)]
#[command(name = "dflab", version, about = "Dirac-Fock min-max laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// flat `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides run.out)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// random seed (overrides run.seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// radial Dirac shells and the nonrelativistic limit table
    Spectrum,
    /// self-consistent Dirac-Fock runs over the N and kappa lists
    Scf,
    /// min-max against max-min levels, with gap certificates
    ConjectureM,
    /// symmetry-breaking certificates for the configured orbitals
    PropertyP,
    /// every experiment in turn
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cmd = match cli.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Scf => Command::Scf,
        Cmd::ConjectureM => Command::ConjectureM,
        Cmd::PropertyP => Command::PropertyP,
        Cmd::All => Command::All,
    };
    let cfg = cli.config.as_deref().map(LabConfig::from_file).unwrap_or_else(|| Ok(LabConfig::default()));
    let result = cfg.and_then(|mut cfg| {
        if let Some(out) = cli.out {
            cfg.out = out;
        }
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        run(cmd, &cfg)
    });
    match result {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dflab {}: {e}", cmd.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
