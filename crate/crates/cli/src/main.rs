use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lbm_cli::run::figure_for;
use lbm_cli::{emit_plot_script, parse_with_overrides, run_experiment, Experiment};

/// Runs wall-location experiments on the D1Q3 and D2Q9 lattice Boltzmann
/// schemes and writes `<experiment>.csv` (plus `<experiment>.plot` for
/// sweeps) into the output directory.
///
/// Exit codes: 0 success, 2 invalid configuration, 3 no steady state,
/// 4 wall not localized.
#[derive(Parser)]
#[command(name = "lbm-magic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady D1Q3 Poisson profile with anti-bounce-back ends.
    #[command(name = "poisson-1d")]
    Poisson1d(RunArgs),
    /// D2Q9 channel profile, body force split around the collision.
    #[command(name = "poiseuille-force")]
    PoiseuilleForce(RunArgs),
    /// D2Q9 channel profile, body force added to the populations.
    #[command(name = "poiseuille-force-pop")]
    PoiseuilleForcePop(RunArgs),
    /// D2Q9 channel profile driven by a pressure drop.
    #[command(name = "poiseuille-pressure")]
    PoiseuillePressure(RunArgs),
    /// Wall offset over a list of σ-products.
    Sweep(RunArgs),
    /// Bisection for the product that puts the wall half a cell out.
    #[command(name = "magic-root")]
    MagicRoot(RunArgs),
    /// D1Q3 diffusivity from the decay of a sine mode.
    Diffusivity(RunArgs),
    /// D2Q9 viscosity from the decay of a shear wave.
    Viscosity(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; defaults apply to every missing key.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// `section.key=value`, applied after the file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::Poisson1d(a) => (Experiment::Poisson1d, a),
            Command::PoiseuilleForce(a) => (Experiment::PoiseuilleForce, a),
            Command::PoiseuilleForcePop(a) => (Experiment::PoiseuilleForcePop, a),
            Command::PoiseuillePressure(a) => (Experiment::PoiseuillePressure, a),
            Command::Sweep(a) => (Experiment::Sweep, a),
            Command::MagicRoot(a) => (Experiment::MagicRoot, a),
            Command::Diffusivity(a) => (Experiment::Diffusivity, a),
            Command::Viscosity(a) => (Experiment::Viscosity, a),
        }
    }
}

fn main() -> ExitCode {
    let (experiment, args) = Cli::parse().command.split();

    let (text, origin) = match &args.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(text) => (text, path.display().to_string()),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => (String::new(), "<defaults>".to_string()),
    };
    let config = match parse_with_overrides(&text, &origin, &args.overrides) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    let table = match run_experiment(experiment, &config) {
        Ok(table) => table,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let name = experiment.name();
    let csv_name = format!("{name}.csv");
    let plot = if experiment == Experiment::Sweep {
        match emit_plot_script(&table, figure_for(config.variant), &csv_name) {
            Ok(script) => Some(script),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        None
    };

    let dir = args.out.unwrap_or_else(|| PathBuf::from(&config.output_dir));
    let written = fs::create_dir_all(&dir).and_then(|_| {
        let csv_path = dir.join(&csv_name);
        fs::write(&csv_path, table.to_csv())?;
        let mut paths = vec![csv_path];
        if let Some(script) = plot {
            let plot_path = dir.join(format!("{name}.plot"));
            fs::write(&plot_path, script)?;
            paths.push(plot_path);
        }
        Ok(paths)
    });
    match written {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write to {}: {e}", dir.display());
            ExitCode::FAILURE
        }
    }
}
