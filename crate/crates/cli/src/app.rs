//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::compare::compare_systems;
use crate::config::LoadedConfig;
use crate::dataset::Dataset;
use crate::error::CliError;
use crate::figures::{reproduce_figure, FigureId};
use crate::models::Target;
use crate::scan::{run_point, run_scan, ScanSpec};
use crate::validate::{validate, Profile, Suite, ToleranceProfile};

#[derive(Debug, Parser)]
#[command(
    name = "optomech",
    version,
    about = "Dissipative optomechanics design and validation"
)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "OPTOMECH_CONFIG")]
    pub config: Option<PathBuf>,

    /// Output file; a `.meta.toml` sidecar is written next to datasets.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    pub tolerance_profile: Profile,

    /// Override a configuration key, e.g. `--set mos.t=0.02`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Sweep one key, `KEY=START:STOP:POINTS`; bare keys belong to the model's table.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mirror + membrane response at one tandem phase.
    Synthetic(ModelArgs),
    /// Membrane-outside cavity operating point.
    Mos(ModelArgs),
    /// Membrane-in-interferometer effective mirror and couplings.
    Msi(ModelArgs),
    /// Membrane-at-the-edge resonance, slope and decay.
    Mate(ModelArgs),
    /// Backaction-imprecision product, closed form and general solver.
    Noise(ModelArgs),
    /// Normalized curve datasets.
    Figure {
        #[arg(long, value_enum)]
        id: FigureId,
    },
    /// Zero-dispersive couplings and cooperativities of all three systems.
    Compare,
    /// Oracle checks of every closed form.
    Validate {
        #[arg(long, value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
    },
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if cli.workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let loaded = LoadedConfig::load(cli.config.as_deref(), &cli.sets)?;
    let tol = ToleranceProfile::for_profile(cli.tolerance_profile)
        .with_overrides(&loaded.config.tolerances);
    match &cli.command {
        Command::Synthetic(a) => model(cli, &loaded, Target::Synthetic, a, tol, out),
        Command::Mos(a) => model(cli, &loaded, Target::Mos, a, tol, out),
        Command::Msi(a) => model(cli, &loaded, Target::Msi, a, tol, out),
        Command::Mate(a) => model(cli, &loaded, Target::Mate, a, tol, out),
        Command::Noise(a) => model(cli, &loaded, Target::Noise, a, tol, out),
        Command::Figure { id } => {
            let data = reproduce_figure(*id, &loaded.config, tol)?;
            emit(cli, &data, out)
        }
        Command::Compare => {
            let table = compare_systems(&loaded.config);
            write!(out, "{table}")?;
            if let Some(path) = &cli.out {
                std::fs::write(path, table.to_csv())?;
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(())
        }
        Command::Validate { suite } => {
            let report = validate(*suite, &tol);
            writeln!(out, "{report}")?;
            if let Some(path) = &cli.out {
                let text = toml::to_string(&report)
                    .map_err(|e| CliError::Config(format!("report: {e}")))?;
                std::fs::write(path, text)?;
            }
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Validation(failed.join(", ")))
            }
        }
    }
}

fn model(
    cli: &Cli,
    loaded: &LoadedConfig,
    target: Target,
    args: &ModelArgs,
    tol: ToleranceProfile,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let spec = match (&args.sweep, &loaded.config.scan) {
        (Some(text), _) => Some(ScanSpec::parse_sweep(target, text)?),
        (None, Some(scan)) => Some(ScanSpec {
            target,
            sweep: scan.clone(),
        }),
        (None, None) => None,
    };
    let data = match spec {
        Some(spec) => run_scan(loaded, &spec, tol, cli.workers)?,
        None => {
            let data = run_point(loaded, target, tol)?;
            if cli.out.is_none() {
                for (name, v) in data.columns.iter().zip(&data.rows[0]) {
                    writeln!(out, "{name} = {v:.16e}")?;
                }
                for note in &data.meta.notes {
                    writeln!(out, "# {note}")?;
                }
                return Ok(());
            }
            data
        }
    };
    emit(cli, &data, out)
}

fn emit(cli: &Cli, data: &Dataset, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let sidecar = data.write(path)?;
            writeln!(out, "wrote {} and {}", path.display(), sidecar.display())?;
        }
        None => out.write_all(data.to_csv().as_bytes())?,
    }
    Ok(())
}
