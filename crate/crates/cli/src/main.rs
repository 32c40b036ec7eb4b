use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spin_wehrl_cli::compare::compare;
use spin_wehrl_cli::config::{parse_grid, ConfigSource, ScenarioKind};
use spin_wehrl_cli::plan::{build, Job};
use spin_wehrl_cli::report::summary;
use spin_wehrl_cli::sweep::{axes_from_args, sweep};
use spin_wehrl_cli::CliError;

/// Wehrl and von Neumann entropy production for open spin systems.
#[derive(Parser)]
#[command(name = "spin-wehrl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the quadrature grid, e.g. 96x192.
    #[arg(long, value_name = "NxM")]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, write its CSV and print a summary.
    Run {
        #[command(flatten)]
        common: Common,
        /// Tolerance used to flag method disagreement in the summary.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Compare Wehrl rate methods along the trajectory; exit 1 above tolerance.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Maximum allowed deviation (overrides compare.tolerance).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sweep config parameters and tabulate summary scalars.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Dotted config key, e.g. bath.temperature (repeatable).
        #[arg(long)]
        param: Vec<String>,
        /// Comma-separated values for the matching --param.
        #[arg(long, allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Check configurations without running them.
    Validate {
        /// Configuration files.
        #[arg(long, required = true, num_args = 1..)]
        config: Vec<PathBuf>,
    },
    /// List the available scenarios.
    ListScenarios,
}

fn load(common: &Common) -> Result<ConfigSource, CliError> {
    let mut source = ConfigSource::load(&common.config)?;
    if let Some(g) = &common.grid {
        let g = parse_grid(g)?;
        let mut grid = toml::Table::new();
        grid.insert("n_theta".into(), toml::Value::Integer(g.n_theta as i64));
        grid.insert("n_phi".into(), toml::Value::Integer(g.n_phi as i64));
        source
            .document
            .insert("grid".into(), toml::Value::Table(grid));
    }
    Ok(source)
}

fn job(common: &Common, tol: Option<f64>) -> Result<Job, CliError> {
    let mut cfg = load(common)?.config()?;
    if let Some(t) = tol {
        cfg.compare.tolerance = t;
    }
    build(&cfg)
}

fn write_file(
    dir: &Path,
    name: &str,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file =
        fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    write(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, tol } => {
            let job = job(&common, tol)?;
            let result = job.run()?;
            let comparison = match compare(&job, &result) {
                Ok(c) => Some(c),
                Err(CliError::NothingToCompare(_)) => None,
                Err(e) => return Err(e),
            };
            let path = write_file(&common.out, &job.config.csv_name(), |w| result.write_csv(w))?;
            print!(
                "{}",
                summary(&result, comparison.as_ref(), job.config.compare.tolerance)
            );
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Compare { common, tol } => {
            let job = job(&common, tol)?;
            let result = job.run()?;
            let comparison = compare(&job, &result)?;
            let name = format!("{}_compare.csv", job.config.name());
            let path = write_file(&common.out, &name, |w| comparison.write_csv(w))?;
            let tolerance = job.config.compare.tolerance;
            print!("{}", summary(&result, Some(&comparison), tolerance));
            println!("wrote {}", path.display());
            let worst = comparison.max_deviation();
            if worst > tolerance {
                return Err(CliError::ToleranceExceeded {
                    deviation: worst,
                    tolerance,
                });
            }
            Ok(())
        }
        Command::Sweep {
            common,
            param,
            values,
        } => {
            let source = load(&common)?;
            let axes = axes_from_args(&param, &values)?;
            let table = sweep(&source, &axes)?;
            let name = format!("{}_sweep.csv", source.config()?.name());
            let path = write_file(&common.out, &name, |w| table.write_csv(w))?;
            let stdout = io::stdout();
            table
                .write_csv(stdout.lock())
                .map_err(|e| CliError::Io(e.to_string()))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Validate { config } => {
            let mut failures = Vec::new();
            for path in &config {
                match ConfigSource::load(path)
                    .and_then(|s| s.config())
                    .and_then(|c| build(&c))
                {
                    Ok(job) => println!("ok    {} ({})", path.display(), job.config.scenario),
                    Err(e) => {
                        println!("FAIL  {}", path.display());
                        failures.push(format!("{}: {e}", path.display()));
                    }
                }
            }
            if failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Config(failures.join("\n")))
            }
        }
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{:<22}{}", k.as_str(), k.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
