use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use taubnut_core::harness::config::Config;
use taubnut_core::harness::report::SuiteReport;
use taubnut_core::harness::suite::{find, mass_report, run_suite, run_suite_with_grid};
use taubnut_core::LabError;

#[derive(Parser)]
#[command(name = "taubnut-lab", version, about = "Numerical checks for Dirac and Rarita-Schwinger fields on Taub-NUT type metrics")]
struct Cli {
    /// JSON configuration; the built-in default is used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid scans (capped by TAUBNUT_WORKERS)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Also write the JSON report here
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Also write the markdown summary here
    #[arg(long, global = true)]
    markdown: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Geometry,
    Dirac,
    Rs,
    Specfun,
    Separation,
    All,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Geometry => "geometry",
            Target::Dirac => "dirac",
            Target::Rs => "rs",
            Target::Specfun => "specfun",
            Target::Separation => "separation",
            Target::All => "all",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Run a group of checks and print the markdown summary
    Verify { target: Target },
    /// Run the L2 norm checks
    Norms,
    /// Total mass of the configured metric at a cutoff radius
    Mass {
        #[arg(long)]
        cutoff: f64,
    },
    /// Run one grid-scanning check on a custom grid
    Scan {
        #[arg(long)]
        check: String,
        /// e.g. `r=1.01:30:40:log;theta=pi/4,pi/2;phi=0;psi=0`
        #[arg(long)]
        grid: String,
    },
    /// Run checks (default: the config's selection, else all) and print the report
    Report {
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        /// Check ids or group names
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Render an existing JSON report instead of running checks
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<Config, LabError> {
    match path {
        Some(p) => Config::from_path(p),
        None => Ok(Config::default()),
    }
}

fn write_outputs(cli: &Cli, report: &SuiteReport) -> Result<(), String> {
    if let Some(p) = &cli.json {
        std::fs::write(p, report.to_json()).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if let Some(p) = &cli.markdown {
        std::fs::write(p, report.to_markdown()).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let config = load_config(cli.config.as_ref()).map_err(|e| e.to_string())?;
    let (report, format) = match &cli.command {
        Command::Verify { target } => {
            (run_suite(&config, &[target.name().to_string()], cli.workers).map_err(|e| e.to_string())?, Format::Markdown)
        }
        Command::Norms => (run_suite(&config, &["norms".to_string()], cli.workers).map_err(|e| e.to_string())?, Format::Markdown),
        Command::Mass { cutoff } => (mass_report(&config, *cutoff).map_err(|e| e.to_string())?, Format::Json),
        Command::Scan { check, grid } => {
            let info = find(check).map_err(|e| e.to_string())?;
            if !info.uses_grid {
                return Err(format!("check `{check}` does not scan a grid"));
            }
            let report = run_suite_with_grid(&config, &[check.clone()], cli.workers, Some(grid)).map_err(|e| e.to_string())?;
            (report, Format::Json)
        }
        Command::Report { format, checks, input } => {
            let report = match input {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                    SuiteReport::from_json(&text).map_err(|e| format!("{}: {e}", p.display()))?
                }
                None => run_suite(&config, checks, cli.workers).map_err(|e| e.to_string())?,
            };
            (report, *format)
        }
    };
    write_outputs(cli, &report)?;
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Markdown => print!("{}", report.to_markdown()),
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
