use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use biform_cli::{emit, run, CliError, Format, Mode, RunConfig};
use clap::Parser;

/// Run bi-form calculus verification scenarios and write a report.
#[derive(Debug, Parser)]
#[command(name = "biform", version)]
struct Args {
    /// Scenario to run; repeat for several. Defaults to all of them.
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<String>,
    /// JSON run configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Step for central differences in `fd` mode.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Tolerance for identity residuals.
    #[arg(long)]
    tol_identity: Option<f64>,
    /// Torsion threshold used when classifying.
    #[arg(long)]
    tol_classify: Option<f64>,
    /// Report file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Run scenarios concurrently.
    #[arg(long)]
    parallel: bool,
}

impl Args {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if !self.scenarios.is_empty() {
            c.scenarios = self.scenarios;
        }
        c.seed = self.seed.unwrap_or(c.seed);
        c.mode = self.mode.unwrap_or(c.mode);
        c.fd_step = self.fd_step.unwrap_or(c.fd_step);
        c.tol_identity = self.tol_identity.or(c.tol_identity);
        c.tol_classify = self.tol_classify.or(c.tol_classify);
        c.out = self.out.or(c.out);
        c.format = self.format.unwrap_or(c.format);
        c.parallel |= self.parallel;
        Ok(c)
    }
}

fn execute(args: Args) -> Result<bool, CliError> {
    let config = args.into_config()?;
    config.validate()?;
    // open the output before the (possibly long) run so a bad path fails fast
    let sink: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let report = run(&config)?;
    emit(&report, config.format, BufWriter::new(sink)).map_err(|e| CliError::Io(e.to_string()))?;
    for s in &report.scenarios {
        eprintln!("{:<24} {}  ({:.2?})", s.name, s.verdict(), s.wall_time);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("biform: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
