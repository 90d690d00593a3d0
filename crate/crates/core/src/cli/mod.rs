//! Config-driven command-line front end.

pub mod config;
pub mod report;
mod run;
mod verify;

use clap::Parser;

pub use config::{parse_config, Command, OutputFormat, RunConfig};
pub use report::{error_json, Report};
pub use run::{arithmetic, lambda_max, lambda_min, run};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "frozen-sl", version, about = "Spectra of frozen-argument Sturm-Liouville problems on time scales")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON problem description
    #[arg(long)]
    pub config: std::path::PathBuf,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<f64>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Exact rational arithmetic on finite scales
    #[arg(long)]
    pub rational: bool,
}

/// Load the config and apply command-line overrides.
pub fn load(args: &Args) -> Result<RunConfig> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| {
        Error::config("", format!("cannot read {}: {e}", args.config.display()))
    })?;
    let mut config = parse_config(&text)?;
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(Error::config("--tol", "must be positive"));
        }
        config.solver.tol = t;
    }
    if let Some(x) = args.lambda_max {
        config.solver.lambda_max = Some(x);
    }
    if let Some(n) = args.n_max {
        config.solver.n_max = n;
    }
    if let Some(o) = args.output {
        config.output = o;
    }
    config.solver.rational |= args.rational;
    config.command = Some(args.command);
    Ok(config)
}

/// Run the parsed command line; returns the text to print and the exit code.
pub fn main_with(args: &Args) -> (String, i32) {
    let result = load(args).and_then(|c| run(&c, args.command).map(|r| (r, c.output)));
    match result {
        Ok((report, format)) => (report.render(format), report.exit_code()),
        Err(e) => {
            let mut s = serde_json::to_string_pretty(&error_json(&e)).expect("serializable");
            s.push('\n');
            (s, 2)
        }
    }
}
