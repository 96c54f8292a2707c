//! Command-line front end. Each subcommand is a plain function returning
//! its exit code so it can be driven from tests.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, every case passed |
//! | 1 | the suite ran but some case FAILED or was FATAL |
//! | 2 | usage, configuration or test-data error |
//! | 3 | infrastructure error (endpoint unreachable, port busy, I/O) |

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config_with_warnings, DataSourceChoice, TestConfig};
use crate::datasource::{select_source, DataSourceError};
use crate::engine::{run_suite_with, EngineError, RunOptions};
use crate::metrics::{parse_requirements, summarize_run_data, MetricsTable, Requirements};
use crate::mock::{default_login_spec, MockOptions, MockWebDriver, PortalSpec};
use crate::report::{default_report_name, extract_run_data, start_log_report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TEST_FAILURES: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFRA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "taf", version, about = "Keyword and data driven web test runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a login suite and write an HTML report.
    Run(RunArgs),
    /// Compute ASP, PTE and TTP from a report.
    Metrics(MetricsArgs),
    /// Serve the mock WebDriver portal until interrupted.
    MockServe(MockServeArgs),
    /// Parse a config file and print it with secrets redacted.
    ValidateConfig(ValidateConfigArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV file; forces the file data source.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Report path. Defaults to ./report-<UTC timestamp>.html.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub parallel: u16,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Requirements met after performance testing.
    #[arg(long, requires = "unmet", conflicts_with = "requirements")]
    pub met: Option<u64>,
    #[arg(long, requires = "met", conflicts_with = "requirements")]
    pub unmet: Option<u64>,
    /// File with MET=<n> and UNMET=<n> lines.
    #[arg(long)]
    pub requirements: Option<PathBuf>,
    /// Scripting effort, e.g. 30m, 1h, 540s.
    #[arg(long, value_parser = humantime::parse_duration)]
    pub effort: Duration,
}

#[derive(Debug, Args)]
pub struct MockServeArgs {
    /// Portal spec as JSON. Defaults to the built-in login portal.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 4444)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Accepted login for the built-in portal, as user:password. Repeatable.
    #[arg(long, default_value = "student:password123")]
    pub credential: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ValidateConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Parses `args` (program name first) and runs the chosen command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(&a, out, err),
        Command::Metrics(a) => cmd_metrics(&a, out, err),
        Command::MockServe(a) => cmd_mock_serve(&a, out, err, None),
        Command::ValidateConfig(a) => cmd_validate_config(&a, out, err),
    }
}

fn load_config(path: &Path, err: &mut dyn Write) -> Result<TestConfig, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read config {}: {e}", path.display());
        EXIT_USAGE
    })?;
    let (config, warnings) = parse_config_with_warnings(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_USAGE
    })?;
    for w in warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok(config)
}

fn data_error_code(e: &DataSourceError) -> i32 {
    match e {
        DataSourceError::ConnectionRefused(_) => EXIT_INFRA,
        _ => EXIT_USAGE,
    }
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut config = match load_config(&args.config, err) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if args.data.is_some() {
        config.data_source_choice = DataSourceChoice::File;
    }
    let source = match select_source(&config, args.data.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: data source: {e}");
            return data_error_code(&e);
        }
    };
    let name = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.trim().is_empty())
        .unwrap_or_else(|| "suite".into());
    let mut report = start_log_report(&name, &format!("login suite against {}", config.aut_url))
        .expect("name is non-empty");
    let options = RunOptions {
        parallelism: args.parallel as usize,
    };
    let run = match run_suite_with(&config, &source, &config.locators, &mut report, options) {
        Ok(run) => run,
        Err(EngineError::DataSource(e)) => {
            let _ = writeln!(err, "error: data source: {e}");
            return data_error_code(&e);
        }
        Err(e @ EngineError::Expand { .. }) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
        Err(e @ EngineError::Report(_)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INFRA;
        }
    };
    let html = report.render_html(&run).expect("finalize seals the report");
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_report_name(chrono::Utc::now())));
    if let Err(e) = std::fs::write(&path, html) {
        let _ = writeln!(err, "error: cannot write report {}: {e}", path.display());
        return EXIT_INFRA;
    }
    let summary = crate::report::compute_dashboard(&run);
    let _ = writeln!(
        out,
        "cases={} steps={} passed={}% duration={} report={}",
        summary.total_cases,
        summary.total_steps,
        summary.passed_pct,
        summary.total_time(),
        path.display()
    );
    if let Some(reason) = &run.aborted {
        let _ = writeln!(err, "error: run aborted: {reason}");
        return EXIT_INFRA;
    }
    if run.all_passed() {
        EXIT_OK
    } else {
        EXIT_TEST_FAILURES
    }
}

pub fn cmd_metrics(args: &MetricsArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let requirements = match (&args.requirements, args.met, args.unmet) {
        (Some(path), _, _) => {
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_requirements(&t).map_err(|e| e.to_string()));
            match parsed {
                Ok(r) => r,
                Err(e) => {
                    let _ = writeln!(err, "error: requirements {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
        }
        (None, Some(met), Some(unmet)) => Requirements { met, unmet },
        _ => {
            let _ = writeln!(err, "error: give --met and --unmet, or --requirements");
            return EXIT_USAGE;
        }
    };
    let html = match std::fs::read_to_string(&args.report) {
        Ok(h) => h,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read report {}: {e}", args.report.display());
            return EXIT_USAGE;
        }
    };
    let data = match extract_run_data(&html) {
        Ok(d) => d,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", args.report.display());
            return EXIT_USAGE;
        }
    };
    match summarize_run_data(&data, requirements, args.effort) {
        Ok(summary) => {
            let _ = writeln!(out, "{}", MetricsTable(&summary));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Serves until `stop` is set, or forever when `stop` is `None`.
pub fn cmd_mock_serve(
    args: &MockServeArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
    stop: Option<&AtomicBool>,
) -> i32 {
    let spec = match &args.spec {
        Some(path) => {
            let parsed = std::fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|t| PortalSpec::from_json(&t).map_err(|e| e.to_string()));
            match parsed {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "error: spec {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
        }
        None => {
            let mut creds = Vec::new();
            for c in &args.credential {
                match c.split_once(':') {
                    Some((u, p)) => creds.push((u.to_string(), p.to_string())),
                    None => {
                        let _ = writeln!(err, "error: --credential expects user:password, got {c:?}");
                        return EXIT_USAGE;
                    }
                }
            }
            default_login_spec(creds)
        }
    };
    let options = MockOptions {
        bind: format!("{}:{}", args.host, args.port),
        accepted_browsers: ["mock", "chrome", "firefox"].map(String::from).to_vec(),
    };
    let mut mock = match MockWebDriver::start(spec, options) {
        Ok(m) => m,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INFRA;
        }
    };
    let _ = writeln!(out, "mock WebDriver listening on {}", mock.url());
    let _ = out.flush();
    loop {
        if stop.is_some_and(|s| s.load(Ordering::SeqCst)) {
            break;
        }
        std::thread::sleep(Duration::from_millis(50));
    }
    mock.stop();
    EXIT_OK
}

pub fn cmd_validate_config(args: &ValidateConfigArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match load_config(&args.config, err) {
        Ok(config) => {
            let _ = write!(out, "{}", config.redacted());
            EXIT_OK
        }
        Err(code) => code,
    }
}
