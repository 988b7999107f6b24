//! `hidimtest` command-line front end.

mod bundled;
mod data;
mod failure;
mod report;

use clap::{Parser, Subcommand};
use data::Orientation;
use failure::{Failure, Kind};
use hidimtest::asymptotics::{clrt_centering, run_test_with_mean};
use hidimtest::harness::{run_experiment, write_csv, write_jsonl, CsvRow, ExportFormat};
use hidimtest::rmt::{clrt_mp_integral, verify_identities};
use hidimtest::{Error, ExperimentConfig, StatisticKind, TestReport};
use report::ReportFormat;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Overrides `master_seed` in any experiment config.
const SEED_ENV: &str = "HIDIMTEST_SEED";

#[derive(Debug, Parser)]
#[command(name = "hidimtest", version, about = "High-dimensional tests of Σ = I")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test H0: Σ = I on a data file.
    Test(TestArgs),
    /// Run a Monte Carlo experiment from a config file or bundled name.
    Simulate(SimulateArgs),
    /// Check the contour-integral identities against their closed forms.
    RmtVerify(VerifyArgs),
    /// Render an experiment result as comparison tables.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
struct TestArgs {
    /// Delimited numeric file (comma, tab, semicolon or whitespace).
    data: PathBuf,
    #[arg(long, value_enum, default_value = "rows")]
    orientation: Orientation,
    /// `new-clrt`, `legacy-clrt`, `new-lw` or `legacy-lw`.
    #[arg(long = "test", value_parser = parse_kind)]
    kind: StatisticKind,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Excess fourth moment `E Y⁴ − 3` of the entries.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta: f64,
    /// `sample`, `zero`, or a file holding the known mean vector.
    #[arg(long, default_value = "sample")]
    mu: String,
    /// Skip the first non-comment line.
    #[arg(long)]
    header: bool,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// Path to a TOML config, or the name of a bundled config.
    #[arg(required_unless_present = "list")]
    config: Option<String>,
    /// Output file; without it the result goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Override the replication count.
    #[arg(long)]
    replications: Option<usize>,
    /// List the bundled configs and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9])]
    y: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1.2, 0.0, 1.5])]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    /// CSV export, or JSONL when the name ends in `.jsonl`.
    result: PathBuf,
    #[arg(long, value_enum, default_value = "md")]
    format: ReportFormat,
}

fn parse_kind(s: &str) -> Result<StatisticKind, String> {
    s.parse::<StatisticKind>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            return Failure::usage(first.trim_start_matches("error: ")).report();
        }
    };
    let outcome = match cli.command {
        Command::Test(args) => cmd_test(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::RmtVerify(args) => cmd_rmt_verify(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn stdout_write(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::data(format!("stdout: {e}")))
}

fn render_test_report(r: &TestReport, orientation: Orientation, mu: &str) -> String {
    let decision = if r.reject {
        "reject H0: Sigma = I"
    } else {
        "fail to reject H0: Sigma = I"
    };
    let scale = match r.law.scale {
        hidimtest::asymptotics::Scale::Dimension => "p",
        hidimtest::asymptotics::Scale::SampleSize => "n",
    };
    let orientation = match orientation {
        Orientation::Rows => "rows",
        Orientation::Cols => "cols",
    };
    let lines = [
        ("test", r.statistic.kind.to_string()),
        ("orientation", orientation.to_string()),
        ("mu", mu.to_string()),
        ("p", r.context.p.to_string()),
        ("n", r.context.n.to_string()),
        ("y_n", format!("{:.6}", r.context.y_n)),
        ("delta", format!("{}", r.context.delta)),
        ("statistic", format!("{:.10e}", r.statistic.raw)),
        ("centering", format!("{:.10e}", r.law.centering)),
        ("scale", scale.to_string()),
        ("null_mean", format!("{:.10e}", r.law.mean)),
        ("null_variance", format!("{:.10e}", r.law.variance)),
        ("z", format!("{:.6}", r.z_score)),
        ("p_value", format!("{:.6e}", r.p_value)),
        ("alpha", format!("{}", r.alpha)),
        ("decision", decision.to_string()),
    ];
    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&format!("{k:<14}{v}\n"));
    }
    out
}

fn cmd_test(args: TestArgs) -> Result<(), Failure> {
    let x = data::load_matrix(&args.data, args.orientation, args.header)?;
    let mean: Option<Vec<f64>> = match args.mu.as_str() {
        "sample" => None,
        "zero" => Some(vec![0.0; x.p()]),
        path => Some(data::load_vector(Path::new(path), x.p())?),
    };
    match (args.kind, mean.is_some()) {
        (StatisticKind::LegacyClrt, false) => {
            return Err(Failure::usage(
                "legacy-clrt needs a known mean: pass --mu zero or --mu FILE",
            ))
        }
        (k, true) if k != StatisticKind::LegacyClrt => {
            return Err(Failure::usage(format!(
                "--mu {} applies only to legacy-clrt; {k} always centres at the sample mean",
                args.mu
            )))
        }
        _ => {}
    }
    let report = run_test_with_mean(&x, args.kind, args.alpha, args.delta, mean.as_deref()).map_err(|e| {
        let singular = matches!(e, Error::SingularCovariance { .. } | Error::DegenerateRatio { .. });
        let mut f = Failure::from(e);
        if singular && args.kind.is_clrt() {
            f.message.push_str("; the CLRT needs p < n, use --test new-lw for this data");
        }
        f
    })?;
    stdout_write(&render_test_report(&report, args.orientation, &args.mu))
}

fn load_config(spec: &str) -> Result<ExperimentConfig, Failure> {
    let path = Path::new(spec);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| Failure::data(format!("{spec}: {e}")))?
    } else if let Some(text) = bundled::lookup(spec) {
        text.to_string()
    } else {
        let names: Vec<&str> = bundled::names().collect();
        return Err(Failure::usage(format!(
            "no config file or bundled config named '{spec}'; bundled: {}",
            names.join(", ")
        )));
    };
    let mut cfg = ExperimentConfig::from_toml_str(&text).map_err(|e| Failure::usage(format!("{spec}: {e}")))?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        cfg.master_seed = seed
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{SEED_ENV}='{seed}' is not an unsigned integer")))?;
    }
    Ok(cfg)
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.list {
        let mut text = String::new();
        for name in bundled::names() {
            text.push_str(name);
            text.push('\n');
        }
        return stdout_write(&text);
    }
    let spec = args.config.as_deref().expect("clap enforces config");
    let mut cfg = load_config(spec)?;
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    cfg.validate().map_err(Failure::from)?;
    log::debug!(
        "{}: {} grid points, {} replications, seed {}",
        cfg.name,
        cfg.grid.len(),
        cfg.replications,
        cfg.master_seed
    );
    let result = run_experiment(&cfg, args.jobs)?;
    let format = match args.format {
        OutputFormat::Csv => ExportFormat::Csv,
        OutputFormat::Jsonl => ExportFormat::Jsonl,
    };
    let rows: Vec<CsvRow> = result.cells.iter().map(CsvRow::from).collect();
    let summary = report::render_markdown(&rows);
    match &args.out {
        Some(path) => {
            hidimtest::harness::export(&result, path, format)?;
            stdout_write(&summary)?;
            stdout_write(&format!("wrote {} rows to {}\n", rows.len(), path.display()))
        }
        None => {
            let mut buf = Vec::new();
            match format {
                ExportFormat::Csv => write_csv(&result, &mut buf)?,
                ExportFormat::Jsonl => write_jsonl(&result, &mut buf)?,
            }
            eprint!("{summary}");
            stdout_write(&String::from_utf8(buf).expect("export is UTF-8"))
        }
    }
}

fn cmd_rmt_verify(args: VerifyArgs) -> Result<(), Failure> {
    if !(args.tol > 0.0) {
        return Err(Failure::usage(format!("--tol must be positive, got {}", args.tol)));
    }
    for &y in &args.y {
        if !(y > 0.0 && y < 1.0) {
            return Err(Failure::usage(format!("--y values must lie in (0, 1), got {y}")));
        }
    }
    let rows = verify_identities(&args.y, &args.delta, args.tol);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<9}{:>7}{:>7}{:>23}{:>23}{:>11}{:>8}  {}\n",
        "identity", "y", "delta", "quadrature", "closed_form", "abs_diff", "nodes", "status"
    ));
    let mut failures = 0usize;
    for r in &rows {
        let status = if r.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!r.pass);
        match (r.quadrature, r.abs_diff, r.nodes) {
            (Some(q), Some(d), Some(nodes)) => out.push_str(&format!(
                "{:<9}{:>7}{:>7}{:>23.15e}{:>23.15e}{:>11.2e}{:>8}  {status}\n",
                r.identity.name(),
                r.y,
                r.delta,
                q,
                r.closed_form,
                d,
                nodes
            )),
            _ => out.push_str(&format!(
                "{:<9}{:>7}{:>7}{:>23}{:>23.15e}{:>11}{:>8}  {status} ({})\n",
                r.identity.name(),
                r.y,
                r.delta,
                "-",
                r.closed_form,
                "-",
                "-",
                r.error.as_deref().unwrap_or("unknown error")
            )),
        }
    }
    // The Marchenko–Pastur centring term, by real-line quadrature.
    for &y in &args.y {
        let closed = clrt_centering(y)?;
        let row = clrt_mp_integral(y);
        match row {
            Ok(q) => {
                let d = (q - closed).abs();
                let pass = d <= args.tol;
                failures += usize::from(!pass);
                out.push_str(&format!(
                    "{:<9}{:>7}{:>7}{:>23.15e}{:>23.15e}{:>11.2e}{:>8}  {}\n",
                    "MP-CLRT",
                    y,
                    "-",
                    q,
                    closed,
                    d,
                    "-",
                    if pass { "PASS" } else { "FAIL" }
                ));
            }
            Err(e) => {
                failures += 1;
                out.push_str(&format!("{:<9}{:>7}{:>7}  FAIL ({e})\n", "MP-CLRT", y, "-"));
            }
        }
    }
    let total = rows.len() + args.y.len();
    out.push_str(&format!("{} of {total} checks passed at tol {:e}\n", total - failures, args.tol));
    stdout_write(&out)?;
    if failures > 0 {
        return Err(Failure::new(
            Kind::Verification,
            format!("{failures} of {total} identity checks failed at tol {:e}", args.tol),
        ));
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let rows = report::load_rows(&args.result)?;
    if rows.is_empty() {
        return stdout_write(&format!("no rows in {}\n", args.result.display()));
    }
    let text = match args.format {
        ReportFormat::Md => report::render_markdown(&rows),
        ReportFormat::Csv => report::render_csv(&rows)?,
    };
    stdout_write(&text)
}
