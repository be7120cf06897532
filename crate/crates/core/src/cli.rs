//! `sphere-dpp` command-line interface.
//!
//! Exit codes: 0 on success, 2 when the invocation is rejected before any
//! computation (bad flags, bad integrand, non-square `N` for `jacobi`, ...),
//! 1 on runtime failures. Every failure prints a single `error: ...` line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::estimate;
use crate::harness::{
    derive_seed, emit_plot, fit_loglog_slope, read_summary, rep_rng, resolve_integrand,
    run_variance_study, write_records, write_records_to, write_slopes, write_summary,
    ExperimentConfig, Record, SlopeFit, VarianceSummary,
};
use crate::orthopoly::is_perfect_square;
use crate::samplers::{self, JacobiSampler, Method, SpiralConfig, WeightedSample};

#[derive(Debug, Parser)]
#[command(
    name = "sphere-dpp",
    version,
    about = "DPP Monte Carlo quadrature on the unit sphere"
)]
pub struct Cli {
    /// key=value file of default flags; explicit flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one node set and write `x,y,z,weight` rows
    Sample(SampleArgs),
    /// Print one estimate per repetition in the raw-record CSV schema
    Estimate(EstimateArgs),
    /// Run a repetition study and write raw.csv, summary.csv, slopes.csv, plot.svg
    VarianceStudy(StudyArgs),
    /// Fit log-log variance slopes to an existing summary.csv
    Slope(SlopeArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// iid, spiral, spherical or jacobi
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    /// Number of nodes
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Spiral constant C
    #[arg(long, default_value_t = SpiralConfig::DEFAULT_C)]
    pub spiral_c: f64,
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Builtin (f1, f2, const1, coord_z) or expr:<expression in x, y, z>
    #[arg(long, default_value = "f1")]
    pub integrand: String,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = SpiralConfig::DEFAULT_C)]
    pub spiral_c: f64,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Comma-separated methods
    #[arg(long, value_delimiter = ',', value_parser = parse_method,
          default_value = "iid,spiral,spherical,jacobi")]
    pub methods: Vec<Method>,
    /// Comma-separated, strictly ascending node counts
    #[arg(long, value_delimiter = ',', default_value = "16,36,64,144,256")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value = "f1")]
    pub integrand: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = SpiralConfig::DEFAULT_C)]
    pub spiral_c: f64,
    /// Output directory, created if missing
    #[arg(long, default_value = "variance-study")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SlopeArgs {
    /// summary.csv produced by variance-study
    #[arg(long)]
    pub summary: PathBuf,
    /// Write the fits to this CSV file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a log-log plot to this SVG file
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure::Usage(e.to_string())
    }

    fn runtime(e: impl ToString) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn single_line(msg: &str) -> String {
    let msg = msg.trim();
    let msg = msg.strip_prefix("error:").unwrap_or(msg).trim();
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = expand_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli, out, err),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = write!(out, "{}", e.render());
                Ok(())
            }
            _ => {
                let text = e.render().to_string();
                let first = text
                    .lines()
                    .find(|l| !l.trim().is_empty())
                    .unwrap_or("invalid arguments");
                Err(Failure::Usage(first.to_string()))
            }
        },
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {}", single_line(&m));
            2
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {}", single_line(&m));
            1
        }
    }
}

const SUBCOMMANDS: [&str; 4] = ["sample", "estimate", "variance-study", "slope"];

/// Splices the entries of a `--config` file in as flags right after the
/// subcommand, skipping any key that is also given explicitly.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, Failure> {
    let strings: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let mut path = None;
    for (i, a) in strings.iter().enumerate() {
        if a == "--config" {
            path = strings.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let Some(sub) = strings
        .iter()
        .skip(1)
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
    else {
        return Ok(args);
    };
    let entries = read_config(Path::new(&path))?;
    let explicit = |key: &str| {
        let flag = format!("--{key}");
        strings
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let mut out = args;
    let insert_at = sub + 2;
    let mut injected = Vec::new();
    for (key, value) in entries {
        if !explicit(&key) {
            injected.push(OsString::from(format!("--{key}")));
            injected.push(OsString::from(value));
        }
    }
    out.splice(insert_at..insert_at, injected);
    Ok(out)
}

fn read_config(path: &Path) -> std::result::Result<Vec<(String, String)>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("config {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::usage(format!(
                "config {} line {}: expected key=value",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            return Err(Failure::usage(format!(
                "config {} line {}: nested config files are not supported",
                path.display(),
                lineno + 1
            )));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn dispatch(
    cli: Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::VarianceStudy(a) => cmd_variance_study(a, out, err),
        Command::Slope(a) => cmd_slope(a, out),
    }
}

fn check_size(method: Method, n: usize) -> std::result::Result<(), Failure> {
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    if method == Method::Jacobi && !is_perfect_square(n) {
        return Err(Failure::usage(Error::NotPerfectSquare { n }));
    }
    Ok(())
}

/// Draws with a prepared Jacobi sampler when one is given.
fn draw_one(
    method: Method,
    n: usize,
    spiral: &SpiralConfig,
    jacobi: Option<&JacobiSampler>,
    seed: u64,
) -> Result<WeightedSample> {
    let mut rng = rep_rng(seed);
    let sample = match (method, jacobi) {
        (Method::Jacobi, Some(s)) => s.sample(&mut rng)?,
        _ => samplers::draw(method, n, spiral, &mut rng)?,
    };
    Ok(sample.with_seed(seed))
}

fn cmd_sample(a: SampleArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    check_size(a.method, a.n)?;
    let spiral = SpiralConfig::new(a.spiral_c).map_err(Failure::usage)?;
    let seed = derive_seed(a.seed, a.method, a.n, 0);
    let sample = draw_one(a.method, a.n, &spiral, None, seed).map_err(Failure::runtime)?;

    let mut body = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut body);
        let rows = std::iter::once(["x", "y", "z", "weight"].map(String::from)).chain(
            sample
                .iter()
                .map(|(p, wt)| [p.x, p.y, p.z, wt].map(|v| format!("{v:.16e}"))),
        );
        for row in rows {
            w.write_record(&row).map_err(Failure::runtime)?;
        }
        w.flush().map_err(Failure::runtime)?;
    }
    match &a.out {
        Some(path) => fs::write(path, &body).map_err(|e| Failure::runtime(Error::io(path, e))),
        None => out.write_all(&body).map_err(Failure::runtime),
    }
}

fn cmd_estimate(a: EstimateArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    check_size(a.method, a.n)?;
    if a.reps == 0 {
        return Err(Failure::usage("--reps must be at least 1"));
    }
    let spiral = SpiralConfig::new(a.spiral_c).map_err(Failure::usage)?;
    let integrand = resolve_integrand(&a.integrand).map_err(Failure::usage)?;
    let jacobi = match a.method {
        Method::Jacobi => Some(JacobiSampler::new(a.n).map_err(Failure::usage)?),
        _ => None,
    };
    let mut records = Vec::with_capacity(a.reps);
    for rep in 0..a.reps {
        let seed = derive_seed(a.seed, a.method, a.n, rep);
        let value = draw_one(a.method, a.n, &spiral, jacobi.as_ref(), seed)
            .and_then(|s| estimate(&s, &integrand))
            .map_err(|source| {
                Failure::runtime(Error::Repetition {
                    method: a.method.tag().to_string(),
                    n: a.n,
                    rep,
                    seed,
                    source: Box::new(source),
                })
            })?
            .value;
        records.push(Record {
            method: a.method,
            integrand: integrand.name().to_string(),
            n: a.n,
            rep,
            seed,
            estimate: value,
        });
    }
    write_records_to(out, &records).map_err(Failure::runtime)
}

fn print_fits(out: &mut dyn Write, fits: &[SlopeFit]) -> std::result::Result<(), Failure> {
    let mut text = format!(
        "{:<10} {:>10} {:>12} {:>8}\n",
        "method", "slope", "intercept", "r2"
    );
    for f in fits {
        text.push_str(&format!(
            "{:<10} {:>10.4} {:>12.4} {:>8.4}\n",
            f.method.tag(),
            f.slope,
            f.intercept,
            f.r_squared
        ));
    }
    out.write_all(text.as_bytes()).map_err(Failure::runtime)
}

/// Fits every method, reporting (not failing on) degenerate ones.
fn fit_methods(summary: &VarianceSummary, err: &mut dyn Write) -> Vec<SlopeFit> {
    summary
        .methods()
        .into_iter()
        .filter_map(|m| match fit_loglog_slope(summary, m) {
            Ok(f) => Some(f),
            Err(e) => {
                let _ = writeln!(err, "warning: {}", single_line(&e.to_string()));
                None
            }
        })
        .collect()
}

fn cmd_variance_study(
    a: StudyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let cfg = ExperimentConfig {
        methods: a.methods,
        n_list: a.n_list,
        reps: a.reps,
        integrand: a.integrand,
        master_seed: a.seed,
        spiral: SpiralConfig::new(a.spiral_c).map_err(Failure::usage)?,
    };
    cfg.validate().map_err(Failure::usage)?;
    let study = run_variance_study(&cfg).map_err(Failure::runtime)?;
    fs::create_dir_all(&a.out_dir).map_err(|e| Failure::runtime(Error::io(&a.out_dir, e)))?;
    let fits = fit_methods(&study.summary, err);
    let dir = &a.out_dir;
    write_records(&dir.join("raw.csv"), &study.records).map_err(Failure::runtime)?;
    write_summary(&dir.join("summary.csv"), &study.summary).map_err(Failure::runtime)?;
    write_slopes(&dir.join("slopes.csv"), &fits).map_err(Failure::runtime)?;
    emit_plot(&dir.join("plot.svg"), &study.summary, &fits).map_err(Failure::runtime)?;
    print_fits(out, &fits)
}

fn cmd_slope(a: SlopeArgs, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let summary = read_summary(&a.summary).map_err(Failure::runtime)?;
    let fits = summary
        .methods()
        .into_iter()
        .map(|m| fit_loglog_slope(&summary, m))
        .collect::<Result<Vec<_>>>()
        .map_err(Failure::runtime)?;
    if let Some(path) = &a.out {
        write_slopes(path, &fits).map_err(Failure::runtime)?;
    }
    if let Some(path) = &a.plot {
        emit_plot(path, &summary, &fits).map_err(Failure::runtime)?;
    }
    print_fits(out, &fits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("sphere-dpp").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_two_on_one_line() {
        for args in [
            &["sample", "--method", "jacobi", "--n", "10"][..],
            &["sample", "--method", "nope", "--n", "10"][..],
            &[
                "estimate",
                "--method",
                "iid",
                "--n",
                "4",
                "--integrand",
                "expr:1+",
            ][..],
            &["variance-study", "--methods", "iid", "--n-list", "8,4"][..],
            &["sample", "--n", "4"][..],
            &[][..],
        ] {
            let (code, _, err) = run_capture(args);
            assert_eq!(code, 2, "{args:?}: {err}");
            assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
            assert!(err.starts_with("error: "), "{err}");
        }
    }

    #[test]
    fn bad_expression_reports_offset() {
        let (_, _, err) = run_capture(&[
            "estimate",
            "--method",
            "iid",
            "--n",
            "4",
            "--integrand",
            "expr:1+",
        ]);
        assert!(err.contains("offset 2"), "{err}");
    }

    #[test]
    fn help_lists_defaults() {
        let (code, out, _) = run_capture(&["variance-study", "--help"]);
        assert_eq!(code, 0);
        for needle in [
            "--methods",
            "--n-list",
            "--reps",
            "--integrand",
            "--seed",
            "--spiral-c",
            "--out-dir",
            "--config",
        ] {
            assert!(out.contains(needle), "{needle} missing from help");
        }
        assert!(out.contains("[default: 200]"));
        assert!(out.contains("[default: 3.6]"));
        assert!(out.contains("[default: f1]"));
    }

    #[test]
    fn estimate_prints_raw_rows() {
        let (code, out, err) = run_capture(&[
            "estimate",
            "--method",
            "spherical",
            "--n",
            "64",
            "--integrand",
            "f1",
            "--reps",
            "5",
            "--seed",
            "1",
        ]);
        assert_eq!(code, 0, "{err}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "method,integrand,N,rep,seed,estimate");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn config_entries_yield_to_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# study\nmethod = spiral\nn = 10\nseed=7\n").unwrap();
        let c = cfg.to_str().unwrap();
        let (code, out, err) = run_capture(&["sample", "--config", c]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().count(), 11);
        let (code, out, _) = run_capture(&["sample", "--config", c, "--n", "4"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        let (code, _, _) = run_capture(&["--config", c, "sample", "--method", "jacobi"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn malformed_config_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.cfg");
        fs::write(&cfg, "method spiral\n").unwrap();
        let (code, _, err) = run_capture(&["sample", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("line 1"));
        let (code, _, _) = run_capture(&["sample", "--config", "/nonexistent/x.cfg"]);
        assert_eq!(code, 2);
    }
}
