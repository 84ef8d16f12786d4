//! `kpzlab` — run identity tests and sampling experiments from flat
//! key=value configs.
//!
//! ```text
//! kpzlab run   [--config FILE] (--test ID | --sample ID) [--KEY VALUE]... [--output PATH] [--no-timing]
//! kpzlab suite MANIFEST [--output PATH] [--no-timing]
//! kpzlab list
//! ```
//!
//! Exit codes: 0 all tests pass, 1 a test failed, 2 parse/config/unknown
//! id, 3 runtime error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use kpzlab::config::ExperimentConfig;
use kpzlab::stats::{run_identity_test, run_sample_experiment, SampleRow, TestReport, MODEL_IDS, TEST_IDS};
use kpzlab::Error;

const USAGE: &str = "usage:
  kpzlab run [--config FILE] (--test ID | --sample ID) [--KEY VALUE]... [--output PATH] [--no-timing]
  kpzlab suite MANIFEST [--output PATH] [--no-timing]
  kpzlab list";

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Config(_) | Error::UnknownTest(_) | Error::UnknownModel(_) | Error::BudgetExceeded { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Default)]
struct Flags {
    output: Option<PathBuf>,
    no_timing: bool,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let outcome = match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("suite") => cmd_suite(&args[1..]),
        Some("list") => {
            println!("tests:  {}", TEST_IDS.join(" "));
            println!("models: {}", MODEL_IDS.join(" "));
            Ok(true)
        }
        Some("-h" | "--help" | "help") => {
            println!("{USAGE}");
            Ok(true)
        }
        _ => Err(Failure::Usage(USAGE.to_string())),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("kpzlab: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("kpzlab: {m}");
            ExitCode::from(3)
        }
    }
}

/// Parses `--config`, `--KEY VALUE` overrides and the output flags, in order,
/// so later overrides win over the config file and earlier flags.
fn parse_run_args(args: &[String], base_dir: Option<&Path>) -> Result<(ExperimentConfig, Flags), Failure> {
    let mut cfg = ExperimentConfig::default();
    let mut flags = Flags::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let key = arg
            .strip_prefix("--")
            .or_else(|| arg.contains('=').then_some(arg.as_str()))
            .ok_or_else(|| Failure::Usage(format!("unexpected argument `{arg}`\n{USAGE}")))?;
        if key == "no-timing" {
            flags.no_timing = true;
            continue;
        }
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k, v.to_string()),
            None => (key, it.next().ok_or_else(|| Failure::Usage(format!("--{key} needs a value")))?.clone()),
        };
        match key {
            "config" => {
                let path = resolve(base_dir, &value);
                let text = fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                let file = ExperimentConfig::parse(&text)?;
                merge(&mut cfg, file);
            }
            "output" => flags.output = Some(resolve(base_dir, &value)),
            _ => cfg.set(key, &value)?,
        }
    }
    cfg.validate()?;
    if let Some(out) = &cfg.output_path {
        flags.output.get_or_insert_with(|| resolve(base_dir, out));
    }
    Ok((cfg, flags))
}

fn resolve(base: Option<&Path>, p: &str) -> PathBuf {
    match base {
        Some(b) if Path::new(p).is_relative() => b.join(p),
        _ => PathBuf::from(p),
    }
}

fn merge(into: &mut ExperimentConfig, from: ExperimentConfig) {
    if from.test_id.is_some() {
        into.test_id = from.test_id;
    }
    if from.model_id.is_some() {
        into.model_id = from.model_id;
    }
    if from.replicas.is_some() {
        into.replicas = from.replicas;
    }
    if from.output_path.is_some() {
        into.output_path = from.output_path;
    }
    if from.seed != 0 {
        into.seed = from.seed;
    }
    into.params.extend(from.params);
}

enum Outcome {
    Report(TestReport),
    Samples(Vec<SampleRow>),
}

fn execute(cfg: &ExperimentConfig, no_timing: bool) -> Result<Outcome, Failure> {
    if let Some(id) = &cfg.test_id {
        let mut r = run_identity_test(id, cfg, cfg.seed)?;
        if no_timing {
            r.runtime = 0.0;
        }
        Ok(Outcome::Report(r))
    } else {
        let id = cfg.model_id.as_deref().expect("validated");
        Ok(Outcome::Samples(run_sample_experiment(id, cfg, cfg.seed)?))
    }
}

fn samples_csv(rows: &[SampleRow]) -> String {
    let mut s = String::from("replica,seed,value\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.replica, r.seed, r.value).expect("string write");
    }
    s
}

fn reports_json(reports: &[TestReport]) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(reports).map_err(|e| Failure::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: &[String]) -> Result<bool, Failure> {
    let (cfg, flags) = parse_run_args(args, None)?;
    match execute(&cfg, flags.no_timing)? {
        Outcome::Report(r) => {
            eprintln!("{}", summary_line(&r));
            emit(&reports_json(std::slice::from_ref(&r))?, flags.output.as_deref())?;
            Ok(r.pass)
        }
        Outcome::Samples(rows) => {
            emit(&samples_csv(&rows), flags.output.as_deref())?;
            Ok(true)
        }
    }
}

/// Each non-comment manifest line is one run: a config file path and/or
/// `key=value` overrides, separated by whitespace. Relative paths resolve
/// against the manifest's directory. Sampling lines write their CSV to the
/// line's `output` and are not part of the summary.
fn cmd_suite(args: &[String]) -> Result<bool, Failure> {
    let mut flags = Flags::default();
    let mut manifest = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        match a.as_str() {
            "--no-timing" => flags.no_timing = true,
            "--output" => flags.output = Some(it.next().ok_or_else(|| Failure::Usage("--output needs a value".into()))?.into()),
            _ if manifest.is_none() && !a.starts_with("--") => manifest = Some(PathBuf::from(a)),
            _ => return Err(Failure::Usage(format!("unexpected argument `{a}`\n{USAGE}"))),
        }
    }
    let manifest = manifest.ok_or_else(|| Failure::Usage(USAGE.to_string()))?;
    let text = fs::read_to_string(&manifest).map_err(|e| Failure::Usage(format!("{}: {e}", manifest.display())))?;
    let base = manifest.parent().filter(|p| !p.as_os_str().is_empty());

    let mut runs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<String> = line
            .split_whitespace()
            .map(|t| if t.contains('=') || t.starts_with("--") { t.to_string() } else { format!("--config={t}") })
            .collect();
        let parsed = parse_run_args(&tokens, base).map_err(|f| match f {
            Failure::Usage(m) => Failure::Usage(format!("{}:{}: {m}", manifest.display(), i + 1)),
            other => other,
        })?;
        runs.push(parsed);
    }

    let mut reports = Vec::new();
    for (cfg, line_flags) in &runs {
        match execute(cfg, flags.no_timing)? {
            Outcome::Report(r) => {
                eprintln!("{}", summary_line(&r));
                reports.push(r);
            }
            Outcome::Samples(rows) => emit(&samples_csv(&rows), line_flags.output.as_deref())?,
        }
    }
    println!("{}", summary_table(&reports));
    if let Some(out) = &flags.output {
        emit(&reports_json(&reports)?, Some(out))?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn summary_line(r: &TestReport) -> String {
    format!(
        "{} {}: statistic {:.6} threshold {} ({} replicas, {:.1}s)",
        if r.pass { "PASS" } else { "FAIL" },
        r.test_id,
        r.statistic,
        r.threshold,
        r.replica_count,
        r.runtime
    )
}

fn summary_table(reports: &[TestReport]) -> String {
    let mut s = format!("{:<12} {:>14} {:>12} {:>5} {:>9}\n", "test_id", "statistic", "threshold", "pass", "seconds");
    for r in reports {
        writeln!(
            s,
            "{:<12} {:>14.6} {:>12} {:>5} {:>9.2}",
            r.test_id, r.statistic, r.threshold, r.pass, r.runtime
        )
        .expect("string write");
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    write!(s, "{} run, {} failed", reports.len(), failed).expect("string write");
    s
}
