//! Command-line front end.
//!
//! [`run`] never prints; it returns the report text and an exit code so the
//! binary and the tests share one path.

mod report;
pub mod spec;

use std::fmt;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use crate::alpha::{alpha_k, closed_form, oracle_alpha_k, verify_certificate, AlphaError, AlphaResult, ORACLE_MAX_K};
use crate::ample::{nakai_moishezon_check, Verdict};
use crate::builder::{paper_torus_curves, BuildError};
use crate::lattice::{DivisorClass, Rational};
use crate::lct::{EffectiveDivisor, LctValue};

pub use spec::{parse_surface_spec, print_surface_spec, SpecError, SurfaceSpec, PAPER_SPEC};

/// Environment variable holding the worker-count hint.
pub const THREADS_ENV: &str = "ALPHACALC_THREADS";

/// `--spec` value naming the bundled paper surface.
pub const BUNDLED_PAPER: &str = "@paper";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Build,
    Ample,
    Alpha,
    Verify,
    Oracle,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Build => "build",
            Command::Ample => "ample",
            Command::Alpha => "alpha",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Text,
}

/// Inclusive range of `k` values, lower bound at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRange(RangeInclusive<u64>);

impl KRange {
    pub fn new(lo: u64, hi: u64) -> Result<KRange, String> {
        if lo == 0 {
            return Err("k must start at 1 or above".into());
        }
        if lo > hi {
            return Err(format!("empty k range {lo}..{hi}"));
        }
        Ok(KRange(lo..=hi))
    }

    pub fn values(&self) -> Vec<u64> {
        self.0.clone().collect()
    }

    pub fn start(&self) -> u64 {
        *self.0.start()
    }

    pub fn end(&self) -> u64 {
        *self.0.end()
    }
}

impl FromStr for KRange {
    type Err = String;

    /// `a..b` (inclusive) or a single `k`.
    fn from_str(s: &str) -> Result<KRange, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad k value `{t}`"));
        match s.split_once("..") {
            Some((a, b)) => KRange::new(parse(a)?, parse(b)?),
            None => {
                let k = parse(s)?;
                KRange::new(k, k)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecSource {
    Bundled,
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub spec: SpecSource,
    pub divisor_label: String,
    pub k_range: KRange,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub curves: Option<Vec<String>>,
    pub expect_paper: bool,
    pub certificate: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "alphacalc", version, about = "Exact quantized alpha-invariants of blown-up Hirzebruch surfaces")]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Print basis, curve classes and the intersection matrix
    Build(CommonArgs),
    /// Nakai-Moishezon check of a divisor against the ample curve list
    Ample(CommonArgs),
    /// Restricted alpha_k over the torus curve list for each k
    Alpha(CommonArgs),
    /// Check certificate divisors against kL
    Verify(CommonArgs),
    /// Cross-check alpha_k against exhaustive enumeration
    Oracle(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Surface spec file, or @paper for the bundled surface
    #[arg(long, default_value = BUNDLED_PAPER)]
    spec: String,
    /// Divisor label from the spec
    #[arg(long, default_value = "L")]
    divisor: String,
    /// k or an inclusive range a..b
    #[arg(long, default_value = "1")]
    k: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Comma-separated curve list overriding the spec's list
    #[arg(long, value_delimiter = ',')]
    curves: Option<Vec<String>>,
    /// Compare against the closed form; bundled paper surface only
    #[arg(long)]
    expect_paper: bool,
    /// Certificate file for `verify`
    #[arg(long)]
    certificate: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (command, a) = match self.command {
            CliCommand::Build(a) => (Command::Build, a),
            CliCommand::Ample(a) => (Command::Ample, a),
            CliCommand::Alpha(a) => (Command::Alpha, a),
            CliCommand::Verify(a) => (Command::Verify, a),
            CliCommand::Oracle(a) => (Command::Oracle, a),
        };
        Ok(RunConfig {
            command,
            spec: if a.spec == BUNDLED_PAPER {
                SpecSource::Bundled
            } else {
                SpecSource::Path(a.spec.into())
            },
            divisor_label: a.divisor,
            k_range: a.k.parse().map_err(CliError::Invalid)?,
            output_format: a.format,
            output_path: a.output,
            curves: a.curves,
            expect_paper: a.expect_paper,
            certificate: a.certificate,
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Alpha(#[from] AlphaError),
}

impl CliError {
    /// Parse and validation problems all exit with 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Report text and exit code: 0 on success, 1 when a check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

fn load_spec(source: &SpecSource) -> Result<(SurfaceSpec, bool), CliError> {
    let (name, text) = match source {
        SpecSource::Bundled => (BUNDLED_PAPER.to_string(), PAPER_SPEC.to_string()),
        SpecSource::Path(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            (p.display().to_string(), text)
        }
    };
    let spec = parse_surface_spec(&text).map_err(|source| CliError::Spec { path: name, source })?;
    let is_paper = spec == SurfaceSpec::paper();
    Ok((spec, is_paper))
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs one command and writes the report to `output_path` if set.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let outcome = match thread_count()? {
        None => dispatch(config)?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(e.to_string()))?
            .install(|| dispatch(config))?,
    };
    if let Some(path) = &config.output_path {
        std::fs::write(path, &outcome.report).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(outcome)
}

struct Context {
    spec: SurfaceSpec,
    is_paper: bool,
}

impl Context {
    fn divisor(&self, label: &str) -> Result<DivisorClass, CliError> {
        if !self.spec.divisors.contains_key(label) {
            return Err(CliError::Invalid(format!("spec declares no divisor `{label}`")));
        }
        Ok(self.spec.divisor_class(label)?)
    }

    fn curves(&self, config: &RunConfig, declared: &Option<Vec<String>>) -> Result<Vec<String>, CliError> {
        let list = match (&config.curves, declared) {
            (Some(c), _) | (None, Some(c)) => c.clone(),
            (None, None) => self.spec.model.curves().keys().cloned().collect(),
        };
        for label in &list {
            self.spec.model.curve(label)?;
        }
        Ok(list)
    }
}

fn dispatch(config: &RunConfig) -> Result<Outcome, CliError> {
    let (spec, is_paper) = load_spec(&config.spec)?;
    let cx = Context { spec, is_paper };
    match config.command {
        Command::Build => Ok(Outcome {
            code: 0,
            report: report::build(&cx.spec, config.output_format)?,
        }),
        Command::Ample => run_ample(&cx, config),
        Command::Alpha => run_alpha(&cx, config),
        Command::Verify => run_verify(&cx, config),
        Command::Oracle => run_oracle(&cx, config),
    }
}

fn run_ample(cx: &Context, config: &RunConfig) -> Result<Outcome, CliError> {
    let l = cx.divisor(&config.divisor_label)?;
    let curves = cx.curves(config, &cx.spec.ample_curves)?;
    let r = nakai_moishezon_check(&cx.spec.model, &l, &curves)?;
    Ok(Outcome {
        code: if r.verdict == Verdict::Pass { 0 } else { 1 },
        report: report::ample(&config.divisor_label, &r, config.output_format),
    })
}

fn run_alpha(cx: &Context, config: &RunConfig) -> Result<Outcome, CliError> {
    let l = cx.divisor(&config.divisor_label)?;
    let curves = cx.curves(config, &cx.spec.torus_curves)?;
    if config.expect_paper
        && !(cx.is_paper && config.divisor_label == "L" && curves == paper_torus_curves())
    {
        return Err(CliError::Invalid(
            "--expect-paper needs the bundled paper surface with divisor L and its torus curve list".into(),
        ));
    }
    let results = config
        .k_range
        .values()
        .into_par_iter()
        .map(|k| alpha_k(&cx.spec.model, &curves, &l, k))
        .collect::<Result<Vec<_>, _>>()?;
    let matches: Option<Vec<bool>> = config
        .expect_paper
        .then(|| results.iter().map(|r| r.alpha_k == closed_form(r.k)).collect());
    let failed = matches.as_ref().is_some_and(|m| m.contains(&false));
    Ok(Outcome {
        code: i32::from(failed),
        report: report::alpha(&curves, &results, matches.as_deref(), config.output_format),
    })
}

fn run_oracle(cx: &Context, config: &RunConfig) -> Result<Outcome, CliError> {
    if config.k_range.end() > ORACLE_MAX_K {
        return Err(CliError::Invalid(format!(
            "oracle supports k up to {ORACLE_MAX_K}, got {}",
            config.k_range.end()
        )));
    }
    let l = cx.divisor(&config.divisor_label)?;
    let curves = cx.curves(config, &cx.spec.torus_curves)?;
    let pairs = config
        .k_range
        .values()
        .into_par_iter()
        .map(|k| {
            let solver = alpha_k(&cx.spec.model, &curves, &l, k)?;
            let oracle = oracle_alpha_k(&cx.spec.model, &curves, &l, k)?;
            Ok((solver, oracle))
        })
        .collect::<Result<Vec<(AlphaResult, AlphaResult)>, AlphaError>>()?;
    let failed = pairs.iter().any(|(a, b)| a != b);
    Ok(Outcome {
        code: i32::from(failed),
        report: report::oracle(&pairs, config.output_format),
    })
}

/// One certificate to check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub k: u64,
    pub divisor: EffectiveDivisor,
    pub claimed_alpha: Option<Rational>,
}

/// Outcome of checking one certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub k: u64,
    pub equivalent: bool,
    pub lct: LctValue,
    /// `k·lct`, the value the certificate bounds `α_k` by.
    pub bound: LctValue,
    pub claim_holds: Option<bool>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.equivalent && self.claim_holds != Some(false)
    }
}

fn run_verify(cx: &Context, config: &RunConfig) -> Result<Outcome, CliError> {
    let path = config
        .certificate
        .as_ref()
        .ok_or_else(|| CliError::Invalid("verify needs --certificate".into()))?;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let json: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let certificates = parse_certificates(&json, &config.k_range)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let l = cx.divisor(&config.divisor_label)?;
    let mut reports = Vec::new();
    for c in &certificates {
        let check = verify_certificate(&cx.spec.model, &c.divisor, c.k, &l)?;
        let bound = match &check.lct {
            LctValue::Finite(v) => LctValue::Finite(v * Rational::from_integer(BigInt::from(c.k))),
            LctValue::Infinity => LctValue::Infinity,
        };
        let claim_holds = c.claimed_alpha.as_ref().map(|a| bound.finite() == Some(a));
        reports.push(CertificateReport {
            k: c.k,
            equivalent: check.equivalent,
            lct: check.lct,
            bound,
            claim_holds,
        });
    }
    let failed = reports.iter().any(|r| !r.passed());
    Ok(Outcome {
        code: i32::from(failed),
        report: report::verify(&reports, config.output_format),
    })
}

fn parse_coefficient(v: &Value) -> Result<Rational, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(BigInt::from(i)))
            .ok_or_else(|| format!("coefficient {n} is not an integer; write it as \"p/q\"")),
        Value::String(s) => s.parse::<Rational>().map_err(|_| format!("bad rational `{s}`")),
        other => Err(format!("bad coefficient {other}")),
    }
}

fn parse_witness(v: &Value) -> Result<EffectiveDivisor, String> {
    let map = v.as_object().ok_or("witness must be an object of label: coefficient")?;
    let pairs = map
        .iter()
        .map(|(label, c)| parse_coefficient(c).map(|c| (label.clone(), c)))
        .collect::<Result<Vec<_>, _>>()?;
    EffectiveDivisor::from_pairs(pairs).map_err(|e| e.to_string())
}

/// Accepts an AlphaResult object, an array of them, or a bare witness
/// object (which takes its single `k` from the command line).
pub fn parse_certificates(json: &Value, k_range: &KRange) -> Result<Vec<Certificate>, String> {
    let from_result = |obj: &serde_json::Map<String, Value>| -> Result<Certificate, String> {
        let k = obj
            .get("k")
            .and_then(Value::as_u64)
            .filter(|k| *k > 0)
            .ok_or("certificate needs a positive integer `k`")?;
        let claimed_alpha = obj.get("alpha_k").map(parse_coefficient).transpose()?;
        Ok(Certificate {
            k,
            divisor: parse_witness(&obj["witness"])?,
            claimed_alpha,
        })
    };
    match json {
        Value::Array(items) => items
            .iter()
            .map(|item| match item.as_object() {
                Some(obj) if obj.contains_key("witness") => from_result(obj),
                _ => Err("array entries must be objects with `k` and `witness`".to_string()),
            })
            .collect(),
        Value::Object(obj) if obj.contains_key("witness") => Ok(vec![from_result(obj)?]),
        Value::Object(_) => {
            if k_range.start() != k_range.end() {
                return Err("a bare witness needs a single --k".into());
            }
            Ok(vec![Certificate {
                k: k_range.start(),
                divisor: parse_witness(json)?,
                claimed_alpha: None,
            }])
        }
        _ => Err("certificate must be a JSON object or array".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn k_ranges() {
        assert_eq!("1..4".parse::<KRange>().unwrap().values(), vec![1, 2, 3, 4]);
        assert_eq!("7".parse::<KRange>().unwrap().values(), vec![7]);
        assert!("0..3".parse::<KRange>().is_err());
        assert!("4..3".parse::<KRange>().is_err());
        assert!("x".parse::<KRange>().is_err());
    }

    #[test]
    fn certificate_shapes() {
        let one = KRange::new(2, 2).unwrap();
        let bare = parse_certificates(&json!({"E1": 16, "Et1": "9"}), &one).unwrap();
        assert_eq!(bare.len(), 1);
        assert_eq!(bare[0].k, 2);
        let full = json!({"k": 3, "alpha_k": "3/23", "m_star": 23, "witness": {"E1": "23"}});
        let parsed = parse_certificates(&full, &KRange::new(1, 5).unwrap()).unwrap();
        assert_eq!(parsed[0].claimed_alpha, Some(Rational::new(3.into(), 23.into())));
        let list = json!([full, {"k": 1, "witness": {"E1": 7}}]);
        assert_eq!(parse_certificates(&list, &one).unwrap().len(), 2);
        assert!(parse_certificates(&json!({"E1": 1}), &KRange::new(1, 2).unwrap()).is_err());
        assert!(parse_certificates(&json!({"E1": "-1"}), &one).is_err());
        assert!(parse_certificates(&json!({"E1": 0.5}), &one).is_err());
        assert!(parse_certificates(&json!({"k": 0, "witness": {}}), &one).is_err());
        assert!(parse_certificates(&json!(3), &one).is_err());
    }
}
