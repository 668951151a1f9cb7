//! Command-line driver. Exit codes: 0 pass, 1 verification failure,
//! 2 usage or precondition error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::formal_algebra::{factorial, parse_rational, to_text, Rational};
use crate::hypergeom::{
    check_lambda, descendent_values, required_hbar_depth, sample_lambda, zstar_family, CorrelatorFamily,
    HypergeomConfig,
};
use crate::localization_oracle::{oracle_crosscheck, oracle_sum, OracleOptions};
use crate::mirror_engine::{case_i_check, case_ii_transform, mirror_identity_check, picard_fuchs_check, quintic_invariants};
use crate::recursion_lab::{
    equal_m_modified, inverse_composite, is_one_mod_hbar2, phi_law_check, phi_polynomiality_report, random_transforms,
    recursion_coeffs, two_coefficient_check, verify_recursion, zstar_classp_report, Regime,
};
use crate::report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mirrorlab", version, about = "Exact genus-0 invariants, mirror map and localization checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Dimension of the ambient projective space
    #[arg(long, global = true, default_value_t = 4)]
    pub m: usize,
    /// Degree of the hypersurface
    #[arg(long, global = true, default_value_t = 5)]
    pub l: usize,
    /// Truncation order in q
    #[arg(long, global = true, default_value_t = 6)]
    pub order: usize,
    /// Depth of the 1/hbar expansion for descendents
    #[arg(long, global = true)]
    pub hbar_depth: Option<usize>,
    /// Explicit torus weights, comma-separated rationals
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<String>>,
    /// Seed for sampling weights and random transformations
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel sums
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Quintic N_d and virtual counts n_d
    Invariants,
    /// Run one verification suite
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
    /// Graph-sum value of N_d compared with the series pipeline
    Oracle {
        #[arg(long)]
        degree: usize,
        /// Number of sampled weight tuples
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    PicardFuchs,
    CaseI,
    CaseIi,
    RecursionI,
    RecursionIi,
    RecursionCy,
    ClassP,
    PhiPoly,
    Transformations,
    MirrorIdentity,
    Descendents,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Output of a command before formatting.
struct Outcome {
    body: String,
    code: i32,
    diagnostic: Option<String>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Unsupported(_) | Error::Parse(_) | Error::DegenerateLambda(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_PASS
            };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(usage("--threads must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::Unsupported(format!("thread pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(o) => {
            if let Some(d) = &o.diagnostic {
                let _ = writeln!(err, "{d}");
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &o.body) {
                        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                }
                None => {
                    let _ = write!(out, "{}", o.body);
                }
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Invariants => cmd_invariants(cli),
        Command::Verify { check } => cmd_verify(cli, *check),
        Command::Oracle { degree, trials } => cmd_oracle(cli, *degree, *trials),
    }
}

fn require_quintic(cli: &Cli) -> Result<()> {
    if (cli.m, cli.l) != (4, 5) {
        return Err(usage(format!(
            "only the quintic (m=4, l=5) is supported here, got m={}, l={}",
            cli.m, cli.l
        )));
    }
    Ok(())
}

fn cmd_invariants(cli: &Cli) -> Result<Outcome> {
    require_quintic(cli)?;
    let table = quintic_invariants(cli.order)?;
    let rows: Vec<(usize, String, String)> = table.rows().map(|(d, a, b)| (d, to_text(a), to_text(b))).collect();
    let body = match cli.format {
        Format::Text => {
            let mut s = String::from("d\tN_d\tn_d\n");
            for (d, a, b) in &rows {
                s.push_str(&format!("{d}\t{a}\t{b}\n"));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows.iter().map(|(d, a, b)| json!({"d": d, "N": a, "n": b})).collect();
            json_text(&json!({"m": cli.m, "l": cli.l, "rows": rows}))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["d", "N_d", "n_d"]).map_err(csv_err)?;
            for (d, a, b) in &rows {
                w.write_record([d.to_string().as_str(), a, b]).map_err(csv_err)?;
            }
            csv_text(w)?
        }
    };
    let bad = table.non_integral();
    let (code, diagnostic) = if bad.is_empty() {
        (EXIT_PASS, None)
    } else {
        (EXIT_FAIL, Some(format!("non-integral virtual counts at degrees {bad:?}")))
    };
    Ok(Outcome { body, code, diagnostic })
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_err(e: csv::Error) -> Error {
    Error::Unsupported(format!("csv: {e}"))
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Unsupported(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Unsupported(format!("csv: {e}")))
}

fn explicit_lambda(cli: &Cli) -> Result<Option<Vec<Rational>>> {
    let Some(items) = &cli.lambda else {
        return Ok(None);
    };
    let lambda = items.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
    if lambda.len() != cli.m + 1 {
        return Err(usage(format!("--lambda needs {} weights, got {}", cli.m + 1, lambda.len())));
    }
    Ok(Some(lambda))
}

/// Explicit weights if given, otherwise weights sampled from `--seed`.
fn weights(cli: &Cli) -> Result<Vec<Rational>> {
    let bound = cli.order.max(1);
    match explicit_lambda(cli)? {
        Some(l) => {
            check_lambda(&l, bound)?;
            Ok(l)
        }
        None => Ok(sample_lambda(cli.m + 1, bound, cli.seed)),
    }
}

fn zstar(cli: &Cli, lambda: &[Rational]) -> Result<CorrelatorFamily> {
    zstar_family(&HypergeomConfig::hypersurface(cli.m, cli.l, cli.order)?, lambda)
}

fn require_calabi_yau(cli: &Cli, check: Check) -> Result<()> {
    if cli.l != cli.m + 1 {
        return Err(usage(format!("{check:?} needs l = m + 1, got m={}, l={}", cli.m, cli.l)));
    }
    Ok(())
}

fn verify_report(cli: &Cli, check: Check) -> Result<Report> {
    if cli.order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let cfg = HypergeomConfig::hypersurface(cli.m, cli.l, cli.order)?;
    match check {
        Check::PicardFuchs => {
            require_calabi_yau(cli, check)?;
            picard_fuchs_check(cli.m, cli.order)
        }
        Check::CaseI => case_i_check(&cfg),
        Check::CaseIi => Ok(case_ii_transform(&cfg)?.1),
        Check::RecursionI | Check::RecursionIi | Check::RecursionCy => {
            let regime = Regime::of(cli.m, cli.l)?;
            let want = match check {
                Check::RecursionI => Regime::SubM,
                Check::RecursionIi => Regime::EqualM,
                _ => Regime::CalabiYau,
            };
            if regime != want {
                return Err(usage(format!(
                    "{check:?} does not apply to m={}, l={} ({regime:?})",
                    cli.m, cli.l
                )));
            }
            let lambda = weights(cli)?;
            let mut y = zstar(cli, &lambda)?;
            if regime == Regime::EqualM {
                y = equal_m_modified(&y)?;
            }
            let c = recursion_coeffs(regime, cli.m, cli.l, &lambda, cli.order)?;
            let mut report = verify_recursion(&y, &c, cli.order)?;
            if regime == Regime::CalabiYau && report.passed() {
                report = report.merge(two_coefficient_check(&y, &c, cli.order)?);
            }
            Ok(report)
        }
        Check::ClassP => {
            require_calabi_yau(cli, check)?;
            let lambda = weights(cli)?;
            let y = zstar(cli, &lambda)?;
            let points: Vec<(Rational, Rational)> = sample_lambda(6, 1, cli.seed ^ 0x5eed)
                .chunks(2)
                .map(|p| (p[0].clone(), p[1].clone()))
                .collect();
            let c = recursion_coeffs(Regime::CalabiYau, cli.m, cli.l, &lambda, cli.order)?;
            Ok(zstar_classp_report(&y, cli.order, &points)?
                .merge(verify_recursion(&y, &c, cli.order)?)
                .merge(phi_polynomiality_report(&y, cli.order, cli.order)?))
        }
        Check::PhiPoly => {
            require_calabi_yau(cli, check)?;
            let y = zstar(cli, &weights(cli)?)?;
            phi_polynomiality_report(&y, cli.order, cli.order)
        }
        Check::Transformations => {
            require_calabi_yau(cli, check)?;
            let y = zstar(cli, &weights(cli)?)?;
            let mut report = Report::new();
            for t in random_transforms(cli.m + 1, cli.order, cli.seed) {
                report = report.merge(phi_law_check(&y, &t, cli.order, cli.order)?);
            }
            report.push(
                &format!("inverse composite of Z* = 1 mod hbar^-2 through q^{}", cli.order),
                "Z_i = 1 modulo hbar^-2",
                is_one_mod_hbar2(&inverse_composite(&y)?)?,
            );
            Ok(report)
        }
        Check::MirrorIdentity => {
            require_quintic(cli)?;
            mirror_identity_check(cli.order)
        }
        Check::Descendents => {
            let need = required_hbar_depth(cli.m, cli.order);
            let depth = cli.hbar_depth.unwrap_or(need);
            if depth < need {
                return Err(usage(format!("--hbar-depth {depth} too small for order {}; need {need}", cli.order)));
            }
            let values = descendent_values(cli.m, cli.order, depth)?;
            let mut report = Report::new();
            for (k, v) in values.iter().enumerate() {
                let d = k + 1;
                let expect = Rational::one() / num_traits::pow(Rational::from_integer(factorial(d as u64)), cli.m + 1);
                let failure = (v != &expect).then(|| format!("got {}, expected {}", to_text(v), to_text(&expect)));
                report.push(
                    &format!("<tau_{}(T_{})>_{d} = 1/({d}!)^{} = {}", d * cli.m + d - 2, cli.m, cli.m + 1, to_text(v)),
                    "S_P^m H^0 q^d coefficient = 1/(d!)^(m+1) hbar^(-(m+1)d)",
                    failure,
                );
            }
            Ok(report)
        }
    }
}

fn check_name(check: Check) -> String {
    check.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn report_body(cli: &Cli, title: &str, report: &Report, extra: Option<serde_json::Value>) -> Result<String> {
    let status = if report.passed() { "PASS" } else { "FAIL" };
    Ok(match cli.format {
        Format::Text => format!("{title}\n{}result: {status}\n", report.to_text()),
        Format::Json => {
            let mut v = json!({
                "command": title,
                "m": cli.m,
                "l": cli.l,
                "order": cli.order,
                "passed": report.passed(),
                "checks": report.checks,
            });
            if let (Some(serde_json::Value::Object(extra)), Some(obj)) = (extra, v.as_object_mut()) {
                obj.extend(extra);
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["identity", "anchor", "passed", "first_failure"]).map_err(csv_err)?;
            for c in &report.checks {
                w.write_record([
                    c.identity.as_str(),
                    c.anchor.as_str(),
                    if c.passed { "true" } else { "false" },
                    c.first_failure.as_deref().unwrap_or(""),
                ])
                .map_err(csv_err)?;
            }
            csv_text(w)?
        }
    })
}

fn cmd_verify(cli: &Cli, check: Check) -> Result<Outcome> {
    let report = verify_report(cli, check)?;
    let title = format!("verify {} (m={}, l={}, order={})", check_name(check), cli.m, cli.l, cli.order);
    let body = report_body(cli, &title, &report, None)?;
    Ok(Outcome {
        body,
        code: if report.passed() { EXIT_PASS } else { EXIT_FAIL },
        diagnostic: None,
    })
}

fn cmd_oracle(cli: &Cli, degree: usize, trials: usize) -> Result<Outcome> {
    require_quintic(cli)?;
    if !(1..=2).contains(&degree) {
        return Err(Error::Unsupported(format!("graph sums are implemented for degree 1 and 2, not {degree}")));
    }
    let (samples, pipeline, report) = match explicit_lambda(cli)? {
        Some(lambda) => {
            let v = oracle_sum(cli.m, cli.l, degree, &lambda, &OracleOptions::default())?;
            let pipeline = quintic_invariants(degree)?.big_n[degree - 1].clone();
            let failure = (v != pipeline)
                .then(|| format!("graph sum {} vs series pipeline {}", to_text(&v), to_text(&pipeline)));
            let report = Report::single(
                &format!("graph sum equals series N_{degree} = {}", to_text(&pipeline)),
                "N_d from the mirror transformation of S*_X",
                failure,
            );
            (vec![(lambda, v)], pipeline, report)
        }
        None => {
            if trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            let o = oracle_crosscheck(degree, trials, cli.seed)?;
            (o.samples, o.pipeline, o.report)
        }
    };
    let value = &samples[0].1;
    let body = match cli.format {
        Format::Text => {
            let mut s = format!("{}\n", to_text(value));
            for (lambda, v) in &samples {
                let l: Vec<String> = lambda.iter().map(to_text).collect();
                s.push_str(&format!("lambda=({})  sum={}\n", l.join(","), to_text(v)));
            }
            s.push_str(&format!("series pipeline: {}\n", to_text(&pipeline)));
            s.push_str(&report.to_text());
            s.push_str(&format!("result: {}\n", if report.passed() { "PASS" } else { "FAIL" }));
            s
        }
        Format::Json => {
            let rows: Vec<_> = samples
                .iter()
                .map(|(lambda, v)| json!({"lambda": lambda.iter().map(to_text).collect::<Vec<_>>(), "value": to_text(v)}))
                .collect();
            let extra = json!({"degree": degree, "value": to_text(value), "pipeline": to_text(&pipeline), "samples": rows});
            report_body(cli, &format!("oracle degree {degree}"), &report, Some(extra))?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lambda", "value", "pipeline"]).map_err(csv_err)?;
            for (lambda, v) in &samples {
                let l: Vec<String> = lambda.iter().map(to_text).collect();
                w.write_record([l.join(" ").as_str(), to_text(v).as_str(), to_text(&pipeline).as_str()])
                    .map_err(csv_err)?;
            }
            csv_text(w)?
        }
    };
    Ok(Outcome {
        body,
        code: if report.passed() { EXIT_PASS } else { EXIT_FAIL },
        diagnostic: None,
    })
}
