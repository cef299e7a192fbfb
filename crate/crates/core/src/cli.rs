//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 claim failed, 2 usage or parse error, 3 insufficient
//! precision. JSON output carries `"schema": 1` and echoes the configuration.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::error::Error;
use crate::haar::{self, e_prefix_series, estimate_y0, with_rerun, MCReport, SIGMAS};
use crate::padic::{text::parse, Prime};
use crate::vanderput::{self, weighted_rows, VdPSeries};
use crate::zoo::{self, balls::sigma, ClaimContext, ZooConfig, ZooEntry};

pub const SCHEMA: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "padic-zoo", version, about = "Evaluate and verify pathological p-adic functions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    #[arg(long, global = true, default_value_t = 2)]
    pub prime: u64,
    /// Working precision in digits (at least 8).
    #[arg(long, global = true, default_value_t = 64, value_parser = parse_precision)]
    pub precision: i64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Size of the canonical independent family.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Which member of the family is the index set N.
    #[arg(long, default_value_t = 0)]
    pub bit: u32,
    /// Binomial exponent, any p-adic text form in Z_p.
    #[arg(long, default_value = "1")]
    pub beta: String,
    /// Base point of the kink function.
    #[arg(long, default_value = "0")]
    pub a: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// `|a_n| n` (zero-derivative test).
    N1,
    /// `|a_n| n^alpha` (Lipschitz test).
    Lip,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaarStat {
    Y0,
    EPrefix,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List entries with their claims and witnesses.
    List {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Evaluate an entry at a point.
    Eval {
        entry: String,
        /// A point such as `p^2`, `1/(1-p)` or `1 0 2 * p^-1 (mod p^6)`.
        x: String,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Run one claim of an entry.
    Verify {
        entry: String,
        claim: String,
        #[command(flatten)]
        family: FamilyArgs,
        /// Witness sequence length.
        #[arg(long, default_value_t = 40)]
        steps: usize,
        /// Random points or Monte Carlo samples.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Digit pairs for prefix statistics.
        #[arg(long, default_value_t = 10)]
        pairs: u32,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// Van der Put coefficient table of an entry.
    Table {
        entry: String,
        #[arg(long, value_enum, default_value_t = Criterion::N1)]
        criterion: Criterion,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        /// Only the indices sigma(n) = (n mod (p-1) + 1) p^(n div (p-1)), n = 0..=n_max.
        #[arg(long)]
        sigma: bool,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Haar Monte Carlo estimates.
    Haar {
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Largest number of digit pairs for the prefix statistic.
        #[arg(long, default_value_t = 10)]
        pairs: u32,
        #[arg(long, value_enum, default_value_t = HaarStat::Both)]
        stat: HaarStat,
    },
}

fn parse_precision(s: &str) -> Result<i64, String> {
    let n: i64 = s.parse().map_err(|e| format!("{e}"))?;
    if n < 8 {
        return Err("precision must be at least 8".into());
    }
    Ok(n)
}

/// What a command produced: the report and its exit code.
struct Outcome {
    json: Value,
    text: String,
    csv: String,
    code: i32,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InsufficientPrecision { .. } => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

fn error_message(e: &Error) -> String {
    match e {
        Error::InsufficientPrecision { needed: Some(n), .. } => {
            format!("{e}\nhint: rerun with --precision {} or give x to more digits", (*n).max(8))
        }
        _ => e.to_string(),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` or `--out`. Diagnostics go to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_PASS {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let g = cli.global.clone();
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {}", error_message(&e));
            return exit_code(&e);
        }
    };
    let body = match g.format {
        Format::Json => {
            let mut v = json!({"schema": SCHEMA});
            if let (Some(dst), Value::Object(src)) = (v.as_object_mut(), outcome.json) {
                dst.extend(src);
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize"))
        }
        Format::Csv => outcome.csv,
        Format::Text => outcome.text,
    };
    let written = match &g.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(body.as_bytes())),
        None => out.write_all(body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn zoo_config(g: &GlobalArgs, f: &FamilyArgs) -> crate::Result<(ZooConfig, Value)> {
    let prime = Prime::new(g.prime)?;
    let mut cfg = ZooConfig::new(prime);
    cfg.precision = g.precision;
    cfg.seed = g.seed;
    cfg.family_size = f.k;
    cfg.member_bit = f.bit;
    cfg.beta = parse(&f.beta, prime, g.precision)?;
    cfg.a = parse(&f.a, prime, g.precision)?;
    let echo = json!({
        "prime": prime.get(),
        "precision": g.precision,
        "seed": g.seed,
        "k": f.k,
        "bit": f.bit,
        "beta": cfg.beta.to_string(),
        "a": cfg.a.to_string(),
    });
    Ok((cfg, echo))
}

fn base_echo(g: &GlobalArgs) -> crate::Result<(Prime, Value)> {
    let prime = Prime::new(g.prime)?;
    Ok((prime, json!({"prime": prime.get(), "precision": g.precision, "seed": g.seed})))
}

fn execute(cli: &Cli) -> crate::Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::List { family } => list(g, family),
        Command::Eval { entry, x, family } => eval(g, family, entry, x),
        Command::Verify {
            entry,
            claim,
            family,
            steps,
            samples,
            pairs,
            alpha,
            n_max,
        } => {
            let ctx = ClaimContext {
                steps: *steps,
                samples: *samples,
                seed: g.seed,
                k: *pairs,
                alpha: *alpha,
                n_max: *n_max,
            };
            verify(g, family, entry, claim, &ctx)
        }
        Command::Table {
            entry,
            criterion,
            alpha,
            n_max,
            sigma,
            family,
        } => table(g, family, entry, *criterion, *alpha, *n_max, *sigma),
        Command::Haar { samples, pairs, stat } => haar_cmd(g, *samples, *pairs, *stat),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn list(g: &GlobalArgs, family: &FamilyArgs) -> crate::Result<Outcome> {
    let (cfg, echo) = zoo_config(g, family)?;
    let entries: Vec<ZooEntry> = zoo::registry(&cfg)?;
    let mut text = String::new();
    let mut csv = String::from("entry,kind,name,description\n");
    let mut rows = Vec::new();
    for e in &entries {
        text.push_str(&format!("{}: {}\n", e.name, e.description));
        csv.push_str(&format!("{},entry,{},{}\n", e.name, e.name, csv_field(e.description)));
        for c in &e.claims {
            text.push_str(&format!("  claim {}: {}\n", c.name, c.description));
            csv.push_str(&format!("{},claim,{},{}\n", e.name, c.name, csv_field(c.description)));
        }
        for w in &e.witnesses {
            text.push_str(&format!("  witness {}: {}\n", w.name, w.description));
            csv.push_str(&format!("{},witness,{},{}\n", e.name, w.name, csv_field(w.description)));
        }
        rows.push(json!({
            "name": e.name,
            "description": e.description,
            "has_derivative": e.derivative.is_some(),
            "claims": e.claims.iter().map(|c| json!({"name": c.name, "description": c.description})).collect::<Vec<_>>(),
            "witnesses": e.witnesses.iter().map(|w| json!({"name": w.name, "description": w.description, "arity": w.arity})).collect::<Vec<_>>(),
        }));
    }
    Ok(Outcome {
        json: json!({"command": "list", "config": echo, "entries": rows}),
        text,
        csv,
        code: EXIT_PASS,
    })
}

fn eval(g: &GlobalArgs, family: &FamilyArgs, name: &str, x_text: &str) -> crate::Result<Outcome> {
    let (cfg, echo) = zoo_config(g, family)?;
    let entry = zoo::entry(name, &cfg)?;
    let x = parse(x_text, cfg.prime, cfg.precision)?;
    let y = entry.function.eval(&x)?;
    let precision = if y.is_exact() { None } else { y.abs_precision() };
    let shown = precision.map_or("exact".to_string(), |n| format!("p^{n}"));
    Ok(Outcome {
        json: json!({
            "command": "eval",
            "config": echo,
            "entry": name,
            "x": x.to_string(),
            "value": y.to_string(),
            "exact": y.is_exact(),
            "precision": precision,
        }),
        text: format!("{y}\n"),
        csv: format!(
            "entry,x,value,precision\n{name},{},{},{shown}\n",
            csv_field(&x.to_string()),
            csv_field(&y.to_string())
        ),
        code: EXIT_PASS,
    })
}

fn verify(g: &GlobalArgs, family: &FamilyArgs, name: &str, claim: &str, ctx: &ClaimContext) -> crate::Result<Outcome> {
    let (cfg, echo) = zoo_config(g, family)?;
    let entry = zoo::entry(name, &cfg)?;
    let report = entry.run_claim(claim, ctx)?;
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    Ok(Outcome {
        json: json!({
            "command": "verify",
            "config": echo,
            "context": {
                "steps": ctx.steps, "samples": ctx.samples, "pairs": ctx.k,
                "alpha": ctx.alpha, "n_max": ctx.n_max,
            },
            "entry": name,
            "claim": claim,
            "passed": report.passed,
            "summary": report.summary,
            "details": report.details,
        }),
        text: format!("{verdict} {name} {claim}: {}\n", report.summary),
        csv: format!("entry,claim,passed,summary\n{name},{claim},{},{}\n", report.passed, csv_field(&report.summary)),
        code: if report.passed { EXIT_PASS } else { EXIT_FAIL },
    })
}

fn table(
    g: &GlobalArgs,
    family: &FamilyArgs,
    name: &str,
    criterion: Criterion,
    alpha: f64,
    n_max: u64,
    use_sigma: bool,
) -> crate::Result<Outcome> {
    let (cfg, echo) = zoo_config(g, family)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain("alpha must be positive".into()));
    }
    let entry = zoo::entry(name, &cfg)?;
    let series = VdPSeries::new(entry.function.clone(), cfg.prime, cfg.precision);
    let weight = match criterion {
        Criterion::N1 => 1.0,
        Criterion::Lip => alpha,
    };
    let rows = if use_sigma {
        weighted_rows(&series, (0..=n_max).map(|n| sigma(cfg.prime, n)), weight)?
    } else {
        weighted_rows(&series, (1..=n_max).map(BigUint::from), weight)?
    };
    let mut csv = format!("{}\n", vanderput::CSV_HEADER);
    for r in &rows {
        csv.push_str(&vanderput::csv_row(r));
        csv.push('\n');
    }
    let ln_sup = rows.last().and_then(|r| r.ln_running_sup);
    let text = format!(
        "{name}: {} rows, weight n^{weight}, final running sup {}\n",
        rows.len(),
        vanderput::format_ln(ln_sup)
    );
    Ok(Outcome {
        json: json!({
            "command": "table",
            "config": echo,
            "entry": name,
            "criterion": match criterion { Criterion::N1 => "n1", Criterion::Lip => "lip" },
            "alpha": weight,
            "sigma": use_sigma,
            "rows": rows,
        }),
        text,
        csv,
        code: EXIT_PASS,
    })
}

fn haar_cmd(g: &GlobalArgs, samples: u64, pairs: u32, stat: HaarStat) -> crate::Result<Outcome> {
    let (prime, echo) = base_echo(g)?;
    let mut reports: Vec<(String, MCReport, bool)> = Vec::new();
    if matches!(stat, HaarStat::Y0 | HaarStat::Both) {
        if samples == 0 {
            return Err(Error::Domain("need at least one sample".into()));
        }
        let (r, rerun) = with_rerun(g.seed, |s| estimate_y0(prime, samples, s).expect("samples >= 1"));
        reports.push(("Y0".into(), r, rerun));
    }
    if matches!(stat, HaarStat::EPrefix | HaarStat::Both) {
        let mut series = e_prefix_series(prime, pairs, samples, g.seed)?;
        let mut rerun = false;
        if !series.iter().all(|r| r.within(SIGMAS)) {
            series = e_prefix_series(prime, pairs, samples, haar::rerun_seed(g.seed))?;
            rerun = true;
        }
        reports.extend(series.into_iter().map(|r| ("E-prefix".to_string(), r, rerun)));
    }
    let passed = reports.iter().all(|(_, r, _)| r.within(SIGMAS));
    let mut csv = format!("statistic,{}\n", haar::CSV_HEADER);
    let mut text = String::new();
    for (stat, r, rerun) in &reports {
        csv.push_str(&format!("{stat},{}\n", haar::csv_row(r)));
        text.push_str(&format!(
            "{} {stat} k={}: estimate {:.6} target {:.6} stderr {:.6} z {:.2}{}\n",
            if r.within(SIGMAS) { "PASS" } else { "FAIL" },
            r.k,
            r.estimate,
            r.target,
            r.stderr,
            r.z_score,
            if *rerun { " (rerun)" } else { "" }
        ));
    }
    let json_reports: Vec<Value> = reports
        .iter()
        .map(|(s, r, rerun)| json!({"statistic": s, "report": r, "rerun": rerun, "within": r.within(SIGMAS)}))
        .collect();
    Ok(Outcome {
        json: json!({"command": "haar", "config": echo, "sigmas": SIGMAS, "passed": passed, "reports": json_reports}),
        text,
        csv,
        code: if passed { EXIT_PASS } else { EXIT_FAIL },
    })
}
