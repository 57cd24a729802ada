//! Command-line front end. `run` is the whole program minus process exit,
//! so tests can drive it in-process.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::Value;

use crate::algorithms::{expand, AlgorithmId};
use crate::analysis::{check_convergence, classify, ConvergenceCondition, Verdict};
use crate::cf::{approximation_profile, evaluate_periodic, predicted_profile, Status};
use crate::error::{Error, Result};
use crate::mjp::{jp_check_convergence, jp_convergents, jp_expand, jp_strong_convergence_profile};
use crate::padic::{fmt_rational, Convention, PadicContext, QpNumber, Valuation, DEFAULT_STEP_BUDGET};
use crate::redei::{browkin2_redei_match, redei_expansion, satisfies_polynomial};

/// Environment variable overriding the default step budget.
pub const BUDGET_ENV: &str = "PADIC_CF_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "padic-cf", version, about = "Exact p-adic continued fractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expand a rational or quadratic irrational.
    Expand(ExpandArgs),
    /// Decide finiteness or (non-)periodicity of an expansion.
    Classify(ClassifyArgs),
    /// Tabulate v_p(B_n B_{n+1}) against v_p(x - A_n/B_n).
    Approx(ApproxArgs),
    /// Build the periodic expansion [z | -(h+2z)/(z^2+hz-d), h+2z].
    Redei(RedeiArgs),
    /// Run the p-adic Jacobi-Perron algorithm on a tuple.
    Jp(JpArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Input {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    algorithm: String,
    /// `a/b` or `quad:P,Q,D[,conj]`
    #[arg(long, allow_hyphen_values = true)]
    value: String,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 20)]
    depth: usize,
}

#[derive(Args, Debug)]
struct RedeiArgs {
    #[arg(long, allow_negative_numbers = true)]
    h: BigInt,
    #[arg(long, allow_negative_numbers = true)]
    d: BigInt,
    #[arg(long, allow_negative_numbers = true)]
    z: BigInt,
    /// Prime used to evaluate the expansion.
    #[arg(long, default_value_t = 7)]
    p: u64,
    /// Also test the Browkin II matching condition at this prime.
    #[arg(long)]
    match_p: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct JpArgs {
    #[arg(long)]
    p: u64,
    /// Comma-separated coordinates, e.g. `22/7,3/4` or `quad:0,1,2,1/3`.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Rows of convergents and profile to print for non-finite runs.
    #[arg(long, default_value_t = 20)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

/// Budget from the flag, else `PADIC_CF_BUDGET`, else the library default.
fn budget(flag: Option<usize>) -> Result<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{BUDGET_ENV} must be a positive integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_STEP_BUDGET),
    }
}

fn context(input: &Input, steps: Option<usize>) -> Result<(AlgorithmId, PadicContext, QpNumber)> {
    let alg: AlgorithmId = input.algorithm.parse()?;
    let ctx = alg.context(input.p)?.with_budget(budget(steps)?)?;
    let x: QpNumber = input.value.parse()?;
    Ok((alg, ctx, x))
}

fn json_line(v: &Value) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Truncated { .. } => 2,
        _ => 0,
    }
}

fn cmd_expand(a: &ExpandArgs, out: &mut dyn Write) -> Result<i32> {
    let (alg, ctx, x) = context(&a.input, a.max_steps)?;
    let e = expand(&x, alg, &ctx)?;
    match a.format {
        Format::Text => {
            let _ = writeln!(out, "{e}");
            let _ = writeln!(out, "status: {}", e.status());
        }
        Format::Json => {
            let _ = writeln!(out, "{}", json_line(&e.to_json()));
        }
    }
    Ok(status_code(e.status()))
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (alg, ctx, x) = context(&a.input, a.budget)?;
    let c = classify(&x, alg, &ctx)?;
    let _ = writeln!(out, "{}", json_line(&c.to_json()));
    Ok(match c.verdict {
        Verdict::Undetermined { .. } => 2,
        _ => 0,
    })
}

fn cmd_approx(a: &ApproxArgs, out: &mut dyn Write) -> Result<i32> {
    let (alg, ctx, x) = context(&a.input, None)?;
    let ctx = ctx.with_budget(ctx.step_budget.max(a.depth + 2))?;
    let e = expand(&x, alg, &ctx)?;
    let available = match e.status() {
        Status::Finite => e.stored_quotients().len(),
        Status::Truncated { steps } => steps.saturating_sub(1),
        Status::Periodic { .. } => usize::MAX,
    };
    let rows = a.depth.min(available);
    let _ = writeln!(out, "{e}");
    let _ = writeln!(out, "{:>4}  {:>14}  {:>14}  {:>14}", "n", "v(B_n B_n+1)", "predicted", "v(x - A_n/B_n)");
    if rows == 0 {
        let _ = writeln!(out, "mismatches: 0");
        return Ok(0);
    }
    let actual = approximation_profile(&e, &x, rows - 1)?;
    let predicted = predicted_profile(&e, rows - 1)?;
    let convs = crate::cf::convergents(&e, (rows).min(available.saturating_sub(1)))?;
    let mut mismatches = 0;
    for n in 0..rows {
        let bb = match convs.get(n + 1) {
            Some(next) => crate::padic::rational_valuation(&(&convs[n].den * &next.den), ctx.p).to_string(),
            None => "-".to_string(),
        };
        let flag = if actual[n] == predicted[n] {
            ""
        } else {
            mismatches += 1;
            "  MISMATCH"
        };
        let _ = writeln!(out, "{n:>4}  {bb:>14}  {:>14}  {:>14}{flag}", predicted[n].to_string(), actual[n].to_string());
    }
    let _ = writeln!(out, "mismatches: {mismatches}");
    Ok(0)
}

fn cmd_redei(a: &RedeiArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = PadicContext::new(a.p, Convention::Balanced)?;
    let e = redei_expansion(&a.h, &a.d, &a.z, &ctx)?;
    let x = evaluate_periodic(&e)?;
    let pass = satisfies_polynomial(&x, &a.h, &a.d);
    let matched = match a.match_p {
        Some(p) => Some(browkin2_redei_match(&a.h, &a.d, &PadicContext::new(p, Convention::Balanced)?)),
        None => None,
    };
    match a.format {
        Format::Text => {
            let _ = writeln!(out, "{e}");
            let _ = writeln!(out, "value: {x}");
            let _ = writeln!(out, "check: {}", if pass { "PASS" } else { "FAIL" });
            for cond in ConvergenceCondition::ALL {
                let r = check_convergence(&e, cond)?;
                let verdict = match r.first_violation {
                    None => "holds".to_string(),
                    Some(i) => format!("fails at {i}"),
                };
                let _ = writeln!(out, "pattern {cond:?}: {verdict}");
            }
            if let Some(m) = &matched {
                let _ = match m {
                    Some(z) => writeln!(out, "browkin2 match: z = {z}"),
                    None => writeln!(out, "browkin2 match: none"),
                };
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("expansion".into(), e.to_json());
            obj.insert("value".into(), Value::from(x.to_string()));
            obj.insert("check".into(), Value::from(pass));
            if let Some(m) = &matched {
                obj.insert("browkin2_match".into(), m.as_ref().map_or(Value::Null, |z| Value::from(z.to_string())));
            }
            let _ = writeln!(out, "{}", json_line(&Value::Object(obj)));
        }
    }
    Ok(if pass { 0 } else { 1 })
}

/// Splits `a/b,quad:P,Q,D,c/d` into coordinates; a `quad:` item takes the
/// next two fields and an optional branch word.
pub fn split_values(s: &str) -> Result<Vec<QpNumber>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        if parts[i].starts_with("quad:") {
            let mut end = (i + 3).min(parts.len());
            if matches!(parts.get(end), Some(&"conj") | Some(&"conjugate") | Some(&"principal")) {
                end += 1;
            }
            out.push(parts[i..end].join(",").parse()?);
            i = end;
        } else {
            out.push(parts[i].parse()?);
            i += 1;
        }
    }
    Ok(out)
}

fn fmt_profile(v: &[Valuation]) -> String {
    v.iter().map(Valuation::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_jp(a: &JpArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = PadicContext::new(a.p, Convention::Balanced)?.with_budget(budget(a.max_steps)?)?;
    let xs = split_values(&a.values)?;
    let e = jp_expand(&xs, &ctx)?;
    let upto = match e.status() {
        Status::Finite => e.stored_rows().len() - 1,
        Status::Truncated { steps } => a.depth.min(steps).saturating_sub(1),
        Status::Periodic { .. } => a.depth.saturating_sub(1),
    };
    let convs = jp_convergents(&e, upto)?;
    let profile = jp_strong_convergence_profile(&e, &xs, upto)?;
    let last = convs.last().expect("at least one row");
    let m = xs.len();
    let finals: Vec<String> = (0..m).map(|i| fmt_rational(&(&last[i] / &last[m]))).collect();
    let recovered = xs
        .iter()
        .zip(&finals)
        .all(|(x, f)| x.as_rational().is_some_and(|r| fmt_rational(r) == *f));
    match a.format {
        Format::Text => {
            let _ = writeln!(out, "{e}");
            let _ = writeln!(out, "convergence pattern: {}", if jp_check_convergence(&e) { "holds" } else { "fails" });
            let _ = writeln!(out, "convergents at {upto}: ({})", finals.join(", "));
            if e.status() == Status::Finite {
                let _ = writeln!(out, "inputs recovered: {}", if recovered { "yes" } else { "no" });
            }
            for (i, prof) in profile.iter().enumerate() {
                let _ = writeln!(out, "profile {}: {}", i + 1, fmt_profile(prof));
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("expansion".into(), e.to_json());
            obj.insert("convergence_pattern".into(), Value::from(jp_check_convergence(&e)));
            obj.insert(
                "profile".into(),
                Value::Array(
                    profile
                        .iter()
                        .map(|s| Value::Array(s.iter().map(|v| Value::from(v.to_string())).collect()))
                        .collect(),
                ),
            );
            let _ = writeln!(out, "{}", json_line(&Value::Object(obj)));
        }
    }
    Ok(status_code(e.status()))
}

/// Parses `args` (including the program name) and runs the command. Output
/// goes to `out`, diagnostics to `err`; the return value is the exit code:
/// 0 on success, 2 when a run was cut off by its budget, 1 on errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Approx(a) => cmd_approx(a, out),
        Command::Redei(a) => cmd_redei(a, out),
        Command::Jp(a) => cmd_jp(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
