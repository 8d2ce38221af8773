//! `twbeta`: correlators, large deviations and Tracy–Widom tails of the
//! Gaussian β-ensemble from the command line.

mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use twbeta_core::algebra::rational::{fmt_rational, parse_rational, to_f64};
use twbeta_core::algebra::{rat, Rational};
use twbeta_core::deviation::{assemble_deviation, eval_density};
use twbeta_core::error::{AlgebraError, DeviationError, McError, RecursionError, TailError};
use twbeta_core::loops::CorrelatorTable;
use twbeta_core::mc::{compare_deviation, estimate_tail, sample_lambda_max};
use twbeta_core::numeric;
use twbeta_core::tail::{assemble_tail, breve_extract, eval_tail, BreveEntry, TailExpansion, TailKind};

const CACHE_ENV: &str = "TWBETA_CACHE_DIR";
const CACHE_FILE: &str = "correlators.json";

#[derive(Parser, Debug)]
#[command(name = "twbeta", version, about = "Loop-equation expansions for the Gaussian beta-ensemble")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Correlator cache file (default: $TWBETA_CACHE_DIR/correlators.json).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact correlator ω_n^[k].
    Correlator {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "sym")]
        beta: String,
    },
    /// Large-deviation expansion of the largest-eigenvalue density.
    Deviation {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "sym")]
        beta: String,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
    },
    /// Right-tail expansion of the Tracy–Widom β law.
    Tail {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "sym")]
        beta: String,
    },
    /// Leading edge data (p_m, R̆_m) for m = 1..max-m.
    Breve {
        #[arg(long = "max-m")]
        max_m: usize,
    },
    /// Numerical value of the truncated tail expansion.
    EvalTail {
        #[arg(long)]
        beta: String,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum, default_value = "complement")]
        kind: KindArg,
    },
    /// Numerical value of the truncated large-deviation density.
    EvalDeviation {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        order: usize,
    },
    /// Re-derive reference results and report every comparison.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        beta: Option<String>,
    },
    /// Monte-Carlo sampling of the largest eigenvalue.
    Mc {
        #[command(subcommand)]
        command: McCommand,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Complement,
    Density,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Paper,
    Painleve,
    Scaling,
}

#[derive(Args, Debug)]
struct Model {
    #[arg(long = "N")]
    n: usize,
    #[arg(long)]
    beta: String,
    #[arg(long, default_value = "1")]
    t: String,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum McCommand {
    /// Sample λ_max, or estimate P[λ_max > a] when --a is given.
    Sample {
        #[command(flatten)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Write the sampled λ_max values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare the MC tail probability with the integrated expansion.
    Compare {
        #[command(flatten)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Verification(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<RecursionError> for CliError {
    fn from(e: RecursionError) -> Self {
        match e {
            RecursionError::Invalid(_) | RecursionError::TooManyVariables(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<DeviationError> for CliError {
    fn from(e: DeviationError) -> Self {
        match e {
            DeviationError::InvalidParameter(_) | DeviationError::OrderTooHigh { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<TailError> for CliError {
    fn from(e: TailError) -> Self {
        match e {
            TailError::OrderTooHigh { .. } | TailError::NonContiguous => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            McError::Deviation(d) => d.into(),
            McError::RegimeTooRare { .. } => CliError::Domain(e.to_string()),
        }
    }
}

/// What a command produced: the JSON document and its text rendering.
pub struct Output {
    pub json: Vec<Value>,
    pub text: String,
    /// Set by verification suites that found a mismatch.
    pub failed: Option<String>,
}

impl Output {
    fn single(json: Value, text: String) -> Self {
        Self {
            json: vec![json],
            text,
            failed: None,
        }
    }
}

pub fn parse_beta(s: &str) -> Result<Option<Rational>, CliError> {
    if s == "sym" {
        return Ok(None);
    }
    let b = parse_rational(s).map_err(|_| CliError::Usage(format!("beta must be \"sym\" or a rational, got {s:?}")))?;
    if b <= rat(0, 1) {
        return Err(CliError::Usage("beta must be positive".into()));
    }
    Ok(Some(b))
}

fn numeric_beta(s: &str) -> Result<Rational, CliError> {
    parse_beta(s)?.ok_or_else(|| CliError::Usage("this command needs a numeric beta".into()))
}

fn parse_t(s: &str) -> Result<Rational, CliError> {
    let t = parse_rational(s).map_err(|_| CliError::Usage(format!("t must be a rational, got {s:?}")))?;
    if t <= rat(0, 1) {
        return Err(CliError::Usage("t must be positive".into()));
    }
    Ok(t)
}

fn cache_path(cli: Option<&Path>) -> Option<PathBuf> {
    cli.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).map(|d| PathBuf::from(d).join(CACHE_FILE)))
}

/// Correlator table holding `wanted`, read from and written back to the
/// cache when one is configured.
pub fn table_with(cache: Option<&Path>, wanted: &[(usize, usize)]) -> Result<CorrelatorTable, CliError> {
    let path = cache_path(cache);
    let mut t = match &path {
        Some(p) => CorrelatorTable::load(p)
            .map_err(|e| CliError::Domain(format!("cache {}: {e}", p.display())))?
            .unwrap_or_default(),
        None => CorrelatorTable::new(),
    };
    if t.is_empty() {
        t = CorrelatorTable::new();
    }
    let before = t.len();
    t.extend(wanted)?;
    if let Some(p) = &path {
        if t.len() > before {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Domain(format!("cache {}: {e}", p.display())))?;
            }
            t.save(p).map_err(|e| CliError::Domain(format!("cache {}: {e}", p.display())))?;
        }
    }
    Ok(t)
}

pub fn one_point(cache: Option<&Path>, k_max: usize) -> Result<CorrelatorTable, CliError> {
    let wanted: Vec<(usize, usize)> = (0..=k_max).map(|k| (1, k)).collect();
    table_with(cache, &wanted)
}

pub fn tail_expansion(cache: Option<&Path>, order: usize) -> Result<(Vec<BreveEntry>, TailExpansion), CliError> {
    let t = one_point(cache, order + 1)?;
    let entries = (1..=order).map(|m| breve_extract(m, &t)).collect::<Result<Vec<_>, _>>()?;
    let te = assemble_tail(order, &entries)?;
    Ok((entries, te))
}

fn cmd_correlator(cache: Option<&Path>, n: usize, k: usize, beta: &str) -> Result<Output, CliError> {
    if n == 0 {
        return Err(CliError::Usage("n must be at least 1".into()));
    }
    let beta = parse_beta(beta)?;
    let t = table_with(cache, &[(n, k)])?;
    let mut f = t.value(n, k)?.clone();
    if let Some(b) = &beta {
        f = f.specialize_x(&(rat(2, 1) / b));
    }
    let json = json!({
        "kind": "correlator",
        "n": n,
        "k": k,
        "beta": beta.as_ref().map_or("sym".to_string(), fmt_rational),
        "value": f.to_json(),
    });
    Ok(Output::single(json, format!("omega_{n}^[{k}] = {f}\n")))
}

fn cmd_deviation(
    cache: Option<&Path>,
    order: usize,
    beta: &str,
    n: Option<u64>,
    t: &str,
    a: Option<f64>,
) -> Result<Output, CliError> {
    let beta = parse_beta(beta)?;
    let t = parse_t(t)?;
    let table = one_point(cache, order + 1)?;
    let exp = assemble_deviation(order, &table)?;
    let mut json = match &beta {
        Some(b) => exp.specialize(&(rat(2, 1) / b)).to_json(),
        None => exp.to_json(),
    };
    json["beta"] = beta.as_ref().map_or("sym".to_string(), fmt_rational).into();
    let mut text = String::new();
    for c in &exp.corrections {
        text.push_str(&format!("N^-{}: {} + beta * ({})\n", c.m, c.bernoulli, c.integral));
    }
    match (n, a) {
        (Some(n), Some(a)) => {
            let b = beta.ok_or_else(|| CliError::Usage("evaluating needs a numeric beta".into()))?;
            let d = eval_density(n, &b, &t, a, order, &exp)?;
            let v = numeric::to_f64(&d.value);
            json["value"] = json!({
                "N": n, "t": fmt_rational(&t), "a": a,
                "density": v, "ln_density": numeric::to_f64(&d.ln_value), "last_term": d.last_term,
            });
            text.push_str(&format!("density at a = {a}: {v:e} (last term {:e})\n", d.last_term));
        }
        (None, None) => {}
        _ => return Err(CliError::Usage("--N and --a go together".into())),
    }
    Ok(Output::single(json, text))
}

fn cmd_tail(cache: Option<&Path>, order: usize, beta: &str) -> Result<Output, CliError> {
    let beta = parse_beta(beta)?;
    let (_, te) = tail_expansion(cache, order)?;
    let json = te.to_json(beta.as_ref(), order);
    let x = beta.as_ref().map(|b| rat(2, 1) / b);
    let show = |p: &twbeta_core::algebra::XPoly| match &x {
        Some(x) => fmt_rational(&p.eval(x)),
        None => format!("{p}"),
    };
    let mut text = String::from("1 - TW(s) ~ Gamma(beta/2)/((4 beta)^(beta/2) 2 pi) s^(-3 beta/4) exp(-2 beta s^(3/2)/3) [1 + sum c_m s^(-3m/2)]\n");
    for m in 1..=order {
        text.push_str(&format!("R_{m} = {}\n", te.r[m - 1]));
    }
    for m in 1..=order {
        text.push_str(&format!("c_{m} = {}\n", show(&te.complement_expanded[m])));
    }
    Ok(Output::single(json, text))
}

fn cmd_breve(cache: Option<&Path>, max_m: usize) -> Result<Output, CliError> {
    if max_m == 0 {
        return Err(CliError::Usage("max-m must be at least 1".into()));
    }
    let t = one_point(cache, max_m + 1)?;
    let mut json = Vec::new();
    let mut text = String::new();
    for m in 1..=max_m {
        let e = breve_extract(m, &t)?;
        text.push_str(&format!("m = {m}: p = {}, R = {}\n", e.p, e.poly));
        json.push(e.to_json());
    }
    Ok(Output {
        json,
        text,
        failed: None,
    })
}

fn cmd_eval_tail(cache: Option<&Path>, beta: &str, s: f64, order: usize, kind: KindArg) -> Result<Output, CliError> {
    let b = numeric_beta(beta)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(TailError::NonPositiveS.into());
    }
    let (_, te) = tail_expansion(cache, order)?;
    let kind = match kind {
        KindArg::Complement => TailKind::Complement,
        KindArg::Density => TailKind::Density,
    };
    let (v, last) = eval_tail(s, &b, order, &te, kind)?;
    let name = if kind == TailKind::Complement { "complement" } else { "density" };
    let json = json!({
        "kind": "eval_tail", "tail_kind": name, "beta": fmt_rational(&b), "s": s,
        "order": order, "value": v, "last_term": last,
    });
    Ok(Output::single(json, format!("{name}({s}) = {v:e} (last term {last:e})\n")))
}

fn cmd_eval_deviation(cache: Option<&Path>, n: u64, beta: &str, t: &str, a: f64, order: usize) -> Result<Output, CliError> {
    let b = numeric_beta(beta)?;
    let t = parse_t(t)?;
    let table = one_point(cache, order + 1)?;
    let exp = assemble_deviation(order, &table)?;
    let d = eval_density(n, &b, &t, a, order, &exp)?;
    let v = numeric::to_f64(&d.value);
    let json = json!({
        "kind": "eval_deviation", "N": n, "beta": fmt_rational(&b), "t": fmt_rational(&t), "a": a,
        "order": order, "value": v, "ln_value": numeric::to_f64(&d.ln_value), "last_term": d.last_term,
    });
    Ok(Output::single(json, format!("density({a}) = {v:e} (last term {:e})\n", d.last_term)))
}

fn model_params(m: &Model) -> Result<(f64, f64, Rational, Rational), CliError> {
    let b = numeric_beta(&m.beta)?;
    let t = parse_t(&m.t)?;
    if m.samples == 0 {
        return Err(CliError::Usage("samples must be at least 1".into()));
    }
    Ok((to_f64(&b), to_f64(&t), b, t))
}

fn cmd_mc(cache: Option<&Path>, c: &McCommand) -> Result<Output, CliError> {
    match c {
        McCommand::Sample { model, a, tol, csv } => {
            let (bf, tf, _, _) = model_params(model)?;
            if let Some(a) = a {
                let e = estimate_tail(model.n, bf, tf, *a, model.samples, model.seed)?;
                let text = format!(
                    "P[lambda_max > {a}] = {:e} +- {:e} ({} / {} samples, seed {})\n",
                    e.p_hat, e.stderr, e.hits, e.n_samples, e.seed
                );
                return Ok(Output::single(e.to_json(), text));
            }
            let v = sample_lambda_max(model.n, bf, tf, model.samples, model.seed, *tol)?;
            if let Some(path) = csv {
                let mut s = String::from("index,lambda_max\n");
                for (i, x) in v.iter().enumerate() {
                    s.push_str(&format!("{i},{x:e}\n"));
                }
                std::fs::write(path, s).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
            }
            let nf = v.len() as f64;
            let mean = v.iter().sum::<f64>() / nf;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0).max(1.0);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let json = json!({
                "kind": "mc_sample", "n_samples": model.samples, "seed": model.seed,
                "params": {"N": model.n, "beta": bf, "t": tf},
                "mean": mean, "sd": var.sqrt(), "max": max,
            });
            Ok(Output::single(json, format!("lambda_max: mean {mean:.6}, sd {:.6}, max {max:.6}\n", var.sqrt())))
        }
        McCommand::Compare { model, a, order } => {
            let (_, _, b, t) = model_params(model)?;
            let table = one_point(cache, order + 1)?;
            let exp = assemble_deviation(*order, &table)?;
            let r = compare_deviation(model.n, &b, &t, *a, model.samples, *order, model.seed, &exp)?;
            let text = format!(
                "p_hat = {:e} +- {:e}, predicted = {:e}, ratio = {:.4}\n",
                r.estimate.p_hat, r.estimate.stderr, r.predicted, r.ratio
            );
            Ok(Output::single(r.to_json(), text))
        }
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let cache = cli.cache.as_deref();
    match &cli.command {
        Command::Correlator { n, k, beta } => cmd_correlator(cache, *n, *k, beta),
        Command::Deviation { order, beta, n, t, a } => cmd_deviation(cache, *order, beta, *n, t, *a),
        Command::Tail { order, beta } => {
            if *order == 0 {
                return Err(CliError::Usage("order must be at least 1".into()));
            }
            cmd_tail(cache, *order, beta)
        }
        Command::Breve { max_m } => cmd_breve(cache, *max_m),
        Command::EvalTail { beta, s, order, kind } => cmd_eval_tail(cache, beta, *s, *order, *kind),
        Command::EvalDeviation { n, beta, t, a, order } => cmd_eval_deviation(cache, *n, beta, t, *a, *order),
        Command::Verify { suite, order, beta } => verify::run(cache, *suite, *order, beta.as_deref()),
        Command::Mc { command } => cmd_mc(cache, command),
    }
}

fn report_error(format: Format, e: &CliError) {
    match format {
        Format::Json => eprintln!("{}", json!({"error": e.message(), "code": e.code()})),
        Format::Text => eprintln!("error: {}", e.message()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            report_error(cli.format, &CliError::Usage("threads must be at least 1".into()));
            return ExitCode::from(1);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => {
                    for v in &out.json {
                        println!("{}", serde_json::to_string(v).expect("serializable"));
                    }
                }
                Format::Text => print!("{}", out.text),
            }
            if let Some(msg) = out.failed {
                report_error(cli.format, &CliError::Verification(msg));
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report_error(cli.format, &e);
            ExitCode::from(e.code())
        }
    }
}
