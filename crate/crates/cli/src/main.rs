use clap::{Args, Parser, Subcommand, ValueEnum};
use fpi_core::fpi_closed::{beta_fpi, beta_fpi_log, fpi_branch_infinite, fpi_pole_infinite, BetaFpiSpec, FpiBranchSpec, FpiPoleSpec};
use fpi_core::hyp2f1::{gauss_2f1_near_one, gauss_series, Gauss2F1Params};
use fpi_core::hyp3f2::{threef2_integral_direct, threef2_series, threef2_transform, ThreeF2Params};
use fpi_core::oracle::{extract_finite_part, extract_finite_part_upper, OracleOptions, OracleProblem};
use fpi_core::special::{principal_power, real};
use fpi_core::stieltjes::{classify_case, stieltjes_direct, stieltjes_fpi_series, stieltjes_reference, StieltjesGaussSpec};
use fpi_core::verify::{sweep, IdentityTag, ParamSampler};
use fpi_core::{EvalConfig, FpiError, SeriesResult, C64};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fpi", version, about = "Finite-part integrals, Stieltjes transforms and hypergeometric identities")]
struct Cli {
    /// Pass tolerance for residual checks (default: per identity)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Series term cap
    #[arg(long, global = true, env = "FPI_MAX_TERMS", default_value_t = 10_000)]
    max_terms: usize,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,

    /// Distance within which a parameter counts as an integer
    #[arg(long, global = true, default_value_t = 1e-9)]
    int_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
}

/// Validated global settings.
#[derive(Debug, Clone, Copy, Serialize)]
struct CliConfig {
    tolerance: Option<f64>,
    max_terms: usize,
    seed: u64,
    output_format: OutputFormat,
    integer_detection_tol: f64,
}

impl CliConfig {
    fn from_cli(cli: &Cli) -> Result<Self, Failure> {
        if let Some(t) = cli.tol {
            if !(t > 0.0) {
                return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        if cli.max_terms < 16 {
            return Err(Failure::Usage(format!("--max-terms must be at least 16, got {}", cli.max_terms)));
        }
        if !(cli.int_tol >= 0.0) {
            return Err(Failure::Usage("--int-tol must be nonnegative".into()));
        }
        Ok(Self {
            tolerance: cli.tol,
            max_terms: cli.max_terms,
            seed: cli.seed,
            output_format: cli.output,
            integer_detection_tol: cli.int_tol,
        })
    }

    fn eval(&self) -> EvalConfig {
        EvalConfig::default().with_max_terms(self.max_terms).with_int_tol(self.integer_detection_tol)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fundamental finite-part integrals
    #[command(subcommand)]
    Fpi(FpiCommand),
    /// ∫₀^∞ x^{ν-1}(a+x)^{-μ}(b+x)^{-ρ} dx by quadrature and by the finite-part series
    Stieltjes(StieltjesArgs),
    /// Gauss and ₃F₂ hypergeometric functions
    #[command(subcommand)]
    Hyp(HypCommand),
    /// Seeded sweeps over the transformation identities
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FpiMethod {
    Closed,
    Oracle,
}

#[derive(Subcommand, Debug)]
enum FpiCommand {
    /// ∳₀^∞ (s+x)^{-υ} x^{-λ} dx
    Branch {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        upsilon: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: C64,
        #[arg(long, value_enum, default_value_t = FpiMethod::Closed)]
        method: FpiMethod,
    },
    /// ∳₀^∞ (s+x)^{-υ} x^{-n-1} dx
    Pole {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        upsilon: C64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = FpiMethod::Closed)]
        method: FpiMethod,
    },
    /// ∳₀^1 y^{σ-1}(1-y)^{-ρ} dy, or with an extra ln y under --log
    Beta {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        sigma: C64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        rho: C64,
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value_t = FpiMethod::Closed)]
        method: FpiMethod,
    },
}

#[derive(Args, Debug)]
struct StieltjesArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    mu: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    nu: C64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    rho: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum HypMethod {
    Series,
    Transform,
    Integral,
}

#[derive(Subcommand, Debug)]
enum HypCommand {
    /// ₂F₁(μ, ν; σ; z)
    #[command(name = "2f1")]
    Gauss {
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        mu: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        nu: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        sigma: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, value_enum, default_value_t = HypMethod::Series)]
        method: HypMethod,
    },
    /// ₃F₂(β, ν, 1; β+σ, n; z)
    #[command(name = "3f2")]
    ThreeF2 {
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        beta: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        nu: C64,
        n: u64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        sigma: C64,
        #[arg(value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
        #[arg(long, value_enum, default_value_t = HypMethod::Series)]
        method: HypMethod,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity tag, case-insensitive (repeatable)
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    tag: Vec<String>,
    /// Sweep every identity
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 100)]
    count: usize,
}

/// `1.5`, `-2`, `0.5i`, `1.5+0.5i`, `1e-3-2e-1i`.
fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{s}' as a complex number (expected re, im i or re±im i)");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(real).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        v => v.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    /// A report was produced but some check failed.
    Checks(Value),
}

impl From<FpiError> for Failure {
    fn from(e: FpiError) -> Self {
        if e.is_domain() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn cx(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn finite(z: C64, what: &str) -> Result<C64, Failure> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Failure::Numerical(format!("{what} evaluated to a non-finite value")))
    }
}

fn series_json(function: &str, method: HypMethod, r: &SeriesResult) -> Value {
    json!({
        "function": function,
        "method": method,
        "value": cx(r.value),
        "terms_used": r.terms_used,
        "tail_estimate": r.tail_estimate,
    })
}

fn cmd_fpi(cmd: &FpiCommand) -> Result<Value, Failure> {
    let (kind, value, method, estimate) = match *cmd {
        FpiCommand::Branch { s, upsilon, lambda, method } => {
            let spec = FpiBranchSpec::new(s, upsilon, lambda)?;
            match method {
                FpiMethod::Closed => ("branch", fpi_branch_infinite(&spec), method, None),
                FpiMethod::Oracle => {
                    let p = OracleProblem::new(move |x| principal_power(s + x, -upsilon).unwrap_or(C64::new(f64::NAN, 0.0)), lambda, f64::INFINITY);
                    let o = extract_finite_part(&p, 0.1 * s.norm().min(1.0), 20)?;
                    ("branch", o.finite_part, method, Some(o.error_estimate))
                }
            }
        }
        FpiCommand::Pole { s, upsilon, n, method } => {
            let spec = FpiPoleSpec::new(s, upsilon, n)?;
            match method {
                FpiMethod::Closed => ("pole", fpi_pole_infinite(&spec), method, None),
                FpiMethod::Oracle => {
                    let p = OracleProblem::new(
                        move |x| principal_power(s + x, -upsilon).unwrap_or(C64::new(f64::NAN, 0.0)),
                        real(n as f64 + 1.0),
                        f64::INFINITY,
                    );
                    let o = extract_finite_part(&p, 0.1 * s.norm().min(1.0), 20)?;
                    ("pole", o.finite_part, method, Some(o.error_estimate))
                }
            }
        }
        FpiCommand::Beta { sigma, rho, log, method } => {
            let spec = BetaFpiSpec::new(sigma, rho)?;
            let kind = if log { "beta_log" } else { "beta" };
            match method {
                FpiMethod::Closed => (kind, if log { beta_fpi_log(&spec) } else { beta_fpi(&spec) }, method, None),
                FpiMethod::Oracle => {
                    let h = move |y: f64| {
                        let v = principal_power(real(y), sigma - 1.0).unwrap_or(C64::new(f64::NAN, 0.0));
                        if log {
                            v * y.ln()
                        } else {
                            v
                        }
                    };
                    let o = extract_finite_part_upper(h, rho, 1.0, false, None, &OracleOptions::default())?;
                    (kind, o.finite_part, method, Some(o.error_estimate))
                }
            }
        }
    };
    let value = finite(value, kind)?;
    let method = match method {
        FpiMethod::Closed => "closed",
        FpiMethod::Oracle => "oracle",
    };
    Ok(json!({ "kind": kind, "value": cx(value), "method": method, "error_estimate": estimate }))
}

fn cmd_stieltjes(a: &StieltjesArgs, cfg: &CliConfig) -> Result<Value, Failure> {
    let ec = cfg.eval();
    let on_real_axis = [a.a, a.b].iter().all(|v| v.im == 0.0 && v.re > 0.0);
    if on_real_axis && a.b.re >= a.a.re {
        return Err(Failure::Usage(format!("need 0 < b < a, got a = {}, b = {}", a.a.re, a.b.re)));
    }
    let spec = StieltjesGaussSpec::with_int_tol(a.a, a.b, a.mu, a.nu, a.rho, cfg.integer_detection_tol)?;
    let direct = if on_real_axis { Some(finite(stieltjes_direct(&spec)?, "quadrature")?) } else { None };
    // integer ρ with integer ν has no finite-part series; fall back to the ₂F₁ form
    let (case, series, method, terms) = match classify_case(&spec) {
        Ok(case) => {
            let r = stieltjes_fpi_series(&spec, &ec)?;
            (Some(case.to_string()), r.value, "fpi_series", Some(r.terms_used))
        }
        Err(FpiError::UnsupportedCase(_)) => (None, stieltjes_reference(&spec, &ec)?, "gauss_reference", None),
        Err(e) => return Err(e.into()),
    };
    let series = finite(series, "series")?;
    let residual = direct.map(|d| (d - series).norm() / d.norm().max(series.norm()).max(1e-300));
    Ok(json!({
        "case": case,
        "direct": direct.map(cx),
        "series": cx(series),
        "series_method": method,
        "terms_used": terms,
        "rel_residual": residual,
    }))
}

fn cmd_hyp(cmd: &HypCommand, cfg: &CliConfig) -> Result<Value, Failure> {
    let ec = cfg.eval();
    match *cmd {
        HypCommand::Gauss { mu, nu, sigma, z, method } => {
            let p = Gauss2F1Params::new(mu, nu, sigma, z)?;
            let r = match method {
                HypMethod::Series => gauss_series(&p, &ec)?,
                HypMethod::Transform => gauss_2f1_near_one(&p, &ec)?,
                HypMethod::Integral => return Err(Failure::Usage("--method integral is only available for 3f2".into())),
            };
            finite(r.value, "2F1")?;
            Ok(series_json("2F1", method, &r))
        }
        HypCommand::ThreeF2 { beta, nu, n, sigma, z, method } => {
            let p = ThreeF2Params::with_int_tol(beta, nu, n, sigma, z, cfg.integer_detection_tol)?;
            match method {
                HypMethod::Series => Ok(series_json("3F2", method, &threef2_series(&p, &ec)?)),
                HypMethod::Transform => Ok(series_json("3F2", method, &threef2_transform(&p, &ec)?)),
                HypMethod::Integral => {
                    let v = finite(threef2_integral_direct(&p)?, "3F2 integral")?;
                    Ok(json!({ "function": "3F2", "method": method, "value": cx(v) }))
                }
            }
        }
    }
}

fn cmd_verify(a: &VerifyArgs, cfg: &CliConfig) -> Result<Value, Failure> {
    let tags: Vec<IdentityTag> = if a.all {
        IdentityTag::ALL.to_vec()
    } else {
        a.tag.iter().map(|t| t.parse::<IdentityTag>()).collect::<Result<_, _>>()?
    };
    if a.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let sampler = ParamSampler::new(cfg.seed);
    let ec = cfg.eval();
    let mut sweeps = Vec::with_capacity(tags.len());
    let mut ok = true;
    for tag in tags {
        let tol = cfg.tolerance.unwrap_or(tag.default_tol());
        let r = sweep(tag, &sampler, a.count, tol, &ec)?;
        ok &= r.passed();
        sweeps.push(r);
    }
    let v = json!({ "seed": cfg.seed, "count": a.count, "sweeps": sweeps });
    if ok {
        Ok(v)
    } else {
        Err(Failure::Checks(v))
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}_{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// One row per sample for sweeps, a single row otherwise.
fn csv_rows(v: &Value) -> Vec<Vec<(String, String)>> {
    let Some(sweeps) = v.get("sweeps").and_then(Value::as_array) else {
        let mut row = Vec::new();
        flatten("", v, &mut row);
        return vec![row];
    };
    let mut rows = Vec::new();
    for s in sweeps {
        let tag = s["tag"].as_str().unwrap_or_default().to_string();
        for (i, r) in s["reports"].as_array().into_iter().flatten().enumerate() {
            let mut row = vec![("index".to_string(), i.to_string())];
            let mut obj = r.as_object().cloned().unwrap_or_else(Map::new);
            let params = obj.remove("params").unwrap_or(Value::Null);
            row.push(("tag".into(), tag.clone()));
            flatten("", &params, &mut row);
            flatten("", &Value::Object(obj.into_iter().filter(|(k, _)| k != "tag").collect()), &mut row);
            rows.push(row);
        }
        for f in s["failures"].as_array().into_iter().flatten() {
            if f["reason"].as_str().is_some_and(|r| !r.starts_with("relative residual")) {
                let mut row = vec![("index".to_string(), f["index"].to_string()), ("tag".into(), tag.clone())];
                flatten("", &f["params"], &mut row);
                row.push(("error".into(), f["reason"].as_str().unwrap_or_default().to_string()));
                rows.push(row);
            }
        }
    }
    rows
}

fn write_output(v: &Value, format: OutputFormat) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, v)?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            let rows = csv_rows(v);
            let mut header: Vec<String> = Vec::new();
            for row in &rows {
                for (k, _) in row {
                    if !header.contains(k) {
                        header.push(k.clone());
                    }
                }
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in &rows {
                w.write_record(header.iter().map(|h| row.iter().find(|(k, _)| k == h).map(|(_, v)| v.as_str()).unwrap_or("")))?;
            }
            w.flush()
        }
    }
}

fn run(cli: &Cli) -> Result<(Value, OutputFormat), (Failure, OutputFormat)> {
    let cfg = CliConfig::from_cli(cli).map_err(|e| (e, cli.output))?;
    let v = match &cli.command {
        Command::Fpi(c) => cmd_fpi(c),
        Command::Stieltjes(a) => cmd_stieltjes(a, &cfg),
        Command::Hyp(c) => cmd_hyp(c, &cfg),
        Command::Verify(a) => cmd_verify(a, &cfg),
    };
    v.map(|v| (v, cfg.output_format)).map_err(|e| (e, cfg.output_format))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let emit = |v: &Value, f: OutputFormat| {
        if let Err(e) = write_output(v, f) {
            eprintln!("error: failed to write output: {e}");
        }
    };
    match run(&cli) {
        Ok((v, f)) => {
            emit(&v, f);
            ExitCode::SUCCESS
        }
        Err((Failure::Usage(msg), _)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err((Failure::Numerical(msg), _)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err((Failure::Checks(v), f)) => {
            emit(&v, f);
            eprintln!("error: some checks failed");
            ExitCode::from(1)
        }
    }
}
