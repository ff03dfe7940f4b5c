//! Command line front end. [`run`] parses arguments, dispatches one command
//! and returns the exit code with the rendered report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bounds::{coefficient_bounds, permanent_lower_bound, Ordering};
use crate::capacity::{
    capacity, ds_defect, improved_approximate, scale_to_doubly_stochastic, sinkhorn_scale, CapacityOptions,
    SINKHORN_MAX_ITERS,
};
use crate::error::{Error, Result};
use crate::exact::{mixed_discriminant_exact, permanent_exact, ExactValue};
use crate::hyperbolicity::{af_inequality_check, check_pos_hyperbolic, newton_check};
use crate::polynomials::io::{load_input, LoadedInput};
use crate::structure::{
    detect_decomposition, in_newton_polytope, in_support, is_indecomposable, is_submodular, singleton_support_degrees,
    SupportFunction,
};
use crate::verify::{run_verify, Level};

#[derive(Debug, Parser)]
#[command(name = "hypercap", version, about = "Capacity and coefficient bounds for homogeneous polynomials")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrderingArg {
    Identity,
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum What {
    Permanent,
    MixedDisc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    PosHyperbolic,
    Af,
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Args, Serialize)]
struct InputArg {
    /// JSON input file (matrix, tuple or sparse polynomial).
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Capacity with a certified log-gap.
    Capacity {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Scale to doubly stochastic form (Sinkhorn for matrices).
    Scale {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Factor-2 capacity approximation of the mixed-derivative coefficient.
    ApproxCoef {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        /// Differentiate away ceil(m log2 n) variables first.
        #[arg(long, default_value_t = 0)]
        improve: u32,
    },
    /// Certified bracket for the coefficient (the permanent for matrices).
    PermBounds {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = OrderingArg::Identity)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Exact permanent or mixed discriminant.
    Exact {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = What::Permanent)]
        what: What,
    },
    /// Support membership of an exponent vector, or the support degrees.
    Support {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        /// Comma separated exponent vector.
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<u32>>,
    },
    /// Membership of a point in the Newton polytope.
    Newton {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        point: Vec<f64>,
    },
    /// Indecomposability verdict and decomposition.
    Indecomposable {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
    },
    /// Sampled hyperbolicity, Alexandrov-Fenchel or Newton inequality checks.
    Check {
        #[command(flatten)]
        #[serde(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value_t = Kind::PosHyperbolic)]
        kind: Kind,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run the invariant suites of every module.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Capacity { .. } => "capacity",
            Command::Scale { .. } => "scale",
            Command::ApproxCoef { .. } => "approx-coef",
            Command::PermBounds { .. } => "perm-bounds",
            Command::Exact { .. } => "exact",
            Command::Support { .. } => "support",
            Command::Newton { .. } => "newton",
            Command::Indecomposable { .. } => "indecomposable",
            Command::Check { .. } => "check",
            Command::Verify { .. } => "verify",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Command::Capacity { tol, .. } | Command::Scale { tol, .. } | Command::PermBounds { tol, .. }
                if !(tol > 0.0 && tol.is_finite()) =>
            {
                Err(Error::invalid(format!("--tol must be positive, got {tol}")))
            }
            Command::Check { trials: 0, .. } => Err(Error::invalid("--trials must be positive")),
            _ => Ok(()),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse `argv` (program name first) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = cli.command.validate().and_then(|_| dispatch(&cli.command));
    match result {
        Ok((body, ok)) => {
            let mut out = Map::new();
            out.insert("command".into(), Value::from(cli.command.name()));
            let mut config = serde_json::to_value(&cli.command).expect("config serializes");
            if let Value::Object(m) = &mut config {
                // externally tagged enum: unwrap the single variant entry
                if let Some((_, inner)) = m.iter().next() {
                    config = inner.clone();
                }
            }
            if let Value::Object(m) = &mut config {
                m.insert("format".into(), json!(cli.format));
            }
            out.insert("config".into(), config);
            match body {
                Value::Object(m) => out.extend(m),
                other => {
                    out.insert("result".into(), other);
                }
            }
            let out = Value::Object(out);
            let stdout = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out).expect("json renders") + "\n",
                Format::Text => render_text(&out),
            };
            Outcome { code: if ok { 0 } else { 1 }, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn exact_json(v: &ExactValue) -> Value {
    json!({
        "value": v.value.to_string(),
        "value_f64": v.to_f64(),
        "method": v.method,
    })
}

/// Returns the report body and whether the command succeeded.
fn dispatch(cmd: &Command) -> Result<(Value, bool)> {
    let load = |input: &InputArg| load_input(&input.input);
    let body = match cmd {
        Command::Capacity { input, tol } => {
            let p = load(input)?.oracle()?;
            to_value(capacity(&p, &CapacityOptions::with_tol(*tol))?)
        }
        Command::Scale { input, tol } => match load(input)? {
            LoadedInput::Matrix(a) => to_value(sinkhorn_scale(&a, *tol, SINKHORN_MAX_ITERS)?),
            other => {
                let p = other.oracle()?;
                let (x, q) = scale_to_doubly_stochastic(&p, &CapacityOptions::with_tol(*tol))?;
                json!({"scaling": x, "ds_defect": ds_defect(&q)?})
            }
        },
        Command::ApproxCoef { input, improve } => to_value(improved_approximate(&load(input)?.oracle()?, *improve)?),
        Command::PermBounds { input, ordering, tol } => {
            let ordering = match ordering {
                OrderingArg::Identity => Ordering::Identity,
                OrderingArg::Best => Ordering::Best,
            };
            let opts = CapacityOptions::with_tol(*tol);
            match load(input)? {
                LoadedInput::Matrix(a) => to_value(permanent_lower_bound(&a, &ordering, &opts)?),
                other => to_value(coefficient_bounds(&other.oracle()?, &ordering, &opts)?),
            }
        }
        Command::Exact { input, what } => match (what, load(input)?) {
            (What::Permanent, LoadedInput::Matrix(a)) => exact_json(&permanent_exact(&a)?),
            (What::MixedDisc, LoadedInput::Tuple(t)) => exact_json(&mixed_discriminant_exact(&t)?),
            (w, other) => {
                return Err(Error::invalid(format!(
                    "--what {} needs a {} input, got {}",
                    if *w == What::Permanent { "permanent" } else { "mixed-disc" },
                    if *w == What::Permanent { "matrix" } else { "tuple" },
                    other.kind()
                )))
            }
        },
        Command::Support { input, r } => {
            let p = load(input)?.oracle()?;
            match r {
                Some(r) => to_value(in_support(&p, r)?),
                None => {
                    let degrees = singleton_support_degrees(&p)?;
                    let verdict = is_submodular(&SupportFunction::new(&p)?)?;
                    json!({"support_degrees": degrees, "submodularity": verdict})
                }
            }
        }
        Command::Newton { input, point } => to_value(in_newton_polytope(&load(input)?.oracle()?, point)?),
        Command::Indecomposable { input } => {
            let p = load(input)?.oracle()?;
            let verdict = is_indecomposable(&p)?;
            let decomposition = if verdict.indecomposable { None } else { detect_decomposition(&p)? };
            let mut v = to_value(verdict);
            v["decomposition"] = to_value(decomposition);
            v
        }
        Command::Check { input, kind, trials, seed } => {
            let p = load(input)?.oracle()?;
            match kind {
                Kind::PosHyperbolic => to_value(check_pos_hyperbolic(&p, *trials, *seed)?),
                Kind::Af => to_value(af_inequality_check(&p, *trials, *seed)?),
                Kind::Newton => to_value(newton_check(&p, *trials, *seed)?),
            }
        }
        Command::Verify { level, seed } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = run_verify(level, *seed);
            let ok = report.failed == 0;
            return Ok((to_value(report), ok));
        }
    };
    Ok((body, true))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn render_text(report: &Value) -> String {
    let mut s = String::new();
    if let Some(Value::Array(checks)) = report.get("checks") {
        for c in checks {
            s += &format!(
                "{:4}  {:<14} {:<52} {}\n",
                if c["pass"] == Value::Bool(true) { "PASS" } else { "FAIL" },
                scalar(&c["module"]),
                scalar(&c["name"]),
                scalar(&c["detail"])
            );
        }
        s += &format!("passed {} failed {}\n", report["passed"], report["failed"]);
        return s;
    }
    let mut lines = Vec::new();
    flatten("", report, &mut lines);
    for (k, v) in lines {
        s += &format!("{k} = {v}\n");
    }
    s
}
