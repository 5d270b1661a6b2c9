//! `hb`: batch front end for the hyperbessel library.
//!
//! Every command reads an optional JSON config file, applies flag overrides on
//! top of it, and writes a JSON report (or CSV for `eval`) that echoes the
//! resolved config, the seed and the program version.
//!
//! Exit codes: 0 pass, 1 usage or config error, 2 mathematical refusal,
//! 3 tolerance failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use hyperbessel::identities::{run_identities, IdentityConfig};
use hyperbessel::io::{
    chaos_certificate_to_json, functional_from_json, functional_to_json, series_from_json,
    series_to_json, JsonScalar,
};
use hyperbessel::linear_dynamics::psi_grid_csv;
use hyperbessel::{
    certify, convolve, fourier, g_eval_bounded, inverse_fourier, j_eval, moment_convolution,
    translate_addition, translate_delsarte, CertifyConfig, CertifyOutcome, ConvolutionOperator,
    ExactComplex, HbError, MomentFunctional, REvenSeries, VectorIndex, WitnessConfig,
    DEFAULT_TRUNCATION, VERSION,
};

#[derive(Parser)]
#[command(name = "hb", version, about = "Hyper-Bessel harmonic analysis on truncated r-even series")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Order r >= 2 of the operator.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Comma-separated rationals, e.g. "-1/2" or "1/3,-1/6".
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    truncation: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate j_gamma (or G_gamma) at points; CSV output.
    Eval {
        /// Point as "re,im" or "re"; components may be rationals. Repeatable.
        #[arg(long, allow_hyphen_values = true)]
        z: Vec<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum)]
        function: Option<Function>,
    },
    /// Apply B_r^k, a translation or a convolution operator to a series.
    Apply {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        operator: Option<OperatorKind>,
        #[arg(long)]
        power: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        functional: Option<PathBuf>,
    },
    /// Delsarte translation T_z of a series.
    Translate {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, value_enum)]
        path: Option<TranslationPath>,
    },
    /// Convolve a functional with a series or with another functional.
    Convolve {
        #[arg(long)]
        functional: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Second functional for the moment convolution.
        #[arg(long)]
        with: Option<PathBuf>,
    },
    /// Fourier transform of a functional, or its inverse on a series.
    Fourier {
        #[arg(long)]
        functional: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        inverse: bool,
    },
    /// Run the seeded identity suite.
    Identities {
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        max_truncation: Option<usize>,
        #[arg(long)]
        max_r: Option<usize>,
        /// Fault injection: perturb alpha at this index.
        #[arg(long, hide = true)]
        corrupt_alpha: Option<usize>,
    },
    /// Emit a chaos certificate for a convolution operator.
    Certify {
        #[arg(long, value_enum)]
        operator: Option<OperatorKind>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        functional: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long)]
        h: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        /// Also write the eigen-symbol grid as CSV here.
        #[arg(long)]
        psi_csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Function {
    J,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OperatorKind {
    Br,
    Identity,
    Scalar,
    Translation,
    Functional,
    Symbol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TranslationPath {
    Delsarte,
    Addition,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Refusal(String),
    Tolerance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Refusal(_) => 2,
            Failure::Tolerance(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Refusal(m) | Failure::Tolerance(m) => m,
        }
    }
}

impl From<HbError> for Failure {
    fn from(e: HbError) -> Self {
        let msg = e.to_string();
        match e {
            HbError::ScalarOperator
            | HbError::NotExponentialType { .. }
            | HbError::PairingDivergence { .. } => Failure::Refusal(msg),
            HbError::Precision { .. }
            | HbError::Overflow { .. }
            | HbError::WitnessFailure { .. }
            | HbError::EnlargeGrid { .. }
            | HbError::CertificateViolated { .. } => Failure::Tolerance(msg),
            _ => Failure::Usage(msg),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

/// Flag values become JSON strings so that rationals never pass through floats.
fn value_flag(s: &str) -> Value {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => json!([re, "0"]),
        [re, im] => json!([re, im]),
        _ => json!(s),
    }
}

struct Resolved {
    cfg: Map<String, Value>,
    base: PathBuf,
}

impl Resolved {
    fn load(common: &Common) -> Run<Self> {
        let (mut cfg, base) = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))?;
                let Value::Object(map) = v else {
                    return usage("config must be a JSON object");
                };
                let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
                (map, base)
            }
            None => (Map::new(), PathBuf::new()),
        };
        let mut set = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                cfg.insert(k.to_owned(), v);
            }
        };
        set("r", common.r.map(|r| json!(r)));
        set(
            "gamma",
            common
                .gamma
                .as_ref()
                .map(|g| json!(g.split(',').map(str::trim).filter(|s| !s.is_empty()).collect::<Vec<_>>())),
        );
        set("truncation", common.truncation.map(|n| json!(n)));
        set(
            "mode",
            common.mode.map(|m| json!(if m == Mode::Exact { "exact" } else { "float" })),
        );
        set("output", common.output.as_ref().map(|p| json!(p.display().to_string())));
        set("seed", common.seed.map(|s| json!(s)));
        Ok(Self { cfg, base })
    }

    fn set(&mut self, key: &str, v: Option<Value>) {
        if let Some(v) = v {
            self.cfg.insert(key.to_owned(), v);
        }
    }

    fn set_path(&mut self, key: &str, p: &Option<PathBuf>) {
        // Paths given on the command line are relative to the working directory.
        self.set(
            key,
            p.as_ref().map(|p| {
                let abs = std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.clone());
                json!(abs.display().to_string())
            }),
        );
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.cfg.get(key).filter(|v| !v.is_null())
    }

    fn usize_or(&self, key: &str, default: usize) -> Run<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Failure::Usage(format!("{key} must be a nonnegative integer"))),
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Run<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| Failure::Usage(format!("{key} must be a number"))),
        }
    }

    fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Run<&'a str> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_str()
                .ok_or_else(|| Failure::Usage(format!("{key} must be a string"))),
        }
    }

    fn seed(&self) -> Run<u64> {
        match self.get("seed") {
            None => Ok(1),
            Some(v) => v
                .as_u64()
                .ok_or_else(|| Failure::Usage("seed must be a nonnegative integer".into())),
        }
    }

    fn mode(&self) -> Run<Mode> {
        match self.str_or("mode", "float")? {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => usage(format!("mode must be exact or float, got {other}")),
        }
    }

    fn vi(&self) -> Run<VectorIndex> {
        let r = self.usize_or("r", 0)?;
        if r == 0 {
            return usage("missing r");
        }
        let obj = json!({"r": r, "gamma": self.get("gamma").cloned().unwrap_or(json!([]))});
        Ok(hyperbessel::io::vi_from_json(&obj)?)
    }

    /// A string is a path to a JSON file (relative to the config file);
    /// an object is used inline.
    fn object(&self, key: &str) -> Run<Option<Value>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(p)) => {
                let path = self.base.join(p);
                let text = fs::read_to_string(&path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map(Some)
                    .map_err(|e| Failure::Usage(format!("bad JSON in {}: {e}", path.display())))
            }
            Some(v) => Ok(Some(v.clone())),
        }
    }

    fn required_object(&self, key: &str) -> Run<Value> {
        self.object(key)?
            .ok_or_else(|| Failure::Usage(format!("missing {key}")))
    }

    fn scalar<S: JsonScalar>(&self, key: &str) -> Run<Option<S>> {
        self.get(key).map(|v| S::from_json(v).map_err(Failure::from)).transpose()
    }

    fn echo(&self) -> Value {
        Value::Object(self.cfg.clone())
    }
}

fn check_index<S: JsonScalar>(vi: &VectorIndex, s: &REvenSeries<S>) -> Run<()> {
    if s.vi() != vi {
        return usage(format!("input series has index {} but config has {}", s.vi(), vi));
    }
    Ok(())
}

fn report(cfg: &Resolved, command: &str, result: Value) -> Run<String> {
    let out = json!({
        "hb_version": VERSION,
        "command": command,
        "seed": cfg.seed()?,
        "config": cfg.echo(),
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&out).expect("serializable") + "\n")
}

fn csv_float(x: f64) -> String {
    format!("{x:e}")
}

fn cmd_eval(cfg: &Resolved) -> Run<String> {
    let vi = cfg.vi()?;
    let default_tol = cfg.f64_or("tol", 1e-12)?;
    let function = cfg.str_or("function", "j")?.to_owned();
    let points = cfg
        .get("points")
        .and_then(Value::as_array)
        .cloned()
        .ok_or_else(|| Failure::Usage("eval needs points (--z or a points array)".into()))?;
    let mut out = format!(
        "# hb {VERSION} eval seed={} config={}\n",
        cfg.seed()?,
        serde_json::to_string(&cfg.echo()).expect("serializable")
    );
    out.push_str("z_re,z_im,val_re,val_im,bound,N_used\n");
    for p in points {
        let (zv, tol) = match &p {
            Value::Object(o) => (
                o.get("z").cloned().ok_or_else(|| Failure::Usage("point without z".into()))?,
                o.get("tol").and_then(Value::as_f64).unwrap_or(default_tol),
            ),
            other => (other.clone(), default_tol),
        };
        let z = Complex64::from_json(&zv)?;
        let v = match function.as_str() {
            "j" => j_eval(&vi, z, tol)?,
            "g" => {
                if z.im != 0.0 {
                    return usage("G is evaluated at real x >= 0");
                }
                g_eval_bounded(&vi, z.re)?
            }
            other => return usage(format!("function must be j or g, got {other}")),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_float(z.re),
            csv_float(z.im),
            csv_float(v.value.re),
            csv_float(v.value.im),
            csv_float(v.bound),
            v.n_used
        ));
    }
    Ok(out)
}

fn build_operator<S: JsonScalar>(cfg: &Resolved, vi: &VectorIndex, default: &str) -> Run<ConvolutionOperator<S>> {
    let degree = cfg.usize_or("degree", cfg.usize_or("truncation", DEFAULT_TRUNCATION)?)?;
    Ok(match cfg.str_or("operator", default)? {
        "br" => ConvolutionOperator::br(vi.clone()),
        "identity" => ConvolutionOperator::identity(vi.clone()),
        "scalar" => {
            let c = cfg.scalar::<S>("c")?.ok_or_else(|| Failure::Usage("scalar operator needs c".into()))?;
            ConvolutionOperator::scalar(vi.clone(), c)
        }
        "translation" => {
            let a = cfg.scalar::<S>("a")?.ok_or_else(|| Failure::Usage("translation needs a".into()))?;
            ConvolutionOperator::translation(vi.clone(), &a, degree)
        }
        "functional" => {
            let t: MomentFunctional<S> = functional_from_json(&cfg.required_object("functional")?)?;
            if t.vi() != vi {
                return usage("functional index differs from config index");
            }
            ConvolutionOperator::from_functional(&t)
        }
        "symbol" => {
            let symbol = cfg
                .get("symbol")
                .and_then(Value::as_array)
                .ok_or_else(|| Failure::Usage("symbol operator needs a symbol array".into()))?
                .iter()
                .map(S::from_json)
                .collect::<hyperbessel::Result<Vec<S>>>()?;
            ConvolutionOperator::new(vi.clone(), symbol, None)?
        }
        other => return usage(format!("unknown operator {other}")),
    })
}

fn cmd_apply<S: JsonScalar>(cfg: &Resolved) -> Run<Value> {
    let vi = cfg.vi()?;
    let u: REvenSeries<S> = series_from_json(&cfg.required_object("input")?)?;
    check_index(&vi, &u)?;
    let power = cfg.usize_or("power", 1)?;
    let out = if cfg.str_or("operator", "br")? == "br" {
        u.apply_br_pow(power)
    } else {
        build_operator::<S>(cfg, &vi, "br")?.apply_pow(&u, power)?
    };
    Ok(series_to_json(&out))
}

fn cmd_translate<S: JsonScalar>(cfg: &Resolved) -> Run<Value> {
    let vi = cfg.vi()?;
    let u: REvenSeries<S> = series_from_json(&cfg.required_object("input")?)?;
    check_index(&vi, &u)?;
    let z = cfg.scalar::<S>("z")?.ok_or_else(|| Failure::Usage("translate needs z".into()))?;
    let t = match cfg.str_or("path", "delsarte")? {
        "delsarte" => translate_delsarte(&u, &z),
        "addition" => translate_addition(&u, &z),
        other => return usage(format!("path must be delsarte or addition, got {other}")),
    };
    Ok(json!({"series": series_to_json(&t.series), "dropped_terms": t.dropped_terms}))
}

fn cmd_convolve<S: JsonScalar>(cfg: &Resolved) -> Run<Value> {
    let vi = cfg.vi()?;
    let t: MomentFunctional<S> = functional_from_json(&cfg.required_object("functional")?)?;
    if t.vi() != &vi {
        return usage("functional index differs from config index");
    }
    if let Some(other) = cfg.object("with")? {
        let s: MomentFunctional<S> = functional_from_json(&other)?;
        let m = moment_convolution(&t, &s)?;
        return Ok(json!({"functional": functional_to_json(&m)}));
    }
    let u: REvenSeries<S> = series_from_json(&cfg.required_object("input")?)?;
    check_index(&vi, &u)?;
    let c = convolve(&t, &u)?;
    Ok(json!({"series": series_to_json(&c.series), "missing_moment_bound": c.missing_moment_bound}))
}

fn cmd_fourier<S: JsonScalar>(cfg: &Resolved) -> Run<Value> {
    let vi = cfg.vi()?;
    let inverse = cfg.get("inverse").and_then(Value::as_bool).unwrap_or(false);
    if inverse {
        let v: REvenSeries<S> = series_from_json(&cfg.required_object("input")?)?;
        check_index(&vi, &v)?;
        Ok(json!({"functional": functional_to_json(&inverse_fourier(&v)?)}))
    } else {
        let t: MomentFunctional<S> = functional_from_json(&cfg.required_object("functional")?)?;
        if t.vi() != &vi {
            return usage("functional index differs from config index");
        }
        Ok(json!({"series": series_to_json(&fourier(&t))}))
    }
}

fn cmd_identities(cfg: &Resolved) -> Run<(Value, bool)> {
    let defaults = IdentityConfig::default();
    let icfg = IdentityConfig {
        seed: cfg.seed()?,
        cases: cfg.usize_or("cases", defaults.cases)?,
        max_truncation: cfg.usize_or("max_truncation", defaults.max_truncation)?,
        max_r: cfg.usize_or("max_r", defaults.max_r)?.max(2),
        corrupt_alpha: cfg.get("corrupt_alpha").and_then(Value::as_u64).map(|n| n as usize),
    };
    let rep = run_identities(&icfg);
    Ok((rep.to_json(), rep.passed()))
}

enum Certified {
    Certificate(Value),
    Refused(Value),
}

fn cmd_certify(cfg: &Resolved) -> Run<Certified> {
    let vi = cfg.vi()?;
    let l = build_operator::<Complex64>(cfg, &vi, "br")?;
    let defaults = WitnessConfig::default();
    let trunc = cfg.usize_or("truncation", DEFAULT_TRUNCATION)?;
    let witness = WitnessConfig {
        eps: cfg.f64_or("eps", defaults.eps)?,
        radius: cfg.f64_or("radius", defaults.radius)?,
        iterations: cfg.usize_or("iterations", defaults.iterations)?,
        nodes: cfg.usize_or("nodes", defaults.nodes)?,
        max_nodes: cfg.usize_or("max_nodes", defaults.max_nodes)?,
        truncation: trunc,
        grid: defaults.grid,
    };
    let load_series = |key: &str| -> Run<Option<REvenSeries<Complex64>>> {
        match cfg.object(key)? {
            Some(v) => {
                let s: REvenSeries<Complex64> = series_from_json(&v)?;
                check_index(&vi, &s)?;
                Ok(Some(s))
            }
            None => Ok(None),
        }
    };
    let ccfg = CertifyConfig {
        witness,
        h: load_series("h")?,
        g: load_series("g")?,
        ..CertifyConfig::default()
    };
    if let Some(path) = cfg.get("psi_csv").and_then(Value::as_str) {
        fs::write(path, psi_grid_csv(&l, &ccfg.grid))
            .map_err(|e| Failure::Usage(format!("cannot write {path}: {e}")))?;
    }
    Ok(match certify(&l, &ccfg)? {
        CertifyOutcome::Certified(c) => Certified::Certificate(chaos_certificate_to_json(&c)),
        CertifyOutcome::Refused { reason } => Certified::Refused(json!({"refused": true, "reason": reason})),
    })
}

fn dispatch<F, G>(cfg: &Resolved, exact: F, float: G) -> Run<Value>
where
    F: Fn(&Resolved) -> Run<Value>,
    G: Fn(&Resolved) -> Run<Value>,
{
    match cfg.mode()? {
        Mode::Exact => exact(cfg),
        Mode::Float => float(cfg),
    }
}

fn run(cli: Cli) -> Run<(String, Option<Failure>)> {
    let mut cfg = Resolved::load(&cli.common)?;
    let (name, body, late_failure) = match &cli.command {
        Command::Eval { z, tol, function } => {
            if !z.is_empty() {
                cfg.set("points", Some(Value::Array(z.iter().map(|s| value_flag(s)).collect())));
            }
            cfg.set("tol", tol.map(|t| json!(t)));
            cfg.set("function", function.map(|f| json!(if f == Function::J { "j" } else { "g" })));
            cfg.vi()?;
            return Ok((cmd_eval(&cfg)?, None));
        }
        Command::Apply { input, operator, power, a, c, degree, functional } => {
            cfg.set_path("input", input);
            cfg.set("operator", operator.map(operator_name));
            cfg.set("power", power.map(|p| json!(p)));
            cfg.set("a", a.as_deref().map(value_flag));
            cfg.set("c", c.as_deref().map(value_flag));
            cfg.set("degree", degree.map(|d| json!(d)));
            cfg.set_path("functional", functional);
            ("apply", dispatch(&cfg, cmd_apply::<ExactComplex>, cmd_apply::<Complex64>)?, None)
        }
        Command::Translate { input, z, path } => {
            cfg.set_path("input", input);
            cfg.set("z", z.as_deref().map(value_flag));
            cfg.set(
                "path",
                path.map(|p| json!(if p == TranslationPath::Delsarte { "delsarte" } else { "addition" })),
            );
            ("translate", dispatch(&cfg, cmd_translate::<ExactComplex>, cmd_translate::<Complex64>)?, None)
        }
        Command::Convolve { functional, input, with } => {
            cfg.set_path("functional", functional);
            cfg.set_path("input", input);
            cfg.set_path("with", with);
            ("convolve", dispatch(&cfg, cmd_convolve::<ExactComplex>, cmd_convolve::<Complex64>)?, None)
        }
        Command::Fourier { functional, input, inverse } => {
            cfg.set_path("functional", functional);
            cfg.set_path("input", input);
            if *inverse {
                cfg.set("inverse", Some(json!(true)));
            }
            ("fourier", dispatch(&cfg, cmd_fourier::<ExactComplex>, cmd_fourier::<Complex64>)?, None)
        }
        Command::Identities { cases, max_truncation, max_r, corrupt_alpha } => {
            cfg.set("cases", cases.map(|x| json!(x)));
            cfg.set("max_truncation", max_truncation.map(|x| json!(x)));
            cfg.set("max_r", max_r.map(|x| json!(x)));
            cfg.set("corrupt_alpha", corrupt_alpha.map(|x| json!(x)));
            let (body, passed) = cmd_identities(&cfg)?;
            let failure = (!passed).then(|| Failure::Tolerance("identity suite reported failures".into()));
            ("identities", body, failure)
        }
        Command::Certify {
            operator, a, c, degree, functional, eps, radius, iterations, nodes, max_nodes, h, g, psi_csv,
        } => {
            cfg.set("operator", operator.map(operator_name));
            cfg.set("a", a.as_deref().map(value_flag));
            cfg.set("c", c.as_deref().map(value_flag));
            cfg.set("degree", degree.map(|d| json!(d)));
            cfg.set_path("functional", functional);
            cfg.set("eps", eps.map(|x| json!(x)));
            cfg.set("radius", radius.map(|x| json!(x)));
            cfg.set("iterations", iterations.map(|x| json!(x)));
            cfg.set("nodes", nodes.map(|x| json!(x)));
            cfg.set("max_nodes", max_nodes.map(|x| json!(x)));
            cfg.set_path("h", h);
            cfg.set_path("g", g);
            cfg.set("psi_csv", psi_csv.as_ref().map(|p| json!(p.display().to_string())));
            match cmd_certify(&cfg)? {
                Certified::Certificate(v) => ("certify", v, None),
                Certified::Refused(v) => (
                    "certify",
                    v,
                    Some(Failure::Refusal("operator is a scalar multiple of the identity".into())),
                ),
            }
        }
    };
    Ok((report(&cfg, name, body)?, late_failure))
}

fn operator_name(k: OperatorKind) -> Value {
    json!(match k {
        OperatorKind::Br => "br",
        OperatorKind::Identity => "identity",
        OperatorKind::Scalar => "scalar",
        OperatorKind::Translation => "translation",
        OperatorKind::Functional => "functional",
        OperatorKind::Symbol => "symbol",
    })
}

fn configure_threads() -> Run<()> {
    if let Ok(v) = std::env::var("HB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("HB_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return usage("HB_THREADS must be at least 1");
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn output_path(cli: &Cli) -> Option<PathBuf> {
    if let Some(p) = &cli.common.output {
        return Some(p.clone());
    }
    let path = cli.common.config.as_ref()?;
    let v: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    let out = v.get("output")?.as_str()?;
    Some(path.parent().map(|d| d.join(out)).unwrap_or_else(|| PathBuf::from(out)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("hb: {}", f.message());
        return ExitCode::from(f.code());
    }
    let out_path = output_path(&cli);
    let (text, failure) = match run(cli) {
        Ok(v) => v,
        Err(f) => {
            eprintln!("hb: {}", f.message());
            return ExitCode::from(f.code());
        }
    };
    match out_path {
        Some(p) => {
            if let Err(e) = fs::write(&p, &text) {
                eprintln!("hb: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    match failure {
        Some(f) => {
            eprintln!("hb: {}", f.message());
            ExitCode::from(f.code())
        }
        None => ExitCode::SUCCESS,
    }
}
