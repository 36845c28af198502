//! `kq`: graph enumeration, weight estimation, star-product expansion and verification.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kq_core::algebra::Poly;
use kq_core::graphs::{
    canonical_key, dedup_isomorphism, dedup_star_order, enumerate, AdmissibleGraph, EnumerateOptions,
};
use kq_core::polyvector::PolyVectorField;
use kq_core::star::{assemble, formality_residual, verify_associativity, WeightSource};
use kq_core::suite::{case_rng, random_linear_bivector, random_nonconstant_monomial, run_suite};
use kq_core::weights::{analytic_weight, estimate_table, mc_weight_with_gauge, Gauge, WeightTable};
use kq_core::weyl::{canonical_poisson, moyal_series};
use kq_core::Error;
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "kq", version, about = "Kontsevich deformation quantization of polynomial Poisson structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate admissible graphs as JSON lines, followed by a count summary.
    Graphs(GraphsArgs),
    /// Estimate a graph weight, or build a CSV weight table with `weights table`.
    Weights(WeightsArgs),
    /// Expand, verify, or check the formality equation for a star product.
    Star {
        #[command(subcommand)]
        action: StarAction,
    },
    /// Run a property suite; exits 1 if any case fails.
    Verify(VerifyArgs),
    /// Compare the assembled star product for constant π with the closed-form Moyal series.
    Moyal(MoyalArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Dedup {
    None,
    StarOrder,
    Iso,
}

#[derive(Args)]
struct GraphsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Out-degrees, comma separated; a single value applies to every aerial vertex. Defaults to 2.
    #[arg(long, value_delimiter = ',')]
    outdeg: Vec<usize>,
    #[arg(long, value_enum, default_value = "none")]
    dedup: Dedup,
    /// Include graphs whose underlying undirected graph is disconnected.
    #[arg(long)]
    relaxed: bool,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct WeightsArgs {
    #[command(subcommand)]
    action: Option<WeightsAction>,
    #[command(flatten)]
    estimate: EstimateArgs,
}

#[derive(Subcommand)]
enum WeightsAction {
    /// Monte-Carlo estimate of one graph weight, as JSON.
    Estimate(EstimateArgs),
    /// One weight per class of connected graphs in G_{n,2} with out-degree 2, as CSV.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeArg {
    Standard,
    Shifted,
}

#[derive(Args)]
struct EstimateArgs {
    /// Graph JSON file: {n, m, stars} with aerial targets 1..n and ground targets -1..-m.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "standard")]
    gauge: GaugeArg,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsMode {
    /// Closed-form weights only.
    Analytic,
    /// Closed forms where known, Monte Carlo otherwise.
    Mc,
    /// Monte Carlo for every graph.
    McOnly,
    /// Closed forms, then the CSV table given by --table.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct WeightOptions {
    #[arg(long, value_enum, default_value = "analytic")]
    weights: WeightsMode,
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum StarAction {
    /// Assemble the star product and print its coefficients per order.
    Expand {
        /// Bivector JSON file.
        #[arg(long)]
        poisson: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        weights: WeightOptions,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Assemble and report associativity residuals per order.
    Verify {
        #[arg(long)]
        poisson: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        weights: WeightOptions,
        /// Monomials up to this degree form the exhaustive triple basis.
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
    },
    /// Formality-equation residuals on random linear inputs in R³ (or the given inputs).
    Formality {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// JSON array of polyvector fields; random linear bivectors when omitted.
        #[arg(long)]
        inputs: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        cases: usize,
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of dgla, mc, hkr, bracket, groenewold, moyal, oracles, all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MoyalArgs {
    /// Even dimension; π is the canonical symplectic bivector unless --poisson is given.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Constant bivector JSON file.
    #[arg(long)]
    poisson: Option<PathBuf>,
}

/// Why a command could not produce its output; each kind has its own exit code.
enum Failure {
    Input(String),
    Json(String),
    Unsupported(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Json(_) => 3,
            Failure::Unsupported(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Json(m) | Failure::Unsupported(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedGround(_)
            | Error::UnsupportedAerial(_)
            | Error::UnsupportedFormality(_)
            | Error::OrderTooLarge(_)
            | Error::MissingWeight(_) => Failure::Unsupported(e.to_string()),
            Error::Parse(_) => Failure::Json(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Complete command output, printed only once the command has succeeded.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

type CmdResult = std::result::Result<Output, Failure>;

/// Sample counts may be written as integers or in float notation such as 1e6.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.replace('_', "").parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a sample count"))?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("'{s}' is not a non-negative integer"));
    }
    Ok(x as u64)
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Json(format!("{}: {e}", path.display())))
}

#[derive(serde::Deserialize)]
struct GraphFile {
    n: usize,
    m: usize,
    stars: Vec<Vec<i32>>,
}

fn read_graph(path: &Path) -> std::result::Result<AdmissibleGraph, Failure> {
    let g: GraphFile = read_json(path)?;
    Ok(AdmissibleGraph::from_encoded(g.n, g.m, &g.stars)?)
}

fn header(command: &str, seed: u64, samples: u64) -> Value {
    json!({ "kq_version": VERSION, "command": command, "seed": seed, "samples": samples })
}

fn to_json(v: &impl serde::Serialize) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Json(e.to_string()))
}

fn cmd_graphs(a: &GraphsArgs) -> CmdResult {
    let outdeg = match a.outdeg.as_slice() {
        [] => vec![2; a.n],
        [k] => vec![*k; a.n],
        list => list.to_vec(),
    };
    let graphs = enumerate(a.n, a.m, &outdeg, EnumerateOptions { connected: !a.relaxed })?;
    let mut text = String::new();
    let count = match a.dedup {
        Dedup::Iso => {
            let classes = dedup_isomorphism(&graphs);
            for (key, members) in &classes {
                let rep = AdmissibleGraph::from_encoded(key.n, key.m, &key.stars)?;
                let line = json!({ "key": key.to_string(), "members": members, "graph": rep });
                writeln!(text, "{line}").expect("write to string");
            }
            classes.len()
        }
        mode => {
            let mut list = if matches!(mode, Dedup::StarOrder) { dedup_star_order(&graphs) } else { graphs };
            list.sort();
            for g in &list {
                let line = json!({ "key": canonical_key(g).to_string(), "graph": g });
                writeln!(text, "{line}").expect("write to string");
            }
            list.len()
        }
    };
    let dedup = match a.dedup {
        Dedup::None => "none",
        Dedup::StarOrder => "star-order",
        Dedup::Iso => "iso",
    };
    let summary = json!({ "count": count, "n": a.n, "m": a.m, "outdeg": outdeg, "dedup": dedup, "connected": !a.relaxed });
    writeln!(text, "{summary}").expect("write to string");
    Ok(Output::ok(text))
}

fn cmd_estimate(a: &EstimateArgs) -> CmdResult {
    let path = a.graph.as_ref().ok_or_else(|| Failure::Input("--graph is required".into()))?;
    let g = read_graph(path)?;
    let gauge = match a.gauge {
        GaugeArg::Standard => Gauge::Standard,
        GaugeArg::Shifted => Gauge::Shifted,
    };
    let e = mc_weight_with_gauge(&g, a.samples, a.seed, gauge)?;
    let analytic = analytic_weight(&g);
    let mut doc = header("weights estimate", a.seed, a.samples);
    let fields = json!({
        "graph_key": e.graph_key,
        "mean": e.mean,
        "std_error": e.std_error,
        "analytic": analytic.as_ref().map(|w| w.re_f64()),
        "analytic_exact": analytic.as_ref().map(|w| w.to_string()),
    });
    doc.as_object_mut().expect("object").extend(fields.as_object().expect("object").clone());
    Ok(Output::ok(to_json(&doc)? + "\n"))
}

fn cmd_table(a: &TableArgs) -> CmdResult {
    let table = estimate_table(a.n, a.samples, a.seed)?;
    let mut buf = format!("# kq {VERSION} weights table n={} seed={} samples={}\n", a.n, a.seed, a.samples).into_bytes();
    table.to_csv(&mut buf)?;
    Ok(Output::ok(String::from_utf8(buf).map_err(|e| Failure::Input(e.to_string()))?))
}

fn weight_source(w: &WeightOptions) -> std::result::Result<WeightSource, Failure> {
    Ok(match w.weights {
        WeightsMode::Analytic => WeightSource::analytic(),
        WeightsMode::Mc => WeightSource::monte_carlo(w.samples, w.seed),
        WeightsMode::McOnly => WeightSource::monte_carlo_only(w.samples, w.seed),
        WeightsMode::Table => {
            let path = w.table.as_ref().ok_or_else(|| Failure::Input("--weights table needs --table".into()))?;
            WeightSource::table(WeightTable::from_csv(read(path)?.as_bytes())?)
        }
    })
}

fn cmd_star(action: &StarAction) -> CmdResult {
    match action {
        StarAction::Expand { poisson, order, weights, format } => {
            let pi: PolyVectorField = read_json(poisson)?;
            let s = assemble(&pi, *order, &weight_source(weights)?)?;
            match format {
                Format::Json => {
                    let doc = json!({ "header": header("star expand", weights.seed, weights.samples), "star": s });
                    Ok(Output::ok(to_json(&doc)? + "\n"))
                }
                Format::Text => {
                    let mut text = format!("# kq {VERSION} star expand seed={} samples={}\n", weights.seed, weights.samples);
                    for k in 0..=s.order() {
                        writeln!(text, "hbar^{k}: {}", s.coefficient(k)).expect("write to string");
                    }
                    writeln!(text, "order  graph  weight  std_error  origin  members").expect("write to string");
                    for r in s.provenance() {
                        writeln!(
                            text,
                            "{}  {}  {}  {}  {:?}  {}",
                            r.order, r.graph_key, r.weight, r.std_error, r.origin, r.multiplicity
                        )
                        .expect("write to string");
                    }
                    Ok(Output::ok(text))
                }
            }
        }
        StarAction::Verify { poisson, order, weights, max_degree } => {
            let pi: PolyVectorField = read_json(poisson)?;
            let s = assemble(&pi, *order, &weight_source(weights)?)?;
            let report = verify_associativity(&s, *max_degree)?;
            let doc = json!({
                "header": header("star verify", weights.seed, weights.samples),
                "exact": report.is_exact(),
                "report": report,
            });
            Ok(Output::ok(to_json(&doc)? + "\n"))
        }
        StarAction::Formality { n, inputs, cases, samples, seed } => {
            let source = WeightSource::monte_carlo(*samples, *seed);
            let mut text = format!("{}\n", header("star formality", *seed, *samples));
            let mut ok = true;
            let given: Option<Vec<PolyVectorField>> = inputs.as_deref().map(read_json).transpose()?;
            for case in 0..*cases {
                let mut rng = case_rng(*seed, case);
                let xs = match &given {
                    Some(xs) => xs.clone(),
                    None => (0..*n).map(|_| random_linear_bivector(&mut rng, 3)).collect(),
                };
                if xs.len() != *n {
                    return Err(Failure::Input(format!("expected {n} inputs, found {}", xs.len())));
                }
                let d = xs.first().map(PolyVectorField::dim).unwrap_or(3);
                // d_H raises the arity of U_n by one
                let arity = (xs.iter().map(PolyVectorField::degree).sum::<usize>() + 3).saturating_sub(2 * n);
                let fs: Vec<Poly> = (0..arity).map(|_| random_nonconstant_monomial(&mut rng, d, 2)).collect();
                let r = formality_residual(&xs, &fs, &source)?;
                ok &= r.within_tolerance;
                let line = json!({
                    "case": case,
                    "n": n,
                    "max_abs": r.max_abs,
                    "sigma": r.sigma,
                    "within_tolerance": r.within_tolerance,
                    "discrepancy": r.discrepancy.to_string(),
                });
                writeln!(text, "{line}").expect("write to string");
            }
            Ok(Output { text, ok })
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let outcomes = run_suite(&a.suite, a.cases, a.seed)?;
    let mut text = String::new();
    for o in &outcomes {
        writeln!(text, "{o}").expect("write to string");
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    writeln!(text, "{} of {} checks passed", outcomes.len() - failed, outcomes.len()).expect("write to string");
    Ok(Output { text, ok: failed == 0 })
}

fn cmd_moyal(a: &MoyalArgs) -> CmdResult {
    let pi = match &a.poisson {
        Some(path) => read_json::<PolyVectorField>(path)?,
        None if a.d % 2 == 0 && a.d > 0 => canonical_poisson(a.d / 2),
        None => return Err(Failure::Input(format!("--d must be a positive even dimension, got {}", a.d))),
    };
    if !pi.is_constant() {
        return Err(Failure::Input("the Moyal comparison needs a constant bivector".into()));
    }
    let s = assemble(&pi, a.order, &WeightSource::analytic())?;
    let closed = moyal_series(&pi.to_matrix()?, a.order)?;
    let diff = s.series().try_sub(&closed)?;
    let per_order: Vec<f64> = diff.coeffs().iter().map(|c| c.max_abs_coeff()).collect();
    let max = per_order.iter().copied().fold(0.0, f64::max);
    let doc = json!({ "d": pi.dim(), "order": a.order, "per_order": per_order, "max_discrepancy": max });
    Ok(Output { text: to_json(&doc)? + "\n", ok: diff.is_zero() })
}

fn configure_threads() -> std::result::Result<(), Failure> {
    if let Ok(v) = std::env::var("KQ_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Input(format!("KQ_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    configure_threads()?;
    match &cli.command {
        Command::Graphs(a) => cmd_graphs(a),
        Command::Weights(w) => match &w.action {
            Some(WeightsAction::Estimate(a)) => cmd_estimate(a),
            Some(WeightsAction::Table(a)) => cmd_table(a),
            None => cmd_estimate(&w.estimate),
        },
        Command::Star { action } => cmd_star(action),
        Command::Verify(a) => cmd_verify(a),
        Command::Moyal(a) => cmd_moyal(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
