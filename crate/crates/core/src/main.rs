use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use spinorsel::corpus::{parse_corpus, CorpusEntry};
use spinorsel::definite::{
    class_set, dpinf_experiment, verify_spinor_trace_formula_with, verify_trace_formula_with, DEFAULT_PRIMES_CAP,
};
use spinorsel::hunt::{hunt, HuntConfig};
use spinorsel::localorder::{eichler_invariant, normalizer_norms, unit_norms};
use spinorsel::numthy::{factor, QuadOrder};
use spinorsel::quat::RatQuatAlgebra;
use spinorsel::spinor::{bad_primes, selectivity, spinor_class_group, spinor_genus_field};
use spinorsel::{Error, Result};

#[derive(Debug, Parser, Serialize)]
#[command(name = "spinorsel", version, about = "Optimal spinor selectivity for quaternion orders over Q")]
#[serde(rename_all = "camelCase")]
struct Cli {
    /// Order corpus file (one order per line, see the README).
    #[arg(long, global = true)]
    order: Option<PathBuf>,
    /// Use only the entry with this 0-based index from the corpus.
    #[arg(long, global = true)]
    index: Option<usize>,
    /// Quadratic order as "m,f": conductor f in Q(sqrt m).
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Residue precision for local embedding counts (default: per prime).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Largest neighbor prime for class enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_PRIMES_CAP)]
    primes_cap: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Indented key/value view of the report.
    #[arg(long, global = true)]
    #[serde(skip)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
enum Command {
    /// Ramified places of (a, b | Q).
    Ramification {
        #[arg(value_name = "A", allow_negative_numbers = true)]
        first: i128,
        #[arg(value_name = "B", allow_negative_numbers = true)]
        second: i128,
    },
    /// Discriminant, Eichler invariants and local norm groups of each order.
    OrderInfo,
    /// Selectivity report for --b against each order.
    Selectivity,
    /// The trace formula for --b, summed over right ideal classes.
    Trace,
    /// The trace formula for --b, per spinor class.
    SpinorTrace,
    /// Types of maximal orders in (-1, -p | Q) with an optimal embedding of Z[sqrt -1].
    Dpinf { p: u64 },
    /// Sweep small definite algebras for orders whose spinor genus field contains K.
    Hunt {
        #[arg(long, default_value_t = HuntConfig::default().max_algebra_disc)]
        max_disc: u64,
        #[arg(long, default_value_t = HuntConfig::default().max_conductor)]
        max_conductor: u64,
        #[arg(long, default_value_t = HuntConfig::default().max_b_disc)]
        max_b_disc: u64,
    },
}

/// Process exit status: 0 pass, 1 input or hypothesis error, 2 precision
/// instability, 3 verification mismatch.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionUnstable { .. } | Error::SearchInconclusive(_) => 2,
        Error::Mismatch(_) | Error::MassShortfall { .. } => 3,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "INVALID_INPUT",
        Error::NotARing(..) => "NOT_A_RING",
        Error::NoUnity => "NO_UNITY",
        Error::UnsupportedBaseOrder(_) => "UNSUPPORTED_BASE_ORDER",
        Error::PrecisionUnstable { .. } => "PRECISION_UNSTABLE",
        Error::SearchInconclusive(_) => "SEARCH_INCONCLUSIVE",
        Error::NotLocallyPrincipal(_) => "NOT_LOCALLY_PRINCIPAL",
        Error::IndefiniteAlgebra => "INDEFINITE_ALGEBRA",
        Error::NotEmbeddable(_) => "NOT_EMBEDDABLE",
        Error::NotSameGenus(_) => "NOT_SAME_GENUS",
        Error::ConditionStarFails(_) => "CONDITION_STAR_FAILS",
        Error::NoReferenceOrder => "NO_REFERENCE_ORDER",
        Error::HypothesisViolation(_) => "HYPOTHESIS_VIOLATION",
        Error::MassShortfall { .. } => "MASS_SHORTFALL",
        Error::Mismatch(_) => "MISMATCH",
    }
}

fn parse_b(spec: Option<&str>) -> Result<QuadOrder> {
    let spec = spec.ok_or_else(|| Error::InvalidInput("--b \"m,f\" is required".into()))?;
    let (m, f) = spec.split_once(',').unwrap_or((spec, "1"));
    let m = m.trim().parse().map_err(|_| Error::InvalidInput(format!("bad m in {spec:?}")))?;
    let f = f.trim().parse().map_err(|_| Error::InvalidInput(format!("bad f in {spec:?}")))?;
    QuadOrder::new(m, f)
}

fn load_orders(cli: &Cli) -> Result<Vec<CorpusEntry>> {
    let path = cli.order.as_ref().ok_or_else(|| Error::InvalidInput("--order FILE is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let entries = parse_corpus(&text)?;
    match cli.index {
        Some(i) => entries
            .get(i)
            .cloned()
            .map(|e| vec![e])
            .ok_or_else(|| Error::InvalidInput(format!("corpus has no entry {i}"))),
        None => Ok(entries),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

/// The report, and whether every verification in it passed.
fn run(cli: &Cli) -> Result<(Value, bool)> {
    match &cli.command {
        Command::Ramification { first, second } => {
            if *first == 0 || *second == 0 {
                return Err(Error::InvalidInput("a and b must be nonzero".into()));
            }
            let alg = RatQuatAlgebra::new(*first, *second);
            let mut places: Vec<Value> = alg.ram_primes().into_iter().map(|p| json!(p)).collect();
            if alg.is_definite() {
                places.push(json!("INF"));
            }
            Ok((json!({"ramified": places, "disc": alg.disc().to_string(), "definite": alg.is_definite()}), true))
        }
        Command::OrderInfo => {
            let mut out = Vec::new();
            for e in load_orders(cli)? {
                let o = &e.order;
                let profile: Vec<Value> = bad_primes(o)
                    .into_iter()
                    .map(|p| {
                        let nn = normalizer_norms(o, p);
                        json!({
                            "p": p,
                            "eichlerInvariant": eichler_invariant(o, p),
                            "unitNorms": unit_norms(o, p).reps(),
                            "normalizerNorms": nn.group.reps(),
                            "normalizerHasOddValuation": nn.has_odd_valuation,
                        })
                    })
                    .collect();
                let field = spinor_genus_field(o);
                out.push(json!({
                    "label": e.label,
                    "algebra": [o.alg.a.to_string(), o.alg.b.to_string()],
                    "algebraDisc": o.alg.disc().to_string(),
                    "disc": o.disc.to_string(),
                    "discFactors": factor(o.disc),
                    "maximal": o.is_maximal(),
                    "profile": profile,
                    "spinorGenusField": field.members,
                    "spinorClassNumber": spinor_class_group(o).order(),
                }));
            }
            Ok((Value::Array(out), true))
        }
        Command::Selectivity => {
            let b = parse_b(cli.b.as_deref())?;
            let mut out = Vec::new();
            for e in load_orders(cli)? {
                let r = selectivity(&b, &e.order)?;
                out.push(json!({"label": e.label, "report": to_value(&r)}));
            }
            Ok((Value::Array(out), true))
        }
        Command::Trace | Command::SpinorTrace => {
            let b = parse_b(cli.b.as_deref())?;
            let mut out = Vec::new();
            let mut pass = true;
            for e in load_orders(cli)? {
                let order: Arc<_> = e.order.clone();
                let set = class_set(&order, cli.primes_cap, cli.seed)?;
                let report = if matches!(cli.command, Command::Trace) {
                    let r = verify_trace_formula_with(&b, &set, cli.precision)?;
                    pass &= r.pass;
                    to_value(&r)
                } else {
                    let r = verify_spinor_trace_formula_with(&b, &set, cli.precision)?;
                    pass &= r.pass;
                    to_value(&r)
                };
                out.push(json!({"label": e.label, "classSet": to_value(&set.summary()), "report": report}));
            }
            Ok((Value::Array(out), pass))
        }
        Command::Dpinf { p } => {
            let r = dpinf_experiment(*p, cli.primes_cap, cli.seed)?;
            Ok((to_value(&r), r.pass))
        }
        Command::Hunt { max_disc, max_conductor, max_b_disc } => {
            let config = HuntConfig { max_algebra_disc: *max_disc, max_conductor: *max_conductor, max_b_disc: *max_b_disc };
            Ok((to_value(&hunt(&config)?), true))
        }
    }
}

fn render_pretty(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let nested = match x {
                    Value::Object(m) => !m.is_empty(),
                    Value::Array(a) => a.iter().any(Value::is_object),
                    _ => false,
                };
                if nested {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_pretty(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k:<28} {x}\n"));
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                render_pretty(x, indent + 1, out);
            }
        }
        _ => out.push_str(&format!("{pad}{v}\n")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (body, code) = match run(&cli) {
        Ok((result, pass)) => (json!({"status": if pass { "PASS" } else { "MISMATCH" }, "result": result}), if pass { 0 } else { 3 }),
        Err(e) => (
            json!({"status": "ERROR", "error": {"kind": error_kind(&e), "message": e.to_string()}}),
            exit_code(&e),
        ),
    };
    let mut report = body;
    report["config"] = to_value(&cli);
    report["version"] = json!(env!("CARGO_PKG_VERSION"));
    let text = if cli.pretty {
        let mut s = String::new();
        render_pretty(&report, 0, &mut s);
        s
    } else {
        format!("{report}\n")
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
