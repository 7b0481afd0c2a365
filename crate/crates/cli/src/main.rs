use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use knormal::certificates::{ogata_decompose, weighted_decompose, DEFAULT_NODE_BUDGET};
use knormal::families::{generate_instances, Family, FamilySpec, Instance, ParamRange};
use knormal::report::{self, AnalysisReport, BatchOptions, RowFormat};
use knormal::semigroup::{hilbert_basis, is_very_ample, normality_profile, vertex_cone, Caps};
use knormal::{Error, LatticePolytope, Point};
use serde_json::json;

const FAMILY_HELP: &str = "\
Family specs are written inline as `name:key=val,key=val`; values may be
inclusive ranges `a..b`. Unknown keys are errors. Every family except
pyramid_of accepts `l=N` to take the N-fold pyramid of each member.

  standard_simplex:d=N
  dilated_simplex:d=N,c=C
  rabinowitz_T:p=P[,q=1]          (q=1, or p=2,q=2)
  bruns_gubeladze:s=S              (S >= 4)
  random_hnf_simplex:d=N,max_det=D[,seed=S,count=C]
  pyramid_of:l=N:<base spec>       e.g. pyramid_of:l=1:bruns_gubeladze:s=4

A JSON object {\"family\": ..., \"params\": {...}, \"base\": {...}} is also accepted.

Exit codes: 0 success, 1 usage error, 2 inconclusive (cap or budget hit,
k_P undefined), 3 internal invariant violation.";

#[derive(Parser)]
#[command(name = "knormal", version, about = "Exact k-normality and regularity invariants of lattice polytopes", after_help = FAMILY_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report
    Analyze(Common),
    /// Bound checks only
    Bounds(Common),
    /// Per-k normality verdicts and the invariants k_P, d_P, nu_P
    Knormality(Common),
    /// Vertex cones, their Hilbert bases and the very-ampleness verdict
    Hilbert(Common),
    /// Decomposition certificate for sum a_i v_i + x (or x + (k-1) v_i with --i)
    Decompose(DecomposeArgs),
    /// Polytope JSON for a family
    Generate(Common),
    /// Analyze every member of one or more families, one row per polytope
    Batch(BatchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args)]
struct Common {
    /// Polytope JSON file (an object or an array of objects)
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
    /// Inline or JSON family spec
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write data here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Largest k examined by the k-normality scan
    #[arg(long)]
    k_cap: Option<u64>,
    /// Seed for random families (overrides the spec's seed)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    k: u64,
    /// Lattice point of kP, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<i64>,
    /// Nonnegative vertex coefficients summing to k-1
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<u64>>,
    /// Vertex index for the single-vertex form
    #[arg(long, conflicts_with = "a")]
    i: Option<usize>,
    /// Search node budget
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct BatchArgs {
    /// Family spec; repeatable
    #[arg(long, required = true)]
    family: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the JSON summary here (default: stderr)
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    k_cap: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

enum Failure {
    Usage(String),
    Inconclusive(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Inconclusive(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Inconclusive(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Inconclusive(_) | Error::Overflow => Failure::Inconclusive(m),
            Error::InvariantViolation(_) => Failure::Internal(m),
            _ => Failure::Usage(m),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

/// Sets `seed` on the innermost random family.
fn override_seed(spec: &mut FamilySpec, seed: u64) {
    match spec.base.as_deref_mut() {
        Some(base) => override_seed(base, seed),
        None if spec.family == Family::RandomHnfSimplex => {
            spec.params.insert("seed".into(), ParamRange::single(seed));
        }
        None => {}
    }
}

fn parse_spec(s: &str, seed: Option<u64>) -> CliResult<FamilySpec> {
    let mut spec = FamilySpec::parse(s)?;
    if let Some(seed) = seed {
        override_seed(&mut spec, seed);
    }
    Ok(spec)
}

fn load(c: &Common) -> CliResult<Vec<Instance>> {
    match (&c.file, &c.family) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let items = match value {
                serde_json::Value::Array(items) => items,
                v => vec![v],
            };
            items
                .into_iter()
                .map(|v| {
                    let polytope: LatticePolytope =
                        serde_json::from_value(v).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    Ok(Instance { polytope, seed: None })
                })
                .collect()
        }
        (None, Some(spec)) => {
            let spec = parse_spec(spec, c.seed)?;
            if let Some(seed) = c.seed {
                eprintln!("seed {seed}");
            }
            Ok(generate_instances(&spec)?)
        }
        _ => Err(usage("exactly one of --file or --family is required")),
    }
}

fn caps(p: &LatticePolytope, k_cap: Option<u64>) -> Caps {
    Caps::for_dim(p.dim()).with_k_cap(k_cap)
}

fn emit(output: Option<&Path>, data: &[u8]) -> CliResult {
    let written = match output {
        Some(path) => fs::write(path, data),
        None => io::stdout().lock().write_all(data),
    };
    written.map_err(|e| usage(format!("cannot write output: {e}")))
}

/// One item as an object, several as an array.
fn json_bytes<T: serde::Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = if items.len() == 1 {
        serde_json::to_vec_pretty(&items[0])
    } else {
        serde_json::to_vec_pretty(items)
    }
    .expect("serializable");
    out.push(b'\n');
    out
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| usage(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| usage(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn point(p: &[i64]) -> String {
    format!("({})", p.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

fn undefined_k_p(reports: &[AnalysisReport]) -> CliResult {
    let missing: Vec<&str> = reports.iter().filter(|r| r.k_p.is_none()).map(|r| r.name.as_str()).collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Inconclusive(format!("k_P undefined within the k cap for {}", missing.join(", "))))
    }
}

fn analyze_all(c: &Common) -> CliResult<Vec<AnalysisReport>> {
    load(c)?
        .iter()
        .map(|inst| Ok(report::analyze_instance(inst, caps(&inst.polytope, c.k_cap))?))
        .collect()
}

fn cmd_analyze(c: &Common) -> CliResult {
    let reports = analyze_all(c)?;
    let data = match c.format {
        Format::Json => json_bytes(&reports),
        Format::Csv => {
            let mut out = Vec::new();
            report::write_csv(&reports, &mut out)?;
            out
        }
        Format::Human => reports.iter().map(report::render_human).collect::<Vec<_>>().join("\n").into_bytes(),
    };
    emit(c.output.as_deref(), &data)?;
    undefined_k_p(&reports)
}

fn cmd_bounds(c: &Common) -> CliResult {
    let reports = analyze_all(c)?;
    let data = match c.format {
        Format::Json => {
            let items: Vec<_> = reports
                .iter()
                .map(|r| json!({"name": r.name, "vertices": r.vertices, "seed": r.seed, "bounds": r.bounds}))
                .collect();
            json_bytes(&items)
        }
        Format::Csv => {
            let rows = reports
                .iter()
                .flat_map(|r| {
                    r.bounds.iter().map(|b| {
                        vec![
                            r.name.clone(),
                            b.id.to_string(),
                            b.applicable.to_string(),
                            b.verdict().to_string(),
                            opt(b.lhs),
                            opt(b.rhs),
                        ]
                    })
                })
                .collect();
            csv_bytes(&["name", "bound", "applicable", "verdict", "lhs", "rhs"], rows)?
        }
        Format::Human => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&format!("{}\n", r.name));
                for b in &r.bounds {
                    s.push_str(&format!(
                        "  {:<14} applicable={:<5} {:<5} lhs={} rhs={}\n",
                        b.id.as_str(),
                        b.applicable,
                        b.verdict(),
                        opt(b.lhs),
                        opt(b.rhs)
                    ));
                }
            }
            s.into_bytes()
        }
    };
    emit(c.output.as_deref(), &data)?;
    for r in &reports {
        for b in r.violations() {
            eprintln!("violation: {} {} (lhs {} > rhs {})", r.name, b.id, opt(b.lhs), opt(b.rhs));
        }
    }
    undefined_k_p(&reports)
}

fn cmd_knormality(c: &Common) -> CliResult {
    let mut items = Vec::new();
    let mut undefined = Vec::new();
    for inst in load(c)? {
        let p = &inst.polytope;
        let caps = caps(p, c.k_cap);
        let prof = normality_profile(p, caps)?;
        if prof.k_p.is_none() {
            undefined.push(p.label());
        }
        items.push((p.label(), inst.seed, caps, prof));
    }
    let data = match c.format {
        Format::Json => {
            let v: Vec<_> = items
                .iter()
                .map(|(name, seed, caps, p)| {
                    json!({
                        "name": name, "seed": seed, "caps": caps,
                        "per_k_normal": p.per_k_normal, "k_p": p.k_p, "d_p": p.d_p, "nu_p": p.nu_p,
                        "normal": p.is_normal(), "very_ample": p.very_ample,
                    })
                })
                .collect();
            json_bytes(&v)
        }
        Format::Csv => {
            let rows = items
                .iter()
                .flat_map(|(name, _, _, p)| {
                    p.per_k_normal.iter().map(move |(k, n)| {
                        vec![name.clone(), k.to_string(), n.to_string(), opt(p.k_p), opt(p.d_p), opt(p.nu_p)]
                    })
                })
                .collect();
            csv_bytes(&["name", "k", "k_normal", "k_p", "d_p", "nu_p"], rows)?
        }
        Format::Human => {
            let mut s = String::new();
            for (name, seed, caps, p) in &items {
                let per_k: Vec<String> = p.per_k_normal.iter().map(|(k, n)| format!("{k}:{}", if *n { "yes" } else { "no" })).collect();
                s.push_str(&format!(
                    "{name}\n  seed {}\n  caps k_cap={} invariant_cap={}\n  k-normal {}\n  k_P {}  d_P {}  nu_P {}\n  normal {}  very_ample {}\n",
                    opt(*seed),
                    caps.k_cap,
                    caps.invariant_cap,
                    per_k.join(" "),
                    opt(p.k_p),
                    opt(p.d_p),
                    opt(p.nu_p),
                    p.is_normal(),
                    p.very_ample
                ));
            }
            s.into_bytes()
        }
    };
    emit(c.output.as_deref(), &data)?;
    if undefined.is_empty() {
        Ok(())
    } else {
        Err(Failure::Inconclusive(format!("k_P undefined within the k cap for {}", undefined.join(", "))))
    }
}

fn cmd_hilbert(c: &Common) -> CliResult {
    let mut items = Vec::new();
    for inst in load(c)? {
        let p = &inst.polytope;
        let (very_ample, witnesses) = is_very_ample(p)?;
        let mut cones = Vec::new();
        for v in p.vertices() {
            let cone = vertex_cone(p, v)?;
            let basis = hilbert_basis(&cone)?;
            let missing = witnesses.iter().find(|w| &w.vertex == v).map(|w| w.missing.clone()).unwrap_or_default();
            cones.push(json!({
                "vertex": v, "rays": cone.rays(), "simplicial": cone.is_simplicial(),
                "hilbert_basis": basis.points(), "missing": missing,
            }));
        }
        items.push(json!({"name": p.label(), "very_ample": very_ample, "cones": cones}));
    }
    let data = match c.format {
        Format::Json => json_bytes(&items),
        Format::Csv => return Err(usage("hilbert supports --format json or human")),
        Format::Human => {
            let mut s = String::new();
            for item in &items {
                s.push_str(&format!("{}  very_ample {}\n", item["name"].as_str().unwrap_or(""), item["very_ample"]));
                for cone in item["cones"].as_array().into_iter().flatten() {
                    let pts = |key: &str| -> String {
                        let v: Vec<Point> = serde_json::from_value(cone[key].clone()).unwrap_or_default();
                        v.iter().map(|p| point(p)).collect::<Vec<_>>().join(" ")
                    };
                    let vertex: Point = serde_json::from_value(cone["vertex"].clone()).unwrap_or_default();
                    s.push_str(&format!(
                        "  vertex {}  simplicial {}\n    rays {}\n    hilbert_basis {}\n    missing {}\n",
                        point(&vertex),
                        cone["simplicial"],
                        pts("rays"),
                        pts("hilbert_basis"),
                        pts("missing")
                    ));
                }
            }
            s.into_bytes()
        }
    };
    emit(c.output.as_deref(), &data)
}

fn cmd_decompose(args: &DecomposeArgs) -> CliResult {
    let instances = load(&args.common)?;
    let [inst] = instances.as_slice() else {
        return Err(usage(format!("decompose needs exactly one polytope, got {}", instances.len())));
    };
    let p = &inst.polytope;
    let result = match (&args.a, args.i) {
        (_, Some(i)) => ogata_decompose(p, &args.x, i, args.k, args.budget),
        (Some(a), None) => weighted_decompose(p, &args.x, a, args.k, args.budget),
        (None, None) => return Err(usage("one of --a or --i is required")),
    };
    let cert = match result {
        Err(Error::SearchExhausted(m)) => {
            // guaranteed to succeed on very ample simplices
            return Err(match is_very_ample(p)? {
                (true, _) => Failure::Internal(format!("search exhausted on a very ample simplex: {m}")),
                (false, _) => usage(format!("{} is not very ample: {m}", p.label())),
            });
        }
        r => r?,
    };
    let data = match args.common.format {
        Format::Json => json_bytes(std::slice::from_ref(&cert)),
        Format::Csv => csv_bytes(&["part"], cert.parts.iter().map(|u| vec![point(u)]).collect())?,
        Format::Human => {
            let parts: Vec<String> = cert.parts.iter().map(|u| point(u)).collect();
            format!(
                "polytope {}\nvertices {}\nk {}\ntarget {}\nparts {}\n",
                p.label(),
                p.vertices().iter().map(|v| point(v)).collect::<Vec<_>>().join(" "),
                cert.k,
                point(&cert.target),
                parts.join(" + ")
            )
            .into_bytes()
        }
    };
    emit(args.common.output.as_deref(), &data)
}

fn cmd_generate(c: &Common) -> CliResult {
    if c.family.is_none() {
        return Err(usage("generate requires --family"));
    }
    let polytopes: Vec<LatticePolytope> = load(c)?.into_iter().map(|i| i.polytope).collect();
    let data = match c.format {
        Format::Json => json_bytes(&polytopes),
        Format::Csv => return Err(usage("generate supports --format json or human")),
        Format::Human => polytopes
            .iter()
            .map(|p| {
                let vs: Vec<String> = p.vertices().iter().map(|v| point(v)).collect();
                format!("{}  dim {}  {}\n", p.label(), p.dim(), vs.join(" "))
            })
            .collect::<String>()
            .into_bytes(),
    };
    emit(c.output.as_deref(), &data)
}

fn cmd_batch(args: &BatchArgs) -> CliResult {
    let specs = args.family.iter().map(|s| parse_spec(s, args.seed)).collect::<CliResult<Vec<_>>>()?;
    if let Some(seed) = args.seed {
        eprintln!("seed {seed}");
    }
    let format = match args.format {
        Format::Csv => RowFormat::Csv,
        Format::Json => RowFormat::Json,
        Format::Human => return Err(usage("batch supports --format csv or json")),
    };
    let opts = BatchOptions { k_cap: args.k_cap, workers: args.workers, format };
    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let summary = match report::batch_run(&specs, opts, &mut sink) {
        Ok(s) => s,
        Err(e) => {
            let partial = serde_json::to_string_pretty(&e.partial).expect("serializable");
            eprintln!("{partial}");
            return Err(e.error.into());
        }
    };
    let text = serde_json::to_string_pretty(&summary).expect("serializable") + "\n";
    match &args.summary {
        Some(path) => fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => eprint!("{text}"),
    }
    eprintln!(
        "{} instances, {} analyzed, {} violations, {} failures",
        summary.instances,
        summary.analyzed,
        summary.violations.len(),
        summary.failures.len()
    );
    if summary.failures.iter().any(|f| f.invariant_violation) {
        Err(Failure::Internal("invariant violation during batch".into()))
    } else if !summary.failures.is_empty() {
        Err(Failure::Inconclusive("some instances could not be analyzed".into()))
    } else {
        Ok(())
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
    let result = match &cli.command {
        Command::Analyze(c) => cmd_analyze(c),
        Command::Bounds(c) => cmd_bounds(c),
        Command::Knormality(c) => cmd_knormality(c),
        Command::Hilbert(c) => cmd_hilbert(c),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Generate(c) => cmd_generate(c),
        Command::Batch(a) => cmd_batch(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("knormal: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
