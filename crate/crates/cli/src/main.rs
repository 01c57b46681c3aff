use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use mq_core::generators::{random_isotopy_with, random_permutation};
use mq_core::*;
use serde::Serialize;
use serde_json::json;

const HYPERCUBE_STEP_LIMIT: usize = 200_000;
const HYPERCUBE_ATTEMPTS: u64 = 64;

#[derive(Parser)]
#[command(name = "mq", about = "Analyze and generate finite multary quasigroups")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an MQT file holds a Latin hypercube.
    Validate { file: PathBuf },
    /// Evaluate the operation at one argument tuple.
    Eval {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        args: Vec<usize>,
    },
    /// Print the chords of the factorization graph.
    FactorGraph {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Split into group, nongroup-binary and irreducible components.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Decide whether the quasigroup is an isotope of an iterated group.
    Recognize { file: PathBuf },
    /// Substitute H into variable AT of G.
    Compose {
        outer: PathBuf,
        inner: PathBuf,
        #[arg(long)]
        at: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a quasigroup; writes MQT with a provenance comment.
    Generate(GenerateArgs),
    /// Convert MQT to a transversal design, or verify a TD file.
    Design {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count (and optionally write out) every quasigroup of a shape.
    Enumerate {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        order: usize,
        /// Cap on order^(arity+1).
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: u64,
        /// Write each quasigroup as NNNNNN.mqt into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
    max_candidates: u64,
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    kind: Generator,
}

#[derive(Subcommand)]
enum Generator {
    /// The iterated operation of a catalog group.
    Iterated {
        #[arg(long)]
        group: String,
        #[arg(long)]
        arity: usize,
    },
    /// A random isotope of an iterated catalog group.
    Isotope {
        #[arg(long)]
        group: String,
        #[arg(long)]
        arity: usize,
    },
    /// A random Latin hypercube.
    Hypercube {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        order: usize,
    },
    /// A random tree of compositions.
    Composition {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        order: usize,
    },
    /// A binary quasigroup that is not a group isotope.
    Nongroup {
        #[arg(long)]
        order: usize,
    },
    /// A quasigroup with no chords in its factorization graph.
    Irreducible {
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        order: usize,
    },
    /// G2 with a bijection-relabeled G1 attached at POSITION.
    Twisted {
        #[arg(long)]
        g1: String,
        #[arg(long)]
        g2: String,
        #[arg(long, default_value_t = 1)]
        position: usize,
        /// Space-separated images; random when omitted.
        #[arg(long)]
        beta: Option<String>,
    },
}

/// Everything that ends a run with exit code 1.
enum Failure {
    Domain(Error),
    Io { path: PathBuf, message: String },
    InvalidDesign(DesignReport),
    UnknownGroup(String),
}

impl Failure {
    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Domain(e) => {
                let mut v = serde_json::to_value(e).expect("errors serialize");
                v["message"] = json!(e.to_string());
                v
            }
            Failure::Io { path, message } => json!({"error": "Io", "path": path, "message": message}),
            Failure::InvalidDesign(r) => json!({"error": "InvalidDesign", "counterexample": r.counterexample}),
            Failure::UnknownGroup(name) => json!({
                "error": "UnknownGroup",
                "name": name,
                "known": catalog().iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            }),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io { path: path.into(), message: e.to_string() })
}

fn load(path: &Path) -> Result<MultaryQuasigroup, Failure> {
    Ok(parse_mqt(&read(path)?)?.quasigroup)
}

fn emit(text: String, output: Option<&Path>) -> Outcome {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io { path: path.into(), message: e.to_string() })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn group(name: &str) -> Result<GroupTable, Failure> {
    catalog_group(name).ok_or_else(|| Failure::UnknownGroup(name.into()))
}

fn nodes(vs: &[usize]) -> String {
    vs.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join(" ")
}

fn component_label(c: &Component) -> String {
    match c {
        Component::Group(w) => match w.name {
            Some(name) => format!("group {name}"),
            None => format!("group of order {}", w.group.order()),
        },
        Component::NongroupBinary { .. } => "nongroup binary".into(),
        Component::Irreducible { .. } => "irreducible".into(),
    }
}

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(c, cell)| format!("{cell:<w$}", w = widths[c])).collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    s
}

fn validate_cmd(file: &Path, json: bool) -> Outcome {
    let q = load(file)?;
    Ok(if json {
        to_json(&json!({"valid": true, "arity": q.arity(), "order": q.order()}))
    } else {
        format!("valid: arity {}, order {} ({} cells)\n", q.arity(), q.order(), q.table().len())
    })
}

fn eval_cmd(file: &Path, args: &[usize], json: bool) -> Outcome {
    let v = load(file)?.evaluate(args)?;
    Ok(if json { to_json(&json!({"args": args, "value": v})) } else { format!("{v}\n") })
}

fn factor_graph_cmd(file: &Path, dot: bool, json: bool) -> Outcome {
    let g = factorization_graph(&load(file)?);
    if dot {
        return Ok(g.to_dot());
    }
    let theta = is_theta_complete(&g);
    Ok(if json {
        to_json(&json!({
            "arity": g.arity(),
            "chords": g.chords(),
            "complete": g.is_complete(),
            "three_connected": g.is_three_connected(),
            "theta": theta,
        }))
    } else {
        let yes = |b: bool| if b { "yes" } else { "no" };
        format!(
            "{}\ncomplete: {}\n3-connected: {}\ntheta-complete: {}\n",
            g.chord_line(),
            yes(g.is_complete()),
            yes(g.is_three_connected()),
            yes(theta.complete)
        )
    })
}

fn decompose_cmd(file: &Path, dot: bool, json: bool) -> Outcome {
    let t = decompose_quasigroup(&load(file)?)?;
    if dot {
        return Ok(t.to_dot());
    }
    if json {
        return Ok(t.to_json() + "\n");
    }
    let mut rows = vec![vec!["block".into(), "kind".into(), "nodes".into(), "component".into()]];
    for (i, b) in t.blocks.iter().enumerate() {
        let kind = match b.kind {
            BlockKind::Clique => "clique",
            BlockKind::Circle => "circle",
        };
        rows.push(vec![i.to_string(), kind.into(), nodes(&b.nodes), component_label(&b.component)]);
    }
    let mut s = table(&rows);
    if !t.attachments.is_empty() {
        let mut rows = vec![vec!["parent".into(), "child".into(), "edge".into(), "position".into()]];
        for a in &t.attachments {
            rows.push(vec![
                a.parent.to_string(),
                a.child.to_string(),
                nodes(&[a.edge.0, a.edge.1]),
                a.position.to_string(),
            ]);
        }
        s.push('\n');
        s.push_str(&table(&rows));
    }
    Ok(s)
}

fn recognize_cmd(file: &Path, json: bool) -> Outcome {
    let q = load(file)?;
    let Some(w) = is_iterated_group_isotope(&q)? else {
        let g = factorization_graph(&q);
        return Ok(if json {
            to_json(&json!({"group": null, "chords": g.chords()}))
        } else {
            format!("not an iterated group isotope\n{}\n", g.chord_line())
        });
    };
    let maps: Vec<&[usize]> = w.isotopy.maps().iter().map(Permutation::images).collect();
    if json {
        return Ok(to_json(&json!({
            "group": w.name,
            "order": w.group.order(),
            "table": w.group.table(),
            "isotopy": maps,
        })));
    }
    let name = w.name.map_or_else(|| format!("order {}", w.group.order()), str::to_string);
    let mut s = format!("group: {name}\nisotopy:\n");
    let rows: Vec<Vec<String>> =
        w.isotopy.maps().iter().enumerate().map(|(i, p)| vec![format!("  alpha{i}"), p.to_string()]).collect();
    s.push_str(&table(&rows));
    Ok(s)
}

fn compose_cmd(outer: &Path, inner: &Path, at: usize, output: Option<&Path>) -> Outcome {
    let f = compose(&load(outer)?, &load(inner)?, at)?;
    let note = format!("compose {} {} at={at}", outer.display(), inner.display());
    emit(write_mqt(&f, &[note]), output)
}

fn generate_cmd(args: &GenerateArgs) -> Outcome {
    let seed = args.seed;
    let budget = SearchBudget::new(seed).with_max_candidates(args.max_candidates);
    let mut rng = rng_from_seed(seed);
    let (q, params) = match &args.kind {
        Generator::Iterated { group: name, arity } => {
            (iterated_group(&group(name)?, *arity)?, format!("iterated group={name} arity={arity}"))
        }
        Generator::Isotope { group: name, arity } => {
            let g = group(name)?;
            let iso = random_isotopy_with(g.order(), *arity, &mut rng);
            (iterated_group(&g, *arity)?.apply_isotopy(&iso)?, format!("isotope group={name} arity={arity}"))
        }
        Generator::Hypercube { arity, order } => {
            if *arity < 1 || !(1..=64).contains(order) {
                return Err(
                    Error::PreconditionFailed { reason: "hypercubes need arity >= 1 and order 1..=64".into() }.into()
                );
            }
            let q = (0..HYPERCUBE_ATTEMPTS)
                .find_map(|_| random_latin_hypercube(*arity, *order, &mut rng, HYPERCUBE_STEP_LIMIT))
                .ok_or(Error::BudgetExceeded { budget: HYPERCUBE_ATTEMPTS * HYPERCUBE_STEP_LIMIT as u64 })?;
            (q, format!("hypercube arity={arity} order={order}"))
        }
        Generator::Composition { arity, order } => {
            (random_composition(*order, *arity, &mut rng)?, format!("composition arity={arity} order={order}"))
        }
        Generator::Nongroup { order } => (search_nongroup_binary(*order, &budget)?, format!("nongroup order={order}")),
        Generator::Irreducible { arity, order } => {
            (search_irreducible(*arity, *order, &budget)?, format!("irreducible arity={arity} order={order}"))
        }
        Generator::Twisted { g1, g2, position, beta } => {
            let (a, b) = (group(g1)?, group(g2)?);
            let beta = match beta {
                Some(text) => {
                    let images = text
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<Result<Vec<usize>, _>>()
                        .map_err(|e| Error::InvalidPermutation { reason: e.to_string() })?;
                    Permutation::new(images)?
                }
                None => random_permutation(a.order(), &mut rng),
            };
            let q = twisted_composition(&a, &b, &beta, *position)?;
            (q, format!("twisted g1={g1} g2={g2} position={position} beta={beta}"))
        }
    };
    emit(write_mqt(&q, &[format!("generator {params} seed={seed}")]), args.output.as_deref())
}

fn design_cmd(file: &Path, output: Option<&Path>, json: bool) -> Outcome {
    let text = read(file)?;
    let is_td =
        text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).is_some_and(|l| l.starts_with("td"));
    if is_td {
        let d = TransversalDesign::parse_td(&text)?;
        let report = verify_design(&d, d.strength(), d.index())?;
        if !report.valid {
            return Err(Failure::InvalidDesign(report));
        }
        let summary = json!({
            "valid": true,
            "classes": d.class_count(),
            "order": d.order(),
            "strength": d.strength(),
            "index": d.index(),
            "blocks": d.blocks().len(),
        });
        return Ok(if json {
            to_json(&summary)
        } else {
            format!(
                "valid: TD with {} classes of size {}, strength {}, index {}, {} blocks\n",
                d.class_count(),
                d.order(),
                d.strength(),
                d.index(),
                d.blocks().len()
            )
        });
    }
    let q = parse_mqt(&text)?.quasigroup;
    let d = to_design(&q);
    let report = verify_design(&d, d.strength(), d.index())?;
    if !report.valid {
        return Err(Failure::InvalidDesign(report));
    }
    emit(d.to_td_string(), output)
}

fn enumerate_cmd(arity: usize, order: usize, limit: u64, out_dir: Option<&Path>, json: bool) -> Outcome {
    let io = |path: &Path, e: std::io::Error| Failure::Io { path: path.into(), message: e.to_string() };
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    let mut count = 0u64;
    for q in enumerate_all_with_limit(arity, order, limit)? {
        if let Some(dir) = out_dir {
            let path = dir.join(format!("{count:06}.mqt"));
            let note = format!("enumerate arity={arity} order={order} index={count}");
            fs::write(&path, write_mqt(&q, &[note])).map_err(|e| io(&path, e))?;
        }
        count += 1;
    }
    Ok(if json {
        to_json(&json!({"arity": arity, "order": order, "count": count}))
    } else {
        format!("count: {count}\n")
    })
}

fn run(cli: Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Validate { file } => validate_cmd(file, json),
        Command::Eval { file, args } => eval_cmd(file, args, json),
        Command::FactorGraph { file, dot } => factor_graph_cmd(file, *dot, json),
        Command::Decompose { file, dot } => decompose_cmd(file, *dot, json),
        Command::Recognize { file } => recognize_cmd(file, json),
        Command::Compose { outer, inner, at, output } => compose_cmd(outer, inner, *at, output.as_deref()),
        Command::Generate(args) => generate_cmd(args),
        Command::Design { file, output } => design_cmd(file, output.as_deref(), json),
        Command::Enumerate { arity, order, limit, out_dir } => {
            enumerate_cmd(*arity, *order, *limit, out_dir.as_deref(), json)
        }
    }
}

fn version() -> String {
    format!("{} (mqt format {MQT_FORMAT_VERSION}, td format {TD_FORMAT_VERSION})", env!("CARGO_PKG_VERSION"))
}

fn main() -> ExitCode {
    let matches = Cli::command().version(&*version().leak()).get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({"error": "ThreadPool", "message": e.to_string()}));
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(1)
        }
    }
}
