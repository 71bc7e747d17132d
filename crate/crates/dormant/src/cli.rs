//! Command-line front end. Every command prints one JSON record (or CSV rows)
//! to standard output; exit status 0 on success, 1 on domain errors, 2 on usage
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra_core::Field;
use crate::disk_dmod::{direct_sum, exponent, local_model, p_curvature};
use crate::graphs::TrivalentSemiGraph;
use crate::oper_p1::{cache_dir_from_env, vertex_table_cached, AdmissibilityTable, ORACLE_VERSION};
use crate::radii::{check_prime_level, enum_xi2, lift_fiber, reduce_level, Radius, ResidueClass};
use crate::tqft_count::{formulas, Counter, Engine, FormulaQuery};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "dormant", version, about = "Dormant PGL2 opers of finite level: radii, local models, vertex tables and counts")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Directory for cached admissibility tables (default: $DORMANT_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Recompute tables instead of reading or writing the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for sampled verification.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Include wall time in the output record.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct PrimeLevel {
    /// Odd prime p.
    #[arg(long)]
    pub p: u32,
    /// Level N (residues mod p^N).
    #[arg(long, default_value_t = 1)]
    pub level: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Radii sets (Z/p^N)^x / {±1}.
    #[command(subcommand)]
    Radii(RadiiCmd),
    /// Local models on the formal disk.
    #[command(subcommand)]
    Disk(DiskCmd),
    /// Admissible radii triples on the 3-pointed line (library: oper_p1::vertex_table).
    VertexTable {
        #[command(flatten)]
        pl: PrimeLevel,
    },
    /// Count dormant opers of type (g, r) with given radii (library: tqft_count::Counter::count).
    Count {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long, default_value_t = 0)]
        marked: u32,
        /// Comma-separated radius representatives, one per marked point.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<u64>,
        /// Count on this graph only (JSON {"vertices","edges","legs"}).
        #[arg(long)]
        graph_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "contract")]
        engine: EngineArg,
    },
    /// Identity checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Closed-form dimensions and ranks (library: tqft_count::formulas).
    Formulas {
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        marked: i64,
        /// Rank n of the group PGL_n.
        #[arg(long, default_value_t = 2)]
        n: i64,
        /// One of hitchin-base, hitchin-base-cusp, de-rham-h1-rank, sol-h1-rank,
        /// sol-coker-rank, moduli-dim; all when omitted.
        #[arg(long)]
        query: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EngineArg {
    Contract,
    Backtrack,
}

#[derive(Subcommand, Debug)]
pub enum RadiiCmd {
    /// List representatives (library: radii::enum_xi2).
    Enum {
        #[command(flatten)]
        pl: PrimeLevel,
    },
    /// Radii one level up reducing to the given one (library: radii::lift_fiber).
    Lift {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long)]
        radius: u64,
    },
    /// Reduce a radius to a lower level (library: radii::reduce_level).
    Reduce {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long)]
        radius: u64,
        #[arg(long)]
        to: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum DiskCmd {
    /// Whether the local model of each exponent has vanishing p^N-curvature
    /// (library: disk_dmod::local_model, disk_dmod::p_curvature).
    Curvature {
        #[command(flatten)]
        pl: PrimeLevel,
        /// Comma-separated exponents mod p^N.
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<i64>,
        /// Truncation order (default 2 p^N).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Recover the exponent of a direct sum of local models (library: disk_dmod::exponent).
    Exponent {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<i64>,
        #[arg(long)]
        order: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// count(g1+g2, r1+r2) as a sum over the glued edge
    /// (library: tqft_count::Counter::verify_gluing_tree).
    Tree {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long)]
        g1: u32,
        #[arg(long)]
        r1: u32,
        #[arg(long)]
        g2: u32,
        #[arg(long)]
        r2: u32,
        /// r1 + r2 comma-separated radii; all tuples when omitted.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// count(g+1, r) as a sum over the fused legs (library: tqft_count::Counter::verify_gluing_loop).
    Loop {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        marked: u32,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<u64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Count on every graph of the type and compare (library: tqft_count::Counter::count).
    GraphIndependence {
        #[command(flatten)]
        pl: PrimeLevel,
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        marked: u32,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Domain failure with a message; maps to exit status 1.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

#[derive(Serialize)]
struct OutputRecord {
    schema: u32,
    command: String,
    query: Value,
    result: Value,
    provenance: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

struct Output {
    command: String,
    query: Value,
    result: Value,
    provenance: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Parse arguments and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let start = Instant::now();
    let result = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(o) => {
            let wall = cli.global.timing.then(|| start.elapsed().as_secs_f64() * 1000.0);
            match emit(&o, cli.global.format, wall, out) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e.0);
                    1
                }
            }
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn emit(o: &Output, format: Format, wall: Option<f64>, out: &mut dyn Write) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let rec = OutputRecord {
                schema: SCHEMA_VERSION,
                command: o.command.clone(),
                query: o.query.clone(),
                result: o.result.clone(),
                provenance: o.provenance.clone(),
                wall_time_ms: wall,
            };
            writeln!(out, "{}", serde_json::to_string(&rec)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&o.header)?;
            for r in &o.rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure(e.to_string()))?;
            out.write_all(&bytes)?;
        }
    }
    Ok(())
}

fn table(g: &GlobalOpts, pl: PrimeLevel) -> Result<AdmissibilityTable, Failure> {
    let dir = if g.no_cache { None } else { g.cache_dir.clone().or_else(cache_dir_from_env) };
    Ok(vertex_table_cached(pl.p, pl.level, dir.as_deref())?)
}

fn provenance(engine: &str, graphs_checked: Option<usize>) -> Value {
    let mut v = json!({ "oracle_version": ORACLE_VERSION, "engine": engine });
    if let Some(n) = graphs_checked {
        v["graphs_checked"] = json!(n);
    }
    v
}

fn join(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn sample_radii(counter: &Counter, r: u32, given: &[u64], samples: Option<usize>, seed: u64) -> Result<Vec<Vec<u64>>, Failure> {
    if !given.is_empty() {
        if given.len() != r as usize {
            return Err(Failure(format!("expected {r} radii, got {}", given.len())));
        }
        return Ok(vec![given.to_vec()]);
    }
    let mut all = counter.all_radii(r);
    if let Some(k) = samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        all.shuffle(&mut rng);
        all.truncate(k);
        all.sort();
    }
    Ok(all)
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Radii(RadiiCmd::Enum { pl }) => {
            check_prime_level(pl.p, pl.level)?;
            let reps: Vec<u64> = enum_xi2(pl.p, pl.level).iter().map(|r| r.rep).collect();
            Ok(Output {
                command: "radii enum".into(),
                query: json!({ "p": pl.p, "N": pl.level }),
                result: json!(reps),
                provenance: provenance("radii", None),
                header: vec!["p".into(), "N".into(), "radius".into()],
                rows: reps.iter().map(|r| vec![pl.p.to_string(), pl.level.to_string(), r.to_string()]).collect(),
            })
        }
        Command::Radii(RadiiCmd::Lift { pl, radius }) => {
            let rho = Radius::from_rep(pl.p, pl.level, *radius)?;
            let reps: Vec<u64> = lift_fiber(&rho).iter().map(|r| r.rep).collect();
            Ok(Output {
                command: "radii lift".into(),
                query: json!({ "p": pl.p, "N": pl.level, "radius": radius }),
                result: json!(reps),
                provenance: provenance("radii", None),
                header: vec!["p".into(), "N".into(), "radius".into(), "lift".into()],
                rows: reps.iter().map(|r| vec![pl.p.to_string(), (pl.level + 1).to_string(), radius.to_string(), r.to_string()]).collect(),
            })
        }
        Command::Radii(RadiiCmd::Reduce { pl, radius, to }) => {
            let rho = Radius::from_rep(pl.p, pl.level, *radius)?;
            if *to == 0 || *to > pl.level {
                return Err(Failure(format!("target level {to} must lie in 1..={}", pl.level)));
            }
            let red = reduce_level(&rho, *to).rep;
            Ok(Output {
                command: "radii reduce".into(),
                query: json!({ "p": pl.p, "N": pl.level, "radius": radius, "to": to }),
                result: json!(red),
                provenance: provenance("radii", None),
                header: vec!["p".into(), "N".into(), "radius".into(), "to".into(), "reduced".into()],
                rows: vec![vec![pl.p.to_string(), pl.level.to_string(), radius.to_string(), to.to_string(), red.to_string()]],
            })
        }
        Command::Disk(DiskCmd::Curvature { pl, exponents, order }) => {
            check_prime_level(pl.p, pl.level)?;
            let f = Field::prime(pl.p)?;
            let m = pl.level - 1;
            let order = order.unwrap_or(2 * (pl.p as usize).pow(pl.level));
            let mut results = Vec::new();
            for &d in exponents {
                let module = local_model(&f, ResidueClass::new(pl.p, pl.level, d), m, order)?;
                results.push((ResidueClass::new(pl.p, pl.level, d).value, p_curvature(&module).is_zero()));
            }
            Ok(Output {
                command: "disk curvature".into(),
                query: json!({ "p": pl.p, "N": pl.level, "exponents": exponents, "order": order }),
                result: json!(results.iter().map(|(d, z)| json!({ "exponent": d, "curvature_zero": z })).collect::<Vec<_>>()),
                provenance: provenance("disk_dmod", None),
                header: vec!["p".into(), "N".into(), "exponent".into(), "curvature_zero".into()],
                rows: results.iter().map(|(d, z)| vec![pl.p.to_string(), pl.level.to_string(), d.to_string(), z.to_string()]).collect(),
            })
        }
        Command::Disk(DiskCmd::Exponent { pl, exponents, order }) => {
            check_prime_level(pl.p, pl.level)?;
            let f = Field::prime(pl.p)?;
            let m = pl.level - 1;
            let order = order.unwrap_or(2 * (pl.p as usize).pow(pl.level));
            let mods = exponents
                .iter()
                .map(|&d| local_model(&f, ResidueClass::new(pl.p, pl.level, d), m, order))
                .collect::<Result<Vec<_>, _>>()?;
            let e = exponent(&direct_sum(&mods))?;
            Ok(Output {
                command: "disk exponent".into(),
                query: json!({ "p": pl.p, "N": pl.level, "exponents": exponents, "order": order }),
                result: json!(e.entries),
                provenance: provenance("disk_dmod", None),
                header: vec!["p".into(), "N".into(), "exponent".into()],
                rows: vec![vec![pl.p.to_string(), pl.level.to_string(), join(&e.entries)]],
            })
        }
        Command::VertexTable { pl } => {
            let t = table(g, *pl)?;
            let triples: Vec<[u64; 3]> = t.admissible.iter().copied().collect();
            Ok(Output {
                command: "vertex-table".into(),
                query: json!({ "p": pl.p, "N": pl.level }),
                result: serde_json::to_value(&t)?,
                provenance: provenance("oper_p1", None),
                header: vec!["p".into(), "N".into(), "r1".into(), "r2".into(), "r3".into()],
                rows: triples
                    .iter()
                    .map(|t| vec![pl.p.to_string(), pl.level.to_string(), t[0].to_string(), t[1].to_string(), t[2].to_string()])
                    .collect(),
            })
        }
        Command::Count { pl, genus, marked, radii, graph_file, engine } => {
            let counter = Counter::new(table(g, *pl)?);
            let engine = match engine {
                EngineArg::Contract => Engine::Contract,
                EngineArg::Backtrack => Engine::Backtrack,
            };
            let (count, checked, cert) = match graph_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let gr = TrivalentSemiGraph::from_json(text.trim())?;
                    let c = counter.count_on_graph(&gr, radii, engine)?;
                    (c, 1, json!([{ "graph": gr, "count": c }]))
                }
                None => {
                    let res = counter.count(*genus, *marked, radii)?;
                    (res.count, res.graphs_checked, serde_json::to_value(&res.certificate)?)
                }
            };
            let engine_name = match engine {
                Engine::Contract => "contract",
                Engine::Backtrack => "backtrack",
            };
            Ok(Output {
                command: "count".into(),
                query: json!({ "p": pl.p, "N": pl.level, "g": genus, "r": marked, "radii": radii }),
                result: json!({ "count": count, "certificate": cert }),
                provenance: provenance(engine_name, Some(checked)),
                header: ["p", "N", "g", "r", "radii", "count", "graphs_checked"].map(String::from).to_vec(),
                rows: vec![vec![
                    pl.p.to_string(),
                    pl.level.to_string(),
                    genus.to_string(),
                    marked.to_string(),
                    join(radii),
                    count.to_string(),
                    checked.to_string(),
                ]],
            })
        }
        Command::Verify(VerifyCmd::Tree { pl, g1, r1, g2, r2, radii, samples }) => {
            let counter = Counter::new(table(g, *pl)?);
            let cases = sample_radii(&counter, r1 + r2, radii, *samples, g.seed)?;
            let mut rows = Vec::new();
            let mut results = Vec::new();
            for rho in cases {
                let rep = counter.verify_gluing_tree(*g1, *r1, *g2, *r2, &rho[..*r1 as usize], &rho[*r1 as usize..])?;
                rows.push(vec![pl.p.to_string(), pl.level.to_string(), join(&rho), rep.lhs.to_string(), rep.rhs.to_string()]);
                results.push(json!({ "radii": rho, "lhs": rep.lhs, "rhs": rep.rhs }));
            }
            Ok(Output {
                command: "verify tree".into(),
                query: json!({ "p": pl.p, "N": pl.level, "g1": g1, "r1": r1, "g2": g2, "r2": r2 }),
                result: json!({ "ok": true, "checked": results }),
                provenance: provenance("contract", None),
                header: ["p", "N", "radii", "lhs", "rhs"].map(String::from).to_vec(),
                rows,
            })
        }
        Command::Verify(VerifyCmd::Loop { pl, genus, marked, radii, samples }) => {
            let counter = Counter::new(table(g, *pl)?);
            let cases = sample_radii(&counter, *marked, radii, *samples, g.seed)?;
            let mut rows = Vec::new();
            let mut results = Vec::new();
            for rho in cases {
                let rep = counter.verify_gluing_loop(*genus, *marked, &rho)?;
                rows.push(vec![pl.p.to_string(), pl.level.to_string(), join(&rho), rep.lhs.to_string(), rep.rhs.to_string()]);
                results.push(json!({ "radii": rho, "lhs": rep.lhs, "rhs": rep.rhs }));
            }
            Ok(Output {
                command: "verify loop".into(),
                query: json!({ "p": pl.p, "N": pl.level, "g": genus, "r": marked }),
                result: json!({ "ok": true, "checked": results }),
                provenance: provenance("contract", None),
                header: ["p", "N", "radii", "lhs", "rhs"].map(String::from).to_vec(),
                rows,
            })
        }
        Command::Verify(VerifyCmd::GraphIndependence { pl, genus, marked, samples }) => {
            let counter = Counter::new(table(g, *pl)?);
            let cases = sample_radii(&counter, *marked, &[], *samples, g.seed)?;
            let mut rows = Vec::new();
            let mut results = Vec::new();
            let mut checked = 0;
            for rho in cases {
                let res = counter.count(*genus, *marked, &rho)?;
                checked = res.graphs_checked;
                rows.push(vec![pl.p.to_string(), pl.level.to_string(), join(&rho), res.count.to_string(), checked.to_string()]);
                results.push(json!({ "radii": rho, "count": res.count }));
            }
            Ok(Output {
                command: "verify graph-independence".into(),
                query: json!({ "p": pl.p, "N": pl.level, "g": genus, "r": marked }),
                result: json!({ "ok": true, "checked": results }),
                provenance: provenance("contract", Some(checked)),
                header: ["p", "N", "radii", "count", "graphs_checked"].map(String::from).to_vec(),
                rows,
            })
        }
        Command::Formulas { genus, marked, n, query } => {
            let qs: Vec<FormulaQuery> = match query {
                Some(q) => vec![q.parse()?],
                None => FormulaQuery::ALL.to_vec(),
            };
            let vals: Vec<(FormulaQuery, i64)> = qs.iter().map(|&q| (q, formulas(*genus, *marked, *n, q))).collect();
            let mut obj = serde_json::Map::new();
            for (q, v) in &vals {
                obj.insert(q.name().to_string(), json!(v));
            }
            Ok(Output {
                command: "formulas".into(),
                query: json!({ "g": genus, "r": marked, "n": n }),
                result: Value::Object(obj),
                provenance: provenance("formulas", None),
                header: ["g", "r", "n", "query", "value"].map(String::from).to_vec(),
                rows: vals
                    .iter()
                    .map(|(q, v)| vec![genus.to_string(), marked.to_string(), n.to_string(), q.name().to_string(), v.to_string()])
                    .collect(),
            })
        }
    }
}
