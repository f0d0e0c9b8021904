//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 invalid input,
//! 3 budget or size cap exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::branching::{build_branching, c_tuples, cp_from_matrix, cp_via_lescot, lump, BranchingMatrix};
use crate::cache::Cache;
use crate::catalog::{self, Descriptor};
use crate::error::{Error, Result};
use crate::feitfine::feit_fine_pairs;
use crate::formulas::{grid_points, verify_suite, Grid};
use crate::groups::Group;
use crate::oracle::{commuting_pairs_matrix_algebra, commuting_tuples_count, simultaneous_classes_count, Budget};
use crate::rational::ExactRational;

/// Largest matrix printed in full by `branching`.
const PRINT_DIM: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "commprob", version, about = "Exact commuting probabilities of finite groups")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Output {
    /// Machine-readable JSON on standard output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Branching,
    Lescot,
    Oracle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Order, abelian flag, class count and z-class count.
    Info {
        desc: String,
        #[command(flatten)]
        out: Output,
    },
    /// Conjugacy classes: representative id, size, centralizer order.
    Classes {
        desc: String,
        #[command(flatten)]
        out: Output,
    },
    /// Branching matrix dimensions and column sums.
    Branching {
        desc: String,
        /// Also print the lumped quotient.
        #[arg(long)]
        lump: bool,
        /// Neither read nor write the cache.
        #[arg(long)]
        no_cache: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Exact cp_n(G) as num/den.
    Cp {
        desc: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "branching")]
        method: Method,
        #[command(flatten)]
        out: Output,
    },
    /// c_G(n), the number of simultaneous conjugacy classes of commuting n-tuples.
    Ctuples {
        desc: String,
        #[arg(long)]
        n: u32,
        /// Cross-check by explicit orbit enumeration and Burnside.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Commuting pairs in the d x d matrix algebra over GF(q), closed form.
    Feitfine {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: u64,
        /// Cross-check by scanning every pair.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Compare engine values with every registered closed form.
    Verify {
        #[arg(long, default_value = "default")]
        grid: String,
        /// JSON report: to standard output when given alone, else to the path.
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        json: Option<Option<PathBuf>>,
    },
}

/// Parses `argv`, runs the command and returns the exit code. Normal
/// output goes to `out`, diagnostics to standard error.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { e.print() } else { write!(out, "{e}") };
            return code;
        }
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cli.threads {
            b = b.num_threads(t.max(1));
        }
        b.build()
    };
    let mut buf = Vec::new();
    let result = match pool {
        Ok(pool) => pool.install(|| run(&cli.command, &mut buf)),
        Err(e) => Err(Error::Internal(format!("thread pool: {e}"))),
    };
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        eprintln!("error: {e}");
        return 1;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn emit_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    emit(out, &serde_json::to_string_pretty(v).expect("json values serialize"))
}

fn group_of(desc: &str) -> Result<(Descriptor, Group)> {
    let d = catalog::parse(desc)?;
    let g = catalog::build(&d)?;
    Ok((d, g))
}

fn branching_of(d: &Descriptor, g: &Group, cache: &Cache) -> Result<BranchingMatrix> {
    let (b, hit) = cache.get_or_build(&d.to_string(), || build_branching(g))?;
    if hit && b.group_order() != g.order() {
        log::warn!("cached matrix for {d} has the wrong order; recomputing");
        return build_branching(g);
    }
    Ok(b)
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn run(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    let cache = Cache::from_env();
    match cmd {
        Command::Info { desc, out: o } => {
            let (d, g) = group_of(desc)?;
            let whole = g.whole();
            let classes = g.conjugacy_classes(&whole);
            let z = g.z_classes(&classes).len();
            let meta = d.metadata();
            let abelian = g.is_abelian(&whole);
            if o.json {
                emit_json(out, &json!({
                    "descriptor": d.to_string(),
                    "order": g.order(),
                    "abelian": abelian,
                    "class_count": classes.len(),
                    "z_class_count": z,
                    "nonabelian_simple": meta.nonabelian_simple,
                    "solvable": meta.solvable,
                }))?;
            } else {
                emit(out, &format!(
                    "descriptor: {d}\norder: {}\nabelian: {abelian}\nclasses: {}\nz-classes: {z}",
                    g.order(),
                    classes.len()
                ))?;
            }
        }
        Command::Classes { desc, out: o } => {
            let (_, g) = group_of(desc)?;
            let whole = g.whole();
            let cd = g.conjugacy_classes(&whole);
            let rows: Vec<(u32, usize, usize)> = cd
                .classes
                .iter()
                .map(|c| Ok((c.rep, c.size, g.centralizer(&whole, c.rep)?.order())))
                .collect::<Result<_>>()?;
            if o.json {
                let v: Vec<Value> = rows
                    .iter()
                    .map(|&(rep, size, z)| json!({"rep": rep, "size": size, "centralizer_order": z}))
                    .collect();
                emit_json(out, &Value::Array(v))?;
            } else {
                let mut s = format!("{:>8} {:>8} {:>12}\n", "rep", "size", "centralizer");
                for (rep, size, z) in rows {
                    s += &format!("{rep:>8} {size:>8} {z:>12}\n");
                }
                emit(out, &s)?;
            }
        }
        Command::Branching { desc, lump: do_lump, no_cache, out: o } => {
            let (d, g) = group_of(desc)?;
            let cache = if *no_cache { Cache::disabled() } else { cache };
            let b = branching_of(&d, &g, &cache)?;
            let sums: Vec<u64> = (0..b.dim()).map(|i| b.column_sum(i)).collect();
            let t = do_lump.then(|| lump(&b));
            if o.json {
                let mut v = json!({
                    "descriptor": d.to_string(),
                    "order": g.order(),
                    "dimension": b.dim(),
                    "root": b.root(),
                    "column_sums": sums,
                    "states": b.states(),
                });
                if let Some(t) = &t {
                    v["lumped"] = json!({
                        "dimension": t.dim(),
                        "blocks": t.blocks,
                        "root_block": t.root_block,
                        "quotient": t.quotient,
                    });
                }
                emit_json(out, &v)?;
            } else {
                let mut s = format!("{d}: {} states, root {}\ncolumn sums: {sums:?}\n", b.dim(), b.root());
                if b.dim() <= PRINT_DIM {
                    for row in b.dense() {
                        s += &format!("  {row:?}\n");
                    }
                }
                if let Some(t) = &t {
                    s += &format!("lumped: {} types, root type {}\n", t.dim(), t.root_block);
                    for row in &t.quotient {
                        s += &format!("  {row:?}\n");
                    }
                }
                emit(out, &s)?;
            }
        }
        Command::Cp { desc, n, method, out: o } => {
            if *n < 1 {
                return Err(Error::InvalidInput("--n must be at least 1".into()));
            }
            let (d, g) = group_of(desc)?;
            let cp = match method {
                Method::Branching => cp_from_matrix(&branching_of(&d, &g, &cache)?, *n)?,
                Method::Lescot => cp_via_lescot(&g, *n)?,
                Method::Oracle => {
                    let t = commuting_tuples_count(&g, *n, &Budget::default())?;
                    ExactRational::from_ratio(&t, &big(g.order()).pow(*n))
                }
            };
            let method = format!("{method:?}").to_lowercase();
            if o.json {
                emit_json(out, &json!({"descriptor": d.to_string(), "n": n, "method": method, "cp": cp.to_string()}))?;
            } else {
                emit(out, &cp.to_string())?;
            }
        }
        Command::Ctuples { desc, n, oracle, out: o } => {
            let (d, g) = group_of(desc)?;
            let c = c_tuples(&branching_of(&d, &g, &cache)?, *n);
            let mut v = json!({"descriptor": d.to_string(), "n": n, "c": c.to_string()});
            let mut ok = true;
            if *oracle {
                let r = simultaneous_classes_count(&g, *n, &Budget::default())?;
                ok = r.consistent() && r.orbit_count == c;
                v["oracle"] = json!({
                    "tuple_count": r.tuple_count.to_string(),
                    "orbit_count": r.orbit_count.to_string(),
                    "burnside_count": r.burnside_count.to_string(),
                    "match": ok,
                });
            }
            if o.json {
                emit_json(out, &v)?;
            } else if *oracle {
                emit(out, &format!("{c}\noracle: orbits {} burnside {} tuples {} {}", v["oracle"]["orbit_count"].as_str().unwrap(), v["oracle"]["burnside_count"].as_str().unwrap(), v["oracle"]["tuple_count"].as_str().unwrap(), if ok { "match" } else { "MISMATCH" }))?;
            } else {
                emit(out, &c.to_string())?;
            }
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Feitfine { d, q, oracle, out: o } => {
            let p = feit_fine_pairs(*d, *q)?;
            let brute = if *oracle { Some(commuting_pairs_matrix_algebra(*d, *q, &Budget::default())?) } else { None };
            let ok = brute.as_ref().is_none_or(|b| *b == p);
            if o.json {
                let mut v = json!({"d": d, "q": q, "pairs": p.to_string()});
                if let Some(b) = &brute {
                    v["oracle"] = json!({"pairs": b.to_string(), "match": ok});
                }
                emit_json(out, &v)?;
            } else {
                let mut s = format!("P({d}) at q={q}: {p}");
                if let Some(b) = &brute {
                    s += &format!("\nbrute force: {b} {}", if ok { "match" } else { "MISMATCH" });
                }
                emit(out, &s)?;
            }
            return Ok(if ok { 0 } else { 1 });
        }
        Command::Verify { grid, json: j } => {
            let grid: Grid = grid.parse()?;
            let report = verify_suite(&grid_points(grid))?;
            match j {
                Some(None) => emit(out, &report.to_json())?,
                Some(Some(path)) => {
                    std::fs::write(path, report.to_json() + "\n")?;
                    emit(out, &report.to_table())?;
                }
                None => emit(out, &report.to_table())?,
            }
            let bad = report.rows.iter().filter(|r| !r.matches).count();
            if bad > 0 {
                eprintln!("{bad} of {} rows do not match", report.rows.len());
                return Ok(1);
            }
        }
    }
    Ok(0)
}
