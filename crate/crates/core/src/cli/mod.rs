//! The `zstar` command-line frontend.

pub mod cache;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rug::ops::Pow;
use rug::Rational;
use serde_json::{json, Value};

use crate::binary_tau::{tau_decompose_sum, tau_expand, tau_value, DigitSeq, SeqTail};
use crate::cantor_hall::{check_hall_condition, decompose, theorem12_gaps, thickness, Family, Operation, Subdivider};
use crate::enclosure::{Enclosure, Real};
use crate::error::{Result, ZstarError};
use crate::expansion::{ExpandOptions, Expander};
use crate::explorer::{box_count_sequence, covering_length, dimension_formula, search_algebraic, SearchOptions};
use crate::index::{Tail, TailedIndex};
use crate::values::{eval_parts, tail_factor, EvalConfig};
use cache::{cache_key, Cache};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "zstar",
    version,
    about = "Certified multiple zeta-star values, digit expansions and Cantor-set tools"
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "ZSTAR_PRECISION_BITS", default_value_t = 128)]
    precision_bits: u32,
    /// Truncation point of the nested sums for `eval`.
    #[arg(long, global = true, env = "ZSTAR_TRUNCATION", default_value_t = 1_000_000)]
    truncation: u64,
    /// Depth for expansions, sweeps and searches (command-specific default).
    #[arg(long, global = true, env = "ZSTAR_DEPTH")]
    depth: Option<usize>,
    /// Tolerance for decompositions.
    #[arg(long, global = true, env = "ZSTAR_TOL", default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, env = "ZSTAR_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory of the value cache (default: platform data directory).
    #[arg(long, global = true, env = "ZSTAR_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate zeta*(index, tail).
    Eval {
        /// Comma-separated index, first entry >= 2.
        #[arg(long)]
        index: String,
        /// `none` or the entry q of a constant tail {q}^inf.
        #[arg(long, default_value = "none")]
        tail: String,
    },
    /// Digit expansion of x > 1.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Tail factor zeta*({q}^inf), and F_m(q) when m is given.
    Tails {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        m: Option<u64>,
    },
    /// One subdivision step of a node (the root when --type is omitted).
    Subdivide {
        /// eta-dq:Q, tau-bk:K, eta-tp:P or tau-lp:P.
        #[arg(long)]
        family: Family,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long = "type")]
        type_i: Option<u32>,
    },
    /// Gap condition sweep.
    HallCheck {
        #[arg(long)]
        family: Family,
    },
    /// Certificate for x = v1 op v2 with v1, v2 in eta(D_q).
    Decompose {
        #[arg(value_parser = parse_op)]
        op: Operation,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 2)]
        q: u32,
    },
    /// Binary map tau.
    Tau {
        #[command(subcommand)]
        cmd: TauCommand,
    },
    /// First-stage gaps of the closure of eta(T_p).
    Gaps {
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// Newhouse thickness of a bounded family.
    Thickness {
        #[arg(long)]
        family: Family,
    },
    /// alpha_p and log(alpha_p)/log 2.
    Dimension {
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
    /// Level-n box counts for tau(L_p), as columns `n a_n growth`.
    BoxCount {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 40)]
        n: u32,
    },
    /// Covering length of eta(D_q) inside a window, as columns `depth nodes length`.
    Covering {
        #[arg(long, default_value_t = 2)]
        q: u32,
        /// Window cap R: [zeta*({q}^inf), zeta*(2,{1}^R)].
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
    /// Expand algebraic candidates and classify them.
    SearchAlgebraic {
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        #[arg(long, default_value_t = 3)]
        max_height: u32,
    },
    /// Value cache maintenance.
    Cache {
        #[command(subcommand)]
        cmd: CacheCommand,
    },
}

#[derive(Subcommand, Debug)]
enum TauCommand {
    /// Exact value of a periodic digit sequence.
    Value {
        #[arg(long, default_value = "")]
        prefix: String,
        /// Repeating block; omit for a tail of ones.
        #[arg(long)]
        period: Option<String>,
    },
    /// Digits of a rational in (0, 1].
    Expand {
        #[arg(long)]
        x: String,
    },
    /// Exact x = tau(a) + tau(b) with a, b in B_k.
    Decompose {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    Stats,
    Clear,
}

fn parse_op(s: &str) -> std::result::Result<Operation, String> {
    s.parse().map_err(|e: ZstarError| e.to_string())
}

/// Decimal (`3.99`, `-1e-3`), fraction (`5/7`) or integer, parsed exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || ZstarError::Parse(format!("'{s}' is not a decimal or fraction"));
    let t = s.trim();
    if t.contains('/') {
        return t.parse::<Rational>().map_err(|_| bad());
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: rug::Integer = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp.saturating_sub(frac.len() as i32);
    if scale.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let mut q = Rational::from(digits);
    let p = rug::Integer::from(10).pow(scale.unsigned_abs());
    if scale >= 0 {
        q *= p;
    } else {
        q /= p;
    }
    Ok(if neg { -q } else { q })
}

fn parse_real(s: &str) -> Result<Real> {
    parse_rational(s).map(Real::Exact)
}

fn parse_digits(s: &str) -> Result<Vec<u32>> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return Ok(vec![]);
    }
    t.split(',')
        .map(|d| {
            d.trim()
                .parse::<u32>()
                .map_err(|_| ZstarError::Parse(format!("bad digit '{d}' in '{s}'")))
        })
        .collect()
}

fn parse_tail(s: &str) -> Result<Tail> {
    match s.trim() {
        "none" | "" => Ok(Tail::NoTail),
        q => match q.parse::<u32>() {
            Ok(0) | Err(_) => Err(ZstarError::Parse(format!(
                "tail must be 'none' or a positive integer, got '{s}'"
            ))),
            Ok(v) => Ok(Tail::ConstTail(v)),
        },
    }
}

fn tail_json(t: &Tail) -> Value {
    match t {
        Tail::NoTail => json!("none"),
        Tail::ConstTail(q) => json!(q),
    }
}

fn enc(e: &Enclosure) -> Value {
    serde_json::to_value(e).expect("enclosures serialize")
}

fn index_json(t: &TailedIndex) -> (Value, Value) {
    (json!(t.prefix.parts()), tail_json(&t.tail))
}

struct Out {
    format: Format,
    stdout: Vec<u8>,
}

impl Out {
    fn emit(&mut self, v: Value, text: String) {
        match self.format {
            Format::Json => {
                let s = serde_json::to_string_pretty(&v).expect("json output");
                writeln!(self.stdout, "{s}").unwrap();
            }
            Format::Text => {
                write!(self.stdout, "{text}").unwrap();
                if !text.ends_with('\n') {
                    writeln!(self.stdout).unwrap();
                }
            }
        }
    }
}

fn open_cache(cli: &Cli) -> Result<Cache> {
    let dir = match &cli.cache_dir {
        Some(d) => d.clone(),
        None => dirs::data_dir().unwrap_or_else(std::env::temp_dir).join("zstar"),
    };
    let c = Cache::open(&dir)?;
    for w in &c.warnings {
        eprintln!("warning: {w}; the entry will be recomputed");
    }
    Ok(c)
}

fn dispatch(cli: &Cli, out: &mut Out) -> Result<()> {
    let prec = cli.precision_bits;
    if !(16..=1 << 16).contains(&prec) {
        return Err(ZstarError::Parse("--precision-bits must lie in [16, 65536]".into()));
    }
    match &cli.cmd {
        Command::Eval { index, tail } => {
            let prefix = parse_digits(index)?;
            let tail = parse_tail(tail)?;
            if prefix.is_empty() && tail == Tail::NoTail {
                return Err(ZstarError::InvalidIndex("empty index".into()));
            }
            let tail_s = match tail {
                Tail::NoTail => "none".to_string(),
                Tail::ConstTail(q) => q.to_string(),
            };
            let key = cache_key(&prefix, &tail_s, prec, cli.truncation);
            let mut cache = open_cache(cli)?;
            let value = match cache.get(&key) {
                Some(v) => v,
                None => {
                    let cfg = EvalConfig::new(prec, cli.truncation);
                    let v = match eval_parts(&prefix, tail, &cfg) {
                        Err(ZstarError::DivergentValue(_)) => Enclosure::infinite(prec),
                        other => other?,
                    };
                    if let Err(e) = cache.put(key, &v) {
                        eprintln!("warning: cache not written: {e}");
                    }
                    v
                }
            };
            out.emit(
                json!({"index": prefix, "tail": tail_json(&tail), "precision": prec, "truncation": cli.truncation, "value": enc(&value)}),
                format!("{value:.40}"),
            );
        }
        Command::Expand { x } => {
            let x = parse_real(x)?;
            let depth = cli.depth.unwrap_or(10);
            let r = Expander::new(ExpandOptions {
                precision: prec,
                ..ExpandOptions::default()
            })
            .expand(&x, depth)?;
            out.emit(
                json!({"x": x.to_string(), "digits": r.digits, "status": r.status, "residual": enc(&r.residual), "low": enc(&r.low), "high": enc(&r.high)}),
                format!("digits: {:?}\nstatus: {:?}\nresidual: {}", r.digits, r.status, r.residual),
            );
        }
        Command::Tails { q, m } => {
            let cfg = EvalConfig::engine(prec);
            let lim = eval_parts(&[], Tail::ConstTail(*q), &cfg)?;
            let f = m.map(|m| tail_factor(m, *q));
            let mut text = format!("zeta*({{{q}}}^inf) = {lim}");
            if let (Some(m), Some(f)) = (m, &f) {
                text.push_str(&format!("\nF_{m}({q}) = {f}"));
            }
            out.emit(
                json!({"q": q, "limit": enc(&lim), "m": m, "f_m": f.map(|f| f.to_string())}),
                text,
            );
        }
        Command::Subdivide { family, prefix, type_i } => {
            let s = Subdivider::new(*family, prec)?;
            let node = match type_i {
                Some(i) => s.node(&parse_digits(prefix)?, *i, None)?,
                None => s.root()?,
            };
            let d = s.subdivide(&node)?;
            let nj = |n: &crate::cantor_hall::SubdivisionNode| json!({"prefix": n.prefix, "type": n.type_i, "low": enc(&n.low), "high": enc(&n.high)});
            out.emit(
                json!({"family": family.to_string(), "node": nj(&node), "lower": nj(&d.lower), "gap": [enc(&d.gap.0), enc(&d.gap.1)], "upper": nj(&d.upper)}),
                format!(
                    "node  {node}: [{}, {}]\nlower {}: [{}, {}]\ngap   ({}, {})\nupper {}: [{}, {}]",
                    node.low, node.high, d.lower, d.lower.low, d.lower.high, d.gap.0, d.gap.1, d.upper, d.upper.low, d.upper.high
                ),
            );
        }
        Command::HallCheck { family } => {
            let depth = cli.depth.unwrap_or(5) as u32;
            let r = check_hall_condition(*family, depth, prec)?;
            let mut text = format!(
                "family {family}, depth {depth}: {} ({} nodes, worst margin {:e}, max gap/child {})",
                if r.holds { "holds" } else { "FAILS" },
                r.nodes_checked,
                r.worst_margin,
                r.exact_max_ratio
                    .as_ref()
                    .map_or(r.max_ratio.to_string(), |q| q.to_string())
            );
            for v in &r.violations {
                text.push_str(&format!(
                    "\n  violation at {:?} T_{}: gap {:e} > {:e}",
                    v.prefix, v.type_i, v.gap, v.min_child
                ));
            }
            out.emit(
                json!({"family": family.to_string(), "depth": depth, "holds": r.holds, "nodes": r.nodes_checked,
                       "worst_margin": r.worst_margin, "max_ratio": r.max_ratio, "violations": r.violations}),
                text,
            );
        }
        Command::Decompose { op, x, q } => {
            let x = parse_real(x)?;
            let c = decompose(*op, &x, *q, cli.tol, prec)?;
            let (ld, lt) = index_json(&c.left);
            let (rd, rt) = index_json(&c.right);
            out.emit(
                json!({"op": op.to_string(), "q": q, "left_digits": ld, "left_tail": lt, "right_digits": rd, "right_tail": rt,
                       "left_value": enc(&c.left_value), "right_value": enc(&c.right_value), "combined": enc(&c.combined),
                       "target": x.to_string(), "residual_bound": c.residual_bound, "tolerance": c.tolerance, "window": c.cap}),
                format!(
                    "{} {} {} = {}\ntarget {}\nresidual <= {:e}",
                    c.left,
                    op.symbol(),
                    c.right,
                    c.combined,
                    x,
                    c.residual_bound
                ),
            );
        }
        Command::Tau { cmd } => match cmd {
            TauCommand::Value { prefix, period } => {
                let prefix = parse_digits(prefix)?;
                let tail = match period {
                    Some(p) => SeqTail::Periodic(parse_digits(p)?),
                    None => SeqTail::OnesTail,
                };
                let s = DigitSeq::new(prefix, tail)?;
                let v = tau_value(&s)?;
                out.emit(
                    json!({"sequence": s.to_string(), "value": v.to_string()}),
                    format!("tau{s} = {v}"),
                );
            }
            TauCommand::Expand { x } => {
                let xv = parse_rational(x)?;
                let depth = cli.depth.unwrap_or(20);
                let s = tau_expand(&xv, depth)?;
                out.emit(json!({"x": xv.to_string(), "sequence": s}), format!("{s}"));
            }
            TauCommand::Decompose { x, k } => {
                let xv = parse_rational(x)?;
                let depth = cli.depth.unwrap_or(40) as u32;
                let c = tau_decompose_sum(&xv, *k, depth)?;
                out.emit(
                    json!({"x": xv.to_string(), "k": k, "left": c.left, "right": c.right, "sum": c.sum.to_string(), "residual": c.residual.to_string()}),
                    format!("{} + {} = {}\nresidual {}", c.left, c.right, c.sum, c.residual),
                );
            }
        },
        Command::Gaps { p } => {
            let r = theorem12_gaps(*p, prec)?;
            let mut text = format!("U1 = [{}, {}]\nU2 = [{}, {}]\n", r.u1.0, r.u1.1, r.u2.0, r.u2.1);
            for o in &r.ops {
                text.push_str(&format!("{}:", o.op));
                if o.gaps.is_empty() {
                    text.push_str(" no certified gap\n");
                }
                for g in &o.gaps {
                    text.push_str(&format!(" gap ({}, {})\n", g.0, g.1));
                }
            }
            text.push_str(&r.containment_note);
            let ops: Vec<Value> = r
                .ops
                .iter()
                .map(|o| {
                    json!({"op": o.op.to_string(),
                           "intervals": o.pieces.iter().map(|s| json!({"label": s.label, "low": enc(&s.low), "high": enc(&s.high)})).collect::<Vec<_>>(),
                           "gaps": o.gaps.iter().map(|g| json!([enc(&g.0), enc(&g.1)])).collect::<Vec<_>>()})
                })
                .collect();
            out.emit(
                json!({"p": p, "u1": [enc(&r.u1.0), enc(&r.u1.1)], "u2": [enc(&r.u2.0), enc(&r.u2.1)], "ops": ops, "note": r.containment_note}),
                text,
            );
        }
        Command::Thickness { family } => {
            let depth = cli.depth.unwrap_or(8) as u32;
            let r = thickness(*family, depth, prec)?;
            let text = match &r.exact {
                Some(e) => format!("thickness of {family} at depth {depth}: {e} ({} gaps)", r.gaps),
                None => format!("thickness of {family} at depth {depth}: {} ({} gaps)", r.value, r.gaps),
            };
            out.emit(serde_json::to_value(&r).unwrap(), text);
        }
        Command::Dimension { p } => {
            let depth = cli.depth.unwrap_or(60) as u32;
            let r = dimension_formula(*p, depth, prec)?;
            out.emit(
                serde_json::to_value(&r).unwrap(),
                format!(
                    "alpha_{p} = {}\ndim = {}\nbox-count estimate at depth {depth}: {}",
                    r.alpha, r.dim, r.empirical_dim
                ),
            );
        }
        Command::BoxCount { p, n } => {
            let a = box_count_sequence(*p, *n)?;
            let mut text = String::from("# n a_n growth\n");
            let mut rows = vec![];
            for k in 1..=*n as usize {
                let g = Rational::from((a[k].clone(), a[k - 1].clone())).to_f64().log2();
                text.push_str(&format!("{k} {} {g}\n", a[k]));
                rows.push(json!({"n": k, "count": a[k].to_string(), "growth": g}));
            }
            out.emit(json!({"p": p, "rows": rows}), text);
        }
        Command::Covering { q, window } => {
            let depth = cli.depth.unwrap_or(6) as u32;
            let mut text = String::from("# depth nodes length\n");
            let mut rows = vec![];
            for d in 0..=depth {
                let c = covering_length(*q, d, *window, prec)?;
                text.push_str(&format!("{d} {} {}\n", c.nodes, c.length.to_f64()));
                rows.push(json!({"depth": d, "nodes": c.nodes, "length": enc(&c.length)}));
            }
            out.emit(json!({"q": q, "window": window, "rows": rows}), text);
        }
        Command::SearchAlgebraic { max_degree, max_height } => {
            let depth = cli.depth.unwrap_or(10);
            let r = search_algebraic(SearchOptions {
                max_degree: *max_degree,
                max_height: *max_height,
                expand_depth: depth,
                precision: prec,
            })?;
            let mut text = format!(
                "{} candidates in (1, {:.12}]: {} eliminated, {} survive to depth {depth}, {} ambiguous\n",
                r.candidates.len(),
                r.upper_bound,
                r.eliminated,
                r.survivors,
                r.ambiguous
            );
            for c in &r.candidates {
                text.push_str(&format!(
                    "{:.15} {:?} {:?} {:?}\n",
                    c.value, c.polynomial, c.classification, c.digits
                ));
            }
            out.emit(serde_json::to_value(&r).unwrap(), text);
        }
        Command::Cache { cmd } => {
            let mut cache = open_cache(cli)?;
            match cmd {
                CacheCommand::Stats => {
                    let path = cache.path().display().to_string();
                    out.emit(
                        json!({"path": path, "entries": cache.len(), "corrupt_lines": cache.warnings.len()}),
                        format!(
                            "{path}: {} entries, {} corrupt lines",
                            cache.len(),
                            cache.warnings.len()
                        ),
                    );
                }
                CacheCommand::Clear => {
                    cache.clear()?;
                    out.emit(json!({"cleared": true}), "cache cleared".into());
                }
            }
        }
    }
    Ok(())
}

/// Runs the frontend on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = Out {
        format: cli.format,
        stdout: vec![],
    };
    let code = match dispatch(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    let mut so = std::io::stdout().lock();
    let _ = so.write_all(&out.stdout);
    let _ = so.flush();
    code
}
