//! Command-line front end for `opensets`.
//!
//! Every command prints one JSON document on standard output. Rationals are
//! strings `p/q` in lowest terms. The `verified` field is computed by an
//! exact re-check of the printed certificate, separate from the search that
//! produced it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opensets::adversary::{
    adversary_hbc, adversary_r2_cover, adversary_r2_full, handed_out_measure, measure_ceiling,
    CertifiedGridCover, ConstantHbc, HbcRealiser, NaiveGridCover, NaiveGridHbc, PsiPipelineCover,
    R2CoverRealiser, RefusingCover, RefusingHbc, RmCodeHbc, Verdict,
};
use opensets::baire::{baire_point, check_nest, limit_audit, run_machine, Audit, MachineConfig, Status};
use opensets::heine_borel::{hbc_rm, whbc};
use opensets::rational::{fmt_rat, half, one, parse_rat, tol, zero};
use opensets::represent::{
    components, components_staged, delta, psi, r3_to_r4, r4_to_r3_fin, r4_to_r3_stage, r2_probe_r4,
    ExactPincherle,
};
use opensets::urysohn::{distance_closed, tietze_extend, urysohn, urysohn_strict, PLFunction};
use opensets::{
    covers, CauchyReal, ClosedRM, Error, FinClosed, FinOpen, OpenR2, OpenR4, RatInterval, Rational,
    Search,
};

pub mod expr;

pub use expr::{parse_set, EvalError, ParseError, SetExpr};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_UNSOUND: i32 = 3;
pub const EXIT_REFUTED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "opensets", version, about = "Exact computation with open and closed subsets of [0, 1]")]
pub struct Cli {
    /// Search budget for every semi-decision.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub fuel: u64,
    /// Write the machine trace (`baire`) to this file.
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum From {
    R2,
    R3,
    R4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum To {
    R3,
    R4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HbcBeta {
    NaiveGrid,
    Constant,
    Refuse,
    RmCode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoverBeta {
    NaiveGrid,
    CertifiedGrid,
    PsiPipeline,
    Refuse,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert an open set between presentations.
    Convert {
        #[arg(long, value_enum)]
        from: From,
        #[arg(long, value_enum)]
        to: To,
        #[arg(long)]
        set: String,
        /// Stream entries to print for `--to r4`, or to read for `--from r4`.
        #[arg(long, default_value_t = 64)]
        entries: usize,
        /// Distances are printed at `j / grid`.
        #[arg(long, default_value_t = 8)]
        grid: u32,
        #[arg(long, default_value_t = 10)]
        precision: u32,
    },
    /// Finite sub-cover of a closed set.
    Subcover {
        #[arg(long)]
        set: String,
        #[arg(long)]
        cover: String,
    },
    /// Finite sub-cover up to patches of total length below epsilon.
    Whbc {
        #[arg(long)]
        set: String,
        #[arg(long)]
        cover: String,
        #[arg(long)]
        epsilon: String,
    },
    /// A point in the intersection of a sequence of dense open sets.
    Baire {
        #[arg(long, default_value = "rational-complements")]
        sets: String,
        #[arg(long, default_value_t = 10)]
        precision: u32,
        #[arg(long, default_value_t = 32)]
        audit_depth: usize,
        /// Machine steps to run when `--trace` is given.
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// A function that is 0 on one closed set and 1 on another.
    Urysohn {
        #[arg(long)]
        c0: String,
        #[arg(long)]
        c1: String,
        /// Also keep the function strictly between 0 and 1 off the sets.
        #[arg(long)]
        strict: bool,
    },
    /// Extend a function from a closed set to [0, 1].
    Tietze {
        #[arg(long)]
        set: String,
        /// Breakpoints `x:v,x:v,...`.
        #[arg(long)]
        points: String,
    },
    /// Maximal intervals of an open set.
    Components {
        #[arg(long)]
        set: String,
        /// Entries of a stream to read.
        #[arg(long, default_value_t = 256)]
        entries: usize,
    },
    /// Distance from a point to a closed set.
    Distance {
        #[arg(long)]
        set: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 20)]
        precision: u32,
    },
    /// Run an adversary against a candidate realiser.
    Adversary {
        #[command(subcommand)]
        which: AdversaryCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum AdversaryCommand {
    /// Probe a radius presentation of [0, 1] and measure what was certified.
    Lemma73 {
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
    },
    /// Finite sub-covers from membership probes.
    Hbc {
        #[arg(long, value_enum, default_value = "naive-grid")]
        beta: HbcBeta,
        /// The answer of the constant realiser.
        #[arg(long, default_value_t = 1_000_000)]
        k: usize,
    },
    /// Finite sub-covers of [0, 1] by radius-presented sets.
    Cover {
        #[arg(long, value_enum, default_value = "naive-grid")]
        beta: CoverBeta,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("trace: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Eval(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Core(e) => match e {
                Error::BadRational(_) | Error::EmptySet | Error::NotDisjoint(_) => EXIT_USAGE,
                Error::Undetermined { .. } => EXIT_EXHAUSTED,
                Error::OracleUnsound(_) | Error::Invariant(_) => EXIT_UNSOUND,
            },
        }
    }
}

/// Exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs it.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    match run(&cli) {
        Ok((code, doc)) => Outcome {
            code,
            stdout: serde_json::to_string_pretty(&doc).expect("json values serialise") + "\n",
            stderr: String::new(),
        },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn r(q: &Rational) -> Value {
    Value::String(fmt_rat(q))
}

fn arg_rat(text: &str) -> Result<Rational, CliError> {
    parse_rat(text).map_err(CliError::from)
}

fn verdict_code(verified: bool) -> i32 {
    if verified {
        EXIT_OK
    } else {
        EXIT_UNSOUND
    }
}

fn exhausted(command: &str, inputs: Value) -> (i32, Value) {
    (EXIT_EXHAUSTED, json!({ "command": command, "inputs": inputs, "result": "exhausted", "verified": false }))
}

/// Whether `(lo, hi) ∩ [0, 1]` lies inside `set`.
fn open_inside(piece: &RatInterval, set: &FinOpen) -> bool {
    let Some((a, b)) = piece.clipped() else {
        return true;
    };
    if a == b {
        return !piece.contains(&a) || set.contains(&a);
    }
    let mid = (&a + &b) * half();
    let union = set.to_union();
    let Some((c, d)) = union.component_of(&mid) else {
        return false;
    };
    let left = if piece.lo < zero() { *c < zero() } else { *c <= piece.lo };
    let right = if piece.hi > one() { *d > one() } else { *d >= piece.hi };
    left && right
}

fn run(cli: &Cli) -> Result<(i32, Value), CliError> {
    let fuel = cli.fuel;
    match &cli.command {
        Command::Convert { from, to, set, entries, grid, precision } => {
            convert(*from, *to, set, *entries, *grid, *precision)
        }
        Command::Subcover { set, cover } => {
            let c_expr = parse_set(set)?;
            let cover_expr = parse_set(cover)?;
            let c = c_expr.closed_set()?;
            let stream = cover_expr.stream()?;
            let inputs = json!({ "set": c_expr.to_string(), "cover": cover_expr.to_string(), "fuel": fuel });
            let Search::Found(cert) = hbc_rm(&ClosedRM::from_fin_closed(&c), &stream, fuel) else {
                return Ok(exhausted("subcover", inputs));
            };
            let verified = cert.check() && covers(&c, &stream.prefix(cert.n0 + 1));
            let doc = json!({
                "command": "subcover",
                "inputs": inputs,
                "n0": cert.n0,
                "certificate": cert,
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Whbc { set, cover, epsilon } => {
            let c_expr = parse_set(set)?;
            let cover_expr = parse_set(cover)?;
            let eps = arg_rat(epsilon)?;
            let c = c_expr.closed_set()?;
            let stream = cover_expr.stream()?;
            let inputs = json!({
                "set": c_expr.to_string(), "cover": cover_expr.to_string(), "epsilon": r(&eps), "fuel": fuel,
            });
            let Search::Found(cert) = whbc(&ClosedRM::from_fin_closed(&c), &stream, &eps, fuel) else {
                return Ok(exhausted("whbc", inputs));
            };
            let length: Rational = cert.patches.iter().map(RatInterval::width).sum();
            let all: Vec<RatInterval> =
                stream.prefix(cert.n0 + 1).into_iter().chain(cert.patches.iter().cloned()).collect();
            let verified = length == cert.patch_length && length < eps && covers(&c, &all);
            let doc = json!({
                "command": "whbc",
                "inputs": inputs,
                "n0": cert.n0,
                "certificate": cert,
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Baire { sets, precision, audit_depth, steps } => {
            let expr = parse_set(sets)?;
            let family = expr.family()?;
            let inputs = json!({
                "sets": expr.to_string(), "precision": precision, "audit_depth": audit_depth, "fuel": fuel,
            });
            let machine = match &cli.trace {
                Some(path) => {
                    let mut out = BufWriter::new(File::create(path)?);
                    let cfg = MachineConfig { fuel, ..MachineConfig::default() };
                    let run = run_machine(&*family, &cfg, *steps, *audit_depth, Some(&mut out))?;
                    out.flush()?;
                    let status = match &run.state.status {
                        Status::Running => json!("running"),
                        Status::Fixed(x) => json!({ "fixed": r(&x.approx(*precision)) }),
                        Status::Stuck(why) => json!({ "stuck": why }),
                    };
                    let cases: Vec<&str> = run.cases.iter().map(|c| c.label()).collect();
                    Some(json!({ "steps": run.cases.len(), "cases": cases, "status": status }))
                }
                None => None,
            };
            let Search::Found(point) = baire_point(&*family, *precision, fuel) else {
                return Ok(exhausted("baire", inputs));
            };
            let nest_ok = check_nest(&point);
            let audit = limit_audit(&point.nest, &*family, *audit_depth, 64);
            let audit_doc = match &audit {
                Audit::Pass(_) => json!({ "pass": audit_depth }),
                Audit::Fail(i) => json!({ "fail": i }),
            };
            let verified = nest_ok.is_ok() && matches!(audit, Audit::Pass(_));
            let mut doc = json!({
                "command": "baire",
                "inputs": inputs,
                "x": r(&point.x.approx(*precision)),
                "nest": point.nest,
                "radii": point.radii.iter().map(r).collect::<Vec<_>>(),
                "audit": audit_doc,
                "verified": verified,
            });
            if let Err(why) = nest_ok {
                doc["nest_error"] = json!(why);
            }
            if let Some(m) = machine {
                doc["machine"] = m;
            }
            Ok((verdict_code(verified), doc))
        }
        Command::Urysohn { c0, c1, strict } => {
            let e0 = parse_set(c0)?;
            let e1 = parse_set(c1)?;
            let (s0, s1) = (e0.closed_set()?, e1.closed_set()?);
            let g = if *strict { urysohn_strict(&s0, &s1)? } else { urysohn(&s0, &s1)? };
            let verified = separates(&g, &s0, &s1);
            let doc = json!({
                "command": "urysohn",
                "inputs": { "c0": e0.to_string(), "c1": e1.to_string(), "strict": strict },
                "function": g,
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Tietze { set, points } => {
            let e = parse_set(set)?;
            let d = e.closed_set()?;
            let f = parse_points(points)?;
            let ext = tietze_extend(&d, &f)?;
            let mut probes: Vec<Rational> = d.pieces().iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).collect();
            probes.extend(f.breakpoints().iter().map(|(x, _)| x.clone()).filter(|x| d.contains(x)));
            let sup = probes.iter().map(|x| abs(f.eval(x))).max().unwrap_or_else(zero);
            let verified = probes.iter().all(|x| ext.eval(x) == f.eval(x)) && ext.sup_abs() == sup;
            let doc = json!({
                "command": "tietze",
                "inputs": { "set": e.to_string(), "points": f },
                "function": ext,
                "sup": r(&sup),
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Components { set, entries } => {
            let e = parse_set(set)?;
            let (pieces, check) = match &e {
                SetExpr::TailCover => (components_staged(&e.stream()?, *entries), None),
                _ => {
                    let s = e.open_set()?;
                    (components(&s), Some(s))
                }
            };
            let disjoint = pieces.windows(2).all(|w| w[0].hi <= w[1].lo);
            let faithful = match &check {
                Some(s) => pieces.iter().all(|p| open_inside(p, s))
                    && pieces.iter().flat_map(|p| [p.lo.clone(), p.hi.clone()]).all(|q| !s.contains(&q)),
                None => true,
            };
            let verified = disjoint && faithful;
            let doc = json!({
                "command": "components",
                "inputs": { "set": e.to_string(), "entries": entries },
                "components": pieces,
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Distance { set, at, precision } => {
            let e = parse_set(set)?;
            let c = e.closed_set()?;
            let q = arg_rat(at)?;
            let d = distance_closed(&c, &CauchyReal::constant(q.clone()), *precision)?;
            let exact = exact_distance(&c, &q);
            let verified = exact.as_ref().is_some_and(|x| abs(x - &d) <= tol(*precision));
            let doc = json!({
                "command": "distance",
                "inputs": { "set": e.to_string(), "at": r(&q), "precision": precision },
                "distance": r(&d),
                "verified": verified,
            });
            Ok((verdict_code(verified), doc))
        }
        Command::Adversary { which } => adversary(which, fuel),
    }
}

fn abs(q: Rational) -> Rational {
    if q < zero() {
        -q
    } else {
        q
    }
}

/// Distance from `q` to a finite union of closed pieces, piece by piece.
fn exact_distance(c: &FinClosed, q: &Rational) -> Option<Rational> {
    let q = q.clone().clamp(zero(), one());
    c.pieces()
        .iter()
        .map(|p| {
            if p.lo <= q && q <= p.hi {
                zero()
            } else if q < p.lo {
                &p.lo - &q
            } else {
                &q - &p.hi
            }
        })
        .min()
}

fn separates(g: &PLFunction, c0: &FinClosed, c1: &FinClosed) -> bool {
    let (lo, hi) = g.range();
    if lo < zero() || hi > one() {
        return false;
    }
    [(c0, zero()), (c1, one())].into_iter().all(|(c, v)| {
        c.pieces().iter().all(|p| {
            let mid = (&p.lo + &p.hi) * half();
            [&p.lo, &mid, &p.hi].into_iter().all(|x| g.eval(x) == v)
                && g.breakpoints().iter().filter(|(x, _)| p.contains(x)).all(|(_, y)| *y == v)
        })
    })
}

fn parse_points(text: &str) -> Result<PLFunction, CliError> {
    let mut points = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (x, v) = item
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("expected `x:v`, found `{item}`")))?;
        points.push((arg_rat(x)?, arg_rat(v)?));
    }
    PLFunction::new(points).map_err(|e| CliError::Usage(e.to_string()))
}

fn convert(from: From, to: To, set: &str, entries: usize, grid: u32, k: u32) -> Result<(i32, Value), CliError> {
    let e = parse_set(set)?;
    let s = e.open_set()?;
    let inputs = json!({
        "set": e.to_string(),
        "from": format!("{from:?}").to_lowercase(),
        "to": format!("{to:?}").to_lowercase(),
        "entries": entries, "grid": grid, "precision": k,
    });
    let doc = match to {
        To::R3 => {
            let grid = grid.max(1);
            let y = OpenR2::canonical(s.clone());
            let stream = OpenR4::from_fin_open(&s);
            let dist = r4_to_r3_fin(&s);
            let mut values = Vec::new();
            let mut verified = true;
            for j in 0..=grid {
                let x = Rational::new(j.into(), grid.into());
                let cx = CauchyReal::constant(x.clone());
                let v = match from {
                    From::R2 => delta(&y, &ExactPincherle, &cx, k)?,
                    From::R3 => dist.dist(&cx, k),
                    From::R4 => r4_to_r3_stage(&stream, &cx, k, entries),
                };
                let truth = s.dist_to_complement(&x).unwrap_or_else(one);
                verified &= abs(&v - &truth) <= tol(k);
                values.push(json!([r(&x), r(&v)]));
            }
            json!({ "command": "convert", "inputs": inputs, "distance": values, "verified": verified })
        }
        To::R4 => {
            let stream = match from {
                From::R2 => psi(&OpenR2::canonical(s.clone()), ExactPincherle)?,
                From::R3 => r3_to_r4(&r4_to_r3_fin(&s)),
                From::R4 => OpenR4::from_fin_open(&s),
            };
            let prefix = stream.prefix(entries);
            let verified = prefix.iter().all(|p| open_inside(p, &s));
            let live: Vec<&RatInterval> = prefix.iter().filter(|p| !p.is_empty_in_unit()).collect();
            json!({
                "command": "convert",
                "inputs": inputs,
                "entries": prefix,
                "non_empty": live.len(),
                "components": FinOpen::new(prefix.iter().cloned()).pieces(),
                "verified": verified,
            })
        }
    };
    let ok = doc["verified"].as_bool().unwrap_or(false);
    Ok((verdict_code(ok), doc))
}

fn adversary(which: &AdversaryCommand, fuel: u64) -> Result<(i32, Value), CliError> {
    match which {
        AdversaryCommand::Lemma73 { queries } => {
            let (y, log) = adversary_r2_full();
            let got = r2_probe_r4(&y, *queries);
            let log = log.lock().map_err(|_| CliError::Usage("probe log poisoned".into()))?;
            let measure = got.measure();
            let missed = got.complement();
            let witness = missed
                .pieces()
                .iter()
                .max_by(|a, b| a.width().cmp(&b.width()))
                .map(|p| (&p.lo + &p.hi) * half());
            let verified = measure <= half()
                && handed_out_measure(&log) <= measure_ceiling(log.len())
                && witness.as_ref().is_some_and(|w| !got.contains(w));
            let doc = json!({
                "command": "adversary lemma73",
                "inputs": { "queries": queries },
                "distinct_queries": log.len(),
                "measure": r(&measure),
                "bound": r(&half()),
                "represented": "(full)",
                "witness": witness.as_ref().map(r),
                "verified": verified,
            });
            Ok((if verified { EXIT_REFUTED } else { EXIT_UNSOUND }, doc))
        }
        AdversaryCommand::Hbc { beta, k } => {
            let realiser: Box<dyn HbcRealiser> = match beta {
                HbcBeta::NaiveGrid => Box::new(NaiveGridHbc { bits: 10 }),
                HbcBeta::Constant => Box::new(ConstantHbc(*k)),
                HbcBeta::Refuse => Box::new(RefusingHbc),
                HbcBeta::RmCode => Box::new(RmCodeHbc { fuel }),
            };
            Ok(verdict_doc("adversary hbc", realiser.name(), adversary_hbc(&*realiser)))
        }
        AdversaryCommand::Cover { beta } => {
            let realiser: Box<dyn R2CoverRealiser> = match beta {
                CoverBeta::NaiveGrid => Box::new(NaiveGridCover { bits: 10, max_sets: 8 }),
                CoverBeta::CertifiedGrid => Box::new(CertifiedGridCover { bits: 6, max_sets: 4 }),
                CoverBeta::PsiPipeline => Box::new(PsiPipelineCover { fuel: fuel.min(10_000) }),
                CoverBeta::Refuse => Box::new(RefusingCover),
            };
            Ok(verdict_doc("adversary cover", realiser.name(), adversary_r2_cover(&*realiser)))
        }
    }
}

fn verdict_doc(command: &str, beta: String, verdict: Verdict) -> (i32, Value) {
    let (code, verified) = match &verdict {
        Verdict::Refuted(w) => (if w.verified { EXIT_REFUTED } else { EXIT_UNSOUND }, w.verified),
        Verdict::Survived { .. } => (EXIT_OK, true),
    };
    let doc = json!({
        "command": command,
        "inputs": { "beta": beta },
        "verdict": verdict,
        "verified": verified,
    });
    (code, doc)
}
