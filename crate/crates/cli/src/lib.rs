//! Command-line front end: argument grammar, dispatch to the algebra engine,
//! and text or JSON rendering.

use std::fmt::Display;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use patalg::algebra::{pushforward, Algebra, InversionGraph, MagnusDirection, Morphism};
use patalg::freeness::{freeness_certificate, FreeStructure};
use patalg::instances::{Gr, MGr, MGrProduct, MPer, MarkedPermutation, Per, SComp, SPart};
use patalg::linear::LinearCombination;
use patalg::mper::{self, Convention};
use patalg::series::{brute_force_irreducible_counts_capped, irreducible_series, BRUTE_FORCE_CAP};
use patalg::{Error, Presheaf, Result};

/// Largest host accepted by `pat count`.
pub const HOST_CAP: usize = 20;
/// Largest `--max-n` accepted by `enumerate irreducibles --method series`.
pub const SERIES_CAP: usize = 200;

pub const INSTANCES: [&str; 7] = ["per", "mper", "gr", "mgr", "mgr-star", "spart", "scomp"];

#[derive(Debug, Parser)]
#[command(name = "patalg", version, about = "Pattern algebras of combinatorial presheaves")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for the parallel scans.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Marked-permutation convention, or `all`.
    #[arg(long, global = true, default_value = "paper")]
    convention: String,

    /// Report wall-clock time in the JSON `timings` field.
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MorphismName {
    Inv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pattern functions and their algebra.
    Pat {
        #[command(subcommand)]
        op: PatOp,
    },
    /// Inflation factorizations of marked permutations.
    Mper {
        #[command(subcommand)]
        op: MperOp,
    },
    /// Freeness certificate up to a degree.
    Freeness {
        instance: String,
        #[arg(long, default_value_t = 3)]
        degree: usize,
    },
    /// Enumerations.
    Enumerate {
        #[command(subcommand)]
        what: EnumerateOp,
    },
}

#[derive(Debug, Subcommand)]
enum PatOp {
    /// Number of occurrences of a pattern in a host.
    Count { instance: String, pattern: String, host: String },
    /// Expansion of a product of pattern functions.
    Product {
        instance: String,
        #[arg(required = true, num_args = 1..)]
        factors: Vec<String>,
    },
    Coproduct { instance: String, object: String },
    Antipode { instance: String, object: String },
    /// Magnus transform of a coinvariant.
    Magnus {
        instance: String,
        object: String,
        /// Apply the inverse transform.
        #[arg(long)]
        inverse: bool,
    },
    /// Pullback of a pattern function along a morphism.
    Pushforward { morphism: MorphismName, object: String },
}

#[derive(Debug, Subcommand)]
enum MperOp {
    Factor { object: String },
}

#[derive(Debug, Subcommand)]
enum EnumerateOp {
    /// Irreducible marked permutations by size.
    Irreducibles {
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
    },
    /// All coinvariants of one size.
    Coinvariants {
        instance: String,
        #[arg(long)]
        size: usize,
    },
}

/// Exit status and both output streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Exit status for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Unsupported { .. } => 1,
        Error::Parse { .. } => 2,
        Error::Resource { .. } => 3,
    }
}

struct Report {
    verb: &'static str,
    inputs: Value,
    result: Value,
    convention: Value,
    caps: Value,
    text: String,
}

struct Ctx {
    cap_override: Option<usize>,
    conventions: Vec<Convention>,
}

impl Ctx {
    fn cap(&self, default: usize) -> usize {
        self.cap_override.unwrap_or(default)
    }

    fn convention_value(&self) -> Value {
        match self.conventions.as_slice() {
            [c] => json!(c.name()),
            cs => json!(cs.iter().map(|c| c.name()).collect::<Vec<_>>()),
        }
    }
}

fn parse_conventions(s: &str) -> Result<Vec<Convention>> {
    if s == "all" {
        Ok(Convention::all().to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

fn cap_override() -> Result<Option<usize>> {
    match std::env::var("PATALG_MAX_SIZE") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse { token: v.clone(), reason: "PATALG_MAX_SIZE must be a nonnegative integer".into() }),
        Err(_) => Ok(None),
    }
}

/// Parse and execute one command line; `argv[0]` is the program name.
pub fn run_command<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Output { code: 2, stdout: String::new(), stderr: rendered }
            } else {
                Output { code: 0, stdout: rendered, stderr: String::new() }
            };
        }
    };
    let setup = || -> Result<Ctx> {
        Ok(Ctx { cap_override: cap_override()?, conventions: parse_conventions(&cli.convention)? })
    };
    let ctx = match setup() {
        Ok(c) => c,
        Err(e) => return failure(&e),
    };

    let start = Instant::now();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, &ctx)),
            Err(e) => Err(Error::Domain(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli.command, &ctx),
    };
    let elapsed = start.elapsed();

    match outcome {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Text => {
                    let mut t = r.text;
                    if !t.ends_with('\n') {
                        t.push('\n');
                    }
                    t
                }
                Format::Json => {
                    let timings =
                        if cli.timings { json!({ "elapsed_ms": elapsed.as_secs_f64() * 1e3 }) } else { Value::Null };
                    let doc = json!({
                        "verb": r.verb,
                        "inputs": r.inputs,
                        "result": r.result,
                        "convention": r.convention,
                        "caps": r.caps,
                        "timings": timings,
                    });
                    serde_json::to_string_pretty(&doc).expect("JSON value serializes") + "\n"
                }
            };
            Output { code: 0, stdout, stderr: String::new() }
        }
        Err(e) => failure(&e),
    }
}

fn failure(e: &Error) -> Output {
    Output { code: exit_code(e), stdout: String::new(), stderr: format!("error: {e}\n") }
}

macro_rules! with_instance {
    ($ctx:expr, $name:expr, |$inst:ident| $body:expr) => {{
        let ctx: &Ctx = $ctx;
        match $name {
            "per" => {
                let $inst = Per::with_cap(ctx.cap(Per::DEFAULT_CAP));
                $body
            }
            "mper" => {
                let $inst = MPer::with_cap(ctx.cap(MPer::DEFAULT_CAP));
                $body
            }
            "gr" => {
                let $inst = Gr::with_cap(ctx.cap(Gr::DEFAULT_CAP));
                $body
            }
            "mgr" => {
                let $inst = MGr::with_cap(MGrProduct::Vee, ctx.cap(MGr::DEFAULT_CAP));
                $body
            }
            "mgr-star" => {
                let $inst = MGr::with_cap(MGrProduct::Star, ctx.cap(MGr::DEFAULT_CAP));
                $body
            }
            "spart" => {
                let $inst = SPart::with_cap(ctx.cap(SPart::DEFAULT_CAP));
                $body
            }
            "scomp" => {
                let $inst = SComp::with_cap(ctx.cap(SComp::DEFAULT_CAP));
                $body
            }
            other => Err(Error::Parse {
                token: other.to_string(),
                reason: format!("unknown instance, expected one of {}", INSTANCES.join(", ")),
            }),
        }
    }};
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Report> {
    match cmd {
        Command::Pat { op } => match op {
            PatOp::Count { instance, pattern, host } => {
                with_instance!(ctx, instance.as_str(), |i| pat_count(&i, pattern, host))
            }
            PatOp::Product { instance, factors } => {
                with_instance!(ctx, instance.as_str(), |i| pat_product(&i, factors))
            }
            PatOp::Coproduct { instance, object } => {
                with_instance!(ctx, instance.as_str(), |i| pat_coproduct(&i, object))
            }
            PatOp::Antipode { instance, object } => {
                with_instance!(ctx, instance.as_str(), |i| pat_antipode(&i, object))
            }
            PatOp::Magnus { instance, object, inverse } => {
                let dir = if *inverse { MagnusDirection::Inverse } else { MagnusDirection::Forward };
                with_instance!(ctx, instance.as_str(), |i| pat_magnus(&i, object, dir))
            }
            PatOp::Pushforward { morphism: MorphismName::Inv, object } => pat_pushforward_inv(ctx, object),
        },
        Command::Mper { op: MperOp::Factor { object } } => mper_factor(ctx, object),
        Command::Freeness { instance, degree } => {
            with_instance!(ctx, instance.as_str(), |i| freeness(&i, *degree, ctx))
        }
        Command::Enumerate { what } => match what {
            EnumerateOp::Irreducibles { max_n, method } => enumerate_irreducibles(ctx, *max_n, *method),
            EnumerateOp::Coinvariants { instance, size } => {
                with_instance!(ctx, instance.as_str(), |i| enumerate_coinvariants(&i, *size))
            }
        },
    }
}

/// Parse a literal of `inst` and return its canonical form.
pub fn parse_literal<P>(inst: &P, s: &str) -> Result<P::Obj>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let o: P::Obj = s.parse()?;
    Ok(inst.canonical(&o))
}

fn caps_of<P: Presheaf>(inst: &P) -> Value {
    json!({ "instance": inst.name(), "size": inst.cap() })
}

fn rational_value(c: &BigRational) -> Value {
    json!(c.to_string())
}

fn lin_value<O: Display + Ord + Clone>(x: &LinearCombination<O>) -> Value {
    Value::Array(x.iter().map(|(k, c)| json!({ "object": k.to_string(), "coeff": rational_value(c) })).collect())
}

fn tensor_value<O: Display + Ord + Clone>(x: &LinearCombination<(O, O)>) -> Value {
    Value::Array(
        x.iter()
            .map(|((l, r), c)| json!({ "left": l.to_string(), "right": r.to_string(), "coeff": rational_value(c) }))
            .collect(),
    )
}

fn pat_count<P>(inst: &P, pattern: &str, host: &str) -> Result<Report>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let a = parse_literal(inst, pattern)?;
    let b = parse_literal(inst, host)?;
    if inst.size(&b) > HOST_CAP {
        return Err(Error::Resource { what: "pattern count host".into(), requested: inst.size(&b), cap: HOST_CAP });
    }
    let n = Algebra::new(inst).pat(&a, &b);
    Ok(Report {
        verb: "pat count",
        inputs: json!({ "instance": inst.name(), "pattern": a.to_string(), "host": b.to_string() }),
        result: json!(n),
        convention: Value::Null,
        caps: json!({ "instance": inst.name(), "host": HOST_CAP }),
        text: n.to_string(),
    })
}

fn pat_product<P>(inst: &P, factors: &[String]) -> Result<Report>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let fs: Vec<P::Obj> = factors.iter().map(|f| parse_literal(inst, f)).collect::<Result<_>>()?;
    let x = Algebra::new(inst).product_expand(&fs, inst.cap())?;
    Ok(Report {
        verb: "pat product",
        inputs: json!({ "instance": inst.name(), "factors": fs.iter().map(ToString::to_string).collect::<Vec<_>>() }),
        result: lin_value(&x),
        convention: Value::Null,
        caps: caps_of(inst),
        text: x.to_string(),
    })
}

fn pat_coproduct<P>(inst: &P, object: &str) -> Result<Report>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let a = parse_literal(inst, object)?;
    if inst.size(&a) > inst.cap() {
        return Err(Error::Resource { what: "coproduct".into(), requested: inst.size(&a), cap: inst.cap() });
    }
    let t = Algebra::new(inst).coproduct(&a)?;
    Ok(Report {
        verb: "pat coproduct",
        inputs: json!({ "instance": inst.name(), "object": a.to_string() }),
        result: tensor_value(&t),
        convention: Value::Null,
        caps: caps_of(inst),
        text: t.render(|(l, r)| format!("pat[{l}] ⊗ pat[{r}]")),
    })
}

fn pat_antipode<P>(inst: &P, object: &str) -> Result<Report>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let a = parse_literal(inst, object)?;
    let x = Algebra::new(inst).antipode(&a, inst.cap())?;
    Ok(Report {
        verb: "pat antipode",
        inputs: json!({ "instance": inst.name(), "object": a.to_string() }),
        result: lin_value(&x),
        convention: Value::Null,
        caps: caps_of(inst),
        text: x.to_string(),
    })
}

fn pat_magnus<P>(inst: &P, object: &str, dir: MagnusDirection) -> Result<Report>
where
    P: Presheaf,
    P::Obj: FromStr<Err = Error>,
{
    let a = parse_literal(inst, object)?;
    if inst.size(&a) > HOST_CAP {
        return Err(Error::Resource { what: "Magnus transform".into(), requested: inst.size(&a), cap: HOST_CAP });
    }
    let x = Algebra::new(inst).magnus(&LinearCombination::basis(a.clone()), dir);
    let name = match dir {
        MagnusDirection::Forward => "forward",
        MagnusDirection::Inverse => "inverse",
    };
    Ok(Report {
        verb: "pat magnus",
        inputs: json!({ "instance": inst.name(), "object": a.to_string(), "direction": name }),
        result: lin_value(&x),
        convention: Value::Null,
        caps: json!({ "instance": inst.name(), "host": HOST_CAP }),
        text: x.render(|k| format!("[{k}]")),
    })
}

fn pat_pushforward_inv(ctx: &Ctx, object: &str) -> Result<Report> {
    let f = InversionGraph { per: Per::with_cap(ctx.cap(Per::DEFAULT_CAP)), gr: Gr::with_cap(ctx.cap(Gr::DEFAULT_CAP)) };
    let g = parse_literal(f.target(), object)?;
    let x = pushforward(&f, &g)?;
    Ok(Report {
        verb: "pat pushforward inv",
        inputs: json!({ "morphism": "inv", "source": "per", "target": "gr", "object": g.to_string() }),
        result: lin_value(&x),
        convention: Value::Null,
        caps: json!({ "source": f.source().cap(), "target": f.target().cap() }),
        text: x.to_string(),
    })
}

fn words_value(words: &[Vec<MarkedPermutation>]) -> Value {
    Value::Array(
        words.iter().map(|w| Value::Array(w.iter().map(|l| json!(l.to_string())).collect())).collect(),
    )
}

fn mper_factor(ctx: &Ctx, object: &str) -> Result<Report> {
    let inst = MPer::with_cap(ctx.cap(MPer::DEFAULT_CAP));
    let alpha = parse_literal(&inst, object)?;
    let mut text = Vec::new();
    text.push(format!("input: {alpha}"));
    text.push(format!("size: {}", alpha.size()));

    let intervals = mper::dc_intervals(&alpha);
    let mut iv_json = Vec::new();
    text.push(format!("dc intervals: {}", intervals.len()));
    for iv in &intervals {
        let part = inst.canonical(&inst.restrict_mask(&alpha, iv.mask));
        text.push(format!("  positions {}-{}: {part}", iv.window.0 + 1, iv.window.1 + 1));
        iv_json.push(json!({ "window": [iv.window.0 + 1, iv.window.1 + 1], "restriction": part.to_string() }));
    }
    let irr = mper::factor_into_irreducibles(&alpha);
    text.push(format!("irreducible: {}", mper::is_irreducible_mper(&alpha)));
    text.push(format!("factor word: {}", mper::render_word(&irr)));

    let fiber = if alpha.size() <= mper::DEFAULT_FIBER_CAP {
        let f = mper::all_factorizations(&alpha, mper::DEFAULT_FIBER_CAP)?;
        text.push(format!("fiber: {} words", f.len()));
        for w in &f {
            text.push(format!("  {}", mper::render_word(w)));
        }
        text.push(format!("fiber swap-connected: {}", mper::fiber_swap_connected(&f)));
        let words: Vec<Vec<MarkedPermutation>> = f.into_iter().collect();
        json!({ "words": words_value(&words) })
    } else {
        text.push(format!("fiber: skipped, size above fiber cap {}", mper::DEFAULT_FIBER_CAP));
        Value::Null
    };

    let mut per_conv = Vec::new();
    for &c in &ctx.conventions {
        let stable = mper::stable_factorization(&alpha, c);
        let sl = mper::sl_factorization(&alpha, c);
        text.push(format!("convention: {c}"));
        text.push(format!("  stable word: {}", mper::render_word(&stable)));
        text.push(format!("  SL words: {}", mper::render_sl(&sl)));
        text.push(format!("  SL: {}", mper::is_sl(&alpha, c)));
        per_conv.push(json!({
            "convention": c.name(),
            "stable_word": stable.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "sl_words": words_value(&sl),
            "is_sl": mper::is_sl(&alpha, c),
        }));
    }

    Ok(Report {
        verb: "mper factor",
        inputs: json!({ "object": alpha.to_string() }),
        result: json!({
            "size": alpha.size(),
            "dc_intervals": iv_json,
            "irreducible": mper::is_irreducible_mper(&alpha),
            "factor_word": irr.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "fiber": fiber,
            "conventions": per_conv,
        }),
        convention: ctx.convention_value(),
        caps: json!({ "instance": "mper", "size": inst.cap(), "fiber": mper::DEFAULT_FIBER_CAP }),
        text: text.join("\n"),
    })
}

fn freeness<P: FreeStructure>(inst: &P, degree: usize, ctx: &Ctx) -> Result<Report> {
    let convs: Vec<Convention> =
        if inst.uses_convention() { ctx.conventions.clone() } else { vec![Convention::default()] };
    let reports = convs.iter().map(|&c| freeness_certificate(inst, degree, c)).collect::<Result<Vec<_>>>()?;
    let text = reports.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n\n");
    Ok(Report {
        verb: "freeness",
        inputs: json!({ "instance": inst.name(), "degree": degree }),
        result: serde_json::to_value(&reports).expect("reports serialize"),
        convention: if inst.uses_convention() { ctx.convention_value() } else { Value::Null },
        caps: caps_of(inst),
        text,
    })
}

fn big_value(n: &BigInt) -> Value {
    match u64::try_from(n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

fn row<T: Display>(label: &str, xs: &[T]) -> String {
    let body: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("{label}: {}", body.join(" "))
}

fn enumerate_irreducibles(ctx: &Ctx, max_n: usize, method: Method) -> Result<Report> {
    let brute_cap = ctx.cap(BRUTE_FORCE_CAP);
    let mut lines = vec![row("n", &(0..=max_n).collect::<Vec<_>>())];
    let mut result = serde_json::Map::new();
    result.insert("n".into(), json!((0..=max_n).collect::<Vec<_>>()));

    if method != Method::Brute {
        if max_n > SERIES_CAP {
            return Err(Error::Resource { what: "series order".into(), requested: max_n, cap: SERIES_CAP });
        }
        let s = irreducible_series(max_n);
        let ints = |x: &patalg::series::RationalSeries| x.integer_coeffs().expect("integer series");
        let (sv, sov, pv) = (ints(&s.s_star), ints(&s.so_star), ints(&s.p_oplus));
        lines.push(row("s", &sv));
        lines.push(row("so", &sov));
        lines.push(row("p_oplus", &pv));
        result.insert("s".into(), Value::Array(sv.iter().map(big_value).collect()));
        result.insert("so".into(), Value::Array(sov.iter().map(big_value).collect()));
        result.insert("p_oplus".into(), Value::Array(pv.iter().map(big_value).collect()));
    }
    if method != Method::Series {
        let c = brute_force_irreducible_counts_capped(max_n, brute_cap)?;
        let (ls, lso) = if method == Method::Both { ("s brute", "so brute") } else { ("s", "so") };
        lines.push(row(ls, &c.s));
        lines.push(row(lso, &c.so));
        if method == Method::Both {
            let agree = result["s"].as_array().is_some_and(|s| s.iter().zip(&c.s).all(|(a, b)| a == &json!(b)))
                && result["so"].as_array().is_some_and(|s| s.iter().zip(&c.so).all(|(a, b)| a == &json!(b)));
            lines.push(format!("agree: {agree}"));
            result.insert("s_brute".into(), json!(c.s));
            result.insert("so_brute".into(), json!(c.so));
            result.insert("agree".into(), json!(agree));
        } else {
            result.insert("s".into(), json!(c.s));
            result.insert("so".into(), json!(c.so));
        }
    }
    let method_name = match method {
        Method::Series => "series",
        Method::Brute => "brute",
        Method::Both => "both",
    };
    Ok(Report {
        verb: "enumerate irreducibles",
        inputs: json!({ "max_n": max_n, "method": method_name }),
        result: Value::Object(result),
        convention: Value::Null,
        caps: json!({ "brute_force": brute_cap, "series": SERIES_CAP }),
        text: lines.join("\n"),
    })
}

fn enumerate_coinvariants<P: Presheaf>(inst: &P, size: usize) -> Result<Report> {
    let objs = inst.enumerate(size)?;
    let names: Vec<String> = objs.iter().map(ToString::to_string).collect();
    let mut text = vec![format!("count: {}", names.len())];
    text.extend(names.iter().cloned());
    Ok(Report {
        verb: "enumerate coinvariants",
        inputs: json!({ "instance": inst.name(), "size": size }),
        result: json!({ "count": names.len(), "coinvariants": names }),
        convention: Value::Null,
        caps: caps_of(inst),
        text: text.join("\n"),
    })
}
