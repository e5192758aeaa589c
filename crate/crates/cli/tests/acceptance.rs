//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use patalg::algebra::{Algebra, MagnusDirection};
use patalg::freeness::freeness_certificate;
use patalg::instances::{Gr, Graph, MGr, MGrProduct, MPer, MarkedPermutation, Per, Permutation, SComp, SPart, SetComposition, SetPartition};
use patalg::linear::LinearCombination;
use patalg::lyndon::{cfl_factorize, compare_words, is_word_shuffle};
use patalg::mper::{self, Convention};
use patalg::series::{brute_force_oplus_indecomposable_counts, irreducible_series, RationalSeries};
use patalg::Presheaf;
use patalg_cli::run_command;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = run_command(std::iter::once("patalg").chain(args.iter().copied()));
    if out.code == 0 {
        Ok(out.stdout)
    } else {
        Err(format!("`{}` exited {}: {}", args.join(" "), out.code, out.stderr.trim()))
    }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

const S: &str = "s: 0 4 4 20 130 1040 9626 99692 1132998 13959224";
const SO: &str = "so: 0 0 0 8 78 756 7782 85904 1016626 12865852";

fn table_series() -> Outcome {
    let start = Instant::now();
    let out = cli(&["enumerate", "irreducibles", "--max-n", "9", "--method", "series"])?;
    let elapsed = start.elapsed();
    let lines: Vec<&str> = out.lines().collect();
    ensure(lines.get(1) == Some(&S), || format!("got `{}`", lines.get(1).unwrap_or(&"")))?;
    ensure(lines.get(2) == Some(&SO), || format!("got `{}`", lines.get(2).unwrap_or(&"")))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("s and so match for n = 0..9 in {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn table_brute_force() -> Outcome {
    let start = Instant::now();
    let out = cli(&["enumerate", "irreducibles", "--max-n", "6", "--method", "both", "--threads", "1"])?;
    let elapsed = start.elapsed();
    ensure(out.contains("s brute: 0 4 4 20 130 1040 9626"), || out.clone())?;
    ensure(out.contains("so brute: 0 0 0 8 78 756 7782"), || out.clone())?;
    ensure(out.contains("agree: true"), || out.clone())?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("exhaustive counts for n <= 6 agree with the series, single thread, {:.2} s", elapsed.as_secs_f64()))
}

fn series_identities() -> Outcome {
    let order = 12;
    let s = irreducible_series(order + 1);
    let lhs = &s.s_star - &s.so_star;
    ensure(lhs.truncate(order) == (4 * &s.p_oplus).truncate(order), || "S* - S_o* != 4 P^⊕".into())?;
    let one = RationalSeries::constant(1, order);
    let rhs = &(&(&s.so_star * &s.p_star) + &(2 * &(&s.p - &s.p_oplus).derivative())) + &one;
    ensure(s.p_star.truncate(order) == rhs, || "P* != S_o* P* + 2(P - P^⊕)' + 1".into())?;
    Ok(format!("both identities hold termwise to order {order}"))
}

fn oplus_indecomposables() -> Outcome {
    let s = irreducible_series(6);
    let series: Vec<u64> =
        s.p_oplus.integer_coeffs().unwrap().iter().map(|c| u64::try_from(c).unwrap()).collect();
    ensure(series[1..] == [1, 1, 3, 13, 71, 461], || format!("series gives {series:?}"))?;
    let brute = brute_force_oplus_indecomposable_counts(6).map_err(|e| e.to_string())?;
    ensure(brute == series, || format!("brute force gives {brute:?}"))?;
    Ok("1 1 3 13 71 461 by series and by exhaustive count".into())
}

fn magnus_on<P: Presheaf>(inst: &P, max: usize) -> Result<usize, String> {
    let alg = Algebra::new(inst);
    let objs = inst.enumerate_upto(max).map_err(|e| e.to_string())?;
    for a in &objs {
        let x = LinearCombination::basis(a.clone());
        let nm = alg.magnus(&alg.magnus(&x, MagnusDirection::Forward), MagnusDirection::Inverse);
        let mn = alg.magnus(&alg.magnus(&x, MagnusDirection::Inverse), MagnusDirection::Forward);
        ensure(nm == x && mn == x, || format!("{}: fails at {a}", inst.name()))?;
    }
    Ok(objs.len())
}

fn magnus_inversion() -> Outcome {
    let p = magnus_on(&Per::new(), 4)?;
    let m = magnus_on(&MPer::new(), 3)?;
    Ok(format!("N∘M = M∘N = id on {p} permutations and {m} marked permutations"))
}

fn hopf_suite_on<P: Presheaf>(inst: &P, coassoc_max: usize, antipode_max: usize) -> Result<usize, String> {
    let alg = Algebra::new(inst);
    let err = |e: patalg::Error| e.to_string();
    let mut checks = 0;
    let small = inst.enumerate_upto(2).map_err(err)?;
    let hosts = inst.enumerate_upto(4).map_err(err)?;
    for a in &small {
        for b in &small {
            let prod = alg.product_expand(&[a.clone(), b.clone()], inst.cap()).map_err(err)?;
            for x in &hosts {
                ensure(int(alg.pat(a, x) * alg.pat(b, x)) == alg.evaluate(&prod, x), || {
                    format!("{}: product rule fails for {a}, {b} at {x}", inst.name())
                })?;
                checks += 1;
            }
            let lhs = alg.coproduct_lin(&prod).map_err(err)?;
            let rhs = alg
                .tensor_multiply(&alg.coproduct(a).map_err(err)?, &alg.coproduct(b).map_err(err)?)
                .map_err(err)?;
            ensure(lhs == rhs, || format!("{}: bialgebra axiom fails for {a}, {b}", inst.name()))?;
            checks += 1;
        }
    }
    for a in inst.enumerate_upto(3).map_err(err)? {
        let d = alg.coproduct(&a).map_err(err)?;
        for x in &small {
            for y in &small {
                let xy = inst.product(x, y).map_err(err)?;
                ensure(alg.evaluate_tensor(&d, x, y) == int(alg.pat(&a, &xy)), || {
                    format!("{}: coproduct evaluation fails for {a} at ({x}, {y})", inst.name())
                })?;
                checks += 1;
            }
        }
    }
    for a in inst.enumerate_upto(coassoc_max).map_err(err)? {
        let mut left: LinearCombination<(P::Obj, P::Obj, P::Obj)> = LinearCombination::zero();
        let mut right = LinearCombination::zero();
        for ((b, c), k) in alg.coproduct(&a).map_err(err)?.iter() {
            for ((b1, b2), k2) in alg.coproduct(b).map_err(err)?.iter() {
                left.add_term((b1.clone(), b2.clone(), c.clone()), k * k2);
            }
            for ((c1, c2), k2) in alg.coproduct(c).map_err(err)?.iter() {
                right.add_term((b.clone(), c1.clone(), c2.clone()), k * k2);
            }
        }
        ensure(left == right, || format!("{}: coassociativity fails at {a}", inst.name()))?;
        checks += 1;
    }
    for a in inst.enumerate_upto(antipode_max).map_err(err)? {
        let mut sum = LinearCombination::zero();
        for ((b, c), k) in alg.coproduct(&a).map_err(err)?.iter() {
            let sb = alg.antipode(b, inst.cap()).map_err(err)?;
            sum.add_scaled(&alg.multiply(&sb, &LinearCombination::basis(c.clone())).map_err(err)?, k);
        }
        let expected = alg.unit().scale(&alg.counit(&LinearCombination::basis(a.clone())));
        ensure(sum == expected, || format!("{}: antipode axiom fails at {a}", inst.name()))?;
        checks += 1;
    }
    Ok(checks)
}

fn hopf_suite() -> Outcome {
    let p = hopf_suite_on(&Per::new(), 3, 3)?;
    let m = hopf_suite_on(&MPer::new(), 2, 2)?;
    Ok(format!("{p} permutation and {m} marked-permutation identities, exact"))
}

fn factorization_suite() -> Outcome {
    let mper_inst = MPer::new();
    let all = mper_inst.enumerate_upto(4).map_err(|e| e.to_string())?;
    for a in &all {
        let fiber = mper::all_factorizations(a, mper::DEFAULT_FIBER_CAP).map_err(|e| e.to_string())?;
        let multisets: BTreeSet<Vec<MarkedPermutation>> = fiber
            .iter()
            .map(|w| {
                let mut v = w.clone();
                v.sort();
                v
            })
            .collect();
        ensure(multisets.len() == 1, || format!("{a}: fiber words with different letters"))?;
        ensure(mper::fiber_swap_connected(&fiber), || format!("{a}: fiber not connected by relation swaps"))?;
        for conv in Convention::all() {
            let stable: BTreeSet<_> = fiber.iter().map(|w| mper::stabilize_word(w, conv)).collect();
            ensure(stable.len() == 1, || format!("{a}: {} stable words under {conv}", stable.len()))?;
        }
    }
    let mut unique_under = Vec::new();
    let mut notes = Vec::new();
    for conv in Convention::all() {
        let mut failures = Vec::new();
        for a in &all {
            let found = mper::sl_sequences_exhaustive(a, conv, mper::DEFAULT_FIBER_CAP).map_err(|e| e.to_string())?;
            let sl = mper::sl_factorization(a, conv);
            if found.len() != 1 || !found.contains(&sl) {
                failures.push((a.clone(), found));
            }
        }
        if failures.is_empty() {
            unique_under.push(conv.name());
        } else {
            let (a, found) = &failures[0];
            let seqs: Vec<String> = found.iter().map(|s| mper::render_sl(s)).collect();
            notes.push(format!("{conv}: {} non-unique, e.g. {a} = {}", failures.len(), seqs.join(" = ")));
        }
    }
    ensure(!unique_under.is_empty(), || {
        format!("fibers coherent, but SL factorization is not unique under any convention [{}]", notes.join("; "))
    })?;
    Ok(format!("fibers coherent; SL factorization unique under {}", unique_under.join(", ")))
}

fn commutative_freeness() -> Outcome {
    let mut parts = Vec::new();
    let gr = freeness_certificate(&Gr::new(), 4, Convention::PAPER).map_err(|e| e.to_string())?;
    ensure(gr.pass && gr.triangular() && gr.monomial_count == 19 && gr.rank == 19, || gr.to_string())?;
    parts.push(format!("gr d=4 {}x{}", gr.monomial_count, gr.coinvariant_count));
    let sp = freeness_certificate(&SPart::new(), 6, Convention::PAPER).map_err(|e| e.to_string())?;
    ensure(sp.pass && sp.triangular(), || sp.to_string())?;
    parts.push(format!("spart d=6 {}x{}", sp.monomial_count, sp.coinvariant_count));
    let mg = freeness_certificate(&MGr::new(MGrProduct::Vee), 3, Convention::PAPER).map_err(|e| e.to_string())?;
    ensure(mg.pass && mg.triangular(), || mg.to_string())?;
    parts.push(format!("mgr d=3 {}x{}", mg.monomial_count, mg.coinvariant_count));
    Ok(format!("{}; all full rank and triangular", parts.join(", ")))
}

fn permutation_freeness() -> Outcome {
    let r = freeness_certificate(&Per::new(), 4, Convention::PAPER).map_err(|e| e.to_string())?;
    ensure(r.pass && r.monomial_count == 34 && r.coinvariant_count == 34 && r.rank == 34, || r.to_string())?;
    Ok("34 monomials, 34 coinvariants, rank 34".into())
}

fn marked_permutation_freeness() -> Outcome {
    let mut lines = Vec::new();
    let mut good = false;
    for conv in Convention::all() {
        let r = freeness_certificate(&MPer::new(), 2, conv).map_err(|e| e.to_string())?;
        let g2 = r.generators_by_size[2];
        lines.push(format!(
            "{conv}: {g2} size-2 generators, {} monomials, rank {} of {}, {}",
            r.monomial_count,
            r.rank,
            r.coinvariant_count,
            if r.pass { "pass" } else { "fail" }
        ));
        good |= g2 == 8 && r.monomial_count == 23 && r.rank == 23 && r.coinvariant_count == 23;
    }
    ensure(good, || lines.join("; "))?;
    Ok(lines.join("; "))
}

fn all_words(len: usize) -> Vec<Vec<u8>> {
    (0..len).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|w| {
                (0..3u8).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect()
    })
}

fn lyndon_naive(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &[&w[i..], &w[..i]].concat()[..])
}

fn naive_factorizations(w: &[u8]) -> Vec<Vec<Vec<u8>>> {
    if w.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 1..=w.len() {
        if lyndon_naive(&w[..i]) {
            for mut rest in naive_factorizations(&w[i..]) {
                if rest.first().is_none_or(|r| &w[..i] >= &r[..]) {
                    rest.insert(0, w[..i].to_vec());
                    out.push(rest);
                }
            }
        }
    }
    out
}

fn shuffles(parts: &[Vec<u8>]) -> Vec<Vec<u8>> {
    if parts.iter().all(Vec::is_empty) {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        if let Some((&c, rest)) = p.split_first() {
            let mut next = parts.to_vec();
            next[i] = rest.to_vec();
            for mut s in shuffles(&next) {
                s.insert(0, c);
                out.push(s);
            }
        }
    }
    out
}

fn lyndon_sequences(n: usize, bound: Option<&[u8]>, lyndon: &[Vec<u8>]) -> Vec<Vec<Vec<u8>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for l in lyndon.iter().filter(|l| l.len() <= n && bound.is_none_or(|b| &l[..] <= b)) {
        for mut rest in lyndon_sequences(n - l.len(), Some(l), lyndon) {
            rest.insert(0, l.clone());
            out.push(rest);
        }
    }
    out
}

fn lyndon_oracles() -> Outcome {
    let mut words = 0;
    for len in 0..=8 {
        for w in all_words(len) {
            let oracle = naive_factorizations(&w);
            ensure(oracle.len() == 1 && cfl_factorize(&w, u8::cmp) == oracle[0], || format!("mismatch at {w:?}"))?;
            words += 1;
        }
    }
    let lyndon: Vec<Vec<u8>> = (1..=6).flat_map(all_words).filter(|w| lyndon_naive(w)).collect();
    let mut shuffled = 0;
    for n in 1..=6 {
        for seq in lyndon_sequences(n, None, &lyndon) {
            let concat = seq.concat();
            for w in shuffles(&seq) {
                ensure(compare_words(&w, &concat, u8::cmp) != Ordering::Greater, || format!("{w:?} from {seq:?}"))?;
                ensure(is_word_shuffle(&w, &seq, u8::cmp).is_some(), || format!("{w:?} not recognized"))?;
                shuffled += 1;
            }
        }
    }
    Ok(format!("{words} words match the oracle; {shuffled} shuffles respect the bound"))
}

/// A random literal for `inst`, in non-canonical form where the grammar allows.
fn random_literal(rng: &mut StdRng) -> (&'static str, String) {
    match rng.gen_range(0..6) {
        0 => {
            let n = rng.gen_range(0..=7usize);
            let mut v: Vec<u8> = (1..=n as u8).collect();
            v.shuffle(rng);
            ("per", Permutation::new(v).unwrap().to_string())
        }
        1 => {
            let n = rng.gen_range(0..=5usize);
            let mut v: Vec<u8> = (1..=n as u8 + 1).collect();
            v.shuffle(rng);
            let mark = rng.gen_range(0..=n);
            ("mper", MarkedPermutation::new(v, mark).unwrap().to_string())
        }
        2 => {
            let n = rng.gen_range(0..=6usize);
            let edges: Vec<(usize, usize)> =
                (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).filter(|_| rng.gen_bool(0.4)).collect();
            ("gr", Graph::new(n, &edges).unwrap().to_string())
        }
        3 => {
            let n = rng.gen_range(0..=4usize);
            let edges: Vec<String> = (0..=n)
                .flat_map(|j| (0..j).map(move |i| (i, j)))
                .filter(|_| rng.gen_bool(0.5))
                .map(|(i, j)| {
                    let v = |x: usize| if x == 0 { "*".to_string() } else { x.to_string() };
                    format!("{}-{}", v(i), v(j))
                })
                .collect();
            ("mgr", format!("{n}:{}", edges.join(",")))
        }
        4 => {
            let n = rng.gen_range(0..=7usize);
            let k = rng.gen_range(1..=n.max(1));
            let mut blocks = vec![Vec::new(); k];
            for x in 0..n {
                blocks[rng.gen_range(0..k)].push(x);
            }
            blocks.retain(|b| !b.is_empty());
            ("spart", SetPartition::from_blocks(n, &blocks).unwrap().to_string())
        }
        _ => {
            let n = rng.gen_range(0..=7usize);
            let k = rng.gen_range(1..=n.max(1));
            let mut blocks = vec![Vec::new(); k];
            for x in 0..n {
                blocks[rng.gen_range(0..k)].push(x);
            }
            blocks.retain(|b| !b.is_empty());
            ("scomp", SetComposition::from_blocks(n, &blocks).unwrap().to_string())
        }
    }
}

/// Every literal the tool printed parses back to itself.
fn reparses(inst: &str, lit: &str) -> bool {
    fn fixed<P: Presheaf>(p: &P, s: &str) -> bool
    where
        P::Obj: std::str::FromStr,
    {
        s.parse::<P::Obj>().is_ok_and(|o| p.canonical(&o) == o && o.to_string() == s)
    }
    match inst {
        "per" => fixed(&Per::new(), lit),
        "mper" => fixed(&MPer::new(), lit),
        "gr" => fixed(&Gr::new(), lit),
        "mgr" => fixed(&MGr::new(MGrProduct::Vee), lit),
        "spart" => fixed(&SPart::new(), lit),
        _ => fixed(&SComp::new(), lit),
    }
}

fn canonical_of(inst: &str, lit: &str) -> String {
    fn canon<P: Presheaf>(p: &P, s: &str) -> String
    where
        P::Obj: std::str::FromStr,
        <P::Obj as std::str::FromStr>::Err: std::fmt::Debug,
    {
        p.canonical(&s.parse::<P::Obj>().unwrap()).to_string()
    }
    match inst {
        "per" => canon(&Per::new(), lit),
        "mper" => canon(&MPer::new(), lit),
        "gr" => canon(&Gr::new(), lit),
        "mgr" => canon(&MGr::new(MGrProduct::Vee), lit),
        "spart" => canon(&SPart::new(), lit),
        _ => canon(&SComp::new(), lit),
    }
}

fn round_trip_and_determinism() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let mut commands: Vec<Vec<String>> = Vec::new();
    for _ in 0..100 {
        let (inst, lit) = random_literal(&mut rng);
        let out = cli(&["pat", "magnus", inst, &lit, "--format", "json"])?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        let printed = v["inputs"]["object"].as_str().unwrap_or_default().to_string();
        ensure(printed == canonical_of(inst, &lit), || format!("{inst} {lit} echoed as {printed}"))?;
        let terms = v["result"].as_array().cloned().unwrap_or_default();
        ensure(terms.iter().any(|t| t["object"] == printed.as_str()), || format!("{inst} {lit}: missing top term"))?;
        for t in terms.iter().map(|t| t["object"].as_str().unwrap_or_default()).chain([printed.as_str()]) {
            ensure(reparses(inst, t), || format!("{inst}: printed `{t}` does not re-parse to itself"))?;
        }
        commands.push(["pat", "magnus", inst, &lit].iter().map(|s| s.to_string()).collect());
        commands.push(["pat", "coproduct", inst, &printed].iter().map(|s| s.to_string()).collect());
    }
    for extra in [
        vec!["freeness", "mper", "--degree", "2", "--convention", "all"],
        vec!["freeness", "gr", "--degree", "4", "--format", "json"],
        vec!["enumerate", "irreducibles", "--max-n", "6", "--method", "both"],
        vec!["pat", "product", "mper", "[1]2", "[2]1", "1[2]"],
        vec!["pat", "antipode", "per", "2413"],
        vec!["mper", "factor", "1[2]43", "--convention", "all", "--format", "json"],
        vec!["enumerate", "coinvariants", "gr", "--size", "5"],
    ] {
        commands.push(extra.into_iter().map(String::from).collect());
    }
    for cmd in &commands {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "8"] {
            let mut args: Vec<&str> = cmd.iter().map(String::as_str).collect();
            args.extend(["--threads", threads]);
            outputs.push(cli(&args)?);
        }
        ensure(outputs.windows(2).all(|p| p[0] == p[1]), || format!("`{}` differs across thread counts", cmd.join(" ")))?;
    }
    Ok(format!("100 literals round-trip; {} commands byte-identical at 1, 2 and 8 threads", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("irreducible counts from the series", table_series),
        ("irreducible counts by exhaustive search", table_brute_force),
        ("series identities", series_identities),
        ("oplus-indecomposable permutations", oplus_indecomposables),
        ("Magnus inversion", magnus_inversion),
        ("Hopf suite", hopf_suite),
        ("factorization suite", factorization_suite),
        ("commutative freeness", commutative_freeness),
        ("permutation freeness", permutation_freeness),
        ("marked permutation freeness measurement", marked_permutation_freeness),
        ("Lyndon oracles", lyndon_oracles),
        ("CLI round trip and determinism", round_trip_and_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str()) || id.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} PASS  {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL  {name} ({secs:.2} s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
