//! Freeness certificates: generator monomials expanded in the pattern basis,
//! checked for full rank and triangularity.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::instances::{Gr, MGr, MGrProduct, MPer, Per, SComp, SPart};
use crate::linear::LinearCombination;
use crate::lyndon::{compare_words, is_lyndon};
use crate::mper::{self, Convention};
use crate::presheaf::Presheaf;
use crate::rank::{minimal_dependent_subset, rank};

/// An instance with a free-generator rule and a triangularity order.
pub trait FreeStructure: Presheaf {
    /// Whether the generator rule depends on a [`Convention`].
    fn uses_convention(&self) -> bool {
        false
    }

    fn is_generator(&self, a: &Self::Obj, conv: Convention) -> Result<bool>;

    /// Number of irreducible factors.
    fn j(&self, a: &Self::Obj, conv: Convention) -> Result<usize>;

    /// Order refining equal size and `j`; `None` when only equality is used.
    fn cmp_fac(&self, a: &Self::Obj, b: &Self::Obj, conv: Convention) -> Result<Option<Ordering>> {
        let _ = (a, b, conv);
        Ok(None)
    }

    /// The object a generator monomial is triangular around.
    fn assemble(&self, gens: &[Self::Obj], conv: Convention) -> Result<Self::Obj> {
        let _ = conv;
        gens.iter().try_fold(self.unit(), |acc, g| self.product(&acc, g))
    }
}

fn commutative_j<P: Presheaf>(inst: &P, a: &P::Obj) -> Result<usize> {
    Ok(inst.irreducible_factors(a)?.len())
}

impl FreeStructure for Gr {
    fn is_generator(&self, a: &Self::Obj, _conv: Convention) -> Result<bool> {
        self.is_irreducible(a)
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        commutative_j(self, a)
    }
}

impl FreeStructure for SPart {
    fn is_generator(&self, a: &Self::Obj, _conv: Convention) -> Result<bool> {
        self.is_irreducible(a)
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        commutative_j(self, a)
    }
}

impl FreeStructure for MGr {
    fn is_generator(&self, a: &Self::Obj, _conv: Convention) -> Result<bool> {
        if self.product_kind() != MGrProduct::Vee {
            return Err(Error::Unsupported { op: "freeness", instance: self.name().to_string() });
        }
        self.is_irreducible(a)
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        commutative_j(self, a)
    }
}

/// Lyndon words in the unique factorization, letters ordered by `cmp`.
fn word_is_lyndon<T>(word: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> bool {
    !word.is_empty() && is_lyndon(word, cmp).expect("nonempty")
}

impl FreeStructure for Per {
    fn is_generator(&self, a: &Self::Obj, _conv: Convention) -> Result<bool> {
        Ok(word_is_lyndon(&a.oplus_blocks(), mper::cmp_per_perm))
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        Ok(a.oplus_blocks().len())
    }

    fn cmp_fac(&self, a: &Self::Obj, b: &Self::Obj, _conv: Convention) -> Result<Option<Ordering>> {
        Ok(Some(compare_words(&a.oplus_blocks(), &b.oplus_blocks(), mper::cmp_per_perm)))
    }

    fn assemble(&self, gens: &[Self::Obj], _conv: Convention) -> Result<Self::Obj> {
        let mut g = gens.to_vec();
        g.sort_by(|x, y| compare_words(&y.oplus_blocks(), &x.oplus_blocks(), mper::cmp_per_perm));
        Ok(g.iter().fold(self.unit(), |acc, x| acc.oplus(x)))
    }
}

impl FreeStructure for SComp {
    fn is_generator(&self, a: &Self::Obj, _conv: Convention) -> Result<bool> {
        Ok(word_is_lyndon(&a.sizes(), usize::cmp))
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        Ok(a.sizes().len())
    }

    fn cmp_fac(&self, a: &Self::Obj, b: &Self::Obj, _conv: Convention) -> Result<Option<Ordering>> {
        Ok(Some(compare_words(&a.sizes(), &b.sizes(), usize::cmp)))
    }

    fn assemble(&self, gens: &[Self::Obj], _conv: Convention) -> Result<Self::Obj> {
        let mut g = gens.to_vec();
        g.sort_by(|x, y| compare_words(&y.sizes(), &x.sizes(), usize::cmp));
        g.iter().try_fold(self.unit(), |acc, x| self.product(&acc, x))
    }
}

impl FreeStructure for MPer {
    fn uses_convention(&self) -> bool {
        true
    }

    fn is_generator(&self, a: &Self::Obj, conv: Convention) -> Result<bool> {
        Ok(mper::is_sl(a, conv))
    }

    fn j(&self, a: &Self::Obj, _conv: Convention) -> Result<usize> {
        Ok(mper::j_count(a))
    }

    fn cmp_fac(&self, a: &Self::Obj, b: &Self::Obj, conv: Convention) -> Result<Option<Ordering>> {
        Ok(Some(mper::cmp_fac(a, b, conv)))
    }

    /// SL words in nonincreasing order, inflated.
    fn assemble(&self, gens: &[Self::Obj], conv: Convention) -> Result<Self::Obj> {
        let mut words: Vec<_> = gens.iter().map(|g| mper::stable_factorization(g, conv)).collect();
        words.sort_by(|x, y| mper::cmp_word(y, x, conv));
        Ok(mper::inflate_word(&words.concat()))
    }
}

/// Generators of size `≤ degree`, sorted by size then canonical order.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorSet<O> {
    pub instance: String,
    pub degree: usize,
    pub convention: Option<Convention>,
    pub generators: Vec<O>,
}

impl<O> GeneratorSet<O> {
    pub fn counts_by_size(&self, size: impl Fn(&O) -> usize) -> Vec<usize> {
        let mut c = vec![0; self.degree + 1];
        for g in &self.generators {
            c[size(g)] += 1;
        }
        c
    }
}

pub fn generators<P: FreeStructure>(inst: &P, degree: usize, conv: Convention) -> Result<GeneratorSet<P::Obj>> {
    let mut gens = Vec::new();
    for n in 1..=degree {
        for a in inst.enumerate(n)?.iter() {
            if inst.is_generator(a, conv)? {
                gens.push(a.clone());
            }
        }
    }
    Ok(GeneratorSet {
        instance: inst.name().to_string(),
        degree,
        convention: inst.uses_convention().then_some(conv),
        generators: gens,
    })
}

/// A term of a monomial expansion outside the triangular support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangularityViolation {
    pub monomial: String,
    pub leading: String,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub instance: String,
    pub degree: usize,
    pub convention: Option<String>,
    pub generators_by_size: Vec<usize>,
    pub generator_count: usize,
    pub monomial_count: usize,
    pub coinvariant_count: usize,
    pub rank: usize,
    pub pass: bool,
    pub triangularity_violations: Vec<TriangularityViolation>,
    /// Monomials whose assembled object has coefficient below 1.
    pub leading_coefficient_failures: Vec<String>,
    /// Present when the monomials are linearly dependent.
    pub minimal_dependent_subset: Option<Vec<String>>,
}

impl FreenessReport {
    pub fn triangular(&self) -> bool {
        self.triangularity_violations.is_empty() && self.leading_coefficient_failures.is_empty()
    }
}

impl fmt::Display for FreenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance: {}", self.instance)?;
        writeln!(f, "degree: {}", self.degree)?;
        if let Some(c) = &self.convention {
            writeln!(f, "convention: {c}")?;
        }
        let by_size: Vec<String> = self.generators_by_size.iter().map(ToString::to_string).collect();
        writeln!(f, "generators: {} (by size: {})", self.generator_count, by_size.join(" "))?;
        writeln!(f, "monomials: {}", self.monomial_count)?;
        writeln!(f, "coinvariants: {}", self.coinvariant_count)?;
        writeln!(f, "rank: {}", self.rank)?;
        writeln!(f, "triangularity violations: {}", self.triangularity_violations.len())?;
        for v in self.triangularity_violations.iter().take(10) {
            writeln!(f, "  {} (leading {}) has term {}", v.monomial, v.leading, v.term)?;
        }
        writeln!(f, "leading coefficient failures: {}", self.leading_coefficient_failures.len())?;
        if let Some(dep) = &self.minimal_dependent_subset {
            writeln!(f, "minimal dependent subset: {}", dep.join(", "))?;
        }
        write!(f, "result: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

fn render_monomial<O: fmt::Display>(m: &[O]) -> String {
    if m.is_empty() {
        return "1".to_string();
    }
    m.iter().map(|g| format!("pat[{g}]")).collect::<Vec<_>>().join("*")
}

/// Multisets of `gens` (given sorted) with total size `≤ degree`, each
/// sorted, ordered by total size then lexicographically.
pub fn monomials<P: Presheaf>(inst: &P, gens: &[P::Obj], degree: usize) -> Vec<Vec<P::Obj>> {
    fn rec<P: Presheaf>(
        inst: &P,
        gens: &[P::Obj],
        start: usize,
        budget: usize,
        cur: &mut Vec<P::Obj>,
        out: &mut Vec<Vec<P::Obj>>,
    ) {
        out.push(cur.clone());
        for i in start..gens.len() {
            let s = inst.size(&gens[i]);
            if s <= budget {
                cur.push(gens[i].clone());
                rec(inst, gens, i, budget - s, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(inst, gens, 0, degree, &mut Vec::new(), &mut out);
    let total = |m: &Vec<P::Obj>| m.iter().map(|g| inst.size(g)).sum::<usize>();
    out.sort_by(|a, b| total(a).cmp(&total(b)).then_with(|| a.cmp(b)));
    out
}

pub fn freeness_certificate<P: FreeStructure>(inst: &P, degree: usize, conv: Convention) -> Result<FreenessReport> {
    let gens = generators(inst, degree, conv)?;
    let alg = Algebra::new(inst);
    let monos = monomials(inst, &gens.generators, degree);
    let rows = inst.enumerate_upto(degree)?;

    let expansions: Vec<LinearCombination<P::Obj>> =
        monos.par_iter().map(|m| alg.product_expand(m, degree)).collect::<Result<_>>()?;

    let mut violations = Vec::new();
    let mut leading_failures = Vec::new();
    for (m, x) in monos.iter().zip(&expansions) {
        let alpha = inst.assemble(m, conv)?;
        if x.coeff(&alpha) < num_rational::BigRational::one() {
            leading_failures.push(render_monomial(m));
        }
        let (na, ja) = (inst.size(&alpha), inst.j(&alpha, conv)?);
        for beta in x.keys() {
            let nb = inst.size(beta);
            let ok = nb < na
                || beta == &alpha
                || match nb.cmp(&na) {
                    Ordering::Equal => {
                        let jb = inst.j(beta, conv)?;
                        jb < ja
                            || (jb == ja
                                && inst.cmp_fac(beta, &alpha, conv)?.is_some_and(|o| o != Ordering::Greater))
                    }
                    _ => false,
                };
            if !ok {
                violations.push(TriangularityViolation {
                    monomial: render_monomial(m),
                    leading: alpha.to_string(),
                    term: beta.to_string(),
                });
            }
        }
    }

    // one vector per monomial, coordinates in row order
    let vectors: Vec<Vec<BigInt>> = expansions
        .iter()
        .map(|x| {
            rows.iter()
                .map(|r| {
                    let c = x.coeff(r);
                    debug_assert!(c.is_integer());
                    if c.is_zero() {
                        BigInt::zero()
                    } else {
                        c.to_integer()
                    }
                })
                .collect()
        })
        .collect();
    let r = rank(&vectors);
    let pass = monos.len() == rows.len() && r == rows.len();
    let dependent = (r < monos.len())
        .then(|| minimal_dependent_subset(&vectors))
        .flatten()
        .map(|ix| ix.into_iter().map(|i| render_monomial(&monos[i])).collect());

    Ok(FreenessReport {
        instance: inst.name().to_string(),
        degree,
        convention: gens.convention.map(|c| c.name().to_string()),
        generators_by_size: gens.counts_by_size(|g| inst.size(g)),
        generator_count: gens.generators.len(),
        monomial_count: monos.len(),
        coinvariant_count: rows.len(),
        rank: r,
        pass,
        triangularity_violations: violations,
        leading_coefficient_failures: leading_failures,
        minimal_dependent_subset: dependent,
    })
}
