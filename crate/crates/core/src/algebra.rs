//! The pattern algebra `𝒜(h)` of an instance: pattern functions, their
//! products, coproduct, antipode, Magnus maps and morphism pushforwards.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::graphs::{inversion_graph, Gr};
use crate::instances::permutations::Per;
use crate::linear::{LinearCombination, TensorCombination};
use crate::presheaf::{full_mask, Mask, Presheaf};

pub type Lin<P> = LinearCombination<<P as Presheaf>::Obj>;
pub type Tensor<P> = TensorCombination<<P as Presheaf>::Obj>;

/// Every subset of a host grouped by the coinvariant it induces.
pub type OccurrenceIndex<O> = HashMap<O, Vec<Mask>>;

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnusDirection {
    /// `M(a) = Σ_J a|_J`
    Forward,
    /// `N(a) = Σ_b (−1)^{|a|+|b|} pat_b(a) · b`
    Inverse,
}

/// Pattern-algebra engine over one instance, with memoized occurrence
/// indices and pairwise products.
pub struct Algebra<'a, P: Presheaf> {
    inst: &'a P,
    occurrences: RwLock<HashMap<P::Obj, Arc<OccurrenceIndex<P::Obj>>>>,
    products: RwLock<HashMap<(P::Obj, P::Obj), Arc<Lin<P>>>>,
}

impl<'a, P: Presheaf> Algebra<'a, P> {
    pub fn new(inst: &'a P) -> Self {
        Algebra { inst, occurrences: RwLock::default(), products: RwLock::default() }
    }

    pub fn instance(&self) -> &'a P {
        self.inst
    }

    pub fn unit(&self) -> Lin<P> {
        LinearCombination::basis(self.inst.unit())
    }

    /// Occurrence index of a host, built from all `2^|host|` subsets.
    pub fn occurrence_index(&self, host: &P::Obj) -> Arc<OccurrenceIndex<P::Obj>> {
        if let Some(ix) = self.occurrences.read().expect("occurrence cache poisoned").get(host) {
            return Arc::clone(ix);
        }
        let n = self.inst.size(host);
        let mut ix: OccurrenceIndex<P::Obj> = HashMap::new();
        for mask in 0..=full_mask(n) {
            ix.entry(self.inst.restrict_mask(host, mask)).or_default().push(mask);
        }
        let ix = Arc::new(ix);
        self.occurrences.write().expect("occurrence cache poisoned").insert(host.clone(), Arc::clone(&ix));
        ix
    }

    /// Subsets `J` of the host with `host|_J ≅ a`, increasing.
    pub fn occurrences(&self, a: &P::Obj, host: &P::Obj) -> Vec<Mask> {
        let a = self.inst.canonical(a);
        self.occurrence_index(host).get(&a).cloned().unwrap_or_default()
    }

    /// `pat_a(b)`: number of subsets of `b` inducing a copy of `a`.
    pub fn pat(&self, a: &P::Obj, host: &P::Obj) -> u64 {
        if self.inst.size(a) > self.inst.size(host) {
            return 0;
        }
        self.occurrences(a, host).len() as u64
    }

    /// `pat_b(host)` for every `b`.
    pub fn pattern_profile(&self, host: &P::Obj) -> Vec<(P::Obj, u64)> {
        let mut v: Vec<_> = self.occurrence_index(host).iter().map(|(k, m)| (k.clone(), m.len() as u64)).collect();
        v.sort();
        v
    }

    /// Ordered pairs `(I, J)` covering the ground set of `c` with `c|_I ≅ a`
    /// and `c|_J ≅ b`.
    pub fn quasi_shuffle_coeff(&self, c: &P::Obj, a: &P::Obj, b: &P::Obj) -> u64 {
        let full = full_mask(self.inst.size(c));
        let ix = self.occurrence_index(c);
        let (a, b) = (self.inst.canonical(a), self.inst.canonical(b));
        let (Some(left), Some(right)) = (ix.get(&a), ix.get(&b)) else {
            return 0;
        };
        let mut count = 0;
        for &i in left {
            for &j in right {
                if i | j == full {
                    count += 1;
                }
            }
        }
        count
    }

    /// Value of a combination of pattern functions at a host.
    pub fn evaluate(&self, x: &Lin<P>, host: &P::Obj) -> BigRational {
        let ix = self.occurrence_index(host);
        let mut total = BigRational::zero();
        for (k, c) in x.iter() {
            if let Some(m) = ix.get(k) {
                total += c * int(m.len() as u64);
            }
        }
        total
    }

    /// Value of a tensor at a pair of hosts.
    pub fn evaluate_tensor(&self, x: &Tensor<P>, left: &P::Obj, right: &P::Obj) -> BigRational {
        let mut total = BigRational::zero();
        for ((a, b), c) in x.iter() {
            let v = self.pat(a, left) * self.pat(b, right);
            if v != 0 {
                total += c * int(v);
            }
        }
        total
    }

    fn check_total(&self, total: usize, size_cap: usize) -> Result<()> {
        let cap = size_cap.min(self.inst.cap());
        if total > cap {
            return Err(Error::resource(format!("{} product expansion", self.inst.name()), total, cap));
        }
        Ok(())
    }

    /// `pat_a · pat_b` in the pattern basis.
    pub fn product_pair(&self, a: &P::Obj, b: &P::Obj) -> Result<Arc<Lin<P>>> {
        let (a, b) = (self.inst.canonical(a), self.inst.canonical(b));
        let key = (a, b);
        if let Some(p) = self.products.read().expect("product cache poisoned").get(&key) {
            return Ok(Arc::clone(p));
        }
        let (a, b) = &key;
        let (na, nb) = (self.inst.size(a), self.inst.size(b));
        self.check_total(na + nb, usize::MAX)?;
        let mut out = LinearCombination::zero();
        for m in na.max(nb)..=na + nb {
            let cands = self.inst.enumerate(m)?;
            let coeffs: Vec<u64> = cands.par_iter().map(|c| self.quasi_shuffle_coeff(c, a, b)).collect();
            for (c, k) in cands.iter().zip(coeffs) {
                if k != 0 {
                    out.add_term(c.clone(), int(k));
                }
            }
        }
        let out = Arc::new(out);
        self.products.write().expect("product cache poisoned").insert(key, Arc::clone(&out));
        Ok(out)
    }

    /// `pat_{a_1} ⋯ pat_{a_k}`, expanded pairwise from the left.
    pub fn product_expand(&self, factors: &[P::Obj], size_cap: usize) -> Result<Lin<P>> {
        let total: usize = factors.iter().map(|f| self.inst.size(f)).sum();
        self.check_total(total, size_cap)?;
        let mut acc = self.unit();
        for f in factors {
            let mut next = LinearCombination::zero();
            for (k, c) in acc.iter() {
                next.add_scaled(&*self.product_pair(k, f)?, c);
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Bilinear extension of the product.
    pub fn multiply(&self, x: &Lin<P>, y: &Lin<P>) -> Result<Lin<P>> {
        let mut out = LinearCombination::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_scaled(&*self.product_pair(a, b)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// `Δ pat_a = Σ_{b·c = a} pat_b ⊗ pat_c`, one term per distinct pair.
    pub fn coproduct(&self, a: &P::Obj) -> Result<Tensor<P>> {
        let mut out = LinearCombination::zero();
        for pair in self.inst.factor_pairs(&self.inst.canonical(a))? {
            out.add_term(pair, BigRational::one());
        }
        Ok(out)
    }

    pub fn coproduct_lin(&self, x: &Lin<P>) -> Result<Tensor<P>> {
        let mut out = LinearCombination::zero();
        for (a, c) in x.iter() {
            out.add_scaled(&self.coproduct(a)?, c);
        }
        Ok(out)
    }

    /// Coefficient of the unit.
    pub fn counit(&self, x: &Lin<P>) -> BigRational {
        x.coeff(&self.inst.unit())
    }

    /// Ordered factorizations of `a` into non-unit factors.
    pub fn nonunit_factorizations(&self, a: &P::Obj) -> Result<Vec<Vec<P::Obj>>> {
        if self.inst.is_unit(a) {
            return Ok(vec![Vec::new()]);
        }
        let mut out = Vec::new();
        for (b, c) in self.inst.factor_pairs(a)? {
            if self.inst.is_unit(&b) {
                continue;
            }
            for mut rest in self.nonunit_factorizations(&c)? {
                rest.insert(0, b.clone());
                out.push(rest);
            }
        }
        Ok(out)
    }

    /// Takeuchi antipode `S(pat_a)`.
    pub fn antipode(&self, a: &P::Obj, size_cap: usize) -> Result<Lin<P>> {
        let a = self.inst.canonical(a);
        self.check_total(self.inst.size(&a), size_cap)?;
        if self.inst.is_unit(&a) {
            return Ok(self.unit());
        }
        let mut out = LinearCombination::zero();
        for word in self.nonunit_factorizations(&a)? {
            let sign = if word.len() % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            out.add_scaled(&self.product_expand(&word, size_cap)?, &sign);
        }
        Ok(out)
    }

    pub fn antipode_lin(&self, x: &Lin<P>, size_cap: usize) -> Result<Lin<P>> {
        let mut out = LinearCombination::zero();
        for (a, c) in x.iter() {
            out.add_scaled(&self.antipode(a, size_cap)?, c);
        }
        Ok(out)
    }

    /// `M` or `N`, extended linearly.
    pub fn magnus(&self, x: &Lin<P>, direction: MagnusDirection) -> Lin<P> {
        let mut out = LinearCombination::zero();
        for (a, c) in x.iter() {
            let na = self.inst.size(a);
            for (b, count) in self.pattern_profile(a) {
                let mut coeff = c * int(count);
                if direction == MagnusDirection::Inverse && (na + self.inst.size(&b)) % 2 == 1 {
                    coeff = -coeff;
                }
                out.add_term(b, coeff);
            }
        }
        out
    }

    /// Irreducible coinvariants of size `n`; their pattern functions span
    /// the primitives of that degree.
    pub fn primitive_basis(&self, n: usize) -> Result<Vec<P::Obj>> {
        let mut out = Vec::new();
        for a in self.inst.enumerate(n)?.iter() {
            if self.inst.is_irreducible(a)? {
                out.push(a.clone());
            }
        }
        Ok(out)
    }

    /// `Δx = x ⊗ 1 + 1 ⊗ x`.
    pub fn is_primitive(&self, x: &Lin<P>) -> Result<bool> {
        let u = self.inst.unit();
        let mut d = self.coproduct_lin(x)?;
        for (a, c) in x.iter() {
            d.add_term((a.clone(), u.clone()), -c.clone());
            d.add_term((u.clone(), a.clone()), -c.clone());
        }
        Ok(d.is_zero())
    }

    /// `(pat_a · b) = Σ_{a = a_1 · a_2} pat_{a_1}(b) pat_{a_2}`.
    pub fn right_translate(&self, a: &P::Obj, b: &P::Obj) -> Result<Lin<P>> {
        let mut out = LinearCombination::zero();
        for (a1, a2) in self.inst.factor_pairs(&self.inst.canonical(a))? {
            let v = self.pat(&a1, b);
            if v != 0 {
                out.add_term(a2, int(v));
            }
        }
        Ok(out)
    }

    /// Product of the linear maps `x ⊗ y`, bilinearly.
    pub fn tensor_multiply(&self, x: &Tensor<P>, y: &Tensor<P>) -> Result<Tensor<P>> {
        let mut out = LinearCombination::zero();
        for ((a1, a2), c) in x.iter() {
            for ((b1, b2), d) in y.iter() {
                let l = self.product_pair(a1, b1)?;
                let r = self.product_pair(a2, b2)?;
                let cd = c * d;
                for (k1, v1) in l.iter() {
                    for (k2, v2) in r.iter() {
                        out.add_term((k1.clone(), k2.clone()), &cd * v1 * v2);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A restriction-commuting map of objects from one instance to another.
pub trait Morphism {
    type Source: Presheaf;
    type Target: Presheaf;

    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;

    /// Image of a source coinvariant, as a target coinvariant.
    fn apply(&self, o: &<Self::Source as Presheaf>::Obj) -> <Self::Target as Presheaf>::Obj;
}

/// The inversion-graph map from permutations to graphs.
#[derive(Debug, Clone, Default)]
pub struct InversionGraph {
    pub per: Per,
    pub gr: Gr,
}

impl Morphism for InversionGraph {
    type Source = Per;
    type Target = Gr;

    fn source(&self) -> &Per {
        &self.per
    }

    fn target(&self) -> &Gr {
        &self.gr
    }

    fn apply(&self, o: &crate::instances::Permutation) -> crate::instances::Graph {
        inversion_graph(o)
    }
}

/// `𝒜[f](pat_a) = Σ_{f(b) = a} pat_b`, by exhaustive search of the source.
pub fn pushforward<F: Morphism>(
    f: &F,
    a: &<F::Target as Presheaf>::Obj,
) -> Result<LinearCombination<<F::Source as Presheaf>::Obj>> {
    let a = f.target().canonical(a);
    let n = f.target().size(&a);
    let mut out = LinearCombination::zero();
    for b in f.source().enumerate(n)?.iter() {
        if f.target().canonical(&f.apply(b)) == a {
            out.add_term(b.clone(), BigRational::one());
        }
    }
    Ok(out)
}

pub fn pushforward_lin<F: Morphism>(
    f: &F,
    x: &LinearCombination<<F::Target as Presheaf>::Obj>,
) -> Result<LinearCombination<<F::Source as Presheaf>::Obj>> {
    let mut out = LinearCombination::zero();
    for (a, c) in x.iter() {
        out.add_scaled(&pushforward(f, a)?, c);
    }
    Ok(out)
}
