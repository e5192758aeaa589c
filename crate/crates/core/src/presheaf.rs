//! The presheaf-instance contract.
//!
//! A combinatorial presheaf is represented here by a value implementing
//! [`Presheaf`]. Objects are stored in *normalized* form: the ground set of an
//! object of size `n` is `0..n`, and restriction to a subset relabels the kept
//! elements order-preservingly. A coinvariant is the canonical representative
//! of an isomorphism class, obtained with [`Presheaf::canonical`]; everything in
//! the algebra layer works on canonical objects.
//!
//! Subsets of a ground set are passed around as `u32` bitmasks, which bounds
//! object sizes to 32. Enumeration caps are far below that.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// Bitmask over ground-set indices.
pub type Mask = u32;

/// Static facts about a presheaf instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceDescriptor {
    pub name: &'static str,
    pub associative: bool,
    pub commutative: bool,
    pub cap: usize,
}

/// Memoized per-size enumerations, shared between clones of an instance.
#[derive(Debug)]
pub struct EnumCache<O> {
    inner: Arc<RwLock<HashMap<usize, Arc<Vec<O>>>>>,
}

impl<O> Clone for EnumCache<O> {
    fn clone(&self) -> Self {
        EnumCache { inner: Arc::clone(&self.inner) }
    }
}

impl<O> Default for EnumCache<O> {
    fn default() -> Self {
        EnumCache { inner: Arc::new(RwLock::new(HashMap::new())) }
    }
}

impl<O> EnumCache<O> {
    fn get_or_insert_with(&self, n: usize, f: impl FnOnce() -> Vec<O>) -> Arc<Vec<O>> {
        if let Some(v) = self.inner.read().expect("enumeration cache poisoned").get(&n) {
            return Arc::clone(v);
        }
        let fresh = Arc::new(f());
        let mut guard = self.inner.write().expect("enumeration cache poisoned");
        Arc::clone(guard.entry(n).or_insert(fresh))
    }
}

pub trait Presheaf: Send + Sync {
    /// Normalized object. Canonical objects double as coinvariants; `Ord` is
    /// size first, then canonical encoding.
    type Obj: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn descriptor(&self) -> InstanceDescriptor;

    fn name(&self) -> &'static str {
        self.descriptor().name
    }

    fn cap(&self) -> usize {
        self.descriptor().cap
    }

    fn size(&self, o: &Self::Obj) -> usize;

    /// Induced substructure on `mask`, *not* canonicalized. Kept ground
    /// elements are renumbered in increasing index order.
    fn induced(&self, o: &Self::Obj, mask: Mask) -> Self::Obj;

    /// Canonical representative of the isomorphism class of `o`.
    fn canonical(&self, o: &Self::Obj) -> Self::Obj;

    /// Transport `o` along the bijection sending ground element `i` to
    /// `perm[i]`.
    fn relabel(&self, o: &Self::Obj, perm: &[usize]) -> Self::Obj;

    /// Canonical encoding; equal iff the objects are isomorphic.
    fn encode(&self, o: &Self::Obj) -> Vec<u8>;

    /// All coinvariants of size `n`, sorted and duplicate free. Uncached.
    fn generate(&self, n: usize) -> Vec<Self::Obj>;

    fn cache(&self) -> &EnumCache<Self::Obj>;

    /// The unique object on the empty set.
    fn unit(&self) -> Self::Obj;

    /// Associative product of two coinvariants (after shifting the second
    /// factor to a disjoint ground set). Returns a canonical object.
    fn product(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::Obj> {
        let _ = (a, b);
        Err(Error::Unsupported { op: "product", instance: self.name().to_string() })
    }

    /// Every pair `(b, c)` of coinvariants with `b · c = a`, each pair once,
    /// sorted. The default is an exhaustive search over all candidate pairs.
    fn factor_pairs(&self, a: &Self::Obj) -> Result<Vec<(Self::Obj, Self::Obj)>> {
        brute_force_factor_pairs(self, a)
    }

    /// Restriction of `o` to the ground elements listed in `subset`, as a
    /// coinvariant.
    fn restrict(&self, o: &Self::Obj, subset: &[usize]) -> Result<Self::Obj> {
        let mask = subset_mask(self.size(o), subset)?;
        Ok(self.restrict_mask(o, mask))
    }

    fn restrict_mask(&self, o: &Self::Obj, mask: Mask) -> Self::Obj {
        self.canonical(&self.induced(o, mask))
    }

    /// Every coinvariant of size `n`, in canonical-encoding order.
    fn enumerate(&self, n: usize) -> Result<Arc<Vec<Self::Obj>>> {
        let cap = self.cap();
        if n > cap {
            return Err(Error::resource(format!("enumerate {}", self.name()), n, cap));
        }
        Ok(self.cache().get_or_insert_with(n, || self.generate(n)))
    }

    fn enumerate_upto(&self, n: usize) -> Result<Vec<Self::Obj>> {
        let mut out = Vec::new();
        for k in 0..=n {
            out.extend(self.enumerate(k)?.iter().cloned());
        }
        Ok(out)
    }

    /// The unique factorization into irreducibles, for instances that have
    /// one: sorted for commutative instances, in product order otherwise.
    fn irreducible_factors(&self, a: &Self::Obj) -> Result<Vec<Self::Obj>> {
        let _ = a;
        Err(Error::Unsupported { op: "irreducible factors", instance: self.name().to_string() })
    }

    fn is_unit(&self, o: &Self::Obj) -> bool {
        self.size(o) == 0
    }

    /// Irreducible: not the unit, and only trivial factorizations.
    fn is_irreducible(&self, a: &Self::Obj) -> Result<bool> {
        if self.is_unit(a) {
            return Ok(false);
        }
        Ok(self.factor_pairs(a)?.iter().all(|(b, c)| self.is_unit(b) || self.is_unit(c)))
    }
}

/// Exhaustive factor-pair search, usable by any associative instance and as an
/// oracle for the specialized implementations.
pub fn brute_force_factor_pairs<P: Presheaf + ?Sized>(
    inst: &P,
    a: &P::Obj,
) -> Result<Vec<(P::Obj, P::Obj)>> {
    let n = inst.size(a);
    let mut out = Vec::new();
    for k in 0..=n {
        let lefts = inst.enumerate(k)?;
        let rights = inst.enumerate(n - k)?;
        for b in lefts.iter() {
            for c in rights.iter() {
                if &inst.product(b, c)? == a {
                    out.push((b.clone(), c.clone()));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

pub(crate) fn subset_mask(n: usize, subset: &[usize]) -> Result<Mask> {
    let mut mask: Mask = 0;
    for &i in subset {
        if i >= n {
            return Err(Error::domain(format!("ground element {i} is not in a ground set of size {n}")));
        }
        if mask & (1 << i) != 0 {
            return Err(Error::domain(format!("ground element {i} listed twice")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

pub(crate) fn full_mask(n: usize) -> Mask {
    if n >= 32 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

/// Indices set in `mask`, ascending.
pub(crate) fn mask_indices(mask: Mask) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// All `k`-subsets of `0..n` as bitmasks, in increasing numeric order.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = Mask> {
    let limit: u64 = 1u64 << n;
    let mut cur: u64 = if k > n {
        limit
    } else if k == 0 {
        0
    } else {
        (1u64 << k) - 1
    };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur as Mask;
        if cur == 0 {
            done = true;
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
            if cur >= limit {
                done = true;
            }
        }
        Some(out)
    })
}

/// An object together with external labels for its ground elements.
///
/// `labels[i]` names ground element `i` of `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeled<L, O> {
    labels: Vec<L>,
    object: O,
}

impl<L: Clone + PartialEq + fmt::Debug, O> Labeled<L, O> {
    pub fn new<P: Presheaf<Obj = O>>(inst: &P, labels: Vec<L>, object: O) -> Result<Self> {
        if labels.len() != inst.size(&object) {
            return Err(Error::domain(format!(
                "{} labels supplied for an object of size {}",
                labels.len(),
                inst.size(&object)
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::domain(format!("label {l:?} is repeated")));
            }
        }
        Ok(Labeled { labels, object })
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn object(&self) -> &O {
        &self.object
    }

    /// Induced substructure on the labels in `subset`.
    pub fn restrict<P: Presheaf<Obj = O>>(&self, inst: &P, subset: &[L]) -> Result<Self> {
        let mut idx = Vec::with_capacity(subset.len());
        for l in subset {
            match self.labels.iter().position(|x| x == l) {
                Some(i) => idx.push(i),
                None => return Err(Error::domain(format!("label {l:?} is not in the ground set"))),
            }
        }
        let mask = subset_mask(self.labels.len(), &idx)?;
        let labels = mask_indices(mask).map(|i| self.labels[i].clone()).collect();
        Ok(Labeled { labels, object: inst.induced(&self.object, mask) })
    }

    pub fn canonicalize<P: Presheaf<Obj = O>>(&self, inst: &P) -> O {
        inst.canonical(&self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gosper_enumerates_binomial_many() {
        for n in 0..8 {
            for k in 0..=n + 1 {
                let subs: Vec<_> = subsets_of_size(n, k).collect();
                let expected = if k > n { 0 } else { binom(n, k) };
                assert_eq!(subs.len(), expected, "n={n} k={k}");
                assert!(subs.iter().all(|m| m.count_ones() as usize == k));
                assert!(subs.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn subset_mask_rejects_foreign_and_repeated() {
        assert!(subset_mask(3, &[0, 3]).is_err());
        assert!(subset_mask(3, &[1, 1]).is_err());
        assert_eq!(subset_mask(3, &[2, 0]).unwrap(), 0b101);
    }
}
