//! Finitely supported linear combinations with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `Σ c_k · pat_k` with zero coefficients never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearCombination<K: Ord> {
    terms: BTreeMap<K, BigRational>,
}

/// Combinations over ordered pairs, the codomain of the coproduct.
pub type TensorCombination<K> = LinearCombination<(K, K)>;

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl<K: Ord> Default for LinearCombination<K> {
    fn default() -> Self {
        LinearCombination { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinearCombination<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(k: K) -> Self {
        Self::term(k, BigRational::one())
    }

    pub fn term(k: K, c: BigRational) -> Self {
        let mut out = Self::zero();
        out.add_term(k, c);
        out
    }

    pub fn add_term(&mut self, k: K, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &BigRational) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn coeff(&self, k: &K) -> BigRational {
        self.terms.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &BigRational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> LinearCombination<L> {
        let mut out = LinearCombination::zero();
        for (k, v) in &self.terms {
            out.add_term(f(k), v.clone());
        }
        out
    }

    /// Human-readable rendering with a custom key formatter.
    pub fn render(&self, key: impl Fn(&K) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if !a.is_one() {
                s.push_str(&format!("{a}*"));
            }
            s.push_str(&key(k));
        }
        s
    }
}

impl<K: Ord + Clone> Add for &LinearCombination<K> {
    type Output = LinearCombination<K>;
    fn add(self, rhs: Self) -> LinearCombination<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigRational::one());
        out
    }
}

impl<K: Ord + Clone> Sub for &LinearCombination<K> {
    type Output = LinearCombination<K>;
    fn sub(self, rhs: Self) -> LinearCombination<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigRational::one());
        out
    }
}

impl<K: Ord + Clone> Neg for &LinearCombination<K> {
    type Output = LinearCombination<K>;
    fn neg(self) -> LinearCombination<K> {
        self.scale(&-BigRational::one())
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for LinearCombination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|k| format!("pat[{k}]")))
    }
}

impl<K: Ord + Clone + fmt::Debug> fmt::Debug for LinearCombination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|k| format!("{k:?}")))
    }
}
