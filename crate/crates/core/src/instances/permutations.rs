//! Permutations under `⊕`, and marked permutations under inflation `⋆`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::presheaf::{mask_indices, EnumCache, InstanceDescriptor, Labeled, Mask, Presheaf};

/// Replace distinct values by their ranks `1..=k`, keeping order.
pub(crate) fn standardize(values: &[u8]) -> Vec<u8> {
    let mut sorted: Vec<u8> = values.to_vec();
    sorted.sort_unstable();
    values
        .iter()
        .map(|v| sorted.binary_search(v).expect("value present") as u8 + 1)
        .collect()
}

fn check_bijection(values: &[u8]) -> Result<()> {
    let n = values.len();
    let mut seen = vec![false; n + 1];
    for &v in values {
        let v = v as usize;
        if v == 0 || v > n || seen[v] {
            return Err(Error::domain(format!("{values:?} is not a permutation of 1..{n}")));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Lexicographic successor, `false` when `v` is the last arrangement.
pub(crate) fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn all_arrangements(n: usize) -> Vec<Vec<u8>> {
    let mut cur: Vec<u8> = (1..=n as u8).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn values_to_string(values: &[u8], bracket: Option<usize>) -> String {
    let wide = values.len() > 9;
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if wide && i > 0 {
            s.push(',');
        }
        if Some(i) == bracket {
            s.push_str(&format!("[{v}]"));
        } else {
            s.push_str(&v.to_string());
        }
    }
    s
}

/// A permutation in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        check_bijection(&values)?;
        Ok(Permutation(values))
    }

    pub fn empty() -> Self {
        Permutation(Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n as u8).collect())
    }

    /// Permutation read off two total orders on the same labels: the value of
    /// the `i`-th element in position order is its rank in value order.
    pub fn from_orders<T: PartialEq + fmt::Debug>(position_order: &[T], value_order: &[T]) -> Result<Self> {
        if position_order.len() != value_order.len() {
            return Err(Error::domain("the two orders have different lengths"));
        }
        let mut values = Vec::with_capacity(position_order.len());
        for l in position_order {
            let r = value_order
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::domain(format!("label {l:?} missing from the value order")))?;
            values.push(r as u8 + 1);
        }
        Permutation::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    /// `self ⊕ other`: `self` in the lower left, `other` in the upper right.
    pub fn oplus(&self, other: &Permutation) -> Permutation {
        let k = self.len() as u8;
        let mut v = self.0.clone();
        v.extend(other.0.iter().map(|x| x + k));
        Permutation(v)
    }

    /// `self ⊖ other`: `self` in the upper left, `other` in the lower right.
    pub fn ominus(&self, other: &Permutation) -> Permutation {
        let k = other.len() as u8;
        let mut v: Vec<u8> = self.0.iter().map(|x| x + k).collect();
        v.extend_from_slice(&other.0);
        Permutation(v)
    }

    /// Vertical flip: value `v` becomes `n + 1 - v`. Exchanges `⊕` and `⊖`.
    pub fn complement(&self) -> Permutation {
        let n = self.len() as u8;
        Permutation(self.0.iter().map(|v| n + 1 - v).collect())
    }

    /// Maximal decomposition into `⊕`-indecomposable blocks; empty for `∅`.
    pub fn oplus_blocks(&self) -> Vec<Permutation> {
        let mut blocks = Vec::new();
        let mut start = 0;
        let mut max = 0u8;
        for (i, &v) in self.0.iter().enumerate() {
            max = max.max(v);
            if max as usize == i + 1 {
                blocks.push(Permutation(self.0[start..=i].iter().map(|x| x - start as u8).collect()));
                start = i + 1;
            }
        }
        blocks
    }

    pub fn ominus_blocks(&self) -> Vec<Permutation> {
        self.complement().oplus_blocks().iter().map(Permutation::complement).collect()
    }

    /// Nonempty and no proper prefix is a permutation of `1..k`.
    pub fn is_oplus_indecomposable(&self) -> bool {
        !self.is_empty() && self.oplus_blocks().len() == 1
    }

    pub fn is_ominus_indecomposable(&self) -> bool {
        !self.is_empty() && self.complement().oplus_blocks().len() == 1
    }

    pub fn inversions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).filter(move |&j| self.0[i] > self.0[j]).map(move |j| (i, j)))
    }
}

impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&values_to_string(&self.0, None))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

fn parse_number(tok: &str, whole: &str) -> Result<u8> {
    tok.trim()
        .parse::<u8>()
        .map_err(|_| Error::parse(whole, format!("`{tok}` is not a positive integer")))
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Permutation::empty());
        }
        let values: Vec<u8> = if s.contains(',') {
            s.split(',').map(|t| parse_number(t, s)).collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d > 0)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::parse(s, format!("unexpected character `{c}`")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(values).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// A marked permutation of size `n`: `n + 1` values, one of which is the mark.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MarkedPermutation {
    values: Vec<u8>,
    /// 0-based position of the mark.
    mark: usize,
}

/// How a marked permutation with its mark at an extreme corner splits off
/// `1̄`. Only meaningful for irreducible letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Shape {
    /// `1̄ ⊕ π`
    UnitOplus(Permutation),
    /// `π ⊕ 1̄`
    OplusUnit(Permutation),
    /// `1̄ ⊖ π`
    UnitOminus(Permutation),
    /// `π ⊖ 1̄`
    OminusUnit(Permutation),
    /// Mark in no corner.
    Other,
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl MarkedPermutation {
    /// `values` is a permutation of `1..=n+1`; `mark` is a 0-based position.
    pub fn new(values: Vec<u8>, mark: usize) -> Result<Self> {
        check_bijection(&values)?;
        if mark >= values.len() {
            return Err(Error::domain(format!("mark position {} outside 1..={}", mark + 1, values.len())));
        }
        Ok(MarkedPermutation { values, mark })
    }

    pub(crate) fn from_parts_unchecked(values: Vec<u8>, mark: usize) -> Self {
        debug_assert!(check_bijection(&values).is_ok() && mark < values.len());
        MarkedPermutation { values, mark }
    }

    /// The unit `1̄`.
    pub fn unit() -> Self {
        MarkedPermutation { values: vec![1], mark: 0 }
    }

    /// Build from two total orders on `labels ⊔ {mark}`.
    pub fn from_orders<T: PartialEq + fmt::Debug>(position_order: &[T], value_order: &[T], mark: &T) -> Result<Self> {
        let p = Permutation::from_orders(position_order, value_order)?;
        let m = position_order
            .iter()
            .position(|x| x == mark)
            .ok_or_else(|| Error::domain(format!("mark {mark:?} missing from the orders")))?;
        MarkedPermutation::new(p.0, m)
    }

    pub fn size(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// 0-based mark position.
    pub fn mark(&self) -> usize {
        self.mark
    }

    /// 1-based rank of the mark in the position order.
    pub fn rank(&self) -> usize {
        self.mark + 1
    }

    pub fn mark_value(&self) -> u8 {
        self.values[self.mark]
    }

    /// Underlying permutation of `I ⊔ {*}`.
    pub fn underlying(&self) -> Permutation {
        Permutation(self.values.clone())
    }

    /// Inflation `self ⋆ other`: the mark cell of `self` is replaced by the
    /// diagram of `other`, whose mark becomes the result's mark.
    pub fn inflate(&self, other: &MarkedPermutation) -> MarkedPermutation {
        let grow = other.size() as u8;
        let v = self.mark_value();
        let mut values = Vec::with_capacity(self.values.len() + other.values.len() - 1);
        let shift = |x: u8| if x > v { x + grow } else { x };
        values.extend(self.values[..self.mark].iter().map(|&x| shift(x)));
        values.extend(other.values.iter().map(|&x| v + x - 1));
        values.extend(self.values[self.mark + 1..].iter().map(|&x| shift(x)));
        MarkedPermutation { values, mark: self.mark + other.mark }
    }

    /// `τ ⊕ self`
    pub fn oplus_left(&self, tau: &Permutation) -> MarkedPermutation {
        let k = tau.len() as u8;
        let mut values = tau.0.clone();
        values.extend(self.values.iter().map(|x| x + k));
        MarkedPermutation { values, mark: self.mark + tau.len() }
    }

    /// `self ⊕ τ`
    pub fn oplus_right(&self, tau: &Permutation) -> MarkedPermutation {
        let k = self.values.len() as u8;
        let mut values = self.values.clone();
        values.extend(tau.0.iter().map(|x| x + k));
        MarkedPermutation { values, mark: self.mark }
    }

    /// `τ ⊖ self`
    pub fn ominus_left(&self, tau: &Permutation) -> MarkedPermutation {
        let k = self.values.len() as u8;
        let mut values: Vec<u8> = tau.0.iter().map(|x| x + k).collect();
        values.extend_from_slice(&self.values);
        MarkedPermutation { values, mark: self.mark + tau.len() }
    }

    /// `self ⊖ τ`
    pub fn ominus_right(&self, tau: &Permutation) -> MarkedPermutation {
        let k = tau.len() as u8;
        let mut values: Vec<u8> = self.values.iter().map(|x| x + k).collect();
        values.extend_from_slice(&tau.0);
        MarkedPermutation { values, mark: self.mark }
    }

    pub fn complement(&self) -> MarkedPermutation {
        let n = self.values.len() as u8;
        MarkedPermutation { values: self.values.iter().map(|v| n + 1 - v).collect(), mark: self.mark }
    }

    /// Windows `[lo, hi]` of positions containing the mark whose values form
    /// an interval. These are exactly the DC intervals (with the mark added).
    /// Sorted by window length, then start.
    pub fn dc_windows(&self) -> Vec<(usize, usize)> {
        let len = self.values.len();
        let mut out = Vec::new();
        for lo in 0..=self.mark {
            let (mut min, mut max) = (u8::MAX, 0u8);
            for x in &self.values[lo..self.mark] {
                min = min.min(*x);
                max = max.max(*x);
            }
            for hi in self.mark..len {
                min = min.min(self.values[hi]);
                max = max.max(self.values[hi]);
                if (max - min) as usize == hi - lo {
                    out.push((lo, hi));
                }
            }
        }
        out.sort_by_key(|&(lo, hi)| (hi - lo, lo));
        out
    }

    /// Ground-element mask (unmarked positions, renumbered) of a window.
    pub(crate) fn window_mask(&self, lo: usize, hi: usize) -> Mask {
        let mut mask = 0;
        for p in lo..=hi {
            if p != self.mark {
                let g = if p < self.mark { p } else { p - 1 };
                mask |= 1 << g;
            }
        }
        mask
    }

    pub fn shape(&self) -> Shape {
        let n = self.values.len();
        if n < 2 {
            return Shape::Other;
        }
        let top = n as u8;
        let rest = |range: std::ops::Range<usize>| Permutation(standardize(&self.values[range]));
        match (self.mark, self.mark_value()) {
            (0, 1) => Shape::UnitOplus(rest(1..n)),
            (0, v) if v == top => Shape::UnitOminus(rest(1..n)),
            (m, v) if m == n - 1 && v == top => Shape::OplusUnit(rest(0..n - 1)),
            (m, 1) if m == n - 1 => Shape::OminusUnit(rest(0..n - 1)),
            _ => Shape::Other,
        }
    }

    /// Induced marked permutation on the unmarked ground elements in `mask`.
    fn induced(&self, mask: Mask) -> MarkedPermutation {
        let mut kept = Vec::with_capacity(mask.count_ones() as usize + 1);
        let mut new_mark = 0;
        let mut g = 0;
        for (p, &v) in self.values.iter().enumerate() {
            if p == self.mark {
                new_mark = kept.len();
                kept.push(v);
            } else {
                if mask & (1 << g) != 0 {
                    kept.push(v);
                }
                g += 1;
            }
        }
        MarkedPermutation { values: standardize(&kept), mark: new_mark }
    }
}

impl Ord for MarkedPermutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values
            .len()
            .cmp(&other.values.len())
            .then_with(|| self.values.cmp(&other.values))
            .then_with(|| self.mark.cmp(&other.mark))
    }
}

impl PartialOrd for MarkedPermutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MarkedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&values_to_string(&self.values, Some(self.mark)))
    }
}

impl fmt::Debug for MarkedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MarkedPermutation({self})")
    }
}

impl Serialize for MarkedPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for MarkedPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut values = Vec::new();
        let mut mark = None;
        let mut push = |v: u8, marked: bool, mark: &mut Option<usize>| -> Result<()> {
            if marked {
                if mark.is_some() {
                    return Err(Error::parse(s, "more than one marked value"));
                }
                *mark = Some(values.len());
            }
            values.push(v);
            Ok(())
        };
        if s.contains(',') {
            for tok in s.split(',') {
                let tok = tok.trim();
                if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                    push(parse_number(inner, s)?, true, &mut mark)?;
                } else {
                    push(parse_number(tok, s)?, false, &mut mark)?;
                }
            }
        } else {
            let mut chars = s.chars();
            while let Some(c) = chars.next() {
                if c == '[' {
                    let d = chars.next().and_then(|d| d.to_digit(10));
                    let close = chars.next();
                    match (d, close) {
                        (Some(d), Some(']')) if d > 0 => push(d as u8, true, &mut mark)?,
                        _ => return Err(Error::parse(s, "expected `[d]` with a single nonzero digit")),
                    }
                } else {
                    match c.to_digit(10) {
                        Some(d) if d > 0 => push(d as u8, false, &mut mark)?,
                        _ => return Err(Error::parse(s, format!("unexpected character `{c}`"))),
                    }
                }
            }
        }
        let mark = mark.ok_or_else(|| Error::parse(s, "no marked value (write it as `[k]`)"))?;
        MarkedPermutation::new(values, mark).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// `⊕`- or `⊖`-structure, used by decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SumKind {
    Oplus,
    Ominus,
}

/// `ε_1 ∘ … ∘ ε_u ∘ β* ∘ λ_v ∘ … ∘ λ_1` for `∘` one of `⊕`, `⊖`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SumDecomposition {
    pub kind: SumKind,
    pub epsilons: Vec<Permutation>,
    pub core: MarkedPermutation,
    /// Left to right: `λ_v, …, λ_1`.
    pub lambdas: Vec<Permutation>,
}

impl SumDecomposition {
    pub fn q(&self) -> usize {
        self.epsilons.len() + self.lambdas.len()
    }

    pub fn reassemble(&self) -> MarkedPermutation {
        let mut out = self.core.clone();
        for l in &self.lambdas {
            out = match self.kind {
                SumKind::Oplus => out.oplus_right(l),
                SumKind::Ominus => out.ominus_right(l),
            };
        }
        for e in self.epsilons.iter().rev() {
            out = match self.kind {
                SumKind::Oplus => out.oplus_left(e),
                SumKind::Ominus => out.ominus_left(e),
            };
        }
        out
    }
}

fn oplus_peel(alpha: &MarkedPermutation) -> SumDecomposition {
    let v = &alpha.values;
    let n = v.len();
    let mut epsilons = Vec::new();
    let mut lo = 0usize; // first unpeeled position
    let mut low_used = 0u8; // values 1..=low_used are peeled from the left
    'left: while lo < alpha.mark {
        let mut max = 0u8;
        for end in lo..alpha.mark {
            max = max.max(v[end]);
            if max as usize == low_used as usize + (end - lo + 1) {
                if v[lo..=end].iter().all(|&x| x > low_used) {
                    epsilons.push(Permutation(v[lo..=end].iter().map(|x| x - low_used).collect()));
                    low_used = max;
                    lo = end + 1;
                    continue 'left;
                }
            }
        }
        break;
    }
    let mut lambdas = Vec::new();
    let mut hi = n; // one past the last unpeeled position
    let mut high_used = n as u8 + 1; // values >= high_used are peeled from the right
    'right: while hi > alpha.mark + 1 {
        let mut min = u8::MAX;
        for start in (alpha.mark + 1..hi).rev() {
            min = min.min(v[start]);
            if (high_used - min) as usize == hi - start {
                lambdas.push(Permutation(v[start..hi].iter().map(|x| x - min + 1).collect()));
                high_used = min;
                hi = start;
                continue 'right;
            }
        }
        break;
    }
    lambdas.reverse();
    let core_vals: Vec<u8> = v[lo..hi].iter().map(|x| x - low_used).collect();
    SumDecomposition {
        kind: SumKind::Oplus,
        epsilons,
        core: MarkedPermutation { values: core_vals, mark: alpha.mark - lo },
        lambdas,
    }
}

/// Maximal peeling of indecomposable unmarked summands from both ends.
pub fn sum_decomposition(alpha: &MarkedPermutation, kind: SumKind) -> SumDecomposition {
    match kind {
        SumKind::Oplus => oplus_peel(alpha),
        SumKind::Ominus => {
            let d = oplus_peel(&alpha.complement());
            SumDecomposition {
                kind: SumKind::Ominus,
                epsilons: d.epsilons.iter().map(Permutation::complement).collect(),
                core: d.core.complement(),
                lambdas: d.lambdas.iter().map(Permutation::complement).collect(),
            }
        }
    }
}

impl MarkedPermutation {
    pub fn is_oplus_decomposable(&self) -> bool {
        sum_decomposition(self, SumKind::Oplus).q() > 0
    }

    pub fn is_ominus_decomposable(&self) -> bool {
        sum_decomposition(self, SumKind::Ominus).q() > 0
    }

    /// Neither `⊕`- nor `⊖`-decomposable.
    pub fn is_indecomposable(&self) -> bool {
        !self.is_oplus_decomposable() && !self.is_ominus_decomposable()
    }
}

/// `(Per, ⊕, ∅)`.
#[derive(Debug, Clone)]
pub struct Per {
    cap: usize,
    cache: EnumCache<Permutation>,
}

impl Per {
    pub const DEFAULT_CAP: usize = 8;

    pub fn new() -> Self {
        Per { cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(cap: usize) -> Self {
        Per { cap, cache: EnumCache::default() }
    }

    pub fn labeled_from_orders<T: Clone + PartialEq + fmt::Debug>(
        &self,
        position_order: &[T],
        value_order: &[T],
    ) -> Result<Labeled<T, Permutation>> {
        let p = Permutation::from_orders(position_order, value_order)?;
        Labeled::new(self, position_order.to_vec(), p)
    }
}

impl Default for Per {
    fn default() -> Self {
        Self::new()
    }
}

impl Presheaf for Per {
    type Obj = Permutation;

    fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor { name: "per", associative: true, commutative: false, cap: self.cap }
    }

    fn size(&self, o: &Permutation) -> usize {
        o.len()
    }

    fn induced(&self, o: &Permutation, mask: Mask) -> Permutation {
        let kept: Vec<u8> = mask_indices(mask).map(|i| o.0[i]).collect();
        Permutation(standardize(&kept))
    }

    fn canonical(&self, o: &Permutation) -> Permutation {
        o.clone()
    }

    fn relabel(&self, o: &Permutation, _perm: &[usize]) -> Permutation {
        // Normalized form lists ground elements in position order, so the
        // one-line notation is already label independent.
        o.clone()
    }

    fn encode(&self, o: &Permutation) -> Vec<u8> {
        o.0.clone()
    }

    fn generate(&self, n: usize) -> Vec<Permutation> {
        all_arrangements(n).into_iter().map(Permutation).collect()
    }

    fn cache(&self) -> &EnumCache<Permutation> {
        &self.cache
    }

    fn unit(&self) -> Permutation {
        Permutation::empty()
    }

    fn product(&self, a: &Permutation, b: &Permutation) -> Result<Permutation> {
        Ok(a.oplus(b))
    }

    fn factor_pairs(&self, a: &Permutation) -> Result<Vec<(Permutation, Permutation)>> {
        let mut out = vec![(Permutation::empty(), a.clone())];
        let mut max = 0u8;
        for (i, &v) in a.0.iter().enumerate() {
            max = max.max(v);
            if max as usize == i + 1 {
                let k = i as u8 + 1;
                let right = Permutation(a.0[i + 1..].iter().map(|x| x - k).collect());
                out.push((Permutation(a.0[..=i].to_vec()), right));
            }
        }
        out.sort();
        Ok(out)
    }

    /// `⊕`-blocks, left to right.
    fn irreducible_factors(&self, a: &Permutation) -> Result<Vec<Permutation>> {
        Ok(a.oplus_blocks())
    }

    fn is_irreducible(&self, a: &Permutation) -> Result<bool> {
        Ok(a.is_oplus_indecomposable())
    }
}

/// `(MPer, ⋆, 1̄)`.
#[derive(Debug, Clone)]
pub struct MPer {
    cap: usize,
    cache: EnumCache<MarkedPermutation>,
}

impl MPer {
    pub const DEFAULT_CAP: usize = 7;

    pub fn new() -> Self {
        MPer { cap: Self::DEFAULT_CAP, cache: EnumCache::default() }
    }

    pub fn with_cap(cap: usize) -> Self {
        MPer { cap, cache: EnumCache::default() }
    }

    /// Labeled marked permutation from two orders on `labels ⊔ {mark}`; the
    /// mark is dropped from the label table.
    pub fn labeled_from_orders<T: Clone + PartialEq + fmt::Debug>(
        &self,
        position_order: &[T],
        value_order: &[T],
        mark: &T,
    ) -> Result<Labeled<T, MarkedPermutation>> {
        let m = MarkedPermutation::from_orders(position_order, value_order, mark)?;
        let labels = position_order.iter().filter(|l| *l != mark).cloned().collect();
        Labeled::new(self, labels, m)
    }
}

impl Default for MPer {
    fn default() -> Self {
        Self::new()
    }
}

impl Presheaf for MPer {
    type Obj = MarkedPermutation;

    fn descriptor(&self) -> InstanceDescriptor {
        InstanceDescriptor { name: "mper", associative: true, commutative: false, cap: self.cap }
    }

    fn size(&self, o: &MarkedPermutation) -> usize {
        o.size()
    }

    fn induced(&self, o: &MarkedPermutation, mask: Mask) -> MarkedPermutation {
        o.induced(mask)
    }

    fn canonical(&self, o: &MarkedPermutation) -> MarkedPermutation {
        o.clone()
    }

    fn relabel(&self, o: &MarkedPermutation, _perm: &[usize]) -> MarkedPermutation {
        o.clone()
    }

    fn encode(&self, o: &MarkedPermutation) -> Vec<u8> {
        let mut e = o.values.clone();
        e.push(o.mark as u8);
        e
    }

    fn generate(&self, n: usize) -> Vec<MarkedPermutation> {
        let mut out = Vec::with_capacity((n + 1) * (1..=n + 1).product::<usize>());
        for values in all_arrangements(n + 1) {
            for mark in 0..=n {
                out.push(MarkedPermutation { values: values.clone(), mark });
            }
        }
        out
    }

    fn cache(&self) -> &EnumCache<MarkedPermutation> {
        &self.cache
    }

    fn unit(&self) -> MarkedPermutation {
        MarkedPermutation::unit()
    }

    fn product(&self, a: &MarkedPermutation, b: &MarkedPermutation) -> Result<MarkedPermutation> {
        Ok(a.inflate(b))
    }

    /// Right factors correspond to DC intervals.
    fn factor_pairs(&self, a: &MarkedPermutation) -> Result<Vec<(MarkedPermutation, MarkedPermutation)>> {
        let full = crate::presheaf::full_mask(a.size());
        let mut out: Vec<_> = a
            .dc_windows()
            .into_iter()
            .map(|(lo, hi)| {
                let inner = a.window_mask(lo, hi);
                (a.induced(full & !inner), a.induced(inner))
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn is_irreducible(&self, a: &MarkedPermutation) -> Result<bool> {
        Ok(a.size() >= 1 && a.dc_windows().len() == 2)
    }
}
