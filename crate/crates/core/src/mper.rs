//! Factorization of marked permutations under inflation: DC intervals,
//! irreducible letters, stable words, the orders `≤_per` and `≤_fac`, and
//! stable Lyndon (SL) factorizations.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instances::permutations::{MarkedPermutation, Permutation, Shape};
use crate::lyndon::{cfl_factorize, compare_words, is_lyndon};
use crate::presheaf::{full_mask, Mask, Presheaf};
use crate::instances::MPer;

/// Tie-break between marked permutations with the same one-line values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RankTieBreak {
    /// Compare mark positions.
    Position,
    /// Compare mark values.
    Value,
}

/// Which adjacent `⊖`-pair a stable word forbids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OminusStability {
    /// Forbid `τ⊖1̄` followed by `1̄⊖π`.
    Paper,
    /// Forbid `1̄⊖π` followed by `τ⊖1̄`.
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Convention {
    pub rank: RankTieBreak,
    pub ominus: OminusStability,
}

impl Convention {
    pub const PAPER: Convention = Convention { rank: RankTieBreak::Position, ominus: OminusStability::Paper };
    pub const MIRRORED_OMINUS: Convention =
        Convention { rank: RankTieBreak::Position, ominus: OminusStability::Mirrored };
    pub const VALUE_RANK: Convention = Convention { rank: RankTieBreak::Value, ominus: OminusStability::Paper };
    pub const VALUE_RANK_MIRRORED: Convention =
        Convention { rank: RankTieBreak::Value, ominus: OminusStability::Mirrored };

    pub fn all() -> [Convention; 4] {
        [Self::PAPER, Self::MIRRORED_OMINUS, Self::VALUE_RANK, Self::VALUE_RANK_MIRRORED]
    }

    pub fn name(&self) -> &'static str {
        match (self.rank, self.ominus) {
            (RankTieBreak::Position, OminusStability::Paper) => "paper",
            (RankTieBreak::Position, OminusStability::Mirrored) => "mirrored-ominus",
            (RankTieBreak::Value, OminusStability::Paper) => "value-rank",
            (RankTieBreak::Value, OminusStability::Mirrored) => "value-rank+mirrored-ominus",
        }
    }
}

impl Default for Convention {
    fn default() -> Self {
        Self::PAPER
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Convention::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::parse(s, "unknown convention"))
    }
}

/// A DC interval: unmarked ground elements whose union with the mark is an
/// interval in both orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DcInterval {
    pub mask: Mask,
    /// Positions `lo..=hi` of the window, mark included.
    pub window: (usize, usize),
}

impl DcInterval {
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    fn contains(&self, other: &DcInterval) -> bool {
        self.mask & other.mask == other.mask
    }
}

/// All DC intervals, `∅` and the full set included, sorted by size then
/// window start.
pub fn dc_intervals(alpha: &MarkedPermutation) -> Vec<DcInterval> {
    alpha
        .dc_windows()
        .into_iter()
        .map(|(lo, hi)| DcInterval { mask: alpha.window_mask(lo, hi), window: (lo, hi) })
        .collect()
}

pub fn is_irreducible_mper(alpha: &MarkedPermutation) -> bool {
    alpha.size() >= 1 && alpha.dc_windows().len() == 2
}

fn restrict(alpha: &MarkedPermutation, mask: Mask) -> MarkedPermutation {
    MPer::new().restrict_mask(alpha, mask)
}

/// Proper DC intervals contained in no other proper DC interval.
fn maximal_proper(alpha: &MarkedPermutation) -> Vec<DcInterval> {
    let full = full_mask(alpha.size());
    let proper: Vec<DcInterval> = dc_intervals(alpha).into_iter().filter(|d| d.mask != full).collect();
    proper
        .iter()
        .filter(|d| !proper.iter().any(|e| e.mask != d.mask && e.contains(d)))
        .copied()
        .collect()
}

/// Some factorization into irreducibles: repeatedly peel the left factor
/// cut out by the maximal proper DC interval with the smallest window start.
pub fn factor_into_irreducibles(alpha: &MarkedPermutation) -> Vec<MarkedPermutation> {
    let mut word = Vec::new();
    let mut cur = alpha.clone();
    while cur.size() > 0 {
        let mut candidates = maximal_proper(&cur);
        candidates.sort_by_key(|d| d.window.0);
        let inner = candidates[0].mask;
        let outer = full_mask(cur.size()) & !inner;
        word.push(restrict(&cur, outer));
        cur = restrict(&cur, inner);
    }
    word
}

/// `1̄⊕π`, `π⊕1̄`, `1̄⊖π` or `π⊖1̄` with `π` indecomposable for the
/// matching sum.
fn letter_shape(x: &MarkedPermutation) -> Shape {
    match x.shape() {
        Shape::UnitOplus(p) if p.is_oplus_indecomposable() => Shape::UnitOplus(p),
        Shape::OplusUnit(p) if p.is_oplus_indecomposable() => Shape::OplusUnit(p),
        Shape::UnitOminus(p) if p.is_ominus_indecomposable() => Shape::UnitOminus(p),
        Shape::OminusUnit(p) if p.is_ominus_indecomposable() => Shape::OminusUnit(p),
        _ => Shape::Other,
    }
}

/// Whether the adjacent pair `(x, y)` violates a stability condition.
pub fn is_unstable_pair(x: &MarkedPermutation, y: &MarkedPermutation, conv: Convention) -> bool {
    match (letter_shape(x), letter_shape(y)) {
        (Shape::UnitOplus(_), Shape::OplusUnit(_)) => true,
        (Shape::OminusUnit(_), Shape::UnitOminus(_)) => conv.ominus == OminusStability::Paper,
        (Shape::UnitOminus(_), Shape::OminusUnit(_)) => conv.ominus == OminusStability::Mirrored,
        _ => false,
    }
}

/// Whether `(x, y)` is one side of a `⊕`- or `⊖`-relation, so that swapping
/// the letters keeps the product.
pub fn is_relation_pair(x: &MarkedPermutation, y: &MarkedPermutation) -> bool {
    matches!(
        (letter_shape(x), letter_shape(y)),
        (Shape::UnitOplus(_), Shape::OplusUnit(_))
            | (Shape::OplusUnit(_), Shape::UnitOplus(_))
            | (Shape::UnitOminus(_), Shape::OminusUnit(_))
            | (Shape::OminusUnit(_), Shape::UnitOminus(_))
    )
}

pub fn is_stable_word(word: &[MarkedPermutation], conv: Convention) -> bool {
    word.windows(2).all(|p| !is_unstable_pair(&p[0], &p[1], conv))
}

/// Indices `i` at which an `i`-reduction applies.
pub fn reducible_positions(word: &[MarkedPermutation], conv: Convention) -> Vec<usize> {
    (0..word.len().saturating_sub(1)).filter(|&i| is_unstable_pair(&word[i], &word[i + 1], conv)).collect()
}

/// Applies reductions until the word is stable; `choose` picks which of the
/// available positions to reduce next.
pub fn stabilize_word_with(
    word: &[MarkedPermutation],
    conv: Convention,
    mut choose: impl FnMut(&[usize]) -> usize,
) -> Vec<MarkedPermutation> {
    let mut w = word.to_vec();
    loop {
        let pos = reducible_positions(&w, conv);
        if pos.is_empty() {
            return w;
        }
        let i = pos[choose(&pos) % pos.len()];
        w.swap(i, i + 1);
    }
}

/// Leftmost-first stabilization.
pub fn stabilize_word(word: &[MarkedPermutation], conv: Convention) -> Vec<MarkedPermutation> {
    stabilize_word_with(word, conv, |_| 0)
}

pub fn stable_factorization(alpha: &MarkedPermutation, conv: Convention) -> Vec<MarkedPermutation> {
    stabilize_word(&factor_into_irreducibles(alpha), conv)
}

/// Number of irreducible factors.
pub fn j_count(alpha: &MarkedPermutation) -> usize {
    factor_into_irreducibles(alpha).len()
}

/// Letter multiset of any factorization, sorted.
pub fn fac_multiset(alpha: &MarkedPermutation) -> Vec<MarkedPermutation> {
    let mut w = factor_into_irreducibles(alpha);
    w.sort();
    w
}

/// `≤_per` on permutations.
pub fn cmp_per_perm(a: &Permutation, b: &Permutation) -> Ordering {
    compare_words(a.values(), b.values(), u8::cmp)
}

/// `≤_per` on marked permutations.
pub fn cmp_per(a: &MarkedPermutation, b: &MarkedPermutation, conv: Convention) -> Ordering {
    compare_words(a.values(), b.values(), u8::cmp).then_with(|| match conv.rank {
        RankTieBreak::Position => a.mark().cmp(&b.mark()),
        RankTieBreak::Value => a.mark_value().cmp(&b.mark_value()),
    })
}

pub fn cmp_word(a: &[MarkedPermutation], b: &[MarkedPermutation], conv: Convention) -> Ordering {
    compare_words(a, b, |x, y| cmp_per(x, y, conv))
}

/// `≤_fac`: stable factorizations compared as words.
pub fn cmp_fac(a: &MarkedPermutation, b: &MarkedPermutation, conv: Convention) -> Ordering {
    cmp_word(&stable_factorization(a, conv), &stable_factorization(b, conv), conv)
}

/// Chen–Fox–Lyndon factorization of the stable word.
pub fn sl_factorization(alpha: &MarkedPermutation, conv: Convention) -> Vec<Vec<MarkedPermutation>> {
    cfl_factorize(&stable_factorization(alpha, conv), |x, y| cmp_per(x, y, conv))
}

/// Stable and Lyndon.
pub fn is_sl_word(word: &[MarkedPermutation], conv: Convention) -> bool {
    !word.is_empty()
        && is_stable_word(word, conv)
        && is_lyndon(word, |x, y| cmp_per(x, y, conv)).expect("nonempty")
}

pub fn is_sl(alpha: &MarkedPermutation, conv: Convention) -> bool {
    alpha.size() > 0 && is_sl_word(&stable_factorization(alpha, conv), conv)
}

pub fn inflate_word(word: &[MarkedPermutation]) -> MarkedPermutation {
    word.iter().fold(MarkedPermutation::unit(), |acc, x| acc.inflate(x))
}

pub const DEFAULT_FIBER_CAP: usize = 5;

/// Every word of irreducibles whose inflation is `alpha`.
pub fn all_factorizations(alpha: &MarkedPermutation, cap: usize) -> Result<BTreeSet<Vec<MarkedPermutation>>> {
    if alpha.size() > cap {
        return Err(Error::resource("fiber enumeration", alpha.size(), cap));
    }
    fn rec(alpha: &MarkedPermutation) -> BTreeSet<Vec<MarkedPermutation>> {
        let mut out = BTreeSet::new();
        if alpha.size() == 0 {
            out.insert(Vec::new());
            return out;
        }
        let full = full_mask(alpha.size());
        for d in maximal_proper(alpha) {
            let first = restrict(alpha, full & !d.mask);
            for mut rest in rec(&restrict(alpha, d.mask)).into_iter() {
                rest.insert(0, first.clone());
                out.insert(rest);
            }
        }
        out
    }
    Ok(rec(alpha))
}

/// Whether all words of a fiber are joined by adjacent relation swaps.
pub fn fiber_swap_connected(fiber: &BTreeSet<Vec<MarkedPermutation>>) -> bool {
    let Some(start) = fiber.iter().next() else {
        return true;
    };
    let mut seen: HashSet<Vec<MarkedPermutation>> = HashSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start.clone());
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if is_relation_pair(&w[i], &w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if fiber.contains(&v) && seen.insert(v.clone()) {
                    queue.push_back(v);
                }
            }
        }
    }
    seen.len() == fiber.len()
}

/// Every nonincreasing sequence of SL words multiplying to `alpha`, found by
/// splitting every fiber word into consecutive blocks.
pub fn sl_sequences_exhaustive(
    alpha: &MarkedPermutation,
    conv: Convention,
    cap: usize,
) -> Result<BTreeSet<Vec<Vec<MarkedPermutation>>>> {
    let mut out = BTreeSet::new();
    for w in all_factorizations(alpha, cap)? {
        let n = w.len();
        if n == 0 {
            out.insert(Vec::new());
            continue;
        }
        // bit i of `cuts` set means a block boundary after letter i
        for cuts in 0u32..(1 << (n - 1)) {
            let mut blocks: Vec<Vec<MarkedPermutation>> = vec![Vec::new()];
            for (i, x) in w.iter().enumerate() {
                blocks.last_mut().expect("nonempty").push(x.clone());
                if i + 1 < n && cuts & (1 << i) != 0 {
                    blocks.push(Vec::new());
                }
            }
            let ok = blocks.iter().all(|b| is_sl_word(b, conv))
                && blocks.windows(2).all(|p| cmp_word(&p[0], &p[1], conv) != Ordering::Less);
            if ok {
                out.insert(blocks);
            }
        }
    }
    Ok(out)
}

/// An unstable adjacent pair `(x, y)` with `x ≥_per y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnstablePairReport {
    pub first: MarkedPermutation,
    pub second: MarkedPermutation,
}

/// Unstable adjacent pairs of irreducible letters of size `≤ max_size`
/// whose first letter is not smaller than the second.
pub fn unstable_pairs_not_increasing(max_size: usize, conv: Convention) -> Result<Vec<UnstablePairReport>> {
    let mper = MPer::new();
    let mut letters = Vec::new();
    for n in 1..=max_size {
        letters.extend(mper.enumerate(n)?.iter().filter(|a| is_irreducible_mper(a)).cloned());
    }
    let mut out = Vec::new();
    for x in &letters {
        for y in &letters {
            if is_unstable_pair(x, y, conv) && cmp_per(x, y, conv) != Ordering::Less {
                out.push(UnstablePairReport { first: x.clone(), second: y.clone() });
            }
        }
    }
    Ok(out)
}

/// SL marked permutations of size exactly `n`.
pub fn sl_generators(n: usize, conv: Convention) -> Result<Vec<MarkedPermutation>> {
    Ok(MPer::new().enumerate(n)?.iter().filter(|a| is_sl(a, conv)).cloned().collect())
}

pub fn render_word(word: &[MarkedPermutation]) -> String {
    word.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ")
}

pub fn render_sl(words: &[Vec<MarkedPermutation>]) -> String {
    words.iter().map(|w| format!("({})", w.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))).collect::<Vec<_>>().join(" ; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> MarkedPermutation {
        s.parse().unwrap()
    }

    fn w(items: &[&str]) -> Vec<MarkedPermutation> {
        items.iter().map(|s| m(s)).collect()
    }

    const P: Convention = Convention::PAPER;

    #[test]
    fn dc_interval_examples() {
        let d = dc_intervals(&m("[2]13"));
        assert_eq!(d.iter().map(|x| x.mask).collect::<Vec<_>>(), vec![0b00, 0b01, 0b11]);
        assert_eq!(dc_intervals(&m("[1]423")).len(), 2);
        assert_eq!(dc_intervals(&MarkedPermutation::unit()).len(), 1);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible_mper(&m("[1]423")));
        assert!(is_irreducible_mper(&m("[1]2")));
        assert!(!is_irreducible_mper(&m("[1]23")));
        assert!(!is_irreducible_mper(&MarkedPermutation::unit()));
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factor_into_irreducibles(&m("[2]13")), w(&["[1]2", "[2]1"]));
        assert_eq!(factor_into_irreducibles(&m("[1]23")), w(&["[1]2", "[1]2"]));
        assert_eq!(factor_into_irreducibles(&m("[1]423")), w(&["[1]423"]));
    }

    #[test]
    fn stabilization_examples() {
        assert_eq!(stabilize_word(&w(&["[1]32", "21[3]"]), P), w(&["21[3]", "[1]32"]));
        assert_eq!(stabilize_word(&w(&["[1]2", "1[2]"]), P), w(&["1[2]", "[1]2"]));
        assert_eq!(stabilize_word(&w(&["1[2]", "[1]2"]), P), w(&["1[2]", "[1]2"]));
        assert_eq!(stable_factorization(&m("21[3]54"), P), w(&["21[3]", "[1]32"]));
        assert_eq!(stable_factorization(&m("[2]13"), P), w(&["[1]2", "[2]1"]));
        assert!(stable_factorization(&MarkedPermutation::unit(), P).is_empty());
    }

    #[test]
    fn ominus_convention_only_changes_the_ominus_pair() {
        // 2[1] = 1 ⊖ 1̄ and [2]1 = 1̄ ⊖ 1
        let paper_bad = w(&["2[1]", "[2]1"]);
        assert!(!is_stable_word(&paper_bad, Convention::PAPER));
        assert!(is_stable_word(&paper_bad, Convention::MIRRORED_OMINUS));
        let mirrored_bad = w(&["[2]1", "2[1]"]);
        assert!(is_stable_word(&mirrored_bad, Convention::PAPER));
        assert!(!is_stable_word(&mirrored_bad, Convention::MIRRORED_OMINUS));
    }

    #[test]
    fn per_order_examples() {
        let p = |s: &str| s.parse::<Permutation>().unwrap();
        let chain = [p("12345"), p("132"), p("231"), p("4123")];
        for pair in chain.windows(2) {
            assert_eq!(cmp_per_perm(&pair[0], &pair[1]), Ordering::Less);
        }
        let chain = w(&["1[3]2", "13[2]", "[2]31", "412[3]"]);
        for pair in chain.windows(2) {
            assert_eq!(cmp_per(&pair[0], &pair[1], P), Ordering::Less);
        }
        assert_eq!(cmp_per(&m("2[1]3"), &m("2[1]3"), P), Ordering::Equal);
        // value rank flips the first tie
        assert_eq!(cmp_per(&m("1[3]2"), &m("13[2]"), Convention::VALUE_RANK), Ordering::Greater);
    }

    #[test]
    fn word_order_examples() {
        assert_eq!(cmp_word(&w(&["24[1]3", "31[4]2"]), &w(&["31[4]2", "24[1]3"]), P), Ordering::Less);
        assert_eq!(cmp_word(&w(&["[1]32", "21[3]"]), &w(&["[1]432"]), P), Ordering::Less);
        assert_eq!(
            cmp_word(&w(&["2[4]13", "[1]423", "2[4]13"]), &w(&["2[4]13", "2[4]13", "[1]423"]), P),
            Ordering::Less
        );
        let a = inflate_word(&w(&["24[1]3", "31[4]2"]));
        let b = inflate_word(&w(&["31[4]2", "24[1]3"]));
        assert_eq!(cmp_fac(&a, &b, P), Ordering::Less);
        assert_eq!(cmp_fac(&MarkedPermutation::unit(), &a, P), Ordering::Less);
        assert_eq!(cmp_fac(&m("21[3]54"), &m("[1]432"), P), Ordering::Greater);
    }

    #[test]
    fn sl_factorization_examples() {
        assert_eq!(sl_factorization(&m("21[3]54"), P), vec![w(&["21[3]"]), w(&["[1]32"])]);
        assert_eq!(sl_factorization(&m("[1]23"), P), vec![w(&["[1]2"]), w(&["[1]2"])]);
        let lyndon = w(&["[1]2", "[1]32", "[1]2", "24[1]3"]);
        assert!(is_lyndon(&lyndon, |x, y| cmp_per(x, y, P)).unwrap());
    }

    #[test]
    fn fiber_examples() {
        assert_eq!(all_factorizations(&m("[2]13"), 5).unwrap().into_iter().collect::<Vec<_>>(), vec![w(&["[1]2", "[2]1"])]);
        let f = all_factorizations(&m("1[2]3"), 5).unwrap();
        assert_eq!(f, BTreeSet::from([w(&["1[2]", "[1]2"]), w(&["[1]2", "1[2]"])]));
        assert!(fiber_swap_connected(&f));
        assert_eq!(all_factorizations(&m("[1]423"), 5).unwrap().len(), 1);
        assert!(matches!(all_factorizations(&m("1234[5]67"), 5), Err(Error::Resource { .. })));
    }

    #[test]
    fn convention_names_round_trip() {
        for c in Convention::all() {
            assert_eq!(c.name().parse::<Convention>().unwrap(), c);
        }
        assert!("lexmax".parse::<Convention>().is_err());
    }
}
